#!/usr/bin/env python3
"""
Tests for the expansion fit and its schedule checks.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from tubenorm.asymptotics.fitting import (
    CurveMeta,
    IllConditioned,
    fit_expansion,
    remainder_slope,
    validate_schedule,
)
from tubenorm.asymptotics.sweeps import closed_sweep
from tubenorm.geometry.generators import circle
from tubenorm.run_config import load_run_config
from tubenorm.solver.oracle import circle_annulus_oracle

CIRCLE = CurveMeta("closed", 2.0 * math.pi, 2.0 * math.pi, name="circle")
ORACLE_EPS = [0.1, 0.08, 0.06, 0.04, 0.02]


def _oracle_records():
    return [(eps, circle_annulus_oracle(1.0, eps)) for eps in ORACLE_EPS]


def test_curve_meta_from_curve():
    meta = CurveMeta.from_curve(circle())
    assert meta.kind == "closed"
    assert meta.length == pytest.approx(2.0 * math.pi)
    targets = meta.targets()
    assert targets["c3"] == pytest.approx(4.0 * math.pi / 3.0)
    assert targets["c5"] == pytest.approx(4.0 * math.pi / 45.0)
    assert "c4" not in targets


def test_circle_oracle_fit_recovers_elastica_coefficient():
    """Test oracle data give c5 = 4 pi / 45 within half a percent."""
    fit = fit_expansion(_oracle_records(), CIRCLE)
    assert fit.coefficients["c5"] == pytest.approx(4.0 * math.pi / 45.0, rel=5e-3)
    assert fit.relative_gaps["c5"] < 5e-3
    assert fit.coefficients["c4"] == 0.0
    assert fit.coefficients["c3"] == pytest.approx(4.0 * math.pi / 3.0)
    assert fit.powers == (5, 6)
    assert fit.condition < 1e8


def test_free_leading_sanity_fit():
    fit = fit_expansion(_oracle_records(), CIRCLE, free_leading=True)
    assert fit.free_leading
    assert fit.powers == (3, 5, 6)
    assert fit.coefficients["c3"] == pytest.approx(4.0 * math.pi / 3.0, rel=1e-3)


def test_leading_only_records_fit_to_zero():
    records = [(eps, (2.0 / 3.0) * eps**3 * CIRCLE.length) for eps in ORACLE_EPS]
    fit = fit_expansion(records, CIRCLE)
    assert abs(fit.coefficients["c5"]) <= 1e-9
    assert abs(fit.coefficients["c6"]) <= 1e-9


def test_open_fit_recovers_end_term():
    """Test synthetic open-curve records return c4 = 2 alpha."""
    alpha = 0.139917
    meta = CurveMeta("open", 1.0, 0.9, alpha=alpha, name="bend")
    eps_values = 0.04 * 2.0 ** (-0.75 * np.arange(5))
    records = [
        (eps, (2.0 / 3.0) * eps**3 + 2.0 * alpha * eps**4 + 0.04 * eps**5) for eps in eps_values
    ]
    fit = fit_expansion(records, meta)
    assert fit.powers == (4, 5, 6)
    assert fit.coefficients["c4"] == pytest.approx(2.0 * alpha, rel=1e-8)
    assert fit.targets["c4"] == pytest.approx(2.0 * alpha)
    assert fit.relative_gaps["c4"] < 1e-8
    assert fit.slope == pytest.approx(4.0, abs=0.1)


def test_schedule_validation():
    with pytest.raises(ValueError):
        validate_schedule([0.1, 0.08, 0.06, 0.04])
    with pytest.raises(ValueError):
        validate_schedule([0.1, 0.09, 0.08, 0.07, 0.06])
    with pytest.raises(ValueError):
        validate_schedule([0.1, 0.1, 0.05, 0.04, 0.02])
    validate_schedule(ORACLE_EPS)


def test_near_duplicate_schedule_is_ill_conditioned():
    eps_values = [0.04, 0.01, 0.01 + 1e-12, 0.01 + 2e-12, 0.01 + 3e-12]
    meta = CurveMeta("open", 1.0, 1.0, alpha=0.14)
    records = [(eps, (2.0 / 3.0) * eps**3 + 0.28 * eps**4) for eps in eps_values]
    with pytest.raises(IllConditioned) as info:
        fit_expansion(records, meta)
    assert info.value.condition > 1e8


def test_remainder_slope():
    eps = np.array([0.1, 0.05, 0.025, 0.0125])
    assert remainder_slope(eps, 3.0 * eps**5) == pytest.approx(5.0)
    assert remainder_slope(eps, np.zeros(4)) is None


def test_fit_serialises():
    fit = fit_expansion(_oracle_records(), CIRCLE)
    payload = fit.to_dict()
    assert payload["model"] == "closed"
    assert len(payload["records"]) == 5
    assert payload["records"][0][0] == 0.1
    assert fit.remainder(0.1) == pytest.approx(
        fit.coefficients["c5"] * 1e-5 + fit.coefficients["c6"] * 1e-6
    )


@pytest.mark.slow
def test_ellipse_fit_recovers_curvature_coefficient():
    """Test the bundled ellipse sweep gives c5 within 3% and the free c3 within 0.1%."""
    config = load_run_config("ellipse_fit.yaml")
    curve = config.curve.build()
    records = closed_sweep(
        curve, config.eps, config.solver.grid, config.solver.method, threads=config.sweep.threads
    )
    pairs = [(r.eps, r.norm_sq) for r in records]
    meta = CurveMeta.from_curve(curve)
    fit = fit_expansion(pairs, meta)
    assert fit.coefficients["c5"] == pytest.approx(meta.targets()["c5"], rel=0.03)
    sanity = fit_expansion(pairs, meta, free_leading=True)
    assert sanity.coefficients["c3"] == pytest.approx((2.0 / 3.0) * curve.length, rel=1e-3)
