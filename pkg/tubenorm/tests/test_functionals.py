#!/usr/bin/env python3
"""
Tests for the rescaled functional, its candidate limits and the limit experiment.
"""

import math
import sys
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from tubenorm.asymptotics.functionals import (
    curvature_line_integral,
    g_eps,
    g_zero,
    gamma_experiment,
)
from tubenorm.geometry.curves import NotClosed
from tubenorm.geometry.generators import circle, ellipse, lemniscate, straight_segment
from tubenorm.geometry.systems import CurveSystem
from tubenorm.solver.oracle import circle_annulus_oracle


def _unit_circle(**kwargs):
    return CurveSystem((circle(N=512, **kwargs),), name="unit_circle")


def test_g_eps_unit_circle():
    """Test G_eps on the unit circle against the annulus formula."""
    eps = 0.1
    expected = circle_annulus_oracle(1.0, eps) / eps**5 - (2.0 / 3.0) * 2.0 * math.pi / eps**2
    value = g_eps(_unit_circle(), eps, grid=(512, 65))
    assert value == pytest.approx(expected, abs=1e-3)
    assert value == pytest.approx(0.2807, abs=2e-3)


def test_g_eps_is_infinite_when_inadmissible():
    small = CurveSystem((circle(R=0.05),))
    assert g_eps(small, 0.1) == math.inf
    assert g_eps(CurveSystem((lemniscate(),)), 0.05) == math.inf
    with pytest.raises(ValueError):
        g_eps(_unit_circle(), 0.0)


def test_g_eps_is_additive_over_disjoint_members():
    single = g_eps(_unit_circle(), 0.1, grid=(256, 33))
    pair = CurveSystem((circle(N=512), circle(N=512, center=(5.0, 0.0))))
    assert g_eps(pair, 0.1, grid=(256, 33)) == pytest.approx(2.0 * single, rel=1e-9)


def test_g_zero_values():
    """Test 8 pi^2 / 45 on circles of any radius and +inf across a transverse node."""
    target = 8.0 * math.pi**2 / 45.0
    assert g_zero(_unit_circle()) == pytest.approx(target, rel=1e-9)
    assert g_zero(CurveSystem((circle(R=3.0),))) == pytest.approx(target, rel=1e-9)
    assert g_zero(CurveSystem((lemniscate(),))) == math.inf
    assert curvature_line_integral(_unit_circle()) == pytest.approx(4.0 * math.pi / 45.0, rel=1e-9)


def test_g_zero_scale_invariance():
    base = ellipse(1.0, 0.6)
    value = g_zero(CurveSystem((base,)))
    for factor in (0.5, 3.0):
        assert g_zero(CurveSystem((base.scaled(factor),))) == pytest.approx(value, rel=1e-12)


def test_open_curves_are_rejected():
    with pytest.raises(NotClosed):
        gamma_experiment(CurveSystem((straight_segment(),)), [0.1])


def test_gamma_experiment_report_structure():
    report = gamma_experiment(
        _unit_circle(), [0.05, 0.1], perturbation_mode="oscillation", n_values=(2,), grid=(256, 33)
    )
    assert [entry["eps"] for entry in report.schedule] == [0.1, 0.05]
    assert report.line_limit == pytest.approx(4.0 * math.pi / 45.0)
    assert report.weighted_limit == pytest.approx(8.0 * math.pi**2 / 45.0)
    (entry,) = report.perturbations
    assert entry["n"] == 2
    assert entry["amplitude"] == pytest.approx(0.25)
    assert entry["eps"] == pytest.approx(0.5 * entry["rho"])
    assert math.isfinite(entry["g_eps"])
    assert report.perturbation_min_gap == entry["gap_line"]
    payload = report.to_dict()
    assert set(payload["trends"]) == {"line", "weighted"}
    with pytest.raises(ValueError):
        gamma_experiment(_unit_circle(), [0.1], perturbation_mode="spiral")


@pytest.mark.slow
def test_gamma_gap_trends_on_unit_circle():
    """Test the line-integral limit is approached and the weighted one is not."""
    report = gamma_experiment(_unit_circle(), [0.1, 0.05, 0.025, 0.0125], method="direct")
    trends = report.trends
    assert trends["line"]["decreasing"]
    assert trends["line"]["trends_to_zero"]
    assert not trends["weighted"]["trends_to_zero"]
    assert abs(report.schedule[-1]["gap_line"]) < 0.01
