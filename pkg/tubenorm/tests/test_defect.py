#!/usr/bin/env python3
"""
Tests for the bulk defect between the optimiser and the two-term profile.
"""

import math
import sys
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from tubenorm.geometry.curves import MissingEta
from tubenorm.geometry.generators import circle, straight_ended_curve, straight_segment
from tubenorm.solver.defect import defect_order, defect_report, poincare_constant


def test_poincare_constant_limit():
    """Test the discrete constant approaches (2/pi)^2 from above."""
    assert poincare_constant(1.0 / 512) == pytest.approx(4.0 / math.pi**2, rel=1e-5)
    assert poincare_constant(0.25) > 4.0 / math.pi**2


def test_straight_curve_has_no_defect():
    report = defect_report(straight_segment(length=1.0, eta=0.2), 0.05, (128, 33))
    assert report.defect_norm < 1e-12
    assert report.residual_norm < 1e-12
    assert report.margin == 1.0


def test_defect_needs_end_bands():
    with pytest.raises(MissingEta):
        defect_report(circle(), 0.05)


def test_defect_respects_its_bound():
    curve = straight_ended_curve(eta=0.2, turning=math.pi / 4, N=2048)
    report = defect_report(curve, 0.02, (512, 65))
    assert 0.0 < report.defect_norm <= report.bound
    assert 0.0 < report.margin < 1.0
    payload = report.to_dict()
    assert payload["eps"] == 0.02
    assert set(payload) == {"eps", "defect_norm", "residual_norm", "bound", "poincare_constant", "margin"}


@pytest.mark.slow
def test_defect_scales_like_eps_to_the_fifth():
    curve = straight_ended_curve(eta=0.2, turning=math.pi / 4, N=2048)
    reports = [defect_report(curve, eps, (1024, 129)) for eps in (0.04, 0.02, 0.01, 0.005)]
    assert all(report.within_bound for report in reports)
    assert defect_order(reports) >= 4.5
