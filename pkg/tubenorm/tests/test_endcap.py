#!/usr/bin/env python3
"""
Tests for the cap mesh, the harmonic corrector, the end constant alpha and the
explicit comparison bound.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from tubenorm.endcap.comparison import (
    DISC_CONSTANT,
    arc_margin,
    comparison_bound,
    comparison_laplacian,
    comparison_psi,
    rectangle_decay_bound,
    rectangle_supersolution,
)
from tubenorm.endcap.harmonic import (
    alpha_constant,
    alpha_estimate,
    cap_contribution,
    decay_check,
    phi,
    phi_integral,
    solve_cap_psi,
)
from tubenorm.endcap.mesh import ARC, SIDE, TRUNCATION, build_cap_domain

ALPHA = 0.139917


def test_cap_area():
    """Test the triangulated area matches strip plus half disc."""
    domain = build_cap_domain(5.0, 0.05)
    assert domain.area == pytest.approx(2.0 * 5.0 + 0.5 * math.pi, abs=2.0 * 0.05**2)
    assert domain.exact_area == pytest.approx(10.0 + 0.5 * math.pi)
    assert domain.diameters.max() <= 0.05 + 1e-12


def test_arc_nodes_on_unit_circle():
    domain = build_cap_domain(2.0, 0.1)
    arc = domain.nodes[domain.boundary_nodes(ARC)]
    assert len(arc) > 0
    assert np.allclose(np.hypot(arc[:, 0], arc[:, 1]), 1.0, atol=1e-12)
    assert np.all(arc[:, 0] > 0.0)
    truncation = domain.nodes[domain.boundary_nodes(TRUNCATION)]
    assert np.allclose(truncation[:, 0], -2.0)
    sides = domain.nodes[domain.boundary_nodes(SIDE)]
    assert np.allclose(np.abs(sides[:, 1]), 1.0)


def test_doubling_truncation_adds_strip_area():
    short = build_cap_domain(4.0, 0.1)
    long = build_cap_domain(8.0, 0.1)
    assert long.area - short.area == pytest.approx(8.0, rel=1e-9)


def test_mesh_arguments_are_validated():
    with pytest.raises(ValueError):
        build_cap_domain(1.5, 0.05)
    with pytest.raises(ValueError):
        build_cap_domain(5.0, 0.2)


def test_phi_integral():
    domain = build_cap_domain(4.0, 0.05)
    values = phi(domain.nodes[:, 0], domain.nodes[:, 1])
    assert domain.integrate(values) == pytest.approx(phi_integral(4.0), rel=1e-3)
    assert phi_integral(4.0) - (2.0 / 3.0) * 4.0 == pytest.approx(3.0 * math.pi / 16.0)


def test_corrector_maximum_principle():
    """Test psi stays within its boundary data range and above the comparison function."""
    solution = solve_cap_psi(build_cap_domain(4.0, 0.1))
    psi = solution.psi
    assert psi.min() >= -0.5 - 1e-9
    assert psi.max() <= 1e-9
    assert np.abs(psi).max() <= 0.5 + 1e-3
    boundary = solution.domain.boundary_nodes()
    nodes = solution.domain.nodes[boundary]
    assert np.all(psi[boundary] >= comparison_psi(nodes[:, 0], nodes[:, 1]) - 1e-12)
    rows = list(solution.to_rows())
    assert len(rows) == solution.domain.node_count


def test_alpha_estimate_on_short_cap():
    estimate = alpha_estimate(h=0.1, L=4.0)
    assert estimate.alpha == pytest.approx(ALPHA, abs=2e-3)
    assert estimate.alpha > 0.0
    assert estimate.error_budget > 4.0 * math.exp(-4.0)
    payload = estimate.to_dict()
    assert [level["h"] for level in payload["levels"]] == [0.1, 0.05]


def test_decay_of_the_corrector():
    solution = solve_cap_psi(build_cap_domain(6.0, 0.1))
    report = decay_check(solution)
    assert [station.x for station in report.stations] == [-1.0, -2.0, -3.0, -4.0, -5.0]
    assert report.within_bounds
    assert report.margins_monotone
    far = report.stations[-1]
    assert far.max_abs_psi < 0.01


def test_cap_contribution_adds_strip_exactly():
    """Test a longer straight end adds exactly (2/3) eps^3 per extra length."""
    eps = 0.05
    short = cap_contribution(eps, 0.6, h=0.1, L_max=10.0)
    long = cap_contribution(eps, 1.0, h=0.1, L_max=10.0)
    assert long - short == pytest.approx((2.0 / 3.0) * eps**3 * 0.4, rel=1e-9)
    with pytest.raises(ValueError):
        cap_contribution(0.15, 0.2)


@pytest.mark.slow
def test_alpha_constant_reference_value():
    alpha, budget = alpha_constant(h=0.04, L=10.0)
    assert alpha == pytest.approx(ALPHA, abs=2e-3)
    assert budget < 2e-3
    fine = solve_cap_psi(build_cap_domain(10.0, 0.02))
    assert fine.integral_psi == pytest.approx(ALPHA - DISC_CONSTANT, abs=2e-3)


@pytest.mark.slow
def test_alpha_truncation_is_exponentially_small():
    short, _ = alpha_constant(h=0.04, L=4.0)
    long, _ = alpha_constant(h=0.04, L=10.0)
    assert abs(short - long) <= 4.0 * math.exp(-4.0) + 1e-3


@pytest.mark.slow
def test_alpha_mesh_convergence_order():
    values = [solve_cap_psi(build_cap_domain(4.0, h)).alpha_estimate for h in (0.1, 0.05, 0.025)]
    order = math.log2(abs(values[0] - values[1]) / abs(values[1] - values[2]))
    assert order >= 1.8


def test_comparison_integral_and_positivity():
    bound = comparison_bound()
    assert bound.integral_tilde_psi == pytest.approx(-0.5875, abs=1e-3)
    assert bound.positive
    assert bound.alpha_lower_bound == pytest.approx(DISC_CONSTANT + bound.integral_tilde_psi)
    assert 0.0 < bound.alpha_lower_bound < ALPHA


def test_comparison_function_is_harmonic():
    rng = np.random.default_rng(100)
    x = rng.uniform(-10.0, 0.0, size=100)
    y = rng.uniform(-1.0, 1.0, size=100)
    assert np.all(np.abs(comparison_laplacian(x, y)) <= 1e-12)
    assert np.all(np.abs(_five_point_laplacian(comparison_psi, x, y)) <= 1e-5)


def _five_point_laplacian(function, x, y, h=1e-3):
    return (
        function(x + h, y) + function(x - h, y) + function(x, y + h) + function(x, y - h)
        - 4.0 * function(x, y)
    ) / h**2


def test_comparison_laplacian_detects_non_harmonic_modes():
    """Test e^x cos 2y has Laplacian -3 e^x cos 2y, analytically and by differences."""
    modes = [(1.0, 1.0, 2.0)]
    x = np.array([0.0, -0.5, -2.0])
    y = np.array([0.0, 0.3, -0.7])
    expected = -3.0 * np.exp(x) * np.cos(2.0 * y)
    assert np.allclose(comparison_laplacian(x, y, modes), expected, rtol=1e-12)

    def psi(u, v):
        return comparison_psi(u, v, modes)

    assert np.allclose(_five_point_laplacian(psi, x, y), expected, atol=1e-4)


def test_comparison_sits_below_the_boundary_data():
    assert arc_margin() >= 0.0
    x = np.linspace(-10.0, 0.0, 201)
    assert np.all(comparison_psi(x, np.ones_like(x)) <= 0.0)
    assert np.all(comparison_psi(x, -np.ones_like(x)) <= 0.0)


def test_rectangle_barrier():
    """Test the rectangle supersolution and the 4 e^-a decay bound."""
    a = 3.0
    y = np.linspace(-1.0, 1.0, 51)
    assert np.all(rectangle_supersolution(a, 1.0, a, y) >= 1.0 - 1e-12)
    assert np.all(rectangle_supersolution(a, 1.0, -a, y) >= 1.0 - 1e-12)
    x = np.linspace(-a, a, 51)
    assert np.all(rectangle_supersolution(a, 1.0, x, np.ones_like(x)) >= 0.0)
    centre = float(rectangle_supersolution(a, 1.0, 0.0, 0.0))
    assert centre <= rectangle_decay_bound(a, 1.0)
    assert rectangle_decay_bound(3.0, 1.0) == pytest.approx(4.0 * math.exp(-3.0))
    assert rectangle_decay_bound(3.0, 1.0) == pytest.approx(0.199, abs=1e-3)
