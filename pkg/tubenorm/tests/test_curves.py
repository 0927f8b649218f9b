#!/usr/bin/env python3
"""
Tests for curve resampling, frames, curvature and the global radius.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from tubenorm.geometry.curves import (
    UNBOUNDED,
    Curve,
    DegenerateInput,
    MissingEta,
    NotClosed,
    SelfIntersecting,
    TooFewPoints,
    TubeNotRegular,
    arclength_spread,
    check_regular,
    curvature_profile,
    elastica_energy,
    global_radius,
    integrate_over_parameter,
    load_curve_csv,
    resample_arclength,
    tube_injectivity_gap,
    tube_map,
    turning_number,
)
from tubenorm.geometry.generators import (
    circle,
    ellipse,
    ellipse_perimeter,
    lemniscate,
    perturbed_circle,
    straight_ended_curve,
    straight_segment,
)


def _circle_points(count, R=1.0, clockwise=False):
    theta = 2.0 * math.pi * np.arange(count) / count
    if clockwise:
        theta = -theta
    return np.column_stack([R * np.cos(theta), R * np.sin(theta)])


def test_resample_circle_length():
    """Test spline resampling of a sampled unit circle keeps its length."""
    curve = resample_arclength(_circle_points(256), 256)
    assert curve.is_closed
    assert curve.N == 256
    assert abs(curve.length - 2.0 * math.pi) < 1e-6
    assert arclength_spread(curve) < 1e-6
    assert not curve.reoriented


def test_resample_square_polygonal():
    """Test polygonal resampling keeps corners and measures the polyline exactly."""
    square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    curve = resample_arclength(square, 64, mode="polygonal")
    assert curve.length == pytest.approx(4.0, abs=1e-12)
    corners = {tuple(np.round(point, 12)) for point in curve.samples}
    for corner in square:
        assert corner in corners


def test_resample_dense_ellipse_matches_perimeter():
    theta = 2.0 * math.pi * np.arange(2000) / 2000
    points = np.column_stack([np.cos(theta), 0.6 * np.sin(theta)])
    curve = resample_arclength(points, 512)
    assert curve.length == pytest.approx(ellipse_perimeter(1.0, 0.6), rel=1e-6)


def test_clockwise_input_is_reoriented():
    """Test clockwise closed input is reversed and flagged."""
    curve = resample_arclength(_circle_points(128, clockwise=True), 128)
    assert curve.reoriented
    assert turning_number(curve) == pytest.approx(1.0, abs=1e-9)
    assert np.all(curve.frame.kappa > 0)


def test_resample_rejects_degenerate_input():
    with pytest.raises(TooFewPoints):
        resample_arclength(_circle_points(3), 64)
    with pytest.raises(TooFewPoints):
        resample_arclength(_circle_points(64), 8)
    with pytest.raises(DegenerateInput):
        resample_arclength(np.zeros((10, 2)), 64)
    with pytest.raises(DegenerateInput):
        resample_arclength(np.array([[0.0, 0.0], [1.0, np.nan], [2.0, 0.0], [3.0, 1.0]]), 64)
    with pytest.raises(ValueError):
        resample_arclength(_circle_points(64), 64, mode="bezier")


def test_curve_rejects_repeated_endpoint():
    points = np.vstack([_circle_points(64), [[1.0, 0.0]]])
    with pytest.raises(DegenerateInput):
        Curve(points, "closed", 2.0 * math.pi)


def test_circle_curvature_is_reciprocal_radius():
    """Test turning-angle curvature is exact on a sampled circle."""
    for R in (0.5, 1.0, 2.0):
        curve = circle(R=R, N=256)
        assert np.allclose(curve.frame.kappa, 1.0 / R, rtol=1e-9)


def test_ellipse_vertex_curvature():
    curve = ellipse(1.0, 0.6, N=512)
    kappa = curve.frame.kappa
    assert kappa[0] == pytest.approx(1.0 / 0.36, rel=1e-3)
    assert kappa[128] == pytest.approx(0.6, rel=1e-3)


def test_frame_orthonormal():
    """Test unit normals orthogonal to the unit tangents at every sample."""
    for curve in (ellipse(1.0, 0.6), perturbed_circle(), straight_ended_curve()):
        frame = curvature_profile(curve)
        assert np.allclose(np.linalg.norm(frame.normal, axis=1), 1.0, atol=1e-12)
        assert np.allclose(np.einsum("ij,ij->i", frame.normal, frame.tangent), 0.0, atol=1e-12)
        sample = frame[3]
        assert sample.curvature == pytest.approx(float(frame.kappa[3]))


def test_elastica_energy():
    """Test integral of kappa^2: 2 pi / R on circles, matched by a refined ellipse."""
    assert elastica_energy(circle()) == pytest.approx(2.0 * math.pi, abs=1e-4)
    assert elastica_energy(circle(R=2.0)) == pytest.approx(math.pi, rel=1e-9)
    coarse = elastica_energy(ellipse(1.0, 0.6, N=8192))
    fine = elastica_energy(ellipse(1.0, 0.6, N=65536))
    assert coarse == pytest.approx(fine, rel=1e-5)


def test_turning_number_of_closed_curves():
    for curve in (circle(), ellipse(1.0, 0.6), perturbed_circle(amplitude=0.1, frequency=4)):
        assert turning_number(curve) == pytest.approx(1.0, abs=1e-5 / (2.0 * math.pi))
    with pytest.raises(NotClosed):
        turning_number(straight_segment())


def test_global_radius_examples():
    """Test rho on a circle, a straight segment and an ellipse."""
    assert float(global_radius(circle(R=1.5))) == pytest.approx(1.5, abs=1e-4)
    assert global_radius(straight_segment()) is UNBOUNDED
    assert float(global_radius(ellipse(1.0, 0.6))) == pytest.approx(0.36, rel=1e-3)


@pytest.mark.parametrize("angle", [0.0, math.pi / 6, 1.0, 2.5])
def test_rotated_and_shifted_segments_are_unbounded(angle):
    """Test rounding in the samples never turns a straight segment into a finite radius."""
    segment = straight_segment(length=3.0, angle=angle, N=1024)
    assert global_radius(segment) is UNBOUNDED
    shifted = Curve(segment.samples + [40.0, -25.0], "open", segment.length, name="shifted")
    assert global_radius(shifted) is UNBOUNDED
    assert global_radius(straight_ended_curve(eta=0.2)) is not UNBOUNDED


def test_global_radius_scale_covariance():
    base = ellipse(1.0, 0.6)
    rho = float(global_radius(base))
    for factor in (0.5, 2.0):
        assert float(global_radius(base.scaled(factor))) == pytest.approx(factor * rho, rel=1e-12)


def test_global_radius_self_intersecting():
    """Test a figure eight is rejected with the offending radius attached."""
    with pytest.raises(SelfIntersecting) as info:
        global_radius(lemniscate())
    assert info.value.radius < 0.05


def test_check_regular():
    curve = circle()
    assert check_regular(curve, 0.5) == pytest.approx(1.0, abs=1e-4)
    with pytest.raises(TubeNotRegular):
        check_regular(curve, 0.96)
    with pytest.raises(ValueError):
        check_regular(curve, 0.0)


def test_tube_map_circle():
    """Test the tube map on the unit circle: t = 1 lands at radius 1 - eps."""
    curve = circle()
    point, jacobian = tube_map(curve, 0.1, 0.0, 1.0)
    assert np.allclose(point, [0.9, 0.0], atol=1e-6)
    assert float(jacobian) == pytest.approx(0.1 * 2.0 * math.pi * 0.9, rel=1e-6)
    centre, jacobian = tube_map(curve, 0.1, 0.3, 0.0)
    assert np.allclose(centre, curve.position(0.3))
    assert float(jacobian) == pytest.approx(0.1 * curve.length)


def test_tube_map_straight_segment():
    curve = straight_segment(length=2.0)
    _, jacobian = tube_map(curve, 0.2, np.linspace(0, 1, 5), np.linspace(-1, 1, 5))
    assert np.allclose(jacobian, 0.2 * 2.0)


def test_tube_injectivity_gap_positive():
    for curve in (circle(), ellipse(1.0, 0.6)):
        rho = float(global_radius(curve))
        assert tube_injectivity_gap(curve, 0.9 * rho) > 0.0


def test_straight_ended_validation():
    """Test eta is checked against the end bands rather than trusted."""
    curve = straight_ended_curve(eta=0.2, turning=math.pi / 4)
    assert curve.straight_ended
    kappa = curve.frame.kappa
    band = (curve.params > 0.02) & (curve.params < 0.38)
    assert np.allclose(kappa[band], 0.0, atol=1e-6)
    total = curve.length * integrate_over_parameter(curve, kappa)
    assert total == pytest.approx(math.pi / 4, rel=1e-3)
    with pytest.raises(MissingEta):
        Curve(curve.samples, "open", curve.length, eta=0.24)
    with pytest.raises(MissingEta):
        Curve(circle().samples, "closed", 2.0 * math.pi, eta=0.1)


def test_load_curve_csv(tmp_path):
    path = tmp_path / "ring.csv"
    rows = "\n".join(f"{x:.17g},{y:.17g}" for x, y in _circle_points(200, R=2.0))
    path.write_text("x,y\n" + rows + "\n", encoding="utf-8")
    curve = load_curve_csv(path, N=256)
    assert curve.name == "ring"
    assert curve.length == pytest.approx(4.0 * math.pi, rel=1e-5)

    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n0,0\n", encoding="utf-8")
    with pytest.raises(DegenerateInput):
        load_curve_csv(bad)
