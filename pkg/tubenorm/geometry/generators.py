"""
Analytic test curves.

Each generator builds its samples from an exact parametrisation and inverts the
arclength with Gauss-Legendre panels, so the samples are uniform in arclength to
quadrature precision rather than to spline precision.
"""

import math
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad

from .curves import CLOSED, OPEN, Curve, invert_arclength, resample_arclength

PointMap = Callable[[np.ndarray], np.ndarray]


def _from_parametrisation(
    position: PointMap,
    velocity: PointMap,
    N: int,
    kind: str,
    name: str,
    panels: int = 256,
    eta: Optional[float] = None,
) -> Curve:
    knots = np.linspace(0.0, 1.0, panels + 1)
    fractions = np.arange(N) / N if kind == CLOSED else np.linspace(0.0, 1.0, N)
    u, total = invert_arclength(velocity, knots, fractions)
    return Curve(position(u), kind, total, eta=eta, name=name)


def circle(
    R: float = 1.0,
    N: int = 256,
    center: Sequence[float] = (0.0, 0.0),
    phase: float = 0.0,
    turns: int = 1,
) -> Curve:
    """Counterclockwise circle; ``turns > 1`` traverses it repeatedly (a doubled trace)."""
    if not R > 0:
        raise ValueError(f"radius must be positive, got {R}")
    if turns < 1 or int(turns) != turns:
        raise ValueError(f"turns must be a positive integer, got {turns}")
    angle = phase + 2.0 * math.pi * turns * np.arange(N) / N
    samples = np.column_stack([center[0] + R * np.cos(angle), center[1] + R * np.sin(angle)])
    name = "circle" if turns == 1 else f"circle_x{turns}"
    return Curve(samples, CLOSED, 2.0 * math.pi * R * turns, name=name)


def ellipse(a: float = 2.0, b: float = 1.0, N: int = 512) -> Curve:
    if not (a > 0 and b > 0):
        raise ValueError(f"semi-axes must be positive, got {a}, {b}")
    omega = 2.0 * math.pi

    def position(u):
        return np.stack([a * np.cos(omega * u), b * np.sin(omega * u)], axis=-1)

    def velocity(u):
        return omega * np.stack([-a * np.sin(omega * u), b * np.cos(omega * u)], axis=-1)

    return _from_parametrisation(position, velocity, N, CLOSED, "ellipse")


def ellipse_perimeter(a: float, b: float) -> float:
    """Perimeter by adaptive quadrature."""
    value, _ = quad(
        lambda theta: math.hypot(a * math.sin(theta), b * math.cos(theta)),
        0.0,
        2.0 * math.pi,
        epsabs=0.0,
        epsrel=1e-13,
        limit=200,
    )
    return value


def lemniscate(N: int = 512, scale: float = 1.0) -> Curve:
    """Figure-eight x = cos u, y = sin(2u)/2 with a transverse node at the origin."""
    omega = 2.0 * math.pi

    def position(u):
        return scale * np.stack([np.cos(omega * u), 0.5 * np.sin(2.0 * omega * u)], axis=-1)

    def velocity(u):
        return (scale * omega) * np.stack(
            [-np.sin(omega * u), np.cos(2.0 * omega * u)], axis=-1
        )

    return _from_parametrisation(position, velocity, N, CLOSED, "lemniscate")


def radial_curve(
    radius: Callable[[np.ndarray], np.ndarray],
    derivative: Callable[[np.ndarray], np.ndarray],
    N: int,
    name: str,
) -> Curve:
    """Star-shaped closed curve r(theta) (cos theta, sin theta)."""
    omega = 2.0 * math.pi

    def position(u):
        theta = omega * u
        return radius(theta)[..., None] * np.stack([np.cos(theta), np.sin(theta)], axis=-1)

    def velocity(u):
        theta = omega * u
        r, dr = radius(theta)[..., None], derivative(theta)[..., None]
        radial = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        angular = np.stack([-np.sin(theta), np.cos(theta)], axis=-1)
        return omega * (dr * radial + r * angular)

    return _from_parametrisation(position, velocity, N, CLOSED, name, panels=512)


def perturbed_circle(
    R: float = 1.0, amplitude: float = 0.05, frequency: int = 3, N: int = 512
) -> Curve:
    """Circle moved by amplitude * sin(frequency * theta) along its inward normal."""
    if not 0 <= amplitude < R:
        raise ValueError(f"amplitude must lie in [0, R), got {amplitude}")
    return radial_curve(
        lambda theta: R - amplitude * np.sin(frequency * theta),
        lambda theta: -amplitude * frequency * np.cos(frequency * theta),
        N,
        f"perturbed_circle_k{frequency}",
    )


def random_perturbed_circle(
    rng: np.random.Generator,
    modes: int = 3,
    amplitude: float = 0.05,
    R: float = 1.0,
    N: int = 512,
) -> Curve:
    """Circle with random Fourier modes 2..modes+1 damped like 1/k^2."""
    k = np.arange(2, modes + 2)
    cosines = amplitude * rng.uniform(-1.0, 1.0, size=modes) / k**2
    sines = amplitude * rng.uniform(-1.0, 1.0, size=modes) / k**2

    def radius(theta):
        angle = theta[..., None] * k
        return R * (1.0 + (np.cos(angle) * cosines + np.sin(angle) * sines).sum(-1))

    def derivative(theta):
        angle = theta[..., None] * k
        return R * ((-np.sin(angle) * cosines + np.cos(angle) * sines) * k).sum(-1)

    return radial_curve(radius, derivative, N, "random_circle")


def straight_segment(
    length: float = 1.0, N: int = 256, eta: Optional[float] = 0.2, angle: float = 0.0
) -> Curve:
    direction = np.array([math.cos(angle), math.sin(angle)])
    samples = np.linspace(0.0, length, N)[:, None] * direction[None, :]
    return Curve(samples, OPEN, length, eta=eta, name="segment")


def straight_ended_curve(
    length: float = 1.0, eta: float = 0.2, turning: float = math.pi / 2, N: int = 1024
) -> Curve:
    """Open curve straight on [0, 2 eta] and [1 - 2 eta, 1] with a smooth bend between.

    On the bend the curvature is turning / (w l) * (1 - cos 2 pi u) with
    u = (s - 2 eta) / w and w = 1 - 4 eta, so it vanishes with its slope at both
    ends of the bend and the tangent turns by ``turning`` in total.
    """
    if not 0.0 < eta < 0.25:
        raise ValueError(f"end-band width must lie in (0, 1/4), got {eta}")
    start, width = 2.0 * eta, 1.0 - 4.0 * eta
    nodes, weights = leggauss(32)

    def tangent_angle(s):
        u = (s - start) / width
        return turning * (u - np.sin(2.0 * math.pi * u) / (2.0 * math.pi))

    def bend_position(s):
        half = 0.5 * (s - start)
        sigma = start + half[:, None] * (1.0 + nodes[None, :])
        theta = tangent_angle(sigma)
        offset = np.stack([np.cos(theta) @ weights, np.sin(theta) @ weights], axis=-1)
        return np.array([start * length, 0.0]) + length * half[:, None] * offset

    s = np.linspace(0.0, 1.0, N)
    samples = np.empty((N, 2))
    head = s <= start
    tail = s >= 1.0 - start
    bend = ~(head | tail)
    samples[head] = np.column_stack([length * s[head], np.zeros(head.sum())])
    samples[bend] = bend_position(s[bend])
    corner = bend_position(np.array([1.0 - start]))[0]
    heading = np.array([math.cos(turning), math.sin(turning)])
    samples[tail] = corner[None, :] + length * (s[tail] - (1.0 - start))[:, None] * heading[None, :]
    return Curve(samples, OPEN, length, eta=eta, name="straight_ended")


def perturb_along_normal(curve: Curve, amplitude: float, frequency: int) -> Curve:
    """Closed curve gamma + amplitude sin(2 pi frequency s) nu, resampled to arclength."""
    frame = curve.frame
    offset = amplitude * np.sin(2.0 * math.pi * frequency * frame.s)
    moved = curve.samples + offset[:, None] * frame.normal
    return resample_arclength(
        moved, curve.N, curve.kind, name=f"{curve.name}+{amplitude:g}sin{frequency}"
    )
