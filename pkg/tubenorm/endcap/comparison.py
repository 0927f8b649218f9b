"""
Explicit comparison function for the cap corrector and strip decay barriers.

The comparison function is a finite sum of modes c e^{kx x} cos(ky y), each
harmonic when kx = ky, chosen to sit below -phi on the arc and below zero on
the strip sides. By the
maximum principle it is a lower bound for psi, so 3 pi / 16 + its integral is a
lower bound for alpha.
"""

import math
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

DISC_CONSTANT = 3.0 * math.pi / 16.0

Mode = Tuple[float, float, float]

# (coefficient, x wavenumber, y wavenumber)
COMPARISON_MODES: Tuple[Mode, ...] = (
    (-0.112, 0.5 * math.pi, 0.5 * math.pi),
    (0.0019, 1.5 * math.pi, 1.5 * math.pi),
    (-0.00008, 2.5 * math.pi, 2.5 * math.pi),
    (-0.056, 1.0, 1.0),
)


class ComparisonBound(NamedTuple):
    integral_tilde_psi: float
    positive: bool

    @property
    def alpha_lower_bound(self) -> float:
        return DISC_CONSTANT + self.integral_tilde_psi


def comparison_psi(x, y, modes: Sequence[Mode] = COMPARISON_MODES) -> np.ndarray:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    total = np.zeros(np.broadcast(x, y).shape)
    for c, kx, ky in modes:
        total = total + c * np.exp(kx * x) * np.cos(ky * y)
    return total


def comparison_laplacian(x, y, modes: Sequence[Mode] = COMPARISON_MODES) -> np.ndarray:
    """Analytic Laplacian: each mode contributes (kx^2 - ky^2) times itself."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    total = np.zeros(np.broadcast(x, y).shape)
    for c, kx, ky in modes:
        total = total + (kx**2 - ky**2) * c * np.exp(kx * x) * np.cos(ky * y)
    return total


def _strip_integral() -> float:
    # int_{x<0} e^{kx x} dx = 1/kx and int_{-1}^{1} cos(ky y) dy = 2 sin(ky)/ky
    return sum(c / kx * (2.0 * math.sin(ky) / ky) for c, kx, ky in COMPARISON_MODES)


def _disc_integral() -> float:
    def column(y: float) -> float:
        reach = math.sqrt(max(0.0, 1.0 - y * y))
        return sum(
            c * math.cos(ky * y) * math.expm1(kx * reach) / kx for c, kx, ky in COMPARISON_MODES
        )

    value, _ = quad(column, -1.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    return value


def comparison_integral() -> float:
    """Integral of the comparison function over the infinite half-strip plus half disc."""
    return _strip_integral() + _disc_integral()


def comparison_bound() -> ComparisonBound:
    """(integral of the comparison function, whether 3 pi / 16 + integral > 0)."""
    integral = comparison_integral()
    return ComparisonBound(integral, DISC_CONSTANT + integral > 0.0)


def arc_margin(samples: int = 2001) -> float:
    """min over the arc of -phi - comparison_psi; non-negative when the comparison holds there."""
    theta = np.linspace(-0.5 * math.pi, 0.5 * math.pi, samples)
    x, y = np.cos(theta), np.sin(theta)
    return float((-0.5 * (1.0 - y**2) - comparison_psi(x, y)).min())


def rectangle_supersolution(a: float, b: float, x, y) -> np.ndarray:
    """cosh(x/b) cos(y/b) / (cosh(a/b) cos 1): at least 1 on x = +-a, non-negative on |y| = b."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return np.cosh(x / b) * np.cos(y / b) / (math.cosh(a / b) * math.cos(1.0))


def rectangle_decay_bound(a: float, b: float) -> float:
    """4 e^{-a/b}, which dominates the supersolution at the centre of the rectangle."""
    return 4.0 * math.exp(-a / b)
