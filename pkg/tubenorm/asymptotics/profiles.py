"""
Odd trial profiles in t and the curvature smoothing they induce.

A profile zeta on [-1, 1] must vanish at t = +-1 and satisfy
int zeta'^2 = int t zeta = B. The exact profile t (1 - t^2) / 6 has B = 2/45;
the mollified family is the exact profile compressed onto |t| < 1 - delta and
rescaled so the two integrals stay equal.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import solve_banded

from ..geometry.curves import Curve, NotClosed, TubeNotRegular

logger = logging.getLogger(__name__)

EXACT = "exact"
MOLLIFIED = "mollified"
EXACT_B = 2.0 / 45.0


@dataclass(frozen=True)
class TrialProfile:
    """zeta(t) = scale^3 * t' (1 - t'^2) / 6 with t' = t / scale on |t| < scale, zero outside."""

    kind: str
    delta: float = 0.0

    @property
    def support(self) -> float:
        return 1.0 - self.delta

    @property
    def B(self) -> float:
        return self.support**5 * EXACT_B

    def zeta(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        a = self.support
        u = t / a
        return np.where(np.abs(t) < a, a**3 * u * (1.0 - u**2) / 6.0, 0.0)

    def derivative(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        a = self.support
        u = t / a
        return np.where(np.abs(t) < a, a**2 * (1.0 - 3.0 * u**2) / 6.0, 0.0)

    @cached_property
    def _nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        nodes, weights = leggauss(32)
        return self.support * nodes, self.support * weights

    def quadrature(self) -> Tuple[np.ndarray, np.ndarray]:
        """Gauss-Legendre nodes and weights on the support."""
        return self._nodes

    def moments(self) -> Tuple[float, float, float]:
        """(int zeta'^2, int t zeta, int zeta^2) over [-1, 1]."""
        t, w = self.quadrature()
        return (
            float(w @ self.derivative(t) ** 2),
            float(w @ (t * self.zeta(t))),
            float(w @ self.zeta(t) ** 2),
        )


def zeta_profile(kind: str = EXACT, delta: Optional[float] = None) -> TrialProfile:
    """Exact profile, or the mollified one for 0 < delta < 1."""
    if kind == EXACT:
        return TrialProfile(EXACT, 0.0)
    if kind == MOLLIFIED:
        if delta is None or not 0.0 < delta < 1.0:
            raise ValueError(f"mollified profile needs 0 < delta < 1, got {delta}")
        return TrialProfile(MOLLIFIED, float(delta))
    raise ValueError(f"unknown profile kind {kind!r}")


@dataclass(frozen=True, eq=False)
class SmoothedCurvature:
    """Solution of -eps^2 C kappa_bar'' + kappa_bar = kappa on the periodic parameter."""

    s: np.ndarray
    kappa: np.ndarray
    kappa_bar: np.ndarray
    constant: float
    local_constant: np.ndarray
    eps: float
    length: float
    residual: float

    @property
    def spacing(self) -> float:
        return 1.0 / len(self.s)

    def derivative(self) -> np.ndarray:
        """Centered periodic difference of kappa_bar in the curve parameter."""
        step = self.spacing
        return (np.roll(self.kappa_bar, -1) - np.roll(self.kappa_bar, 1)) / (2.0 * step)

    def mean_defect(self) -> float:
        """|mean(kappa_bar) - mean(kappa)| relative to max |kappa|."""
        scale = max(float(np.abs(self.kappa).max()), 1e-300)
        return abs(float(self.kappa_bar.mean() - self.kappa.mean())) / scale


def solve_cyclic_tridiagonal(
    lower: float, diagonal: np.ndarray, upper: float, rhs: np.ndarray
) -> np.ndarray:
    """Periodic tridiagonal system with constant off-diagonals via Sherman-Morrison."""
    n = len(diagonal)
    gamma = -diagonal[0]
    main = np.array(diagonal, dtype=float)
    main[0] -= gamma
    main[-1] -= lower * upper / gamma
    bands = np.zeros((3, n))
    bands[0, 1:] = upper
    bands[1] = main
    bands[2, :-1] = lower
    u = np.zeros(n)
    u[0], u[-1] = gamma, upper
    solutions = solve_banded((1, 1), bands, np.column_stack([rhs, u]))
    x, z = solutions[:, 0], solutions[:, 1]
    factor = (x[0] + lower * x[-1] / gamma) / (1.0 + z[0] + lower * z[-1] / gamma)
    return x - factor * z


def local_constants(
    kappa: np.ndarray, eps: float, length: float, profile: TrialProfile
) -> np.ndarray:
    """B^-1 l^-2 int zeta^2 / (1 - eps t kappa(s)) dt at every sample."""
    t, w = profile.quadrature()
    stretch = 1.0 - eps * t[None, :] * kappa[:, None]
    return (profile.zeta(t) ** 2 / stretch) @ w / (profile.B * length**2)


def smooth_curvature(
    curve: Curve,
    eps: float,
    profile: Optional[TrialProfile] = None,
    kappa: Optional[np.ndarray] = None,
) -> SmoothedCurvature:
    """Smoothed curvature for the trial field on the eps-tube of a closed curve.

    ``kappa`` overrides the sampled curvature (one value per sample). Only the
    stretch factor enters the ODE, so regularity is checked through
    eps * max |kappa| <= 0.95 rather than the full global radius.
    """
    if not curve.is_closed:
        raise NotClosed(f"{curve.name} is open; curvature smoothing is periodic")
    profile = profile or zeta_profile(EXACT)
    kappa = np.asarray(curve.frame.kappa if kappa is None else kappa, dtype=float)
    if kappa.shape != (curve.N,):
        raise ValueError(f"curvature override must have {curve.N} entries, got {kappa.shape}")
    peak = float(np.abs(kappa).max())
    if eps * peak > 0.95:
        raise TubeNotRegular(eps, 1.0 / peak)

    local = local_constants(kappa, eps, curve.length, profile)
    constant = float(local.max())
    step = 1.0 / curve.N
    ratio = eps**2 * constant / step**2
    diagonal = np.full(curve.N, 1.0 + 2.0 * ratio)
    kappa_bar = solve_cyclic_tridiagonal(-ratio, diagonal, -ratio, kappa)
    applied = diagonal * kappa_bar - ratio * (np.roll(kappa_bar, 1) + np.roll(kappa_bar, -1))
    scale = max(peak, 1e-300)
    residual = float(np.abs(applied - kappa).max()) / scale
    logger.debug(f"Smoothed curvature eps={eps:g}: C={constant:.6g}, residual {residual:.2e}")
    return SmoothedCurvature(
        s=curve.params,
        kappa=kappa,
        kappa_bar=kappa_bar,
        constant=constant,
        local_constant=local,
        eps=float(eps),
        length=curve.length,
        residual=residual,
    )


def damping_factor(eps: float, constant: float, mode: int, N: Optional[int] = None) -> float:
    """Fourier multiplier of the smoothing: continuous, or discrete on N samples."""
    if N is None:
        symbol = 4.0 * math.pi**2 * mode**2
    else:
        symbol = 4.0 * N**2 * math.sin(math.pi * mode / N) ** 2
    return 1.0 / (1.0 + eps**2 * constant * symbol)
