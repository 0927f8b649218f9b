"""
Trial fields on closed tubes and the bounds they give.

The lower trial field is eps^2/2 (1 - t^2) + eps^3 kappa_bar(s) zeta(t); its energy
is a lower bound for the norm. The upper profile adds the first two curvature
corrections of the optimiser and is compared against bulk solves.
"""

import logging
from typing import Optional, Union

import numpy as np

from ..geometry.curves import Curve
from ..solver.grid import (
    DEFAULT_NT,
    MappedField,
    ParamGrid,
    build_grid,
    periodic_interpolant,
    upper_profile_values,
)
from ..solver.mapped import GridSpec, bulk_grid, xeps_evaluate
from .profiles import SmoothedCurvature, TrialProfile, smooth_curvature, zeta_profile

logger = logging.getLogger(__name__)


def _closed_grid(curve: Curve, eps: float, grid: Union[GridSpec, ParamGrid], margin: float) -> ParamGrid:
    if isinstance(grid, ParamGrid):
        return grid
    Ns, Nt = grid if grid is not None else (None, DEFAULT_NT)
    return build_grid(curve, eps, Ns, Nt, margin=margin)


def lower_trial_field(
    grid: ParamGrid, smoothed: SmoothedCurvature, profile: TrialProfile
) -> MappedField:
    kappa_bar = periodic_interpolant(smoothed.kappa_bar)(grid.s)
    eps = grid.eps
    values = 0.5 * eps**2 * (1.0 - grid.t[None, :] ** 2) + eps**3 * kappa_bar[:, None] * profile.zeta(
        grid.t
    )[None, :]
    values[:, [0, -1]] = 0.0
    return MappedField(grid, values)


def trial_lower_bound(
    curve: Curve,
    eps: float,
    profile: Optional[TrialProfile] = None,
    grid: Union[GridSpec, ParamGrid] = None,
    extrapolate: bool = False,
    margin: float = 0.95,
) -> float:
    """Energy of the lower trial field on the solver grid.

    On the same grid it never exceeds the discrete optimum. With ``extrapolate``
    the energy is combined with the half-resolution grid like the solver's
    Richardson value.
    """
    profile = profile or zeta_profile()
    smoothed = smooth_curvature(curve, eps, profile)
    param_grid = _closed_grid(curve, eps, grid, margin)
    value = xeps_evaluate(curve, eps, lower_trial_field(param_grid, smoothed, profile), margin)
    if extrapolate:
        coarse = param_grid.coarsened()
        coarse_value = xeps_evaluate(curve, eps, lower_trial_field(coarse, smoothed, profile), margin)
        value = (4.0 * value - coarse_value) / 3.0
    logger.debug(f"Lower trial bound for {curve.name} at eps={eps:g}: {value:.12g}")
    return value


def trial_upper_profile(
    curve: Curve, eps: float, grid: Union[GridSpec, ParamGrid] = None, margin: float = 0.95
) -> MappedField:
    """Two-term profile on the closed grid, or on the bulk grid of a straight-ended open curve."""
    if isinstance(grid, ParamGrid):
        param_grid = grid
    elif curve.is_closed:
        param_grid = _closed_grid(curve, eps, grid, margin)
    else:
        param_grid = bulk_grid(curve, eps, grid, margin)
    return MappedField(param_grid, upper_profile_values(param_grid))


def _parameter_integral(values: np.ndarray) -> float:
    return float(values.mean())


def trial_bound_identity(
    curve: Curve, eps: float, profile: Optional[TrialProfile] = None
) -> float:
    """Exact energy of the lower trial field with exact t-integrals.

    (2/3) eps^3 l + B eps^5 l int (2 kappa kappa_bar - kappa_bar^2 - eps^2 C(s) kappa_bar'^2) ds
    """
    profile = profile or zeta_profile()
    smoothed = smooth_curvature(curve, eps, profile)
    kappa, kappa_bar = smoothed.kappa, smoothed.kappa_bar
    slope = smoothed.derivative()
    integrand = (
        2.0 * kappa * kappa_bar - kappa_bar**2 - eps**2 * smoothed.local_constant * slope**2
    )
    length = curve.length
    return (2.0 / 3.0) * eps**3 * length + profile.B * eps**5 * length * _parameter_integral(
        integrand
    )


def curvature_energy_bound(
    curve: Curve, eps: float, profile: Optional[TrialProfile] = None
) -> float:
    """(2/3) eps^3 l + B eps^5 l int (kappa_bar^2 + eps^2 C kappa_bar'^2) ds for the optimal kappa_bar."""
    profile = profile or zeta_profile()
    smoothed = smooth_curvature(curve, eps, profile)
    slope = smoothed.derivative()
    integrand = smoothed.kappa_bar**2 + eps**2 * smoothed.constant * slope**2
    length = curve.length
    return (2.0 / 3.0) * eps**3 * length + profile.B * eps**5 * length * _parameter_integral(
        integrand
    )
