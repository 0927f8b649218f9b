"""
Residual of the two-term profile on the bulk of an open curve.

The bulk optimiser f and the profile p differ by g = f - p, which vanishes on
the Dirichlet edges and solves A g = r with r the discrete residual of p. The
t-part of A alone gives ||g|| <= C_h eps / (l m) ||r / W|| with C_h the discrete
Poincaré constant in t and m the smallest stretch factor on t half nodes, so the
bound holds at the discrete level, not only asymptotically.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Sequence

import numpy as np

from ..geometry.curves import Curve
from .grid import upper_profile_values
from .mapped import GridSpec, bulk_grid, solve_on_grid, straight_profile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DefectReport:
    eps: float
    defect_norm: float
    residual_norm: float
    bound: float
    poincare_constant: float
    margin: float

    @property
    def within_bound(self) -> bool:
        return self.defect_norm <= self.bound

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eps": self.eps,
            "defect_norm": self.defect_norm,
            "residual_norm": self.residual_norm,
            "bound": self.bound,
            "poincare_constant": self.poincare_constant,
            "margin": self.margin,
        }


def poincare_constant(h_t: float) -> float:
    """Inverse of the smallest discrete Dirichlet eigenvalue of -d^2/dt^2 on [-1, 1]."""
    return 1.0 / ((4.0 / h_t**2) * math.sin(math.pi * h_t / 4.0) ** 2)


def defect_report(
    curve: Curve, eps: float, grid: GridSpec = None, method: str = "direct"
) -> DefectReport:
    """Distance between the bulk optimiser and the two-term profile, with its bound."""
    param_grid = bulk_grid(curve, eps, grid)
    profile = upper_profile_values(param_grid)
    boundary = np.zeros(param_grid.shape)
    ends = straight_profile(param_grid)
    boundary[[0, -1], :] = ends[[0, -1], :]
    # the profile reduces to the straight strip where kappa vanishes
    profile[[0, -1], :] = ends[[0, -1], :]
    profile[:, [0, -1]] = 0.0
    solution, _, _ = solve_on_grid(param_grid, boundary, method)

    free = param_grid.interior_mask.ravel()
    weights = param_grid.weights.ravel()[free]
    trial = profile.ravel()
    residual = param_grid.load[free] - param_grid.operator[free] @ trial
    scaled = residual / weights
    difference = solution.ravel()[free] - trial[free]

    defect_norm = float(np.sqrt(np.sum(weights * difference**2)))
    residual_norm = float(np.sqrt(np.sum(weights * scaled**2)))
    t_half = 0.5 * (param_grid.t[1:] + param_grid.t[:-1])
    margin = float((1.0 - eps * t_half[None, :] * param_grid.kappa[:, None]).min())
    constant = poincare_constant(param_grid.h_t)
    bound = constant * eps / (param_grid.length * margin) * residual_norm
    logger.debug(
        f"Defect eps={eps:g}: |g|={defect_norm:.3e}, |h|={residual_norm:.3e}, bound {bound:.3e}"
    )
    return DefectReport(eps, defect_norm, residual_norm, bound, constant, margin)


def defect_order(reports: Sequence[DefectReport]) -> float:
    """Least-squares slope of log defect against log eps."""
    eps = np.log([report.eps for report in reports])
    defect = np.log([report.defect_norm for report in reports])
    slope, _ = np.polyfit(eps, defect, 1)
    return float(slope)
