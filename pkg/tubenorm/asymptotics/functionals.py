"""
Rescaled second-order functionals on curve systems and their numerical limit test.

G_eps(Gamma) = eps^-5 * sum of tube norms - (2/3) eps^-2 l(Gamma) on admissible
systems (global radius at least eps, no transverse crossings) and +inf otherwise.
Its limit is a multiple of the elastica energy.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from ..geometry.curves import SelfIntersecting, elastica_energy
from ..geometry.generators import perturb_along_normal
from ..geometry.systems import CurveSystem, has_transverse_crossing, system_metrics
from ..solver.mapped import GridSpec, solve_closed

logger = logging.getLogger(__name__)

ELASTICA_COEFFICIENT = 2.0 / 45.0
PERTURBATION_MODES = (None, "oscillation")


def g_eps(
    system: CurveSystem, eps: float, grid: GridSpec = None, method: str = "cg"
) -> float:
    if not eps > 0:
        raise ValueError(f"tube half-width must be positive, got {eps}")
    length, rho = system_metrics(system)
    if float(rho) < eps:
        logger.debug(f"G_eps({system.name}, {eps:g}) = inf: radius {float(rho):.3g} < eps")
        return math.inf
    if has_transverse_crossing(system):
        logger.debug(f"G_eps({system.name}, {eps:g}) = inf: transverse crossing")
        return math.inf
    total = 0.0
    for curve in system.curves:
        try:
            _, result = solve_closed(curve, eps, grid, method=method, margin=1.0)
        except SelfIntersecting:
            return math.inf
        total += result.best
    return total / eps**5 - (2.0 / 3.0) * length / eps**2


def curvature_line_integral(system: CurveSystem) -> float:
    """(2/45) * sum of int kappa^2 over the members."""
    return ELASTICA_COEFFICIENT * sum(elastica_energy(curve) for curve in system.curves)


def g_zero(system: CurveSystem) -> float:
    """(2/45) * sum of l * int kappa^2, or +inf with a transverse crossing."""
    if has_transverse_crossing(system):
        return math.inf
    return ELASTICA_COEFFICIENT * sum(
        curve.length * elastica_energy(curve) for curve in system.curves
    )


def _trend(gaps: Sequence[float]) -> Dict[str, Any]:
    sizes = [abs(gap) for gap in gaps]
    decreasing = all(later < earlier for earlier, later in zip(sizes, sizes[1:]))
    return {
        "gaps": list(gaps),
        "decreasing": decreasing,
        "trends_to_zero": bool(decreasing and sizes and sizes[-1] < 0.5 * sizes[0]),
    }


@dataclass
class GammaReport:
    """Gaps of G_eps against both candidate limits, on a schedule and along perturbations."""

    target: str
    line_limit: float
    weighted_limit: float
    schedule: List[Dict[str, float]] = field(default_factory=list)
    perturbations: List[Dict[str, float]] = field(default_factory=list)

    @property
    def trends(self) -> Dict[str, Dict[str, Any]]:
        return {
            "line": _trend([entry["gap_line"] for entry in self.schedule]),
            "weighted": _trend([entry["gap_weighted"] for entry in self.schedule]),
        }

    @property
    def perturbation_min_gap(self) -> Optional[float]:
        if not self.perturbations:
            return None
        return min(entry["gap_line"] for entry in self.perturbations)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "target": self.target,
            "limits": {"line": self.line_limit, "weighted": self.weighted_limit},
            "schedule": self.schedule,
            "trends": self.trends,
            "perturbations": self.perturbations,
            "perturbation_min_gap": self.perturbation_min_gap,
        }


def gamma_experiment(
    target: CurveSystem,
    eps_schedule: Sequence[float],
    perturbation_mode: Optional[str] = None,
    n_values: Sequence[int] = (2, 4, 8),
    grid: GridSpec = None,
    method: str = "cg",
    threads: int = 1,
) -> GammaReport:
    """Evaluate G_eps on a fixed target along an eps schedule.

    Gaps are reported against both (2/45) int kappa^2 ("line") and
    (2/45) l int kappa^2 ("weighted"); the trend flags show which one the values
    approach. In "oscillation" mode the target is also perturbed by
    (1/n^2) sin(2 pi n s) along its normal, evaluated at eps = rho/2, to probe
    the lower bound along a converging sequence.
    """
    if perturbation_mode not in PERTURBATION_MODES:
        raise ValueError(f"perturbation mode must be one of {PERTURBATION_MODES}")
    line_limit = curvature_line_integral(target)
    weighted_limit = g_zero(target)

    def _entry(eps: float) -> Dict[str, float]:
        value = g_eps(target, eps, grid, method)
        return {
            "eps": eps,
            "g_eps": value,
            "gap_line": value - line_limit,
            "gap_weighted": value - weighted_limit,
        }

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        schedule = list(pool.map(_entry, eps_schedule))
    schedule.sort(key=lambda entry: -entry["eps"])

    report = GammaReport(target.name, line_limit, weighted_limit, schedule)
    if perturbation_mode == "oscillation":
        for n in n_values:
            amplitude = 1.0 / n**2
            perturbed = CurveSystem(
                tuple(perturb_along_normal(curve, amplitude, n) for curve in target.curves),
                name=f"{target.name}_n{n}",
            )
            _, rho = system_metrics(perturbed)
            eps = 0.5 * float(rho)
            value = g_eps(perturbed, eps, grid, method) if eps > 0 else math.inf
            report.perturbations.append(
                {
                    "n": n,
                    "amplitude": amplitude,
                    "frequency": n,
                    "eps": eps,
                    "rho": float(rho),
                    "g_eps": value,
                    "gap_line": value - line_limit,
                    "gap_weighted": value - weighted_limit,
                }
            )
    logger.info(f"✅ Limit experiment on {target.name}: {len(schedule)} schedule points")
    return report
