"""
Weighted least-squares fit of small-eps expansion coefficients.

With the leading term (2/3) eps^3 l removed, the remainder is fitted on
{eps^5, eps^6} for closed curves and {eps^4, eps^5, eps^6} for open ones, rows
scaled by eps^-5 so every record carries comparable weight.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import TubeNormError
from ..geometry.curves import Curve, elastica_energy

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e8
MIN_RECORDS = 5
MIN_SPAN = 4.0


class IllConditioned(TubeNormError):
    """The fit design matrix is too close to singular."""

    def __init__(self, condition: float):
        super().__init__(f"fit design matrix condition number {condition:.3e} exceeds {MAX_CONDITION:.0e}")
        self.condition = condition


@dataclass(frozen=True)
class CurveMeta:
    """What a fit needs to know about the curve: kind, length, int kappa^2 and, for open curves, alpha."""

    kind: str
    length: float
    elastica: float
    alpha: Optional[float] = None
    name: str = "curve"

    @classmethod
    def from_curve(cls, curve: Curve, alpha: Optional[float] = None) -> "CurveMeta":
        return cls(curve.kind, curve.length, elastica_energy(curve), alpha, curve.name)

    def targets(self) -> Dict[str, float]:
        targets = {"c3": (2.0 / 3.0) * self.length, "c5": (2.0 / 45.0) * self.elastica}
        if self.kind == "open" and self.alpha is not None:
            targets["c4"] = 2.0 * self.alpha
        return targets


@dataclass
class ExpansionFit:
    records: List[Tuple[float, float]]
    model: str
    free_leading: bool
    powers: Tuple[int, ...]
    coefficients: Dict[str, float]
    standard_errors: Dict[str, float]
    targets: Dict[str, float]
    condition: float
    residual: float
    slope: Optional[float]
    consistent: bool
    length: float = 0.0
    name: str = "curve"

    @property
    def relative_gaps(self) -> Dict[str, float]:
        gaps = {}
        for key, target in self.targets.items():
            if key in self.coefficients and target != 0:
                gaps[key] = abs(self.coefficients[key] - target) / abs(target)
        return gaps

    def remainder(self, eps: float) -> float:
        """Fitted value of the norm minus its leading term."""
        return sum(
            self.coefficients[f"c{p}"] * eps**p for p in self.powers if p != 3
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "model": self.model,
            "free_leading": self.free_leading,
            "records": [[eps, value] for eps, value in self.records],
            "coefficients": self.coefficients,
            "standard_errors": self.standard_errors,
            "targets": self.targets,
            "relative_gaps": self.relative_gaps,
            "condition": self.condition,
            "residual": self.residual,
            "slope": self.slope,
            "consistent": self.consistent,
        }


def validate_schedule(eps_values: Sequence[float]) -> None:
    distinct = sorted(set(float(eps) for eps in eps_values))
    if len(distinct) < MIN_RECORDS:
        raise ValueError(f"a fit needs at least {MIN_RECORDS} distinct eps values, got {len(distinct)}")
    if distinct[0] <= 0:
        raise ValueError("eps values must be positive")
    if distinct[-1] / distinct[0] < MIN_SPAN:
        raise ValueError(f"eps values must span a factor of at least {MIN_SPAN:g}")


def remainder_slope(eps: np.ndarray, remainder: np.ndarray) -> Optional[float]:
    """Least-squares slope of log |remainder| against log eps."""
    nonzero = remainder != 0
    if nonzero.sum() < 2:
        return None
    slope, _ = np.polyfit(np.log(eps[nonzero]), np.log(np.abs(remainder[nonzero])), 1)
    return float(slope)


def fit_expansion(
    records: Sequence[Tuple[float, float]], meta: CurveMeta, free_leading: bool = False
) -> ExpansionFit:
    """Fit expansion coefficients to (eps, norm) records.

    ``free_leading`` also fits the eps^3 coefficient on the raw values (weights
    eps^-3) as a check of the leading term.

    Raises:
        ValueError: fewer than five distinct eps or a span below a factor of four
        IllConditioned: condition number of the weighted design above 1e8
    """
    ordered = sorted(((float(e), float(v)) for e, v in records), key=lambda r: -r[0])
    eps = np.array([e for e, _ in ordered])
    values = np.array([v for _, v in ordered])
    validate_schedule(eps)

    leading = (2.0 / 3.0) * eps**3 * meta.length
    powers: Tuple[int, ...] = (5, 6) if meta.kind == "closed" else (4, 5, 6)
    if free_leading:
        powers = (3,) + powers
        target, weight = values, eps**-3.0
    else:
        target, weight = values - leading, eps**-5.0

    design = eps[:, None] ** np.array(powers)[None, :]
    weighted = design * weight[:, None]
    # equilibrate columns so the condition number reflects the basis, not its units
    scale = np.linalg.norm(weighted, axis=0)
    balanced = weighted / scale
    scaled_solution, _, rank, singular = np.linalg.lstsq(balanced, target * weight, rcond=None)
    condition = float(singular[0] / singular[-1]) if singular[-1] > 0 else math.inf
    if condition > MAX_CONDITION or rank < len(powers):
        raise IllConditioned(condition)
    solution = scaled_solution / scale

    misfit = target * weight - weighted @ solution
    dof = len(eps) - len(powers)
    variance = float(misfit @ misfit) / dof if dof > 0 else 0.0
    covariance = variance * np.linalg.inv(balanced.T @ balanced) / np.outer(scale, scale)
    errors = np.sqrt(np.clip(np.diag(covariance), 0.0, None))

    coefficients = {f"c{p}": float(c) for p, c in zip(powers, solution)}
    standard_errors = {f"c{p}": float(e) for p, e in zip(powers, errors)}
    if not free_leading:
        coefficients["c3"] = (2.0 / 3.0) * meta.length
        standard_errors["c3"] = 0.0
    if meta.kind == "closed":
        coefficients.setdefault("c4", 0.0)
        standard_errors.setdefault("c4", 0.0)

    remainder = values - leading
    raw_misfit = target - design @ solution
    smallest = min(abs(c) * eps.min() ** p for p, c in zip(powers, solution))
    consistent = bool(np.abs(raw_misfit).max() <= 10.0 * smallest)
    fit = ExpansionFit(
        records=list(zip(eps.tolist(), values.tolist())),
        model=meta.kind,
        free_leading=free_leading,
        powers=powers,
        coefficients=coefficients,
        standard_errors=standard_errors,
        targets=meta.targets(),
        condition=condition,
        residual=float(np.abs(raw_misfit).max()),
        slope=remainder_slope(eps, remainder),
        consistent=consistent,
        length=meta.length,
        name=meta.name,
    )
    logger.debug(f"Fit for {meta.name}: {coefficients}, condition {condition:.2e}")
    return fit
