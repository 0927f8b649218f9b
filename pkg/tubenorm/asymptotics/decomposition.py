"""
Norm of a straight-ended open tube by domain decomposition.

The tube splits into the bulk over s in [eta, 1 - eta], solved in mapped
coordinates with the straight-strip profile on its s-ends, and two end pieces
that are straight strips closed by half discs. Each end piece is the cap
problem rescaled by eps.
"""

import logging
import time
from dataclasses import dataclass
from typing import Any, Dict, Tuple

from ..endcap.harmonic import cap_contribution
from ..geometry.curves import Curve, MissingEta
from ..solver.mapped import GridSpec, solve_bulk_open_result

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OpenNormResult:
    eps: float
    bulk: float
    caps: Tuple[float, float]
    cap_length: float
    Ns: int
    Nt: int
    wall_time: float = 0.0

    @property
    def total(self) -> float:
        return self.bulk + sum(self.caps)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eps": self.eps,
            "bulk": self.bulk,
            "caps": list(self.caps),
            "cap_length": self.cap_length,
            "total": self.total,
            "grid": [self.Ns, self.Nt],
        }


def open_curve_norm(
    curve: Curve,
    eps: float,
    grid: GridSpec = None,
    cap_h: float = 0.04,
    L_max: float = 10.0,
    method: str = "cg",
    margin: float = 0.95,
) -> OpenNormResult:
    """Bulk contribution plus one cap contribution per end (straight length eta * l each)."""
    if curve.eta is None:
        raise MissingEta(f"{curve.name} carries no straight end bands")
    started = time.perf_counter()
    _, result = solve_bulk_open_result(curve, eps, grid, method=method, margin=margin)
    straight = curve.eta * curve.length
    cap = cap_contribution(eps, straight, cap_h, L_max)
    elapsed = time.perf_counter() - started
    logger.debug(
        f"Open norm {curve.name} eps={eps:g}: bulk {result.best:.12g}, cap {cap:.12g} each"
    )
    return OpenNormResult(
        eps=float(eps),
        bulk=result.best,
        caps=(cap, cap),
        cap_length=min(straight / eps, L_max),
        Ns=result.Ns,
        Nt=result.Nt,
        wall_time=elapsed,
    )
