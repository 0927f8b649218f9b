"""Concurrent eps sweeps producing the records an expansion fit consumes."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence

from ..geometry.curves import Curve
from ..solver.mapped import GridSpec, solve_closed
from .decomposition import open_curve_norm

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepRecord:
    eps: float
    norm_sq: float
    raw: float
    Ns: int
    Nt: int
    residual: float
    wall_time: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eps": self.eps,
            "norm_sq": self.norm_sq,
            "raw": self.raw,
            "Ns": self.Ns,
            "Nt": self.Nt,
            "residual": self.residual,
            "wall_time": self.wall_time,
        }


def _run(task, eps_values: Sequence[float], threads: int) -> List[SweepRecord]:
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        records = list(pool.map(task, eps_values))
    return sorted(records, key=lambda record: -record.eps)


def closed_sweep(
    curve: Curve,
    eps_values: Sequence[float],
    grid: GridSpec = None,
    method: str = "cg",
    rtol: float = 1e-10,
    margin: float = 0.95,
    threads: int = 1,
) -> List[SweepRecord]:
    """Extrapolated norms of a closed curve for every eps, largest eps first."""

    def task(eps: float) -> SweepRecord:
        _, result = solve_closed(curve, eps, grid, method=method, rtol=rtol, margin=margin)
        logger.info(f"✅ {curve.name} eps={eps:g}: {result.best:.12g} ({result.wall_time:.2f}s)")
        return SweepRecord(
            eps, result.best, result.norm_sq, result.Ns, result.Nt, result.residual, result.wall_time
        )

    return _run(task, eps_values, threads)


def open_sweep(
    curve: Curve,
    eps_values: Sequence[float],
    grid: GridSpec = None,
    cap_h: float = 0.04,
    L_max: float = 10.0,
    method: str = "cg",
    margin: float = 0.95,
    threads: int = 1,
) -> List[SweepRecord]:
    """Decomposed norms of a straight-ended open curve for every eps."""

    def task(eps: float) -> SweepRecord:
        result = open_curve_norm(curve, eps, grid, cap_h, L_max, method=method, margin=margin)
        logger.info(f"✅ {curve.name} eps={eps:g}: {result.total:.12g} ({result.wall_time:.2f}s)")
        return SweepRecord(
            eps, result.total, result.total, result.Ns, result.Nt, 0.0, result.wall_time
        )

    return _run(task, eps_values, threads)
