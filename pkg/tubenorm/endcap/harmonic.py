"""
Harmonic corrector on the cap and the end constant alpha.

psi is harmonic on the cap, equals -phi = -(1 - y^2)/2 on the arc and vanishes
on the strip sides and the truncation edge. The end constant is
alpha = 3 pi / 16 + int psi.
"""

import logging
import math
import time
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np
from scipy.interpolate import LinearNDInterpolator
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from ..errors import TubeNormError
from .comparison import rectangle_decay_bound, rectangle_supersolution
from .mesh import ARC, INTERIOR, CapDomain, build_cap_domain

logger = logging.getLogger(__name__)

DISC_CONSTANT = 3.0 * math.pi / 16.0
DATA_BOUND = 0.5


class SingularSystem(TubeNormError):
    """The cap stiffness system could not be solved."""


def phi(x, y):
    """Straight-strip profile (1 - y^2) / 2."""
    return 0.5 * (1.0 - np.asarray(y) ** 2)


def phi_integral(L: float) -> float:
    """Integral of phi over the cap: (2/3) L over the strip plus 3 pi / 16 over the half disc."""
    return (2.0 / 3.0) * L + DISC_CONSTANT


@dataclass(frozen=True, eq=False)
class CapSolution:
    domain: CapDomain
    psi: np.ndarray
    integral_psi: float
    wall_time: float = 0.0

    @property
    def alpha_estimate(self) -> float:
        return DISC_CONSTANT + self.integral_psi

    @property
    def L(self) -> float:
        return self.domain.L

    @property
    def h(self) -> float:
        return self.domain.h

    def interpolator(self) -> LinearNDInterpolator:
        return LinearNDInterpolator(self.domain.triangulation, self.psi)

    def to_rows(self) -> Iterator[Tuple[float, float, float]]:
        for (x, y), value in zip(self.domain.nodes, self.psi):
            yield float(x), float(y), float(value)


def stiffness_matrix(domain: CapDomain) -> csr_matrix:
    """P1 stiffness matrix assembled from all triangles at once."""
    triangles = domain.triangles
    p = domain.nodes[triangles]
    x, y = p[..., 0], p[..., 1]
    b = y[:, [1, 2, 0]] - y[:, [2, 0, 1]]
    c = x[:, [2, 0, 1]] - x[:, [1, 2, 0]]
    local = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (
        4.0 * domain.areas[:, None, None]
    )
    rows = np.broadcast_to(triangles[:, :, None], local.shape)
    cols = np.broadcast_to(triangles[:, None, :], local.shape)
    n = domain.node_count
    return coo_matrix((local.ravel(), (rows.ravel(), cols.ravel())), shape=(n, n)).tocsr()


def solve_cap_psi(domain: CapDomain) -> CapSolution:
    started = time.perf_counter()
    values = np.zeros(domain.node_count)
    arc = domain.tags == ARC
    values[arc] = -phi(domain.nodes[arc, 0], domain.nodes[arc, 1])
    free = domain.tags == INTERIOR

    matrix = stiffness_matrix(domain)
    reduced = matrix[free][:, free].tocsc()
    rhs = -(matrix[free][:, ~free] @ values[~free])
    with warnings.catch_warnings():
        warnings.simplefilter("error", MatrixRankWarning)
        try:
            solution = spsolve(reduced, rhs)
        except MatrixRankWarning as exc:
            raise SingularSystem(f"cap system is singular: {exc}") from exc
    if not np.all(np.isfinite(solution)):
        raise SingularSystem("cap solve produced non-finite values")
    values[free] = solution
    integral = domain.integrate(values)
    elapsed = time.perf_counter() - started
    logger.debug(
        f"Cap solve L={domain.L:g}, h={domain.h:g}: int psi = {integral:.12g} ({elapsed:.2f}s)"
    )
    return CapSolution(domain, values, integral, elapsed)


@dataclass(frozen=True, eq=False)
class AlphaEstimate:
    alpha: float
    error_budget: float
    coarse: CapSolution
    fine: CapSolution

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "error_budget": self.error_budget,
            "L": self.fine.L,
            "levels": [
                {"h": solution.h, "integral_psi": solution.integral_psi, "alpha": solution.alpha_estimate}
                for solution in (self.coarse, self.fine)
            ],
        }


def alpha_estimate(h: float = 0.04, L: float = 10.0) -> AlphaEstimate:
    """alpha from meshes h and h/2 combined for second-order convergence."""
    coarse = solve_cap_psi(build_cap_domain(L, h))
    fine = solve_cap_psi(build_cap_domain(L, 0.5 * h))
    change = fine.alpha_estimate - coarse.alpha_estimate
    alpha = fine.alpha_estimate + change / 3.0
    budget = abs(change) / 3.0 + 4.0 * math.exp(-L)
    logger.info(f"✅ End constant alpha = {alpha:.9f} (budget {budget:.2e}, L={L:g}, h={h:g})")
    return AlphaEstimate(alpha, budget, coarse, fine)


def alpha_constant(h: float = 0.04, L: float = 10.0) -> Tuple[float, float]:
    """(alpha, error_budget); the budget adds the truncation tail 4 e^-L."""
    estimate = alpha_estimate(h, L)
    return estimate.alpha, estimate.error_budget


@dataclass(frozen=True)
class DecayStation:
    x: float
    max_abs_psi: float
    bound: float
    rectangle_bound: float

    @property
    def margin(self) -> float:
        return self.bound - self.max_abs_psi


@dataclass(frozen=True)
class DecayReport:
    stations: Tuple[DecayStation, ...]

    @property
    def within_bounds(self) -> bool:
        return all(
            station.max_abs_psi <= min(station.bound, station.rectangle_bound)
            for station in self.stations
        )

    @property
    def margins_monotone(self) -> bool:
        margins = [station.margin for station in self.stations]
        return all(later <= earlier for earlier, later in zip(margins, margins[1:]))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "within_bounds": self.within_bounds,
            "margins_monotone": self.margins_monotone,
            "stations": [
                {
                    "x": station.x,
                    "max_abs_psi": station.max_abs_psi,
                    "bound": station.bound,
                    "rectangle_bound": station.rectangle_bound,
                    "margin": station.margin,
                }
                for station in self.stations
            ],
        }


def decay_check(
    solution: CapSolution, stations: Optional[List[float]] = None, samples: int = 201
) -> DecayReport:
    """max_y |psi(x, y)| at stations x = -1, -2, ... against 4 e^-|x| and the rectangle bound."""
    L = solution.L
    if stations is None:
        stations = [-float(k) for k in range(1, math.floor(L))]
    interpolate = solution.interpolator()
    y = np.linspace(-1.0, 1.0, samples)
    entries = []
    for x in stations:
        values = interpolate(np.column_stack([np.full_like(y, x), y]))
        peak = float(np.nanmax(np.abs(values)))
        reach = min(abs(x), L - abs(x))
        rectangle = DATA_BOUND * float(rectangle_supersolution(reach, 1.0, 0.0, 0.0))
        entries.append(
            DecayStation(
                x=float(x),
                max_abs_psi=peak,
                bound=rectangle_decay_bound(abs(x), 1.0),
                rectangle_bound=rectangle,
            )
        )
    return DecayReport(tuple(entries))


def _cap_integral(L: float, h: float) -> float:
    return solve_cap_psi(build_cap_domain(L, h)).integral_psi


_cached_cap_integral = lru_cache(maxsize=32)(_cap_integral)


def cap_contribution(
    eps: float, straight_length: float, h: float = 0.04, L_max: float = 10.0
) -> float:
    """Norm contribution eps^4 int v of one end whose straight part has the given length.

    With L = straight_length / eps, the corrector is solved on the cap truncated
    at min(L, L_max); the rest of the strip adds (2/3) per unit length exactly.
    """
    L = straight_length / eps
    truncated = min(L, L_max)
    if truncated < 2.0:
        raise ValueError(
            f"straight end of length {straight_length:g} is shorter than 2 eps (eps={eps:g})"
        )
    integral = _cached_cap_integral(round(truncated, 12), h)
    return eps**4 * ((2.0 / 3.0) * L + DISC_CONSTANT + integral)
