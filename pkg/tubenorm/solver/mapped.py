"""
Mapped solver for the H^-1 norm of the constant one on a tube.

The optimiser of 2 int f - int |grad f|^2 over functions vanishing on the tube
boundary solves the mapped Poisson problem. Values are reported as the discrete
energy of the computed field, which is stationary at the optimum, so solver
error enters only quadratically.
"""

import logging
import time
from typing import Optional, Tuple

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import cg, spsolve

from ..errors import TubeNormError
from ..geometry.curves import Curve, MissingEta, NotClosed, check_regular
from .grid import DEFAULT_NT, MappedField, NormResult, ParamGrid, build_grid

logger = logging.getLogger(__name__)

METHODS = ("cg", "direct")
GridSpec = Optional[Tuple[Optional[int], int]]


class NoConvergence(TubeNormError):
    """The iterative solver stopped before reaching its tolerance."""

    def __init__(self, iterations: int, residual: float):
        super().__init__(
            f"conjugate gradients stopped after {iterations} iterations "
            f"(relative residual {residual:.3e})"
        )
        self.iterations = iterations
        self.residual = residual


def _unpack(grid: GridSpec) -> Tuple[Optional[int], int]:
    if grid is None:
        return None, DEFAULT_NT
    Ns, Nt = grid
    return Ns, Nt


def solve_on_grid(
    grid: ParamGrid,
    fixed: np.ndarray,
    method: str = "cg",
    rtol: float = 1e-10,
) -> Tuple[np.ndarray, float, int]:
    """Solve for the interior nodes given Dirichlet values in ``fixed``.

    Returns the full nodal array, the relative residual of the reduced system
    and the iteration count (0 for the direct solver).
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    free = grid.interior_mask.ravel()
    values = np.array(fixed, dtype=float).ravel()
    matrix = grid.operator
    reduced = matrix[free][:, free]
    rhs = grid.load[free] - matrix[free][:, ~free] @ values[~free]

    iterations = 0
    if method == "direct":
        solution = spsolve(reduced.tocsc(), rhs)
    else:
        counter = {"n": 0}

        def _count(_):
            counter["n"] += 1

        limit = int(50 * np.sqrt(reduced.shape[0]))
        preconditioner = diags(1.0 / reduced.diagonal())
        solution, info = cg(
            reduced, rhs, rtol=rtol, atol=0.0, maxiter=limit, M=preconditioner, callback=_count
        )
        iterations = counter["n"]
        if info != 0:
            residual = float(np.linalg.norm(rhs - reduced @ solution) / np.linalg.norm(rhs))
            raise NoConvergence(iterations, residual)

    residual = float(np.linalg.norm(rhs - reduced @ solution) / np.linalg.norm(rhs))
    values[free] = solution
    return values.reshape(grid.shape), residual, iterations


def _mapped_solve(
    grid: ParamGrid,
    boundary: Optional[np.ndarray],
    method: str,
    rtol: float,
    extrapolate: bool,
    quantity: str,
) -> Tuple[MappedField, NormResult]:
    started = time.perf_counter()
    fixed = np.zeros(grid.shape) if boundary is None else boundary
    values, residual, iterations = solve_on_grid(grid, fixed, method, rtol)
    energy, integral = grid.energy(values), grid.integral(values)
    if not (energy if quantity == "energy" else integral) > 0:
        raise NoConvergence(iterations, residual)

    extrapolated = None
    if extrapolate:
        coarse = grid.coarsened()
        coarse_fixed = np.zeros(coarse.shape) if boundary is None else boundary[::2, ::2]
        coarse_values, _, _ = solve_on_grid(coarse, coarse_fixed, method, rtol)
        if quantity == "energy":
            fine_value, coarse_value = energy, coarse.energy(coarse_values)
        else:
            fine_value, coarse_value = integral, coarse.integral(coarse_values)
        extrapolated = (4.0 * fine_value - coarse_value) / 3.0

    result = NormResult(
        norm_sq=energy,
        integral=integral,
        Ns=grid.Ns,
        Nt=grid.Nt,
        residual=residual,
        method=method,
        iterations=iterations,
        extrapolated=extrapolated,
        wall_time=time.perf_counter() - started,
    )
    logger.debug(
        f"Mapped solve eps={grid.eps:g} on {grid.Ns}x{grid.Nt}: energy {energy:.12g}, "
        f"integral {integral:.12g}, residual {residual:.2e}, {result.wall_time:.2f}s"
    )
    return MappedField(grid, values), result


def xeps_evaluate(curve: Curve, eps: float, field: MappedField, margin: float = 0.95) -> float:
    """Discrete 2 int f dmu - int |grad f|^2 dmu of a field on the eps-tube of ``curve``."""
    check_regular(curve, eps, margin)
    grid = field.grid
    if grid.eps != eps or grid.length != curve.length:
        grid = ParamGrid(
            s=grid.s,
            t=grid.t,
            kappa=np.asarray(curve.curvature_at(grid.s), dtype=float),
            eps=float(eps),
            length=curve.length,
            periodic=grid.periodic,
        )
    return grid.energy(field.values)


def solve_closed(
    curve: Curve,
    eps: float,
    grid: GridSpec = None,
    method: str = "cg",
    rtol: float = 1e-10,
    margin: float = 0.95,
    extrapolate: bool = True,
) -> Tuple[MappedField, NormResult]:
    """Optimal field and norm on the eps-tube of a closed curve.

    Args:
        grid: (Ns, Nt); Ns None picks the default resolution for eps
        method: "cg" (Jacobi-preconditioned conjugate gradients) or "direct"
        margin: admissible fraction of the global radius
        extrapolate: also solve on the half-resolution grid and report the
            Richardson value
    """
    if not curve.is_closed:
        raise NotClosed(f"{curve.name} is open; use solve_bulk_open")
    Ns, Nt = _unpack(grid)
    param_grid = build_grid(curve, eps, Ns, Nt, margin=margin)
    return _mapped_solve(param_grid, None, method, rtol, extrapolate, "energy")


def bulk_grid(
    curve: Curve, eps: float, grid: GridSpec = None, margin: float = 0.95
) -> ParamGrid:
    if curve.eta is None:
        raise MissingEta(f"{curve.name} carries no straight end bands")
    Ns, Nt = _unpack(grid)
    return build_grid(curve, eps, Ns, Nt, s_range=(curve.eta, 1.0 - curve.eta), margin=margin)


def straight_profile(grid: ParamGrid) -> np.ndarray:
    """eps^2/2 (1 - t^2) on every node."""
    return np.broadcast_to(0.5 * grid.eps**2 * (1.0 - grid.t**2), grid.shape).copy()


def solve_bulk_open(
    curve: Curve,
    eps: float,
    grid: GridSpec = None,
    method: str = "cg",
    rtol: float = 1e-10,
    margin: float = 0.95,
    extrapolate: bool = True,
) -> Tuple[MappedField, float]:
    """Bulk field on s in [eta, 1 - eta] and its contribution int f dmu.

    The s-ends carry the straight-strip profile eps^2/2 (1 - t^2).
    """
    field, result = solve_bulk_open_result(curve, eps, grid, method, rtol, margin, extrapolate)
    return field, result.best


def solve_bulk_open_result(
    curve: Curve,
    eps: float,
    grid: GridSpec = None,
    method: str = "cg",
    rtol: float = 1e-10,
    margin: float = 0.95,
    extrapolate: bool = True,
) -> Tuple[MappedField, NormResult]:
    param_grid = bulk_grid(curve, eps, grid, margin)
    boundary = np.zeros(param_grid.shape)
    profile = straight_profile(param_grid)
    boundary[[0, -1], :] = profile[[0, -1], :]
    return _mapped_solve(param_grid, boundary, method, rtol, extrapolate, "integral")
