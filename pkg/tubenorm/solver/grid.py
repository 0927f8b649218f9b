"""
Tensor grids on the tube parameter domain and the mapped Poisson operator.

The tube around a curve is pulled back to (s, t) with s the curve parameter and
t in [-1, 1]. The pulled-back operator is diagonal in these coordinates:

    -d_s(a d_s f) - d_t(c d_t f) = eps l (1 - eps t kappa)

with a = eps / (l (1 - eps t kappa)) and c = l (1 - eps t kappa) / eps. It is
discretised by a conservative five-point stencil whose matrix is the Hessian of
the discrete energy, so the discrete optimum satisfies the same identities as
the continuous one.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Dict, Iterator, Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.sparse import coo_matrix, csr_matrix

from ..geometry.curves import Curve, check_regular

logger = logging.getLogger(__name__)

DEFAULT_NT = 65
MIN_NS = 64
MIN_NT = 17


def default_ns(eps: float) -> int:
    """Smallest power of two at or above max(256, 8 / eps)."""
    return max(256, 2 ** math.ceil(math.log2(8.0 / eps)))


def validate_resolution(Ns: int, Nt: int) -> None:
    if Ns < MIN_NS or Ns % 2:
        raise ValueError(f"Ns must be even and at least {MIN_NS}, got {Ns}")
    if Nt < MIN_NT or Nt % 2 == 0:
        raise ValueError(f"Nt must be odd and at least {MIN_NT}, got {Nt}")


@dataclass(frozen=True, eq=False)
class ParamGrid:
    """Nodes in s (periodic or an interval) and t in [-1, 1], with curvature at the s nodes."""

    s: np.ndarray
    t: np.ndarray
    kappa: np.ndarray
    eps: float
    length: float
    periodic: bool

    @property
    def Ns(self) -> int:
        """Number of s intervals."""
        return len(self.s) if self.periodic else len(self.s) - 1

    @property
    def Nt(self) -> int:
        return len(self.t)

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.s), len(self.t)

    @property
    def h_s(self) -> float:
        if self.periodic:
            return 1.0 / len(self.s)
        return float(self.s[-1] - self.s[0]) / self.Ns

    @property
    def h_t(self) -> float:
        return 2.0 / (self.Nt - 1)

    @cached_property
    def stretch(self) -> np.ndarray:
        """1 - eps t kappa at every node."""
        return 1.0 - self.eps * self.t[None, :] * self.kappa[:, None]

    @property
    def margin(self) -> float:
        return float(self.stretch.min())

    @cached_property
    def s_weights(self) -> np.ndarray:
        weights = np.full(len(self.s), self.h_s)
        if not self.periodic:
            weights[[0, -1]] *= 0.5
        return weights

    @cached_property
    def t_weights(self) -> np.ndarray:
        weights = np.full(self.Nt, self.h_t)
        weights[[0, -1]] *= 0.5
        return weights

    @cached_property
    def weights(self) -> np.ndarray:
        return np.outer(self.s_weights, self.t_weights)

    @cached_property
    def measure(self) -> np.ndarray:
        """Jacobian eps l (1 - eps t kappa) of the tube map at every node."""
        return self.eps * self.length * self.stretch

    @cached_property
    def load(self) -> np.ndarray:
        return (self.weights * self.measure).ravel()

    @cached_property
    def operator(self) -> csr_matrix:
        return assemble_operator(self)

    @cached_property
    def interior_mask(self) -> np.ndarray:
        """True at nodes whose values are unknowns (not on a Dirichlet edge)."""
        mask = np.ones(self.shape, dtype=bool)
        mask[:, [0, -1]] = False
        if not self.periodic:
            mask[[0, -1], :] = False
        return mask

    def energy(self, values: np.ndarray) -> float:
        """Discrete 2 int f dmu - int (a f_s^2 + c f_t^2)."""
        vector = np.asarray(values, dtype=float).ravel()
        return float(2.0 * self.load @ vector - vector @ (self.operator @ vector))

    def integral(self, values: np.ndarray) -> float:
        """Discrete int f dmu."""
        return float(self.load @ np.asarray(values, dtype=float).ravel())

    def coarsened(self) -> "ParamGrid":
        """Every other node in both directions; requires an even s count and odd Nt."""
        if self.Ns % 2 or (self.Nt - 1) % 2:
            raise ValueError(f"grid {self.Ns}x{self.Nt} cannot be halved")
        return ParamGrid(
            s=self.s[::2],
            t=self.t[::2],
            kappa=self.kappa[::2],
            eps=self.eps,
            length=self.length,
            periodic=self.periodic,
        )

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.s, self.t, indexing="ij")


def build_grid(
    curve: Curve,
    eps: float,
    Ns: Optional[int] = None,
    Nt: int = DEFAULT_NT,
    s_range: Optional[Tuple[float, float]] = None,
    margin: float = 0.95,
) -> ParamGrid:
    """Grid over the eps-tube of ``curve``; raises TubeNotRegular when eps > margin * rho.

    Closed curves get a periodic s grid of Ns nodes. Open curves (or an explicit
    ``s_range``) get Ns intervals on the range, end nodes included.
    """
    check_regular(curve, eps, margin)
    Ns = default_ns(eps) if Ns is None else int(Ns)
    validate_resolution(Ns, Nt)
    periodic = curve.is_closed and s_range is None
    if periodic:
        s = np.arange(Ns) / Ns
    else:
        lower, upper = s_range if s_range is not None else (0.0, 1.0)
        s = np.linspace(lower, upper, Ns + 1)
    t = np.linspace(-1.0, 1.0, Nt)
    kappa = np.asarray(curve.curvature_at(s), dtype=float)
    grid = ParamGrid(s=s, t=t, kappa=kappa, eps=float(eps), length=curve.length, periodic=periodic)
    logger.debug(
        f"Grid for {curve.name}: eps={eps:g}, {grid.Ns}x{grid.Nt}, margin {grid.margin:.4f}"
    )
    return grid


def assemble_operator(grid: ParamGrid) -> csr_matrix:
    """Symmetric stiffness matrix over all nodes, s-major node order."""
    ns, nt = grid.shape
    index = np.arange(ns * nt).reshape(ns, nt)
    eps, length = grid.eps, grid.length

    t_half = 0.5 * (grid.t[1:] + grid.t[:-1])
    c_half = length * (1.0 - eps * t_half[None, :] * grid.kappa[:, None]) / eps
    k_t = grid.s_weights[:, None] * c_half / grid.h_t
    first = [index[:, :-1].ravel()]
    second = [index[:, 1:].ravel()]
    conductance = [k_t.ravel()]

    stretch = grid.stretch
    if grid.periodic:
        left, right = index, np.roll(index, -1, axis=0)
        stretch_half = 0.5 * (stretch + np.roll(stretch, -1, axis=0))
    else:
        left, right = index[:-1], index[1:]
        stretch_half = 0.5 * (stretch[:-1] + stretch[1:])
    k_s = grid.t_weights[None, :] * eps / (length * stretch_half) / grid.h_s
    first.append(left.ravel())
    second.append(right.ravel())
    conductance.append(k_s.ravel())

    p, q, k = np.concatenate(first), np.concatenate(second), np.concatenate(conductance)
    rows = np.concatenate([p, q, p, q])
    cols = np.concatenate([p, q, q, p])
    data = np.concatenate([k, k, -k, -k])
    return coo_matrix((data, (rows, cols)), shape=(ns * nt, ns * nt)).tocsr()


@dataclass(frozen=True, eq=False)
class MappedField:
    """Nodal values of a function on a ParamGrid; zero on t = -1 and t = +1."""

    grid: ParamGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise ValueError(f"field shape {values.shape} does not match grid {self.grid.shape}")
        if np.any(values[:, 0] != 0.0) or np.any(values[:, -1] != 0.0):
            raise ValueError("mapped fields must vanish on t = -1 and t = +1")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(
        cls, grid: ParamGrid, function: Callable[[np.ndarray, np.ndarray], np.ndarray]
    ) -> "MappedField":
        """Evaluate ``function(s, t)`` on the nodes and zero the t edges exactly."""
        S, T = grid.mesh()
        values = np.array(function(S, T), dtype=float)
        values[:, [0, -1]] = 0.0
        return cls(grid, values)

    @property
    def boundary_tags(self) -> Dict[str, str]:
        return {
            "t=-1": "dirichlet-zero",
            "t=+1": "dirichlet-zero",
            "s": "periodic" if self.grid.periodic else "dirichlet",
        }

    def to_rows(self) -> Iterator[Tuple[float, float, float]]:
        for i, s in enumerate(self.grid.s):
            for j, t in enumerate(self.grid.t):
                yield float(s), float(t), float(self.values[i, j])


@dataclass(frozen=True)
class NormResult:
    """Discrete optimum of the mapped problem on one grid.

    ``norm_sq`` is the optimal discrete energy, ``integral`` the discrete
    integral of the optimiser (equal at the optimum), ``extrapolated`` the
    Richardson combination with the half-resolution companion grid.
    """

    norm_sq: float
    integral: float
    Ns: int
    Nt: int
    residual: float
    method: str
    iterations: int = 0
    extrapolated: Optional[float] = None
    wall_time: float = 0.0

    @property
    def grid(self) -> Tuple[int, int]:
        return self.Ns, self.Nt

    @property
    def best(self) -> float:
        return self.norm_sq if self.extrapolated is None else self.extrapolated

    def to_dict(self) -> Dict[str, Any]:
        return {
            "norm_sq": self.norm_sq,
            "integral": self.integral,
            "extrapolated": self.extrapolated,
            "best": self.best,
            "grid": [self.Ns, self.Nt],
            "residual": self.residual,
            "method": self.method,
            "iterations": self.iterations,
        }


def upper_profile_values(grid: ParamGrid) -> np.ndarray:
    """Two-term expansion eps^2/2 (1-t^2) + eps^3 kappa t(1-t^2)/6 + eps^4 kappa^2 (1+2t^2-3t^4)/24."""
    eps = grid.eps
    t = grid.t[None, :]
    kappa = grid.kappa[:, None]
    return (
        0.5 * eps**2 * (1.0 - t**2)
        + eps**3 * kappa * t * (1.0 - t**2) / 6.0
        + eps**4 * kappa**2 * (1.0 + 2.0 * t**2 - 3.0 * t**4) / 24.0
    )


def periodic_interpolant(values: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Periodic cubic spline through values at s = k / N."""
    knots = np.arange(len(values) + 1) / len(values)
    spline = CubicSpline(knots, np.append(values, values[0]), bc_type="periodic")
    return lambda s: spline(np.mod(s, 1.0))
