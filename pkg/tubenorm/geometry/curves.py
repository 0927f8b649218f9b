"""
Plane curves sampled uniformly in arclength.

A ``Curve`` holds N samples of a map from the parameter domain (the unit
circle for closed curves, [0, 1] for open ones) whose speed is the constant
length. Frames, curvature, the elastica energy and the global radius of
curvature are derived from the samples and cached on the instance.
"""

import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union, overload

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline
from scipy.spatial.distance import pdist

from ..errors import TubeNormError

logger = logging.getLogger(__name__)

CLOSED = "closed"
OPEN = "open"
MIN_SAMPLES = 16
RESAMPLE_MODES = ("spline", "polygonal")

# Relative tolerance for the uniform-spacing check on resampled curves.
ARCLENGTH_TOLERANCE = 1e-6

_GAUSS_ORDER = 8
_PAIR_BLOCK = 256


class GeometryError(TubeNormError):
    """Base class for curve geometry errors."""


class DegenerateInput(GeometryError):
    """Input points have zero length, collapse, or are malformed."""


class TooFewPoints(GeometryError):
    """Fewer distinct points or samples than a curve needs."""


class SelfIntersecting(GeometryError):
    """A pairwise radius fell below the sampling resolution."""

    def __init__(self, message: str, radius: float = 0.0):
        super().__init__(message)
        self.radius = radius


class TubeNotRegular(GeometryError):
    """The tube half-width exceeds the admissible fraction of the global radius."""

    def __init__(self, eps: float, rho: float, message: Optional[str] = None):
        super().__init__(
            message or f"tube half-width {eps:g} exceeds admissible radius {rho:g}"
        )
        self.eps = eps
        self.rho = rho


class NotClosed(GeometryError):
    """A closed curve was required."""


class MissingEta(GeometryError):
    """The curve is not straight near its ends on a band of known width."""


class Unbounded:
    """Global radius of a curve with no finite circle through its points."""

    _instance: Optional["Unbounded"] = None

    def __new__(cls) -> "Unbounded":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "unbounded"

    __str__ = __repr__

    def __float__(self) -> float:
        return math.inf

    def __eq__(self, other: object) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("unbounded")

    def __lt__(self, other: object) -> bool:
        return False

    def __le__(self, other: object) -> bool:
        return other is self

    def __gt__(self, other: object) -> bool:
        return other is not self

    def __ge__(self, other: object) -> bool:
        return True


UNBOUNDED = Unbounded()

Radius = Union[float, Unbounded]


@dataclass(frozen=True)
class FrameSample:
    """Frame at one sample: unit tangent, unit normal (tangent rotated by +90°), curvature."""

    s: float
    tangent: Tuple[float, float]
    normal: Tuple[float, float]
    curvature: float


@dataclass(frozen=True, eq=False)
class CurveFrame(Sequence[FrameSample]):
    """Frame arrays over all samples; indexing yields ``FrameSample`` records."""

    s: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    kappa: np.ndarray

    def __len__(self) -> int:
        return len(self.s)

    @overload
    def __getitem__(self, index: int) -> FrameSample:
        ...

    @overload
    def __getitem__(self, index: slice) -> List[FrameSample]:
        ...

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        return FrameSample(
            s=float(self.s[index]),
            tangent=(float(self.tangent[index, 0]), float(self.tangent[index, 1])),
            normal=(float(self.normal[index, 0]), float(self.normal[index, 1])),
            curvature=float(self.kappa[index]),
        )

    def __iter__(self) -> Iterator[FrameSample]:
        for index in range(len(self)):
            yield self[index]


@dataclass(frozen=True, eq=False)
class Curve:
    """Arclength-uniform samples of a closed or open plane curve.

    Args:
        samples: (N, 2) positions; closed curves wrap without a repeated endpoint
        kind: "closed" or "open"
        length: total arclength
        eta: end-band width for open curves that are straight on [0, 2eta] and
            [1 - 2eta, 1]
        reoriented: True when a clockwise input was reversed on construction
        name: label used in logs and artifacts
    """

    samples: np.ndarray
    kind: str
    length: float
    eta: Optional[float] = None
    reoriented: bool = False
    name: str = "curve"

    def __post_init__(self):
        points = np.array(self.samples, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2:
            raise DegenerateInput(f"samples must be an (N, 2) array, got {points.shape}")
        if len(points) < MIN_SAMPLES:
            raise TooFewPoints(f"{len(points)} samples, need at least {MIN_SAMPLES}")
        if not np.all(np.isfinite(points)):
            raise DegenerateInput("samples contain non-finite values")
        if self.kind not in (CLOSED, OPEN):
            raise ValueError(f"kind must be '{CLOSED}' or '{OPEN}', got {self.kind!r}")
        length = float(self.length)
        if not (length > 0 and math.isfinite(length)):
            raise DegenerateInput(f"curve length must be positive, got {length}")
        if self.kind == CLOSED and np.linalg.norm(points[-1] - points[0]) <= 1e-12 * length:
            raise DegenerateInput("closed curve repeats its first sample at the end")
        points.setflags(write=False)
        object.__setattr__(self, "samples", points)
        object.__setattr__(self, "length", length)
        if self.eta is not None:
            eta = float(self.eta)
            if self.kind != OPEN:
                raise MissingEta("only open curves carry an end-band width")
            if not 0.0 < eta < 0.25:
                raise MissingEta(f"end-band width must lie in (0, 1/4), got {eta}")
            object.__setattr__(self, "eta", eta)
            _check_straight_ends(self)

    @property
    def N(self) -> int:
        return len(self.samples)

    @property
    def is_closed(self) -> bool:
        return self.kind == CLOSED

    @property
    def straight_ended(self) -> bool:
        return self.eta is not None

    @property
    def spacing(self) -> float:
        """Parameter step between consecutive samples."""
        return 1.0 / self.N if self.is_closed else 1.0 / (self.N - 1)

    @property
    def step_length(self) -> float:
        return self.length * self.spacing

    @cached_property
    def params(self) -> np.ndarray:
        return np.arange(self.N) * self.spacing

    @cached_property
    def frame(self) -> CurveFrame:
        return _compute_frame(self)

    @cached_property
    def radius(self) -> Radius:
        return _compute_global_radius(self)

    @cached_property
    def _position_spline(self) -> CubicSpline:
        if self.is_closed:
            knots = np.append(self.params, 1.0)
            values = np.vstack([self.samples, self.samples[:1]])
            return CubicSpline(knots, values, bc_type="periodic")
        return CubicSpline(self.params, self.samples)

    @cached_property
    def _curvature_spline(self) -> CubicSpline:
        kappa = self.frame.kappa
        if self.is_closed:
            return CubicSpline(
                np.append(self.params, 1.0), np.append(kappa, kappa[0]), bc_type="periodic"
            )
        return CubicSpline(self.params, kappa)

    def _wrap(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return np.mod(s, 1.0) if self.is_closed else np.clip(s, 0.0, 1.0)

    def position(self, s) -> np.ndarray:
        return self._position_spline(self._wrap(s))

    def tangent_at(self, s) -> np.ndarray:
        velocity = self._position_spline(self._wrap(s), 1)
        return velocity / np.linalg.norm(velocity, axis=-1, keepdims=True)

    def normal_at(self, s) -> np.ndarray:
        tangent = self.tangent_at(s)
        return np.stack([-tangent[..., 1], tangent[..., 0]], axis=-1)

    def curvature_at(self, s) -> np.ndarray:
        return self._curvature_spline(self._wrap(s))

    def scaled(self, factor: float) -> "Curve":
        """Copy of the curve dilated by ``factor`` about the origin."""
        if not factor > 0:
            raise ValueError(f"scale factor must be positive, got {factor}")
        return replace(self, samples=self.samples * factor, length=self.length * factor)

    def with_name(self, name: str) -> "Curve":
        return replace(self, name=name)


def _unit(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=-1, keepdims=True)
    if np.any(norms == 0):
        raise DegenerateInput("consecutive samples coincide")
    return vectors / norms


def _turning_angles(incoming: np.ndarray, outgoing: np.ndarray) -> np.ndarray:
    cross = incoming[:, 0] * outgoing[:, 1] - incoming[:, 1] * outgoing[:, 0]
    dot = np.einsum("ij,ij->i", incoming, outgoing)
    return np.arctan2(cross, dot)


def _compute_frame(curve: Curve) -> CurveFrame:
    points = curve.samples
    if curve.is_closed:
        previous = np.roll(points, 1, axis=0)
        following = np.roll(points, -1, axis=0)
        tangent = _unit(following - previous)
        turning = _turning_angles(points - previous, following - points)
    else:
        tangent = np.empty_like(points)
        tangent[1:-1] = _unit(points[2:] - points[:-2])
        tangent[0] = _unit(points[1] - points[0])
        tangent[-1] = _unit(points[-1] - points[-2])
        turning = np.zeros(curve.N)
        turning[1:-1] = _turning_angles(points[1:-1] - points[:-2], points[2:] - points[1:-1])
    kappa = turning / curve.step_length
    if not curve.is_closed:
        kappa[0] = 2.0 * kappa[1] - kappa[2]
        kappa[-1] = 2.0 * kappa[-2] - kappa[-3]
    normal = np.column_stack([-tangent[:, 1], tangent[:, 0]])
    for array in (tangent, normal, kappa):
        array.setflags(write=False)
    return CurveFrame(s=curve.params, tangent=tangent, normal=normal, kappa=kappa)


def _roundoff(curve: Curve) -> float:
    """Relative rounding noise of the sample coordinates, measured against the length."""
    extent = float(np.abs(curve.samples).max()) / curve.length
    return 64 * np.finfo(float).eps * max(extent, 1.0)


def pairwise_tolerances(curve: Curve) -> Dict[str, float]:
    """Collinearity thresholds for ``min_pairwise_radius`` at the rounding level of ``curve``."""
    noise = _roundoff(curve)
    return {"angle_tol": noise * curve.N, "offset_tol": noise * curve.length}


def _check_straight_ends(curve: Curve) -> None:
    """Second differences must vanish on samples whose stencil lies in an end band."""
    eta = curve.eta
    params = curve.params
    points = curve.samples
    second = points[2:] - 2.0 * points[1:-1] + points[:-2]
    lower, upper = params[:-2], params[2:]
    in_band = (upper <= 2.0 * eta + 1e-12) | (lower >= 1.0 - 2.0 * eta - 1e-12)
    if not np.any(in_band):
        raise MissingEta(f"no samples fall inside end bands of width {eta}")
    # second differences scaled to a dimensionless curvature kappa * length
    bending = np.linalg.norm(second[in_band], axis=1) / (curve.length * curve.spacing**2)
    tolerance = max(1e-6, _roundoff(curve) * curve.N**2)
    deviation = float(bending.max())
    if deviation > tolerance:
        raise MissingEta(
            f"{curve.name} is not straight on its end bands (bending {deviation:.3e})"
        )


def curvature_profile(curve: Curve) -> CurveFrame:
    """Unit tangent, unit normal and signed curvature at every sample."""
    return curve.frame


def _quadrature_weights(curve: Curve) -> np.ndarray:
    weights = np.full(curve.N, curve.spacing)
    if not curve.is_closed:
        weights[[0, -1]] *= 0.5
    return weights


def integrate_over_parameter(curve: Curve, values: np.ndarray) -> float:
    """Periodic rectangle rule (closed) or trapezoid rule (open) over the parameter."""
    return float(np.dot(_quadrature_weights(curve), values))


def elastica_energy(curve: Curve) -> float:
    """Integral of curvature squared over the curve, in arclength."""
    return curve.length * integrate_over_parameter(curve, curve.frame.kappa**2)


def turning_number(curve: Curve) -> float:
    if not curve.is_closed:
        raise NotClosed("turning number needs a closed curve")
    return curve.length * integrate_over_parameter(curve, curve.frame.kappa) / (2.0 * math.pi)


def min_pairwise_radius(
    points: np.ndarray,
    tangents: np.ndarray,
    targets: np.ndarray,
    best: float,
    coincident: float,
    angle_tol: float = 1e-12,
    offset_tol: float = 0.0,
) -> float:
    """Smallest radius |d|^2 / (2|T x d|) of circles tangent at ``points`` through ``targets``.

    Pairs closer than ``coincident`` are skipped and pairs farther than twice the
    running best cannot improve it. Pairs with |T x d| <= angle_tol |d| + offset_tol
    count as collinear.
    """
    for start in range(0, len(points), _PAIR_BLOCK):
        base = points[start : start + _PAIR_BLOCK]
        tangent = tangents[start : start + _PAIR_BLOCK]
        delta = targets[None, :, :] - base[:, None, :]
        dist2 = np.einsum("ijk,ijk->ij", delta, delta)
        dist = np.sqrt(dist2)
        cross = np.abs(tangent[:, None, 0] * delta[..., 1] - tangent[:, None, 1] * delta[..., 0])
        mask = (
            (dist > coincident)
            & (dist <= 2.0 * best)
            & (cross > angle_tol * dist + offset_tol)
        )
        if np.any(mask):
            best = min(best, float((dist2[mask] / (2.0 * cross[mask])).min()))
    return best


def _compute_global_radius(curve: Curve) -> Radius:
    frame = curve.frame
    noise = _roundoff(curve)
    # turning angles carry rounding noise of order eps |x| / step
    curved = np.abs(frame.kappa) * curve.length > noise * curve.N**2
    best = float((1.0 / np.abs(frame.kappa[curved])).min()) if np.any(curved) else math.inf
    best = min_pairwise_radius(
        curve.samples,
        frame.tangent,
        curve.samples,
        best,
        coincident=1e-9 * curve.length,
        **pairwise_tolerances(curve),
    )
    if math.isinf(best):
        return UNBOUNDED
    floor = 2.0 * curve.step_length
    if best < floor:
        raise SelfIntersecting(
            f"{curve.name} has pairwise radius {best:.3e} below resolution {floor:.3e}",
            radius=best,
        )
    logger.debug(f"Global radius of {curve.name}: {best:.12g}")
    return best


def global_radius(curve: Curve) -> Radius:
    """Largest admissible tube half-width: min of local and pairwise point-tangent radii."""
    return curve.radius


def check_regular(curve: Curve, eps: float, fraction: float = 0.95) -> float:
    """Raise ``TubeNotRegular`` unless eps <= fraction * rho; returns rho as a float."""
    if not eps > 0:
        raise ValueError(f"tube half-width must be positive, got {eps}")
    rho = float(global_radius(curve))
    if eps > fraction * rho:
        raise TubeNotRegular(eps, rho)
    return rho


def tube_map(curve: Curve, eps: float, s, t) -> Tuple[np.ndarray, np.ndarray]:
    """Point gamma(s) + eps t nu(s) and Jacobian determinant eps l (1 - eps t kappa(s))."""
    check_regular(curve, eps, fraction=1.0)
    s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    point = curve.position(s) + eps * t[..., None] * curve.normal_at(s)
    jacobian = eps * curve.length * (1.0 - eps * t * curve.curvature_at(s))
    return point, jacobian


def tube_injectivity_gap(curve: Curve, eps: float, Ns: int = 64, Nt: int = 17) -> float:
    """Minimum distance between the images of distinct (s, t) probe points."""
    if curve.is_closed:
        s = np.arange(Ns) / Ns
    else:
        s = np.linspace(0.0, 1.0, Ns)
    t = np.linspace(-1.0, 1.0, Nt)
    S, T = np.meshgrid(s, t, indexing="ij")
    points, _ = tube_map(curve, eps, S.ravel(), T.ravel())
    return float(pdist(points).min())


def _panel_lengths(
    velocity: Callable[[np.ndarray], np.ndarray], lower: np.ndarray, upper: np.ndarray
) -> np.ndarray:
    nodes, weights = leggauss(_GAUSS_ORDER)
    half = 0.5 * (upper - lower)
    u = (0.5 * (upper + lower))[:, None] + half[:, None] * nodes[None, :]
    speed = np.linalg.norm(velocity(u), axis=-1)
    return half * (speed @ weights)


def invert_arclength(
    velocity: Callable[[np.ndarray], np.ndarray],
    knots: np.ndarray,
    fractions: np.ndarray,
    iterations: int = 8,
) -> Tuple[np.ndarray, float]:
    """Parameters where cumulative arclength reaches ``fractions`` of the total.

    Arclength is integrated panel by panel with Gauss-Legendre between ``knots``;
    each target is refined by Newton steps clipped to its panel.
    """
    knots = np.asarray(knots, dtype=float)
    panels = _panel_lengths(velocity, knots[:-1], knots[1:])
    cumulative = np.concatenate([[0.0], np.cumsum(panels)])
    total = float(cumulative[-1])
    if not total > 0:
        raise DegenerateInput("curve has zero length")
    targets = np.asarray(fractions, dtype=float) * total
    panel = np.clip(np.searchsorted(cumulative, targets, side="right") - 1, 0, len(panels) - 1)
    lower, upper, base = knots[panel], knots[panel + 1], cumulative[panel]
    share = np.divide(targets - base, panels[panel], out=np.zeros_like(targets), where=panels[panel] > 0)
    u = lower + share * (upper - lower)
    tiny = 1e-300
    for _ in range(iterations):
        partial = _panel_lengths(velocity, lower, u)
        speed = np.linalg.norm(velocity(u), axis=-1)
        u = np.clip(u - (base + partial - targets) / np.maximum(speed, tiny), lower, upper)
    return u, total


def _signed_area(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _clean_points(points: np.ndarray, kind: str) -> np.ndarray:
    if points.ndim != 2 or points.shape[1] != 2 or len(points) == 0:
        raise DegenerateInput(f"expected a sequence of 2-D points, got shape {points.shape}")
    if not np.all(np.isfinite(points)):
        raise DegenerateInput("input points contain non-finite values")
    scale = float(np.ptp(points, axis=0).max())
    if scale == 0:
        raise DegenerateInput("input points collapse to a single location")
    keep = np.ones(len(points), dtype=bool)
    keep[1:] = np.linalg.norm(np.diff(points, axis=0), axis=1) > 1e-12 * scale
    points = points[keep]
    if kind == CLOSED and len(points) > 1 and np.linalg.norm(points[-1] - points[0]) <= 1e-12 * scale:
        points = points[:-1]
    if len(points) < 4:
        raise TooFewPoints(f"{len(points)} distinct points, need at least 4")
    return points


def _chord_parameter(points: np.ndarray, kind: str) -> Tuple[np.ndarray, np.ndarray]:
    vertices = np.vstack([points, points[:1]]) if kind == CLOSED else points
    chords = np.linalg.norm(np.diff(vertices, axis=0), axis=1)
    knots = np.concatenate([[0.0], np.cumsum(chords)])
    return knots / knots[-1], vertices


def _fit_spline(points: np.ndarray, kind: str) -> Tuple[CubicSpline, np.ndarray]:
    knots, vertices = _chord_parameter(points, kind)
    if kind == CLOSED:
        return CubicSpline(knots, vertices, bc_type="periodic"), knots
    start = (vertices[1] - vertices[0]) / (knots[1] - knots[0])
    end = (vertices[-1] - vertices[-2]) / (knots[-1] - knots[-2])
    return CubicSpline(knots, vertices, bc_type=((1, start), (1, end))), knots


def _fractions(N: int, kind: str) -> np.ndarray:
    return np.arange(N) / N if kind == CLOSED else np.linspace(0.0, 1.0, N)


def _resample_polygonal(points: np.ndarray, N: int, kind: str) -> Tuple[np.ndarray, float]:
    knots, vertices = _chord_parameter(points, kind)
    chords = np.linalg.norm(np.diff(vertices, axis=0), axis=1)
    total = float(chords.sum())
    targets = _fractions(N, kind)
    resampled = np.column_stack(
        [np.interp(targets, knots, vertices[:, 0]), np.interp(targets, knots, vertices[:, 1])]
    )
    return resampled, total


def resample_arclength(
    points,
    N: int,
    kind: str = CLOSED,
    mode: str = "spline",
    eta: Optional[float] = None,
    name: str = "curve",
) -> Curve:
    """Resample a point sequence to N samples equally spaced in arclength.

    ``mode="spline"`` interpolates the points with a cubic spline (periodic for
    closed input, clamped to the end chords for open input) and inverts its
    arclength; two passes bring the spacing to the tolerance. ``mode="polygonal"``
    measures the polyline itself, which keeps corners exact.

    Raises:
        DegenerateInput: zero length or malformed input
        TooFewPoints: N < 16 or fewer than 4 distinct points
    """
    if kind not in (CLOSED, OPEN):
        raise ValueError(f"kind must be '{CLOSED}' or '{OPEN}', got {kind!r}")
    if mode not in RESAMPLE_MODES:
        raise ValueError(f"resample mode must be one of {RESAMPLE_MODES}, got {mode!r}")
    if N < MIN_SAMPLES:
        raise TooFewPoints(f"target count {N} is below {MIN_SAMPLES}")
    points = _clean_points(np.asarray(points, dtype=float), kind)

    reoriented = False
    if kind == CLOSED:
        scale = float(np.ptp(points, axis=0).max())
        if _signed_area(points) < -1e-12 * scale**2:
            points = points[::-1].copy()
            reoriented = True
            logger.info(f"⚠️ {name}: clockwise input reversed to counterclockwise")

    if mode == "polygonal":
        samples, total = _resample_polygonal(points, N, kind)
    else:
        samples = points
        for _ in range(2):
            spline, knots = _fit_spline(samples, kind)
            u, total = invert_arclength(lambda v: spline(v, 1), knots, _fractions(N, kind))
            samples = spline(u)

    curve = Curve(samples, kind, total, eta=eta, reoriented=reoriented, name=name)
    spread = arclength_spread(curve)
    if spread > ARCLENGTH_TOLERANCE:
        logger.warning(f"⚠️ {name}: arclength spacing spread {spread:.2e} after resampling")
    return curve


def arclength_spread(curve: Curve) -> float:
    """Max relative deviation of consecutive chord lengths from their mean."""
    points = curve.samples
    if curve.is_closed:
        points = np.vstack([points, points[:1]])
    chords = np.linalg.norm(np.diff(points, axis=0), axis=1)
    return float(np.abs(chords / chords.mean() - 1.0).max())


def load_curve_csv(
    path: Union[str, Path],
    kind: str = CLOSED,
    eta: Optional[float] = None,
    N: Optional[int] = None,
    mode: str = "spline",
) -> Curve:
    """Read an ``x,y`` CSV and resample it to arclength (N defaults to the row count)."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        header = handle.readline().strip().lower().replace(" ", "")
    if header != "x,y":
        raise DegenerateInput(f"{path}: expected header 'x,y', found {header!r}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    count = N or max(len(data), MIN_SAMPLES)
    return resample_arclength(data, count, kind, mode=mode, eta=eta, name=path.stem)
