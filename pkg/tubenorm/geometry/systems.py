"""
Finite systems of closed curves.

Systems are compared through their traces: a k-d tree over all samples answers
the neighbourhood queries behind multiplicity counts, crossing detection and the
cross-curve part of the global radius.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree
from scipy.spatial.distance import directed_hausdorff

from .curves import (
    UNBOUNDED,
    Curve,
    NotClosed,
    Radius,
    SelfIntersecting,
    global_radius,
    load_curve_csv,
    min_pairwise_radius,
    pairwise_tolerances,
)

logger = logging.getLogger(__name__)

TRANSVERSE = "transverse"
TANGENT = "tangent"


@dataclass(frozen=True)
class CrossingReport:
    """Cluster of near-coincident trace points from distinct traversal positions."""

    location: Tuple[float, float]
    pairs: Tuple[Tuple[Tuple[int, int], Tuple[int, int]], ...]
    angle: float
    classification: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "location": list(self.location),
            "pairs": [[list(a), list(b)] for a, b in self.pairs],
            "angle": self.angle,
            "classification": self.classification,
        }


@dataclass(frozen=True, eq=False)
class TraceIndex:
    points: np.ndarray
    tangents: np.ndarray
    owner: np.ndarray
    sample: np.ndarray
    tree: cKDTree


@dataclass(frozen=True, eq=False)
class CurveSystem:
    """Ordered collection of closed curves, equal when their traces with multiplicity agree."""

    curves: Tuple[Curve, ...]
    name: str = "system"

    def __post_init__(self):
        curves = tuple(self.curves)
        if not curves:
            raise ValueError("a curve system needs at least one curve")
        for index, curve in enumerate(curves):
            if not curve.is_closed:
                raise NotClosed(f"system member {index} ({curve.name}) is an open curve")
        object.__setattr__(self, "curves", curves)

    def __len__(self) -> int:
        return len(self.curves)

    @property
    def length(self) -> float:
        total = 0.0
        for curve in self.curves:
            total += curve.length
        return total

    @property
    def resolution(self) -> float:
        """Largest sample spacing over the members."""
        return max(curve.step_length for curve in self.curves)

    @cached_property
    def trace_index(self) -> TraceIndex:
        points = np.vstack([curve.samples for curve in self.curves])
        tangents = np.vstack([curve.frame.tangent for curve in self.curves])
        owner = np.concatenate([np.full(curve.N, i) for i, curve in enumerate(self.curves)])
        sample = np.concatenate([np.arange(curve.N) for curve in self.curves])
        return TraceIndex(points, tangents, owner, sample, cKDTree(points))


def system_metrics(system: CurveSystem) -> Tuple[float, Radius]:
    """Total length and global radius, including point-tangent radii across members."""
    try:
        rho = min(float(global_radius(curve)) for curve in system.curves)
    except SelfIntersecting as exc:
        logger.debug(f"System {system.name} has a self-intersecting member: {exc}")
        return system.length, exc.radius
    for i, first in enumerate(system.curves):
        for j, second in enumerate(system.curves):
            if i == j:
                continue
            rho = min_pairwise_radius(
                first.samples,
                first.frame.tangent,
                second.samples,
                rho,
                coincident=1e-9 * min(first.length, second.length),
                **pairwise_tolerances(first),
            )
    return system.length, (UNBOUNDED if math.isinf(rho) else rho)


def _count_runs(indices: np.ndarray, period: int) -> int:
    """Number of cyclically contiguous runs in sorted sample indices."""
    if len(indices) == 0:
        return 0
    runs = 1 + int(np.count_nonzero(np.diff(indices) > 1))
    if runs > 1 and indices[0] == 0 and indices[-1] == period - 1:
        runs -= 1
    return runs


def multiplicity_at(
    system: CurveSystem, point: Sequence[float], tol: Optional[float] = None
) -> int:
    """How many separate traversal passes come within ``tol`` of the point."""
    index = system.trace_index
    tol = 2.0 * system.resolution if tol is None else tol
    hits = np.asarray(index.tree.query_ball_point(np.asarray(point, dtype=float), tol), dtype=int)
    if len(hits) == 0:
        return 0
    count = 0
    for member in np.unique(index.owner[hits]):
        samples = np.sort(index.sample[hits[index.owner[hits] == member]])
        count += _count_runs(samples, system.curves[member].N)
    return count


def detect_transverse_crossings(
    system: CurveSystem, dist_tol: Optional[float] = None, angle_tol: float = 0.05
) -> List[CrossingReport]:
    """Cluster near-coincident samples from different traversal positions.

    Sample pairs closer than ``dist_tol`` are kept unless they are neighbours on
    the same curve; pair midpoints are grouped into connected clusters and each
    cluster is represented by its closest pair. The crossing angle is measured
    between the tangents, folded into [0, pi/2].
    """
    index = system.trace_index
    dist_tol = 2.0 * system.resolution if dist_tol is None else dist_tol
    pairs = index.tree.query_pairs(dist_tol, output_type="ndarray")
    if len(pairs) == 0:
        return []
    first, second = pairs[:, 0], pairs[:, 1]
    periods = np.array([curve.N for curve in system.curves])
    windows = np.array(
        [math.ceil(2.0 * dist_tol / curve.step_length) + 1 for curve in system.curves]
    )
    same = index.owner[first] == index.owner[second]
    gap = np.abs(index.sample[first] - index.sample[second])
    gap = np.minimum(gap, periods[index.owner[first]] - gap)
    keep = ~same | (gap > windows[index.owner[first]])
    first, second = first[keep], second[keep]
    if len(first) == 0:
        return []

    midpoints = 0.5 * (index.points[first] + index.points[second])
    distance = np.linalg.norm(index.points[first] - index.points[second], axis=1)
    links = cKDTree(midpoints).query_pairs(2.0 * dist_tol, output_type="ndarray")
    graph = coo_matrix(
        (np.ones(len(links)), (links[:, 0], links[:, 1])) if len(links) else ([], ([], [])),
        shape=(len(midpoints), len(midpoints)),
    )
    _, labels = connected_components(graph, directed=False)

    reports = []
    for label in np.unique(labels):
        members = np.flatnonzero(labels == label)
        order = np.lexsort(
            (midpoints[members, 1], midpoints[members, 0], distance[members])
        )
        best = members[order[0]]
        cosine = float(np.dot(index.tangents[first[best]], index.tangents[second[best]]))
        angle = math.acos(min(1.0, abs(cosine)))
        entries = []
        for member in members:
            a = (int(index.owner[first[member]]), int(index.sample[first[member]]))
            b = (int(index.owner[second[member]]), int(index.sample[second[member]]))
            entries.append((min(a, b), max(a, b)))
        reports.append(
            CrossingReport(
                location=(float(midpoints[best, 0]), float(midpoints[best, 1])),
                pairs=tuple(sorted(entries)),
                angle=angle,
                classification=TRANSVERSE if angle >= angle_tol else TANGENT,
            )
        )
    reports.sort(key=lambda report: (round(report.location[0], 9), round(report.location[1], 9)))
    logger.debug(f"System {system.name}: {len(reports)} crossing clusters")
    return reports


def has_transverse_crossing(system: CurveSystem, angle_tol: float = 0.05) -> bool:
    return any(
        report.classification == TRANSVERSE
        for report in detect_transverse_crossings(system, angle_tol=angle_tol)
    )


def systems_equivalent(
    first: CurveSystem, second: CurveSystem, tol: float, probes: int = 512
) -> bool:
    """Traces within Hausdorff distance ``tol`` and equal multiplicity at probe points."""
    a, b = first.trace_index.points, second.trace_index.points
    distance = max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0])
    if distance >= tol:
        return False
    radius = 2.0 * max(first.resolution, second.resolution)
    for points in (a, b):
        stride = max(1, len(points) // probes)
        for point in points[::stride]:
            if multiplicity_at(first, point, radius) != multiplicity_at(second, point, radius):
                return False
    return True


def load_system_manifest(path: Union[str, Path]) -> CurveSystem:
    """Build a system from a YAML manifest listing curves.

    Each entry is either ``{csv: file, samples: N}`` (relative to the manifest)
    or ``{generator: name, params: {...}}``.
    """
    from ..utils import make_curve

    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        manifest = yaml.safe_load(handle) or {}
    entries = manifest.get("curves") or []
    curves = []
    for entry in entries:
        if "csv" in entry:
            curves.append(load_curve_csv(path.parent / entry["csv"], N=entry.get("samples")))
        else:
            curves.append(make_curve(entry["generator"], entry.get("params") or {}))
    return CurveSystem(tuple(curves), name=manifest.get("name", path.stem))
