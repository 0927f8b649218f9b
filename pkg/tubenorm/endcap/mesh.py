"""
Triangulation of the truncated cap domain.

The cap is the half-strip (-L, 0) x (-1, 1) closed off by the right half of the
unit disc. Boundary nodes are placed along the truncation edge, the two strip
sides and the arc; interior nodes come from a square lattice anchored at the
origin, dropping points too close to the boundary. The domain is convex, so a
Delaunay triangulation of the node set conforms to it.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.spatial import Delaunay

from ..errors import TubeNormError

logger = logging.getLogger(__name__)

INTERIOR = 0
SIDE = 1
TRUNCATION = 2
ARC = 3
TAG_NAMES = {INTERIOR: "interior", SIDE: "side", TRUNCATION: "truncation", ARC: "arc"}


class MeshFailure(TubeNormError):
    """The triangulation does not cover the cap domain as required."""


@dataclass(frozen=True, eq=False)
class CapDomain:
    """Triangulated cap domain with a boundary tag per node."""

    L: float
    h: float
    nodes: np.ndarray
    triangles: np.ndarray
    tags: np.ndarray
    triangulation: Delaunay

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @cached_property
    def areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        return 0.5 * np.abs(
            (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
            - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1])
        )

    @property
    def area(self) -> float:
        return float(self.areas.sum())

    @property
    def exact_area(self) -> float:
        return 2.0 * self.L + 0.5 * math.pi

    @cached_property
    def diameters(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        edges = p - np.roll(p, 1, axis=1)
        return np.linalg.norm(edges, axis=2).max(axis=1)

    def boundary_nodes(self, tag: Optional[int] = None) -> np.ndarray:
        if tag is None:
            return np.flatnonzero(self.tags != INTERIOR)
        return np.flatnonzero(self.tags == tag)

    def integrate(self, values: np.ndarray) -> float:
        """Exact integral of the piecewise-linear interpolant of nodal values."""
        return float(self.areas @ np.asarray(values)[self.triangles].mean(axis=1))


def _boundary_points(L: float, spacing: float):
    count = math.ceil(2.0 / spacing)
    y = np.linspace(-1.0, 1.0, count + 1)
    truncation = np.column_stack([np.full_like(y, -L), y])

    count = math.ceil(L / spacing)
    x = np.linspace(-L, 0.0, count + 1)[1:]
    sides = np.vstack([np.column_stack([x, -np.ones_like(x)]), np.column_stack([x, np.ones_like(x)])])

    count = math.ceil(math.pi / spacing)
    theta = np.linspace(-0.5 * math.pi, 0.5 * math.pi, count + 1)[1:-1]
    arc = np.column_stack([np.cos(theta), np.sin(theta)])
    return truncation, sides, arc


def _lattice_points(L: float, spacing: float) -> np.ndarray:
    x = np.arange(-math.floor(L / spacing), math.floor(1.0 / spacing) + 1) * spacing
    y = np.arange(-math.floor(1.0 / spacing), math.floor(1.0 / spacing) + 1) * spacing
    X, Y = np.meshgrid(x, y, indexing="ij")
    X, Y = X.ravel(), Y.ravel()
    clearance = np.where(
        X <= 0.0,
        np.minimum(X + L, 1.0 - np.abs(Y)),
        1.0 - np.hypot(X, Y),
    )
    keep = clearance >= 0.5 * spacing - 1e-12
    return np.column_stack([X[keep], Y[keep]])


def build_cap_domain(L: float, h: float) -> CapDomain:
    """Conforming triangulation of the cap truncated at x = -L with diameters at most h.

    Raises:
        ValueError: L < 2 or h outside (0, 0.1]
        MeshFailure: the triangulation leaves nodes unused, exceeds the size
            bound, or its boundary does not match the tagged nodes
    """
    if L < 2.0:
        raise ValueError(f"truncation length must be at least 2, got {L}")
    if not 0.0 < h <= 0.1:
        raise ValueError(f"mesh size must lie in (0, 0.1], got {h}")
    spacing = 0.5 * h
    truncation, sides, arc = _boundary_points(L, spacing)
    interior = _lattice_points(L, spacing)
    nodes = np.vstack([truncation, sides, arc, interior])
    tags = np.concatenate(
        [
            np.full(len(truncation), TRUNCATION),
            np.full(len(sides), SIDE),
            np.full(len(arc), ARC),
            np.full(len(interior), INTERIOR),
        ]
    )

    triangulation = Delaunay(nodes)
    if len(triangulation.coplanar):
        raise MeshFailure(f"{len(triangulation.coplanar)} nodes were left out of the triangulation")
    triangles = triangulation.simplices
    p = nodes[triangles]
    doubled = np.abs(
        (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
        - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1])
    )
    triangles = triangles[doubled > 1e-12 * spacing**2]
    domain = CapDomain(float(L), float(h), nodes, triangles, tags, triangulation)

    if len(np.unique(triangles)) != len(nodes):
        raise MeshFailure("some nodes belong to no triangle")
    widest = float(domain.diameters.max())
    if widest > h * (1.0 + 1e-9):
        raise MeshFailure(f"element diameter {widest:.4g} exceeds mesh size {h:.4g}")
    edges = np.sort(np.vstack([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]]), axis=1)
    unique, counts = np.unique(edges, axis=0, return_counts=True)
    on_boundary = np.unique(unique[counts == 1])
    if not np.array_equal(on_boundary, domain.boundary_nodes()):
        raise MeshFailure("triangulation boundary does not match the tagged boundary nodes")

    logger.debug(
        f"Cap mesh L={L:g}, h={h:g}: {len(nodes)} nodes, {len(triangles)} triangles, "
        f"max diameter {widest:.4g}"
    )
    return domain
