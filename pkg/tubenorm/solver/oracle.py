"""Closed-form norm on an annulus, used to validate the mapped solver on circles."""

import math

from ..errors import TubeNormError


class BadRadii(TubeNormError):
    """The annulus radii are not 0 < a < b."""


def annulus_norm(a: float, b: float) -> float:
    """(pi/8) [b^4 - a^4 - (b^2 - a^2)^2 / ln(b/a)] for the annulus a < r < b."""
    if not (0 < a < b):
        raise BadRadii(f"annulus radii must satisfy 0 < a < b, got a={a}, b={b}")
    log_ratio = math.log1p((b - a) / a)
    return (math.pi / 8.0) * (b**4 - a**4 - (b**2 - a**2) ** 2 / log_ratio)


def circle_annulus_oracle(R: float, eps: float) -> float:
    """Exact norm on the eps-tube of the circle of radius R."""
    if not (0 < eps < R):
        raise BadRadii(f"tube half-width must satisfy 0 < eps < R, got eps={eps}, R={R}")
    return annulus_norm(R - eps, R + eps)


def circle_series(R: float, eps: float) -> float:
    """Small-eps expansion (4 pi / 3) R eps^3 + (4 pi / 45) eps^5 / R."""
    return (4.0 * math.pi / 3.0) * R * eps**3 + (4.0 * math.pi / 45.0) * eps**5 / R
