"""
Shared helpers: curve generator registry, float normalisation for artifacts,
config hashing and version stamps.
"""

import hashlib
import json
import math
from typing import Any, Callable, Dict, Mapping, Optional

import numpy as np

from . import __version__
from .geometry import generators
from .geometry.curves import Curve, Unbounded

SIGNIFICANT_DIGITS = 12

CURVE_GENERATORS: Dict[str, Callable[..., Curve]] = {
    "circle": generators.circle,
    "ellipse": generators.ellipse,
    "lemniscate": generators.lemniscate,
    "perturbed_circle": generators.perturbed_circle,
    "random_perturbed_circle": generators.random_perturbed_circle,
    "straight_segment": generators.straight_segment,
    "straight_ended_curve": generators.straight_ended_curve,
}


def get_generator_from_name(name: str) -> Callable[..., Curve]:
    """
    Look up a curve generator by its registry name.

    Args:
        name: Generator name (e.g., "circle", "ellipse", "straight_ended_curve")

    Returns:
        The generator callable
    """
    if not name:
        raise ValueError("Generator name must not be empty")
    try:
        return CURVE_GENERATORS[name.lower()]
    except KeyError:
        raise ValueError(f"Unknown curve generator: {name}") from None


def make_curve(
    name: str, params: Optional[Mapping[str, Any]] = None, seed: Optional[int] = None
) -> Curve:
    """Build a curve from a generator name and keyword parameters.

    ``scale`` rescales the result; the random generator draws from ``seed``.
    """
    generator = get_generator_from_name(name)
    kwargs = dict(params or {})
    scale = kwargs.pop("scale", None) if name != "lemniscate" else None
    unit_length = kwargs.pop("unit_length", False)
    if generator is generators.random_perturbed_circle:
        kwargs["rng"] = np.random.default_rng(seed)
    if "center" in kwargs:
        kwargs["center"] = tuple(kwargs["center"])
    curve = generator(**kwargs)
    if unit_length:
        curve = curve.scaled(1.0 / curve.length)
    if scale is not None:
        curve = curve.scaled(float(scale))
    return curve


def format_float(value: float) -> str:
    """Render a float through 12 significant digits; infinities as "inf"/"-inf"."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def normalise(value: Any) -> Any:
    """Make a result tree JSON-safe and deterministic.

    Floats are rounded to 12 significant digits, non-finite floats become
    strings, numpy scalars and arrays become plain Python values.
    """
    if isinstance(value, Unbounded):
        return "unbounded"
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return format_float(value)
        return float(format_float(value))
    if isinstance(value, np.ndarray):
        return [normalise(item) for item in value.tolist()]
    if isinstance(value, Mapping):
        return {str(key): normalise(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalise(item) for item in value]
    return value


def canonical_json(value: Any) -> str:
    return json.dumps(normalise(value), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_hash(config: Mapping[str, Any]) -> str:
    """sha256 of the canonical JSON form of a validated configuration."""
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


def versions() -> Dict[str, str]:
    import scipy

    return {"tubenorm": __version__, "numpy": np.__version__, "scipy": scipy.__version__}
