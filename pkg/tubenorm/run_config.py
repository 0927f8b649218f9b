"""
Run configuration for tubenorm commands.

A run is described by a single YAML (or JSON) file. The dataclasses below
mirror its sections; ``validate`` checks everything the solvers would
otherwise reject halfway through a sweep, so a bad file fails before any
artifact is written.
"""

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import yaml

from .asymptotics.fitting import validate_schedule
from .asymptotics.functionals import PERTURBATION_MODES
from .errors import TubeNormError
from .geometry.curves import (
    CLOSED,
    OPEN,
    RESAMPLE_MODES,
    Curve,
    DegenerateInput,
    MissingEta,
    TooFewPoints,
    load_curve_csv,
)
from .geometry.systems import CurveSystem, load_system_manifest
from .solver.grid import DEFAULT_NT, validate_resolution
from .solver.mapped import METHODS
from .utils import CURVE_GENERATORS, make_curve

COMMANDS = ("norm", "alpha", "fit", "rho", "gamma", "caps")
DISPLAY_TYPES = ("rich_terminal", "simple")
CONFIG_DIR = Path(__file__).parent / "configs"

# Failures while reading curve input; malformed files are configuration errors.
_INPUT_ERRORS = (
    OSError,
    ValueError,
    KeyError,
    yaml.YAMLError,
    DegenerateInput,
    TooFewPoints,
    MissingEta,
)


class ConfigurationError(TubeNormError):
    """Configuration error for a tubenorm run."""

    pass


def _expect_number(key: str, value: Any, integer: bool = False, optional: bool = False) -> None:
    if value is None and optional:
        return
    allowed = (int,) if integer else (int, float)
    if isinstance(value, bool) or not isinstance(value, allowed):
        kind = "an integer" if integer else "a number"
        raise ConfigurationError(f"{key} must be {kind}, got {value!r}")


def _expect_flag(key: str, value: Any) -> None:
    if not isinstance(value, bool):
        raise ConfigurationError(f"{key} must be true or false, got {value!r}")


@dataclass
class CurveSource:
    """Where the curve (or curve system) comes from.

    Exactly one of ``generator``, ``csv`` and ``manifest`` is set. ``params``
    are passed to the generator; ``kind``, ``eta``, ``samples`` and ``mode``
    apply to CSV input.
    """

    generator: Optional[str] = "circle"
    params: Dict[str, Any] = field(default_factory=dict)
    csv: Optional[str] = None
    manifest: Optional[str] = None
    kind: str = CLOSED
    eta: Optional[float] = None
    samples: Optional[int] = None
    mode: str = "spline"

    def validate(self) -> None:
        sources = [key for key in ("generator", "csv", "manifest") if getattr(self, key)]
        if len(sources) != 1:
            raise ConfigurationError(
                "curve: exactly one of 'generator', 'csv' or 'manifest' must be set"
            )
        if self.generator and self.generator.lower() not in CURVE_GENERATORS:
            raise ConfigurationError(
                f"curve.generator: unknown generator '{self.generator}' "
                f"(choose from {', '.join(sorted(CURVE_GENERATORS))})"
            )
        if self.kind not in (CLOSED, OPEN):
            raise ConfigurationError(f"curve.kind must be 'closed' or 'open', got '{self.kind}'")
        if self.mode not in RESAMPLE_MODES:
            raise ConfigurationError(f"curve.mode must be one of {RESAMPLE_MODES}")
        if not isinstance(self.params, dict):
            raise ConfigurationError(f"curve.params must be a mapping, got {self.params!r}")
        _expect_number("curve.eta", self.eta, optional=True)
        _expect_number("curve.samples", self.samples, integer=True, optional=True)
        if self.eta is not None and not 0.0 < self.eta < 0.25:
            raise ConfigurationError(f"curve.eta must lie in (0, 1/4), got {self.eta}")
        if self.samples is not None and self.samples < 16:
            raise ConfigurationError(f"curve.samples must be at least 16, got {self.samples}")
        for key in ("R", "a", "b", "length", "scale"):
            value = self.params.get(key)
            if value is not None and not (isinstance(value, (int, float)) and value > 0):
                raise ConfigurationError(f"curve.params.{key} must be a positive length, got {value}")

    def build(self, seed: Optional[int] = None, base: Optional[Path] = None) -> Curve:
        if self.manifest:
            raise ConfigurationError("curve.manifest describes a system; a single curve is needed")
        if self.csv:
            path = Path(self.csv)
            if base is not None and not path.is_absolute() and not path.exists():
                path = base / path
            try:
                return load_curve_csv(path, self.kind, self.eta, self.samples, self.mode)
            except _INPUT_ERRORS as exc:
                raise ConfigurationError(f"curve.csv: cannot read {path}: {exc}") from exc
        return make_curve(self.generator or "", self.params, seed)

    def build_system(self, seed: Optional[int] = None, base: Optional[Path] = None) -> CurveSystem:
        if self.manifest:
            path = Path(self.manifest)
            if base is not None and not path.is_absolute() and not path.exists():
                path = base / path
            try:
                return load_system_manifest(path)
            except _INPUT_ERRORS as exc:
                raise ConfigurationError(f"curve.manifest: cannot read {path}: {exc}") from exc
        curve = self.build(seed, base)
        return CurveSystem((curve,), name=curve.name)


@dataclass
class SolverSettings:
    """Mapped-grid solver settings. ``ns`` None picks the resolution from eps."""

    ns: Optional[int] = None
    nt: int = DEFAULT_NT
    method: str = "cg"
    rtol: float = 1e-10
    margin: float = 0.95
    extrapolate: bool = True

    @property
    def grid(self):
        return (self.ns, self.nt)


@dataclass
class CapSettings:
    L: float = 10.0
    h: float = 0.04
    L_max: float = 10.0


@dataclass
class GammaSettings:
    perturbation: Optional[str] = None
    n_values: List[int] = field(default_factory=lambda: [2, 4, 8])


@dataclass
class SweepSettings:
    threads: int = 1


@dataclass
class OutputSettings:
    dir: str = "results"
    field_dump: bool = False


@dataclass
class UiSettings:
    display_type: str = "rich_terminal"
    logging_enabled: bool = True


@dataclass
class RunConfig:
    """Complete configuration of one command run."""

    command: str = "norm"
    curve: CurveSource = field(default_factory=CurveSource)
    eps: List[float] = field(default_factory=list)
    solver: SolverSettings = field(default_factory=SolverSettings)
    cap: CapSettings = field(default_factory=CapSettings)
    gamma: GammaSettings = field(default_factory=GammaSettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    output: OutputSettings = field(default_factory=OutputSettings)
    ui: UiSettings = field(default_factory=UiSettings)
    seed: int = 0
    source_path: Optional[str] = None

    @property
    def base_dir(self) -> Optional[Path]:
        return Path(self.source_path).parent if self.source_path else None

    def validate(self) -> "RunConfig":
        """Check every setting; raises ConfigurationError naming the offending key."""
        if self.command not in COMMANDS:
            raise ConfigurationError(
                f"command must be one of {', '.join(COMMANDS)}, got '{self.command}'"
            )
        self.curve.validate()
        self._validate_eps()
        self._validate_solver()
        self._validate_cap()
        if self.gamma.perturbation not in PERTURBATION_MODES:
            raise ConfigurationError(
                f"gamma.perturbation must be empty or 'oscillation', got '{self.gamma.perturbation}'"
            )
        if not isinstance(self.gamma.n_values, list):
            raise ConfigurationError("gamma.n_values must be a list of positive integers")
        for n in self.gamma.n_values:
            _expect_number("gamma.n_values", n, integer=True)
            if n < 1:
                raise ConfigurationError("gamma.n_values must be positive integers")
        _expect_number("sweep.threads", self.sweep.threads, integer=True)
        _expect_flag("output.field_dump", self.output.field_dump)
        _expect_flag("ui.logging_enabled", self.ui.logging_enabled)
        if self.sweep.threads < 1:
            raise ConfigurationError(f"threads must be at least 1, got {self.sweep.threads}")
        if self.ui.display_type not in DISPLAY_TYPES:
            raise ConfigurationError(f"ui.display_type must be one of {DISPLAY_TYPES}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ConfigurationError(f"seed must be an integer, got {self.seed!r}")
        return self

    def _validate_eps(self) -> None:
        eps = self.eps
        if self.command in ("norm", "fit", "gamma") and not eps:
            raise ConfigurationError(f"eps: the '{self.command}' command needs a non-empty eps list")
        if any(not (isinstance(e, (int, float)) and math.isfinite(e) and e > 0) for e in eps):
            raise ConfigurationError("eps: every value must be a positive number")
        if any(later >= earlier for earlier, later in zip(eps, eps[1:])):
            raise ConfigurationError("eps: values must be strictly decreasing")
        if self.command == "fit":
            try:
                validate_schedule(eps)
            except ValueError as exc:
                raise ConfigurationError(f"eps: {exc}") from exc

    def _validate_solver(self) -> None:
        solver = self.solver
        _expect_number("solver.ns", solver.ns, integer=True, optional=True)
        _expect_number("solver.nt", solver.nt, integer=True)
        _expect_number("solver.rtol", solver.rtol)
        _expect_number("solver.margin", solver.margin)
        _expect_flag("solver.extrapolate", solver.extrapolate)
        if solver.method not in METHODS:
            raise ConfigurationError(f"solver.method must be one of {METHODS}, got '{solver.method}'")
        try:
            validate_resolution(solver.ns if solver.ns is not None else 64, solver.nt)
        except ValueError as exc:
            raise ConfigurationError(f"solver: {exc}") from exc
        if not solver.rtol > 0:
            raise ConfigurationError(f"solver.rtol must be positive, got {solver.rtol}")
        if not 0.0 < solver.margin <= 1.0:
            raise ConfigurationError(f"solver.margin must lie in (0, 1], got {solver.margin}")

    def _validate_cap(self) -> None:
        cap = self.cap
        for key in ("L", "h", "L_max"):
            _expect_number(f"cap.{key}", getattr(cap, key))
        if cap.L < 2.0 or cap.L_max < 2.0:
            raise ConfigurationError(f"cap.L and cap.L_max must be at least 2, got {cap.L}, {cap.L_max}")
        if not 0.0 < cap.h <= 0.1:
            raise ConfigurationError(f"cap.h must lie in (0, 0.1], got {cap.h}")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data.pop("source_path")
        return data

    def numeric_dict(self) -> Dict[str, Any]:
        """The settings that determine the numbers; hashed into every artifact."""
        data = self.to_dict()
        for key in ("output", "ui", "sweep"):
            data.pop(key)
        data["output"] = {"field_dump": self.output.field_dump}
        return data

    @classmethod
    def create_norm_config(
        cls, eps: Sequence[float] = (0.1, 0.05), generator: str = "circle", **params
    ) -> "RunConfig":
        """Closed-curve norm at each eps.

        Examples:
            config = RunConfig.create_norm_config([0.1], "circle", R=1.0)
        """
        return cls(command="norm", curve=CurveSource(generator, dict(params)), eps=list(eps))

    @classmethod
    def create_alpha_config(cls, L: float = 10.0, h: float = 0.04) -> "RunConfig":
        return cls(command="alpha", cap=CapSettings(L=L, h=h))

    @classmethod
    def create_fit_config(
        cls, eps: Optional[Sequence[float]] = None, generator: str = "ellipse", **params
    ) -> "RunConfig":
        if eps is None:
            eps = [0.08 * 2.0 ** (-0.5 * k) for k in range(6)]
        if not params and generator == "ellipse":
            params = {"a": 1.0, "b": 0.6, "unit_length": True}
        return cls(command="fit", curve=CurveSource(generator, dict(params)), eps=list(eps))

    @classmethod
    def create_rho_config(cls, generator: str = "circle", **params) -> "RunConfig":
        return cls(command="rho", curve=CurveSource(generator, dict(params)))

    @classmethod
    def create_gamma_config(
        cls, eps: Sequence[float] = (0.1, 0.05, 0.025), perturbation: Optional[str] = None
    ) -> "RunConfig":
        return cls(
            command="gamma",
            curve=CurveSource("circle", {}),
            eps=list(eps),
            gamma=GammaSettings(perturbation=perturbation),
        )

    @classmethod
    def create_caps_config(cls, L: float = 10.0, h: float = 0.04) -> "RunConfig":
        return cls(command="caps", cap=CapSettings(L=L, h=h))


def load_config_file(config_path: str) -> Dict[str, Any]:
    """Load configuration from YAML or JSON file."""
    path = Path(config_path)

    # Fall back to the bundled configs/ directory for bare names
    if not path.exists():
        configs_path = CONFIG_DIR / path.name
        if configs_path.exists():
            path = configs_path
        else:
            raise ConfigurationError(
                f"Configuration file not found: {config_path} (also checked {configs_path})"
            )

    try:
        with open(path, "r", encoding="utf-8") as f:
            if path.suffix.lower() in [".yaml", ".yml"]:
                data = yaml.safe_load(f)
            elif path.suffix.lower() == ".json":
                data = json.load(f)
            else:
                raise ConfigurationError(f"Unsupported config file format: {path.suffix}")
    except ConfigurationError:
        raise
    except Exception as e:
        raise ConfigurationError(f"Error reading config file: {e}")

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"Configuration root must be a mapping, got {type(data).__name__}")
    data.setdefault("_source_path", str(path))
    return data


def _section(data: Dict[str, Any], key: str, cls):
    raw = data.get(key) or {}
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{key}: expected a mapping, got {type(raw).__name__}")
    try:
        return cls(**raw)
    except TypeError as exc:
        raise ConfigurationError(f"{key}: {exc}") from exc


def dict_to_config(data: Dict[str, Any], command: Optional[str] = None) -> RunConfig:
    """Build and validate a RunConfig from a parsed configuration mapping."""
    data = dict(data)
    source_path = data.pop("_source_path", None)
    known = {"command", "curve", "eps", "solver", "cap", "gamma", "sweep", "output", "ui", "seed"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigurationError(f"unknown configuration keys: {', '.join(unknown)}")

    eps = data.get("eps") or []
    if isinstance(eps, (int, float)):
        eps = [eps]
    if not isinstance(eps, list):
        raise ConfigurationError(f"eps: expected a list of numbers, got {type(eps).__name__}")

    curve_data = dict(data.get("curve") or {})
    if ("csv" in curve_data or "manifest" in curve_data) and "generator" not in curve_data:
        curve_data["generator"] = None
    try:
        config = RunConfig(
            command=command or data.get("command", "norm"),
            curve=CurveSource(**curve_data),
            eps=[float(e) if isinstance(e, (int, float)) else e for e in eps],
            solver=_section(data, "solver", SolverSettings),
            cap=_section(data, "cap", CapSettings),
            gamma=_section(data, "gamma", GammaSettings),
            sweep=_section(data, "sweep", SweepSettings),
            output=_section(data, "output", OutputSettings),
            ui=_section(data, "ui", UiSettings),
            seed=data.get("seed", 0),
            source_path=source_path,
        )
    except TypeError as exc:
        raise ConfigurationError(f"curve: {exc}") from exc
    try:
        return config.validate()
    except (TypeError, AttributeError) as exc:
        raise ConfigurationError(f"setting has the wrong type: {exc}") from exc


def load_run_config(config_path: str, command: Optional[str] = None) -> RunConfig:
    return dict_to_config(load_config_file(config_path), command)
