#!/usr/bin/env python3
"""
tubenorm Command Line Interface

Runs one experiment per invocation from a YAML/JSON run configuration and
writes deterministic JSON/CSV artifacts plus a session log.

Usage examples:
    # Norm of the eps-tube around the unit circle
    python -m tubenorm.cli norm --config circle_norm.yaml

    # End constant alpha on two mesh levels
    python -m tubenorm.cli alpha --config alpha.yaml --out results/alpha

    # Expansion fit on an ellipse, four sweep workers
    python -m tubenorm.cli fit --config ellipse_fit.yaml --threads 4
"""

import argparse
import logging
import math
import os
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from dotenv import load_dotenv

from .asymptotics.fitting import CurveMeta, fit_expansion
from .asymptotics.functionals import gamma_experiment
from .asymptotics.decomposition import open_curve_norm
from .asymptotics.sweeps import closed_sweep, open_sweep
from .endcap.comparison import arc_margin, comparison_bound, comparison_laplacian
from .endcap.harmonic import (
    alpha_constant,
    alpha_estimate,
    decay_check,
    phi,
    phi_integral,
    solve_cap_psi,
)
from .endcap.mesh import build_cap_domain
from .errors import TubeNormError
from .frontend.displays import BaseDisplay, create_display
from .frontend.logging import ArtifactWriter, RunLogManager
from .frontend.plot_script import render_plot_script
from .geometry.curves import (
    Curve,
    SelfIntersecting,
    elastica_energy,
    global_radius,
    turning_number,
)
from .geometry.systems import CurveSystem, detect_transverse_crossings, system_metrics
from .run_config import COMMANDS, ConfigurationError, RunConfig, load_run_config
from .solver.mapped import solve_closed
from .solver.oracle import circle_annulus_oracle
from .utils import config_hash, format_float, versions

logger = logging.getLogger("tubenorm.cli")

OUTPUT_ENV = "TUBENORM_OUTPUT_DIR"
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_INTERRUPTED = 130


class RunContext:
    """What a command handler needs: config, writer, display and session log."""

    def __init__(
        self,
        config: RunConfig,
        writer: ArtifactWriter,
        display: BaseDisplay,
        log_manager: RunLogManager,
    ):
        self.config = config
        self.writer = writer
        self.display = display
        self.log_manager = log_manager

    def progress(self, message: str, eps: Optional[float] = None, value: Optional[float] = None, wall_time: float = 0.0):
        self.display.update_progress(message)
        if eps is not None and value is not None:
            self.log_manager.log_solve(eps, value, wall_time)


def curve_summary(curve: Curve) -> Dict[str, Any]:
    summary: Dict[str, Any] = {
        "name": curve.name,
        "kind": curve.kind,
        "length": curve.length,
        "samples": curve.N,
        "eta": curve.eta,
        "elastica": elastica_energy(curve),
        "reoriented": curve.reoriented,
    }
    if curve.is_closed:
        summary["turning_number"] = turning_number(curve)
    return summary


def _circle_radius(config: RunConfig, curve: Curve) -> Optional[float]:
    """Radius when the run is on a single-turn generated circle (oracle available)."""
    if config.curve.generator != "circle" or curve.name != "circle":
        return None
    return curve.length / (2.0 * math.pi)


def run_norm(ctx: RunContext, curve: Curve) -> Dict[str, Any]:
    config = ctx.config
    solver = config.solver
    radius = _circle_radius(config, curve)
    solves: List[Dict[str, Any]] = []
    for eps in config.eps:
        if curve.is_closed:
            field, result = solve_closed(
                curve,
                eps,
                solver.grid,
                method=solver.method,
                rtol=solver.rtol,
                margin=solver.margin,
                extrapolate=solver.extrapolate,
            )
            entry = {"eps": eps, **result.to_dict()}
            value, wall_time = result.best, result.wall_time
            if config.output.field_dump:
                ctx.writer.write_csv(f"field_{format_float(eps)}.csv", ["s", "t", "f"], field.to_rows())
        else:
            open_result = open_curve_norm(
                curve,
                eps,
                solver.grid,
                config.cap.h,
                config.cap.L_max,
                method=solver.method,
                margin=solver.margin,
            )
            entry = {**open_result.to_dict(), "best": open_result.total}
            value, wall_time = open_result.total, open_result.wall_time
        if radius is not None and eps < radius:
            oracle = circle_annulus_oracle(radius, eps)
            entry["oracle"] = oracle
            entry["relative_error"] = abs(value - oracle) / oracle
        solves.append(entry)
        ctx.progress(f"eps={eps:g}: {value:.12g} ({wall_time:.2f}s)", eps, value, wall_time)

    header = ["eps", "best", "norm_sq", "extrapolated", "Ns", "Nt", "residual", "oracle", "relative_error"]
    rows = [
        [
            entry["eps"],
            entry["best"],
            entry.get("norm_sq", entry.get("total")),
            entry.get("extrapolated"),
            entry["grid"][0],
            entry["grid"][1],
            entry.get("residual"),
            entry.get("oracle"),
            entry.get("relative_error"),
        ]
        for entry in solves
    ]
    ctx.writer.write_csv("norm.csv", header, rows)
    ctx.display.show_table("Tube norms", ["eps", "norm", "oracle"], [[r[0], r[1], r[7] if r[7] is not None else "-"] for r in rows])
    result = {"curve": curve_summary(curve), "solves": solves}
    ctx.writer.write_json("norm.json", result)
    return result


def run_alpha(ctx: RunContext) -> Dict[str, Any]:
    cap = ctx.config.cap
    estimate = alpha_estimate(cap.h, cap.L)
    for solution in (estimate.coarse, estimate.fine):
        ctx.progress(f"h={solution.h:g}: alpha {solution.alpha_estimate:.9f} ({solution.wall_time:.2f}s)")
    bound = comparison_bound()
    result = {**estimate.to_dict(), "lower_bound": bound.alpha_lower_bound}
    rows = [
        [s.L, s.h, s.domain.node_count, s.integral_psi, s.alpha_estimate]
        for s in (estimate.coarse, estimate.fine)
    ]
    ctx.writer.write_csv("alpha.csv", ["L", "h", "nodes", "integral_psi", "alpha"], rows)
    if ctx.config.output.field_dump:
        ctx.writer.write_csv("psi.csv", ["x", "y", "psi"], estimate.fine.to_rows())
    ctx.writer.write_json("alpha.json", result)
    ctx.display.show_result(
        "End constant",
        {"alpha": estimate.alpha, "error budget": estimate.error_budget, "lower bound": bound.alpha_lower_bound},
    )
    return result


def run_fit(ctx: RunContext, curve: Curve) -> Dict[str, Any]:
    config = ctx.config
    solver = config.solver
    threads = config.sweep.threads
    if curve.is_closed:
        records = closed_sweep(
            curve, config.eps, solver.grid, solver.method, solver.rtol, solver.margin, threads
        )
        alpha = None
    else:
        records = open_sweep(
            curve,
            config.eps,
            solver.grid,
            config.cap.h,
            config.cap.L_max,
            solver.method,
            solver.margin,
            threads,
        )
        alpha, _ = alpha_constant(config.cap.h, config.cap.L)
    for record in records:
        ctx.progress(f"eps={record.eps:g}: {record.norm_sq:.12g}", record.eps, record.norm_sq, record.wall_time)

    meta = CurveMeta.from_curve(curve, alpha)
    fit = fit_expansion([(r.eps, r.norm_sq) for r in records], meta)
    sanity = fit_expansion([(r.eps, r.norm_sq) for r in records], meta, free_leading=True)

    ctx.writer.write_csv(
        "records.csv",
        ["eps", "norm_sq", "raw", "Ns", "Nt", "residual"],
        [[r.eps, r.norm_sq, r.raw, r.Ns, r.Nt, r.residual] for r in records],
    )
    result = {"curve": curve_summary(curve), "fit": fit.to_dict(), "sanity": sanity.to_dict()}
    ctx.writer.write_json("fit.json", result)
    ctx.writer.write_text("fit.gp", render_plot_script(fit, "fit.png"))
    shown = {key: value for key, value in sorted(fit.coefficients.items())}
    shown.update({f"gap {key}": value for key, value in sorted(fit.relative_gaps.items())})
    shown["slope"] = fit.slope if fit.slope is not None else "n/a"
    ctx.display.show_result(f"Expansion fit ({curve.name})", shown)
    return result


def _member_radius(curve: Curve) -> Dict[str, Any]:
    try:
        radius: Any = global_radius(curve)
        intersecting = False
    except SelfIntersecting as exc:
        radius, intersecting = exc.radius, True
    return {**curve_summary(curve), "rho": radius, "self_intersecting": intersecting}


def _write_rho_report(
    ctx: RunContext,
    name: str,
    length: float,
    rho: Any,
    members: List[Dict[str, Any]],
    crossings: List[Any],
) -> Dict[str, Any]:
    transverse = [c for c in crossings if c.classification == "transverse"]
    checks = [
        {"eps": eps, "admissible": bool(float(rho) >= eps and not transverse)}
        for eps in ctx.config.eps
    ]
    result = {
        "system": name,
        "length": length,
        "rho": rho,
        "members": members,
        "crossings": [c.to_dict() for c in crossings],
        "transverse": bool(transverse),
        "admissible": checks,
    }
    ctx.writer.write_json("rho.json", result)
    ctx.display.show_result(
        f"Global radius ({name})",
        {"length": length, "rho": float(rho), "crossings": len(crossings), "transverse": bool(transverse)},
    )
    return result


def run_rho(ctx: RunContext, system: CurveSystem) -> Dict[str, Any]:
    length, rho = system_metrics(system)
    members = [_member_radius(curve) for curve in system.curves]
    return _write_rho_report(
        ctx, system.name, length, rho, members, detect_transverse_crossings(system)
    )


def run_open_rho(ctx: RunContext, curve: Curve) -> Dict[str, Any]:
    """Global radius of one open curve; crossings are only classified for closed systems."""
    member = _member_radius(curve)
    return _write_rho_report(ctx, curve.name, curve.length, member["rho"], [member], [])


def run_gamma(ctx: RunContext, system: CurveSystem) -> Dict[str, Any]:
    config = ctx.config
    report = gamma_experiment(
        system,
        config.eps,
        config.gamma.perturbation,
        tuple(config.gamma.n_values),
        config.solver.grid,
        config.solver.method,
        config.sweep.threads,
    )
    for entry in report.schedule:
        ctx.progress(f"eps={entry['eps']:g}: G_eps {entry['g_eps']:.9g}", entry["eps"], entry["g_eps"])
    result = report.to_dict()
    ctx.writer.write_csv(
        "gamma.csv",
        ["eps", "g_eps", "gap_line", "gap_weighted"],
        [[e["eps"], e["g_eps"], e["gap_line"], e["gap_weighted"]] for e in report.schedule],
    )
    ctx.writer.write_json("gamma.json", result)
    ctx.display.show_table(
        f"Rescaled functional ({system.name})",
        ["eps", "G_eps", "gap line", "gap weighted"],
        [[e["eps"], e["g_eps"], e["gap_line"], e["gap_weighted"]] for e in report.schedule],
    )
    return result


def run_caps(ctx: RunContext) -> Dict[str, Any]:
    config = ctx.config
    domain = build_cap_domain(config.cap.L, config.cap.h)
    solution = solve_cap_psi(domain)
    ctx.progress(f"cap solve: int psi {solution.integral_psi:.9f} ({solution.wall_time:.2f}s)")
    decay = decay_check(solution)
    bound = comparison_bound()

    rng = np.random.default_rng(config.seed)
    x = rng.uniform(-config.cap.L, 0.0, 100)
    y = rng.uniform(-1.0, 1.0, 100)
    laplacian = float(np.abs(comparison_laplacian(x, y)).max())
    result = {
        "mesh": {
            "L": domain.L,
            "h": domain.h,
            "nodes": domain.node_count,
            "triangles": len(domain.triangles),
            "area": domain.area,
            "exact_area": domain.exact_area,
        },
        "phi_integral": {
            "closed_form": phi_integral(domain.L),
            "mesh": domain.integrate(phi(domain.nodes[:, 0], domain.nodes[:, 1])),
        },
        "integral_psi": solution.integral_psi,
        "alpha_estimate": solution.alpha_estimate,
        "decay": decay.to_dict(),
        "comparison": {
            "integral_tilde_psi": bound.integral_tilde_psi,
            "alpha_lower_bound": bound.alpha_lower_bound,
            "positive": bound.positive,
            "arc_margin": arc_margin(),
            "max_abs_laplacian": laplacian,
            "below_estimate": bound.alpha_lower_bound <= solution.alpha_estimate,
        },
    }
    ctx.writer.write_json("caps.json", result)
    ctx.display.show_result(
        "Cap verification",
        {
            "int psi": solution.integral_psi,
            "int comparison": bound.integral_tilde_psi,
            "decay within bounds": decay.within_bounds,
            "comparison positive": bound.positive,
        },
    )
    return result


def resolve_output_dir(cli_out: Optional[str], config: RunConfig) -> Path:
    """--out, then TUBENORM_OUTPUT_DIR (environment or .env), then output.dir."""
    load_dotenv()
    if cli_out:
        return Path(cli_out)
    env_dir = os.getenv(OUTPUT_ENV)
    if env_dir:
        return Path(env_dir)
    return Path(config.output.dir or "results")


def run(config: RunConfig, out_dir: Path, non_blocking: bool = False) -> Dict[str, Any]:
    """Execute one validated configuration and write its artifacts into ``out_dir``.

    Curve inputs are built before the session directory exists, so unreadable
    input leaves nothing behind.
    """
    curve: Optional[Curve] = None
    system: Optional[CurveSystem] = None
    base = config.base_dir
    if config.command in ("norm", "fit"):
        curve = config.curve.build(config.seed, base)
    elif config.command == "rho" and not config.curve.manifest:
        # a single open curve has a global radius but no system metrics
        curve = config.curve.build(config.seed, base)
        if curve.is_closed:
            system, curve = CurveSystem((curve,), name=curve.name), None
    elif config.command in ("rho", "gamma"):
        system = config.curve.build_system(config.seed, base)

    reoriented = False
    if curve is not None:
        reoriented = curve.reoriented
    elif system is not None:
        reoriented = any(member.reoriented for member in system.curves)
    envelope = {
        "command": config.command,
        "config_hash": config_hash(config.numeric_dict()),
        "seed": config.seed,
        "versions": versions(),
        "reoriented": reoriented,
    }

    log_manager = RunLogManager(
        out_dir / "logs", non_blocking=non_blocking or not config.ui.logging_enabled
    )
    display = create_display(config.ui.display_type, config.command)
    try:
        writer = ArtifactWriter(out_dir, envelope, log_manager)
        ctx = RunContext(config, writer, display, log_manager)

        display.initialize(
            {"curve": curve.name if curve else (system.name if system else "cap"), "eps": config.eps or "-"},
            None if log_manager.non_blocking else str(log_manager.session_dir),
        )
        started = time.perf_counter()
        logger.info(f"🚀 Running {config.command}")
        if config.command == "norm":
            result = run_norm(ctx, curve)
        elif config.command == "alpha":
            result = run_alpha(ctx)
        elif config.command == "fit":
            result = run_fit(ctx, curve)
        elif config.command == "rho":
            result = run_rho(ctx, system) if system is not None else run_open_rho(ctx, curve)
        elif config.command == "gamma":
            result = run_gamma(ctx, system)
        else:
            result = run_caps(ctx)
        logger.info(f"✅ {config.command} finished in {time.perf_counter() - started:.2f}s")
        display.show_artifacts([str(path) for path in writer.written])
        return result
    except BaseException as exc:
        log_manager.log_failure(exc)
        raise
    finally:
        display.cleanup()
        log_manager.cleanup()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tubenorm",
        description="tubenorm - H^-1 norms of one on thin tubes around plane curves",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Norm on the eps-tube of the unit circle, compared with the annulus formula
  tubenorm norm --config circle_norm.yaml

  # End constant alpha with the bundled settings (L=10, h=0.04)
  tubenorm alpha

  # Expansion fit with four sweep workers, artifacts into results/fit
  tubenorm fit --config ellipse_fit.yaml --threads 4 --out results/fit

  # Limit experiment along oscillating perturbations
  tubenorm gamma --config gamma_oscillation.yaml

Environment Variables:
    TUBENORM_OUTPUT_DIR - Output directory when --out is not given (read from .env too)

Exit status: 0 success, 2 invalid configuration, 3 solver failure, 130 interrupted.
        """,
    )
    parser.add_argument("command", choices=COMMANDS, help="Experiment to run")
    parser.add_argument("--config", type=str, help="Path to YAML/JSON run configuration")
    parser.add_argument("--out", type=str, help="Output directory for artifacts and logs")
    parser.add_argument("--threads", type=int, help="Worker threads for eps sweeps")
    parser.add_argument("--verbose", action="store_true", help="Log solver internals (DEBUG)")
    parser.add_argument("--no-display", action="store_true", help="Plain text output instead of Rich panels")
    parser.add_argument("--no-logs", action="store_true", help="Disable session log files")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    if args.config:
        config = load_run_config(args.config, args.command)
    else:
        factory = getattr(RunConfig, f"create_{args.command}_config")
        config = factory()
        config.command = args.command
    if args.threads is not None:
        config.sweep.threads = args.threads
    if args.no_display:
        config.ui.display_type = "simple"
    if args.no_logs:
        config.ui.logging_enabled = False
    return config.validate()


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(levelname)s - %(message)s",
    )

    try:
        config = load_config(args)
    except ConfigurationError as e:
        print(f"❌ Configuration error: {e}", flush=True)
        return EXIT_CONFIG

    out_dir = resolve_output_dir(args.out, config)
    try:
        run(config, out_dir)
    except KeyboardInterrupt:
        print("\n👋 Interrupted", flush=True)
        return EXIT_INTERRUPTED
    except ConfigurationError as e:
        print(f"❌ Configuration error: {e}", flush=True)
        return EXIT_CONFIG
    except (TubeNormError, ValueError) as e:
        print(f"❌ Solver error: {e}", flush=True)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
