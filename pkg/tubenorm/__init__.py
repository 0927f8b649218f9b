"""
tubenorm - H^-1 norms of one on thin tubes around plane curves

Numerical toolkit for the small-eps behaviour of the squared H^-1 norm of the
constant function 1 on the eps-tube around a plane curve: a length term of
order eps^3, an end term 2 alpha eps^4 for open curves with straight ends and
a curvature term (2/45) eps^5 int kappa^2, together with the rescaled
functional whose limit is the elastica energy.

Key Features:
- Arclength curves with frames, curvature, global radius and curve systems
- Mapped finite-difference solver on tubes with Richardson extrapolation
- Finite-element end-cap corrector and the universal end constant alpha
- Trial-field lower bounds, expansion fits and limit experiments
- CLI with YAML run configurations and deterministic JSON/CSV artifacts

Usage:
    from tubenorm import circle, solve_closed, circle_annulus_oracle

    curve = circle(R=1.0, N=256)
    field, result = solve_closed(curve, 0.1, grid=(512, 65))
    print(result.best, circle_annulus_oracle(1.0, 0.1))
"""

__version__ = "0.1.0"
__author__ = "tubenorm Contributors"

from .asymptotics import (
    ExpansionFit,
    fit_expansion,
    g_eps,
    g_zero,
    gamma_experiment,
    open_curve_norm,
    trial_lower_bound,
)
from .endcap import alpha_constant, build_cap_domain, solve_cap_psi
from .errors import IoFailure, TubeNormError
from .geometry import (
    Curve,
    CurveSystem,
    curvature_profile,
    elastica_energy,
    global_radius,
    resample_arclength,
)
from .geometry.generators import circle, ellipse, straight_ended_curve
from .solver import circle_annulus_oracle, solve_bulk_open, solve_closed, xeps_evaluate

__all__ = [
    # Geometry
    "Curve",
    "CurveSystem",
    "resample_arclength",
    "curvature_profile",
    "elastica_energy",
    "global_radius",
    "circle",
    "ellipse",
    "straight_ended_curve",
    # Solver
    "solve_closed",
    "solve_bulk_open",
    "xeps_evaluate",
    "circle_annulus_oracle",
    # End cap
    "build_cap_domain",
    "solve_cap_psi",
    "alpha_constant",
    # Asymptotics
    "trial_lower_bound",
    "fit_expansion",
    "ExpansionFit",
    "open_curve_norm",
    "g_eps",
    "g_zero",
    "gamma_experiment",
    # Errors
    "TubeNormError",
    "IoFailure",
    # Metadata
    "__version__",
    "__author__",
]
