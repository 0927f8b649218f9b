"""Trial fields, expansion fits, open-curve decomposition and the rescaled functionals."""

from .decomposition import OpenNormResult, open_curve_norm
from .fitting import CurveMeta, ExpansionFit, IllConditioned, fit_expansion
from .functionals import GammaReport, g_eps, g_zero, gamma_experiment
from .profiles import SmoothedCurvature, TrialProfile, smooth_curvature, zeta_profile
from .sweeps import SweepRecord, closed_sweep, open_sweep
from .trial import trial_lower_bound, trial_upper_profile

__all__ = [
    "TrialProfile",
    "zeta_profile",
    "SmoothedCurvature",
    "smooth_curvature",
    "trial_lower_bound",
    "trial_upper_profile",
    "CurveMeta",
    "ExpansionFit",
    "IllConditioned",
    "fit_expansion",
    "OpenNormResult",
    "open_curve_norm",
    "SweepRecord",
    "closed_sweep",
    "open_sweep",
    "GammaReport",
    "g_eps",
    "g_zero",
    "gamma_experiment",
]
