"""End-cap corrector, the end constant alpha and its explicit bounds."""

from .comparison import comparison_bound, comparison_laplacian, comparison_psi
from .harmonic import (
    AlphaEstimate,
    CapSolution,
    DecayReport,
    SingularSystem,
    alpha_constant,
    alpha_estimate,
    cap_contribution,
    decay_check,
    solve_cap_psi,
)
from .mesh import CapDomain, MeshFailure, build_cap_domain

__all__ = [
    "CapDomain",
    "MeshFailure",
    "build_cap_domain",
    "CapSolution",
    "SingularSystem",
    "solve_cap_psi",
    "AlphaEstimate",
    "alpha_estimate",
    "alpha_constant",
    "DecayReport",
    "decay_check",
    "cap_contribution",
    "comparison_psi",
    "comparison_laplacian",
    "comparison_bound",
]
