"""Finite-difference solves of the mapped Poisson problem on tubes."""

from .defect import DefectReport, defect_order, defect_report
from .grid import MappedField, NormResult, ParamGrid, build_grid
from .mapped import NoConvergence, solve_bulk_open, solve_closed, xeps_evaluate
from .oracle import BadRadii, annulus_norm, circle_annulus_oracle

__all__ = [
    "ParamGrid",
    "MappedField",
    "NormResult",
    "build_grid",
    "solve_closed",
    "solve_bulk_open",
    "xeps_evaluate",
    "NoConvergence",
    "DefectReport",
    "defect_report",
    "defect_order",
    "BadRadii",
    "annulus_norm",
    "circle_annulus_oracle",
]
