"""
Core modules for padic-polygon.

- radii_engine: convergence radii over the candidate graph
- criterion: the six-condition finiteness criterion
- audit: property audit of radii profiles
"""

from .audit import AuditReport, audit_main_theorem
from .criterion import CriterionReport, branch_bound, check_criterion
from .radii_engine import RadiiEngine, RadiiProfile, prune_to_controlling_graph

__all__ = [
    "RadiiEngine",
    "RadiiProfile",
    "prune_to_controlling_graph",
    "check_criterion",
    "CriterionReport",
    "branch_bound",
    "audit_main_theorem",
    "AuditReport",
]
