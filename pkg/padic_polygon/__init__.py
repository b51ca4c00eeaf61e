"""
padic-polygon - Newton polygons and convergence radii of p-adic differential equations.

Exact computation of spectral and convergence polygons on affinoid domains
of the Berkovich affine line, controlling graphs of the radius functions,
and property audits of the results.
"""

__version__ = "0.1.0"

from .config import PolygonConfig, load_default_config
from .core.audit import AuditReport, audit_main_theorem
from .core.criterion import CriterionReport, check_criterion
from .core.radii_engine import RadiiEngine, RadiiProfile, prune_to_controlling_graph
from .errors import PadicPolygonError
from .geometry.line import AffinoidDomain, Point
from .polygons.spectral import ConnectionMatrix, DifferentialOperator
from .utils.logger import setup_logger

__all__ = [
    # Main class
    "RadiiEngine",
    "RadiiProfile",
    "prune_to_controlling_graph",
    # Checks
    "check_criterion",
    "CriterionReport",
    "audit_main_theorem",
    "AuditReport",
    # Inputs
    "DifferentialOperator",
    "ConnectionMatrix",
    "AffinoidDomain",
    "Point",
    # Configuration
    "PolygonConfig",
    "load_default_config",
    # Utilities
    "setup_logger",
    "PadicPolygonError",
]
