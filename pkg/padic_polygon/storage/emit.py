"""
Format dispatch for every result the command line writes.
"""

import logging
from typing import Any, Dict, Optional

from padic_polygon.core.radii_engine import (
    RADIUS,
    ControllingGraph,
    FunctionProfile,
    RadiiProfile,
    prune_to_controlling_graph,
)
from padic_polygon.errors import PreconditionError
from padic_polygon.geometry.line import SkeletonGraph
from padic_polygon.geometry.piecewise import PAF
from padic_polygon.manifest import RunManifest

from .csv_emitter import edge_values_to_csv, paf_to_csv, profile_to_csv
from .dot_emitter import graph_to_dot
from .json_storage import render_json

logger = logging.getLogger(__name__)

FORMATS = ("json", "dot", "csv")


def _cg_label(cg: ControllingGraph) -> str:
    return f"{'R' if cg.quantity == RADIUS else 'H'}_{cg.index}"


def _dot(obj: Any, index: int) -> str:
    if isinstance(obj, RadiiProfile):
        obj = prune_to_controlling_graph(obj, index)
    if isinstance(obj, ControllingGraph):
        return graph_to_dot(obj.graph, obj.values, f"Gamma_{_cg_label(obj)}", obj.end_points)
    if isinstance(obj, FunctionProfile):
        return graph_to_dot(obj.graph, obj.values, "profile")
    if isinstance(obj, SkeletonGraph):
        return graph_to_dot(obj)
    raise PreconditionError(f"Cannot render {type(obj).__name__} as DOT")


def _csv(obj: Any, approx: bool) -> str:
    if isinstance(obj, RadiiProfile):
        return profile_to_csv(obj, approx)
    if isinstance(obj, ControllingGraph):
        return edge_values_to_csv(obj.values, _cg_label(obj), approx)
    if isinstance(obj, FunctionProfile):
        return edge_values_to_csv(obj.values, obj.label, approx)
    if isinstance(obj, PAF):
        return paf_to_csv(obj, approx)
    raise PreconditionError(f"Cannot render {type(obj).__name__} as CSV")


def json_payload(obj: Any) -> Dict[str, Any]:
    """The dictionary written for obj in JSON output."""
    payload = obj.to_dict() if hasattr(obj, "to_dict") else obj
    if not isinstance(payload, dict):
        payload = {"result": payload}
    return payload


def emit(
    obj: Any,
    fmt: str = "json",
    manifest: Optional[RunManifest] = None,
    approx: bool = False,
    index: int = 1,
) -> bytes:
    """
    Serialise a result.

    Args:
        obj: Profile, controlling graph, report, PAF or plain dictionary
        fmt: json, dot or csv
        manifest: Embedded in JSON output
        approx: Add the float echo column to CSV output
        index: Index of the controlling graph drawn for a profile in DOT

    Returns:
        UTF-8 bytes; identical inputs give identical bytes

    Raises:
        PreconditionError: For an unknown format or an object the format cannot hold
    """
    if fmt not in FORMATS:
        raise PreconditionError(f"Unknown output format: {fmt}")
    if fmt == "json":
        text = render_json(json_payload(obj), manifest)
    elif fmt == "dot":
        text = _dot(obj, index)
    else:
        text = _csv(obj, approx)
    logger.debug(f"Emitted {type(obj).__name__} as {fmt}")
    return text.encode("utf-8")
