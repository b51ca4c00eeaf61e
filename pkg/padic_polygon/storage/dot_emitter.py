"""
Graphviz DOT output for skeletons and controlling graphs.

Vertices are labelled "x_{c,L}"; edges carry the slope list of the function
along them, lowest piece first, with "?" marking truncated pieces.
"""

import logging
from typing import Dict, Iterable, Optional

from padic_polygon.geometry.line import Edge, Point, SkeletonGraph, point_key
from padic_polygon.geometry.piecewise import PAF

logger = logging.getLogger(__name__)


def slope_label(f: PAF) -> str:
    parts = [f"{pc.slope}" if pc.exact else f"{pc.slope}?" for pc in f.pieces]
    return "[" + ", ".join(parts) + "]"


def graph_to_dot(
    graph: SkeletonGraph,
    values: Optional[Dict[Edge, PAF]] = None,
    name: str = "skeleton",
    end_points: Iterable[Point] = (),
) -> str:
    """
    Render a graph as a DOT digraph, edges pointing towards the root.

    Args:
        graph: Skeleton or controlling graph
        values: Optional function along each edge, used for the edge labels
        name: Graph name
        end_points: Vertices drawn as boxes

    Returns:
        DOT text ending in a newline
    """
    ends = set(end_points)
    ids = {v: f"n{k}" for k, v in enumerate(sorted(graph.vertices(), key=point_key))}
    lines = [f"digraph {name} {{"]
    for v, node in ids.items():
        shape = ", shape=box" if v in ends else ""
        lines.append(f'  {node} [label="{v.label}"{shape}];')
    for edge in sorted(graph.edges(), key=lambda e: point_key(e.lower)):
        label = ""
        if values is not None and edge in values:
            label = f' [label="{slope_label(values[edge])}"]'
        lines.append(f"  {ids[edge.lower]} -> {ids[edge.upper]}{label};")
    lines.append("}")
    logger.debug(f"Rendered {name} with {len(ids)} vertices")
    return "\n".join(lines) + "\n"
