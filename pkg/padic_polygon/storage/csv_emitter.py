"""
CSV output of piecewise-affine profiles, for plotting.

Each function contributes one row per breakpoint plus its two ends:
(L, value, slope_right, exact), with an optional float echo column.
"""

import csv
import io
import logging
from typing import Dict, List, Sequence

from padic_polygon.core.radii_engine import RadiiProfile
from padic_polygon.geometry.line import Edge, point_key
from padic_polygon.geometry.piecewise import PAF

logger = logging.getLogger(__name__)

BASE_COLUMNS = ["L", "value", "slope_right", "exact"]


def _write(header: Sequence[str], rows: List[List[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _columns(approx: bool) -> List[str]:
    return BASE_COLUMNS + (["approx"] if approx else [])


def paf_to_csv(f: PAF, approx: bool = False) -> str:
    return _write(_columns(approx), f.to_rows(approx))


def edge_values_to_csv(values: Dict[Edge, PAF], label: str = "", approx: bool = False) -> str:
    """One block of rows per edge, edges in point order."""
    rows = []
    for edge in sorted(values, key=lambda e: point_key(e.lower)):
        for row in values[edge].to_rows(approx):
            rows.append([edge.label, label] + row)
    return _write(["edge", "function"] + _columns(approx), rows)


def profile_to_csv(profile: RadiiProfile, approx: bool = False) -> str:
    """Rows of R_1..R_r along every edge of the profile."""
    rows = []
    for edge in sorted(profile.edges, key=lambda e: point_key(e.lower)):
        data = profile.edges[edge]
        for i, f in enumerate(data.radii, start=1):
            for row in f.to_rows(approx):
                rows.append([edge.label, f"R_{i}"] + row)
    logger.debug(f"Rendered {len(rows)} CSV rows")
    return _write(["edge", "function"] + _columns(approx), rows)
