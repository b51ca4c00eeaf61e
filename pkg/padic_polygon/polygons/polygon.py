"""
Newton polygon kernel.

Given v_0 = 0, v_1, ..., v_r (exact rationals or POS_INF), the polygon is
the lower convex hull of the half-lines {(i, y) : y >= v_i}. Heights past
the last finite ordinate are POS_INF.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Sequence, Tuple

from padic_polygon.arith.scalars import (
    POS_INF,
    QLog,
    format_qlog,
    is_finite,
    qmin,
    to_qlog,
)
from padic_polygon.errors import PolygonInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NewtonPolygon:
    """Convex polygon given by its partial heights h_0 = 0, h_1, ..., h_r."""

    heights: Tuple[QLog, ...]

    def __post_init__(self):
        if len(self.heights) < 2:
            raise PolygonInputError("A polygon needs rank at least 1")
        if self.heights[0] != 0:
            raise PolygonInputError("Polygons start at height 0")

    @property
    def rank(self) -> int:
        return len(self.heights) - 1

    def to_dict(self) -> Dict[str, Any]:
        return {"heights": [format_qlog(h) for h in self.heights]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NewtonPolygon":
        return cls(tuple(to_qlog(h) for h in data["heights"]))


def _cross(o: Tuple[int, Fraction], a: Tuple[int, Fraction], b: Tuple[int, Fraction]) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull(points: Sequence[Tuple[int, Fraction]]) -> List[Tuple[int, Fraction]]:
    """Monotone-chain lower hull of points sorted by abscissa."""
    hull: List[Tuple[int, Fraction]] = []
    for pt in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    return hull


def np_from_values(values: Sequence[Any]) -> NewtonPolygon:
    """
    Lower convex hull heights of the valuation sequence.

    Args:
        values: v_0..v_r with v_0 = 0; entries are rationals or POS_INF

    Raises:
        PolygonInputError: If the sequence is too short or v_0 != 0
    """
    v = [to_qlog(x) for x in values]
    if len(v) < 2:
        raise PolygonInputError("Need at least v_0 and v_1")
    if v[0] != 0:
        raise PolygonInputError(f"v_0 must be 0, got {format_qlog(v[0])}")
    if any(not is_finite(x) and x != POS_INF for x in v):
        raise PolygonInputError("Valuations may only be rationals or +inf")
    finite = [(i, x) for i, x in enumerate(v) if is_finite(x)]
    hull = lower_hull(finite)
    heights: List[QLog] = []
    for i in range(len(v)):
        if i > hull[-1][0]:
            heights.append(POS_INF)
            continue
        for (i0, y0), (i1, y1) in zip(hull, hull[1:] or hull):
            if i0 <= i <= i1:
                if i1 == i0:
                    heights.append(y0)
                else:
                    heights.append(y0 + (y1 - y0) * Fraction(i - i0, i1 - i0))
                break
    logger.debug(f"Hull of {len(v) - 1} values: vertices {[i for i, _ in hull]}")
    return NewtonPolygon(tuple(heights))


def slopes(np_: NewtonPolygon) -> List[QLog]:
    """s_i = h_i - h_{i-1}; infinite heights give POS_INF slopes."""
    out: List[QLog] = []
    for prev, cur in zip(np_.heights, np_.heights[1:]):
        out.append(POS_INF if not is_finite(cur) else cur - prev)
    return out


def vertices(np_: NewtonPolygon) -> List[int]:
    """Indices i with s_i < s_{i+1}, plus i = r."""
    s = slopes(np_)
    r = len(s)
    return [i for i in range(1, r + 1) if i == r or s[i - 1] < s[i]]


def heights_from_slopes(s: Sequence[QLog]) -> List[QLog]:
    """Partial sums h_0 = 0, h_i = s_1 + ... + s_i."""
    out: List[QLog] = [Fraction(0)]
    for value in s:
        out.append(out[-1] + value)
    return out


def truncate_slopes(s: Sequence[QLog], C: QLog) -> List[QLog]:
    """s'_i = min(s_i, C)."""
    return [qmin(value, C) for value in s]
