"""
Piecewise-affine functions of the log-radius along a segment.

A PAF is a list of contiguous pieces (lo, hi, slope, intercept, exact) over
a closed domain [a, b], where a may be NEG_INF. Values are exact Fractions.
Pieces flagged ``exact=False`` carry a bound rather than a certified value;
continuity is only required between exact pieces. All binary operations go
through one common-refinement routine (``lift``) that cuts the domain at
every breakpoint and, when asked, at every crossing of two pieces.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from padic_polygon.arith.scalars import (
    NEG_INF,
    POS_INF,
    QLog,
    format_qlog,
    is_finite,
    to_fraction,
    to_qlog,
)
from padic_polygon.errors import PiecewiseDomainError, PreconditionError
from padic_polygon.geometry.line import DirectionId, Point

logger = logging.getLogger(__name__)

Cell = Tuple[QLog, Fraction]


@dataclass(frozen=True)
class Piece:
    """Affine piece L ↦ slope·L + intercept on [lo, hi]."""

    lo: QLog
    hi: Fraction
    slope: Fraction
    intercept: Fraction
    exact: bool = True

    def value_at(self, L: QLog) -> QLog:
        if not is_finite(L):
            if self.slope == 0:
                return self.intercept
            return L * self.slope
        return self.slope * L + self.intercept

    def same_line(self, other: "Piece") -> bool:
        return (
            self.slope == other.slope
            and self.intercept == other.intercept
            and self.exact == other.exact
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lo": format_qlog(self.lo),
            "hi": format_qlog(self.hi),
            "slope": str(self.slope),
            "intercept": str(self.intercept),
            "exact": self.exact,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Piece":
        return cls(
            to_qlog(data["lo"]),
            to_fraction(data["hi"]),
            to_fraction(data["slope"]),
            to_fraction(data["intercept"]),
            bool(data.get("exact", True)),
        )


def _interior_point(lo: QLog, hi: Fraction) -> QLog:
    """A point strictly inside [lo, hi] (or the point itself for a degenerate cell)."""
    if lo == hi:
        return hi
    if not is_finite(lo):
        return hi - 1
    return (lo + hi) / 2


@dataclass(frozen=True)
class PAF:
    """Piecewise-affine function of the log-radius on a closed segment."""

    pieces: Tuple[Piece, ...]

    def __post_init__(self):
        if not self.pieces:
            raise PiecewiseDomainError("A PAF needs at least one piece")
        for piece in self.pieces:
            if piece.lo > piece.hi:
                raise PiecewiseDomainError(f"Empty piece [{piece.lo}, {piece.hi}]")
        for left, right in zip(self.pieces, self.pieces[1:]):
            if left.hi != right.lo:
                raise PiecewiseDomainError(f"Pieces are not contiguous at {left.hi}")
            if left.exact and right.exact and left.value_at(left.hi) != right.value_at(right.lo):
                raise PiecewiseDomainError(f"Exact pieces are discontinuous at {left.hi}")

    # Construction

    @classmethod
    def from_pieces(cls, pieces: Iterable[Piece]) -> "PAF":
        """Build a PAF, merging adjacent pieces on the same line and dropping empty ones."""
        pieces = list(pieces)
        if not pieces:
            raise PiecewiseDomainError("A PAF needs at least one piece")
        if len(pieces) > 1:
            pieces = [pc for pc in pieces if pc.lo != pc.hi] or pieces[:1]
        merged: List[Piece] = [pieces[0]]
        for piece in pieces[1:]:
            last = merged[-1]
            if last.same_line(piece):
                merged[-1] = Piece(last.lo, piece.hi, last.slope, last.intercept, last.exact)
            else:
                merged.append(piece)
        return cls(tuple(merged))

    @classmethod
    def affine(
        cls, lo: QLog, hi: Fraction, slope=0, intercept=0, exact: bool = True
    ) -> "PAF":
        return cls((Piece(lo, to_fraction(hi), to_fraction(slope), to_fraction(intercept), exact),))

    @classmethod
    def constant(cls, lo: QLog, hi: Fraction, value, exact: bool = True) -> "PAF":
        return cls.affine(lo, hi, 0, value, exact)

    @classmethod
    def identity(cls, lo: QLog, hi: Fraction) -> "PAF":
        return cls.affine(lo, hi, 1, 0)

    @classmethod
    def from_points(cls, points: Sequence[Tuple[Any, Any]]) -> "PAF":
        """Interpolate finite (L, value) nodes with increasing L."""
        nodes = [(to_fraction(L), to_fraction(v)) for L, v in points]
        if len(nodes) == 1:
            L, v = nodes[0]
            return cls.constant(L, L, v)
        pieces = []
        for (L0, v0), (L1, v1) in zip(nodes, nodes[1:]):
            if L1 <= L0:
                raise PiecewiseDomainError("Interpolation nodes must increase")
            slope = (v1 - v0) / (L1 - L0)
            pieces.append(Piece(L0, L1, slope, v0 - slope * L0))
        return cls.from_pieces(pieces)

    # Queries

    @property
    def lo(self) -> QLog:
        return self.pieces[0].lo

    @property
    def hi(self) -> Fraction:
        return self.pieces[-1].hi

    @property
    def is_exact(self) -> bool:
        return all(piece.exact for piece in self.pieces)

    def breakpoints(self) -> List[Fraction]:
        return [piece.hi for piece in self.pieces[:-1]]

    def contains(self, L: QLog) -> bool:
        return self.lo <= L <= self.hi

    def _check(self, L: QLog) -> None:
        if not self.contains(L):
            raise PiecewiseDomainError(
                f"{format_qlog(L)} outside [{format_qlog(self.lo)}, {format_qlog(self.hi)}]"
            )

    def piece_at(self, L: QLog, side: str = "right") -> Piece:
        """Piece governing L from the given side; ends fall back to the only side available."""
        self._check(L)
        if side == "right":
            for piece in self.pieces:
                if piece.lo <= L < piece.hi:
                    return piece
            return self.pieces[-1]
        if side == "left":
            for piece in self.pieces:
                if piece.lo < L <= piece.hi:
                    return piece
            return self.pieces[0]
        raise PreconditionError(f"Unknown side: {side}")

    def eval(self, L: QLog) -> QLog:
        """Exact value at L."""
        return self.piece_at(L).value_at(L)

    def is_exact_at(self, L: QLog) -> bool:
        return self.piece_at(L, "left").exact and self.piece_at(L, "right").exact

    def slope_at(self, L: QLog, side: str = "right") -> Fraction:
        """
        One-sided slope at L.

        Raises:
            PiecewiseDomainError: For the right slope at b or the left slope at a
        """
        self._check(L)
        if side == "right" and L == self.hi and self.lo != self.hi:
            raise PiecewiseDomainError("No right slope at the right end of the domain")
        if side == "left" and L == self.lo and self.lo != self.hi:
            raise PiecewiseDomainError("No left slope at the left end of the domain")
        return self.piece_at(L, side).slope

    def exact_cells(self) -> List[Cell]:
        return [(pc.lo, pc.hi) for pc in self.pieces if pc.exact]

    def is_concave(self, sub: Optional[Tuple[QLog, Fraction]] = None) -> bool:
        """Slopes nonincreasing left to right on ``sub``; joins touching inexact pieces are skipped."""
        lo, hi = sub if sub is not None else (self.lo, self.hi)
        for left, right in zip(self.pieces, self.pieces[1:]):
            if not (lo < left.hi < hi):
                continue
            if left.exact and right.exact and left.slope < right.slope:
                return False
        return True

    def convexity_violations(self) -> List[Tuple[Fraction, Fraction, Fraction]]:
        """(L, left slope, right slope) at every exact join where the slope increases."""
        out = []
        for left, right in zip(self.pieces, self.pieces[1:]):
            if left.exact and right.exact and left.slope < right.slope:
                out.append((left.hi, left.slope, right.slope))
        return out

    def diagonal_crossing(self) -> QLog:
        """
        End of the initial run on which f(L) = L.

        Returns a itself when f(a) > a.

        Raises:
            PreconditionError: If f(a) < a
        """
        a = self.lo
        fa = self.eval(a)
        if fa < a:
            raise PreconditionError(f"f(a) = {format_qlog(fa)} lies below the diagonal")
        if fa > a:
            return a
        end = a
        for piece in self.pieces:
            if piece.slope == 1 and piece.intercept == 0:
                end = piece.hi
            else:
                break
        return end

    # Transformations

    def map_affine(self, scale=1, add_slope=0, add_intercept=0) -> "PAF":
        """L ↦ scale·f(L) + add_slope·L + add_intercept."""
        scale, add_slope, add_intercept = (
            to_fraction(scale),
            to_fraction(add_slope),
            to_fraction(add_intercept),
        )
        return PAF.from_pieces(
            Piece(
                pc.lo,
                pc.hi,
                scale * pc.slope + add_slope,
                scale * pc.intercept + add_intercept,
                pc.exact,
            )
            for pc in self.pieces
        )

    def negate(self) -> "PAF":
        return self.map_affine(-1)

    def rescale_argument(self, factor) -> "PAF":
        """L ↦ f(factor·L) on [a/factor, b/factor], factor > 0."""
        factor = to_fraction(factor)
        if factor <= 0:
            raise PreconditionError("Argument rescaling needs a positive factor")
        return PAF.from_pieces(
            Piece(pc.lo / factor, pc.hi / factor, pc.slope * factor, pc.intercept, pc.exact)
            for pc in self.pieces
        )

    def restrict(self, lo: QLog, hi: Fraction) -> "PAF":
        """Restriction to [lo, hi] inside the domain."""
        self._check(lo)
        self._check(hi)
        if lo > hi:
            raise PiecewiseDomainError("Empty restriction")
        out = []
        for pc in self.pieces:
            a = pc.lo if pc.lo > lo else lo
            b = pc.hi if pc.hi < hi else hi
            if a < b or (a == b and lo == hi and pc.lo <= a <= pc.hi):
                out.append(Piece(a, b, pc.slope, pc.intercept, pc.exact))
                if lo == hi:
                    break
        return PAF.from_pieces(out)

    def with_exact(self, exact: bool) -> "PAF":
        return PAF.from_pieces(
            Piece(pc.lo, pc.hi, pc.slope, pc.intercept, exact) for pc in self.pieces
        )

    # Serialisation

    def to_dict(self) -> Dict[str, Any]:
        return {
            "domain": [format_qlog(self.lo), format_qlog(self.hi)],
            "pieces": [pc.to_dict() for pc in self.pieces],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PAF":
        return cls.from_pieces(Piece.from_dict(pc) for pc in data["pieces"])

    def to_rows(self, approx: bool = False) -> List[List[str]]:
        """CSV rows (L, value, slope_right, exact) at both ends and every breakpoint."""
        nodes: List[QLog] = [self.lo] + self.breakpoints() + [self.hi]
        if self.lo == self.hi:
            nodes = [self.lo, self.hi]
        rows = []
        for k, L in enumerate(nodes):
            last = k == len(nodes) - 1
            value = self.eval(L)
            slope = "" if last else str(self.piece_at(L, "right").slope)
            exact = self.is_exact_at(L)
            row = [format_qlog(L), format_qlog(value), slope, "1" if exact else "0"]
            if approx:
                row.append(f"{float(value):.6g}" if is_finite(value) else format_qlog(value))
            rows.append(row)
        return rows


def _same_domain(functions: Sequence[PAF]) -> None:
    first = functions[0]
    for f in functions[1:]:
        if f.lo != first.lo or f.hi != first.hi:
            raise PiecewiseDomainError(
                f"Domain mismatch: [{format_qlog(first.lo)}, {first.hi}] "
                f"vs [{format_qlog(f.lo)}, {f.hi}]"
            )


def crossing(a: Piece, b: Piece) -> Optional[Fraction]:
    """Log-radius where two non-parallel lines meet."""
    if a.slope == b.slope:
        return None
    return (b.intercept - a.intercept) / (a.slope - b.slope)


def refine(functions: Sequence[PAF], crossings: Iterable[Tuple[int, int]] = ()) -> List[Cell]:
    """
    Common refinement of the functions' domains.

    Cuts at every breakpoint of every function and, for each index pair in
    ``crossings``, at the point where those two functions cross.
    """
    _same_domain(functions)
    lo, hi = functions[0].lo, functions[0].hi
    if lo == hi:
        return [(lo, hi)]
    crossings = list(crossings)
    cuts = sorted({b for f in functions for b in f.breakpoints()})
    bounds: List[QLog] = [lo] + cuts + [hi]
    cells: List[Cell] = []
    for a, b in zip(bounds, bounds[1:]):
        mid = _interior_point(a, b)
        inner = set()
        for i, j in crossings:
            x = crossing(functions[i].piece_at(mid), functions[j].piece_at(mid))
            if x is not None and a < x < b:
                inner.add(x)
        edges = [a] + sorted(inner) + [b]
        cells.extend(zip(edges, edges[1:]))
    return cells


Rule = Callable[[List[Piece], QLog], Tuple[Fraction, Fraction, bool]]


def lift(functions: Sequence[PAF], rule: Rule, crossings: Iterable[Tuple[int, int]] = ()) -> PAF:
    """
    Build a PAF cell by cell from the pieces the inputs use on each cell.

    ``rule`` receives the governing pieces and an interior log-radius and returns the
    (slope, intercept, exact) of the result on that cell.
    """
    pieces = []
    for a, b in refine(functions, crossings):
        at_L = _interior_point(a, b)
        governing = [f.piece_at(at_L) for f in functions]
        slope, intercept, exact = rule(governing, at_L)
        pieces.append(Piece(a, b, slope, intercept, exact))
    return PAF.from_pieces(pieces)


def _pick(pieces: List[Piece], at_L: QLog, lowest: bool) -> Piece:
    def key(pc: Piece):
        return (pc.value_at(at_L), pc.slope)

    return min(pieces, key=key) if lowest else max(pieces, key=key)


def combine(f: PAF, g: PAF, op: str) -> PAF:
    """
    Pointwise add, min or max of two PAFs on the same domain.

    Raises:
        PiecewiseDomainError: If the domains differ
    """
    if op == "add":
        return lift(
            [f, g],
            lambda pcs, _: (
                pcs[0].slope + pcs[1].slope,
                pcs[0].intercept + pcs[1].intercept,
                pcs[0].exact and pcs[1].exact,
            ),
        )
    if op in ("min", "max"):
        def choose(pcs: List[Piece], at_L: QLog):
            chosen = _pick(pcs, at_L, lowest=(op == "min"))
            return chosen.slope, chosen.intercept, all(pc.exact for pc in pcs)

        return lift([f, g], choose, crossings=[(0, 1)])
    raise PreconditionError(f"Unknown combine operation: {op}")


def sum_pafs(functions: Sequence[PAF]) -> PAF:
    return reduce(lambda f, g: combine(f, g, "add"), functions)


def upper_envelope(lines: Iterable[Tuple[Fraction, Fraction]], lo: QLog, hi: Fraction) -> PAF:
    """max of the affine functions slope·L + intercept over [lo, hi]."""
    affines = [PAF.affine(lo, hi, s, b) for s, b in lines]
    if not affines:
        raise PreconditionError("Envelope of no lines")
    return reduce(lambda f, g: combine(f, g, "max"), affines)


@dataclass
class BranchSlopes:
    """Outward slopes of a function in each direction out of a point."""

    at: Point
    entries: Dict[DirectionId, Fraction] = field(default_factory=dict)
    unknown: List[DirectionId] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.unknown

    def slope(self, direction: DirectionId) -> Fraction:
        return self.entries.get(direction, Fraction(0))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "at": self.at.to_dict(),
            "slopes": {str(d): str(s) for d, s in sorted(self.entries.items(), key=lambda kv: str(kv[0]))},
            "unknown": sorted(str(d) for d in self.unknown),
        }


def laplacian(bs: BranchSlopes) -> Fraction:
    """dd^c F(x): the sum of outward slopes (multiplicities are 1)."""
    return sum(bs.entries.values(), Fraction(0))


def paf_max_value(f: PAF) -> QLog:
    """Largest value over the domain (attained at a piece end)."""
    best: QLog = NEG_INF
    for pc in f.pieces:
        for L in (pc.lo, pc.hi):
            v = pc.value_at(L)
            if v > best:
                best = v
    return best


def paf_min_value(f: PAF) -> QLog:
    best: QLog = POS_INF
    for pc in f.pieces:
        for L in (pc.lo, pc.hi):
            v = pc.value_at(L)
            if v < best:
                best = v
    return best
