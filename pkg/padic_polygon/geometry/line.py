"""
Combinatorial model of the Berkovich affine line over a p-adic field.

Points are closed-disk seminorms x_{c,L} with a rational center c and a
log-radius L (NEG_INF for type-1 points). Affinoid domains are a closed
outer disk minus finitely many open holes. Skeletons and candidate graphs
are finite rooted trees kept in a ``networkx.DiGraph`` whose edges point
from the lower (smaller) endpoint to its parent.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Any, Dict, Iterable, List, Optional, Set, Tuple, Union

import networkx as nx

from padic_polygon.arith.scalars import (
    NEG_INF,
    PrimeLike,
    QLog,
    RationalLike,
    as_prime,
    format_qlog,
    is_finite,
    log_distance,
    padic_valuation,
    qmax,
    qmin,
    to_fraction,
    to_qlog,
)
from padic_polygon.errors import DomainMembershipError, PreconditionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Point:
    """Berkovich point x_{c,L}: closed disk of log-radius L around c."""

    center: Fraction
    log_radius: QLog

    @classmethod
    def of(cls, center: RationalLike, log_radius: Union[RationalLike, Any]) -> "Point":
        return cls(to_fraction(center), to_qlog(log_radius))

    @classmethod
    def type1(cls, center: RationalLike) -> "Point":
        return cls(to_fraction(center), NEG_INF)

    @property
    def is_type1(self) -> bool:
        return not is_finite(self.log_radius)

    @property
    def label(self) -> str:
        return f"x_{{{self.center},{format_qlog(self.log_radius)}}}"

    def to_dict(self) -> Dict[str, str]:
        return {"center": str(self.center), "log_radius": format_qlog(self.log_radius)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Point":
        return cls.of(data["center"], data["log_radius"])

    def __str__(self) -> str:
        return self.label


def point_key(x: Point) -> Tuple[QLog, Fraction]:
    """Deterministic sort key: by log-radius, then center."""
    return (x.log_radius, x.center)


def canonical_residue(z: RationalLike, k: int, p: PrimeLike) -> Fraction:
    """
    Return the canonical representative of z modulo p^k.

    The representative is the truncated p-adic expansion of z below p^k, so
    z ≡ z' (mod p^k) iff both give the same result. k may be negative.
    """
    p = as_prime(p)
    z = to_fraction(z)
    if z == 0:
        return Fraction(0)
    v = padic_valuation(z, p)
    if v >= k:
        return Fraction(0)
    e = -v if v < 0 else 0
    scaled = z * Fraction(p) ** e
    modulus = p ** (k + e)
    unit_part = (scaled.numerator * pow(scaled.denominator, -1, modulus)) % modulus
    return Fraction(unit_part, p**e)


def canonical_point(x: Point, p: PrimeLike) -> Point:
    """Return x with its center replaced by the canonical disk representative."""
    if x.is_type1:
        return x
    return Point(canonical_residue(x.center, math.ceil(-x.log_radius), p), x.log_radius)


def point_eq(x: Point, y: Point, p: PrimeLike) -> bool:
    """Two points are equal iff they define the same closed disk."""
    if x.log_radius != y.log_radius:
        return False
    return log_distance(x.center, y.center, p) <= x.log_radius


def dominates(upper: Point, lower: Point, p: PrimeLike) -> bool:
    """True iff the closed disk of ``lower`` lies inside the closed disk of ``upper``."""
    if lower.log_radius > upper.log_radius:
        return False
    if upper.is_type1:
        return lower.is_type1 and lower.center == upper.center
    return log_distance(upper.center, lower.center, p) <= upper.log_radius


def lambda_point(x: Point, log_radius: QLog) -> Point:
    """Return λ_x(L') = x_{c, max(L, L')}."""
    return Point(x.center, qmax(x.log_radius, log_radius))


def generic_radius(x: Point) -> QLog:
    """Generic radius r(x); for rational centers it is the log-radius itself."""
    return x.log_radius


@dataclass(frozen=True)
class AffinoidDomain:
    """
    X = D^+(c_0, L_0) minus the open holes D^-(c_i, L_i).

    Holes keep their input order so a domain file re-serialises unchanged.
    """

    outer_center: Fraction
    outer_log_radius: Fraction
    holes: Tuple[Tuple[Fraction, Fraction], ...] = ()

    @classmethod
    def disk(cls, center: RationalLike = 0, log_radius: RationalLike = 0) -> "AffinoidDomain":
        return cls(to_fraction(center), to_fraction(log_radius), ())

    @classmethod
    def build(
        cls,
        outer: Tuple[RationalLike, RationalLike],
        holes: Iterable[Tuple[RationalLike, RationalLike]] = (),
    ) -> "AffinoidDomain":
        hole_list = [(to_fraction(c), to_fraction(L)) for c, L in holes]
        return cls(to_fraction(outer[0]), to_fraction(outer[1]), tuple(hole_list))

    @property
    def root(self) -> Point:
        return Point(self.outer_center, self.outer_log_radius)

    @property
    def hole_points(self) -> List[Point]:
        return [Point(c, L) for c, L in self.holes]

    def boundary_points(self, p: PrimeLike) -> List[Point]:
        """∂X: the outer boundary point and the hole boundary points, canonical."""
        pts = [canonical_point(self.root, p)]
        for hole in self.hole_points:
            cp = canonical_point(hole, p)
            if cp not in pts:
                pts.append(cp)
        return pts

    def validate(self, p: PrimeLike) -> "AffinoidDomain":
        """
        Check the affinoid invariants for the prime p.

        Raises:
            DomainMembershipError: If a hole leaves the outer disk or two holes overlap
        """
        for c, L in self.holes:
            if L > self.outer_log_radius:
                raise DomainMembershipError(
                    f"Hole x_{{{c},{L}}} is larger than the outer disk"
                )
            if log_distance(c, self.outer_center, p) > self.outer_log_radius:
                raise DomainMembershipError(f"Hole center {c} lies outside the outer disk")
        for (c1, L1), (c2, L2) in combinations(self.holes, 2):
            if log_distance(c1, c2, p) < max(L1, L2):
                raise DomainMembershipError(
                    f"Holes around {c1} and {c2} are not disjoint"
                )
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "outer": {"center": str(self.outer_center), "log_radius": str(self.outer_log_radius)},
            "holes": [{"center": str(c), "log_radius": str(L)} for c, L in self.holes],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AffinoidDomain":
        outer = data["outer"]
        return cls.build(
            (outer["center"], outer["log_radius"]),
            [(h["center"], h["log_radius"]) for h in data.get("holes", [])],
        )


def is_member(x: Point, X: AffinoidDomain, p: PrimeLike) -> bool:
    """
    Membership of x_{c,L} in X.

    x is in X iff its disk lies in the outer disk and, for every hole, x is
    not strictly inside that hole (L < L_i and |c - c_i| < L_i).
    """
    if x.log_radius > X.outer_log_radius:
        return False
    if log_distance(x.center, X.outer_center, p) > X.outer_log_radius:
        return False
    for c, L in X.holes:
        if x.log_radius < L and log_distance(x.center, c, p) < L:
            return False
    return True


def require_member(x: Point, X: AffinoidDomain, p: PrimeLike) -> None:
    if not is_member(x, X, p):
        raise DomainMembershipError(f"Point {x.label} is not in the domain")


def maximal_radius(x: Point, X: AffinoidDomain, p: PrimeLike) -> QLog:
    """
    Log-radius ρ_{x,X} of the largest open disk in X containing a lift of x.

    Equals min(L_0, min_i max(|c - c_i|, L)); on Γ_X it is r(x) itself.

    Raises:
        DomainMembershipError: If x is not in X
    """
    require_member(x, X, p)
    result: QLog = X.outer_log_radius
    for c, _ in X.holes:
        result = qmin(result, qmax(log_distance(x.center, c, p), x.log_radius))
    return result


def on_skeleton(x: Point, X: AffinoidDomain, p: PrimeLike) -> bool:
    """True iff x lies on Γ_X (the path from some hole boundary, or the root itself)."""
    if point_eq(canonical_point(x, p), canonical_point(X.root, p), p):
        return True
    return any(dominates(x, hole, p) for hole in X.hole_points)


def skeleton_valence(x: Point, X: AffinoidDomain, p: PrimeLike) -> int:
    """N_X(x): number of directions of Γ_X out of x (0 when Γ_X is a single point)."""
    if not on_skeleton(x, X, p):
        return 0
    directions: Set["DirectionId"] = set()
    if not point_eq(canonical_point(x, p), canonical_point(X.root, p), p):
        directions.add(INFINITY)
    for hole in X.hole_points:
        if dominates(x, hole, p) and not point_eq(x, hole, p):
            directions.add(direction_of(x, hole.center, p))
    return len(directions)


def minimal_triangulation(X: AffinoidDomain, p: PrimeLike) -> List[Point]:
    """
    S_X: the boundary points of X and the pairwise meeting points x_{c_i,|c_i-c_j|}.

    Meeting points are capped by the larger hole radius so they stay on Γ_X.
    """
    pts: List[Point] = X.boundary_points(p)
    for (c1, L1), (c2, L2) in combinations(X.holes, 2):
        L = qmax(log_distance(c1, c2, p), L1, L2)
        meet = canonical_point(Point(c1, qmin(L, X.outer_log_radius)), p)
        if meet not in pts:
            pts.append(meet)
    return sorted(pts, key=point_key)


@dataclass(frozen=True)
class DirectionId:
    """
    A germ of segment out of a point.

    ``kind`` is "infinity" for the direction of increasing radius, or "down"
    for the open residue disk D^-(residue, L) below the point.
    """

    kind: str
    residue: Optional[Fraction] = None
    log_radius: Optional[Fraction] = None

    def __str__(self) -> str:
        if self.kind == "infinity":
            return "inf"
        return f"down({self.residue}@{self.log_radius})"


INFINITY = DirectionId("infinity")


def direction_of(x: Point, target: Union[RationalLike, DirectionId], p: PrimeLike) -> DirectionId:
    """
    Direction out of x that contains the rational target (or INFINITY).

    Targets outside the closed disk of x lie on the side of infinity.
    """
    if isinstance(target, DirectionId):
        return target
    if isinstance(target, str) and target.strip().lower() in ("inf", "infinity"):
        return INFINITY
    z = to_fraction(target)
    if x.is_type1:
        if z == x.center:
            raise PreconditionError(f"Type-1 point {x.label} has no direction towards itself")
        return INFINITY
    if log_distance(x.center, z, p) <= x.log_radius:
        k = math.floor(-x.log_radius) + 1
        return DirectionId("down", canonical_residue(z, k, p), x.log_radius)
    return INFINITY


@dataclass(frozen=True)
class Edge:
    """Segment {x_{c,L} : lo <= L <= hi} between a vertex and its parent."""

    lower: Point
    upper: Point

    @property
    def center(self) -> Fraction:
        return self.lower.center

    @property
    def lo(self) -> QLog:
        return self.lower.log_radius

    @property
    def hi(self) -> Fraction:
        return self.upper.log_radius

    def point_at(self, log_radius: QLog) -> Point:
        return Point(self.center, log_radius)

    @property
    def label(self) -> str:
        return f"{self.lower.label}--{self.upper.label}"


class SkeletonGraph:
    """
    Finite rooted tree of Berkovich points.

    Vertices are canonical points; each non-root vertex has exactly one
    parent, the lowest vertex whose closed disk contains it.
    """

    def __init__(self, root: Point, p: PrimeLike):
        self.p = as_prime(p)
        self.root = canonical_point(root, self.p)
        self._graph = nx.DiGraph()
        self._graph.add_node(self.root)

    @classmethod
    def saturate(cls, leaves: Iterable[Point], root: Point, p: PrimeLike) -> "SkeletonGraph":
        """
        Sat(leaves): union of the paths from every leaf to the root.

        Pairwise meeting points are added as vertices, so every bifurcation
        of the union is a vertex.
        """
        p = as_prime(p)
        graph = cls(root, p)
        points: List[Point] = [graph.root]
        for leaf in leaves:
            cp = canonical_point(leaf, p)
            if cp not in points:
                points.append(cp)
        meets: List[Point] = []
        for a, b in combinations(points, 2):
            L = qmax(a.log_radius, b.log_radius, log_distance(a.center, b.center, p))
            meet = canonical_point(Point(a.center, L), p)
            if meet not in points and meet not in meets:
                meets.append(meet)
        vertices = sorted(points + meets, key=point_key)
        for v in vertices:
            graph._graph.add_node(v)
        for v in vertices:
            if v == graph.root:
                continue
            above = [w for w in vertices if w.log_radius > v.log_radius and dominates(w, v, p)]
            if not above:
                raise DomainMembershipError(f"Point {v.label} lies outside the root disk")
            parent = min(above, key=point_key)
            graph._graph.add_edge(v, parent)
        logger.debug(
            f"Saturated {len(points)} points into a tree with "
            f"{graph._graph.number_of_nodes()} vertices"
        )
        return graph

    def copy(self) -> "SkeletonGraph":
        clone = SkeletonGraph(self.root, self.p)
        clone._graph = self._graph.copy()
        return clone

    @property
    def nx_graph(self) -> nx.DiGraph:
        return self._graph

    def vertices(self) -> List[Point]:
        return sorted(self._graph.nodes, key=point_key)

    def edges(self) -> List[Edge]:
        return sorted(
            (Edge(u, v) for u, v in self._graph.edges),
            key=lambda e: (point_key(e.lower), point_key(e.upper)),
        )

    def has_vertex(self, v: Point) -> bool:
        return v in self._graph

    def parent(self, v: Point) -> Optional[Point]:
        successors = list(self._graph.successors(v))
        return successors[0] if successors else None

    def children(self, v: Point) -> List[Point]:
        return sorted(self._graph.predecessors(v), key=point_key)

    def up_edge(self, v: Point) -> Optional[Edge]:
        parent = self.parent(v)
        return Edge(v, parent) if parent is not None else None

    def child_edges(self, v: Point) -> List[Edge]:
        return [Edge(c, v) for c in self.children(v)]

    def subtree(self, v: Point) -> Set[Point]:
        """All vertices below v, v included."""
        return set(nx.ancestors(self._graph, v)) | {v}

    def leaves(self) -> List[Point]:
        return [v for v in self.vertices() if not self.children(v)]

    def valence(self, v: Point) -> int:
        return self._graph.degree(v)

    def is_tree(self) -> bool:
        if self._graph.number_of_nodes() == 1:
            return True
        return nx.is_tree(self._graph.to_undirected(as_view=True))

    def add_edge(self, lower: Point, upper: Point) -> None:
        self._graph.add_edge(lower, upper)

    def remove_vertex(self, v: Point) -> None:
        self._graph.remove_node(v)

    def split_edge(self, edge: Edge, log_radius: Fraction) -> Point:
        """Insert the point of ``edge`` at ``log_radius`` as a new vertex."""
        if not (edge.lo < log_radius < edge.hi):
            raise PreconditionError(f"Cannot split {edge.label} at {log_radius}")
        mid = canonical_point(edge.point_at(log_radius), self.p)
        self._graph.remove_edge(edge.lower, edge.upper)
        self._graph.add_edge(edge.lower, mid)
        self._graph.add_edge(mid, edge.upper)
        return mid

    def locate(self, x: Point) -> Optional[Union[Point, Tuple[Edge, QLog]]]:
        """
        Find x on the graph: the vertex equal to x, or (edge, L) for an edge point.

        Returns None if x is not on the graph.
        """
        for v in self._graph.nodes:
            if v.log_radius == x.log_radius and (
                (v.is_type1 and v.center == x.center)
                or (not v.is_type1 and point_eq(v, x, self.p))
            ):
                return v
        for edge in self.edges():
            if edge.lo < x.log_radius < edge.hi and (
                log_distance(edge.center, x.center, self.p) <= x.log_radius
            ):
                return (edge, x.log_radius)
        return None

    def retraction_radius(self, x: Point) -> QLog:
        """
        Log-radius of the first point of the graph met on the path from x to infinity.

        Equals L_x when x is on the graph.
        """
        best: Optional[QLog] = None
        for v in self._graph.nodes:
            if v.log_radius >= x.log_radius and dominates(v, x, self.p):
                best = v.log_radius if best is None else qmin(best, v.log_radius)
        for edge in self.edges():
            meet = qmax(x.log_radius, log_distance(edge.center, x.center, self.p), edge.lo)
            if meet <= edge.hi and meet > edge.lo:
                best = meet if best is None else qmin(best, meet)
        if best is None:
            raise DomainMembershipError(f"Point {x.label} lies outside the graph's root disk")
        return best

    def bifurcations(self) -> List[Point]:
        """Vertices with at least three directions (two children plus a parent, or three children)."""
        out = []
        for v in self.vertices():
            if self.valence(v) >= 3:
                out.append(v)
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "root": self.root.to_dict(),
            "vertices": [v.to_dict() for v in self.vertices()],
            "edges": [
                {"lower": e.lower.to_dict(), "upper": e.upper.to_dict()} for e in self.edges()
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], p: PrimeLike) -> "SkeletonGraph":
        graph = cls(Point.from_dict(data["root"]), p)
        for v in data.get("vertices", []):
            graph._graph.add_node(Point.from_dict(v))
        for e in data.get("edges", []):
            graph._graph.add_edge(Point.from_dict(e["lower"]), Point.from_dict(e["upper"]))
        return graph


def skeleton(X: AffinoidDomain, p: PrimeLike) -> SkeletonGraph:
    """Γ_X = Sat(∂X) as a rooted tree."""
    X.validate(p)
    return SkeletonGraph.saturate(X.hole_points, X.root, p)


def candidate_graph(X: AffinoidDomain, roots: Iterable[Fraction], p: PrimeLike) -> SkeletonGraph:
    """
    Γ_X ∪ Sat(roots in X): the hole boundaries plus the type-1 points of
    the given zeros and poles that lie in X.
    """
    X.validate(p)
    leaves: List[Point] = list(X.hole_points)
    for z in sorted(set(roots)):
        pt = Point.type1(z)
        if is_member(pt, X, p):
            leaves.append(pt)
    return SkeletonGraph.saturate(leaves, X.root, p)


def skeleton_edges(graph: SkeletonGraph, X: AffinoidDomain) -> Set[Edge]:
    """Edges of ``graph`` lying on Γ_X."""
    return {e for e in graph.edges() if on_skeleton(e.lower, X, graph.p)}


def boundary_set(X: AffinoidDomain, p: PrimeLike) -> Set[Point]:
    return set(X.boundary_points(p))


def vertex_directions(graph: SkeletonGraph, v: Point) -> Dict[DirectionId, Edge]:
    """Map every graph direction out of v to the incident edge carrying it."""
    out: Dict[DirectionId, Edge] = {}
    up = graph.up_edge(v)
    if up is not None:
        out[INFINITY] = up
    for edge in graph.child_edges(v):
        out[direction_of(v, edge.lower.center, graph.p)] = edge
    return out
