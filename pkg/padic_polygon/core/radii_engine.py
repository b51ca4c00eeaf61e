"""
Convergence radii engine.

This module provides the RadiiEngine class, which turns a differential
operator on an affinoid domain into exact piecewise-affine profiles of the
convergence radii R_1 <= ... <= R_r and partial heights H_i along every
edge of the candidate graph Γ_X ∪ Sat(roots), together with the pruning of
those profiles to controlling graphs.
"""

import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from padic_polygon.arith.scalars import (
    PrimeLike,
    QLog,
    as_prime,
    format_qlog,
    is_finite,
    qmax,
    qmin,
    to_fraction,
    to_qlog,
)
from padic_polygon.config import PolygonConfig, load_default_config
from padic_polygon.errors import (
    CyclicVectorError,
    PreconditionError,
    PushforwardError,
)
from padic_polygon.geometry.line import (
    AffinoidDomain,
    Edge,
    Point,
    SkeletonGraph,
    candidate_graph,
    canonical_point,
    maximal_radius,
    on_skeleton,
    point_key,
    vertex_directions,
)
from padic_polygon.geometry.piecewise import (
    PAF,
    BranchSlopes,
    Piece,
    combine,
    laplacian,
    sum_pafs,
)
from padic_polygon.polygons.frobenius import DescentReport, descent_certify, frobenius_profile_along
from padic_polygon.polygons.spectral import (
    DifferentialOperator,
    certify_slopes_along,
    spectral_slopes_along,
)

logger = logging.getLogger(__name__)

RADIUS = "radius"
HEIGHT = "height"

SPECTRAL = "spectral"
SOLVABLE = "solvable"
OVERSOLVABLE = "oversolvable"
UNDETERMINED = "undetermined"


def _paf_list(data: Sequence[Dict[str, Any]]) -> List[PAF]:
    return [PAF.from_dict(f) for f in data]


def convergence_from_spectral(sp: PAF, x: Point, X: AffinoidDomain, p: PrimeLike) -> QLog:
    """
    Convergence radius at x from the spectral profile along Λ(x).

    Below the diagonal at r(x) the radius is spectral; on the diagonal it is
    the end of the diagonal run, capped by the maximal disk.

    Args:
        sp: log R_i^sp along λ_x, defined from r(x) upwards
        x: Point of X
        X: Affinoid domain
        p: Residue characteristic

    Raises:
        PreconditionError: If the profile does not start at r(x) or exceeds the diagonal there
    """
    L = x.log_radius
    if sp.lo != L:
        raise PreconditionError(
            f"Spectral profile starts at {format_qlog(sp.lo)}, expected r(x) = {format_qlog(L)}"
        )
    value = sp.eval(L)
    if value > L:
        raise PreconditionError(f"Spectral value {format_qlog(value)} exceeds r(x) at {x.label}")
    if value < L:
        return value
    return qmin(sp.diagonal_crossing(), maximal_radius(x, X, p))


def classify_value(value: QLog, r: QLog, exact: bool = True) -> str:
    """spectral (R < r), solvable (R = r) or oversolvable (R > r); undetermined when inexact."""
    if not exact:
        return UNDETERMINED
    if value < r:
        return SPECTRAL
    if value == r:
        return SOLVABLE
    return OVERSOLVABLE


def _is_diagonal(piece: Piece) -> bool:
    return piece.exact and piece.slope == 1 and piece.intercept == 0


def propagate_branch(
    sp: PAF, maximal: QLog, carry: Tuple[QLog, bool], pinned_below: bool
) -> PAF:
    """
    Convergence radius along a branch edge off Γ_X.

    Off the diagonal R = R^sp. A diagonal run becomes the identity when the
    radius just below it is spectral (continuity), the carried value of the
    parent when it reaches the top of the edge, and otherwise the constant
    min(end of run, ρ_{x,X}).

    Args:
        sp: Certified spectral profile on the edge
        maximal: log ρ_{x,X}, constant along the edge
        carry: (R at the upper vertex, exact flag)
        pinned_below: True when a child edge is spectral just below the lower vertex
    """
    hi = sp.hi
    pieces: List[Piece] = []
    for k, pc in enumerate(sp.pieces):
        if not _is_diagonal(pc):
            pieces.append(pc)
            continue
        below = sp.pieces[k - 1] if k else None
        if (below is not None and below.exact) or (below is None and pinned_below):
            pieces.append(pc)
        elif pc.hi == hi:
            value, exact = carry
            pieces.append(Piece(pc.lo, pc.hi, 0, qmax(value, hi), exact and below is None))
        else:
            above = sp.piece_at(pc.hi, "right")
            pieces.append(Piece(pc.lo, pc.hi, 0, qmin(pc.hi, maximal), below is None and above.exact))
    return PAF.from_pieces(pieces)


def extend_plateau(f: PAF) -> PAF:
    """
    Replace an inexact bottom band by the constant of the exact flat piece above it.

    Used for R_1 on edges ending at a type-1 point.
    """
    for j, pc in enumerate(f.pieces):
        if pc.exact:
            if j == 0 or pc.slope != 0:
                return f
            band = Piece(f.lo, pc.lo, 0, pc.intercept, True)
            return PAF.from_pieces([band] + list(f.pieces[j:]))
    return f


@dataclass
class FunctionProfile:
    """
    A function on X given by one PAF per graph edge.

    Off the graph the function is constant on every residue disk, equal to
    its value at the retraction point. ``vertex_values`` covers graphs
    reduced to a single vertex.
    """

    graph: SkeletonGraph
    values: Dict[Edge, PAF]
    domain: AffinoidDomain
    p: int
    vertex_values: Dict[Point, QLog] = field(default_factory=dict)
    vertex_exact: Dict[Point, bool] = field(default_factory=dict)
    label: str = ""

    def value_at(self, x: Point) -> QLog:
        """F(x) for any point of X."""
        where = self.graph.locate(x)
        if where is None:
            where = self.graph.locate(Point(x.center, self.graph.retraction_radius(x)))
        if isinstance(where, Point):
            return self._vertex_value(where)
        edge, L = where
        return self.values[edge].eval(L)

    def exact_at(self, x: Point) -> bool:
        where = self.graph.locate(x)
        if where is None:
            where = self.graph.locate(Point(x.center, self.graph.retraction_radius(x)))
        if isinstance(where, Point):
            return self._vertex_exact(where)
        edge, L = where
        return self.values[edge].is_exact_at(L)

    def _vertex_value(self, v: Point) -> QLog:
        if v in self.vertex_values:
            return self.vertex_values[v]
        up = self.graph.up_edge(v)
        if up is not None:
            return self.values[up].eval(up.lo)
        children = self.graph.child_edges(v)
        if not children:
            raise PreconditionError(f"No value recorded at {v.label}")
        return self.values[children[0]].eval(children[0].hi)

    def _vertex_exact(self, v: Point) -> bool:
        if v in self.vertex_exact:
            return self.vertex_exact[v]
        up = self.graph.up_edge(v)
        if up is not None:
            return self.values[up].piece_at(up.lo, "right").exact
        children = self.graph.child_edges(v)
        if not children:
            return True
        return self.values[children[0]].piece_at(children[0].hi, "left").exact

    def branch_slopes(self, v: Point) -> BranchSlopes:
        """
        Outward slopes of F at a graph vertex.

        Directions leaving the graph carry slope 0; a direction adjacent to
        an inexact piece is reported as unknown.
        """
        out = BranchSlopes(at=v)
        for direction, edge in vertex_directions(self.graph, v).items():
            f = self.values[edge]
            if edge.lower == v:
                piece = f.piece_at(f.lo, "right")
                slope = piece.slope
            else:
                piece = f.piece_at(f.hi, "left")
                slope = -piece.slope
            if not piece.exact:
                out.unknown.append(direction)
                continue
            out.entries[direction] = slope
        return out

    def laplacian(self, v: Point) -> Optional[Any]:
        """dd^c F(v), or None when some branch slope is unknown."""
        bs = self.branch_slopes(v)
        if not bs.complete:
            return None
        return laplacian(bs)

    def edges_off_skeleton(self) -> List[Edge]:
        return [e for e in self.graph.edges() if not on_skeleton(e.lower, self.domain, self.p)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "graph": self.graph.to_dict(),
            "edges": [
                {
                    "lower": e.lower.to_dict(),
                    "upper": e.upper.to_dict(),
                    "values": self.values[e].to_dict(),
                }
                for e in self.graph.edges()
            ],
        }


@dataclass
class EdgeRadii:
    """Profiles of one candidate edge, indices 1..r."""

    edge: Edge
    skeletal: bool
    maximal: PAF
    spectral: List[PAF]
    radii: List[PAF]
    heights: List[PAF]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lower": self.edge.lower.to_dict(),
            "upper": self.edge.upper.to_dict(),
            "skeletal": self.skeletal,
            "maximal": self.maximal.to_dict(),
            "spectral": [f.to_dict() for f in self.spectral],
            "radii": [f.to_dict() for f in self.radii],
            "heights": [f.to_dict() for f in self.heights],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EdgeRadii":
        return cls(
            edge=Edge(Point.from_dict(data["lower"]), Point.from_dict(data["upper"])),
            skeletal=bool(data["skeletal"]),
            maximal=PAF.from_dict(data["maximal"]),
            spectral=_paf_list(data["spectral"]),
            radii=_paf_list(data["radii"]),
            heights=_paf_list(data["heights"]),
        )


@dataclass
class VertexRadii:
    """Radii at one vertex with their exactness, class and certification status."""

    point: Point
    skeletal: bool
    maximal: QLog
    radii: List[QLog]
    exact: List[bool]
    classes: List[str]
    certification: List[str] = field(default_factory=list)

    def heights(self) -> List[QLog]:
        out: List[QLog] = []
        total: QLog = 0
        for value in self.radii:
            total = total + value
            out.append(total)
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": self.point.to_dict(),
            "skeletal": self.skeletal,
            "maximal": format_qlog(self.maximal),
            "radii": [format_qlog(v) for v in self.radii],
            "exact": list(self.exact),
            "classes": list(self.classes),
            "certification": list(self.certification),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "VertexRadii":
        return cls(
            point=Point.from_dict(data["point"]),
            skeletal=bool(data["skeletal"]),
            maximal=to_qlog(data["maximal"]),
            radii=[to_qlog(v) for v in data["radii"]],
            exact=[bool(e) for e in data["exact"]],
            classes=list(data["classes"]),
            certification=list(data.get("certification", [])),
        )


@dataclass
class RadiiProfile:
    """
    Convergence radii and partial heights over the candidate graph.

    ``singular`` lists the poles of the coefficients; the maximal disks
    holding them are outside the scope of the regularity checks.
    """

    graph: SkeletonGraph
    domain: AffinoidDomain
    p: int
    rank: int
    edges: Dict[Edge, EdgeRadii]
    vertices: Dict[Point, VertexRadii]
    flags: List[Dict[str, Any]] = field(default_factory=list)
    singular: List[Fraction] = field(default_factory=list)

    def _check_index(self, i: int) -> None:
        if not 1 <= i <= self.rank:
            raise PreconditionError(f"Index {i} outside 1..{self.rank}")

    def function(self, i: int, quantity: str = RADIUS, normalised: bool = False) -> FunctionProfile:
        """
        R_i (quantity "radius") or H_i ("height") as a FunctionProfile.

        With ``normalised`` the maximal radius is divided out:
        R_i(x,F) = R_i - log ρ_{x,X} and H_i(x,F) = H_i - i·log ρ_{x,X}.
        """
        self._check_index(i)
        if quantity not in (RADIUS, HEIGHT):
            raise PreconditionError(f"Unknown quantity: {quantity}")
        weight = 1 if quantity == RADIUS else i
        values: Dict[Edge, PAF] = {}
        for edge, data in self.edges.items():
            f = data.radii[i - 1] if quantity == RADIUS else data.heights[i - 1]
            if normalised:
                f = combine(f, data.maximal.map_affine(-weight), "add")
            values[edge] = f
        vertex_values: Dict[Point, QLog] = {}
        vertex_exact: Dict[Point, bool] = {}
        for v, data in self.vertices.items():
            value = data.radii[i - 1] if quantity == RADIUS else data.heights()[i - 1]
            if normalised:
                value = value - weight * data.maximal
            vertex_values[v] = value
            vertex_exact[v] = all(data.exact[:i]) if quantity == HEIGHT else data.exact[i - 1]
        label = f"{'R' if quantity == RADIUS else 'H'}_{i}"
        return FunctionProfile(
            self.graph, values, self.domain, self.p, vertex_values, vertex_exact, label
        )

    def value(self, x: Point, i: int, quantity: str = RADIUS) -> QLog:
        return self.function(i, quantity).value_at(x)

    def classify(self, x: Point, i: int) -> str:
        """Solvability class of index i at x."""
        self._check_index(i)
        if x in self.vertices:
            return self.vertices[x].classes[i - 1]
        f = self.function(i)
        return classify_value(f.value_at(x), x.log_radius, f.exact_at(x))

    def largest_spectral_index(self, x: Point) -> int:
        """i^sp: largest index that is spectral non-solvable at x, 0 if none."""
        best = 0
        for i in range(1, self.rank + 1):
            if self.classify(x, i) == SPECTRAL:
                best = i
        return best

    def branch_slopes(self, v: Point, i: int, quantity: str = RADIUS) -> BranchSlopes:
        return self.function(i, quantity).branch_slopes(v)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "rank": self.rank,
            "domain": self.domain.to_dict(),
            "graph": self.graph.to_dict(),
            "edges": [self.edges[e].to_dict() for e in self.graph.edges()],
            "vertices": [self.vertices[v].to_dict() for v in self.graph.vertices()],
            "flags": list(self.flags),
            "singular": [str(z) for z in self.singular],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RadiiProfile":
        p = as_prime(int(data["p"]))
        edges = {}
        for item in data["edges"]:
            er = EdgeRadii.from_dict(item)
            edges[er.edge] = er
        vertices = {}
        for item in data["vertices"]:
            vr = VertexRadii.from_dict(item)
            vertices[vr.point] = vr
        return cls(
            graph=SkeletonGraph.from_dict(data["graph"], p),
            domain=AffinoidDomain.from_dict(data["domain"]),
            p=p,
            rank=int(data["rank"]),
            edges=edges,
            vertices=vertices,
            flags=list(data.get("flags", [])),
            singular=[to_fraction(z) for z in data.get("singular", [])],
        )


def solvability_classify(x: Point, i: int, profile: RadiiProfile) -> str:
    """spectral, solvable or oversolvable (undetermined on truncated data)."""
    return profile.classify(x, i)


def largest_spectral_index(x: Point, profile: RadiiProfile) -> int:
    return profile.largest_spectral_index(x)


@dataclass
class ControllingGraph:
    """Γ(F) ∪ Γ_X for one function, with the values kept on its edges."""

    graph: SkeletonGraph
    index: int
    quantity: str
    values: Dict[Edge, PAF]
    end_points: List[Point] = field(default_factory=list)
    end_status: Dict[Point, str] = field(default_factory=dict)
    removed: List[Edge] = field(default_factory=list)
    anomalies: List[str] = field(default_factory=list)

    @property
    def solvable_end_points(self) -> List[Point]:
        return [v for v in self.end_points if self.end_status.get(v) in (SOLVABLE, UNDETERMINED)]

    def is_admissible(self, X: AffinoidDomain) -> bool:
        """Finite tree containing every vertex of Γ_X."""
        if not self.graph.is_tree():
            return False
        for hole in X.hole_points:
            if self.graph.locate(hole) is None:
                return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "quantity": self.quantity,
            "graph": self.graph.to_dict(),
            "edges": [
                {
                    "lower": e.lower.to_dict(),
                    "upper": e.upper.to_dict(),
                    "values": self.values[e].to_dict(),
                }
                for e in self.graph.edges()
            ],
            "end_points": [
                {**v.to_dict(), "status": self.end_status.get(v, "")} for v in self.end_points
            ],
            "removed": [{"lower": e.lower.to_dict(), "upper": e.upper.to_dict()} for e in self.removed],
            "anomalies": list(self.anomalies),
        }


def _is_flat(f: PAF) -> bool:
    return len(f.pieces) == 1 and f.pieces[0].exact and f.pieces[0].slope == 0


def prune_to_controlling_graph(
    profile: Union[RadiiProfile, FunctionProfile], i: int = 1, quantity: str = RADIUS
) -> ControllingGraph:
    """
    Remove the candidate branches on which the function is constant.

    A branch off Γ_X goes when its edge and everything below it are exact
    constants; when only the bottom part of the edge is constant the edge is
    cut where the constancy ends and that point becomes an end point.
    """
    F = profile.function(i, quantity) if isinstance(profile, RadiiProfile) else profile
    X, p = F.domain, F.p
    graph = F.graph.copy()
    values = dict(F.values)

    constant_below: Dict[Point, bool] = {}
    for v in graph.vertices():
        constant_below[v] = all(
            constant_below[e.lower] and _is_flat(values[e]) for e in graph.child_edges(v)
        )

    removed: List[Edge] = []
    end_points: List[Point] = []
    for edge in sorted(graph.edges(), key=lambda e: point_key(e.lower), reverse=True):
        if not graph.has_vertex(edge.lower) or on_skeleton(edge.lower, X, p):
            continue
        if not constant_below[edge.lower]:
            continue
        f = values[edge]
        if _is_flat(f):
            cut = None
        else:
            bottom = f.pieces[0]
            if not (bottom.exact and bottom.slope == 0):
                continue
            cut = bottom.hi
        doomed = graph.subtree(edge.lower)
        for e in [e for e in values if e.lower in doomed]:
            values.pop(e)
        for v in doomed:
            graph.remove_vertex(v)
        removed.append(edge)
        if cut is not None:
            mid = canonical_point(Point(edge.center, cut), p)
            graph.add_edge(mid, edge.upper)
            values[Edge(mid, edge.upper)] = f.restrict(cut, edge.hi)
            end_points.append(mid)

    anomalies: List[str] = []
    for edge in graph.edges():
        if on_skeleton(edge.lower, X, p):
            continue
        f = values[edge]
        top = f.piece_at(f.hi, "left")
        if f.is_exact and top.slope == 0:
            anomalies.append(f"{edge.label}: zero attachment slope on a non-constant branch")
            logger.warning(f"Non-constant branch with zero attachment slope at {edge.label}")

    for v in graph.leaves():
        if not on_skeleton(v, X, p) and v not in end_points:
            end_points.append(v)
    end_points.sort(key=point_key)

    end_status: Dict[Point, str] = {}
    if isinstance(profile, RadiiProfile) and quantity == RADIUS:
        for v in end_points:
            end_status[v] = classify_value(F.value_at(v), v.log_radius, F.exact_at(v))

    logger.debug(
        f"Pruned {F.label or 'profile'}: {len(removed)} branches removed, "
        f"{len(end_points)} end points"
    )
    return ControllingGraph(graph, i, quantity, values, end_points, end_status, removed, anomalies)


def constancy_radius(graph: Union[ControllingGraph, SkeletonGraph], x: Point) -> QLog:
    """log ρ_F(x): log-radius of the retraction of x onto the controlling graph."""
    g = graph.graph if isinstance(graph, ControllingGraph) else graph
    return g.retraction_radius(x)


class RadiiEngine:
    """
    Convergence radii builder.

    Coordinates spectral profiles, Frobenius certification and propagation
    of the radii from Γ_X into the branches of the candidate graph.
    """

    def __init__(self, config: Optional[PolygonConfig] = None):
        """
        Initialize the engine.

        Args:
            config: Configuration object (uses default if None)
        """
        self.config = config or load_default_config()

        # Statistics
        self.stats = {
            "vertices": 0,
            "edges_processed": 0,
            "vertices_certified": 0,
            "uncertified_indices": 0,
            "frobenius_iterations": 0,
            "fallbacks": 0,
        }

    def build_profile(
        self,
        op: DifferentialOperator,
        X: AffinoidDomain,
        p: PrimeLike,
        i_max: Optional[int] = None,
    ) -> RadiiProfile:
        """
        Build the convergence radii profile of op on X.

        Args:
            op: Differential operator whose coefficients split over Q
            X: Affinoid domain
            p: Residue characteristic
            i_max: Largest index kept (defaults to the rank)

        Returns:
            RadiiProfile over Γ_X ∪ Sat(roots in X)

        Raises:
            PreconditionError: If a coefficient does not split over Q
        """
        p = as_prime(p)
        op = op.factored()
        rank = op.rank if i_max is None else min(i_max, op.rank)
        if rank < 1:
            raise PreconditionError("i_max must be at least 1")

        graph = candidate_graph(X, op.roots(), p)
        logger.info(
            f"Building radii profile: rank {op.rank}, p={p}, "
            f"{len(graph.vertices())} vertices, {len(graph.edges())} edges"
        )

        reports: Dict[Point, DescentReport] = {}
        for v in graph.vertices():
            self.stats["vertices"] += 1
            if v.is_type1:
                continue
            report = self._certify_vertex(op, v, p)
            if report is not None:
                reports[v] = report

        spectral: Dict[Edge, List[PAF]] = {}
        for edge in graph.edges():
            spectral[edge] = self._spectral_edge(op, edge, p)
            self.stats["edges_processed"] += 1

        edges = self._propagate(graph, spectral, X, p, rank)
        vertices = {v: self._vertex_radii(graph, v, edges, reports.get(v), X, p, rank) for v in graph.vertices()}

        flags = []
        for v in graph.vertices():
            for k, status in enumerate(vertices[v].certification[:rank], start=1):
                if status not in ("certified", SOLVABLE):
                    flags.append({"at": v.to_dict(), "index": k, "status": status})
        self.stats["uncertified_indices"] = len(flags)
        if flags:
            logger.warning(f"{len(flags)} (vertex, index) pairs left uncertified")

        logger.info(f"Radii profile complete: {len(edges)} edges, {len(vertices)} vertices")
        singular = sorted({z for g in op.coefficients for z, m in g.factors if m < 0})
        return RadiiProfile(graph, X, p, rank, edges, vertices, flags, singular)

    def build_profile_with_stats(
        self,
        op: DifferentialOperator,
        X: AffinoidDomain,
        p: PrimeLike,
        i_max: Optional[int] = None,
    ) -> Dict[str, Any]:
        """
        Build the profile and return it with run statistics.

        Returns:
            Dictionary containing the profile and statistics
        """
        start_time = datetime.now(timezone.utc)

        profile = self.build_profile(op, X, p, i_max)

        end_time = datetime.now(timezone.utc)
        duration = (end_time - start_time).total_seconds()

        return {
            "profile": profile,
            "stats": {
                **self.stats,
                "duration": duration,
                "generated_at": end_time.isoformat(),
            },
        }

    def _certify_vertex(self, op: DifferentialOperator, v: Point, p: int) -> Optional[DescentReport]:
        """Point-level Young/Frobenius certification; None when the descent cannot run."""
        try:
            report = descent_certify(op, v, p, **self.config.frobenius_options())
        except (CyclicVectorError, PushforwardError) as e:
            logger.warning(f"Certification at {v.label} failed: {e}")
            self.stats["fallbacks"] += 1
            return None
        self.stats["frobenius_iterations"] += report.iterations
        if report.all_certified:
            self.stats["vertices_certified"] += 1
        return report

    def _spectral_edge(self, op: DifferentialOperator, edge: Edge, p: int) -> List[PAF]:
        interval = (edge.lo, edge.hi)
        try:
            return frobenius_profile_along(
                op, edge.center, interval, p, **self.config.frobenius_options()
            )
        except (CyclicVectorError, PushforwardError) as e:
            logger.warning(f"Frobenius profile on {edge.label} failed, keeping Young data: {e}")
            self.stats["fallbacks"] += 1
            raw = spectral_slopes_along(op, edge.center, interval, p)
            return certify_slopes_along(raw, interval, p)

    def _propagate(
        self,
        graph: SkeletonGraph,
        spectral: Dict[Edge, List[PAF]],
        X: AffinoidDomain,
        p: int,
        rank: int,
    ) -> Dict[Edge, EdgeRadii]:
        """Radii on every edge, from the root down."""
        out: Dict[Edge, EdgeRadii] = {}
        order = sorted(graph.edges(), key=lambda e: point_key(e.upper), reverse=True)
        for edge in order:
            skeletal = on_skeleton(edge.lower, X, p)
            s = spectral[edge][:rank]
            if skeletal:
                maximal = PAF.identity(edge.lo, edge.hi)
                radii = list(s)
            else:
                M = maximal_radius(edge.upper, X, p)
                maximal = PAF.constant(edge.lo, edge.hi, M)
                radii = []
                for k in range(rank):
                    carry = self._carry(graph, edge, out, s[k], k, X, p)
                    pinned = not edge.lower.is_type1 and any(
                        self._spectral_below(spectral[child][k])
                        for child in graph.child_edges(edge.lower)
                    )
                    R = propagate_branch(s[k], M, carry, pinned)
                    if k == 0 and edge.lower.is_type1:
                        R = extend_plateau(R)
                    radii.append(R)
            heights = [sum_pafs(radii[: k + 1]) for k in range(rank)]
            out[edge] = EdgeRadii(edge, skeletal, maximal, list(s), radii, heights)
        return out

    @staticmethod
    def _spectral_below(f: PAF) -> bool:
        piece = f.piece_at(f.hi, "left")
        return piece.exact and not _is_diagonal(piece)

    @staticmethod
    def _carry(
        graph: SkeletonGraph,
        edge: Edge,
        done: Dict[Edge, EdgeRadii],
        s: PAF,
        k: int,
        X: AffinoidDomain,
        p: int,
    ) -> Tuple[QLog, bool]:
        """R_{k+1} at the upper vertex of the edge."""
        if on_skeleton(edge.upper, X, p):
            return s.eval(edge.hi), s.is_exact_at(edge.hi)
        up = graph.up_edge(edge.upper)
        R = done[up].radii[k]
        return R.eval(up.lo), R.piece_at(up.lo, "right").exact

    @staticmethod
    def _vertex_radii(
        graph: SkeletonGraph,
        v: Point,
        edges: Dict[Edge, EdgeRadii],
        report: Optional[DescentReport],
        X: AffinoidDomain,
        p: int,
        rank: int,
    ) -> VertexRadii:
        skeletal = on_skeleton(v, X, p)
        maximal = maximal_radius(v, X, p)
        up = graph.up_edge(v)
        children = graph.child_edges(v)
        values: List[QLog] = []
        exact: List[bool] = []
        for k in range(rank):
            if up is not None:
                R = edges[up].radii[k]
                values.append(R.eval(up.lo))
                exact.append(R.piece_at(up.lo, "right").exact)
            elif children:
                R = edges[children[0]].radii[k]
                values.append(R.eval(children[0].hi))
                exact.append(R.piece_at(children[0].hi, "left").exact)
            elif report is not None:
                values.append(report.radii.values[k])
                exact.append(report.statuses[k] in ("certified", SOLVABLE))
            else:
                raise PreconditionError(f"No radius data at {v.label}")
            if report is not None and not exact[-1] and report.statuses[k] in ("certified", SOLVABLE):
                value = report.radii.values[k]
                if skeletal or value < v.log_radius:
                    values[-1] = value
                    exact[-1] = True
        classes = [classify_value(val, v.log_radius, ex) for val, ex in zip(values, exact)]
        certification = list(report.statuses[:rank]) if report is not None else []
        return VertexRadii(v, skeletal, maximal, values, exact, classes, certification)


def profile_summary(profile: RadiiProfile) -> Dict[str, Any]:
    """Counts per solvability class, for logs and the CLI."""
    counts: Dict[str, int] = {SPECTRAL: 0, SOLVABLE: 0, OVERSOLVABLE: 0, UNDETERMINED: 0}
    for data in profile.vertices.values():
        for cls in data.classes:
            counts[cls] = counts.get(cls, 0) + 1
    return {
        "rank": profile.rank,
        "vertices": len(profile.vertices),
        "edges": len(profile.edges),
        "classes": counts,
        "uncertified": len(profile.flags),
    }


def sample_points(edge: Edge, count: int = 10) -> List[Point]:
    """Deterministic interior points of an edge (type-1 bottoms use integer steps)."""
    lo, hi = edge.lo, edge.hi
    out = []
    for j in range(1, count + 1):
        if is_finite(lo):
            L = lo + (hi - lo) * j / (count + 1)
        else:
            L = hi - (count + 1 - j)
        out.append(edge.point_at(L))
    return out


def ordering_holds(values: Sequence[QLog]) -> bool:
    return all(a <= b for a, b in zip(values, values[1:]))


def vertex_value_lists(profile: RadiiProfile, x: Point) -> List[QLog]:
    """R_1..R_r at any point of X."""
    return [profile.value(x, i) for i in range(1, profile.rank + 1)]

