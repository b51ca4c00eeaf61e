"""
Finiteness criterion checker.

A positive function on X given by its edge profiles is tested against the
six conditions (C1)-(C6) that force a finite controlling graph. The
checker never raises on a failed condition: every failure is reported
with a witness (point, direction, slope).
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

from padic_polygon.arith.ratfun import Coefficient, FactoredRatFun, gauss_profile, gauss_val
from padic_polygon.arith.scalars import PrimeLike, as_prime, format_qlog, is_finite, qmin, to_fraction
from padic_polygon.core.radii_engine import (
    RADIUS,
    ControllingGraph,
    FunctionProfile,
    RadiiProfile,
    prune_to_controlling_graph,
)
from padic_polygon.errors import PreconditionError
from padic_polygon.geometry.line import (
    INFINITY,
    AffinoidDomain,
    Edge,
    Point,
    SkeletonGraph,
    boundary_set,
    candidate_graph,
    on_skeleton,
    point_eq,
)
from padic_polygon.geometry.piecewise import PAF, combine

logger = logging.getLogger(__name__)

CONDITIONS = ("C1", "C2", "C3", "C4", "C5", "C6")


@dataclass
class ConditionResult:
    """Outcome of one check, with witnesses for every failure."""

    name: str
    passed: bool = True
    witnesses: List[Dict[str, Any]] = field(default_factory=list)
    detail: Dict[str, Any] = field(default_factory=dict)

    def fail(self, **witness: Any) -> None:
        self.passed = False
        self.witnesses.append({k: str(v) for k, v in witness.items()})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "witnesses": list(self.witnesses),
            "detail": dict(self.detail),
        }


@dataclass
class CriterionReport:
    """Per-condition results, the observed ν and the exceptional set used."""

    conditions: Dict[str, ConditionResult]
    nu: Optional[Fraction]
    exceptional: List[Point] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    def failed(self) -> List[str]:
        return [name for name, c in self.conditions.items() if not c.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "nu": None if self.nu is None else str(self.nu),
            "exceptional": [x.label for x in self.exceptional],
            "conditions": {name: c.to_dict() for name, c in self.conditions.items()},
        }


def branch_bound(slope, nu) -> int:
    """
    max(0, floor(slope/ν) - 1): bound on the branch points in a maximal disk.

    Raises:
        PreconditionError: If ν <= 0
    """
    slope, nu = to_fraction(slope), to_fraction(nu)
    if nu <= 0:
        raise PreconditionError(f"ν must be positive, got {nu}")
    return max(0, math.floor(slope / nu) - 1)


def _interior_point(edge: Edge) -> Point:
    lo, hi = edge.lo, edge.hi
    L = (lo + hi) / 2 if is_finite(lo) else hi - 1
    return edge.point_at(L)


def edge_in_graph(edge: Edge, graph: SkeletonGraph) -> bool:
    """True iff the open edge lies on ``graph``."""
    return graph.locate(_interior_point(edge)) is not None


def _in_set(x: Point, points: Iterable[Point], p: int) -> bool:
    for y in points:
        if x.is_type1 or y.is_type1:
            if x == y:
                return True
        elif point_eq(x, y, p):
            return True
    return False


def observed_nu(functions: Iterable[PAF]) -> Optional[Fraction]:
    """Smallest nonzero |slope| over the exact pieces, None if every piece is flat."""
    best: Optional[Fraction] = None
    for f in functions:
        for pc in f.pieces:
            if pc.exact and pc.slope != 0:
                value = abs(pc.slope)
                best = value if best is None else min(best, value)
    return best


def check_criterion(
    profile: Union[FunctionProfile, RadiiProfile],
    i: int = 1,
    Gamma: Optional[SkeletonGraph] = None,
    C: Sequence[Point] = (),
    nu=None,
    quantity: str = RADIUS,
) -> CriterionReport:
    """
    Test (C1)-(C6) on a function profile.

    Args:
        profile: FunctionProfile, or RadiiProfile together with ``i`` and ``quantity``
        i: Index used with a RadiiProfile
        Gamma: Graph below which concavity is tested (defaults to the pruned controlling graph)
        C: Exceptional set excluded from the Laplacian test
        nu: Candidate lower bound for nonzero slopes; None only reports the observed value

    Returns:
        CriterionReport with one ConditionResult per condition
    """
    F = profile.function(i, quantity) if isinstance(profile, RadiiProfile) else profile
    X, p = F.domain, F.p
    if Gamma is None:
        Gamma = prune_to_controlling_graph(F).graph
    results = {name: ConditionResult(name) for name in CONDITIONS}
    edges = F.graph.edges()

    # C1: finite values, in particular at type-1 ends
    for edge in edges:
        if edge.lower.is_type1:
            bottom = F.values[edge].pieces[0]
            if bottom.slope != 0:
                results["C1"].fail(point=edge.lower.label, direction=INFINITY, slope=bottom.slope)

    # C2: finitely many breaks on every edge
    results["C2"].detail["breaks"] = sum(len(F.values[e].breakpoints()) for e in edges)

    # C3: concavity below Γ
    tested = 0
    for edge in edges:
        if edge_in_graph(edge, Gamma):
            continue
        tested += 1
        for L, left, right in F.values[edge].convexity_violations():
            results["C3"].fail(point=edge.point_at(L).label, slope_left=left, slope_right=right)
    for v in F.graph.vertices():
        if v.is_type1 or Gamma.locate(v) is not None:
            continue
        up = F.graph.up_edge(v)
        if up is None:
            continue
        above = F.values[up].piece_at(up.lo, "right")
        for child in F.graph.child_edges(v):
            below = F.values[child].piece_at(child.hi, "left")
            if above.exact and below.exact and below.slope < above.slope:
                results["C3"].fail(point=v.label, slope_left=below.slope, slope_right=above.slope)
    results["C3"].detail["edges_tested"] = tested

    # C4: slopes bounded away from zero
    found = observed_nu(F.values.values())
    results["C4"].detail["observed"] = None if found is None else str(found)
    if nu is not None:
        nu = to_fraction(nu)
        results["C4"].detail["candidate"] = str(nu)
        if found is not None and found < nu:
            results["C4"].fail(slope=found, bound=nu)

    # C5: finitely many directions with nonzero slope
    directions = {v.label: len(F.branch_slopes(v).entries) for v in F.graph.bifurcations()}
    results["C5"].detail["directions"] = directions

    # C6: super-harmonicity off C and ∂X
    boundary = boundary_set(X, p)
    skipped = []
    for v in F.graph.bifurcations():
        if v.is_type1 or _in_set(v, boundary, p) or _in_set(v, C, p):
            continue
        value = F.laplacian(v)
        if value is None:
            skipped.append(v.label)
            continue
        if value > 0:
            results["C6"].fail(point=v.label, laplacian=value)
    results["C6"].detail["skipped"] = skipped

    report = CriterionReport(results, found, list(C))
    if report.passed:
        logger.debug(f"Criterion passed for {F.label or 'profile'}")
    else:
        logger.info(f"Criterion failed for {F.label or 'profile'}: {report.failed()}")
    return report


def retraction_profile(Gamma: SkeletonGraph, X: AffinoidDomain, p: PrimeLike) -> FunctionProfile:
    """ρ_Γ: the log-radius of the retraction onto Γ (identity along each edge)."""
    p = as_prime(p)
    values = {e: PAF.identity(e.lo, e.hi) for e in Gamma.edges()}
    vertex_values = {} if values else {Gamma.root: Gamma.root.log_radius}
    return FunctionProfile(Gamma, values, X, p, vertex_values, label="rho_Gamma")


def min_power_profile(
    fs: Sequence[Coefficient], alphas: Sequence, X: AffinoidDomain, p: PrimeLike
) -> FunctionProfile:
    """
    log of min_i |f_i|^{-α_i} on the candidate graph of the f_i's roots.

    Raises:
        PreconditionError: If the lists differ in length or some f_i is zero
    """
    p = as_prime(p)
    if len(fs) != len(alphas) or not fs:
        raise PreconditionError("One exponent per function is required")
    if any(f.is_zero for f in fs):
        raise PreconditionError("min_power_profile needs nonzero functions")
    alphas = [to_fraction(a) for a in alphas]
    roots = set()
    for f in fs:
        if isinstance(f, FactoredRatFun):
            roots.update(f.roots())
    graph = candidate_graph(X, roots, p)
    values = {}
    for edge in graph.edges():
        total: Optional[PAF] = None
        for f, a in zip(fs, alphas):
            term = gauss_profile(f, edge.center, (edge.lo, edge.hi), p).map_affine(-a)
            total = term if total is None else combine(total, term, "min")
        values[edge] = total
    vertex_values = {}
    if not values:
        root = graph.root
        vertex_values[root] = qmin(*[-a * gauss_val(f, root, p) for f, a in zip(fs, alphas)])
    return FunctionProfile(graph, values, X, p, vertex_values, label="min_power")


def disk_attachments(cg: ControllingGraph, X: AffinoidDomain, p: PrimeLike) -> List[Edge]:
    """Edges of the controlling graph leaving Γ_X into a maximal disk."""
    p = as_prime(p)
    return [
        e
        for e in cg.graph.edges()
        if not on_skeleton(e.lower, X, p) and on_skeleton(e.upper, X, p)
    ]


def branch_census(
    cg: ControllingGraph, X: AffinoidDomain, p: PrimeLike, nu=None
) -> List[Dict[str, Any]]:
    """
    Branch points inside each maximal disk against branch_bound.

    The attachment slope is the log-slope of F towards Γ_X at the attachment
    point; ν defaults to the smallest nonzero slope observed on the graph.
    """
    p = as_prime(p)
    if nu is None:
        nu = observed_nu(cg.values.values())
    rows = []
    for edge in disk_attachments(cg, X, p):
        piece = cg.values[edge].piece_at(edge.hi, "left")
        below = cg.graph.subtree(edge.lower)
        count = sum(1 for v in below if len(cg.graph.children(v)) >= 2)
        bound = None
        if nu is not None and piece.exact:
            bound = branch_bound(max(piece.slope, Fraction(0)), nu)
        rows.append(
            {
                "attachment": edge.upper.label,
                "direction": edge.lower.label,
                "slope": str(piece.slope),
                "exact": piece.exact,
                "branch_points": count,
                "bound": bound,
                "ok": bound is None or count <= bound,
            }
        )
    return rows


def describe(report: CriterionReport) -> str:
    """One-line summary for logs."""
    parts = [f"{name}={'ok' if c.passed else 'FAIL'}" for name, c in report.conditions.items()]
    nu = "-" if report.nu is None else format_qlog(report.nu)
    return " ".join(parts) + f" nu={nu}"
