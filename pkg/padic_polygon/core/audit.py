"""
Property audit of a radii profile.

Checks the structural properties every convergence-radii profile must
have: integral slopes of H_i where i is a polygon vertex, slope
denominators bounded by the rank, concavity and monotonicity along
segments, weak super-harmonicity off S_X ∪ C_i with the bound on S_X, and
harmonicity at solvability-free vertices. Each check is closed form; the
sandwich check alone samples edge points as a cross-check.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Set, Tuple

from padic_polygon.arith.scalars import PrimeLike, QLog, as_prime, format_qlog, is_finite, qmin
from padic_polygon.core.criterion import (
    ConditionResult,
    _in_set,
    branch_census,
    observed_nu,
)
from padic_polygon.core.radii_engine import (
    HEIGHT,
    RADIUS,
    SOLVABLE,
    UNDETERMINED,
    ControllingGraph,
    FunctionProfile,
    RadiiProfile,
    constancy_radius,
    ordering_holds,
    prune_to_controlling_graph,
    sample_points,
)
from padic_polygon.geometry.line import (
    AffinoidDomain,
    Edge,
    Point,
    boundary_set,
    dominates,
    maximal_radius,
    minimal_triangulation,
    skeleton_valence,
)

logger = logging.getLogger(__name__)

CHECKS = (
    "integrality",
    "denominators",
    "concavity_skeleton",
    "concavity_branches",
    "monotonicity",
    "superharmonic",
    "harmonic",
    "superharmonic_r1",
    "sandwich",
    "branch_bound",
    "spectral_agreement",
)


@dataclass
class AuditReport:
    """Outcome of every audit check plus the exceptional sets C_i used."""

    checks: Dict[str, ConditionResult]
    exceptional: Dict[int, List[Point]] = field(default_factory=dict)
    nu: Optional[Fraction] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    @property
    def violations(self) -> int:
        return sum(len(c.witnesses) for c in self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "violations": self.violations,
            "nu": None if self.nu is None else str(self.nu),
            "exceptional": {
                str(i): [x.label for x in pts] for i, pts in sorted(self.exceptional.items())
            },
            "checks": {name: c.to_dict() for name, c in self.checks.items()},
        }


class _Context:
    """Functions and pruned graphs shared by the checks."""

    def __init__(self, profile: RadiiProfile, X: AffinoidDomain, p: int):
        self.profile = profile
        self.X = X
        self.p = p
        self.r = profile.rank
        self.S = minimal_triangulation(X, p)
        self.boundary = boundary_set(X, p)
        self.R: Dict[int, FunctionProfile] = {}
        self.H: Dict[int, FunctionProfile] = {}
        self.H_norm: Dict[int, FunctionProfile] = {}
        self.cg_R: Dict[int, ControllingGraph] = {}
        self.cg_H: Dict[int, ControllingGraph] = {}
        for i in range(1, self.r + 1):
            self.R[i] = profile.function(i, RADIUS)
            self.H[i] = profile.function(i, HEIGHT)
            self.H_norm[i] = profile.function(i, HEIGHT, normalised=True)
            self.cg_R[i] = prune_to_controlling_graph(profile, i, RADIUS)
            self.cg_H[i] = prune_to_controlling_graph(self.H[i])
        self.singular_edges = self._singular_edges()

    def _singular_edges(self) -> Set[Edge]:
        graph = self.profile.graph
        poles = [Point.type1(z) for z in self.profile.singular]
        return {
            e for e in graph.edges() if any(dominates(e.lower, z, self.p) for z in poles)
        }

    def in_S(self, x: Point) -> bool:
        return _in_set(x, self.S, self.p)

    def on_boundary(self, x: Point) -> bool:
        return _in_set(x, self.boundary, self.p)

    def branch_edges(self) -> List[Edge]:
        return [
            e
            for e in self.profile.graph.edges()
            if not self.profile.edges[e].skeletal and e not in self.singular_edges
        ]

    def is_vertex_index(self, x: Point, i: int) -> bool:
        data = self.profile.vertices[x]
        if not all(data.exact[: min(i + 1, self.r)]):
            return False
        return i == self.r or data.radii[i - 1] < data.radii[i]

    def free_of_solvability(self, x: Point, i: int) -> bool:
        classes = self.profile.vertices[x].classes[:i]
        return all(c not in (SOLVABLE, UNDETERMINED) for c in classes)

    def gos_bound(self, x: Point, i: int) -> Fraction:
        """(N_X(x) - 2)·min(i, i^sp_x)."""
        n = skeleton_valence(x, self.X, self.p)
        return Fraction((n - 2) * min(i, self.profile.largest_spectral_index(x)))


def exceptional_sets(ctx: _Context) -> Dict[int, List[Point]]:
    """
    C_i = A_1 ∪ ... ∪ A_i.

    A_k holds the points off Γ_X where index k is solvable (or left
    undetermined) and which are end points of Γ(R_k), or vertices of
    Γ(R_k) ∩ Γ(H_k) ∩ Γ_{k-1}. Vertices with truncated data are added.
    """
    profile = ctx.profile
    A: Dict[int, List[Point]] = {}
    for k in range(1, ctx.r + 1):
        pts: List[Point] = []
        cg = ctx.cg_R[k]
        for x in cg.end_points:
            if x in profile.graph.vertices() and profile.vertices[x].skeletal:
                continue
            status = cg.end_status.get(x) or profile.classify(x, k)
            if status in (SOLVABLE, UNDETERMINED):
                pts.append(x)
        for x in profile.graph.vertices():
            data = profile.vertices[x]
            if data.skeletal:
                continue
            if not all(data.exact[:k]):
                pts.append(x)
                continue
            if data.classes[k - 1] not in (SOLVABLE, UNDETERMINED):
                continue
            in_prev = k == 1 or any(
                ctx.cg_R[j].graph.locate(x) is not None for j in range(1, k)
            )
            if (
                in_prev
                and ctx.cg_R[k].graph.locate(x) is not None
                and ctx.cg_H[k].graph.locate(x) is not None
            ):
                pts.append(x)
        A[k] = pts
    C: Dict[int, List[Point]] = {}
    acc: List[Point] = []
    for k in range(1, ctx.r + 1):
        for x in A[k]:
            if x not in acc:
                acc.append(x)
        C[k] = list(acc)
    return C


def _breakpoints(f) -> List[Tuple[Fraction, Fraction, Fraction]]:
    """(L, left slope, right slope) at every join between exact pieces."""
    out = []
    for left, right in zip(f.pieces, f.pieces[1:]):
        if left.exact and right.exact:
            out.append((left.hi, left.slope, right.slope))
    return out


def _check_integrality(ctx: _Context, result: ConditionResult) -> None:
    for x in ctx.profile.graph.vertices():
        if x.is_type1:
            continue
        for i in range(1, ctx.r + 1):
            if not ctx.is_vertex_index(x, i):
                continue
            bs = ctx.H[i].branch_slopes(x)
            for direction, slope in bs.entries.items():
                if slope.denominator != 1:
                    result.fail(point=x.label, index=i, direction=direction, slope=slope)


def _check_denominators(ctx: _Context, result: ConditionResult) -> Optional[Fraction]:
    functions = []
    for edge, data in ctx.profile.edges.items():
        for i, f in enumerate(data.heights, start=1):
            functions.append(f)
            for pc in f.pieces:
                if pc.exact and pc.slope.denominator > ctx.r:
                    result.fail(edge=edge.label, index=i, slope=pc.slope)
    nu = observed_nu(functions)
    result.detail["nu"] = None if nu is None else str(nu)
    if nu is not None and nu < Fraction(1, ctx.r):
        result.fail(reason="slope below 1/r", slope=nu)
    return nu


def _check_concavity(ctx: _Context, skel: ConditionResult, branch: ConditionResult) -> None:
    profile = ctx.profile
    for edge, data in profile.edges.items():
        for i in range(1, ctx.r + 1):
            f = data.heights[i - 1]
            if data.skeletal:
                for L, left, right in f.convexity_violations():
                    skel.fail(point=edge.point_at(L).label, index=i, slope_left=left, slope_right=right)
                continue
            if edge in ctx.singular_edges:
                continue
            for L, left, right in f.convexity_violations():
                if any(data.radii[k].eval(L) == L for k in range(i)):
                    continue
                branch.fail(point=edge.point_at(L).label, index=i, slope_left=left, slope_right=right)


def _check_monotonicity(ctx: _Context, result: ConditionResult) -> None:
    for edge in ctx.branch_edges():
        data = ctx.profile.edges[edge]
        for i in range(1, ctx.r + 1):
            for pc in data.heights[i - 1].pieces:
                if not pc.exact or pc.slope <= 0:
                    continue
                at_L = (pc.lo + pc.hi) / 2 if is_finite(pc.lo) else pc.hi - 1
                free = True
                for k in range(i):
                    rp = data.radii[k].piece_at(at_L)
                    if not rp.exact or rp.value_at(at_L) >= at_L:
                        free = False
                        break
                if free:
                    result.fail(
                        edge=edge.label,
                        index=i,
                        cell=f"[{format_qlog(pc.lo)}, {format_qlog(pc.hi)}]",
                        slope=pc.slope,
                    )


def _superharmonic_points(ctx: _Context, i: int) -> List[Tuple[Point, Optional[Fraction]]]:
    """Type-2 vertices and interior exact breakpoints of H_i with their Laplacians."""
    out: List[Tuple[Point, Optional[Fraction]]] = []
    F = ctx.H_norm[i]
    for x in ctx.profile.graph.vertices():
        if not x.is_type1:
            out.append((x, F.laplacian(x)))
    for edge, f in F.values.items():
        for L, left, right in _breakpoints(f):
            out.append((edge.point_at(L), right - left))
    return out


def _check_superharmonic(ctx: _Context, C: Dict[int, List[Point]], result: ConditionResult) -> None:
    skipped = 0
    for i in range(1, ctx.r + 1):
        for x, value in _superharmonic_points(ctx, i):
            if ctx.on_boundary(x):
                continue
            if value is None:
                skipped += 1
                continue
            if ctx.in_S(x):
                bound = ctx.gos_bound(x, i)
                if value > bound:
                    result.fail(point=x.label, index=i, laplacian=value, bound=bound)
                continue
            if _in_set(x, C[i], ctx.p):
                continue
            if value > 0:
                result.fail(point=x.label, index=i, laplacian=value)
    result.detail["skipped"] = skipped


def _check_harmonic(ctx: _Context, C: Dict[int, List[Point]], result: ConditionResult) -> None:
    for i in range(1, ctx.r + 1):
        F = ctx.H_norm[i]
        for x in ctx.profile.graph.vertices():
            if x.is_type1 or ctx.on_boundary(x) or _in_set(x, C[i], ctx.p):
                continue
            if ctx.cg_H[i].graph.locate(x) is None:
                continue
            if not (ctx.is_vertex_index(x, i) and ctx.free_of_solvability(x, i)):
                continue
            value = F.laplacian(x)
            if value is None:
                continue
            expected = ctx.gos_bound(x, i) if ctx.in_S(x) else Fraction(0)
            if value != expected:
                result.fail(point=x.label, index=i, laplacian=value, expected=expected)


def _check_r1(ctx: _Context, result: ConditionResult) -> None:
    F = ctx.R[1]
    for x in ctx.profile.graph.vertices():
        if x.is_type1 or ctx.on_boundary(x):
            continue
        value = F.laplacian(x)
        if value is not None and value > 0:
            result.fail(point=x.label, laplacian=value)
    for edge, f in F.values.items():
        for L, left, right in _breakpoints(f):
            if right - left > 0:
                result.fail(point=edge.point_at(L).label, laplacian=right - left)


def _sandwich_at(ctx: _Context, x: Point, values: List[QLog], exact: List[bool], result: ConditionResult) -> None:
    finite = [v for v, e in zip(values, exact) if e]
    if not ordering_holds(finite):
        result.fail(point=x.label, reason="radii out of order", values=[format_qlog(v) for v in values])
    maximal = maximal_radius(x, ctx.X, ctx.p)
    for i, (v, e) in enumerate(zip(values, exact), start=1):
        if e and v > maximal:
            result.fail(point=x.label, index=i, value=v, maximal=maximal)
    for i in range(1, ctx.r + 1):
        rho = constancy_radius(ctx.cg_R[i], x)
        if not (x.log_radius <= rho <= maximal):
            result.fail(point=x.label, index=i, constancy=rho, maximal=maximal)


def _check_sandwich(ctx: _Context, result: ConditionResult) -> None:
    profile = ctx.profile
    for x, data in profile.vertices.items():
        _sandwich_at(ctx, x, data.radii, data.exact, result)
    for edge, data in profile.edges.items():
        for x in sample_points(edge):
            L = x.log_radius
            values = [f.eval(L) for f in data.radii]
            exact = [f.is_exact_at(L) for f in data.radii]
            _sandwich_at(ctx, x, values, exact, result)


def _check_branch_bound(ctx: _Context, result: ConditionResult) -> None:
    rows = []
    for i in range(1, ctx.r + 1):
        for row in branch_census(ctx.cg_R[i], ctx.X, ctx.p):
            row = {**row, "index": i}
            rows.append(row)
            if not row["ok"]:
                result.fail(
                    point=row["attachment"],
                    index=i,
                    branch_points=row["branch_points"],
                    bound=row["bound"],
                )
    result.detail["disks"] = rows


def _check_spectral(ctx: _Context, result: ConditionResult) -> None:
    """min(R_i, r(x)) must equal the spectral value wherever both are exact."""
    profile = ctx.profile
    for x, data in profile.vertices.items():
        if x.is_type1:
            continue
        up = profile.graph.up_edge(x)
        children = profile.graph.child_edges(x)
        if up is not None:
            sp = [f.eval(up.lo) for f in profile.edges[up].spectral]
            sp_exact = [f.piece_at(up.lo, "right").exact for f in profile.edges[up].spectral]
        elif children:
            e = children[0]
            sp = [f.eval(e.hi) for f in profile.edges[e].spectral]
            sp_exact = [f.piece_at(e.hi, "left").exact for f in profile.edges[e].spectral]
        else:
            continue
        for i, (R, ex, s, sx) in enumerate(zip(data.radii, data.exact, sp, sp_exact), start=1):
            if ex and sx and qmin(R, x.log_radius) != s:
                result.fail(point=x.label, index=i, radius=R, spectral=s)


def audit_main_theorem(
    profile: RadiiProfile, X: Optional[AffinoidDomain] = None, p: Optional[PrimeLike] = None
) -> AuditReport:
    """
    Audit a radii profile.

    Args:
        profile: Profile built by RadiiEngine (or read back from JSON)
        X: Domain (defaults to the profile's)
        p: Residue characteristic (defaults to the profile's)

    Returns:
        AuditReport; never raises on a failed property
    """
    X = X or profile.domain
    p = as_prime(p if p is not None else profile.p)
    logger.info(f"Auditing radii profile of rank {profile.rank}")
    ctx = _Context(profile, X, p)
    checks = {name: ConditionResult(name) for name in CHECKS}
    C = exceptional_sets(ctx)

    _check_integrality(ctx, checks["integrality"])
    nu = _check_denominators(ctx, checks["denominators"])
    _check_concavity(ctx, checks["concavity_skeleton"], checks["concavity_branches"])
    _check_monotonicity(ctx, checks["monotonicity"])
    _check_superharmonic(ctx, C, checks["superharmonic"])
    _check_harmonic(ctx, C, checks["harmonic"])
    _check_r1(ctx, checks["superharmonic_r1"])
    _check_sandwich(ctx, checks["sandwich"])
    _check_branch_bound(ctx, checks["branch_bound"])
    _check_spectral(ctx, checks["spectral_agreement"])

    report = AuditReport(checks, C, nu)
    if report.passed:
        logger.info("Audit passed")
    else:
        failed = [name for name, c in checks.items() if not c.passed]
        logger.warning(f"Audit found {report.violations} violations in {failed}")
    return report
