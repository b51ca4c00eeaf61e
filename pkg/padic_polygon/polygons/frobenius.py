"""
Frobenius push-forward along φ: T ↦ T^p.

Pushing a rank-r module forward gives a rank p·r module whose radii at
φ(x) are read from the radii at x: small radii (below ω|t|) are scaled into
the Young range, large ones are raised to the p-th power. Iterating the
push-forward until every radius is small, certifying there, and descending
back through the index map is how radii outside Young's range get
certified.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from sympy import Poly as SymPoly
from sympy import QQ, Symbol, resultant

from padic_polygon.arith.ratfun import T, DenseRatFun, Poly, from_rational
from padic_polygon.arith.scalars import (
    NEG_INF,
    PrimeLike,
    QLog,
    as_prime,
    format_qlog,
    is_finite,
    omega_log,
    qmax,
    val_rational,
)
from padic_polygon.errors import PreconditionError, PushforwardError
from padic_polygon.geometry.line import Point
from padic_polygon.geometry.piecewise import PAF, Piece, lift
from padic_polygon.polygons.spectral import (
    ConnectionMatrix,
    DifferentialOperator,
    SpectralRadii,
    certify_slopes_along,
    companion_matrix,
    cyclic_operator,
    spectral_radii_at,
    spectral_slopes_along,
)

logger = logging.getLogger(__name__)

_Y = Symbol("Y")
_S = Symbol("S")


def phi_radius(sigma_log: QLog, L: QLog, p: PrimeLike) -> QLog:
    """φ(σ, ρ) = max(ρ^p, |p|σ^{p-1}ρ) on the log scale."""
    p = as_prime(p)
    return qmax(p * L, -1 + (p - 1) * sigma_log + L)


def psi_radius(sigma_log: QLog, L: QLog, p: PrimeLike) -> QLog:
    """ψ(σ, ρ') = min(ρ'^{1/p}, ρ'/(|p|σ^{p-1})), the inverse of φ(σ, ·)."""
    p = as_prime(p)
    first = L / p
    second = L + 1 - (p - 1) * sigma_log
    return first if first <= second else second


def center_log(c: Fraction, p: PrimeLike) -> QLog:
    """log|c|, NEG_INF at 0."""
    return val_rational(c, p) if c != 0 else NEG_INF


def phi_point(x: Point, p: PrimeLike) -> Point:
    """φ(x_{c,ρ}) = x_{c^p, φ(|c|, ρ)}."""
    p = as_prime(p)
    return Point(x.center**p, phi_radius(center_log(x.center, p), x.log_radius, p))


def fiber_size(x: Point, p: PrimeLike) -> int:
    """1 when L >= log ω + log|c| (one preimage above φ(x)), otherwise p."""
    p = as_prime(p)
    sigma = center_log(x.center, p)
    if not is_finite(sigma):
        return 1
    return 1 if x.log_radius >= omega_log(p) + sigma else p


@dataclass(frozen=True)
class FrobContext:
    """Working data for one push-forward step at a point."""

    p: int
    t_log: QLog
    i_1: int
    rank: int

    @property
    def small_bound(self) -> QLog:
        """log ω + log|t|: radii at or below it are small."""
        return omega_log(self.p) + self.t_log

    @property
    def ell_unit(self) -> QLog:
        """log|p t^{p-1}|."""
        return -1 + (self.p - 1) * self.t_log

    @property
    def pushed_bound(self) -> QLog:
        """p(log ω + log|t|), the value of the filler copies."""
        return self.p * self.small_bound


def frob_context(x: Point, values: Sequence[QLog], p: PrimeLike) -> FrobContext:
    """
    Context at x for sorted radii ``values``.

    i_1 is the number of radii with R_i <= ω|t|, |t| = max(|c|, ρ).
    """
    p = as_prime(p)
    t_log = qmax(center_log(x.center, p), x.log_radius)
    bound = omega_log(p) + t_log
    i_1 = sum(1 for v in values if v <= bound)
    return FrobContext(p=p, t_log=t_log, i_1=i_1, rank=len(values))


def pushforward_radii(s: SpectralRadii, ctx: FrobContext) -> SpectralRadii:
    """
    Radii of φ_*F at φ(x).

    Small radii give p copies of log|p t^{p-1}| + s_i; each large radius
    gives p·s_i plus p - 1 copies of p(log ω + log|t|).
    """
    entries: List[Tuple[QLog, bool, bool]] = []
    for i, (value, cert, solv) in enumerate(zip(s.values, s.certified, s.solvable), start=1):
        if i <= ctx.i_1:
            entries.extend([(ctx.ell_unit + value, cert, False)] * ctx.p)
        else:
            entries.append((ctx.p * value, cert, solv))
            entries.extend([(ctx.pushed_bound, True, False)] * (ctx.p - 1))
    entries.sort(key=lambda e: e[0])
    return SpectralRadii(
        at=phi_point(s.at, ctx.p),
        values=tuple(e[0] for e in entries),
        certified=tuple(e[1] for e in entries),
        solvable=tuple(e[2] for e in entries),
    )


def index_map(i: int, ctx: FrobContext) -> Tuple[int, int, QLog]:
    """
    (φ(i,x), d_i(x), log|ℓ_{i,x}|) for 1 <= i <= r.

    Small indices go to p·i with d_i = i; the others to (p-1)r + i with d_i = r.
    """
    if not 1 <= i <= ctx.rank:
        raise PreconditionError(f"Index {i} outside 1..{ctx.rank}")
    if i <= ctx.i_1:
        phi_i, d_i = ctx.p * i, i
    else:
        phi_i, d_i = (ctx.p - 1) * ctx.rank + i, ctx.rank
    return phi_i, d_i, d_i * ctx.ell_unit


def partial_height_descent(H_phi: QLog, i: int, ctx: FrobContext) -> QLog:
    """H_i(x) = H^{φ_*F}_{φ(i)}(φ(x))/p - log|ℓ_{i,x}|."""
    _, _, ell = index_map(i, ctx)
    return H_phi / ctx.p - ell


def descend_radii(
    pushed: SpectralRadii, ctx: FrobContext
) -> List[Tuple[QLog, bool, bool]]:
    """
    Recover (value, exact, solvable) for each index at x from the radii at φ(x).

    Index i is large iff the pushed radius s'_{(p-1)r+i} exceeds p(log ω + log|t|);
    then s_i = s'_{(p-1)r+i}/p, otherwise s_i = s'_{p·i} - log|p t^{p-1}|.
    """
    if pushed.rank != ctx.p * ctx.rank:
        raise PreconditionError(f"Expected {ctx.p * ctx.rank} pushed radii, got {pushed.rank}")
    out = []
    for i in range(1, ctx.rank + 1):
        k = (ctx.p - 1) * ctx.rank + i - 1
        big = pushed.values[k]
        if big > ctx.pushed_bound:
            out.append((big / ctx.p, pushed.certified[k], pushed.solvable[k]))
        else:
            j = ctx.p * i - 1
            out.append((pushed.values[j] - ctx.ell_unit, pushed.certified[j], False))
    return out


def _norm_denominator(b: SymPoly, p: int) -> Tuple[SymPoly, SymPoly]:
    """
    N(b)(S) = Res_Y(b(Y), Y^p - S) and the cofactor N(b)(T^p)/b(T).
    """
    res = resultant(b.as_expr().subs(T, _Y), _Y**p - _S, _Y)
    norm = SymPoly(res.subs(_S, T), T, domain=QQ)
    cofactor = SymPoly(res.subs(_S, T**p), T, domain=QQ).exquo(b)
    return norm, cofactor


def pushforward_matrix(G: ConnectionMatrix, p: PrimeLike, max_rank: int = 64) -> ConnectionMatrix:
    """
    Matrix of φ_*(Y' = G·Y) in the basis T̃^k e_j (index k·r + j).

    A solution component Y_j = Σ_k T̃^k Z_{k,j}(T̃^p) gives
    dZ_{l,j}/dT = Σ h_l(G_jm T̃^k / (p T̃^{p-1})) Z_{k,m} - (k/(pT)) Z_{k,j},
    where h_l is the T̃ ≡ l (mod p) part. Denominators are replaced by their
    norm so the split is exact for any rational entry.

    Raises:
        PushforwardError: If the pushed rank exceeds max_rank
    """
    p = as_prime(p)
    r = G.rank
    if p * r > max_rank:
        raise PushforwardError(f"Pushed rank {p * r} exceeds the cap {max_rank}")
    size = p * r
    cells: Dict[Tuple[int, int], DenseRatFun] = {}
    for j in range(r):
        for m in range(r):
            entry = G.entry(j, m)
            if entry.is_zero:
                continue
            norm, cofactor = _norm_denominator(entry.denominator.to_sympy(), p)
            base = entry.numerator.to_sympy() * cofactor
            den = Poly.from_sympy(norm * SymPoly(p * T, T, domain=QQ))
            for k in range(p):
                numer = base * SymPoly(T ** (k + 1), T, domain=QQ)
                parts: Dict[int, Dict[int, Fraction]] = {}
                for (e,), coeff in numer.terms():
                    l = e % p
                    parts.setdefault(l, {})[(e - l) // p] = from_rational(coeff)
                for l, coeffs in parts.items():
                    h = Poly(tuple(coeffs.get(n, Fraction(0)) for n in range(max(coeffs) + 1)))
                    cells[(l * r + j, k * r + m)] = DenseRatFun.build(h, den)
    zero = DenseRatFun.const(0)
    rows = []
    for row in range(size):
        out_row = []
        for col in range(size):
            value = cells.get((row, col), zero)
            if row == col and row >= r:
                shift = DenseRatFun.build(Poly.of(-Fraction(row // r, p)), Poly.of(0, 1))
                value = _sum(value, shift)
            out_row.append(value)
        rows.append(tuple(out_row))
    logger.debug(f"Pushed rank {r} matrix forward to rank {size} (p={p})")
    return ConnectionMatrix(tuple(rows))


def pushforward_vector(vector: Sequence[DenseRatFun], p: PrimeLike) -> Optional[List[Poly]]:
    """
    Row vector of φ_* sending the pushed basis to the T̃^p-part of u·Y.

    a_n T^n e_j contributes a_n S^{(n+k)/p} at index k·r + j, where
    k ≡ -n (mod p). None when an entry is not a polynomial.
    """
    p = as_prime(p)
    r = len(vector)
    if any(e.denominator != Poly.one() for e in vector):
        return None
    parts: Dict[int, Dict[int, Fraction]] = {}
    for j, e in enumerate(vector):
        for n, a in enumerate(e.numerator.coefficients):
            if a:
                k = (-n) % p
                parts.setdefault(k * r + j, {})[(n + k) // p] = a
    out = []
    for index in range(p * r):
        coeffs = parts.get(index, {})
        out.append(Poly(tuple(coeffs.get(m, Fraction(0)) for m in range(max(coeffs, default=-1) + 1))))
    return out


def effective_rank_cap(cyclic_rank_cap: Optional[int], max_rank: int) -> int:
    """The cyclic-vector cap, following max_rank unless set lower."""
    return max_rank if cyclic_rank_cap is None else min(cyclic_rank_cap, max_rank)


def _sum(a: DenseRatFun, b: DenseRatFun) -> DenseRatFun:
    num = a.numerator * b.denominator + b.numerator * a.denominator
    return DenseRatFun.build(num, a.denominator * b.denominator)


def _status(value: QLog, exact: bool, solvable: bool, L: QLog) -> str:
    if exact:
        return "solvable" if solvable or value == L else "certified"
    return "pinned" if value == L else "undetermined"


@dataclass
class DescentReport:
    """
    Outcome of Frobenius certification at one point.

    ``statuses`` holds one of certified, solvable, pinned (truncated value
    stuck at r(x)) or undetermined per index.
    """

    at: Point
    radii: SpectralRadii
    statuses: List[str]
    iterations: int
    ranks: List[int] = field(default_factory=list)
    stopped: str = ""

    @property
    def all_certified(self) -> bool:
        return all(s in ("certified", "solvable") for s in self.statuses)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "at": self.at.to_dict(),
            "values": [format_qlog(v) for v in self.radii.values],
            "status": list(self.statuses),
            "iterations": self.iterations,
            "ranks": list(self.ranks),
            "stopped": self.stopped,
        }


def _merge(young: SpectralRadii, descended: List[Tuple[QLog, bool, bool]]) -> SpectralRadii:
    """Young-certified values win, then descended exact values, else Young's truncation."""
    values, certified, solvable = [], [], []
    for k, (value, exact, solv) in enumerate(descended):
        if young.certified[k]:
            values.append(young.values[k])
            certified.append(True)
            solvable.append(young.solvable[k])
        elif exact:
            values.append(value)
            certified.append(True)
            solvable.append(solv or value == young.at.log_radius)
        else:
            values.append(young.values[k])
            certified.append(False)
            solvable.append(False)
    return SpectralRadii(young.at, tuple(values), tuple(certified), tuple(solvable))


def _unit_vector(r: int) -> Tuple[DenseRatFun, ...]:
    return tuple(DenseRatFun.const(1 if j == 0 else 0) for j in range(r))


def descent_certify(
    source: Union[DifferentialOperator, ConnectionMatrix],
    x: Point,
    p: PrimeLike,
    max_iter: int = 6,
    cyclic_rank_cap: Optional[int] = None,
    max_rank: int = 64,
    max_attempts: int = 12,
) -> DescentReport:
    """
    Certify the spectral radii at x by pushing forward until Young applies.

    Coordinates are first translated so x = x_{0,L}; each iterate then sits
    at x_{0,p^k L}. The loop stops when every index is certified, after
    max_iter push-forwards, or when the next rank would exceed the cap
    (max_rank, or cyclic_rank_cap when that is lower). Each pushed module is
    first tried with the pushed image of the previous cyclic vector. Results
    are then descended level by level through the index map.

    Raises:
        PreconditionError: For type-1 points
        CyclicVectorError: If a pushed module has no cyclic vector in the schedule
    """
    p = as_prime(p)
    if x.is_type1:
        raise PreconditionError("Frobenius descent needs a point of positive radius")
    cap = effective_rank_cap(cyclic_rank_cap, max_rank)
    origin = Point(Fraction(0), x.log_radius)
    if isinstance(source, DifferentialOperator):
        op = source.shifted(x.center)
        matrix = companion_matrix(op)
        vector = _unit_vector(op.rank)
    else:
        matrix = source.shifted(x.center)
        op, certificate = cyclic_operator(matrix, max_attempts, max(cap, matrix.rank))
        vector = certificate.vector

    levels: List[SpectralRadii] = [spectral_radii_at(op, origin, p)]
    ranks = [op.rank]
    point = origin
    stopped = "certified"
    while not levels[-1].all_certified:
        if len(levels) - 1 >= max_iter:
            stopped = "max_iter"
            break
        if matrix.rank * p > cap:
            stopped = "rank_cap"
            break
        matrix = pushforward_matrix(matrix, p, max_rank)
        op, certificate = cyclic_operator(matrix, max_attempts, cap, pushforward_vector(vector, p))
        vector = certificate.vector
        point = phi_point(point, p)
        levels.append(spectral_radii_at(op, point, p))
        ranks.append(op.rank)
        logger.debug(f"Level {len(levels) - 1}: rank {op.rank} at {point.label}")
    iterations = len(levels) - 1
    if iterations and not levels[-1].all_certified:
        logger.warning(f"Descent at {x.label} stopped ({stopped}) with uncertified indices")

    current = levels[-1]
    for young in reversed(levels[:-1]):
        ctx = frob_context(young.at, young.values, p)
        current = _merge(young, descend_radii(current, ctx))
    radii = SpectralRadii(x, current.values, current.certified, current.solvable)
    statuses = [
        _status(v, c, s, x.log_radius)
        for v, c, s in zip(radii.values, radii.certified, radii.solvable)
    ]
    return DescentReport(x, radii, statuses, iterations, ranks, stopped)


def descend_slopes(
    young: Sequence[PAF], pushed: Sequence[PAF], rank: int, p: PrimeLike
) -> List[PAF]:
    """
    Segment version of the descent along λ_{x_0}.

    ``pushed`` are the pushed slope profiles already rescaled to the
    original log-radius. Pieces certified neither by Young nor by the
    pushed profile stay flagged inexact.
    """
    p = as_prime(p)
    lo, hi = young[0].lo, young[0].hi
    omega = omega_log(p)
    bound = PAF.affine(lo, hi, p, p * omega)
    out = []
    for i in range(1, rank + 1):
        big = pushed[(p - 1) * rank + i - 1]
        small = pushed[p * i - 1]

        def rule(pcs: List[Piece], at_L: QLog):
            b, s, f = pcs
            if b.value_at(at_L) > f.value_at(at_L):
                return b.slope / p, b.intercept / p, b.exact
            return s.slope - (p - 1), s.intercept + 1, s.exact

        descended = lift([big, small, bound], rule, crossings=[(0, 2)])

        def merge(pcs: List[Piece], at_L: QLog):
            y, d = pcs
            chosen = y if y.exact or not d.exact else d
            return chosen.slope, chosen.intercept, chosen.exact

        out.append(lift([young[i - 1], descended], merge))
    return out


def frobenius_profile_along(
    source: Union[DifferentialOperator, ConnectionMatrix],
    c,
    interval: Tuple[QLog, Fraction],
    p: PrimeLike,
    max_iter: int = 6,
    cyclic_rank_cap: Optional[int] = None,
    max_rank: int = 64,
    max_attempts: int = 12,
) -> List[PAF]:
    """
    Certified slope profiles s_1..s_r along λ_{x_c} on the interval.

    Young-certified pieces are kept; the rest are certified, where possible,
    by pushing forward and descending the pushed profiles.
    """
    p = as_prime(p)
    cap = effective_rank_cap(cyclic_rank_cap, max_rank)
    if isinstance(source, DifferentialOperator):
        op = source.shifted(c)
        matrix = companion_matrix(op)
        vector = _unit_vector(op.rank)
    else:
        matrix = source.shifted(c)
        op, certificate = cyclic_operator(matrix, max_attempts, max(cap, matrix.rank))
        vector = certificate.vector
    return _profile_at_origin(op, matrix, vector, interval, p, max_iter, cap, max_rank, max_attempts)


def _profile_at_origin(
    op: DifferentialOperator,
    matrix: ConnectionMatrix,
    vector: Sequence[DenseRatFun],
    interval: Tuple[QLog, Fraction],
    p: int,
    depth: int,
    cap: int,
    max_rank: int,
    max_attempts: int,
) -> List[PAF]:
    young = certify_slopes_along(spectral_slopes_along(op, 0, interval, p), interval, p)
    if all(s.is_exact for s in young):
        return young
    if depth <= 0 or matrix.rank * p > cap:
        logger.debug(f"Profile on {interval} left partly truncated at rank {op.rank}")
        return young
    lo, hi = interval
    pushed_matrix = pushforward_matrix(matrix, p, max_rank)
    pushed_op, certificate = cyclic_operator(
        pushed_matrix, max_attempts, cap, pushforward_vector(vector, p)
    )
    pushed = _profile_at_origin(
        pushed_op,
        pushed_matrix,
        certificate.vector,
        (p * lo, p * hi),
        p,
        depth - 1,
        cap,
        max_rank,
        max_attempts,
    )
    rescaled = [s.rescale_argument(p) for s in pushed]
    return descend_slopes(young, rescaled, op.rank, p)
