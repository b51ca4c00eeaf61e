"""
Spectral Newton polygons of differential operators.

An operator L = Σ g_{r-i} (d/dT)^i with g_0 = 1 has, at a point x, the
valuation sequence v_i = i·log ω - log|g_i|(x). Slopes of its lower hull
that lie below log ω + r(x) are the spectral radii (Young's small-radius
theorem); the rest are only known up to truncation by r(x). The module also
carries the Taylor recursion G_{n+1} = G_n G + G_n' used as a numeric
cross-check, and the cyclic-vector conversion from connection matrices to
operators over the rational-function field.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from sympy import Poly as SymPoly
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from padic_polygon.arith.ratfun import (
    T,
    Coefficient,
    DenseRatFun,
    FactoredRatFun,
    Poly,
    as_dense,
    from_rational,
    gauss_profile,
    gauss_val,
)
from padic_polygon.arith.scalars import (
    NEG_INF,
    POS_INF,
    PrimeLike,
    QLog,
    format_qlog,
    is_finite,
    omega_log,
    qmin,
    val_factorial,
    val_rational,
)
from padic_polygon.errors import CyclicVectorError, PreconditionError
from padic_polygon.geometry.line import Point
from padic_polygon.geometry.piecewise import PAF, Piece, combine, lift, sum_pafs
from padic_polygon.polygons.polygon import NewtonPolygon, np_from_values, slopes

logger = logging.getLogger(__name__)


def coefficient_from_dict(data: Dict[str, Any]) -> Coefficient:
    """Factored {"constant", "factors"} or dense {"num", "den"} coefficient."""
    if "constant" in data:
        return FactoredRatFun.from_dict(data)
    return DenseRatFun.from_dict(data)


def factor_dense(f: DenseRatFun) -> Optional[FactoredRatFun]:
    """Factored form of f when numerator and denominator split into rational linear factors."""
    if f.is_zero:
        return FactoredRatFun.zero()
    constant = Fraction(1)
    mult: Dict[Fraction, int] = {}
    for poly, sign in ((f.numerator, 1), (f.denominator, -1)):
        lead, factors = poly.to_sympy().factor_list()
        lead = from_rational(lead)
        constant = constant * lead if sign > 0 else constant / lead
        for fac, m in factors:
            if fac.degree() != 1:
                return None
            c1, c0 = (from_rational(c) for c in fac.all_coeffs())
            root = -c0 / c1
            constant = constant * c1**m if sign > 0 else constant / c1**m
            mult[root] = mult.get(root, 0) + sign * m
    return FactoredRatFun(constant, tuple((z, m) for z, m in sorted(mult.items()) if m != 0))


@dataclass(frozen=True)
class DifferentialOperator:
    """L = d^r + g_1 d^{r-1} + ... + g_r with d = d/dT."""

    coefficients: Tuple[Coefficient, ...]

    def __post_init__(self):
        if not self.coefficients:
            raise PreconditionError("An operator needs rank at least 1")

    @classmethod
    def build(cls, coefficients: Iterable[Coefficient]) -> "DifferentialOperator":
        return cls(tuple(coefficients))

    @property
    def rank(self) -> int:
        return len(self.coefficients)

    def g(self, i: int) -> Coefficient:
        """g_i for 1 <= i <= r."""
        return self.coefficients[i - 1]

    @property
    def is_factored(self) -> bool:
        return all(isinstance(g, FactoredRatFun) for g in self.coefficients)

    def factored(self) -> "DifferentialOperator":
        """
        The same operator with every coefficient in factored form.

        Raises:
            PreconditionError: If a dense coefficient has an irrational root
        """
        out = []
        for g in self.coefficients:
            if isinstance(g, FactoredRatFun):
                out.append(g)
                continue
            fac = factor_dense(g)
            if fac is None:
                raise PreconditionError(f"Coefficient {g} does not split over Q")
            out.append(fac)
        return DifferentialOperator(tuple(out))

    def roots(self) -> List[Fraction]:
        """All zeros and poles of the factored coefficients."""
        found = set()
        for g in self.coefficients:
            if isinstance(g, FactoredRatFun):
                found.update(g.roots())
        return sorted(found)

    def shifted(self, c) -> "DifferentialOperator":
        """The operator in the coordinate T - c."""
        return DifferentialOperator(tuple(g.shifted(c) for g in self.coefficients))

    def to_dict(self) -> Dict[str, Any]:
        return {"rank": self.rank, "coeffs": [g.to_dict() for g in self.coefficients]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DifferentialOperator":
        coeffs = [coefficient_from_dict(c) for c in data["coeffs"]]
        if int(data.get("rank", len(coeffs))) != len(coeffs):
            raise PreconditionError("Operator rank does not match its coefficient count")
        return cls(tuple(coeffs))


@dataclass(frozen=True)
class ConnectionMatrix:
    """Matrix G of the system Y' = G·Y, entries reduced rational functions."""

    entries: Tuple[Tuple[DenseRatFun, ...], ...]

    def __post_init__(self):
        r = len(self.entries)
        if r == 0 or any(len(row) != r for row in self.entries):
            raise PreconditionError("A connection matrix must be square and nonempty")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]]) -> "ConnectionMatrix":
        def cell(e: Any) -> DenseRatFun:
            if isinstance(e, (int, Fraction, str)):
                return DenseRatFun.const(e)
            return as_dense(e)

        return cls(tuple(tuple(cell(e) for e in row) for row in rows))

    @classmethod
    def zero(cls, rank: int) -> "ConnectionMatrix":
        return cls.from_rows([[0] * rank for _ in range(rank)])

    @property
    def rank(self) -> int:
        return len(self.entries)

    def entry(self, i: int, j: int) -> DenseRatFun:
        return self.entries[i][j]

    def shifted(self, c) -> "ConnectionMatrix":
        return ConnectionMatrix(tuple(tuple(e.shifted(c) for e in row) for row in self.entries))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rank": self.rank,
            "entries": [[str(e.numerator), str(e.denominator)] for row in self.entries for e in row],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ConnectionMatrix":
        rank = int(data["rank"])
        flat = data["entries"]
        if len(flat) == rank and all(isinstance(row, list) and row and isinstance(row[0], list) for row in flat):
            flat = [pair for row in flat for pair in row]
        if len(flat) != rank * rank:
            raise PreconditionError(f"Expected {rank * rank} entries, got {len(flat)}")
        cells = [DenseRatFun.parse(num, den) for num, den in flat]
        return cls(tuple(tuple(cells[i * rank:(i + 1) * rank]) for i in range(rank)))


@dataclass(frozen=True)
class SpectralRadii:
    """
    Sorted log spectral radii at a point.

    ``certified`` marks exact values (Young, Frobenius, or polygon slope +inf);
    ``solvable`` marks indices certified equal to r(x).
    """

    at: Point
    values: Tuple[QLog, ...]
    certified: Tuple[bool, ...]
    solvable: Tuple[bool, ...] = ()

    def __post_init__(self):
        if len(self.certified) != len(self.values):
            raise PreconditionError("One certification flag per radius is required")
        if not self.solvable:
            object.__setattr__(self, "solvable", tuple(False for _ in self.values))

    @property
    def rank(self) -> int:
        return len(self.values)

    @property
    def all_certified(self) -> bool:
        return all(self.certified)

    def certified_prefix(self) -> int:
        """Number of leading certified indices."""
        n = 0
        for flag in self.certified:
            if not flag:
                break
            n += 1
        return n

    def statuses(self) -> List[str]:
        out = []
        for cert, solv in zip(self.certified, self.solvable):
            out.append("solvable" if solv else "certified" if cert else "undetermined")
        return out

    def heights(self) -> List[QLog]:
        out: List[QLog] = [Fraction(0)]
        for value in self.values:
            out.append(out[-1] + value)
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "at": self.at.to_dict(),
            "values": [format_qlog(v) for v in self.values],
            "status": self.statuses(),
        }


def spectral_values(op: DifferentialOperator, x: Point, p: PrimeLike) -> List[QLog]:
    """
    v_0 = 0 and v_i = i·log ω - log|g_i|(x); zero coefficients give POS_INF.

    Raises:
        PreconditionError: If x is a type-1 zero or pole of a coefficient
    """
    omega = omega_log(p)
    values: List[QLog] = [Fraction(0)]
    for i in range(1, op.rank + 1):
        g = op.g(i)
        if g.is_zero:
            values.append(POS_INF)
            continue
        norm = gauss_val(g, x, p)
        if not is_finite(norm):
            raise PreconditionError(f"{x.label} is a zero or pole of g_{i}")
        values.append(i * omega - norm)
    return values


def spectral_polygon_at(op: DifferentialOperator, x: Point, p: PrimeLike) -> NewtonPolygon:
    """Newton polygon of the operator at x."""
    return np_from_values(spectral_values(op, x, p))


def small_radius_certify(np_: NewtonPolygon, x: Point, p: PrimeLike) -> SpectralRadii:
    """
    Read spectral radii off the polygon.

    Slopes strictly below log ω + r(x) are certified; other finite slopes
    are truncated to min(s, r(x)) and flagged. Infinite slopes come from
    polynomial solutions and are certified solvable with value r(x).

    Raises:
        PreconditionError: For type-1 points
    """
    if x.is_type1:
        raise PreconditionError("Young certification needs a point of positive radius")
    L = x.log_radius
    bound = omega_log(p) + L
    values, certified, solvable = [], [], []
    for s in slopes(np_):
        if not is_finite(s):
            values.append(L)
            certified.append(True)
            solvable.append(True)
        elif s < bound:
            values.append(s)
            certified.append(True)
            solvable.append(False)
        else:
            values.append(qmin(s, L))
            certified.append(False)
            solvable.append(False)
    return SpectralRadii(x, tuple(values), tuple(certified), tuple(solvable))


def spectral_radii_at(op: DifferentialOperator, x: Point, p: PrimeLike) -> SpectralRadii:
    return small_radius_certify(spectral_polygon_at(op, x, p), x, p)


def value_profiles(
    op: DifferentialOperator, c, interval: Tuple[QLog, Fraction], p: PrimeLike
) -> List[Optional[PAF]]:
    """v_i along λ_{x_c} as PAFs (None for zero coefficients); index 0 is the zero function."""
    lo, hi = interval
    omega = omega_log(p)
    out: List[Optional[PAF]] = [PAF.constant(lo, hi, 0)]
    for i in range(1, op.rank + 1):
        g = op.g(i)
        if g.is_zero:
            out.append(None)
            continue
        out.append(gauss_profile(g, c, interval, p).map_affine(-1, 0, i * omega))
    return out


def _chord(vi: PAF, vj: PAF, i: int, j: int, k: int) -> PAF:
    """Height at abscissa k of the chord joining (i, v_i) and (j, v_j)."""
    if i == j:
        return vi
    wi = Fraction(j - k, j - i)
    wj = Fraction(k - i, j - i)
    return combine(vi.map_affine(wi), vj.map_affine(wj), "add")


def spectral_slopes_along(
    op: DifferentialOperator, c, interval: Tuple[QLog, Fraction], p: PrimeLike
) -> List[Optional[PAF]]:
    """
    Raw polygon slopes s_1..s_r along the segment (None where the slope is +inf).

    Each hull height is the minimum over all chords straddling its abscissa,
    which is exact and piecewise affine in L.
    """
    v = value_profiles(op, c, interval, p)
    r = op.rank
    finite = [i for i in range(r + 1) if v[i] is not None]
    last = finite[-1]
    heights: List[Optional[PAF]] = []
    for k in range(r + 1):
        if k > last:
            heights.append(None)
            continue
        best: Optional[PAF] = None
        for i in finite:
            if i > k:
                break
            for j in finite:
                if j < k or (i == j and i != k):
                    continue
                chord = _chord(v[i], v[j], i, j, k)
                best = chord if best is None else combine(best, chord, "min")
        heights.append(best)
    out: List[Optional[PAF]] = []
    for k in range(1, r + 1):
        if heights[k] is None:
            out.append(None)
        else:
            out.append(combine(heights[k], heights[k - 1].negate(), "add"))
    return out


def certify_slopes_along(
    raw: Sequence[Optional[PAF]], interval: Tuple[QLog, Fraction], p: PrimeLike
) -> List[PAF]:
    """
    Young certification along a segment.

    Pieces with s < log ω + L are exact; elsewhere the value is min(s, L)
    flagged inexact. Infinite slopes become the exact diagonal L.
    """
    lo, hi = interval
    omega = omega_log(p)
    bound = PAF.affine(lo, hi, 1, omega)
    diagonal = PAF.identity(lo, hi)
    out: List[PAF] = []
    for s in raw:
        if s is None:
            out.append(diagonal)
            continue

        def rule(pcs: List[Piece], at_L: QLog):
            sp, bp, dp = pcs
            if sp.exact and sp.value_at(at_L) < bp.value_at(at_L):
                return sp.slope, sp.intercept, True
            low = sp if sp.value_at(at_L) <= dp.value_at(at_L) else dp
            return low.slope, low.intercept, False

        out.append(lift([s, bound, diagonal], rule, crossings=[(0, 1), (0, 2)]))
    return out


def spectral_profile_along(
    op: DifferentialOperator, c, interval: Tuple[QLog, Fraction], p: PrimeLike
) -> List[PAF]:
    """Partial heights h_1..h_r of the truncated spectral polygon along λ_{x_c}."""
    certified = certify_slopes_along(spectral_slopes_along(op, c, interval, p), interval, p)
    heights = []
    for k in range(1, len(certified) + 1):
        heights.append(sum_pafs(certified[:k]))
    return heights


def companion_matrix(op: DifferentialOperator) -> ConnectionMatrix:
    """Ones on the superdiagonal and last row (-g_r, ..., -g_1)."""
    r = op.rank
    rows: List[List[DenseRatFun]] = []
    for k in range(r):
        row = [DenseRatFun.const(0) for _ in range(r)]
        if k < r - 1:
            row[k + 1] = DenseRatFun.const(1)
        else:
            for j in range(r):
                g = as_dense(op.g(r - j))
                row[j] = DenseRatFun.build(-g.numerator, g.denominator)
        rows.append(row)
    return ConnectionMatrix(tuple(tuple(row) for row in rows))


def direct_sum_matrix(first: ConnectionMatrix, second: ConnectionMatrix) -> ConnectionMatrix:
    """Block-diagonal matrix of the direct sum."""
    r1, r2 = first.rank, second.rank
    zero = DenseRatFun.const(0)
    rows = []
    for i in range(r1):
        rows.append(tuple(first.entry(i, j) for j in range(r1)) + (zero,) * r2)
    for i in range(r2):
        rows.append((zero,) * r1 + tuple(second.entry(i, j) for j in range(r2)))
    return ConnectionMatrix(tuple(rows))


def direct_sum_radii(first: Iterable[QLog], second: Iterable[QLog]) -> List[QLog]:
    """Union with multiplicities, sorted."""
    return sorted(list(first) + list(second))


def _common_denominator(G: ConnectionMatrix) -> Tuple[List[List[SymPoly]], SymPoly]:
    q = SymPoly(1, T, domain=QQ)
    for row in G.entries:
        for e in row:
            q = q.lcm(e.denominator.to_sympy())
    A = [
        [e.numerator.to_sympy() * q.exquo(e.denominator.to_sympy()) for e in row]
        for row in G.entries
    ]
    return A, q


def _taylor_numerators(G: ConnectionMatrix, N: int) -> Tuple[SymPoly, Iterator[Tuple[int, List[List[SymPoly]]]]]:
    """
    q and the numerators P_n of G_n = P_n / q^n, n = 0..N.

    From G_{n+1} = G_n G + G_n': P_{n+1} = P_n A + q P_n' - n q' P_n.
    """
    A, q = _common_denominator(G)
    r = G.rank
    dq = q.diff(T)
    zero = SymPoly(0, T, domain=QQ)

    def generate():
        P = [[SymPoly(1 if i == j else 0, T, domain=QQ) for j in range(r)] for i in range(r)]
        yield 0, P
        for n in range(N):
            nxt = []
            for i in range(r):
                row = []
                for j in range(r):
                    acc = zero
                    for k in range(r):
                        acc = acc + P[i][k] * A[k][j]
                    acc = acc + q * P[i][j].diff(T) - dq * P[i][j] * n
                    row.append(acc)
                nxt.append(row)
            P = nxt
            yield n + 1, P

    return q, generate()


def taylor_matrix_seq(G: ConnectionMatrix, N: int) -> List[ConnectionMatrix]:
    """G_0 = I, G_{n+1} = G_n G + G_n' for n < N, as reduced rational matrices."""
    if N < 0:
        raise PreconditionError("N must be nonnegative")
    q, seq = _taylor_numerators(G, N)
    out = []
    for n, P in seq:
        den = Poly.from_sympy(q**n)
        out.append(
            ConnectionMatrix(
                tuple(tuple(DenseRatFun.build(Poly.from_sympy(e), den) for e in row) for row in P)
            )
        )
    return out


def _sym_gauss(poly: SymPoly, L: QLog, p: PrimeLike) -> QLog:
    """Gauss valuation of a sympy polynomial at x_{0,L}."""
    if poly.is_zero:
        return NEG_INF
    if not is_finite(L):
        c0 = poly.eval(0)
        return val_rational(from_rational(c0), p) if c0 != 0 else NEG_INF
    return max(val_rational(from_rational(c), p) + m[0] * L for m, c in poly.terms())


def _vanishes_in_disk(poly: SymPoly, L: QLog, p: PrimeLike) -> bool:
    """Whether poly has a zero in the closed disk D^+(0, p^L), or at 0 when L = -inf."""
    c0 = poly.eval(0)
    if c0 == 0:
        return True
    if not is_finite(L):
        return False
    head = val_rational(from_rational(c0), p)
    return any(val_rational(from_rational(c), p) + m[0] * L >= head for m, c in poly.terms() if m[0] > 0)


def radius_oracle(G: ConnectionMatrix, x: Point, N: int, p: PrimeLike) -> QLog:
    """
    Estimate of log R^Y(x) = liminf -log|G_n/n!|(x)/n as a tail minimum over n in [N/2, N].

    The result is an estimate, not a certified value. An identically zero
    tail gives POS_INF.

    Raises:
        PreconditionError: If G has a pole in the closed disk of x
    """
    shifted = G.shifted(x.center)
    x0 = Point(Fraction(0), x.log_radius)
    q, seq = _taylor_numerators(shifted, N)
    if _vanishes_in_disk(q, x0.log_radius, p):
        raise PreconditionError(f"Connection matrix has a pole in the disk of {x.label}")
    gq = _sym_gauss(q, x0.log_radius, p)
    start = max(1, math.ceil(Fraction(N, 2)))
    estimate: QLog = POS_INF
    for n, P in seq:
        if n < start:
            continue
        norms = [_sym_gauss(e, x0.log_radius, p) for row in P for e in row if not e.is_zero]
        if not norms:
            continue
        W = max(norms) - n * gq - val_factorial(n, p)
        estimate = qmin(estimate, -W / n)
    logger.debug(f"Oracle at {x.label} with N={N}: {format_qlog(estimate)}")
    return estimate


@dataclass(frozen=True)
class CyclicCertificate:
    """The cyclic vector u_0, the basis rows u_0..u_{r-1}, and the attempt index."""

    vector: Tuple[DenseRatFun, ...]
    basis: Tuple[Tuple[DenseRatFun, ...], ...]
    attempt: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "vector": [e.to_dict() for e in self.vector],
            "basis": [[e.to_dict() for e in row] for row in self.basis],
            "attempt": self.attempt,
        }


def _candidate_vectors(
    r: int, max_attempts: int, preferred: Optional[Sequence[Poly]] = None
) -> Iterator[List[Poly]]:
    """
    Deterministic schedule: the preferred vector if any, unit vectors, then
    (T^{0k}, T^{1k}, ...), then small integer mixes. Generated lazily.
    """

    def schedule() -> Iterator[List[Poly]]:
        if preferred is not None:
            yield list(preferred)
        for j in range(r):
            yield [Poly.one() if i == j else Poly() for i in range(r)]
        for k in range(0, r + 2):
            yield [Poly((Fraction(0),) * (i * k) + (Fraction(1),)) for i in range(r)]
        for weights in product(range(0, 3), repeat=r):
            if sum(weights) > 1:
                yield [Poly.of(w) for w in weights]

    seen = set()
    for cand in schedule():
        if len(seen) >= max_attempts:
            return
        key = tuple(e.coefficients for e in cand)
        if key in seen or all(e.is_zero for e in cand):
            continue
        seen.add(key)
        yield cand


def _iterate_fraction_free(
    A: List[List[SymPoly]], q: SymPoly, start: Sequence[SymPoly]
) -> List[List[SymPoly]]:
    """
    Numerators w_0..w_r of u_k = w_k / q^k, with u_{k+1} = u_k' + u_k·G and A = q·G.

    w_{k+1} = q·w_k' - k·q'·w_k + w_k·A.
    """
    r = len(start)
    dq = q.diff(T)
    rows = [list(start)]
    for k in range(r):
        w = rows[-1]
        nxt = []
        for j in range(r):
            acc = q * w[j].diff(T) - dq * w[j] * k
            for m in range(r):
                if not w[m].is_zero and not A[m][j].is_zero:
                    acc = acc + w[m] * A[m][j]
            nxt.append(acc)
        rows.append(nxt)
    return rows


def cyclic_operator(
    G: ConnectionMatrix,
    max_attempts: int = 12,
    rank_cap: int = 64,
    preferred: Optional[Sequence[Poly]] = None,
) -> Tuple[DifferentialOperator, CyclicCertificate]:
    """
    Operator of a cyclic vector of Y' = G·Y over Q(T).

    With u_{k+1} = u_k' + u_k·G, a row vector u_0 is cyclic when u_0..u_{r-1}
    are independent; then u_r = Σ c_k u_k and g_{r-k} = -c_k. Work stays in
    Q[T]: the rows are the numerators w_k of u_k over q^k, and the c_k come
    from Cramer's rule, so that c_k = det_k / (det·q^{r-k}). The identity
    Σ det_k w_k = det·w_r is checked before returning. A preferred vector, such
    as the pushed image of an earlier cyclic vector, is tried first.

    Raises:
        PreconditionError: If the rank exceeds rank_cap
        CyclicVectorError: If no candidate is cyclic within max_attempts
    """
    r = G.rank
    if r > rank_cap:
        raise PreconditionError(f"Rank {r} exceeds the cyclic-vector cap {rank_cap}")
    R = QQ[T]
    A, q = _common_denominator(G)

    def elem(e: SymPoly):
        return R.from_sympy(e.as_expr())

    def back(e) -> Poly:
        return Poly.from_sympy(SymPoly(R.to_sympy(e), T, domain=QQ))

    for attempt, cand in enumerate(_candidate_vectors(r, max_attempts, preferred)):
        rows = _iterate_fraction_free(A, q, [e.to_sympy() for e in cand])
        W = [[elem(e) for e in row] for row in rows]
        det = DomainMatrix(W[:r], (r, r), R).det()
        if not det:
            logger.debug(f"Candidate {attempt} is not cyclic")
            continue
        minors = [DomainMatrix(W[:k] + [W[r]] + W[k + 1 : r], (r, r), R).det() for k in range(r)]
        for j in range(r):
            if sum((minors[k] * W[k][j] for k in range(r)), R.zero) != det * W[r][j]:
                raise CyclicVectorError("Cyclic relation failed its symbolic check")
        det_poly = back(det)
        coefficients = tuple(
            DenseRatFun.build(-back(minors[r - i]), det_poly * Poly.from_sympy(q**i))
            for i in range(1, r + 1)
        )
        op = DifferentialOperator(coefficients)
        certificate = CyclicCertificate(
            vector=tuple(DenseRatFun.build(e) for e in cand),
            basis=tuple(
                tuple(DenseRatFun.build(Poly.from_sympy(e), Poly.from_sympy(q**k)) for e in row)
                for k, row in enumerate(rows[:r])
            ),
            attempt=attempt,
        )
        if attempt:
            logger.warning(f"Cyclic vector found after {attempt + 1} attempts")
        return op, certificate
    raise CyclicVectorError(f"No cyclic vector among {max_attempts} candidates for rank {r}")


def verify_cyclic(G: ConnectionMatrix, op: DifferentialOperator, certificate: CyclicCertificate) -> bool:
    """Recompute u_r from the certificate and check L annihilates the cyclic vector."""
    r = G.rank
    K = QQ[T].get_field()
    t = K.gens[0]
    Gk = [[K.from_sympy(G.entry(i, j).as_expr()) for j in range(r)] for i in range(r)]
    rows = [[K.from_sympy(e.as_expr()) for e in certificate.vector]]
    for _ in range(r):
        u = rows[-1]
        rows.append(
            [u[j].diff(t) + sum((u[m] * Gk[m][j] for m in range(r)), K.zero) for j in range(r)]
        )
    g = [K.one] + [K.from_sympy(as_dense(op.g(i)).as_expr()) for i in range(1, r + 1)]
    for j in range(r):
        total = sum((g[r - k] * rows[k][j] for k in range(r + 1)), K.zero)
        if total:
            return False
    return True


def direct_sum_operator(
    first: DifferentialOperator,
    second: DifferentialOperator,
    max_attempts: int = 12,
    rank_cap: int = 64,
) -> DifferentialOperator:
    """
    An operator of the direct sum of two companion modules.

    Coefficients are returned in factored form whenever they split over Q.
    """
    matrix = direct_sum_matrix(companion_matrix(first), companion_matrix(second))
    op, _ = cyclic_operator(matrix, max_attempts, rank_cap)
    coefficients = []
    for g in op.coefficients:
        fac = factor_dense(g) if isinstance(g, DenseRatFun) else g
        coefficients.append(fac if fac is not None else g)
    return DifferentialOperator(tuple(coefficients))
