"""
Polynomials and rational functions over Q, with Gauss valuations.

``Poly`` and ``DenseRatFun`` delegate arithmetic to ``sympy.Poly`` over QQ;
``FactoredRatFun`` keeps rational roots explicit so that every breakpoint of
its norm profile along a segment is known exactly. All norms are returned on
the base-p log scale.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Tuple, Union

from sympy import Poly as SymPoly
from sympy import QQ, Rational, Symbol, fraction, sympify, together
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)

from padic_polygon.arith.scalars import (
    NEG_INF,
    POS_INF,
    PrimeLike,
    QLog,
    RationalLike,
    log_distance,
    qmax,
    to_fraction,
    val_rational,
)
from padic_polygon.errors import PreconditionError
from padic_polygon.geometry.line import Point
from padic_polygon.geometry.piecewise import PAF, combine, upper_envelope

logger = logging.getLogger(__name__)

T = Symbol("T")

_TRANSFORMATIONS = standard_transformations + (
    implicit_multiplication_application,
    convert_xor,
)


def to_rational(c: RationalLike) -> Rational:
    c = to_fraction(c)
    return Rational(c.numerator, c.denominator)


def from_rational(c: Any) -> Fraction:
    c = sympify(c)
    if not c.is_Rational:
        raise PreconditionError(f"Coefficient {c} is not rational")
    return Fraction(int(c.p), int(c.q))


@dataclass(frozen=True)
class Poly:
    """Polynomial in T with rational coefficients, ascending degree."""

    coefficients: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        coeffs = list(self.coefficients)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(to_fraction(c) for c in coeffs))

    @classmethod
    def of(cls, *coefficients: RationalLike) -> "Poly":
        return cls(tuple(to_fraction(c) for c in coefficients))

    @classmethod
    def one(cls) -> "Poly":
        return cls((Fraction(1),))

    @classmethod
    def from_sympy(cls, poly: SymPoly) -> "Poly":
        if poly.is_zero:
            return cls()
        return cls(tuple(from_rational(c) for c in reversed(poly.all_coeffs())))

    @classmethod
    def from_expr(cls, expr: Any) -> "Poly":
        try:
            return cls.from_sympy(SymPoly(expr, T, domain=QQ))
        except Exception as e:
            raise PreconditionError(f"Not a polynomial in T over Q: {expr}") from e

    @classmethod
    def parse(cls, text: str) -> "Poly":
        """
        Read a polynomial string such as "1 - 2T + T^2".

        Raises:
            PreconditionError: If the text is not a polynomial in T with rational coefficients
        """
        try:
            expr = parse_expr(str(text), local_dict={"T": T}, transformations=_TRANSFORMATIONS)
        except Exception as e:
            raise PreconditionError(f"Cannot parse polynomial {text!r}: {e}") from e
        return cls.from_expr(expr)

    def to_sympy(self) -> SymPoly:
        if self.is_zero:
            return SymPoly(0, T, domain=QQ)
        return SymPoly.from_list([to_rational(c) for c in reversed(self.coefficients)], T, domain=QQ)

    def as_expr(self):
        return self.to_sympy().as_expr()

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    def evaluate(self, z: RationalLike) -> Fraction:
        z = to_fraction(z)
        value = Fraction(0)
        for c in reversed(self.coefficients):
            value = value * z + c
        return value

    def __add__(self, other: "Poly") -> "Poly":
        return Poly.from_sympy(self.to_sympy() + other.to_sympy())

    def __sub__(self, other: "Poly") -> "Poly":
        return Poly.from_sympy(self.to_sympy() - other.to_sympy())

    def __mul__(self, other: "Poly") -> "Poly":
        return Poly.from_sympy(self.to_sympy() * other.to_sympy())

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coefficients))

    def scale(self, k: RationalLike) -> "Poly":
        k = to_fraction(k)
        return Poly(tuple(k * c for c in self.coefficients))

    def __str__(self) -> str:
        terms: List[str] = []
        for n, c in enumerate(self.coefficients):
            if c == 0:
                continue
            mag = abs(c)
            if n == 0:
                body = str(mag)
            else:
                mono = "T" if n == 1 else f"T^{n}"
                if mag == 1:
                    body = mono
                elif mag.denominator == 1:
                    body = f"{mag}{mono}"
                else:
                    body = f"({mag}){mono}"
            if not terms:
                terms.append(f"-{body}" if c < 0 else body)
            else:
                terms.append(f" {'-' if c < 0 else '+'} {body}")
        return "".join(terms) or "0"


def taylor_shift(f: Poly, c: RationalLike) -> Poly:
    """Coefficients a_n with f(T) = Σ a_n (T - c)^n."""
    c = to_fraction(c)
    if c == 0 or f.is_zero:
        return f
    return Poly.from_sympy(f.to_sympy().shift(to_rational(c)))


def derivative(f: Poly) -> Poly:
    """Formal derivative d/dT."""
    if f.degree < 1:
        return Poly()
    return Poly.from_sympy(f.to_sympy().diff(T))


def gauss_val_poly(f: Poly, x: Point, p: PrimeLike) -> QLog:
    """
    log_p of the seminorm x_{c,L}(f) = max_n |a_n| p^{nL} after re-centering at c.

    Type-1 points give log_p|f(c)|, NEG_INF at a zero.
    """
    if f.is_zero:
        return NEG_INF
    shifted = taylor_shift(f, x.center)
    if x.is_type1:
        a0 = shifted.coefficients[0]
        return val_rational(a0, p) if a0 != 0 else NEG_INF
    return max(
        val_rational(a, p) + n * x.log_radius
        for n, a in enumerate(shifted.coefficients)
        if a != 0
    )


def poly_profile(f: Poly, c: RationalLike, lo: QLog, hi: Fraction, p: PrimeLike) -> PAF:
    """L ↦ gauss_val_poly(f, x_{c,L}) on [lo, hi] as the envelope of the Taylor terms."""
    if f.is_zero:
        raise PreconditionError("The zero polynomial has no finite norm profile")
    shifted = taylor_shift(f, c)
    return upper_envelope(
        ((Fraction(n), val_rational(a, p)) for n, a in enumerate(shifted.coefficients) if a != 0),
        lo,
        hi,
    )


@dataclass(frozen=True)
class FactoredRatFun:
    """constant · Π (T - z_j)^{m_j} with distinct rational roots z_j and nonzero m_j."""

    constant: Fraction
    factors: Tuple[Tuple[Fraction, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "constant", to_fraction(self.constant))
        object.__setattr__(
            self, "factors", tuple((to_fraction(z), int(m)) for z, m in self.factors)
        )
        roots = [z for z, _ in self.factors]
        if len(set(roots)) != len(roots):
            raise PreconditionError(f"Repeated root in factored function: {roots}")
        if any(m == 0 for _, m in self.factors):
            raise PreconditionError("Factor multiplicities must be nonzero")
        if self.constant == 0 and self.factors:
            raise PreconditionError("The zero function carries no factors")

    @classmethod
    def zero(cls) -> "FactoredRatFun":
        return cls(Fraction(0))

    @classmethod
    def const(cls, k: RationalLike) -> "FactoredRatFun":
        return cls(to_fraction(k))

    @classmethod
    def build(cls, constant: RationalLike, factors: Iterable[Tuple[RationalLike, int]] = ()) -> "FactoredRatFun":
        return cls(to_fraction(constant), tuple((to_fraction(z), int(m)) for z, m in factors))

    @property
    def is_zero(self) -> bool:
        return self.constant == 0

    def roots(self) -> List[Fraction]:
        return [z for z, _ in self.factors]

    def numerator(self) -> Poly:
        out = Poly.of(self.constant)
        for z, m in self.factors:
            if m > 0:
                out = out * Poly.from_sympy(SymPoly(T - to_rational(z), T, domain=QQ) ** m)
        return out

    def denominator(self) -> Poly:
        out = Poly.one()
        for z, m in self.factors:
            if m < 0:
                out = out * Poly.from_sympy(SymPoly(T - to_rational(z), T, domain=QQ) ** (-m))
        return out

    def to_dense(self) -> "DenseRatFun":
        return DenseRatFun.build(self.numerator(), self.denominator())

    def __mul__(self, other: "FactoredRatFun") -> "FactoredRatFun":
        if self.is_zero or other.is_zero:
            return FactoredRatFun.zero()
        mult: Dict[Fraction, int] = {}
        for z, m in self.factors + other.factors:
            mult[z] = mult.get(z, 0) + m
        return FactoredRatFun(
            self.constant * other.constant,
            tuple((z, m) for z, m in sorted(mult.items()) if m != 0),
        )

    def shifted(self, c: RationalLike) -> "FactoredRatFun":
        """The function T ↦ f(T + c)."""
        c = to_fraction(c)
        return FactoredRatFun(self.constant, tuple((z - c, m) for z, m in self.factors))

    def gauss_val(self, x: Point, p: PrimeLike) -> QLog:
        return gauss_val(self, x, p)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "constant": str(self.constant),
            "factors": [[str(z), m] for z, m in self.factors],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FactoredRatFun":
        return cls.build(data["constant"], ((z, m) for z, m in data.get("factors", [])))

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = [str(self.constant)]
        for z, m in self.factors:
            base = "T" if z == 0 else f"(T - {z})" if z > 0 else f"(T + {-z})"
            parts.append(base if m == 1 else f"{base}^{m}")
        return "*".join(parts)


@dataclass(frozen=True)
class DenseRatFun:
    """numerator / denominator, reduced, with a monic denominator."""

    numerator: Poly
    denominator: Poly = field(default_factory=Poly.one)

    def __post_init__(self):
        if self.denominator.is_zero:
            raise PreconditionError("Zero denominator")

    @classmethod
    def build(cls, numerator: Poly, denominator: Poly = None) -> "DenseRatFun":
        denominator = denominator if denominator is not None else Poly.one()
        if denominator.is_zero:
            raise PreconditionError("Zero denominator")
        if numerator.is_zero:
            return cls(Poly(), Poly.one())
        num, den = numerator.to_sympy(), denominator.to_sympy()
        g = num.gcd(den)
        num, den = num.exquo(g), den.exquo(g)
        lead = den.LC()
        return cls(Poly.from_sympy(num.quo_ground(lead)), Poly.from_sympy(den.quo_ground(lead)))

    @classmethod
    def from_expr(cls, expr: Any) -> "DenseRatFun":
        num, den = fraction(together(sympify(expr)))
        return cls.build(Poly.from_expr(num), Poly.from_expr(den))

    @classmethod
    def parse(cls, numerator: str, denominator: str = "1") -> "DenseRatFun":
        return cls.build(Poly.parse(numerator), Poly.parse(denominator))

    @classmethod
    def const(cls, k: RationalLike) -> "DenseRatFun":
        return cls.build(Poly.of(k))

    @property
    def is_zero(self) -> bool:
        return self.numerator.is_zero

    def as_expr(self):
        return self.numerator.as_expr() / self.denominator.as_expr()

    def shifted(self, c: RationalLike) -> "DenseRatFun":
        """The function T ↦ f(T + c)."""
        return DenseRatFun(taylor_shift(self.numerator, c), taylor_shift(self.denominator, c))

    def gauss_val(self, x: Point, p: PrimeLike) -> QLog:
        return gauss_val(self, x, p)

    def to_dict(self) -> Dict[str, str]:
        return {"num": str(self.numerator), "den": str(self.denominator)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DenseRatFun":
        return cls.parse(data["num"], data.get("den", "1"))

    def __str__(self) -> str:
        if self.denominator == Poly.one():
            return str(self.numerator)
        return f"({self.numerator})/({self.denominator})"


Coefficient = Union[FactoredRatFun, DenseRatFun]


def as_dense(f: Union[Coefficient, Poly]) -> DenseRatFun:
    if isinstance(f, DenseRatFun):
        return f
    if isinstance(f, Poly):
        return DenseRatFun.build(f)
    return f.to_dense()


def gauss_val(f: Union[Coefficient, Poly], x: Point, p: PrimeLike) -> QLog:
    """
    log_p x(f) for a rational function.

    For factored f this is val(constant) + Σ m_j·B_j with
    B_j = max(log|c - z_j|, L), and B_j = L when c = z_j. At a type-1 point
    that is a zero (pole) of f the result is NEG_INF (POS_INF).
    """
    if isinstance(f, Poly):
        return gauss_val_poly(f, x, p)
    if f.is_zero:
        return NEG_INF
    if isinstance(f, DenseRatFun):
        den = gauss_val_poly(f.denominator, x, p)
        if den == NEG_INF:
            return POS_INF
        return gauss_val_poly(f.numerator, x, p) - den
    total: QLog = val_rational(f.constant, p)
    for z, m in f.factors:
        if x.center == z:
            if x.is_type1:
                return NEG_INF if m > 0 else POS_INF
            B = x.log_radius
        else:
            B = qmax(log_distance(x.center, z, p), x.log_radius)
        total = total + m * B
    return total


def gauss_profile(
    f: Union[Coefficient, Poly], c: RationalLike, interval: Tuple[QLog, Fraction], p: PrimeLike
) -> PAF:
    """
    L ↦ gauss_val(f, x_{c,L}) on the interval, exactly.

    Factored functions break exactly at {log|c - z_j|}; dense functions use
    the Taylor-term envelopes of numerator and denominator.

    Raises:
        PreconditionError: For the zero function or an empty interval
    """
    lo, hi = interval
    if lo > hi:
        raise PreconditionError("Interval bounds are reversed")
    if f.is_zero:
        raise PreconditionError("The zero function has no finite norm profile")
    if isinstance(f, Poly):
        return poly_profile(f, c, lo, hi, p)
    if isinstance(f, DenseRatFun):
        num = poly_profile(f.numerator, c, lo, hi, p)
        den = poly_profile(f.denominator, c, lo, hi, p)
        return combine(num, den.negate(), "add")
    total = PAF.constant(lo, hi, val_rational(f.constant, p))
    for z, m in f.factors:
        d = log_distance(c, z, p)
        if d == NEG_INF:
            term = PAF.identity(lo, hi)
        else:
            term = upper_envelope([(Fraction(0), d), (Fraction(1), Fraction(0))], lo, hi)
        total = combine(total, term.map_affine(m), "add")
    return total
