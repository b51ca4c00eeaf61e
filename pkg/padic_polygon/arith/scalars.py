"""
Exact arithmetic on the base-p logarithmic scale.

Every norm, radius and slope in the package is a QLog: an exact
``fractions.Fraction`` holding log_p of a positive real, or one of the two
sentinels ``POS_INF`` / ``NEG_INF``. Base-p logarithms keep all quantities
rational; slopes and Laplacians are ratios of logarithms and therefore agree
with the natural-log conventions.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from sympy import isprime, multiplicity
from sympy.ntheory import digits

from padic_polygon.errors import ValuationError

logger = logging.getLogger(__name__)


class _Infinity:
    """Signed infinity sentinel compatible with Fraction comparisons."""

    __slots__ = ("_sign",)

    def __init__(self, sign: int):
        self._sign = sign

    @property
    def sign(self) -> int:
        return self._sign

    def __repr__(self) -> str:
        return "POS_INF" if self._sign > 0 else "NEG_INF"

    def __str__(self) -> str:
        return "+inf" if self._sign > 0 else "-inf"

    def __eq__(self, other) -> bool:
        return isinstance(other, _Infinity) and other._sign == self._sign

    def __hash__(self) -> int:
        return hash(("qlog-infinity", self._sign))

    def __lt__(self, other) -> bool:
        if isinstance(other, _Infinity):
            return self._sign < other._sign
        return self._sign < 0

    def __gt__(self, other) -> bool:
        if isinstance(other, _Infinity):
            return self._sign > other._sign
        return self._sign > 0

    def __le__(self, other) -> bool:
        return self == other or self < other

    def __ge__(self, other) -> bool:
        return self == other or self > other

    def __neg__(self) -> "_Infinity":
        return NEG_INF if self._sign > 0 else POS_INF

    def __add__(self, other) -> "_Infinity":
        if isinstance(other, _Infinity) and other._sign != self._sign:
            raise ValuationError("Sum of opposite infinities is undefined")
        return self

    __radd__ = __add__

    def __sub__(self, other) -> "_Infinity":
        return self + (-other)

    def __rsub__(self, other) -> "_Infinity":
        return (-self) + other

    def __mul__(self, other) -> "_Infinity":
        if isinstance(other, _Infinity):
            return POS_INF if self._sign == other._sign else NEG_INF
        if other == 0:
            raise ValuationError("Product of an infinity and zero is undefined")
        return self if other > 0 else -self

    __rmul__ = __mul__

    def __truediv__(self, other) -> "_Infinity":
        if isinstance(other, _Infinity) or other == 0:
            raise ValuationError(f"Cannot divide {self} by {other}")
        return self if other > 0 else -self


POS_INF = _Infinity(1)
NEG_INF = _Infinity(-1)

QLog = Union[Fraction, _Infinity]
RationalLike = Union[int, str, Fraction]


def is_finite(value: QLog) -> bool:
    """Return True unless value is one of the infinity sentinels."""
    return not isinstance(value, _Infinity)


def to_fraction(value: RationalLike) -> Fraction:
    """
    Coerce an int, a canonical "a/b" string or a Fraction to a Fraction.

    Raises:
        ValuationError: If the value cannot be read as an exact rational
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValuationError(f"Not a rational: {value!r}")
    try:
        return Fraction(value)
    except (TypeError, ValueError) as e:
        raise ValuationError(f"Not an exact rational: {value!r}") from e


def to_qlog(value: Union[RationalLike, _Infinity]) -> QLog:
    """Read a QLog, accepting the strings "+inf"/"inf"/"-inf" for the sentinels."""
    if isinstance(value, _Infinity):
        return value
    if isinstance(value, str):
        text = value.strip()
        if text in ("+inf", "inf"):
            return POS_INF
        if text == "-inf":
            return NEG_INF
    return to_fraction(value)


def format_qlog(value: QLog) -> str:
    """Canonical string form: "a/b", "a" for integers, "+inf"/"-inf" for sentinels."""
    return str(value)


@dataclass(frozen=True)
class Prime:
    """A residue characteristic p; primality is checked at construction."""

    p: int

    def __post_init__(self):
        if isinstance(self.p, bool) or not isinstance(self.p, int):
            raise ValuationError(f"Prime must be an integer, got {self.p!r}")
        if self.p < 2 or not isprime(self.p):
            raise ValuationError(f"Not a prime: {self.p}")

    def __int__(self) -> int:
        return self.p


PrimeLike = Union[int, Prime]


def as_prime(p: PrimeLike) -> int:
    """Return the integer value of p after validating it."""
    if isinstance(p, Prime):
        return p.p
    return Prime(p).p


def padic_valuation(q: RationalLike, p: PrimeLike) -> int:
    """
    Return v_p(q), the exponent of p in the nonzero rational q.

    Raises:
        ValuationError: If q is zero
    """
    p = as_prime(p)
    q = to_fraction(q)
    if q == 0:
        raise ValuationError("Valuation of zero is undefined")
    return multiplicity(p, abs(q.numerator)) - multiplicity(p, q.denominator)


def val_rational(q: RationalLike, p: PrimeLike) -> Fraction:
    """
    Return log_p|q|_p = -v_p(q).

    Args:
        q: Nonzero exact rational
        p: Residue characteristic

    Returns:
        The base-p logarithm of the p-adic absolute value

    Raises:
        ValuationError: If q is zero or p is not prime
    """
    return Fraction(-padic_valuation(q, p))


def log_distance(a: RationalLike, b: RationalLike, p: PrimeLike) -> QLog:
    """Return log_p|a - b|, or NEG_INF when a == b."""
    diff = to_fraction(a) - to_fraction(b)
    if diff == 0:
        return NEG_INF
    return val_rational(diff, p)


def val_factorial(n: int, p: PrimeLike) -> Fraction:
    """
    Return log_p|n!|_p = -v_p(n!) by Legendre's digit-sum formula.

    v_p(n!) = (n - s_p(n)) / (p - 1) where s_p is the base-p digit sum.
    """
    p = as_prime(p)
    if n < 0:
        raise ValuationError(f"Factorial of a negative integer: {n}")
    if n == 0:
        return Fraction(0)
    digit_sum = sum(digits(n, p)[1:])
    return Fraction(-(n - digit_sum), p - 1)


def omega_log(p: PrimeLike) -> Fraction:
    """Return log_p ω = -1/(p-1), where ω = |p|^{1/(p-1)}."""
    p = as_prime(p)
    return Fraction(-1, p - 1)


def qmax(*values: QLog) -> QLog:
    """Maximum of QLog values (sentinels included)."""
    result = values[0]
    for value in values[1:]:
        if value > result:
            result = value
    return result


def qmin(*values: QLog) -> QLog:
    """Minimum of QLog values (sentinels included)."""
    result = values[0]
    for value in values[1:]:
        if value < result:
            result = value
    return result
