"""
Exception hierarchy for padic-polygon.

Every error raised by the library derives from PadicPolygonError so the CLI
can catch one type and map it to exit code 1. Parser errors live in
padic_polygon.parsers.base_parser.
"""


class PadicPolygonError(Exception):
    """Base exception for all padic-polygon errors."""

    pass


class ValuationError(PadicPolygonError):
    """Raised on a zero valuation input or a non-prime residue characteristic."""

    pass


class DomainMembershipError(PadicPolygonError):
    """Raised when a point lies outside the affinoid or the affinoid is malformed."""

    pass


class PiecewiseDomainError(PadicPolygonError):
    """Raised on evaluation outside a PAF domain or on mismatched domains."""

    pass


class PolygonInputError(PadicPolygonError):
    """Raised on malformed valuation sequences."""

    pass


class CyclicVectorError(PadicPolygonError):
    """Raised when the cyclic-vector search is exhausted."""

    pass


class PushforwardError(PadicPolygonError):
    """Raised when a Frobenius push-forward exceeds the rank cap."""

    pass


class PreconditionError(PadicPolygonError):
    """Raised when an operation precondition is violated."""

    pass
