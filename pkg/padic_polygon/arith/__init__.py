"""
Exact arithmetic: p-adic valuations of rationals and rational functions in T.
"""

from .scalars import NEG_INF, POS_INF, Prime, format_qlog, to_qlog, val_rational
from .ratfun import DenseRatFun, FactoredRatFun, Poly, gauss_profile, gauss_val

__all__ = [
    "Prime",
    "POS_INF",
    "NEG_INF",
    "to_qlog",
    "format_qlog",
    "val_rational",
    "Poly",
    "FactoredRatFun",
    "DenseRatFun",
    "gauss_val",
    "gauss_profile",
]
