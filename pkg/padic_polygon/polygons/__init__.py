"""
Newton polygons: the hull kernel, spectral polygons and Frobenius push-forward.
"""

from .frobenius import descent_certify, pushforward_matrix, pushforward_radii
from .polygon import NewtonPolygon, np_from_values, slopes
from .spectral import (
    ConnectionMatrix,
    DifferentialOperator,
    SpectralRadii,
    radius_oracle,
    spectral_radii_at,
)

__all__ = [
    "NewtonPolygon",
    "np_from_values",
    "slopes",
    "DifferentialOperator",
    "ConnectionMatrix",
    "SpectralRadii",
    "spectral_radii_at",
    "radius_oracle",
    "pushforward_radii",
    "pushforward_matrix",
    "descent_certify",
]
