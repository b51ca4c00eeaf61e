"""
The Berkovich affine line over Q_p and piecewise-affine functions on it.
"""

from .line import AffinoidDomain, Edge, Point, SkeletonGraph, candidate_graph, skeleton
from .piecewise import PAF, BranchSlopes, Piece, combine, laplacian

__all__ = [
    "Point",
    "Edge",
    "AffinoidDomain",
    "SkeletonGraph",
    "skeleton",
    "candidate_graph",
    "Piece",
    "PAF",
    "combine",
    "BranchSlopes",
    "laplacian",
]
