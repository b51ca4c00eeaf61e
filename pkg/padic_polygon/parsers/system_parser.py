"""
Parsers for differential systems: operators and connection matrices.

Operator JSON:
    {"p": 3, "rank": 2, "coeffs": [{"constant": "1", "factors": [["0", -1]]}, ...]}
Matrix JSON:
    {"p": 3, "rank": 2, "entries": [["num", "den"], ...]}
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from padic_polygon.arith.scalars import as_prime
from padic_polygon.errors import PadicPolygonError
from padic_polygon.polygons.spectral import (
    ConnectionMatrix,
    DifferentialOperator,
    coefficient_from_dict,
)

from .base_parser import BaseParser, SchemaError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path, None]
_BAD_VALUE = (PadicPolygonError, ValueError, TypeError, KeyError)


def read_prime(data: Dict[str, Any], path: PathLike = None, override: Optional[int] = None) -> int:
    """
    The residue characteristic of a document.

    ``override`` (a CLI flag or config value) wins over the "p" field.

    Raises:
        SchemaError: If no p is given or p is not a prime
    """
    value = override if override is not None else data.get("p")
    if value is None:
        raise SchemaError("missing required field", path, "p")
    try:
        return as_prime(int(value))
    except _BAD_VALUE as e:
        raise SchemaError(str(e), path, "p") from e


class OperatorParser(BaseParser):
    """Parser for scalar differential operators L = d^r + g_1 d^{r-1} + ... + g_r."""

    def parse(self, data: Dict[str, Any], path: PathLike = None) -> DifferentialOperator:
        coeffs = self.require(data, "coeffs", path, list)
        if not coeffs:
            raise SchemaError("an operator needs at least one coefficient", path, "coeffs")
        parsed = []
        for k, item in enumerate(coeffs):
            field = f"coeffs[{k}]"
            if not isinstance(item, dict):
                raise SchemaError("expected object", path, field)
            try:
                parsed.append(coefficient_from_dict(item))
            except _BAD_VALUE as e:
                raise SchemaError(str(e), path, field) from e
        rank = data.get("rank", len(parsed))
        if not isinstance(rank, int) or rank != len(parsed):
            raise SchemaError(
                f"rank {rank!r} does not match {len(parsed)} coefficients", path, "rank"
            )
        op = DifferentialOperator.build(parsed)
        logger.debug(f"Parsed operator of rank {op.rank} (factored: {op.is_factored})")
        return op


class MatrixParser(BaseParser):
    """Parser for connection matrices of Y' = G·Y."""

    def parse(self, data: Dict[str, Any], path: PathLike = None) -> ConnectionMatrix:
        rank = self.require(data, "rank", path, int)
        entries = self.require(data, "entries", path, list)
        if rank < 1:
            raise SchemaError("rank must be positive", path, "rank")
        try:
            G = ConnectionMatrix.from_dict({"rank": rank, "entries": entries})
        except _BAD_VALUE as e:
            raise SchemaError(str(e), path, "entries") from e
        logger.debug(f"Parsed connection matrix of rank {G.rank}")
        return G


def system_parser(data: Dict[str, Any], path: PathLike = None, **kwargs) -> BaseParser:
    """Pick the parser from the document's keys."""
    if "coeffs" in data:
        return OperatorParser(**kwargs)
    if "entries" in data:
        return MatrixParser(**kwargs)
    raise SchemaError('expected "coeffs" (operator) or "entries" (matrix)', path)
