"""
Input assembly for the command line.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

from padic_polygon.config import PolygonConfig, load_default_config
from padic_polygon.geometry.line import AffinoidDomain
from padic_polygon.polygons.spectral import ConnectionMatrix, DifferentialOperator

from .base_parser import BaseParser, SchemaError
from .domain_parser import DomainParser
from .system_parser import read_prime, system_parser

logger = logging.getLogger(__name__)


@dataclass
class ParsedInputs:
    """Typed inputs of one run."""

    system: Union[DifferentialOperator, ConnectionMatrix]
    domain: AffinoidDomain
    p: int
    flags: Dict[str, Any] = field(default_factory=dict)
    paths: Dict[str, str] = field(default_factory=dict)

    @property
    def is_operator(self) -> bool:
        return isinstance(self.system, DifferentialOperator)

    def operator(self) -> DifferentialOperator:
        """The operator, or a SchemaError naming the file when a matrix was given."""
        if not self.is_operator:
            raise SchemaError(
                "this command needs an operator, got a matrix", self.paths.get("input")
            )
        return self.system


def parse_inputs(
    input_path: Union[str, Path],
    domain_path: Union[str, Path, None] = None,
    config: Optional[PolygonConfig] = None,
) -> ParsedInputs:
    """
    Read an operator or matrix file and its domain.

    The domain comes from ``domain_path``, else from a "domain" field of the
    input file, else defaults to the closed unit disk D^+(0, 0).

    Args:
        input_path: Operator or matrix JSON
        domain_path: Optional domain JSON
        config: Run configuration; ``config.prime`` overrides the file's "p"

    Returns:
        ParsedInputs

    Raises:
        ParserError: If a file is missing
        SchemaError: On any schema violation, including a missing or non-prime p
    """
    config = config or load_default_config()
    reader = DomainParser(config)
    data = reader.load(input_path)
    system = system_parser(data, input_path, config=config).parse(data, input_path)
    p = read_prime(data, input_path, override=config.prime)

    paths = {"input": str(input_path)}
    if domain_path is not None:
        domain = reader.parse(reader.load(domain_path), domain_path, p)
        paths["domain"] = str(domain_path)
    elif "domain" in data:
        domain = reader.parse(BaseParser.require(data, "domain", input_path, dict), input_path, p)
    else:
        domain = AffinoidDomain.disk()

    flags = {"oracle_depth": config.oracle_depth, "max_frobenius": config.max_frobenius}
    logger.info(
        f"Read {'operator' if isinstance(system, DifferentialOperator) else 'matrix'} "
        f"of rank {system.rank}, p = {p}, {len(domain.holes)} holes"
    )
    return ParsedInputs(system, domain, p, flags, paths)
