"""
Input parsers for padic-polygon.

This package validates the JSON documents the command line reads:
- OperatorParser / MatrixParser: differential systems
- DomainParser: affinoid domains
- ProfileParser: radii profiles written by a previous run
"""

from .base_parser import BaseParser, ParserError, SchemaError
from .domain_parser import DomainParser
from .inputs import ParsedInputs, parse_inputs
from .profile_parser import ProfileParser
from .system_parser import MatrixParser, OperatorParser, read_prime

__all__ = [
    "BaseParser",
    "ParserError",
    "SchemaError",
    "OperatorParser",
    "MatrixParser",
    "DomainParser",
    "ProfileParser",
    "ParsedInputs",
    "parse_inputs",
    "read_prime",
]
