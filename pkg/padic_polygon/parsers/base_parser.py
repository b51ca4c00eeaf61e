"""
Base parser class for padic-polygon inputs.

This module defines the abstract base class that every JSON input parser
implements, and the errors they raise.
"""

import json
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Optional, Union

from padic_polygon.config import PolygonConfig, load_default_config
from padic_polygon.errors import PadicPolygonError

logger = logging.getLogger(__name__)


class ParserError(PadicPolygonError):
    """Base exception for parser errors."""

    pass


class SchemaError(ParserError):
    """
    Exception raised when a document does not match its schema.

    Carries the file path, the offending field and, for JSON syntax errors,
    the line number.
    """

    def __init__(
        self,
        message: str,
        path: Union[str, Path, None] = None,
        field: str = "",
        line: Optional[int] = None,
    ):
        self.path = str(path) if path is not None else "<memory>"
        self.field = field
        self.line = line
        where = self.path if line is None else f"{self.path}:{line}"
        if field:
            where = f"{where} [{field}]"
        super().__init__(f"{where}: {message}")


class BaseParser(ABC):
    """
    Abstract base class for all input parsers.

    All parsers must implement the parse() method.
    """

    def __init__(self, config: Optional[PolygonConfig] = None):
        """
        Initialize the parser.

        Args:
            config: Optional configuration
        """
        self.config = config or load_default_config()
        self.name = self.__class__.__name__

    def load(self, path: Union[str, Path]) -> Dict[str, Any]:
        """
        Read a JSON document.

        Args:
            path: File to read

        Returns:
            The decoded JSON object

        Raises:
            ParserError: If the file is missing
            SchemaError: If the file is not a JSON object
        """
        path = Path(path)
        if not path.exists():
            raise ParserError(f"Input file not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise SchemaError(e.msg, path, line=e.lineno) from e
        if not isinstance(data, dict):
            raise SchemaError("top level must be an object", path)
        logger.debug(f"{self.name} loaded {path}")
        return data

    @abstractmethod
    def parse(self, data: Dict[str, Any], path: Union[str, Path, None] = None) -> Any:
        """
        Turn a decoded document into a typed value.

        Args:
            data: Decoded JSON object
            path: Source file, for diagnostics

        Raises:
            SchemaError: On any schema violation
        """
        pass

    def load_and_parse(self, path: Union[str, Path]) -> Any:
        """
        Convenience method to load and parse in one call.

        Args:
            path: File to read

        Returns:
            Parsed value
        """
        return self.parse(self.load(path), path)

    @staticmethod
    def require(
        data: Dict[str, Any], field: str, path: Union[str, Path, None] = None, kind: type = object
    ) -> Any:
        """Return data[field], raising SchemaError if it is missing or of the wrong type."""
        if field not in data:
            raise SchemaError("missing required field", path, field)
        value = data[field]
        if not isinstance(value, kind):
            raise SchemaError(f"expected {kind.__name__}, got {type(value).__name__}", path, field)
        return value
