"""
Parser for radii profiles written by the ``profile`` command.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Union

from padic_polygon.core.radii_engine import RadiiProfile
from padic_polygon.errors import PadicPolygonError

from .base_parser import BaseParser, SchemaError

logger = logging.getLogger(__name__)


class ProfileParser(BaseParser):
    """Reads a RadiiProfile back; the embedded manifest is ignored."""

    def parse(self, data: Dict[str, Any], path: Union[str, Path, None] = None) -> RadiiProfile:
        body = data.get("profile", data)
        for field in ("p", "rank", "domain", "graph", "edges", "vertices"):
            self.require(body, field, path)
        try:
            profile = RadiiProfile.from_dict(body)
        except (PadicPolygonError, ValueError, TypeError, KeyError) as e:
            raise SchemaError(str(e), path, "profile") from e
        logger.debug(f"Read profile of rank {profile.rank} on {len(profile.edges)} edges")
        return profile
