"""
Parser for affinoid domains.

Domain JSON:
    {"outer": {"center": "0", "log_radius": "0"}, "holes": [{"center": "1", "log_radius": "-2"}]}
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from padic_polygon.errors import PadicPolygonError
from padic_polygon.geometry.line import AffinoidDomain

from .base_parser import BaseParser, SchemaError

logger = logging.getLogger(__name__)


class DomainParser(BaseParser):
    """Parser for X = D^+(c_0, L_0) minus open holes."""

    def parse(
        self, data: Dict[str, Any], path: Union[str, Path, None] = None, p: Optional[int] = None
    ) -> AffinoidDomain:
        outer = self.require(data, "outer", path, dict)
        for key in ("center", "log_radius"):
            self.require(outer, key, path)
        holes = data.get("holes", [])
        if not isinstance(holes, list):
            raise SchemaError("expected list", path, "holes")
        for k, hole in enumerate(holes):
            if not isinstance(hole, dict) or "center" not in hole or "log_radius" not in hole:
                raise SchemaError("a hole needs center and log_radius", path, f"holes[{k}]")
        try:
            X = AffinoidDomain.from_dict({"outer": outer, "holes": holes})
            if p is not None:
                X.validate(p)
        except (PadicPolygonError, ValueError, TypeError) as e:
            raise SchemaError(str(e), path, "holes" if holes else "outer") from e
        logger.debug(f"Parsed domain with {len(X.holes)} holes")
        return X
