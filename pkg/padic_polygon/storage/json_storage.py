"""
JSON storage for padic-polygon results.

Payloads are written with sorted keys and canonical rational strings, and
carry the manifest of the run that produced them.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from padic_polygon.manifest import RunManifest, canonical_json

logger = logging.getLogger(__name__)


def render_json(payload: Dict[str, Any], manifest: Optional[RunManifest] = None) -> str:
    """Deterministic JSON text of a payload, manifest embedded under "manifest"."""
    data = dict(payload)
    if manifest is not None:
        data["manifest"] = manifest.to_dict()
    return canonical_json(data)


class JSONStorage:
    """
    JSON file storage for one result document.

    Supports saving, loading, and reading back the embedded manifest.
    """

    def __init__(self, file_path: Union[str, Path]):
        """
        Initialize JSON storage.

        Args:
            file_path: Path to JSON file
        """
        self.file_path = Path(file_path)
        self.file_path.parent.mkdir(parents=True, exist_ok=True)

    def save(self, payload: Dict[str, Any], manifest: Optional[RunManifest] = None) -> None:
        """
        Save a payload.

        Args:
            payload: JSON-ready dictionary (rationals already as strings)
            manifest: Run manifest to embed
        """
        try:
            with open(self.file_path, "w", encoding="utf-8") as f:
                f.write(render_json(payload, manifest))
            logger.info(f"Saved results to {self.file_path}")
        except (IOError, TypeError) as e:
            logger.error(f"Failed to save to {self.file_path}: {e}")
            raise

    def load(self) -> Dict[str, Any]:
        """
        Load the stored document.

        Returns:
            The decoded document, empty if the file is missing or unreadable
        """
        if not self.file_path.exists():
            logger.debug(f"No existing file at {self.file_path}")
            return {}

        try:
            with open(self.file_path, "r", encoding="utf-8") as f:
                return json.load(f)
        except (json.JSONDecodeError, IOError) as e:
            logger.error(f"Failed to load from {self.file_path}: {e}")
            return {}

    def load_manifest(self) -> Optional[Dict[str, Any]]:
        """
        Load the embedded manifest.

        Returns:
            Manifest dictionary, or None if absent
        """
        return self.load().get("manifest")
