"""
Run manifests.

Every emitted JSON file embeds the manifest of the run that produced it:
tool version, SHA-256 digests of the inputs, p and the flags. The wall time
is recorded but left out of the digest, so two runs on the same inputs and
flags write byte-identical results.
"""

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

from padic_polygon import __version__
from padic_polygon.config import PolygonConfig

logger = logging.getLogger(__name__)


def file_digest(path: Union[str, Path]) -> str:
    """SHA-256 of a file's bytes."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def canonical_json(data: Any) -> str:
    """Sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@dataclass
class RunManifest:
    """Provenance of one run."""

    command: str
    p: Optional[int] = None
    inputs: Dict[str, str] = field(default_factory=dict)
    flags: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[str] = None
    tool_version: str = __version__
    wall_time: Optional[float] = None
    _started: float = field(default_factory=time.perf_counter, repr=False)

    @classmethod
    def start(
        cls,
        command: str,
        paths: Optional[Dict[str, Union[str, Path]]] = None,
        p: Optional[int] = None,
        config: Optional[PolygonConfig] = None,
    ) -> "RunManifest":
        """
        Open a manifest for a command.

        Args:
            command: CLI command name
            paths: Input files by role (e.g. "input", "domain")
            p: Residue characteristic
            config: Run configuration (flags and seed are copied from it)
        """
        inputs = {role: file_digest(path) for role, path in sorted((paths or {}).items())}
        flags: Dict[str, Any] = {}
        seed = None
        if config is not None:
            flags = {
                "oracle_depth": config.oracle_depth,
                "max_frobenius": config.max_frobenius,
                "cyclic_rank_cap": config.rank_cap,
                "max_rank": config.max_rank,
            }
            seed = config.seed
        return cls(command=command, p=p, inputs=inputs, flags=flags, seed=seed)

    def finish(self) -> "RunManifest":
        self.wall_time = round(time.perf_counter() - self._started, 3)
        return self

    def body(self) -> Dict[str, Any]:
        """Everything the digest covers."""
        return {
            "command": self.command,
            "tool_version": self.tool_version,
            "p": self.p,
            "inputs": dict(self.inputs),
            "flags": dict(self.flags),
            "seed": self.seed,
        }

    def digest(self) -> str:
        return hashlib.sha256(canonical_json(self.body()).encode("utf-8")).hexdigest()

    def to_dict(self) -> Dict[str, Any]:
        return {**self.body(), "digest": self.digest()}

    def save(self, path: Union[str, Path]) -> None:
        """Write the manifest, wall time included, next to the results."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(canonical_json({**self.to_dict(), "wall_time": self.wall_time}))
        logger.debug(f"Saved manifest to {path}")

    @classmethod
    def load(cls, path: Union[str, Path]) -> Optional["RunManifest"]:
        path = Path(path)
        if not path.exists():
            return None
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
            return cls(
                command=data["command"],
                p=data.get("p"),
                inputs=dict(data.get("inputs", {})),
                flags=dict(data.get("flags", {})),
                seed=data.get("seed"),
                tool_version=data.get("tool_version", __version__),
                wall_time=data.get("wall_time"),
            )
        except (json.JSONDecodeError, IOError, KeyError) as e:
            logger.error(f"Failed to load manifest from {path}: {e}")
            return None
