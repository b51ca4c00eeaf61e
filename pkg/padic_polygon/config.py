"""
Configuration management for padic-polygon.
"""

import logging
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

logger = logging.getLogger(__name__)

SEED_ENV = "PADIC_POLYGON_SEED"


@dataclass
class PolygonConfig:
    """Configuration data class for padic-polygon runs."""

    # Arithmetic
    prime: Optional[int] = None

    # Radius oracle
    oracle_depth: int = 150

    # Frobenius certification
    max_frobenius: int = 6
    # None follows max_rank
    cyclic_rank_cap: Optional[int] = None
    max_rank: int = 64
    max_cyclic_attempts: int = 12

    # Output
    output_format: str = "json"
    approx: bool = False
    verbose: bool = False

    # Recorded in the run manifest only
    seed: Optional[str] = None

    def frobenius_options(self) -> Dict[str, Optional[int]]:
        """Keyword arguments shared by every Frobenius entry point."""
        return {
            "max_iter": self.max_frobenius,
            "cyclic_rank_cap": self.cyclic_rank_cap,
            "max_rank": self.max_rank,
            "max_attempts": self.max_cyclic_attempts,
        }

    @property
    def rank_cap(self) -> int:
        """Largest rank handed to the cyclic-vector search."""
        if self.cyclic_rank_cap is None:
            return self.max_rank
        return min(self.cyclic_rank_cap, self.max_rank)

    def override(self, **values: Any) -> "PolygonConfig":
        """Apply CLI flags; None values leave the current setting in place."""
        for key, value in values.items():
            if value is None:
                continue
            if not hasattr(self, key):
                raise AttributeError(f"Unknown configuration key: {key}")
            setattr(self, key, value)
        return self

    @classmethod
    def from_yaml(cls, path: Path) -> "PolygonConfig":
        """
        Load configuration from YAML file.

        Args:
            path: Path to YAML configuration file

        Returns:
            PolygonConfig instance
        """
        path = Path(path)
        if not path.exists():
            logger.warning(f"Config file not found: {path}, using defaults")
            return cls()

        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}

            known = {f.name for f in fields(cls)}
            unknown = sorted(set(data) - known)
            if unknown:
                raise ValueError(f"unknown keys {unknown}")
            if data.get("seed") is not None:
                data["seed"] = str(data["seed"])

            return cls(**data)
        except Exception as e:
            logger.error(f"Failed to load config from {path}: {e}")
            return cls()

    def from_env(self) -> "PolygonConfig":
        """Overlay PADIC_POLYGON_SEED; the seed is recorded, never used."""
        seed = os.environ.get(SEED_ENV)
        if seed:
            self.seed = seed
            logger.debug(f"Recorded seed {seed} from {SEED_ENV}")
        return self


def load_default_config() -> PolygonConfig:
    """
    Load default configuration.

    Returns:
        PolygonConfig instance with defaults
    """
    return PolygonConfig().from_env()
