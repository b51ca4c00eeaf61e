"""
Storage and output modules for padic-polygon.

This package contains the result writers:
- json_storage: JSON documents with an embedded run manifest
- dot_emitter: Graphviz output of graphs
- csv_emitter: breakpoint tables of profiles
- emit: format dispatch
"""

from .csv_emitter import paf_to_csv, profile_to_csv
from .dot_emitter import graph_to_dot
from .emit import FORMATS, emit, json_payload
from .json_storage import JSONStorage, render_json

__all__ = [
    "JSONStorage",
    "render_json",
    "graph_to_dot",
    "paf_to_csv",
    "profile_to_csv",
    "emit",
    "json_payload",
    "FORMATS",
]
