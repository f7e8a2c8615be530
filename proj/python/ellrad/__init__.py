"""Radii of random ellipsoid sections and least-squares recovery from Gaussian information."""

import json as _json

from ._ellrad import *  # noqa: F401,F403
from ._ellrad import CSV_HEADER, run_sweep as _run_sweep


def sweep(config):
    """Run a sweep from a config dict; returns (csv_text, summary_dict)."""
    csv_text, summary = _run_sweep(_json.dumps(config))
    return csv_text, _json.loads(summary)


__all__ = [name for name in dir() if not name.startswith("_")]
