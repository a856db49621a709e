"""Metric metadata shared with the decoding toolkit.

metrics.json duplicates the toolkit's registry table (metric id, kind,
orientation) so emitted matrix lines carry the same orientation strings the
toolkit validates against. The file is data, not configuration: it must
stay in sync with the toolkit's registry, and the test suite checks that.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Mapping

from .errors import UnknownMetricError

REFERENCE_BASED = "reference_based"
QE = "qe"
AT_REF_SUFFIX = "@ref"


@dataclass(frozen=True)
class MetricInfo:
    """One metric's identity, kind, and score orientation."""

    metric_id: str
    kind: str
    orientation: str


def _load_table() -> dict[str, MetricInfo]:
    text = resources.files("py_scorer").joinpath("metrics.json").read_text("utf-8")
    raw = json.loads(text)
    table: dict[str, MetricInfo] = {}
    for metric_id, entry in raw.items():
        table[metric_id] = MetricInfo(
            metric_id=metric_id,
            kind=entry["kind"],
            orientation=entry["orientation"],
        )
    return table


METRICS: Mapping[str, MetricInfo] = _load_table()
_BY_LOWER = {metric_id.lower(): metric_id for metric_id in METRICS}


def canonical_metric_id(name: str) -> str:
    """Resolve a metric id case-insensitively.

    Raises UnknownMetricError naming the known ids when nothing matches.
    """
    resolved = _BY_LOWER.get(name.strip().lower())
    if resolved is None:
        known = ", ".join(METRICS)
        raise UnknownMetricError(f"unknown metric id {name!r}; known ids: {known}")
    return resolved


def metric_info(metric_id: str) -> MetricInfo:
    """Look up metadata for a canonical metric id."""
    info = METRICS.get(metric_id)
    if info is None:
        return METRICS[canonical_metric_id(metric_id)]
    return info
