"""Adapter that scores translation candidates with published metric models.

Reads the decoding toolkit's candidate JSONL, runs a metric model (or a
deterministic hash simulator) over every candidate in pairwise, qe, or
at_ref mode, and writes score-matrix JSONL the toolkit ingests unchanged.
Orientation metadata comes from a static copy of the toolkit's registry
table so both sides agree on which direction is better.
"""

from .backends import (
    CHECKPOINTS,
    Backend,
    BackendLoader,
    Checkpoint,
    HashSimBackend,
    ScoreRow,
    build_loaders,
    load_backend,
)
from .errors import (
    DeviceOomError,
    MissingReferenceError,
    ModeKindError,
    ModelLoadError,
    ScorerError,
    UnknownMetricError,
    WireError,
)
from .jobs import (
    MODES,
    ScorerJob,
    run_job,
    score_at_ref,
    score_pairwise,
    score_qe,
)
from .registry import (
    AT_REF_SUFFIX,
    METRICS,
    MetricInfo,
    canonical_metric_id,
    metric_info,
)
from .wire import Segment, read_segments, write_matrix_line

__version__ = "0.1.0"

__all__ = [
    "AT_REF_SUFFIX",
    "CHECKPOINTS",
    "METRICS",
    "MODES",
    "Backend",
    "BackendLoader",
    "Checkpoint",
    "DeviceOomError",
    "HashSimBackend",
    "MetricInfo",
    "MissingReferenceError",
    "ModeKindError",
    "ModelLoadError",
    "ScoreRow",
    "ScorerError",
    "ScorerJob",
    "Segment",
    "UnknownMetricError",
    "WireError",
    "build_loaders",
    "canonical_metric_id",
    "load_backend",
    "metric_info",
    "read_segments",
    "run_job",
    "score_at_ref",
    "score_pairwise",
    "score_qe",
    "write_matrix_line",
]
