"""MBR/QE decoding, rank ensembling, and evaluation for translation
candidate lists.

The package selects outputs from candidate files using score matrices
produced by external metric models or by the built-in lexical metrics,
combines metrics by rank, evaluates selections against references and
human MQM judgments, and renders significance reports.
"""

from .core import (
    AT_REF_SUFFIX,
    GROUP_NAMES,
    LEXICAL_METRICS,
    MBR_SUFFIX,
    CandidateSet,
    MetricKind,
    MetricSpec,
    MqmRecord,
    Orientation,
    SegmentEvaluation,
    SelectionRecord,
    all_metric_ids,
    canonical_metric_id,
    group_members,
    group_members_of_kind,
    is_lexical,
    registry_lookup,
    strip_label_suffix,
)
from .correlation import (
    CorrelationResult,
    correlate_with_mqm,
    kendall_tau,
    pearson,
    pseudoref_score,
)
from .ensemble import (
    STRATEGIES,
    RankTable,
    aggregate_ranks,
    build_rank_table,
    ensemble_select,
    rank_candidates,
)
from .errors import (
    DuplicateSegmentError,
    EmptyReferenceError,
    MbrkitError,
    MissingBaselineError,
    MissingExternalScoreError,
    MissingMatrixError,
    MissingObservationError,
    MissingReferenceError,
    NonFiniteScoreError,
    ParseError,
    PipelineNameError,
    SelectionRangeError,
    UndefinedCorrelationError,
    UnknownGroupError,
    UnknownMetricError,
    UnknownStrategyError,
    UnsupportedNativeMetricError,
    WrongKindError,
)
from .evaluation import (
    EvaluationReport,
    build_report,
    evaluate_selections,
    paired_ttest,
    render_report,
    significance_mark,
)
from .io import (
    ScoreMatrix,
    make_matrix,
    read_candidates,
    read_evaluations,
    read_matrices,
    read_mqm,
    read_selections,
    validate_matrix,
    write_candidates,
    write_evaluations,
    write_matrices,
    write_mqm,
    write_selections,
)
from .lexical import chrf, chrf_pp, native_score, sent_bleu, ter
from .mbr import (
    compute_pairwise_matrix,
    expected_utilities,
    mbr_select,
    qe_select,
)
from .pipeline import (
    PipelineSpec,
    parse_pipeline_name,
    qe_filter,
    run_pipeline,
)

__version__ = "0.1.0"

__all__ = [
    "AT_REF_SUFFIX",
    "GROUP_NAMES",
    "LEXICAL_METRICS",
    "MBR_SUFFIX",
    "STRATEGIES",
    "CandidateSet",
    "CorrelationResult",
    "DuplicateSegmentError",
    "EmptyReferenceError",
    "EvaluationReport",
    "MbrkitError",
    "MetricKind",
    "MetricSpec",
    "MissingBaselineError",
    "MissingExternalScoreError",
    "MissingMatrixError",
    "MissingObservationError",
    "MissingReferenceError",
    "MqmRecord",
    "NonFiniteScoreError",
    "Orientation",
    "ParseError",
    "PipelineNameError",
    "PipelineSpec",
    "RankTable",
    "ScoreMatrix",
    "SegmentEvaluation",
    "SelectionRangeError",
    "SelectionRecord",
    "UndefinedCorrelationError",
    "UnknownGroupError",
    "UnknownMetricError",
    "UnknownStrategyError",
    "UnsupportedNativeMetricError",
    "WrongKindError",
    "aggregate_ranks",
    "all_metric_ids",
    "build_rank_table",
    "build_report",
    "canonical_metric_id",
    "chrf",
    "chrf_pp",
    "compute_pairwise_matrix",
    "correlate_with_mqm",
    "ensemble_select",
    "evaluate_selections",
    "expected_utilities",
    "group_members",
    "group_members_of_kind",
    "is_lexical",
    "kendall_tau",
    "make_matrix",
    "mbr_select",
    "native_score",
    "paired_ttest",
    "parse_pipeline_name",
    "pearson",
    "pseudoref_score",
    "qe_filter",
    "qe_select",
    "rank_candidates",
    "read_candidates",
    "read_evaluations",
    "read_matrices",
    "read_mqm",
    "read_selections",
    "registry_lookup",
    "render_report",
    "run_pipeline",
    "sent_bleu",
    "significance_mark",
    "strip_label_suffix",
    "ter",
    "validate_matrix",
    "write_candidates",
    "write_evaluations",
    "write_matrices",
    "write_mqm",
    "write_selections",
]
