"""Exception types shared across the toolkit.

Every error raised on a user-facing path derives from MbrkitError so the
CLI can catch one base class and exit nonzero with a single-line message.
"""

from __future__ import annotations


class MbrkitError(Exception):
    """Base class for all toolkit errors."""


class UnknownMetricError(MbrkitError):
    def __init__(self, metric_id: str):
        super().__init__(f"unknown metric: {metric_id!r}")
        self.metric_id = metric_id


class UnknownGroupError(MbrkitError):
    def __init__(self, group: str):
        super().__init__(f"unknown metric group: {group!r}")
        self.group = group


class ParseError(MbrkitError):
    """Malformed record in an input stream; carries the 1-based line number."""

    def __init__(self, message: str, line_no: int | None = None):
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(prefix + message)
        self.line_no = line_no


class DuplicateSegmentError(ParseError):
    def __init__(self, segment_id: str, line_no: int | None = None):
        super().__init__(f"duplicate segment_id {segment_id!r}", line_no)
        self.segment_id = segment_id


class WrongKindError(MbrkitError):
    """A pairwise operation received a qe matrix or vice versa."""


class NonFiniteScoreError(MbrkitError):
    """A score vector contains NaN or infinity."""


class SelectionRangeError(ParseError):
    def __init__(self, segment_id: str, index: int, n: int, line_no: int | None = None):
        super().__init__(
            f"selected_index {index} out of range for segment {segment_id!r} (n={n})",
            line_no,
        )
        self.segment_id = segment_id
        self.index = index
        self.n = n


class UnsupportedNativeMetricError(MbrkitError):
    def __init__(self, metric_id: str):
        super().__init__(
            f"{metric_id!r} has no native scorer; pairwise/QE matrices for it "
            "must be ingested (see the scorer companion tool)"
        )
        self.metric_id = metric_id


class MissingMatrixError(MbrkitError):
    def __init__(self, metric_id: str, segment_id: str):
        super().__init__(
            f"no score matrix for metric {metric_id!r} on segment {segment_id!r}"
        )
        self.metric_id = metric_id
        self.segment_id = segment_id


class UnknownStrategyError(MbrkitError):
    def __init__(self, strategy: str):
        super().__init__(f"unknown ensemble strategy: {strategy!r}")
        self.strategy = strategy


class PipelineNameError(MbrkitError):
    """Pipeline descriptor does not match the <qe>QE(<N>)<mbr>MBR grammar."""


class EmptyReferenceError(MbrkitError):
    def __init__(self):
        super().__init__("reference is empty")


class MissingReferenceError(MbrkitError):
    def __init__(self, segment_id: str):
        super().__init__(f"segment {segment_id!r} has no reference translation")
        self.segment_id = segment_id


class MissingExternalScoreError(MbrkitError):
    def __init__(self, metric_id: str, segment_id: str):
        super().__init__(
            f"no external score vector {metric_id!r} for segment {segment_id!r}"
        )
        self.metric_id = metric_id
        self.segment_id = segment_id


class MissingBaselineError(MbrkitError):
    def __init__(self, baseline_id: str):
        super().__init__(f"baseline system {baseline_id!r} not among evaluations")
        self.baseline_id = baseline_id


class UndefinedCorrelationError(MbrkitError):
    """Correlation is undefined (constant input vector)."""


class MissingObservationError(MbrkitError):
    def __init__(self, label: str, pairs):
        listed = ", ".join(f"({s!r}, {y!r})" for s, y in pairs)
        super().__init__(
            f"label {label!r} has no score for observations: {listed}"
        )
        self.label = label
        self.pairs = list(pairs)
