"""Line-delimited JSON readers and writers for the toolkit's wire formats.

Five record shapes share one convention (UTF-8, one JSON object per line):
candidate sets, score matrices, selection records, MQM records, and
per-segment evaluation scores. Readers stream and validate, reporting the
offending 1-based line number; writers emit keys in a fixed order with
shortest round-trip float formatting, so equal inputs give byte-identical
files.

Pairwise matrices are row-major with scores[i*n + j] holding the metric
value of candidate i scored against candidate j as the pseudoreference;
they are never assumed symmetric.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Mapping

from .core import (
    AT_REF_SUFFIX,
    CandidateSet,
    MetricKind,
    MqmRecord,
    Orientation,
    SegmentEvaluation,
    SelectionRecord,
    canonical_metric_id,
    registry_lookup,
    strip_label_suffix,
)
from .errors import (
    DuplicateSegmentError,
    MbrkitError,
    ParseError,
    SelectionRangeError,
)

PAIRWISE = "pairwise"
QE = "qe"


@dataclass(frozen=True)
class ScoreMatrix:
    """Scores of one metric on one segment.

    kind "pairwise" stores a row-major n×n grid (hypothesis i against
    pseudoreference j); kind "qe" stores n per-candidate values. A
    metric_id with the "@ref" suffix marks a qe-shaped vector holding a
    reference-based metric's scores against the true reference.
    """

    segment_id: str
    metric_id: str
    kind: str
    orientation: Orientation
    n: int
    scores: tuple[float, ...]

    @property
    def base_metric_id(self) -> str:
        base, _ = strip_label_suffix(self.metric_id)
        return base

    def value(self, i: int, j: int) -> float:
        return self.scores[i * self.n + j]

    def row(self, i: int) -> tuple[float, ...]:
        return self.scores[i * self.n : (i + 1) * self.n]


def validate_matrix(matrix: ScoreMatrix, line_no: int | None = None) -> None:
    """Check kind/metric consistency, orientation, length, and finiteness."""
    base, suffix = strip_label_suffix(matrix.metric_id)
    if suffix not in ("", AT_REF_SUFFIX):
        raise ParseError(f"invalid metric label {matrix.metric_id!r}", line_no)
    spec = registry_lookup(base)

    if matrix.kind not in (PAIRWISE, QE):
        raise ParseError(f"unknown matrix kind {matrix.kind!r}", line_no)
    if suffix == AT_REF_SUFFIX:
        if spec.kind is not MetricKind.REFERENCE_BASED:
            raise ParseError(
                f"'@ref' requires a reference-based metric, got {base!r}", line_no
            )
        if matrix.kind != QE:
            raise ParseError(
                f"'@ref' vectors are qe-shaped, got kind {matrix.kind!r}", line_no
            )
    elif matrix.kind == PAIRWISE and spec.kind is not MetricKind.REFERENCE_BASED:
        raise ParseError(f"kind 'pairwise' contradicts qe metric {base!r}", line_no)
    elif matrix.kind == QE and spec.kind is not MetricKind.QE:
        raise ParseError(
            f"kind 'qe' contradicts reference-based metric {base!r}"
            f" (use {base + AT_REF_SUFFIX!r} for reference-scored vectors)",
            line_no,
        )

    if matrix.orientation is not spec.orientation:
        raise ParseError(
            f"orientation {matrix.orientation.value!r} contradicts metric {base!r}",
            line_no,
        )
    if matrix.n < 1:
        raise ParseError("n must be >= 1", line_no)
    expected = matrix.n * matrix.n if matrix.kind == PAIRWISE else matrix.n
    if len(matrix.scores) != expected:
        raise ParseError(
            f"expected {expected} scores for kind {matrix.kind!r} with n={matrix.n},"
            f" got {len(matrix.scores)}",
            line_no,
        )
    for v in matrix.scores:
        if not math.isfinite(v):
            raise ParseError("scores contain a non-finite value", line_no)


def make_matrix(
    segment_id: str, metric_id: str, kind: str, n: int, scores: Iterable[float]
) -> ScoreMatrix:
    """Build a validated ScoreMatrix, filling orientation from the registry."""
    base, suffix = strip_label_suffix(metric_id)
    canonical = canonical_metric_id(base)
    matrix = ScoreMatrix(
        segment_id,
        canonical + suffix,
        kind,
        registry_lookup(canonical).orientation,
        n,
        tuple(float(s) for s in scores),
    )
    validate_matrix(matrix)
    return matrix


# --- low-level record plumbing ------------------------------------------------


def _records(stream: IO[str]) -> Iterator[tuple[int, dict]]:
    for line_no, raw in enumerate(stream, start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg})", line_no) from None
        if not isinstance(obj, dict):
            raise ParseError("record is not a JSON object", line_no)
        yield line_no, obj


def _get_str(obj: dict, key: str, line_no: int, optional: bool = False) -> str | None:
    if key not in obj or obj[key] is None:
        if optional:
            return None
        raise ParseError(f"missing field {key!r}", line_no)
    value = obj[key]
    if not isinstance(value, str):
        raise ParseError(f"field {key!r} must be a string", line_no)
    return value


def _get_int(obj: dict, key: str, line_no: int) -> int:
    if key not in obj:
        raise ParseError(f"missing field {key!r}", line_no)
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"field {key!r} must be an integer", line_no)
    return value


def _get_float(obj: dict, key: str, line_no: int) -> float:
    if key not in obj:
        raise ParseError(f"missing field {key!r}", line_no)
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"field {key!r} must be a number", line_no)
    return float(value)


def _write_line(stream: IO[str], obj: dict) -> None:
    stream.write(json.dumps(obj, ensure_ascii=False))
    stream.write("\n")


# --- candidates ----------------------------------------------------------------


def read_candidates(stream: IO[str]) -> Iterator[CandidateSet]:
    """Yield candidate sets in file order, enforcing unique segment ids."""
    seen: set[str] = set()
    for line_no, obj in _records(stream):
        segment_id = _get_str(obj, "segment_id", line_no)
        if segment_id in seen:
            raise DuplicateSegmentError(segment_id, line_no)
        seen.add(segment_id)
        source = _get_str(obj, "source", line_no)
        candidates = obj.get("candidates")
        if (
            not isinstance(candidates, list)
            or not candidates
            or not all(isinstance(c, str) for c in candidates)
        ):
            raise ParseError(
                "field 'candidates' must be a non-empty list of strings", line_no
            )
        yield CandidateSet(
            segment_id=segment_id,
            source=source,
            candidates=tuple(candidates),
            language_pair=_get_str(obj, "language_pair", line_no),
            reference=_get_str(obj, "reference", line_no, optional=True),
            doc_context=_get_str(obj, "doc_context", line_no, optional=True),
        )


def write_candidates(sets: Iterable[CandidateSet], stream: IO[str]) -> None:
    for s in sets:
        obj = {
            "segment_id": s.segment_id,
            "source": s.source,
            "candidates": list(s.candidates),
            "language_pair": s.language_pair,
        }
        if s.reference is not None:
            obj["reference"] = s.reference
        if s.doc_context is not None:
            obj["doc_context"] = s.doc_context
        _write_line(stream, obj)


# --- score matrices --------------------------------------------------------------


def read_matrices(
    stream: IO[str], expected_n: Mapping[str, int] | None = None
) -> Iterator[ScoreMatrix]:
    """Yield validated matrices; optionally cross-check n per segment."""
    for line_no, obj in _records(stream):
        segment_id = _get_str(obj, "segment_id", line_no)
        metric_id = _get_str(obj, "metric_id", line_no)
        kind = _get_str(obj, "kind", line_no)
        orientation_name = _get_str(obj, "orientation", line_no)
        n = _get_int(obj, "n", line_no)
        raw_scores = obj.get("scores")
        if not isinstance(raw_scores, list):
            raise ParseError("field 'scores' must be a list of numbers", line_no)
        values = []
        for v in raw_scores:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ParseError("field 'scores' must be a list of numbers", line_no)
            values.append(float(v))

        base, suffix = strip_label_suffix(metric_id)
        canonical = canonical_metric_id(base) + suffix
        try:
            orientation = Orientation(orientation_name)
        except ValueError:
            raise ParseError(
                f"unknown orientation {orientation_name!r}", line_no
            ) from None

        matrix = ScoreMatrix(segment_id, canonical, kind, orientation, n, tuple(values))
        validate_matrix(matrix, line_no)
        if expected_n is not None and segment_id in expected_n:
            want = expected_n[segment_id]
            if want != n:
                raise ParseError(
                    f"n={n} does not match candidate set n={want}"
                    f" for segment {segment_id!r}",
                    line_no,
                )
        yield matrix


def write_matrices(matrices: Iterable[ScoreMatrix], stream: IO[str]) -> None:
    for m in matrices:
        _write_line(
            stream,
            {
                "segment_id": m.segment_id,
                "metric_id": m.metric_id,
                "kind": m.kind,
                "orientation": m.orientation.value,
                "n": m.n,
                "scores": list(m.scores),
            },
        )


def group_matrices_by_segment(
    matrices: Iterable[ScoreMatrix],
) -> dict[str, dict[str, ScoreMatrix]]:
    """Index matrices as {segment_id: {metric_id: matrix}}."""
    grouped: dict[str, dict[str, ScoreMatrix]] = {}
    for m in matrices:
        grouped.setdefault(m.segment_id, {})[m.metric_id] = m
    return grouped


# --- selections ------------------------------------------------------------------


def read_selections(
    stream: IO[str], candidates: Mapping[str, CandidateSet] | None = None
) -> Iterator[SelectionRecord]:
    """Yield selection records, validating against candidate sets if given."""
    for line_no, obj in _records(stream):
        segment_id = _get_str(obj, "segment_id", line_no)
        system_id = _get_str(obj, "system_id", line_no)
        index = _get_int(obj, "selected_index", line_no)
        text = _get_str(obj, "selected_text", line_no)
        if index < 0:
            raise ParseError("selected_index must be >= 0", line_no)
        if candidates is not None and segment_id in candidates:
            cset = candidates[segment_id]
            if index >= cset.n:
                raise SelectionRangeError(segment_id, index, cset.n, line_no)
            if text != cset.candidates[index]:
                raise ParseError(
                    f"selected_text does not match candidate {index}"
                    f" of segment {segment_id!r}",
                    line_no,
                )
        yield SelectionRecord(segment_id, system_id, index, text)


def write_selections(records: Iterable[SelectionRecord], stream: IO[str]) -> None:
    for i, r in enumerate(records):
        try:
            _write_line(
                stream,
                {
                    "segment_id": r.segment_id,
                    "system_id": r.system_id,
                    "selected_index": r.selected_index,
                    "selected_text": r.selected_text,
                },
            )
        except OSError as exc:
            raise MbrkitError(f"write failed at record {i}: {exc}") from exc


# --- MQM records -------------------------------------------------------------------


def read_mqm(stream: IO[str]) -> Iterator[MqmRecord]:
    for line_no, obj in _records(stream):
        segment_id = _get_str(obj, "segment_id", line_no)
        system_id = _get_str(obj, "system_id", line_no)
        score = _get_float(obj, "mqm_score", line_no)
        if not math.isfinite(score) or not 0.0 <= score <= 25.0:
            raise ParseError(f"mqm_score {score!r} outside [0, 25]", line_no)
        yield MqmRecord(segment_id, system_id, score)


def write_mqm(records: Iterable[MqmRecord], stream: IO[str]) -> None:
    for r in records:
        _write_line(
            stream,
            {
                "segment_id": r.segment_id,
                "system_id": r.system_id,
                "mqm_score": r.mqm_score,
            },
        )


# --- evaluation scores ---------------------------------------------------------------


def read_evaluations(stream: IO[str]) -> Iterator[SegmentEvaluation]:
    for line_no, obj in _records(stream):
        segment_id = _get_str(obj, "segment_id", line_no)
        system_id = _get_str(obj, "system_id", line_no)
        metric_id = _get_str(obj, "metric_id", line_no)
        base, suffix = strip_label_suffix(metric_id)
        if suffix == AT_REF_SUFFIX:
            raise ParseError(
                f"evaluation records use plain metric ids, got {metric_id!r}", line_no
            )
        canonical_metric_id(base)
        score = _get_float(obj, "score", line_no)
        if not math.isfinite(score):
            raise ParseError("score must be finite", line_no)
        yield SegmentEvaluation(
            segment_id,
            system_id,
            canonical_metric_id(base) + suffix,
            score,
            _get_str(obj, "language_pair", line_no, optional=True),
        )


def write_evaluations(records: Iterable[SegmentEvaluation], stream: IO[str]) -> None:
    for r in records:
        obj = {
            "segment_id": r.segment_id,
            "system_id": r.system_id,
            "metric_id": r.metric_id,
            "score": r.score,
        }
        if r.language_pair is not None:
            obj["language_pair"] = r.language_pair
        _write_line(stream, obj)
