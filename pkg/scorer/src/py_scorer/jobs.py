"""Scoring jobs: mode validation, batched inference, ordered matrix output.

A job pairs a metric id → backend loader mapping with one scoring mode:
"pairwise" emits row-major hypothesis×pseudoreference grids, "qe" scores
each candidate without a reference, and "at_ref" scores each candidate
against the segment's true reference under the "<metric>@ref" label.
Batching groups rows for the device but never reorders the output, which
is always segment-major in input order with metrics in mapping order.
"""

from __future__ import annotations

import sys
from contextlib import contextmanager
from dataclasses import dataclass
from typing import IO, Iterator, Mapping, Sequence

from .backends import Backend, BackendLoader, ScoreRow
from .errors import (
    DeviceOomError,
    MissingReferenceError,
    ModeKindError,
    ScorerError,
)
from .registry import AT_REF_SUFFIX, QE, metric_info
from .wire import PAIRWISE, QE as QE_KIND, Segment, read_segments, write_matrix_line

MODES = ("pairwise", "qe", "at_ref")


@dataclass(frozen=True)
class ScorerJob:
    """One scoring run over a candidate file.

    loaders maps each metric id to a device → Backend factory; the mode
    must suit every metric's kind (pairwise/at_ref for reference-based
    metrics, qe for QE metrics).
    """

    loaders: Mapping[str, BackendLoader]
    mode: str
    candidates_path: str
    out_path: str
    batch_size: int = 8
    device: str = "cpu"

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if not self.loaders:
            raise ValueError("job has no metrics")
        for metric_id in self.loaders:
            kind = metric_info(metric_id).kind
            if kind == QE and self.mode != "qe":
                raise ModeKindError(
                    f"{metric_id} is a QE metric; it only supports qe mode,"
                    f" got {self.mode!r}"
                )
            if kind != QE and self.mode == "qe":
                raise ModeKindError(
                    f"{metric_id} is reference-based; use pairwise or at_ref mode"
                )


def _segment_rows(segment: Segment, mode: str) -> list[ScoreRow]:
    if mode == "pairwise":
        return [
            (segment.source, hypothesis, pseudoref)
            for hypothesis in segment.candidates
            for pseudoref in segment.candidates
        ]
    if mode == "qe":
        return [(segment.source, hypothesis, None) for hypothesis in segment.candidates]
    if segment.reference is None:
        raise MissingReferenceError(
            f"segment {segment.segment_id!r} has no reference; at_ref mode needs one"
        )
    return [
        (segment.source, hypothesis, segment.reference)
        for hypothesis in segment.candidates
    ]


def _looks_like_oom(exc: BaseException) -> bool:
    return "outofmemory" in type(exc).__name__.lower() or (
        "out of memory" in str(exc).lower()
    )


def _score_batched(
    backend: Backend, rows: Sequence[ScoreRow], batch_size: int
) -> list[float]:
    scores: list[float] = []
    for start in range(0, len(rows), batch_size):
        batch = rows[start : start + batch_size]
        try:
            values = backend.score(batch)
        except ScorerError:
            raise
        except Exception as exc:
            if _looks_like_oom(exc):
                raise DeviceOomError(
                    f"device out of memory on a batch of {len(batch)}; retry"
                    f" with --batch-size {max(1, len(batch) // 2)}"
                ) from exc
            raise
        if len(values) != len(batch):
            raise ScorerError(
                f"backend returned {len(values)} scores for a batch of {len(batch)}"
            )
        scores.extend(float(v) for v in values)
    return scores


@contextmanager
def _out_stream(path: str) -> Iterator[IO[str]]:
    if path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8") as stream:
        yield stream


def run_job(job: ScorerJob) -> None:
    """Score every segment with every metric and write matrix lines."""
    with open(job.candidates_path, "r", encoding="utf-8") as stream:
        segments = read_segments(stream)
    rows_per_segment = [_segment_rows(segment, job.mode) for segment in segments]
    flat = [row for rows in rows_per_segment for row in rows]
    results: dict[str, tuple[list[float], str]] = {}
    for metric_id, loader in job.loaders.items():
        backend = loader(job.device)
        results[metric_id] = (
            _score_batched(backend, flat, job.batch_size),
            backend.model,
        )
    suffix = AT_REF_SUFFIX if job.mode == "at_ref" else ""
    kind = PAIRWISE if job.mode == "pairwise" else QE_KIND
    with _out_stream(job.out_path) as stream:
        start = 0
        for segment, rows in zip(segments, rows_per_segment):
            for metric_id in job.loaders:
                scores, model = results[metric_id]
                write_matrix_line(
                    stream,
                    segment_id=segment.segment_id,
                    metric_id=metric_id + suffix,
                    kind=kind,
                    orientation=metric_info(metric_id).orientation,
                    n=len(segment.candidates),
                    scores=scores[start : start + len(rows)],
                    model=model,
                )
            start += len(rows)


def _run_mode(job: ScorerJob, mode: str) -> None:
    if job.mode != mode:
        raise ModeKindError(f"job mode is {job.mode!r}; expected {mode!r}")
    run_job(job)


def score_pairwise(job: ScorerJob) -> None:
    """Run a pairwise-mode job: n×n grids per segment and metric."""
    _run_mode(job, "pairwise")


def score_qe(job: ScorerJob) -> None:
    """Run a qe-mode job: one reference-free score per candidate."""
    _run_mode(job, "qe")


def score_at_ref(job: ScorerJob) -> None:
    """Run an at_ref-mode job: scores against the true reference."""
    _run_mode(job, "at_ref")
