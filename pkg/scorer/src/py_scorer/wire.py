"""Candidate reader and matrix writer for the toolkit's JSONL wire formats.

Stdlib-only mirror of the conventions the decoding toolkit enforces: UTF-8,
one JSON object per line, blank lines skipped, errors reported with the
1-based line number. Matrix lines are written with keys in a fixed order
and ensure_ascii=False, so equal inputs give byte-identical files that the
toolkit's validator accepts unchanged. An optional trailing "model" key
records the checkpoint that produced the scores.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterator, Sequence

from .errors import WireError

PAIRWISE = "pairwise"
QE = "qe"


@dataclass(frozen=True)
class Segment:
    """One source segment with its candidate translations."""

    segment_id: str
    source: str
    candidates: tuple[str, ...]
    language_pair: str
    reference: str | None = None


def _records(stream: IO[str]) -> Iterator[tuple[int, dict]]:
    for line_no, raw in enumerate(stream, start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise WireError(f"line {line_no}: invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise WireError(f"line {line_no}: record is not a JSON object")
        yield line_no, obj


def _get_str(obj: dict, key: str, line_no: int) -> str:
    value = obj.get(key)
    if not isinstance(value, str):
        raise WireError(f"line {line_no}: missing or non-string field {key!r}")
    return value


def read_segments(stream: IO[str]) -> list[Segment]:
    """Read candidate sets in file order, enforcing unique segment ids."""
    segments: list[Segment] = []
    seen: set[str] = set()
    for line_no, obj in _records(stream):
        segment_id = _get_str(obj, "segment_id", line_no)
        if segment_id in seen:
            raise WireError(f"line {line_no}: duplicate segment id {segment_id!r}")
        seen.add(segment_id)
        candidates = obj.get("candidates")
        if (
            not isinstance(candidates, list)
            or not candidates
            or not all(isinstance(c, str) for c in candidates)
        ):
            raise WireError(
                f"line {line_no}: 'candidates' must be a non-empty list of strings"
            )
        reference = obj.get("reference")
        if reference is not None and not isinstance(reference, str):
            raise WireError(f"line {line_no}: 'reference' must be a string")
        segments.append(
            Segment(
                segment_id=segment_id,
                source=_get_str(obj, "source", line_no),
                candidates=tuple(candidates),
                language_pair=_get_str(obj, "language_pair", line_no),
                reference=reference,
            )
        )
    return segments


def write_matrix_line(
    stream: IO[str],
    *,
    segment_id: str,
    metric_id: str,
    kind: str,
    orientation: str,
    n: int,
    scores: Sequence[float],
    model: str | None = None,
) -> None:
    """Write one score-matrix line in the toolkit's key order."""
    obj: dict[str, object] = {
        "segment_id": segment_id,
        "metric_id": metric_id,
        "kind": kind,
        "orientation": orientation,
        "n": n,
        "scores": [float(s) for s in scores],
    }
    if model is not None:
        obj["model"] = model
    stream.write(json.dumps(obj, ensure_ascii=False) + "\n")
