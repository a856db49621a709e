"""Correlation of metric scores with human MQM judgments.

MQM counts weighted errors, so lower is better; scores are correlated
against negated MQM, and lower-better metrics are likewise negated, so a
positive correlation always means agreement with human preference.
Metric labels may carry the ":mbr" suffix (score the selected candidate
by its mean pairwise utility, using the candidates as pseudoreferences)
or the form "avg(a, b, ...)" (average the members' orientation-normalized
scores before correlating).

Kendall's tau is the tie-corrected tau-b, computed from exact integer
pair counts via merge-sort inversion counting.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from itertools import groupby
from typing import Iterable, Mapping, Sequence

from .core import (
    MqmRecord,
    Orientation,
    SegmentEvaluation,
    registry_lookup,
    strip_label_suffix,
)
from .errors import MissingObservationError, UndefinedCorrelationError, WrongKindError
from .io import PAIRWISE, ScoreMatrix

KENDALL = "kendall"
PEARSON = "pearson"
PER_PAIR = "per_pair"
GLOBAL = "global"

_AVG_RE = re.compile(r"^avg\((.+)\)$")


@dataclass(frozen=True)
class CorrelationResult:
    """One correlation value for one metric label (and pooling group)."""

    metric_label: str
    value: float
    n_pairs: int
    language_pair: str | None = None


def pseudoref_score(candidate_index: int, matrix: ScoreMatrix) -> float:
    """Mean pairwise score of one candidate over all pseudoreferences."""
    if matrix.kind != PAIRWISE:
        raise WrongKindError(
            f"expected a pairwise matrix, got kind {matrix.kind!r}"
            f" for metric {matrix.metric_id!r}"
        )
    if not 0 <= candidate_index < matrix.n:
        raise IndexError(
            f"candidate index {candidate_index} out of range for n={matrix.n}"
        )
    total = 0.0
    for j in range(matrix.n):
        total += matrix.value(candidate_index, j)
    return total / matrix.n


def _check_paired(x: Sequence[float], y: Sequence[float]) -> None:
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError("need at least two observations")


def _count_inversions(values: list) -> int:
    """Pairs (i < j) with values[i] > values[j]; sorts values in place."""
    if len(values) < 2:
        return 0
    mid = len(values) // 2
    left = values[:mid]
    right = values[mid:]
    count = _count_inversions(left) + _count_inversions(right)
    merged = []
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            count += len(left) - i
            merged.append(right[j])
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    values[:] = merged
    return count


def _tie_pairs(sorted_values: Iterable) -> int:
    """Sum of t*(t-1)/2 over runs of equal values."""
    total = 0
    for _, run in groupby(sorted_values):
        t = sum(1 for _ in run)
        total += t * (t - 1) // 2
    return total


def kendall_tau(x: Sequence[float], y: Sequence[float]) -> float:
    """Tie-corrected Kendall's tau-b."""
    _check_paired(x, y)
    n = len(x)
    order = sorted(range(n), key=lambda i: (x[i], y[i]))
    xs = [x[i] for i in order]
    ys = [y[i] for i in order]
    n0 = n * (n - 1) // 2
    tx = _tie_pairs(xs)
    ty = _tie_pairs(sorted(ys))
    if tx == n0 or ty == n0:
        raise UndefinedCorrelationError(
            "tau is undefined when either vector is constant"
        )
    txy = _tie_pairs(zip(xs, ys))
    d = _count_inversions(ys)
    c = n0 - tx - ty + txy - d
    return (c - d) / math.sqrt((n0 - tx) * (n0 - ty))


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    _check_paired(x, y)
    n = len(x)
    mean_x = 0.0
    mean_y = 0.0
    for xi in x:
        mean_x += xi
    for yi in y:
        mean_y += yi
    mean_x /= n
    mean_y /= n
    cov = 0.0
    var_x = 0.0
    var_y = 0.0
    for xi, yi in zip(x, y):
        dx = xi - mean_x
        dy = yi - mean_y
        cov += dx * dy
        var_x += dx * dx
        var_y += dy * dy
    if var_x == 0.0 or var_y == 0.0:
        raise UndefinedCorrelationError(
            "pearson is undefined when either vector has zero variance"
        )
    return cov / math.sqrt(var_x * var_y)


def parse_label(label: str) -> tuple[str, ...]:
    """Member metric labels of a correlation label ("avg(...)" or single)."""
    match = _AVG_RE.match(label)
    if match is None:
        return (label,)
    members = tuple(part.strip() for part in match.group(1).split(","))
    if not all(members):
        raise ValueError(f"empty member in label {label!r}")
    return members


def _label_orientation(member: str) -> Orientation:
    base, _ = strip_label_suffix(member)
    return registry_lookup(base).orientation


def correlate_with_mqm(
    mqm_records: Sequence[MqmRecord],
    evaluations: Iterable[SegmentEvaluation],
    labels: Sequence[str],
    method: str = KENDALL,
    pooling: str = PER_PAIR,
) -> list[CorrelationResult]:
    """Correlate each label's scores with negated MQM over the MQM
    observation set.

    Pooling "per_pair" groups observations by the evaluation records'
    language pair (one result per label and pair, pairs in first-seen
    order); "global" pools everything into one group per label.
    """
    if method not in (KENDALL, PEARSON):
        raise ValueError(f"method must be 'kendall' or 'pearson', got {method!r}")
    if pooling not in (PER_PAIR, GLOBAL):
        raise ValueError(f"pooling must be 'per_pair' or 'global', got {pooling!r}")
    correlate = kendall_tau if method == KENDALL else pearson

    scores: dict[tuple[str, str, str], float] = {}
    pair_of: dict[tuple[str, str], str | None] = {}
    for record in evaluations:
        scores[(record.segment_id, record.system_id, record.metric_id)] = record.score
        if record.language_pair is not None:
            pair_of[(record.segment_id, record.system_id)] = record.language_pair

    observations: list[tuple[str, str, float, str | None]] = []
    for record in mqm_records:
        key = (record.segment_id, record.system_id)
        observations.append((*key, record.mqm_score, pair_of.get(key)))

    groups: dict[str | None, list[tuple[str, str, float]]] = {}
    group_order: list[str | None] = []
    for segment_id, system_id, mqm_score, language_pair in observations:
        group_key = language_pair if pooling == PER_PAIR else None
        if group_key not in groups:
            groups[group_key] = []
            group_order.append(group_key)
        groups[group_key].append((segment_id, system_id, mqm_score))

    results = []
    for label in labels:
        members = parse_label(label)
        orientations = [_label_orientation(member) for member in members]
        missing = list(
            dict.fromkeys(
                (segment_id, system_id)
                for segment_id, system_id, _, _ in observations
                for member in members
                if (segment_id, system_id, member) not in scores
            )
        )
        if missing:
            raise MissingObservationError(label, missing)
        for group_key in group_order:
            human = []
            metric = []
            for segment_id, system_id, mqm_score in groups[group_key]:
                human.append(-mqm_score)
                total = 0.0
                for member, orientation in zip(members, orientations):
                    value = scores[(segment_id, system_id, member)]
                    total += value if orientation is Orientation.HIGHER_BETTER else -value
                metric.append(total / len(members))
            results.append(
                CorrelationResult(
                    label,
                    correlate(metric, human),
                    len(human),
                    group_key if pooling == PER_PAIR else None,
                )
            )
    return results
