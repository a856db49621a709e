"""Rank-based ensembling of metrics over one candidate set.

Each member metric ranks the candidates (rank 0 is best; ties share the
rank equal to the count of strictly better candidates). A strategy then
aggregates each candidate's rank row across metrics, and the candidate
with the smallest aggregate wins, ties toward the lowest index.

Ranks are integers, so the aggregates are small-denominator rationals;
all four aggregators compute them exactly in float64, which keeps
selections deterministic across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import (
    GROUP_NAMES,
    CandidateSet,
    MetricKind,
    Orientation,
    canonical_metric_id,
    group_members,
    registry_lookup,
)
from .errors import (
    MissingMatrixError,
    NonFiniteScoreError,
    UnknownStrategyError,
    WrongKindError,
)
from .io import QE, ScoreMatrix
from .mbr import expected_utilities

STRATEGIES = ("rankAvg", "rankMed", "rankMax", "rank75q")


def rank_candidates(
    scores: Sequence[float], orientation: Orientation
) -> tuple[int, ...]:
    """Competition ranks: each candidate's count of strictly better rivals."""
    for s in scores:
        if not math.isfinite(s):
            raise NonFiniteScoreError(f"cannot rank non-finite score {s!r}")
    reverse = orientation is Orientation.HIGHER_BETTER
    order = sorted(range(len(scores)), key=lambda i: scores[i], reverse=reverse)
    ranks = [0] * len(scores)
    for position, candidate in enumerate(order):
        if position > 0 and scores[candidate] == scores[order[position - 1]]:
            ranks[candidate] = ranks[order[position - 1]]
        else:
            ranks[candidate] = position
    return tuple(ranks)


@dataclass(frozen=True)
class RankTable:
    """Per-metric rank columns for one segment's candidates."""

    segment_id: str
    metric_ids: tuple[str, ...]
    n: int
    columns: tuple[tuple[int, ...], ...]

    def row(self, i: int) -> tuple[int, ...]:
        return tuple(column[i] for column in self.columns)


def resolve_members(
    group: str | Sequence[str], language_pair: str
) -> tuple[str, ...]:
    """Expand a group name, single metric id, or explicit member list."""
    if isinstance(group, str):
        if group in GROUP_NAMES:
            return tuple(group_members(group, language_pair))
        return (canonical_metric_id(group),)
    return tuple(canonical_metric_id(m) for m in group)


def build_rank_table(
    candidate_set: CandidateSet,
    matrices: Mapping[str, ScoreMatrix],
    group: str | Sequence[str],
    exclude_self: bool = False,
) -> RankTable:
    """Rank candidates under every group member.

    QE members rank by their score vector; reference-based members rank
    by the expected utilities of their pairwise matrix.
    """
    members = resolve_members(group, candidate_set.language_pair)
    columns = []
    for member in members:
        matrix = matrices.get(member)
        if matrix is None:
            raise MissingMatrixError(member, candidate_set.segment_id)
        if matrix.n != candidate_set.n:
            raise ValueError(
                f"matrix for {member!r} has n={matrix.n}, candidate set has"
                f" n={candidate_set.n}"
            )
        if registry_lookup(member).kind is MetricKind.QE:
            if matrix.kind != QE:
                raise WrongKindError(
                    f"expected a qe vector for {member!r}, got {matrix.kind!r}"
                )
            scores: Sequence[float] = matrix.scores
        else:
            scores = expected_utilities(matrix, exclude_self)
        columns.append(rank_candidates(scores, matrix.orientation))
    return RankTable(
        candidate_set.segment_id, members, candidate_set.n, tuple(columns)
    )


def _mean(values: Sequence[int]) -> float:
    return sum(values) / len(values)


def _median(values: Sequence[int]) -> float:
    ordered = sorted(values)
    mid = len(ordered) // 2
    if len(ordered) % 2:
        return float(ordered[mid])
    return (ordered[mid - 1] + ordered[mid]) / 2


def _maximum(values: Sequence[int]) -> float:
    return float(max(values))


def _q75(values: Sequence[int]) -> float:
    ordered = sorted(values)
    position = (len(ordered) - 1) * 0.75
    lower = int(position)
    fraction = position - lower
    if fraction == 0.0:
        return float(ordered[lower])
    return ordered[lower] + fraction * (ordered[lower + 1] - ordered[lower])


_AGGREGATORS = {
    "rankAvg": _mean,
    "rankMed": _median,
    "rankMax": _maximum,
    "rank75q": _q75,
}


def aggregate_ranks(values: Sequence[int], strategy: str) -> float:
    """Collapse one candidate's rank row under the named strategy."""
    try:
        aggregator = _AGGREGATORS[strategy]
    except KeyError:
        raise UnknownStrategyError(strategy) from None
    return aggregator(values)


def aggregate_vector(table: RankTable, strategy: str) -> tuple[float, ...]:
    """Aggregate every candidate's rank row; lower is better."""
    if not table.columns or table.n < 1:
        raise ValueError("rank table is empty")
    return tuple(aggregate_ranks(table.row(i), strategy) for i in range(table.n))


def ensemble_select(table: RankTable, strategy: str) -> int:
    """Candidate with the smallest aggregate rank; ties to the lowest index."""
    aggregates = aggregate_vector(table, strategy)
    best = 0
    for i in range(1, len(aggregates)):
        if aggregates[i] < aggregates[best]:
            best = i
    return best
