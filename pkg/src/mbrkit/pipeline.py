"""Two-stage selection: a linear-time QE filter followed by MBR decoding.

Stage one keeps the top N candidates by a QE metric (or by the rankAvg
aggregate of a QE group). Stage two runs MBR over the survivors; by
default the pseudoreference pool is also restricted to the survivors,
which is what makes the second stage quadratic only in N. Pipelines are
named "<qe-tag>QE(<N>)<mbr-tag>MBR", e.g. "mxQE(32)xcMBR".
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import (
    GROUP_NAMES,
    CandidateSet,
    MetricKind,
    SelectionRecord,
    canonical_metric_id,
    group_members_of_kind,
    registry_lookup,
)
from .errors import MissingMatrixError, PipelineNameError, WrongKindError
from .ensemble import aggregate_vector, build_rank_table, rank_candidates
from .io import PAIRWISE, QE, ScoreMatrix
from .mbr import argbest, expected_utilities

FILTERED = "filtered"
FULL = "full"

# Stage tags from the pipeline-name grammar. QE tags resolve to QE
# metrics or pure-QE groups; MBR tags resolve to reference-based metrics
# or groups that are filtered to their reference-based members.
QE_TAGS = {
    "all": "qe",
    "top": "topQe",
    "nonc": "noNCQe",
    "mx": "MetricX-QE",
    "ck": "CometKiwi23-XXL",
}
MBR_TAGS = {
    "all": "all",
    "nolex": "noLex",
    "top": "top",
    "nonc": "noNC",
    "noncnolex": "noNCnoLex",
    "mx": "MetricX",
    "xc": "XCOMET-XXL",
}

_NAME_RE = re.compile(r"^([a-z]+)QE\((\d+)\)([a-z]+)MBR$")


@dataclass(frozen=True)
class PipelineSpec:
    """QE stage, filter width, and MBR stage; stages are metric ids or
    group names."""

    qe_stage: str
    filter_n: int
    mbr_stage: str
    name: str | None = None


def _stage_members(
    stage: str, kind: MetricKind, language_pair: str
) -> tuple[str, ...]:
    if stage in GROUP_NAMES:
        members = tuple(group_members_of_kind(stage, language_pair, kind))
        if not members:
            raise WrongKindError(
                f"group {stage!r} has no {kind.value} members"
            )
        return members
    metric_id = canonical_metric_id(stage)
    if registry_lookup(metric_id).kind is not kind:
        raise WrongKindError(
            f"stage metric {metric_id!r} is not {kind.value}"
        )
    return (metric_id,)


def looks_like_pipeline(name: str) -> bool:
    """True when name matches the pipeline grammar (tags unchecked)."""
    return _NAME_RE.match(name) is not None


def parse_pipeline_name(name: str) -> PipelineSpec:
    """Resolve "<qe-tag>QE(<N>)<mbr-tag>MBR" into a PipelineSpec."""
    match = _NAME_RE.match(name)
    if match is None:
        raise PipelineNameError(
            f"{name!r} does not match the grammar <qe-tag>QE(<N>)<mbr-tag>MBR"
        )
    qe_tag, raw_n, mbr_tag = match.groups()
    if qe_tag not in QE_TAGS:
        raise PipelineNameError(
            f"unknown QE tag {qe_tag!r} in {name!r};"
            f" expected one of {', '.join(sorted(QE_TAGS))}"
        )
    if mbr_tag not in MBR_TAGS:
        raise PipelineNameError(
            f"unknown MBR tag {mbr_tag!r} in {name!r};"
            f" expected one of {', '.join(sorted(MBR_TAGS))}"
        )
    filter_n = int(raw_n)
    if filter_n < 1:
        raise PipelineNameError(f"filter width must be >= 1, got {filter_n}")
    return PipelineSpec(QE_TAGS[qe_tag], filter_n, MBR_TAGS[mbr_tag], name)


def qe_filter(
    candidate_set: CandidateSet,
    qe_stage: str,
    matrices: Mapping[str, ScoreMatrix],
    filter_n: int,
) -> list[int]:
    """Indices of the top filter_n candidates, in original index order.

    A single QE metric sorts by its orientation; a QE group sorts by
    ascending rankAvg aggregate. Boundary ties go to the lowest index.
    """
    if filter_n < 1:
        raise ValueError("filter_n must be >= 1")
    n = candidate_set.n
    if filter_n >= n:
        return list(range(n))
    members = _stage_members(qe_stage, MetricKind.QE, candidate_set.language_pair)
    if len(members) == 1:
        matrix = matrices.get(members[0])
        if matrix is None:
            raise MissingMatrixError(members[0], candidate_set.segment_id)
        if matrix.kind != QE:
            raise WrongKindError(
                f"expected a qe vector for {members[0]!r}, got {matrix.kind!r}"
            )
        ranks: Sequence[float] = rank_candidates(matrix.scores, matrix.orientation)
    else:
        table = build_rank_table(candidate_set, matrices, members)
        ranks = aggregate_vector(table, "rankAvg")
    order = sorted(range(n), key=lambda i: (ranks[i], i))
    return sorted(order[:filter_n])


def _filtered_utilities(
    matrix: ScoreMatrix, keep: Sequence[int], pseudorefs: str, exclude_self: bool
) -> tuple[float, ...]:
    """Expected utilities of the kept rows.

    pseudorefs "filtered" restricts the pseudoreference columns to the
    kept candidates as well; "full" keeps all n columns.
    """
    if matrix.kind != PAIRWISE:
        raise WrongKindError(
            f"expected a pairwise matrix, got kind {matrix.kind!r}"
            f" for metric {matrix.metric_id!r}"
        )
    if pseudorefs == FILTERED:
        k = len(keep)
        sub = ScoreMatrix(
            matrix.segment_id,
            matrix.metric_id,
            PAIRWISE,
            matrix.orientation,
            k,
            tuple(matrix.value(i, j) for i in keep for j in keep),
        )
        return expected_utilities(sub, exclude_self)
    if pseudorefs != FULL:
        raise ValueError(f"pseudorefs must be 'filtered' or 'full', got {pseudorefs!r}")
    utilities = []
    for i in keep:
        total = 0.0
        count = 0
        for j in range(matrix.n):
            if exclude_self and j == i:
                continue
            total += matrix.value(i, j)
            count += 1
        utilities.append(total / count)
    return tuple(utilities)


def run_pipeline(
    candidate_set: CandidateSet,
    spec: PipelineSpec,
    matrices: Mapping[str, ScoreMatrix],
    system_id: str | None = None,
    exclude_self: bool = False,
    pseudorefs: str = FILTERED,
) -> SelectionRecord:
    """Filter with the QE stage, MBR-decode the survivors, return the pick.

    The selected index refers to the original candidate list. A
    single-metric MBR stage picks the best filtered utility directly; a
    group stage ranks the filtered utilities per member and aggregates by
    rankAvg, ties toward the lowest surviving index.
    """
    keep = qe_filter(candidate_set, spec.qe_stage, matrices, spec.filter_n)
    if system_id is None:
        system_id = spec.name or (
            f"{spec.qe_stage}QE({spec.filter_n}){spec.mbr_stage}MBR"
        )
    if len(keep) == 1:
        selected = keep[0]
        return SelectionRecord(
            candidate_set.segment_id,
            system_id,
            selected,
            candidate_set.candidates[selected],
        )

    members = _stage_members(
        spec.mbr_stage, MetricKind.REFERENCE_BASED, candidate_set.language_pair
    )
    per_member = []
    for member in members:
        matrix = matrices.get(member)
        if matrix is None:
            raise MissingMatrixError(member, candidate_set.segment_id)
        if matrix.n != candidate_set.n:
            raise ValueError(
                f"matrix for {member!r} has n={matrix.n}, candidate set has"
                f" n={candidate_set.n}"
            )
        per_member.append(
            (
                _filtered_utilities(matrix, keep, pseudorefs, exclude_self),
                matrix.orientation,
            )
        )

    if len(per_member) == 1:
        utilities, orientation = per_member[0]
        local = argbest(utilities, orientation)
    else:
        rank_columns = [
            rank_candidates(utilities, orientation)
            for utilities, orientation in per_member
        ]
        aggregates = [
            sum(column[i] for column in rank_columns) / len(rank_columns)
            for i in range(len(keep))
        ]
        local = 0
        for i in range(1, len(aggregates)):
            if aggregates[i] < aggregates[local]:
                local = i
    selected = keep[local]
    return SelectionRecord(
        candidate_set.segment_id,
        system_id,
        selected,
        candidate_set.candidates[selected],
    )
