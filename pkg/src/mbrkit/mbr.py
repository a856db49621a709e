"""Minimum-Bayes-risk and quality-estimation candidate selection.

MBR treats the candidate list itself as the pseudoreference set: the
utility of candidate i is the mean pairwise score of i against every
candidate j, including i itself unless exclude_self is set. Selection is
the argbest under the metric's orientation, breaking ties toward the
lowest index. QE selection is the argbest of a per-candidate vector.

Utilities are accumulated with sequential Python summation so results are
reproducible bit for bit across array backends.
"""

from __future__ import annotations

import multiprocessing
import os
from typing import Callable, Sequence

from .core import CandidateSet, MetricKind, Orientation, registry_lookup
from .errors import WrongKindError
from .io import PAIRWISE, QE, ScoreMatrix, make_matrix
from .lexical import pair_scorer, profile_builder


def expected_utilities(
    matrix: ScoreMatrix, exclude_self: bool = False
) -> tuple[float, ...]:
    """Mean pairwise score per candidate over the pseudoreference columns.

    With exclude_self, the diagonal entry is left out of each row's mean
    (requires n >= 2).
    """
    if matrix.kind != PAIRWISE:
        raise WrongKindError(
            f"expected a pairwise matrix, got kind {matrix.kind!r}"
            f" for metric {matrix.metric_id!r}"
        )
    n = matrix.n
    if exclude_self and n < 2:
        raise ValueError("exclude_self requires at least two candidates")
    utilities = []
    for i in range(n):
        total = 0.0
        for j in range(n):
            if exclude_self and j == i:
                continue
            total += matrix.value(i, j)
        utilities.append(total / (n - 1 if exclude_self else n))
    return tuple(utilities)


def argbest(scores: Sequence[float], orientation: Orientation) -> int:
    """Index of the best score; ties go to the lowest index."""
    best = 0
    for i in range(1, len(scores)):
        if orientation.better(scores[i], scores[best]):
            best = i
    return best


def mbr_select(matrix: ScoreMatrix, exclude_self: bool = False) -> int:
    """Pick the candidate with the best expected utility.

    A single candidate is returned immediately without computing
    utilities.
    """
    if matrix.kind != PAIRWISE:
        raise WrongKindError(
            f"expected a pairwise matrix, got kind {matrix.kind!r}"
            f" for metric {matrix.metric_id!r}"
        )
    if matrix.n == 1:
        return 0
    return argbest(expected_utilities(matrix, exclude_self), matrix.orientation)


def qe_select(matrix: ScoreMatrix) -> int:
    """Pick the candidate with the best per-candidate score."""
    if matrix.kind != QE:
        raise WrongKindError(
            f"expected a qe vector, got kind {matrix.kind!r}"
            f" for metric {matrix.metric_id!r}"
        )
    if matrix.n == 1:
        return 0
    return argbest(matrix.scores, matrix.orientation)


# --- native pairwise matrix computation ---------------------------------------

# Fork-shared task state: profiles are built once in the parent and
# inherited by workers, so tasks carry only index ranges.
_FORK_STATE: dict = {}


def _pair_blocks(n: int, chunks: int) -> list[tuple[int, int]]:
    """Split the i <= j pair sequence into contiguous (start, stop) blocks."""
    total = n * (n + 1) // 2
    chunks = max(1, min(chunks, total))
    bounds = [total * k // chunks for k in range(chunks + 1)]
    return [(bounds[k], bounds[k + 1]) for k in range(chunks)]


def _pair_at(flat: int, n: int) -> tuple[int, int]:
    """Map a flat index over the i <= j sequence to its (i, j) pair."""
    i = 0
    row_len = n
    while flat >= row_len:
        flat -= row_len
        i += 1
        row_len -= 1
    return i, i + flat


def _score_block(block: tuple[int, int]) -> list[tuple[int, int, float, float]]:
    profiles = _FORK_STATE["profiles"]
    scorer: Callable = _FORK_STATE["scorer"]
    n = _FORK_STATE["n"]
    start, stop = block
    out = []
    i, j = _pair_at(start, n)
    for _ in range(stop - start):
        forward, backward = scorer(profiles[i], profiles[j])
        out.append((i, j, forward, backward))
        j += 1
        if j == n:
            i += 1
            j = i
    return out


def compute_pairwise_matrix(
    candidate_set: CandidateSet, metric_id: str, jobs: int = 1
) -> ScoreMatrix:
    """Score every candidate against every candidate with a native metric.

    Each unordered pair is matched once; the scorer returns both
    directions (hypothesis=i and hypothesis=j), which fill scores[i, j]
    and scores[j, i]. With jobs > 1 the pair blocks run on a fork-based
    pool and results are merged in a fixed order, so output does not
    depend on the worker count.
    """
    spec = registry_lookup(metric_id)
    if spec.kind is not MetricKind.REFERENCE_BASED:
        raise WrongKindError(
            f"pairwise matrices need a reference-based metric, got {spec.id!r}"
        )
    build = profile_builder(spec.id)
    scorer = pair_scorer(spec.id)
    n = candidate_set.n
    profiles = [build(text) for text in candidate_set.candidates]

    _FORK_STATE.update(profiles=profiles, scorer=scorer, n=n)
    try:
        blocks = _pair_blocks(n, jobs * 8)
        if jobs > 1 and len(blocks) > 1 and "fork" in multiprocessing.get_all_start_methods():
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(processes=jobs) as pool:
                results = pool.map(_score_block, blocks)
        else:
            results = [_score_block(b) for b in blocks]
    finally:
        _FORK_STATE.clear()

    scores = [0.0] * (n * n)
    for rows in results:
        for i, j, forward, backward in rows:
            scores[i * n + j] = forward
            scores[j * n + i] = backward
    return make_matrix(
        candidate_set.segment_id, spec.id, PAIRWISE, n, scores
    )


def default_jobs() -> int:
    return max(1, os.cpu_count() or 1)
