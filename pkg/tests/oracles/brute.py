"""Brute-force selection oracles: small, obvious, numpy-backed routes.

These recompute selections from first principles so tests compare two
genuinely different code paths. None of them share helpers with mbrkit.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


def brute_argbest(values: Sequence[float], higher_better: bool) -> int:
    best = 0
    for i in range(1, len(values)):
        if higher_better:
            if values[i] > values[best]:
                best = i
        elif values[i] < values[best]:
            best = i
    return best


def brute_mbr_index(
    scores: Sequence[float], n: int, higher_better: bool, exclude_self: bool = False
) -> int:
    """Mean each row of the flat row-major n*n matrix, then pick the best row."""
    matrix = np.asarray(scores, dtype=float).reshape(n, n)
    if exclude_self:
        utilities = [
            float((matrix[i].sum() - matrix[i, i]) / (n - 1)) for i in range(n)
        ]
    else:
        utilities = [float(v) for v in matrix.mean(axis=1)]
    return brute_argbest(utilities, higher_better)


def brute_qe_index(values: Sequence[float], higher_better: bool) -> int:
    return brute_argbest(values, higher_better)


def brute_competition_ranks(
    values: Sequence[float], higher_better: bool
) -> list[int]:
    """Rank of each value = number of strictly better values, by pair counting."""
    ranks = []
    for v in values:
        if higher_better:
            ranks.append(sum(1 for u in values if u > v))
        else:
            ranks.append(sum(1 for u in values if u < v))
    return ranks


def brute_filter_indices(
    values: Sequence[float], higher_better: bool, keep: int
) -> list[int]:
    """Indices of the `keep` best values, ties to the lowest index, sorted."""
    ranks = brute_competition_ranks(values, higher_better)
    order = sorted(range(len(values)), key=lambda i: (ranks[i], i))
    return sorted(order[:keep])
