"""String-keyed rank-ensemble selection oracle built on numpy aggregators.

Deliberately shares no code with mbrkit.ensemble: candidates are keyed by
string, ranks come from numpy argsort, and the aggregators are np.mean,
np.median, np.max and np.quantile. Sample strings must be unique and scores
within a metric distinct, otherwise the sample-to-rank mapping collapses.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

Metric = tuple[Mapping[str, float], bool]  # (score by sample, higher_better)


def rank_samples_by_metric(
    sample_list: Sequence[str], metric: Metric
) -> dict[str, int]:
    score_by_sample, higher_better = metric
    values = np.array([score_by_sample[s] for s in sample_list], dtype=float)
    if higher_better:
        values = -values
    order = np.argsort(values, kind="stable")
    return {sample_list[int(i)]: rank for rank, i in enumerate(order)}


def get_ranks_for_samples_by_ensemble(
    sample_list: Sequence[str], metric_list: Sequence[Metric]
) -> list[list[int]]:
    output = [[None for _ in metric_list] for _ in sample_list]
    for metric_idx, metric in enumerate(metric_list):
        sample_to_rank = rank_samples_by_metric(sample_list, metric)
        for sample_idx, sample in enumerate(sample_list):
            output[sample_idx][metric_idx] = sample_to_rank[sample]
    return output


def select_samples_by_score(
    sample_list: Sequence[str], score_list: Sequence[float]
) -> str:
    sample_with_score = zip(sample_list, score_list)
    top_candidate, _top_score = min(sample_with_score, key=lambda x: x[1])
    return top_candidate


def rank_avg(sample_list: Sequence[str], metric_list: Sequence[Metric]) -> str:
    sample_ranks = get_ranks_for_samples_by_ensemble(sample_list, metric_list)
    score_list = [np.mean(x) for x in sample_ranks]
    return select_samples_by_score(sample_list, score_list)


def rank_med(sample_list: Sequence[str], metric_list: Sequence[Metric]) -> str:
    sample_ranks = get_ranks_for_samples_by_ensemble(sample_list, metric_list)
    score_list = [np.median(x) for x in sample_ranks]
    return select_samples_by_score(sample_list, score_list)


def rank_max(sample_list: Sequence[str], metric_list: Sequence[Metric]) -> str:
    sample_ranks = get_ranks_for_samples_by_ensemble(sample_list, metric_list)
    score_list = [np.max(x) for x in sample_ranks]
    return select_samples_by_score(sample_list, score_list)


def rank_75q(sample_list: Sequence[str], metric_list: Sequence[Metric]) -> str:
    sample_ranks = get_ranks_for_samples_by_ensemble(sample_list, metric_list)
    score_list = [np.quantile(x, q=[0.75])[0] for x in sample_ranks]
    return select_samples_by_score(sample_list, score_list)


STRATEGY_FUNCS = {
    "rankAvg": rank_avg,
    "rankMed": rank_med,
    "rankMax": rank_max,
    "rank75q": rank_75q,
}
