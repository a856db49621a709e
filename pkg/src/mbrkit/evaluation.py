"""Scoring of selected outputs and the significance report grid.

Selected candidates are scored per metric label: native lexical metrics
against the segment's reference, QE metrics from their score vectors,
other reference-based metrics from "<metric>@ref" vectors, and ":mbr"
labels by mean pairwise utility against the candidate pseudoreferences.

Reports average per system and metric (language pairs weighted equally),
attach orientation-signed deltas against a baseline system (positive is
better), and mark paired-t-test significance: "*" for p < 0.05, "†" for
p < 0.01, "‡" for p < 0.001.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from scipy.special import betainc

from .core import (
    AT_REF_SUFFIX,
    MBR_SUFFIX,
    CandidateSet,
    MetricKind,
    Orientation,
    SegmentEvaluation,
    SelectionRecord,
    canonical_metric_id,
    is_lexical,
    registry_lookup,
    strip_label_suffix,
)
from .errors import (
    MissingBaselineError,
    MissingExternalScoreError,
    MissingMatrixError,
    MissingReferenceError,
    SelectionRangeError,
    WrongKindError,
)
from .io import PAIRWISE, ScoreMatrix
from .lexical import native_score
from .correlation import pseudoref_score

SIGNIFICANCE_MARKS = (("‡", 0.001), ("†", 0.01), ("*", 0.05))


def _canonical_label(label: str) -> str:
    base, suffix = strip_label_suffix(label)
    if suffix == AT_REF_SUFFIX:
        raise ValueError(
            f"evaluation labels use plain metric ids or ':mbr', got {label!r}"
        )
    return canonical_metric_id(base) + suffix


def _score_one(
    selection: SelectionRecord,
    candidate_set: CandidateSet,
    label: str,
    seg_matrices: Mapping[str, ScoreMatrix],
) -> float:
    base, suffix = strip_label_suffix(label)
    spec = registry_lookup(base)
    index = selection.selected_index
    if suffix == MBR_SUFFIX:
        if spec.kind is not MetricKind.REFERENCE_BASED:
            raise WrongKindError(
                f"':mbr' evaluation needs a reference-based metric, got {base!r}"
            )
        matrix = seg_matrices.get(base)
        if matrix is None or matrix.kind != PAIRWISE:
            raise MissingMatrixError(base, selection.segment_id)
        return pseudoref_score(index, matrix)
    if spec.kind is MetricKind.QE:
        vector = seg_matrices.get(base)
        if vector is None:
            raise MissingExternalScoreError(base, selection.segment_id)
        return vector.scores[index]
    if is_lexical(base):
        if candidate_set.reference is None:
            raise MissingReferenceError(selection.segment_id)
        return native_score(base, selection.selected_text, candidate_set.reference)
    at_ref = base + AT_REF_SUFFIX
    vector = seg_matrices.get(at_ref)
    if vector is None:
        raise MissingExternalScoreError(at_ref, selection.segment_id)
    return vector.scores[index]


def evaluate_selections(
    selections: Iterable[SelectionRecord],
    candidate_sets: Mapping[str, CandidateSet],
    metric_labels: Sequence[str],
    matrices: Mapping[str, Mapping[str, ScoreMatrix]] | None = None,
) -> list[SegmentEvaluation]:
    """Score every selection under every metric label, in input order.

    matrices maps segment_id to that segment's {metric_id: ScoreMatrix},
    holding QE vectors, "@ref" vectors, and pairwise matrices for ":mbr"
    labels.
    """
    labels = [_canonical_label(label) for label in metric_labels]
    matrices = matrices or {}
    records = []
    for selection in selections:
        candidate_set = candidate_sets.get(selection.segment_id)
        if candidate_set is None:
            raise ValueError(f"no candidate set for segment {selection.segment_id!r}")
        if not 0 <= selection.selected_index < candidate_set.n:
            raise SelectionRangeError(
                selection.segment_id, selection.selected_index, candidate_set.n
            )
        seg_matrices = matrices.get(selection.segment_id, {})
        for label in labels:
            records.append(
                SegmentEvaluation(
                    selection.segment_id,
                    selection.system_id,
                    label,
                    _score_one(selection, candidate_set, label, seg_matrices),
                    candidate_set.language_pair,
                )
            )
    return records


def paired_ttest(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sided paired Student t-test p-value.

    All-zero differences give p = 1.0; zero-variance nonzero differences
    give the degenerate limit p = 0.0.
    """
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 2:
        raise ValueError("need at least two paired observations")
    diffs = [x - y for x, y in zip(a, b)]
    if all(d == 0.0 for d in diffs):
        return 1.0
    mean = 0.0
    for d in diffs:
        mean += d
    mean /= n
    variance = 0.0
    for d in diffs:
        variance += (d - mean) ** 2
    variance /= n - 1
    if variance == 0.0:
        return 0.0
    t = mean / math.sqrt(variance / n)
    df = n - 1
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def significance_mark(p: float) -> str:
    """Most significant applicable mark for a p-value."""
    for mark, threshold in SIGNIFICANCE_MARKS:
        if p < threshold:
            return mark
    return ""


@dataclass(frozen=True)
class EvaluationReport:
    """Mean grid with baseline deltas, p-values, and significance marks.

    Rows follow systems, columns follow metrics; deltas are signed so
    positive always means better than the baseline.
    """

    systems: tuple[str, ...]
    metrics: tuple[str, ...]
    means: tuple[tuple[float, ...], ...]
    baseline_id: str
    deltas: tuple[tuple[float, ...], ...]
    p_values: tuple[tuple[float, ...], ...]
    stars: tuple[tuple[str, ...], ...]


def _cell_mean(rows: Sequence[tuple[str, str | None, float]]) -> float:
    """Unweighted mean over language pairs of per-pair segment means."""
    by_pair: dict[str | None, list[float]] = {}
    pair_order: list[str | None] = []
    for _, pair, score in rows:
        if pair not in by_pair:
            by_pair[pair] = []
            pair_order.append(pair)
        by_pair[pair].append(score)
    pair_means = []
    for pair in pair_order:
        total = 0.0
        for score in by_pair[pair]:
            total += score
        pair_means.append(total / len(by_pair[pair]))
    total = 0.0
    for value in pair_means:
        total += value
    return total / len(pair_means)


def build_report(
    evaluations: Iterable[SegmentEvaluation], baseline_id: str
) -> EvaluationReport:
    """Aggregate evaluation records into the report grid.

    Systems and metrics keep first-appearance order. Paired t-tests pool
    segments across language pairs, aligned on the baseline's segment
    order.
    """
    cells: dict[tuple[str, str], list[tuple[str, str | None, float]]] = {}
    systems: list[str] = []
    metrics: list[str] = []
    for record in evaluations:
        if record.system_id not in systems:
            systems.append(record.system_id)
        if record.metric_id not in metrics:
            metrics.append(record.metric_id)
        key = (record.system_id, record.metric_id)
        rows = cells.setdefault(key, [])
        rows.append((record.segment_id, record.language_pair, record.score))
    if baseline_id not in systems:
        raise MissingBaselineError(baseline_id)

    for system in systems:
        for metric in metrics:
            if (system, metric) not in cells:
                raise ValueError(
                    f"no evaluations for system {system!r}, metric {metric!r}"
                )

    def segment_scores(system: str, metric: str) -> dict[str, float]:
        out: dict[str, float] = {}
        for segment_id, _, score in cells[(system, metric)]:
            if segment_id in out:
                raise ValueError(
                    f"duplicate evaluation for segment {segment_id!r},"
                    f" system {system!r}, metric {metric!r}"
                )
            out[segment_id] = score
        return out

    means = []
    deltas = []
    p_values = []
    stars = []
    baseline_means = [_cell_mean(cells[(baseline_id, m)]) for m in metrics]
    baseline_segments = {m: segment_scores(baseline_id, m) for m in metrics}
    for system in systems:
        mean_row = []
        delta_row = []
        p_row = []
        star_row = []
        for column, metric in enumerate(metrics):
            mean = _cell_mean(cells[(system, metric)])
            base, _ = strip_label_suffix(metric)
            if registry_lookup(base).orientation is Orientation.HIGHER_BETTER:
                delta = mean - baseline_means[column]
            else:
                delta = baseline_means[column] - mean
            base_scores = baseline_segments[metric]
            mine = segment_scores(system, metric)
            ordered = []
            for segment_id, base_score in base_scores.items():
                if segment_id not in mine:
                    raise ValueError(
                        f"system {system!r} missing segment {segment_id!r}"
                        f" for metric {metric!r}"
                    )
                ordered.append((mine[segment_id], base_score))
            p = paired_ttest([m for m, _ in ordered], [b for _, b in ordered])
            mean_row.append(mean)
            delta_row.append(delta)
            p_row.append(p)
            star_row.append(significance_mark(p))
        means.append(tuple(mean_row))
        deltas.append(tuple(delta_row))
        p_values.append(tuple(p_row))
        stars.append(tuple(star_row))
    return EvaluationReport(
        tuple(systems),
        tuple(metrics),
        tuple(means),
        baseline_id,
        tuple(deltas),
        tuple(p_values),
        tuple(stars),
    )


def _render_tsv(report: EvaluationReport) -> str:
    lines = ["system\tmetric\tmean\tdelta\tp_value\tmark"]
    for i, system in enumerate(report.systems):
        for j, metric in enumerate(report.metrics):
            lines.append(
                f"{system}\t{metric}\t{report.means[i][j]:.4f}"
                f"\t{report.deltas[i][j]:.4f}\t{report.p_values[i][j]:.4g}"
                f"\t{report.stars[i][j]}"
            )
    return "\n".join(lines) + "\n"


def _delta_span(delta: float, star: str) -> str:
    text = f"{delta:+.4f}"
    if delta > 0:
        text = f'<span style="color:green">{text}</span>'
    elif delta < 0:
        text = f'<span style="color:red">{text}</span>'
    return f"({text}){star}"


def _render_markdown(report: EvaluationReport) -> str:
    header = "| system | " + " | ".join(report.metrics) + " |"
    rule = "| --- |" + " --- |" * len(report.metrics)
    lines = [header, rule]
    for i, system in enumerate(report.systems):
        cells = []
        for j in range(len(report.metrics)):
            cell = f"{report.means[i][j]:.4f}"
            if system != report.baseline_id:
                cell += " " + _delta_span(report.deltas[i][j], report.stars[i][j])
            cells.append(cell)
        lines.append("| " + " | ".join([system] + cells) + " |")
    return "\n".join(lines) + "\n"


def _render_html(report: EvaluationReport) -> str:
    lines = ["<table>"]
    lines.append(
        "<tr><th>system</th>"
        + "".join(f"<th>{m}</th>" for m in report.metrics)
        + "</tr>"
    )
    for i, system in enumerate(report.systems):
        cells = []
        for j in range(len(report.metrics)):
            delta = report.deltas[i][j]
            if system == report.baseline_id:
                cells.append(f"<td>{report.means[i][j]:.4f}</td>")
                continue
            if delta > 0:
                style = ' style="color:green"'
            elif delta < 0:
                style = ' style="color:red"'
            else:
                style = ""
            cells.append(
                f"<td{style}>{report.means[i][j]:.4f} ({delta:+.4f})"
                f"{report.stars[i][j]}</td>"
            )
        lines.append(f"<tr><td>{system}</td>" + "".join(cells) + "</tr>")
    lines.append("</table>")
    return "\n".join(lines) + "\n"


_RENDERERS = {
    "tsv": _render_tsv,
    "markdown": _render_markdown,
    "html": _render_html,
}

REPORT_FORMATS = tuple(_RENDERERS)


def render_report(report: EvaluationReport, format: str = "tsv") -> str:
    """Serialize the report grid; deterministic for equal inputs."""
    renderer = _RENDERERS.get(format)
    if renderer is None:
        raise ValueError(
            f"unknown format {format!r}; expected one of {', '.join(_RENDERERS)}"
        )
    return renderer(report)
