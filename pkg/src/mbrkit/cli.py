"""Command-line entry point: score, decode, evaluate, correlate.

Relative input and output paths resolve against $MBRKIT_DATA_DIR when it
is set. All outputs are deterministic for identical inputs and flags,
regardless of worker count. Errors exit with status 1 and one line on
stderr of the form "mbrkit: error: <Type>: <message>".
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import IO, Callable, Mapping

from .core import (
    CandidateSet,
    MetricKind,
    SelectionRecord,
    canonical_metric_id,
    is_lexical,
    registry_lookup,
)
from .correlation import GLOBAL, PER_PAIR, correlate_with_mqm
from .ensemble import STRATEGIES, build_rank_table, ensemble_select
from .errors import (
    MbrkitError,
    MissingMatrixError,
    UnknownMetricError,
    UnsupportedNativeMetricError,
)
from .evaluation import REPORT_FORMATS, build_report, evaluate_selections, render_report
from .io import (
    ScoreMatrix,
    read_candidates,
    read_evaluations,
    read_matrices,
    read_mqm,
    read_selections,
    write_evaluations,
    write_matrices,
    write_selections,
)
from .mbr import compute_pairwise_matrix, mbr_select, qe_select
from .pipeline import (
    FILTERED,
    FULL,
    PipelineSpec,
    looks_like_pipeline,
    parse_pipeline_name,
    run_pipeline,
)

GREEDY = "greedy"

Decoder = Callable[[CandidateSet, Mapping[str, ScoreMatrix]], SelectionRecord]


def _resolve(path: str) -> str:
    base = os.environ.get("MBRKIT_DATA_DIR")
    if base and path != "-" and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _open_in(path: str) -> IO[str]:
    return open(_resolve(path), "r", encoding="utf-8")


def _open_out(path: str) -> IO[str]:
    if path == "-":
        return sys.stdout
    return open(_resolve(path), "w", encoding="utf-8", newline="")


def _close_out(stream: IO[str]) -> None:
    if stream is not sys.stdout:
        stream.close()


def _split_csv(text: str) -> list[str]:
    items = [part.strip() for part in text.split(",")]
    return [part for part in items if part]


def _load_candidates(path: str) -> list[CandidateSet]:
    with _open_in(path) as stream:
        return list(read_candidates(stream))


def _load_matrices(
    paths: list[str], expected_n: Mapping[str, int]
) -> dict[str, dict[str, ScoreMatrix]]:
    grouped: dict[str, dict[str, ScoreMatrix]] = {}
    for path in paths:
        with _open_in(path) as stream:
            for matrix in read_matrices(stream, expected_n):
                grouped.setdefault(matrix.segment_id, {})[matrix.metric_id] = matrix
    return grouped


# --- decode system descriptors ---------------------------------------------------


def _metric_decoder(metric_id: str, exclude_self: bool) -> Decoder:
    spec = registry_lookup(metric_id)

    def decode(cset: CandidateSet, mats: Mapping[str, ScoreMatrix]) -> SelectionRecord:
        matrix = mats.get(metric_id)
        if matrix is None:
            raise MissingMatrixError(metric_id, cset.segment_id)
        if spec.kind is MetricKind.QE:
            index = qe_select(matrix)
        else:
            index = mbr_select(matrix, exclude_self)
        return SelectionRecord(
            cset.segment_id, metric_id, index, cset.candidates[index]
        )

    return decode


def _ensemble_decoder(descriptor: str, group: str, strategy: str, exclude_self: bool) -> Decoder:
    def decode(cset: CandidateSet, mats: Mapping[str, ScoreMatrix]) -> SelectionRecord:
        table = build_rank_table(cset, mats, group, exclude_self)
        index = ensemble_select(table, strategy)
        return SelectionRecord(
            cset.segment_id, descriptor, index, cset.candidates[index]
        )

    return decode


def _pipeline_decoder(
    spec: PipelineSpec, exclude_self: bool, pseudorefs: str
) -> Decoder:
    def decode(cset: CandidateSet, mats: Mapping[str, ScoreMatrix]) -> SelectionRecord:
        return run_pipeline(
            cset, spec, mats, exclude_self=exclude_self, pseudorefs=pseudorefs
        )

    return decode


def system_decoder(
    descriptor: str, exclude_self: bool = False, pseudorefs: str = FILTERED
) -> Decoder:
    """Map a system descriptor to its per-segment decode function.

    Descriptors: "greedy" (candidate index 0 by file convention), a
    metric id (MBR for reference-based, argbest for QE), a strategy over
    a group like "rankAvg:top", or a pipeline name like "mxQE(32)xcMBR".
    """
    if descriptor == GREEDY:
        return lambda cset, mats: SelectionRecord(
            cset.segment_id, GREEDY, 0, cset.candidates[0]
        )
    if ":" in descriptor:
        strategy, _, group = descriptor.partition(":")
        if strategy in STRATEGIES and group:
            return _ensemble_decoder(descriptor, group, strategy, exclude_self)
    if looks_like_pipeline(descriptor):
        return _pipeline_decoder(
            parse_pipeline_name(descriptor), exclude_self, pseudorefs
        )
    try:
        metric_id = canonical_metric_id(descriptor)
    except UnknownMetricError:
        raise MbrkitError(
            f"unresolvable system descriptor {descriptor!r}; expected 'greedy',"
            " a metric id, '<strategy>:<group>', or a pipeline name"
        ) from None
    return _metric_decoder(metric_id, exclude_self)


# --- subcommands -------------------------------------------------------------------


def _cmd_score(args: argparse.Namespace) -> None:
    metrics = []
    for name in _split_csv(args.metrics):
        metric_id = canonical_metric_id(name)
        if not is_lexical(metric_id):
            raise UnsupportedNativeMetricError(metric_id)
        metrics.append(metric_id)
    candidate_sets = _load_candidates(args.candidates)
    out = _open_out(args.out)
    try:
        for cset in candidate_sets:
            for metric_id in metrics:
                matrix = compute_pairwise_matrix(cset, metric_id, jobs=args.jobs)
                write_matrices([matrix], out)
    finally:
        _close_out(out)


def _build_decoders(
    args: argparse.Namespace, pseudorefs: str
) -> list[tuple[str, Decoder]]:
    decoders = []
    if args.systems:
        for descriptor in _split_csv(args.systems):
            decoders.append(
                (descriptor, system_decoder(descriptor, args.exclude_self, pseudorefs))
            )
    if args.group:
        if args.filter_n is not None:
            name = f"{args.group}QE({args.filter_n}){args.group}MBR"
            spec = PipelineSpec(args.group, args.filter_n, args.group, name)
            decoders.append(
                (name, _pipeline_decoder(spec, args.exclude_self, pseudorefs))
            )
        else:
            descriptor = f"rankAvg:{args.group}"
            decoders.append(
                (descriptor, system_decoder(descriptor, args.exclude_self, pseudorefs))
            )
    if not decoders:
        raise MbrkitError("no systems requested; pass --systems or --group")
    return decoders


def _cmd_decode(args: argparse.Namespace) -> None:
    candidate_sets = _load_candidates(args.candidates)
    expected_n = {c.segment_id: c.n for c in candidate_sets}
    grouped = _load_matrices(args.matrices or [], expected_n)
    pseudorefs = FULL if args.pseudorefs == "full" else FILTERED
    decoders = _build_decoders(args, pseudorefs)

    out = _open_out(args.out)
    try:
        for cset in candidate_sets:
            mats = grouped.get(cset.segment_id, {})
            for _, decode in decoders:
                write_selections([decode(cset, mats)], out)
    finally:
        _close_out(out)


def _cmd_evaluate(args: argparse.Namespace) -> None:
    candidate_sets = _load_candidates(args.candidates)
    cmap = {c.segment_id: c for c in candidate_sets}
    expected_n = {c.segment_id: c.n for c in candidate_sets}
    with _open_in(args.selections) as stream:
        selections = list(read_selections(stream, cmap))
    grouped = _load_matrices(args.matrices or [], expected_n)
    evaluations = evaluate_selections(
        selections, cmap, _split_csv(args.metrics), grouped
    )
    if args.records:
        records_out = _open_out(args.records)
        try:
            write_evaluations(evaluations, records_out)
        finally:
            _close_out(records_out)
    report = build_report(evaluations, args.baseline)
    out = _open_out(args.out)
    try:
        out.write(render_report(report, args.format))
    finally:
        _close_out(out)
    if args.figure:
        from .figures import report_figure

        report_figure(report, _resolve(args.figure))


def _cmd_correlate(args: argparse.Namespace) -> None:
    with _open_in(args.mqm) as stream:
        mqm_records = list(read_mqm(stream))
    with _open_in(args.records) as stream:
        evaluations = list(read_evaluations(stream))
    labels = args.label or []
    if not labels:
        raise MbrkitError("no labels requested; pass --label at least once")
    pooling = PER_PAIR if args.pooling == "per-pair" else GLOBAL
    results = correlate_with_mqm(
        mqm_records, evaluations, labels, method=args.method, pooling=pooling
    )
    out = _open_out(args.out)
    try:
        out.write("label\tlanguage_pair\tvalue\tn_pairs\n")
        for result in results:
            pair = result.language_pair if result.language_pair is not None else "all"
            out.write(
                f"{result.metric_label}\t{pair}\t{result.value:.6f}"
                f"\t{result.n_pairs}\n"
            )
    finally:
        _close_out(out)
    if args.figure:
        from .figures import correlation_figure

        correlation_figure(results, _resolve(args.figure))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbrkit",
        description=(
            "MBR/QE decoding, rank ensembling, and evaluation over candidate"
            " translation files"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    score = sub.add_parser(
        "score", help="compute native lexical pairwise matrices"
    )
    score.add_argument("--candidates", required=True, help="candidate JSONL path")
    score.add_argument(
        "--metrics",
        required=True,
        help="comma-separated lexical metric ids (sentBLEU, chrF, chrF++, TER)",
    )
    score.add_argument("--out", default="-", help="output matrix JSONL path")
    score.add_argument(
        "--jobs",
        type=int,
        default=1,
        help="worker processes for pairwise scoring (default 1)",
    )
    score.set_defaults(func=_cmd_score)

    decode = sub.add_parser("decode", help="select candidates per system")
    decode.add_argument("--candidates", required=True, help="candidate JSONL path")
    decode.add_argument(
        "--matrices",
        action="append",
        help="score matrix JSONL path (repeatable)",
    )
    decode.add_argument(
        "--systems",
        help="comma-separated system descriptors (greedy, metric ids,"
        " <strategy>:<group>, pipeline names)",
    )
    decode.add_argument(
        "--group",
        help="metric group shorthand: alone it adds rankAvg:<group>; with"
        " --filter-n it adds the group's QE-filter + MBR pipeline",
    )
    decode.add_argument(
        "--filter-n", type=int, help="QE filter width for --group pipelines"
    )
    decode.add_argument(
        "--exclude-self",
        action="store_true",
        help="drop the self-score from MBR utility means",
    )
    decode.add_argument(
        "--pseudorefs",
        choices=["filtered", "full"],
        default="filtered",
        help="pseudoreference pool after QE filtering (default filtered)",
    )
    decode.add_argument("--out", default="-", help="output selection JSONL path")
    decode.set_defaults(func=_cmd_decode)

    evaluate = sub.add_parser(
        "evaluate", help="score selections and render the report grid"
    )
    evaluate.add_argument("--selections", required=True, help="selection JSONL path")
    evaluate.add_argument("--candidates", required=True, help="candidate JSONL path")
    evaluate.add_argument(
        "--metrics",
        required=True,
        help="comma-separated metric labels (ids, optionally with :mbr)",
    )
    evaluate.add_argument(
        "--matrices",
        action="append",
        help="matrix JSONL with QE vectors, @ref vectors, or pairwise"
        " matrices for :mbr labels (repeatable)",
    )
    evaluate.add_argument(
        "--baseline", default=GREEDY, help="baseline system id (default greedy)"
    )
    evaluate.add_argument(
        "--format",
        choices=list(REPORT_FORMATS),
        default="tsv",
        help="report format (default tsv)",
    )
    evaluate.add_argument(
        "--records", help="also write per-segment evaluation records here"
    )
    evaluate.add_argument("--figure", help="also render the report grid image here")
    evaluate.add_argument("--out", default="-", help="report output path")
    evaluate.set_defaults(func=_cmd_evaluate)

    correlate = sub.add_parser(
        "correlate", help="correlate metric scores with MQM judgments"
    )
    correlate.add_argument("--mqm", required=True, help="MQM JSONL path")
    correlate.add_argument(
        "--records", required=True, help="evaluation records JSONL path"
    )
    correlate.add_argument(
        "--label",
        action="append",
        help="metric label, '<id>:mbr', or 'avg(a, b, ...)' (repeatable)",
    )
    correlate.add_argument(
        "--method",
        choices=["kendall", "pearson"],
        default="kendall",
        help="correlation coefficient (default kendall)",
    )
    correlate.add_argument(
        "--pooling",
        choices=["per-pair", "global"],
        default="per-pair",
        help="observation pooling (default per-pair)",
    )
    correlate.add_argument("--figure", help="also render a bar chart here")
    correlate.add_argument("--out", default="-", help="output TSV path")
    correlate.set_defaults(func=_cmd_correlate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (MbrkitError, OSError, ValueError, IndexError) as exc:
        message = " ".join(str(exc).split())
        print(f"mbrkit: error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
