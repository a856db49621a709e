"""Command line front end for the scorer adapter.

Mirrors the decoding toolkit's score command: a candidate JSONL file in,
score-matrix JSONL out, metrics as a comma-separated id list. Adds the
model-facing knobs the toolkit's native scorer does not need: scoring
mode, batch size, device, checkpoint override, and a deterministic
simulation backend for dry runs.
"""

from __future__ import annotations

import argparse
import sys

from .backends import build_loaders
from .errors import ScorerError
from .jobs import MODES, ScorerJob, run_job
from .registry import canonical_metric_id


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="py-scorer",
        description="score candidate files with published neural metric models",
    )
    parser.add_argument("--candidates", required=True, help="candidate JSONL path")
    parser.add_argument(
        "--metrics",
        required=True,
        help="comma-separated metric ids (COMET22, MetricX-QE, ...)",
    )
    parser.add_argument(
        "--mode",
        required=True,
        choices=list(MODES),
        help="pairwise grids, qe vectors, or @ref vectors",
    )
    parser.add_argument("--out", default="-", help="output matrix JSONL path")
    parser.add_argument(
        "--batch-size",
        type=int,
        default=8,
        help="rows per device batch (default 8)",
    )
    parser.add_argument("--device", default="cpu", help="device selector (default cpu)")
    parser.add_argument(
        "--checkpoint",
        help="checkpoint override; needs exactly one metric id",
    )
    parser.add_argument(
        "--simulate",
        action="store_true",
        help="use the deterministic hash backend instead of real models",
    )
    return parser


def _run(args: argparse.Namespace) -> None:
    metric_ids = [canonical_metric_id(part) for part in args.metrics.split(",")]
    if args.checkpoint is not None and len(metric_ids) != 1:
        raise ValueError("--checkpoint needs exactly one metric id")
    job = ScorerJob(
        loaders=build_loaders(
            metric_ids, checkpoint=args.checkpoint, simulate=args.simulate
        ),
        mode=args.mode,
        candidates_path=args.candidates,
        out_path=args.out,
        batch_size=args.batch_size,
        device=args.device,
    )
    run_job(job)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _run(args)
    except (ScorerError, OSError, ValueError) as exc:
        message = " ".join(str(exc).split())
        print(f"py-scorer: error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
