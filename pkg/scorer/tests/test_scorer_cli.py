"""CLI behavior and the cross-package round trip into the toolkit."""

from __future__ import annotations

import importlib.util
import json
import shutil
import subprocess

import pytest
from mbrkit import read_matrices, read_selections, registry_lookup
from mbrkit.cli import main as mbrkit_main

from py_scorer.cli import main

SEGMENTS = [
    {
        "segment_id": "s1",
        "source": "Der Hund bellt.",
        "candidates": ["The dog barks.", "The dog is barking.", "A dog barks."],
        "language_pair": "de-en",
        "reference": "The dog barks.",
    },
    {
        "segment_id": "s2",
        "source": "Es regnet stark.",
        "candidates": ["It rains hard.", "It is raining heavily."],
        "language_pair": "de-en",
        "reference": "It is raining hard.",
    },
    {
        "segment_id": "s3",
        "source": "Ich bin müde.",
        "candidates": ["I am tired.", "I'm tired.", "I am sleepy.", "Tired am I."],
        "language_pair": "de-en",
        "reference": "I am tired.",
    },
]


@pytest.fixture
def cands(tmp_path):
    path = tmp_path / "cands.jsonl"
    with path.open("w", encoding="utf-8") as fh:
        for segment in SEGMENTS:
            fh.write(json.dumps(segment, ensure_ascii=False) + "\n")
    return path


def _score(cands, out, metrics, mode, *extra) -> int:
    return main(
        [
            "--candidates",
            str(cands),
            "--metrics",
            metrics,
            "--mode",
            mode,
            "--simulate",
            "--out",
            str(out),
            *extra,
        ]
    )


def _error_line(capsys) -> str:
    lines = capsys.readouterr().err.strip().splitlines()
    assert len(lines) == 1
    return lines[0]


class TestWireConformance:
    def test_three_segment_fixture_flows_through_the_toolkit(self, cands, tmp_path):
        pairwise = tmp_path / "pw.jsonl"
        qe = tmp_path / "qe.jsonl"
        at_ref = tmp_path / "ref.jsonl"
        assert _score(cands, pairwise, "MetricX,COMET22", "pairwise") == 0
        assert _score(cands, qe, "CometKiwi22,MetricX-QE", "qe") == 0
        assert _score(cands, at_ref, "COMET22,MetricX", "at_ref") == 0

        for path in (pairwise, qe, at_ref):
            with path.open(encoding="utf-8") as fh:
                matrices = list(read_matrices(fh))
            assert [m.segment_id for m in matrices] == [
                "s1", "s1", "s2", "s2", "s3", "s3",
            ]
            for matrix in matrices:
                base = matrix.metric_id.removesuffix("@ref")
                spec = registry_lookup(base)
                assert matrix.orientation == spec.orientation

        selections = tmp_path / "sel.jsonl"
        assert (
            mbrkit_main(
                [
                    "decode",
                    "--candidates",
                    str(cands),
                    "--matrices",
                    str(pairwise),
                    "--matrices",
                    str(qe),
                    "--systems",
                    "greedy,MetricX,CometKiwi22,rankAvg:mxmxqe,mxQE(2)mxMBR",
                    "--out",
                    str(selections),
                ]
            )
            == 0
        )
        with selections.open(encoding="utf-8") as fh:
            records = list(read_selections(fh))
        assert len(records) == 5 * len(SEGMENTS)

        report = tmp_path / "report.tsv"
        assert (
            mbrkit_main(
                [
                    "evaluate",
                    "--selections",
                    str(selections),
                    "--candidates",
                    str(cands),
                    "--matrices",
                    str(pairwise),
                    "--matrices",
                    str(at_ref),
                    "--metrics",
                    "chrF,COMET22,MetricX:mbr",
                    "--out",
                    str(report),
                ]
            )
            == 0
        )
        lines = report.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "system\tmetric\tmean\tdelta\tp_value\tmark"
        assert len(lines) == 1 + 5 * 3

    def test_chrf_grids_can_be_simulated_for_decode(self, cands, tmp_path):
        out = tmp_path / "chrf.jsonl"
        assert _score(cands, out, "chrF", "pairwise") == 0
        assert (
            mbrkit_main(
                [
                    "decode",
                    "--candidates",
                    str(cands),
                    "--matrices",
                    str(out),
                    "--systems",
                    "chrF",
                    "--out",
                    str(tmp_path / "sel.jsonl"),
                ]
            )
            == 0
        )


class TestCliBehavior:
    def test_default_out_is_stdout(self, cands, capsys):
        assert _score(cands, "-", "CometKiwi22", "qe") == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 3
        assert json.loads(lines[-1])["segment_id"] == "s3"

    def test_batch_size_flag_does_not_change_bytes(self, cands, tmp_path):
        a = tmp_path / "a.jsonl"
        b = tmp_path / "b.jsonl"
        assert _score(cands, a, "COMET22", "pairwise", "--batch-size", "1") == 0
        assert _score(cands, b, "COMET22", "pairwise", "--batch-size", "64") == 0
        assert a.read_bytes() == b.read_bytes()

    def test_metric_ids_are_canonicalized(self, cands, tmp_path):
        out = tmp_path / "out.jsonl"
        assert _score(cands, out, "cometkiwi22", "qe") == 0
        first = json.loads(out.read_text(encoding="utf-8").splitlines()[0])
        assert first["metric_id"] == "CometKiwi22"

    def test_unknown_metric_id(self, cands, capsys):
        assert _score(cands, "-", "COMET-9000", "qe") == 1
        assert _error_line(capsys).startswith(
            "py-scorer: error: UnknownMetricError: unknown metric id 'COMET-9000'"
        )

    def test_mode_kind_mismatch(self, cands, capsys):
        assert _score(cands, "-", "COMET22", "qe") == 1
        assert "ModeKindError: COMET22 is reference-based" in _error_line(capsys)

    def test_at_ref_without_references(self, tmp_path, capsys):
        path = tmp_path / "norefs.jsonl"
        record = {k: v for k, v in SEGMENTS[0].items() if k != "reference"}
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        assert _score(path, "-", "COMET22", "at_ref") == 1
        assert "MissingReferenceError: segment 's1'" in _error_line(capsys)

    def test_checkpoint_needs_single_metric(self, cands, capsys):
        assert (
            _score(
                cands, "-", "COMET22,MetricX", "pairwise", "--checkpoint", "x"
            )
            == 1
        )
        assert "exactly one metric id" in _error_line(capsys)

    def test_missing_candidate_file(self, tmp_path, capsys):
        assert _score(tmp_path / "absent.jsonl", "-", "COMET22", "pairwise") == 1
        assert _error_line(capsys).startswith("py-scorer: error: FileNotFoundError")

    def test_malformed_candidates_report_the_line(self, tmp_path, capsys):
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps(SEGMENTS[0]) + "\nnot json\n", encoding="utf-8")
        assert _score(path, "-", "COMET22", "pairwise") == 1
        assert "WireError: line 2: invalid JSON" in _error_line(capsys)


class TestRealModelPaths:
    @pytest.mark.skipif(
        importlib.util.find_spec("comet") is not None,
        reason="unbabel-comet is installed; the missing-package hint cannot fire",
    )
    def test_missing_engine_package_names_the_install(self, cands, capsys):
        rc = main(
            [
                "--candidates",
                str(cands),
                "--metrics",
                "COMET22",
                "--mode",
                "pairwise",
                "--out",
                "-",
            ]
        )
        assert rc == 1
        line = _error_line(capsys)
        assert "ModelLoadError" in line
        assert "unbabel-comet" in line

    def test_lexical_metric_has_no_model_backend(self, cands, capsys):
        rc = main(
            [
                "--candidates",
                str(cands),
                "--metrics",
                "chrF",
                "--mode",
                "pairwise",
                "--out",
                "-",
            ]
        )
        assert rc == 1
        assert "computed natively" in _error_line(capsys)

    def test_unpinned_checkpoint_asks_for_one(self, cands, capsys):
        rc = main(
            [
                "--candidates",
                str(cands),
                "--metrics",
                "IndicCOMET",
                "--mode",
                "pairwise",
                "--out",
                "-",
            ]
        )
        assert rc == 1
        assert "pass --checkpoint" in _error_line(capsys)


@pytest.mark.skipif(
    shutil.which("py-scorer") is None, reason="py-scorer not on PATH"
)
def test_console_script_help():
    result = subprocess.run(
        ["py-scorer", "--help"], capture_output=True, text=True, check=True
    )
    for flag in ("--candidates", "--metrics", "--mode", "--batch-size", "--simulate"):
        assert flag in result.stdout
