"""Job validation, batched scoring, and output layout."""

from __future__ import annotations

import json
from typing import Sequence

import pytest
from mbrkit import read_matrices

from py_scorer.backends import HashSimBackend, ScoreRow, build_loaders
from py_scorer.errors import (
    DeviceOomError,
    MissingReferenceError,
    ModeKindError,
    ScorerError,
    UnknownMetricError,
)
from py_scorer.jobs import (
    ScorerJob,
    run_job,
    score_at_ref,
    score_pairwise,
    score_qe,
)

SEGMENTS = [
    {
        "segment_id": "s1",
        "source": "Der Hund bellt.",
        "candidates": ["The dog barks.", "The dog is barking.", "The dog barks."],
        "language_pair": "de-en",
        "reference": "The dog barks.",
    },
    {
        "segment_id": "s2",
        "source": "Es regnet.",
        "candidates": ["It rains."],
        "language_pair": "de-en",
        "reference": "It is raining.",
    },
    {
        "segment_id": "s3",
        "source": "Ich bin müde.",
        "candidates": ["I am tired.", "I'm tired."],
        "language_pair": "de-en",
        "reference": "I am tired.",
    },
]


@pytest.fixture
def cands_path(tmp_path):
    path = tmp_path / "cands.jsonl"
    with path.open("w", encoding="utf-8") as fh:
        for segment in SEGMENTS:
            fh.write(json.dumps(segment, ensure_ascii=False) + "\n")
    return path


def _job(cands_path, out_path, metric_ids, mode, **kw) -> ScorerJob:
    return ScorerJob(
        loaders=build_loaders(metric_ids, simulate=True),
        mode=mode,
        candidates_path=str(cands_path),
        out_path=str(out_path),
        **kw,
    )


def _read(tmp_path, name="out.jsonl"):
    with (tmp_path / name).open(encoding="utf-8") as fh:
        return list(read_matrices(fh))


class TestScorerJob:
    def test_qe_metric_rejects_pairwise_mode(self, cands_path, tmp_path):
        with pytest.raises(ModeKindError, match="CometKiwi22 is a QE metric"):
            _job(cands_path, tmp_path / "o", ["CometKiwi22"], "pairwise")

    def test_qe_metric_rejects_at_ref_mode(self, cands_path, tmp_path):
        with pytest.raises(ModeKindError, match="MetricX-QE is a QE metric"):
            _job(cands_path, tmp_path / "o", ["MetricX-QE"], "at_ref")

    def test_reference_metric_rejects_qe_mode(self, cands_path, tmp_path):
        with pytest.raises(ModeKindError, match="COMET22 is reference-based"):
            _job(cands_path, tmp_path / "o", ["COMET22"], "qe")

    def test_one_bad_metric_poisons_the_job(self, cands_path, tmp_path):
        with pytest.raises(ModeKindError, match="MetricX-QE"):
            _job(cands_path, tmp_path / "o", ["COMET22", "MetricX-QE"], "pairwise")

    def test_unknown_metric_id(self, cands_path, tmp_path):
        with pytest.raises(UnknownMetricError, match="COMET-9000"):
            _job(cands_path, tmp_path / "o", ["COMET-9000"], "pairwise")

    def test_unknown_mode(self, cands_path, tmp_path):
        with pytest.raises(ValueError, match="mode must be one of"):
            _job(cands_path, tmp_path / "o", ["COMET22"], "sideways")

    def test_batch_size_must_be_positive(self, cands_path, tmp_path):
        with pytest.raises(ValueError, match="batch_size must be >= 1"):
            _job(cands_path, tmp_path / "o", ["COMET22"], "pairwise", batch_size=0)

    def test_empty_loader_mapping(self, cands_path, tmp_path):
        with pytest.raises(ValueError, match="no metrics"):
            ScorerJob(
                loaders={},
                mode="qe",
                candidates_path=str(cands_path),
                out_path=str(tmp_path / "o"),
            )


class TestRunJob:
    def test_pairwise_two_candidates_gives_four_scores(self, cands_path, tmp_path):
        run_job(_job(cands_path, tmp_path / "out.jsonl", ["COMET22"], "pairwise"))
        by_segment = {m.segment_id: m for m in _read(tmp_path)}
        assert len(by_segment["s3"].scores) == 4
        assert by_segment["s3"].kind == "pairwise"

    def test_single_candidate_gives_single_value_vector(self, cands_path, tmp_path):
        run_job(_job(cands_path, tmp_path / "out.jsonl", ["CometKiwi22"], "qe"))
        by_segment = {m.segment_id: m for m in _read(tmp_path)}
        assert by_segment["s2"].n == 1
        assert len(by_segment["s2"].scores) == 1

    def test_at_ref_labels_and_kind(self, cands_path, tmp_path):
        run_job(_job(cands_path, tmp_path / "out.jsonl", ["COMET22"], "at_ref"))
        matrices = _read(tmp_path)
        assert all(m.metric_id == "COMET22@ref" for m in matrices)
        assert all(m.kind == "qe" for m in matrices)

    def test_duplicate_candidates_score_equally(self, cands_path, tmp_path):
        run_job(_job(cands_path, tmp_path / "out.jsonl", ["COMET22"], "pairwise"))
        grid = {m.segment_id: m.scores for m in _read(tmp_path)}["s1"]
        n = 3
        # Candidates 0 and 2 are the same string, so any two cells whose
        # (hypothesis, pseudoreference) strings coincide must coincide.
        assert grid[0 * n + 1] == grid[2 * n + 1]
        assert grid[1 * n + 0] == grid[1 * n + 2]
        assert grid[0 * n + 0] == grid[0 * n + 2] == grid[2 * n + 0] == grid[2 * n + 2]

    def test_output_is_segment_major_metric_minor(self, cands_path, tmp_path):
        run_job(
            _job(
                cands_path,
                tmp_path / "out.jsonl",
                ["CometKiwi22", "MetricX-QE"],
                "qe",
            )
        )
        order = [(m.segment_id, m.metric_id) for m in _read(tmp_path)]
        assert order == [
            ("s1", "CometKiwi22"),
            ("s1", "MetricX-QE"),
            ("s2", "CometKiwi22"),
            ("s2", "MetricX-QE"),
            ("s3", "CometKiwi22"),
            ("s3", "MetricX-QE"),
        ]

    def test_batch_size_never_changes_output(self, cands_path, tmp_path):
        outputs = []
        for batch_size in (1, 3, 64):
            out = tmp_path / f"out{batch_size}.jsonl"
            run_job(
                _job(
                    cands_path,
                    out,
                    ["MetricX", "COMET22"],
                    "pairwise",
                    batch_size=batch_size,
                )
            )
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]

    def test_reruns_are_byte_identical(self, cands_path, tmp_path):
        for name in ("a.jsonl", "b.jsonl"):
            run_job(_job(cands_path, tmp_path / name, ["COMET22"], "at_ref"))
        assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()

    def test_hash_sim_scores_lie_in_unit_interval(self, cands_path, tmp_path):
        run_job(_job(cands_path, tmp_path / "out.jsonl", ["COMET22"], "pairwise"))
        for matrix in _read(tmp_path):
            assert all(0.0 <= s < 1.0 for s in matrix.scores)

    def test_simulated_metrics_disagree(self, cands_path, tmp_path):
        run_job(
            _job(
                cands_path,
                tmp_path / "out.jsonl",
                ["CometKiwi22", "AfriCOMET-QE"],
                "qe",
            )
        )
        by_metric = {}
        for matrix in _read(tmp_path):
            by_metric.setdefault(matrix.metric_id, []).extend(matrix.scores)
        assert by_metric["CometKiwi22"] != by_metric["AfriCOMET-QE"]

    def test_model_field_records_the_backend(self, cands_path, tmp_path):
        run_job(_job(cands_path, tmp_path / "out.jsonl", ["COMET22"], "pairwise"))
        with (tmp_path / "out.jsonl").open(encoding="utf-8") as fh:
            first = json.loads(fh.readline())
        assert first["model"] == "hash-sim"

    def test_stdout_output(self, cands_path, capsys):
        run_job(_job(cands_path, "-", ["CometKiwi22"], "qe"))
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 3
        assert json.loads(lines[0])["segment_id"] == "s1"

    def test_at_ref_missing_reference_fails_before_any_model_loads(
        self, tmp_path
    ):
        path = tmp_path / "norefs.jsonl"
        record = dict(SEGMENTS[0])
        del record["reference"]
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        loaded = []

        def loader(device: str) -> HashSimBackend:
            loaded.append(device)
            return HashSimBackend("COMET22")

        job = ScorerJob(
            loaders={"COMET22": loader},
            mode="at_ref",
            candidates_path=str(path),
            out_path=str(tmp_path / "out.jsonl"),
        )
        with pytest.raises(MissingReferenceError, match="segment 's1' has no reference"):
            run_job(job)
        assert loaded == []


class _OomBackend:
    model = "oom-sim"

    def score(self, rows: Sequence[ScoreRow]) -> list[float]:
        raise RuntimeError("CUDA out of memory. Tried to allocate 2.00 GiB")


class _ShortBackend:
    model = "short-sim"

    def score(self, rows: Sequence[ScoreRow]) -> list[float]:
        return [0.0] * (len(rows) - 1)


class TestFailureSurfacing:
    def _job_with(self, backend, cands_path, tmp_path, **kw) -> ScorerJob:
        return ScorerJob(
            loaders={"COMET22": lambda device: backend},
            mode="pairwise",
            candidates_path=str(cands_path),
            out_path=str(tmp_path / "out.jsonl"),
            **kw,
        )

    def test_oom_names_a_smaller_batch_size(self, cands_path, tmp_path):
        job = self._job_with(_OomBackend(), cands_path, tmp_path, batch_size=8)
        with pytest.raises(DeviceOomError, match="--batch-size 4"):
            run_job(job)

    def test_oom_hint_never_drops_below_one(self, cands_path, tmp_path):
        job = self._job_with(_OomBackend(), cands_path, tmp_path, batch_size=1)
        with pytest.raises(DeviceOomError, match="--batch-size 1"):
            run_job(job)

    def test_non_oom_backend_errors_propagate_unchanged(self, cands_path, tmp_path):
        class Broken:
            model = "broken"

            def score(self, rows):
                raise RuntimeError("tensor shape mismatch")

        with pytest.raises(RuntimeError, match="tensor shape mismatch"):
            run_job(self._job_with(Broken(), cands_path, tmp_path))

    def test_wrong_score_count_is_reported(self, cands_path, tmp_path):
        job = self._job_with(_ShortBackend(), cands_path, tmp_path, batch_size=64)
        with pytest.raises(ScorerError, match="returned 13 scores for a batch of 14"):
            run_job(job)


class TestModeWrappers:
    def test_wrappers_enforce_their_mode(self, cands_path, tmp_path):
        job = _job(cands_path, tmp_path / "out.jsonl", ["COMET22"], "pairwise")
        with pytest.raises(ModeKindError, match="job mode is 'pairwise'"):
            score_qe(job)
        with pytest.raises(ModeKindError, match="expected 'at_ref'"):
            score_at_ref(job)
        score_pairwise(job)
        assert len(_read(tmp_path)) == 3
