"""Model backends: pinned public checkpoints plus a deterministic simulator.

A backend scores (source, hypothesis, reference) rows; the reference slot
is None in QE mode. Real backends import their engine packages lazily so
the adapter installs with no model dependencies; a missing package or
checkpoint surfaces as ModelLoadError with an install hint. Scores are
emitted exactly as the model returns them, with no clipping or rescaling.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

from .errors import ModelLoadError
from .registry import metric_info

ScoreRow = tuple[str, str, str | None]


class Backend(Protocol):
    """Scores batches of rows; `model` names the checkpoint for metadata."""

    model: str

    def score(self, rows: Sequence[ScoreRow]) -> list[float]: ...


BackendLoader = Callable[[str], Backend]


class HashSimBackend:
    """Deterministic stand-in that hashes each row into [0, 1).

    Used for tests and dry runs: same inputs always give the same scores,
    on any platform, with no model download. Different metric ids hash
    differently so simulated metrics disagree like real ones do.
    """

    model = "hash-sim"

    def __init__(self, metric_id: str) -> None:
        self.metric_id = metric_id

    def score(self, rows: Sequence[ScoreRow]) -> list[float]:
        return [self._one(*row) for row in rows]

    def _one(self, source: str, hypothesis: str, reference: str | None) -> float:
        payload = "\x1f".join((self.metric_id, source, hypothesis, reference or ""))
        digest = hashlib.sha256(payload.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big") / 2.0**64


@dataclass(frozen=True)
class Checkpoint:
    """Engine package and pinned public release for one metric id."""

    engine: str
    name: str | None


CHECKPOINTS: dict[str, Checkpoint] = {
    "COMET22": Checkpoint("comet", "Unbabel/wmt22-comet-da"),
    "CometKiwi22": Checkpoint("comet", "Unbabel/wmt22-cometkiwi-da"),
    "CometKiwi23-XL": Checkpoint("comet", "Unbabel/wmt23-cometkiwi-da-xl"),
    "CometKiwi23-XXL": Checkpoint("comet", "Unbabel/wmt23-cometkiwi-da-xxl"),
    "XCOMET-XL": Checkpoint("comet", "Unbabel/XCOMET-XL"),
    "XCOMET-XXL": Checkpoint("comet", "Unbabel/XCOMET-XXL"),
    "AfriCOMET": Checkpoint("comet", "masakhane/africomet-mtl"),
    "AfriCOMET-QE": Checkpoint("comet", "masakhane/africomet-qe-stl"),
    # No stable public release is pinned; pass --checkpoint explicitly.
    "IndicCOMET": Checkpoint("comet", None),
    "MetricX": Checkpoint("metricx", "google/metricx-23-xl-v2p0"),
    "MetricX-QE": Checkpoint("metricx", "google/metricx-23-qe-xl-v2p0"),
    "BLEURT": Checkpoint("bleurt", "BLEURT-20"),
}

_NO_BACKEND_HINTS = {
    "YiSi": "no maintained package publishes YiSi; import its scores as matrix JSONL",
    "sentBLEU": "lexical metric computed natively by the toolkit's score command",
    "chrF": "lexical metric computed natively by the toolkit's score command",
    "chrF++": "lexical metric computed natively by the toolkit's score command",
    "TER": "lexical metric computed natively by the toolkit's score command",
}


class CometBackend:
    """COMET-family scorer via the unbabel-comet package."""

    def __init__(self, metric_id: str, checkpoint: str, device: str) -> None:
        try:
            from comet import download_model, load_from_checkpoint
        except ImportError as exc:
            raise ModelLoadError(
                f"{metric_id} needs the 'unbabel-comet' package"
                f" (pip install unbabel-comet): {exc}"
            ) from exc
        self.model = checkpoint
        self._qe = metric_info(metric_id).kind == "qe"
        self._gpus = 0 if device == "cpu" else 1
        try:
            self._model = load_from_checkpoint(download_model(checkpoint))
        except Exception as exc:
            raise ModelLoadError(f"could not load {checkpoint}: {exc}") from exc

    def score(self, rows: Sequence[ScoreRow]) -> list[float]:
        data = []
        for source, hypothesis, reference in rows:
            entry = {"src": source, "mt": hypothesis}
            if not self._qe and reference is not None:
                entry["ref"] = reference
            data.append(entry)
        output = self._model.predict(
            data, batch_size=len(rows), gpus=self._gpus, progress_bar=False
        )
        return [float(s) for s in output.scores]


class BleurtBackend:
    """BLEURT scorer via the google-research bleurt package."""

    def __init__(self, metric_id: str, checkpoint: str, device: str) -> None:
        try:
            from bleurt import score as bleurt_score
        except ImportError as exc:
            raise ModelLoadError(
                f"{metric_id} needs the 'bleurt' package from the"
                f" google-research/bleurt repository: {exc}"
            ) from exc
        self.model = checkpoint
        try:
            self._scorer = bleurt_score.BleurtScorer(checkpoint)
        except Exception as exc:
            raise ModelLoadError(f"could not load {checkpoint}: {exc}") from exc

    def score(self, rows: Sequence[ScoreRow]) -> list[float]:
        references = [reference or "" for _, _, reference in rows]
        hypotheses = [hypothesis for _, hypothesis, _ in rows]
        values = self._scorer.score(references=references, candidates=hypotheses)
        return [float(v) for v in values]


class MetricxBackend:
    """MetricX scorer via the google-research metricx package."""

    def __init__(self, metric_id: str, checkpoint: str, device: str) -> None:
        try:
            import metricx  # noqa: F401
        except ImportError as exc:
            raise ModelLoadError(
                f"{metric_id} needs the 'metricx' package from the"
                f" google-research/metricx repository: {exc}"
            ) from exc
        raise ModelLoadError(
            f"{metric_id}: the metricx package exposes no stable scoring API;"
            f" run its inference script against {checkpoint} and import the"
            " resulting matrix JSONL"
        )

    def score(self, rows: Sequence[ScoreRow]) -> list[float]:
        raise NotImplementedError


_ENGINES: dict[str, Callable[[str, str, str], Backend]] = {
    "comet": CometBackend,
    "bleurt": BleurtBackend,
    "metricx": MetricxBackend,
}


def load_backend(
    metric_id: str,
    device: str = "cpu",
    checkpoint: str | None = None,
    simulate: bool = False,
) -> Backend:
    """Construct the backend for a metric id.

    simulate=True returns the hash simulator for any registry id. The real
    path requires a pinned or explicit checkpoint and the engine package.
    """
    metric_info(metric_id)
    if simulate:
        return HashSimBackend(metric_id)
    pinned = CHECKPOINTS.get(metric_id)
    if pinned is None:
        hint = _NO_BACKEND_HINTS.get(metric_id, "no model backend is registered")
        raise ModelLoadError(f"no model backend for {metric_id}: {hint}")
    name = checkpoint or pinned.name
    if name is None:
        raise ModelLoadError(
            f"no public checkpoint is pinned for {metric_id};"
            " pass --checkpoint with the release you use"
        )
    return _ENGINES[pinned.engine](metric_id, name, device)


def build_loaders(
    metric_ids: Sequence[str],
    checkpoint: str | None = None,
    simulate: bool = False,
) -> dict[str, BackendLoader]:
    """Build the metric id → loader mapping a ScorerJob carries."""

    def loader_for(metric_id: str) -> BackendLoader:
        def load(device: str) -> Backend:
            return load_backend(
                metric_id, device=device, checkpoint=checkpoint, simulate=simulate
            )

        return load

    return {metric_id: loader_for(metric_id) for metric_id in metric_ids}
