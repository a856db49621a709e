"""Real-model backend paths.

The load-hint tests run wherever the engine package is absent; the live
inference test needs the package installed plus PY_SCORER_REAL_MODELS=1,
because constructing a backend downloads a multi-gigabyte checkpoint.
"""

from __future__ import annotations

import importlib.util
import os

import pytest

from py_scorer.backends import load_backend
from py_scorer.errors import ModelLoadError

_HAS_COMET = importlib.util.find_spec("comet") is not None
_HAS_BLEURT = importlib.util.find_spec("bleurt") is not None
_HAS_METRICX = importlib.util.find_spec("metricx") is not None
_RUN_REAL = bool(os.environ.get("PY_SCORER_REAL_MODELS"))


@pytest.mark.skipif(_HAS_COMET, reason="unbabel-comet is installed")
def test_comet_loader_hints_at_the_package():
    with pytest.raises(ModelLoadError, match="unbabel-comet"):
        load_backend("COMET22")


@pytest.mark.skipif(_HAS_BLEURT, reason="bleurt is installed")
def test_bleurt_loader_hints_at_the_repository():
    with pytest.raises(ModelLoadError, match="google-research/bleurt"):
        load_backend("BLEURT")


@pytest.mark.skipif(_HAS_METRICX, reason="metricx is installed")
def test_metricx_loader_hints_at_the_repository():
    with pytest.raises(ModelLoadError, match="google-research/metricx"):
        load_backend("MetricX")


def test_yisi_has_no_backend():
    with pytest.raises(ModelLoadError, match="YiSi"):
        load_backend("YiSi")


def test_indiccomet_requires_explicit_checkpoint():
    with pytest.raises(ModelLoadError, match="pass --checkpoint"):
        load_backend("IndicCOMET")


@pytest.mark.skipif(
    not (_HAS_COMET and _RUN_REAL),
    reason="needs unbabel-comet and PY_SCORER_REAL_MODELS=1 (downloads a checkpoint)",
)
def test_cometkiwi_scores_a_tiny_batch():
    backend = load_backend("CometKiwi22", device="cpu")
    rows = [
        ("Der Hund bellt.", "The dog barks.", None),
        ("Der Hund bellt.", "Potato quantum headphone.", None),
    ]
    scores = backend.score(rows)
    assert len(scores) == 2
    assert all(isinstance(s, float) for s in scores)
    assert scores[0] > scores[1]
