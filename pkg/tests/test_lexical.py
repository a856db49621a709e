"""Tests for the native lexical metrics against frozen and live oracles."""

import json
from pathlib import Path

import pytest

from mbrkit.errors import EmptyReferenceError, UnsupportedNativeMetricError
from mbrkit.lexical import (
    chrf,
    chrf_pair_scores,
    chrf_pp,
    chrf_profile,
    native_score,
    pair_scorer,
    profile_builder,
    sent_bleu,
    ter,
    tokenize_13a,
)
from tests.oracles import sacrebleu_port as oracle

CORPUS = Path(__file__).parent / "fixtures" / "lexical_corpus.jsonl"


def corpus_records() -> list[dict]:
    with CORPUS.open(encoding="utf-8") as f:
        return [json.loads(line) for line in f]


class TestTokenize13a:
    def test_punctuation_split(self):
        assert tokenize_13a("hello, world!").split() == ["hello", ",", "world", "!"]

    def test_entities_unescaped(self):
        """HTML entities become characters, then punctuation splits apply."""
        assert tokenize_13a("&quot;a&quot; &amp; b").split() == ['"', "a", '"', "&", "b"]

    def test_dash_between_digits_kept(self):
        assert tokenize_13a("2024-01").split() == ["2024", "-", "01"]
        assert tokenize_13a("well-known").split() == ["well-known"]

    def test_period_before_nondigit_split(self):
        assert tokenize_13a("end. Next").split() == ["end", ".", "Next"]
        assert tokenize_13a("3.5").split() == ["3.5"]


class TestSentBleu:
    def test_identity(self):
        assert sent_bleu("the cat sat", "the cat sat") == 100.0

    def test_empty_hypothesis(self):
        assert sent_bleu("", "the cat sat") == 0.0

    def test_empty_reference(self):
        with pytest.raises(EmptyReferenceError):
            sent_bleu("the cat sat", "")

    def test_whitespace_reference_counts_as_empty(self):
        with pytest.raises(EmptyReferenceError):
            sent_bleu("a", "   ")

    def test_case_sensitive(self):
        assert sent_bleu("The Cat", "the cat") < 100.0

    def test_range(self):
        score = sent_bleu("the the the cat", "the cat sat on the mat")
        assert 0.0 < score < 100.0


class TestChrf:
    def test_identity(self):
        assert chrf("abc def", "abc def") == 100.0
        assert chrf_pp("abc def", "abc def") == 100.0

    def test_empty_hypothesis(self):
        assert chrf("", "abc") == 0.0

    def test_empty_reference(self):
        with pytest.raises(EmptyReferenceError):
            chrf("abc", "")

    def test_word_order_zero_equals_chrf(self):
        pairs = [("cat", "cats"), ("a b c", "c b a"), ("xy", "xyz zy")]
        for hyp, ref in pairs:
            assert chrf(hyp, ref, word_order=0) == chrf(hyp, ref)

    def test_chrf_pp_uses_word_bigrams(self):
        hyp, ref = "the big cat", "the big dog"
        assert chrf_pp(hyp, ref) != chrf(hyp, ref)

    def test_whitespace_excluded_from_char_ngrams(self):
        """Joining tokens differently must not change character statistics."""
        assert chrf("ab cd", "abcd") == chrf("abcd", "ab cd") == 100.0


class TestTer:
    def test_identity(self):
        assert ter("a b c", "a b c") == 0.0

    def test_full_rewrite(self):
        """1 substitution + 3 deletions over reference length 4."""
        assert ter("x", "a b c d") == 100.0

    def test_single_shift(self):
        """One block shift costs one edit over reference length 3."""
        assert ter("c a b", "a b c") == pytest.approx(100.0 / 3.0)

    def test_can_exceed_100(self):
        assert ter("a b c d e f", "x") > 100.0

    def test_lowercases_by_default(self):
        assert ter("THE CAT", "the cat") == 0.0
        assert ter("THE CAT", "the cat", case_sensitive=True) > 0.0

    def test_empty_reference(self):
        with pytest.raises(EmptyReferenceError):
            ter("a", " ")

    def test_empty_hypothesis(self):
        assert ter("", "a b c d") == 100.0


class TestDispatch:
    def test_native_score_routes(self):
        assert native_score("bleu", "a b", "a b") == 100.0
        assert native_score("chrf", "a b", "a b") == 100.0
        assert native_score("chrfpp", "a b", "a b") == 100.0
        assert native_score("ter", "a b", "a b") == 0.0

    def test_non_lexical_rejected(self):
        with pytest.raises(UnsupportedNativeMetricError):
            native_score("COMET22", "a", "b")
        with pytest.raises(UnsupportedNativeMetricError):
            profile_builder("COMET22")
        with pytest.raises(UnsupportedNativeMetricError):
            pair_scorer("COMET22")

    def test_pair_scorer_directions(self):
        build = profile_builder("chrF")
        forward, backward = pair_scorer("chrF")(build("cat"), build("cats"))
        assert forward == chrf("cat", "cats")
        assert backward == chrf("cats", "cat")


class TestCorpusConformance:
    """The frozen corpus pins all four metrics; see fixtures/gen_lexical_corpus.py."""

    def test_corpus_size(self):
        assert len(corpus_records()) >= 200

    def test_scores_match_frozen(self):
        """Implementation agrees with every frozen score to well under 1e-4."""
        for rec in corpus_records():
            hyp, ref = rec["hypothesis"], rec["reference"]
            assert sent_bleu(hyp, ref) == pytest.approx(rec["sentBLEU"], abs=1e-4)
            assert chrf(hyp, ref) == pytest.approx(rec["chrF"], abs=1e-4)
            assert chrf_pp(hyp, ref) == pytest.approx(rec["chrFpp"], abs=1e-4)
            assert ter(hyp, ref) == pytest.approx(rec["TER"], abs=1e-4)

    def test_frozen_scores_match_live_oracle(self):
        """Guards the fixture against accidental edits: the frozen numbers
        are exactly what the oracle produces today."""
        for rec in corpus_records():
            hyp, ref = rec["hypothesis"], rec["reference"]
            assert oracle.sentence_bleu(hyp, ref) == rec["sentBLEU"]
            assert oracle.chrf_score(hyp, ref) == rec["chrF"]
            assert oracle.chrf_score(hyp, ref, word_order=2) == rec["chrFpp"]
            assert oracle.ter_score(hyp, ref) == rec["TER"]

    def test_identity_pairs_exact(self):
        """Identical strings score exactly 100/100/100/0."""
        seen = 0
        for rec in corpus_records():
            if rec["hypothesis"] == rec["reference"]:
                seen += 1
                hyp = rec["hypothesis"]
                assert sent_bleu(hyp, hyp) == 100.0
                assert chrf(hyp, hyp) == 100.0
                assert chrf_pp(hyp, hyp) == 100.0
                assert ter(hyp, hyp) == 0.0
        assert seen >= 20

    def test_determinism(self):
        rec = corpus_records()[37]
        hyp, ref = rec["hypothesis"], rec["reference"]
        for fn in (sent_bleu, chrf, chrf_pp, ter):
            assert fn(hyp, ref) == fn(hyp, ref)


class TestChrfProfiles:
    def test_pair_scores_symmetric_roles(self):
        a = chrf_profile("the cat", word_order=2)
        b = chrf_profile("a cat", word_order=2)
        ab, ba = chrf_pair_scores(a, b)
        assert ab == chrf("the cat", "a cat", 2)
        assert ba == chrf("a cat", "the cat", 2)
