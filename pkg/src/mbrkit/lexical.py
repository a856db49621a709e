"""Sentence-level lexical metrics: sentBLEU, chrF, chrF++ and TER.

The implementations follow sacreBLEU's sentence-level defaults: BLEU with
exponential smoothing and effective n-gram order over 13a-tokenized text,
chrF and chrF++ as averages of per-order F2 scores with effective-order
skipping, and TER as a greedy shift search over a beam-limited edit
distance on lowercased whitespace tokens.

Pairwise use is supported through per-candidate profiles: n-gram counts
are extracted once per text, and each unordered pair is matched in a
single dictionary pass. Match statistics (clipped counts for BLEU,
n-gram overlaps for chrF) are symmetric, so both directions of a pair
come out of one matching step.
"""

from __future__ import annotations

import math
import re
import string
from dataclasses import dataclass

from .core import canonical_metric_id
from .errors import EmptyReferenceError, UnsupportedNativeMetricError

BLEU_MAX_ORDER = 4
CHRF_CHAR_ORDER = 6
CHRF_BETA = 2
CHRFPP_WORD_ORDER = 2

# stands in for log(0); exp() of a sum containing it underflows to 0.0
_BLEU_LOG_ZERO = -9999999999


# --- 13a tokenization ---------------------------------------------------------

_13A_RULES = (
    # separate out punctuation (Western languages)
    (re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])"), r" \1 "),
    # period and comma unless preceded by a digit
    (re.compile(r"([^0-9])([\.,])"), r"\1 \2 "),
    # period and comma unless followed by a digit
    (re.compile(r"([\.,])([^0-9])"), r" \1 \2"),
    # dash preceded by a digit
    (re.compile(r"([0-9])(-)"), r"\1 \2 "),
)


def tokenize_13a(line: str) -> str:
    """Tokenize with the mteval-v13a scheme, returning a spaced string."""
    line = line.replace("<skipped>", "")
    line = line.replace("-\n", "")
    line = line.replace("\n", " ")

    if "&" in line:
        line = line.replace("&quot;", '"')
        line = line.replace("&amp;", "&")
        line = line.replace("&lt;", "<")
        line = line.replace("&gt;", ">")

    line = f" {line} "
    for pattern, repl in _13A_RULES:
        line = pattern.sub(repl, line)

    return " ".join(line.split())


# --- n-gram profiles ----------------------------------------------------------


@dataclass(frozen=True)
class NgramProfile:
    """N-gram counts of one text for orders 1..len(totals).

    Keys of all orders share a single dict (tuples for token n-grams,
    strings for character n-grams) so that matching a pair of texts is
    one dictionary pass; len(key) recovers the order.
    """

    counts: dict
    totals: tuple[int, ...]


@dataclass(frozen=True)
class BleuProfile:
    ngrams: NgramProfile
    n_tokens: int


@dataclass(frozen=True)
class ChrfProfile:
    chars: NgramProfile
    words: NgramProfile | None


@dataclass(frozen=True)
class TerProfile:
    tokens: tuple[str, ...]


def _token_ngram_profile(tokens: list[str], max_order: int) -> NgramProfile:
    counts: dict = {}
    n = len(tokens)
    totals = []
    for order in range(1, max_order + 1):
        total = n - order + 1
        if total < 0:
            total = 0
        totals.append(total)
        for i in range(total):
            key = tuple(tokens[i : i + order])
            counts[key] = counts.get(key, 0) + 1
    return NgramProfile(counts, tuple(totals))


def _char_ngram_profile(text: str, max_order: int) -> NgramProfile:
    counts: dict = {}
    n = len(text)
    totals = []
    for order in range(1, max_order + 1):
        total = n - order + 1
        if total < 0:
            total = 0
        totals.append(total)
        for i in range(total):
            key = text[i : i + order]
            counts[key] = counts.get(key, 0) + 1
    return NgramProfile(counts, tuple(totals))


def _match_counts(a: NgramProfile, b: NgramProfile) -> list[int]:
    """Clipped co-occurrence counts per order; symmetric in a and b."""
    small, big = a.counts, b.counts
    if len(big) < len(small):
        small, big = big, small
    matches = [0] * len(a.totals)
    get = big.get
    for key, count in small.items():
        other = get(key)
        if other is not None:
            matches[len(key) - 1] += count if count < other else other
    return matches


# --- sentBLEU -----------------------------------------------------------------


def bleu_profile(text: str) -> BleuProfile:
    tokens = tokenize_13a(text).split()
    return BleuProfile(_token_ngram_profile(tokens, BLEU_MAX_ORDER), len(tokens))


def _bleu_from_stats(
    correct: list[int], total: tuple[int, ...], sys_len: int, ref_len: int
) -> float:
    if ref_len == 0:
        raise EmptyReferenceError()
    scores = [0.0] * BLEU_MAX_ORDER
    smooth_mteval = 1.0
    effective_order = BLEU_MAX_ORDER
    for n in range(1, BLEU_MAX_ORDER + 1):
        if total[n - 1] == 0:
            break
        effective_order = n
        if correct[n - 1] == 0:
            smooth_mteval *= 2
            scores[n - 1] = 100.0 / (smooth_mteval * total[n - 1])
        else:
            scores[n - 1] = 100.0 * correct[n - 1] / total[n - 1]

    if sys_len < ref_len:
        brevity_penalty = math.exp(1 - ref_len / sys_len) if sys_len > 0 else 0.0
    else:
        brevity_penalty = 1.0

    log_sum = 0.0
    perfect = brevity_penalty == 1.0
    for p in scores[:effective_order]:
        if p != 100.0:
            perfect = False
        log_sum += math.log(p) if p > 0.0 else _BLEU_LOG_ZERO
    # the exp/log round trip of a mathematically exact 100 lands 4e-14 off;
    # return the exact value for perfect matches
    if perfect:
        return 100.0
    return brevity_penalty * math.exp(log_sum / effective_order)


def bleu_pair_scores(a: BleuProfile, b: BleuProfile) -> tuple[float, float]:
    """(sentBLEU with a as hypothesis, sentBLEU with b as hypothesis)."""
    matches = _match_counts(a.ngrams, b.ngrams)
    return (
        _bleu_from_stats(matches, a.ngrams.totals, a.n_tokens, b.n_tokens),
        _bleu_from_stats(matches, b.ngrams.totals, b.n_tokens, a.n_tokens),
    )


def sent_bleu(hypothesis: str, reference: str) -> float:
    """Sentence BLEU with exponential smoothing and effective order."""
    a, b = bleu_profile(hypothesis), bleu_profile(reference)
    matches = _match_counts(a.ngrams, b.ngrams)
    return _bleu_from_stats(matches, a.ngrams.totals, a.n_tokens, b.n_tokens)


# --- chrF / chrF++ ------------------------------------------------------------

_PUNCTS = frozenset(string.punctuation)


def _chrf_words(text: str) -> list[str]:
    """Whitespace tokens with one leading or trailing punctuation mark split off."""
    words: list[str] = []
    for w in text.split():
        if len(w) == 1:
            words.append(w)
        elif w[-1] in _PUNCTS:
            words.extend((w[:-1], w[-1]))
        elif w[0] in _PUNCTS:
            words.extend((w[0], w[1:]))
        else:
            words.append(w)
    return words


def chrf_profile(text: str, word_order: int = 0) -> ChrfProfile:
    chars = _char_ngram_profile("".join(text.split()), CHRF_CHAR_ORDER)
    words = None
    if word_order > 0:
        words = _token_ngram_profile(_chrf_words(text), word_order)
    return ChrfProfile(chars, words)


def _chrf_direction(
    hyp_totals: list[int], ref_totals: list[int], matches: list[int], factor: int
) -> float:
    if ref_totals[0] == 0:
        raise EmptyReferenceError()
    score = 0.0
    effective_order = 0
    for n_hyp, n_ref, n_match in zip(hyp_totals, ref_totals, matches):
        if n_hyp > 0 and n_ref > 0:
            effective_order += 1
            if n_match > 0:
                prec = n_match / n_hyp
                rec = n_match / n_ref
                score += (1 + factor) * prec * rec / (factor * prec + rec)
    if effective_order == 0:
        return 0.0
    return 100.0 * score / effective_order


def _chrf_stats(
    a: ChrfProfile, b: ChrfProfile
) -> tuple[list[int], list[int], list[int]]:
    matches = _match_counts(a.chars, b.chars)
    a_totals = list(a.chars.totals)
    b_totals = list(b.chars.totals)
    if a.words is not None and b.words is not None:
        matches += _match_counts(a.words, b.words)
        a_totals += list(a.words.totals)
        b_totals += list(b.words.totals)
    return a_totals, b_totals, matches


def chrf_pair_scores(
    a: ChrfProfile, b: ChrfProfile, beta: int = CHRF_BETA
) -> tuple[float, float]:
    """(chrF with a as hypothesis, chrF with b as hypothesis)."""
    a_totals, b_totals, matches = _chrf_stats(a, b)
    factor = beta * beta
    return (
        _chrf_direction(a_totals, b_totals, matches, factor),
        _chrf_direction(b_totals, a_totals, matches, factor),
    )


def chrf(hypothesis: str, reference: str, word_order: int = 0) -> float:
    """chrF score; word_order 2 gives chrF++."""
    a = chrf_profile(hypothesis, word_order)
    b = chrf_profile(reference, word_order)
    a_totals, b_totals, matches = _chrf_stats(a, b)
    return _chrf_direction(a_totals, b_totals, matches, CHRF_BETA * CHRF_BETA)


def chrf_pp(hypothesis: str, reference: str) -> float:
    return chrf(hypothesis, reference, word_order=CHRFPP_WORD_ORDER)


# --- TER ----------------------------------------------------------------------

_TER_MAX_SHIFT_SIZE = 10
_TER_MAX_SHIFT_DIST = 50
_TER_BEAM_WIDTH = 25
_TER_MAX_SHIFT_CANDIDATES = 1000
_TER_MAX_CACHE_SIZE = 10000
_TER_INT_INFINITY = int(1e16)

# trace operations: 'i' consumes a reference word alone, 'd' a hypothesis
# word alone, ' ' is an exact match and 's' a substitution
_OP_INS = "i"
_OP_DEL = "d"
_OP_NOP = " "
_OP_SUB = "s"
_OP_UNDEF = "x"


def ter_profile(text: str, case_sensitive: bool = False) -> TerProfile:
    s = text.rstrip()
    if not case_sensitive:
        s = s.lower()
    return TerProfile(tuple(s.split()))


class _BeamEditDistance:
    """Beam-limited Levenshtein distance against a fixed reference.

    Matrix rows are cached per hypothesis prefix, so rescoring the many
    same-length reorderings tried by the shift search only recomputes
    rows after the first changed word. Each cell holds (cost, trace);
    the trace string is later turned into a word alignment.
    """

    def __init__(self, words_ref: list[str]):
        self._words_ref = words_ref
        self._initial_row = [(j, _OP_INS * j) for j in range(len(words_ref) + 1)]
        self._empty_row = [(_TER_INT_INFINITY, _OP_UNDEF)] * (len(words_ref) + 1)
        self._cache: dict = {}
        self._cache_size = 0

    def __call__(self, words_hyp: list[str]) -> tuple[int, str]:
        start, rows = self._find_cache(words_hyp)
        cost, new_rows, trace = self._edit_distance(words_hyp, start, rows)
        self._add_cache(words_hyp, new_rows)
        return cost, trace

    def _find_cache(self, words_hyp: list[str]) -> tuple[int, list]:
        node = self._cache
        start = 0
        rows = [self._initial_row]
        for word in words_hyp:
            if word not in node:
                break
            start += 1
            node, row = node[word]
            rows.append(row)
        return start, rows

    def _add_cache(self, words_hyp: list[str], new_rows: list) -> None:
        if self._cache_size >= _TER_MAX_CACHE_SIZE:
            return
        node = self._cache
        skip = len(words_hyp) - len(new_rows)
        for i in range(skip):
            node = node[words_hyp[i]][0]
        for word, row in zip(words_hyp[skip:], new_rows):
            if word not in node:
                node[word] = ({}, tuple(row))
                self._cache_size += 1
            node = node[word][0]

    def _edit_distance(
        self, words_hyp: list[str], start: int, rows: list
    ) -> tuple[int, list, str]:
        n_hyp = len(words_hyp)
        n_ref = len(self._words_ref)
        matrix = rows + [list(self._empty_row) for _ in range(n_hyp - start)]

        length_ratio = n_ref / n_hyp if words_hyp else 1
        # widen the beam for extreme length mismatches so that consecutive
        # row windows keep overlapping
        if _TER_BEAM_WIDTH < length_ratio / 2:
            beam_width = math.ceil(length_ratio / 2 + _TER_BEAM_WIDTH)
        else:
            beam_width = _TER_BEAM_WIDTH

        for i in range(start + 1, n_hyp + 1):
            pseudo_diag = math.floor(i * length_ratio)
            min_j = max(0, pseudo_diag - beam_width)
            if i == n_hyp:
                max_j = n_ref + 1
            else:
                max_j = min(n_ref + 1, pseudo_diag + beam_width)

            row = matrix[i]
            row_prev = matrix[i - 1]
            word_hyp = words_hyp[i - 1]
            for j in range(min_j, max_j):
                if j == 0:
                    up = row_prev[0]
                    row[0] = (up[0] + 1, up[1] + _OP_DEL)
                    continue
                if word_hyp == self._words_ref[j - 1]:
                    cost_sub, op_sub = 0, _OP_NOP
                else:
                    cost_sub, op_sub = 1, _OP_SUB
                # preference on ties: substitution/match, then insertion,
                # then deletion
                cell = row[j]
                diag = row_prev[j - 1]
                cost = diag[0] + cost_sub
                if cell[0] > cost:
                    cell = (cost, diag[1] + op_sub)
                left = row[j - 1]
                cost = left[0] + 1
                if cell[0] > cost:
                    cell = (cost, left[1] + _OP_INS)
                up = row_prev[j]
                cost = up[0] + 1
                if cell[0] > cost:
                    cell = (cost, up[1] + _OP_DEL)
                row[j] = cell

        final = matrix[-1][-1]
        return final[0], matrix[len(rows):], final[1]


def _trace_to_alignment(trace: str) -> tuple[dict, list[int], list[int]]:
    """Alignment (reference position -> hypothesis position) and error flags."""
    pos_hyp = -1
    pos_ref = -1
    align: dict = {}
    hyp_err: list[int] = []
    ref_err: list[int] = []
    for op in trace:
        if op == _OP_NOP:
            pos_hyp += 1
            pos_ref += 1
            align[pos_ref] = pos_hyp
            hyp_err.append(0)
            ref_err.append(0)
        elif op == _OP_SUB:
            pos_hyp += 1
            pos_ref += 1
            align[pos_ref] = pos_hyp
            hyp_err.append(1)
            ref_err.append(1)
        elif op == _OP_INS:
            pos_ref += 1
            align[pos_ref] = pos_hyp
            ref_err.append(1)
        elif op == _OP_DEL:
            pos_hyp += 1
            hyp_err.append(1)
        else:
            raise ValueError(f"unknown edit operation {op!r}")
    return align, ref_err, hyp_err


def _find_shifted_pairs(words_hyp: list[str], words_ref: list[str]):
    """Yield (start_hyp, start_ref, length) for every matching sub-sequence."""
    n_hyp = len(words_hyp)
    n_ref = len(words_ref)
    for start_h in range(n_hyp):
        for start_r in range(n_ref):
            if abs(start_r - start_h) > _TER_MAX_SHIFT_DIST:
                continue
            length = 0
            while (
                words_hyp[start_h + length] == words_ref[start_r + length]
                and length < _TER_MAX_SHIFT_SIZE
            ):
                length += 1
                yield start_h, start_r, length
                if start_h + length == n_hyp or start_r + length == n_ref:
                    break


def _perform_shift(words: list[str], start: int, length: int, target: int) -> list[str]:
    if target < start:
        return (
            words[:target]
            + words[start : start + length]
            + words[target:start]
            + words[start + length :]
        )
    if target > start + length:
        return (
            words[:start]
            + words[start + length : target]
            + words[start : start + length]
            + words[target:]
        )
    return (
        words[:start]
        + words[start + length : length + target]
        + words[start : start + length]
        + words[length + target :]
    )


def _shift(
    words_hyp: list[str],
    words_ref: list[str],
    cached_ed: _BeamEditDistance,
    checked_candidates: int,
) -> tuple[int, list[str], int]:
    """Best single block shift of the hypothesis, greedy Tercom-style."""
    pre_score, trace = cached_ed(words_hyp)
    align, ref_err, hyp_err = _trace_to_alignment(trace)

    best = None
    for start_h, start_r, length in _find_shifted_pairs(words_hyp, words_ref):
        # only move blocks that are wrong and needed elsewhere
        if sum(hyp_err[start_h : start_h + length]) == 0:
            continue
        if sum(ref_err[start_r : start_r + length]) == 0:
            continue
        # don't shift into the block itself
        if start_h <= align[start_r] < start_h + length:
            continue

        prev_idx = -1
        for offset in range(-1, length):
            if start_r + offset == -1:
                idx = 0
            elif start_r + offset in align:
                idx = align[start_r + offset] + 1
            else:
                break
            if idx == prev_idx:
                continue
            prev_idx = idx

            shifted_words = _perform_shift(words_hyp, start_h, length, idx)

            # rank by gain, then block length, then earliest source,
            # then earliest destination
            candidate = (
                pre_score - cached_ed(shifted_words)[0],
                length,
                -start_h,
                -idx,
                shifted_words,
            )
            checked_candidates += 1
            if best is None or candidate > best:
                best = candidate

        if checked_candidates >= _TER_MAX_SHIFT_CANDIDATES:
            break

    if best is None:
        return 0, words_hyp, checked_candidates
    return best[0], best[4], checked_candidates


def _translation_edit_rate(words_hyp: list[str], words_ref: list[str]) -> tuple[int, int]:
    """Number of edits (shifts plus edit distance) and the reference length."""
    n_ref = len(words_ref)
    if n_ref == 0:
        return len(words_hyp), 0

    cached_ed = _BeamEditDistance(words_ref)
    shifts = 0
    input_words = list(words_hyp)
    checked_candidates = 0
    while True:
        delta, new_input, checked_candidates = _shift(
            input_words, words_ref, cached_ed, checked_candidates
        )
        if checked_candidates >= _TER_MAX_SHIFT_CANDIDATES:
            break
        if delta <= 0:
            break
        shifts += 1
        input_words = new_input

    edit_distance, _ = cached_ed(input_words)
    return shifts + edit_distance, n_ref


def _ter_from_tokens(words_hyp: list[str], words_ref: list[str]) -> float:
    if not words_ref:
        raise EmptyReferenceError()
    edits, ref_len = _translation_edit_rate(words_hyp, words_ref)
    return 100.0 * edits / ref_len


def ter_pair_scores(a: TerProfile, b: TerProfile) -> tuple[float, float]:
    """(TER with a as hypothesis, TER with b as hypothesis)."""
    return (
        _ter_from_tokens(list(a.tokens), list(b.tokens)),
        _ter_from_tokens(list(b.tokens), list(a.tokens)),
    )


def ter(hypothesis: str, reference: str, case_sensitive: bool = False) -> float:
    """Translation edit rate in percent (lower is better)."""
    return _ter_from_tokens(
        list(ter_profile(hypothesis, case_sensitive).tokens),
        list(ter_profile(reference, case_sensitive).tokens),
    )


# --- dispatch -----------------------------------------------------------------

_CHRF_WORD_ORDERS = {"chrF": 0, "chrF++": CHRFPP_WORD_ORDER}


def profile_builder(metric_id: str):
    """Profile constructor (text -> profile) for a native metric."""
    mid = canonical_metric_id(metric_id)
    if mid == "sentBLEU":
        return bleu_profile
    if mid in _CHRF_WORD_ORDERS:
        word_order = _CHRF_WORD_ORDERS[mid]
        return lambda text: chrf_profile(text, word_order)
    if mid == "TER":
        return ter_profile
    raise UnsupportedNativeMetricError(metric_id)


def pair_scorer(metric_id: str):
    """Two-direction scorer over profiles: (a, b) -> (score_ab, score_ba)."""
    mid = canonical_metric_id(metric_id)
    if mid == "sentBLEU":
        return bleu_pair_scores
    if mid in _CHRF_WORD_ORDERS:
        return chrf_pair_scores
    if mid == "TER":
        return ter_pair_scores
    raise UnsupportedNativeMetricError(metric_id)


def native_score(metric_id: str, hypothesis: str, reference: str) -> float:
    """Score one hypothesis against one reference with a native metric."""
    mid = canonical_metric_id(metric_id)
    if mid == "sentBLEU":
        return sent_bleu(hypothesis, reference)
    if mid in _CHRF_WORD_ORDERS:
        return chrf(hypothesis, reference, _CHRF_WORD_ORDERS[mid])
    if mid == "TER":
        return ter(hypothesis, reference)
    raise UnsupportedNativeMetricError(metric_id)
