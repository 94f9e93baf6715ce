"""Derivation scoring and search: exhaustive oracle plus stack beam search.

A derivation is an ordered phrase sequence whose spans partition the
source sentence. Its score is

    f(y) = w_h * h(r(y)) + w_g * sum_k g(p_k) + w_d * sum_k |e(p_k)+1 - b(p_k+1)|

with the distortion sum over consecutive phrase boundaries only (no term
before the first phrase). Beam search accumulates the three sums in
exactly the order the batch scorer does, so completed hypotheses score
bit-identically to score_derivation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .corpus import Sentence
from .errors import EmptyInput, NoDerivation, OracleLimitExceeded
from .language_model import BOS, EOS, TrigramModel, score_sequence
from .phrase_table import PhraseTable, lookup


@dataclass(frozen=True)
class PhraseInstance:
    """A lexical entry applied to a span: s_b..s_e translates to r."""

    b: int
    e: int
    r: tuple[str, ...]
    g: float


@dataclass(frozen=True)
class Derivation:
    phrases: tuple[PhraseInstance, ...]


@dataclass(frozen=True)
class Weights:
    w_h: float = 1.0
    w_g: float = 1.0
    w_d: float = -0.5


@dataclass
class DecoderConfig:
    beam_size: int = 100
    distortion_limit: Optional[int] = None  # None = unlimited
    unk_penalty: float = -10.0
    pass_through: bool = True
    oracle_limit: int = 8


def target_of(y: Derivation) -> Sentence:
    """Concatenate phrase outputs in derivation order (not source order)."""
    return tuple(itertools.chain.from_iterable(p.r for p in y.phrases))


def _combine(weights: Weights, h: float, g: float, d: int) -> float:
    return weights.w_h * h + weights.w_g * g + weights.w_d * d


def _lm_extend(lm: TrigramModel, h: float, context: tuple[str, str],
               tokens: tuple[str, ...]) -> tuple[float, tuple[str, str]]:
    """Fold tokens into a running LM sum, left to right, mapping OOVs."""
    u, v = context
    for token in tokens:
        w = lm.map_token(token)
        h += lm.logprob(w, u, v)
        u, v = v, w
    return h, (u, v)


def score_derivation(y: Derivation, lm: TrigramModel, weights: Weights) -> float:
    h = score_sequence(lm, target_of(y))
    g = 0.0
    for p in y.phrases:
        g += p.g
    d = 0
    for k in range(len(y.phrases) - 1):
        d += abs(y.phrases[k].e + 1 - y.phrases[k + 1].b)
    return _combine(weights, h, g, d)


def span_candidates(sent: Sentence, table: PhraseTable,
                    config: DecoderConfig) -> dict[tuple[int, int], list[PhraseInstance]]:
    """Table matches per span, plus single-token pass-throughs if enabled."""
    n = len(sent)
    out: dict[tuple[int, int], list[PhraseInstance]] = {}
    max_len = min(n, table.max_src_len())
    for b in range(1, n + 1):
        for e in range(b, min(n, b + max_len - 1) + 1):
            cands = [PhraseInstance(b, e, tgt, g) for tgt, g in lookup(table, sent, b, e)]
            if cands:
                out[(b, e)] = cands
    if config.pass_through:
        for b in range(1, n + 1):
            if (b, b) not in out:
                out[(b, b)] = [PhraseInstance(b, b, (sent[b - 1],), config.unk_penalty)]
    return out


def _check_coverable(n: int, candidates) -> None:
    covered = set()
    for b, e in candidates:
        covered.update(range(b, e + 1))
    missing = set(range(1, n + 1)) - covered
    if missing:
        raise NoDerivation(f"no candidate phrase covers position(s) {sorted(missing)}")


def _tie_key(phrases) -> tuple:
    target = tuple(itertools.chain.from_iterable(p.r for p in phrases))
    return (target, tuple((p.b, p.e) for p in phrases))


def exhaustive_decode(sent: Sentence, table: PhraseTable, lm: TrigramModel,
                      weights: Weights, config: Optional[DecoderConfig] = None) -> tuple[Derivation, float]:
    """Enumerate every segmentation and phrase order; return the argmax.

    Ties break toward the lexicographically smallest target string, then
    the smallest (b, e) phrase sequence.
    """
    config = config or DecoderConfig()
    n = len(sent)
    if n == 0:
        raise EmptyInput("cannot decode an empty sentence")
    if n > config.oracle_limit:
        raise OracleLimitExceeded(f"length {n} exceeds oracle limit {config.oracle_limit}")
    candidates = span_candidates(sent, table, config)
    _check_coverable(n, candidates)
    spans = [(b, e, _span_mask(b, e), cands) for (b, e), cands in sorted(candidates.items())]
    full = (1 << n) - 1
    h_cache: dict[tuple[str, ...], float] = {}

    best: list = [None]  # [(f, tie_key, phrases)]

    def visit(mask: int, phrases: list[PhraseInstance]):
        if mask == full:
            y = Derivation(tuple(phrases))
            target = target_of(y)
            h = h_cache.get(target)
            if h is None:
                h = h_cache[target] = score_sequence(lm, target)
            g = 0.0
            for p in phrases:
                g += p.g
            d = 0
            for k in range(len(phrases) - 1):
                d += abs(phrases[k].e + 1 - phrases[k + 1].b)
            f = _combine(weights, h, g, d)
            key = _tie_key(phrases)
            if best[0] is None or f > best[0][0] or (f == best[0][0] and key < best[0][1]):
                best[0] = (f, key, y)
            return
        for b, e, span_mask, cands in spans:
            if mask & span_mask:
                continue
            if phrases and config.distortion_limit is not None:
                if abs(phrases[-1].e + 1 - b) > config.distortion_limit:
                    continue
            for cand in cands:
                phrases.append(cand)
                visit(mask | span_mask, phrases)
                phrases.pop()

    visit(0, [])
    if best[0] is None:
        raise NoDerivation("no derivation reaches full coverage")
    f, _, y = best[0]
    return y, f


def _span_mask(b: int, e: int) -> int:
    mask = 0
    for pos in range(b, e + 1):
        mask |= 1 << (pos - 1)
    return mask


class _Hypothesis:
    __slots__ = ("mask", "last_two", "end_pos", "h_sum", "g_sum", "d_sum",
                 "score", "pred", "phrase")

    def __init__(self, mask, last_two, end_pos, h_sum, g_sum, d_sum, score, pred, phrase):
        self.mask = mask
        self.last_two = last_two
        self.end_pos = end_pos
        self.h_sum = h_sum
        self.g_sum = g_sum
        self.d_sum = d_sum
        self.score = score
        self.pred = pred
        self.phrase = phrase


def _hyp_phrases(hyp: _Hypothesis) -> tuple[PhraseInstance, ...]:
    phrases = []
    while hyp.phrase is not None:
        phrases.append(hyp.phrase)
        hyp = hyp.pred
    return tuple(reversed(phrases))


def beam_decode(sent: Sentence, table: PhraseTable, lm: TrigramModel,
                weights: Weights, config: Optional[DecoderConfig] = None) -> tuple[Derivation, float]:
    """Stack decoding with one stack per covered-position count.

    Hypotheses recombine on (coverage, last two target tokens, end position),
    keeping the higher score; each stack is histogram-pruned to beam_size.
    """
    config = config or DecoderConfig()
    n = len(sent)
    if n == 0:
        raise EmptyInput("cannot decode an empty sentence")
    candidates = span_candidates(sent, table, config)
    _check_coverable(n, candidates)
    spans = [(b, e, _span_mask(b, e), cands) for (b, e), cands in sorted(candidates.items())]

    stacks: list[dict] = [{} for _ in range(n + 1)]
    initial = _Hypothesis(0, (BOS, BOS), 0, 0.0, 0.0, 0, 0.0, None, None)
    stacks[0][(0, initial.last_two, 0)] = initial

    for k in range(n):
        ranked = sorted(stacks[k].items(), key=lambda kv: (-kv[1].score, kv[0]))
        for _, hyp in ranked[:config.beam_size]:
            for b, e, span_mask, cands in spans:
                if hyp.mask & span_mask:
                    continue
                if hyp.phrase is not None:
                    step = abs(hyp.end_pos + 1 - b)
                    if config.distortion_limit is not None and step > config.distortion_limit:
                        continue
                else:
                    step = 0
                for cand in cands:
                    h_sum, last_two = _lm_extend(lm, hyp.h_sum, hyp.last_two, cand.r)
                    g_sum = hyp.g_sum + cand.g
                    d_sum = hyp.d_sum + step
                    score = _combine(weights, h_sum, g_sum, d_sum)
                    new = _Hypothesis(hyp.mask | span_mask, last_two, e,
                                      h_sum, g_sum, d_sum, score, hyp, cand)
                    key = (new.mask, last_two, e)
                    covered = k + (e - b + 1)
                    incumbent = stacks[covered].get(key)
                    if (incumbent is None or score > incumbent.score
                            or (score == incumbent.score
                                and _tie_key(_hyp_phrases(new)) < _tie_key(_hyp_phrases(incumbent)))):
                        stacks[covered][key] = new

    if not stacks[n]:
        raise NoDerivation("search exhausted without covering the sentence")
    best = None
    for _, hyp in sorted(stacks[n].items(), key=lambda kv: (-kv[1].score, kv[0]))[:config.beam_size]:
        h_final = hyp.h_sum + lm.logprob(EOS, hyp.last_two[0], hyp.last_two[1])
        f = _combine(weights, h_final, hyp.g_sum, hyp.d_sum)
        phrases = _hyp_phrases(hyp)
        key = _tie_key(phrases)
        if best is None or f > best[0] or (f == best[0] and key < best[1]):
            best = (f, key, phrases)
    f, _, phrases = best
    return Derivation(phrases), f
