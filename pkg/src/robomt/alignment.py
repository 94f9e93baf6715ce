"""Word alignment: IBM Model 1 EM and grow-diag-final-and symmetrization.

The table stores t(f|e): the probability of source-side token f given
target-side token e, with a NULL token prepended to the conditioning side.
Corpora here are tiny (tens to hundreds of short commands), so plain dicts
are plenty.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from .corpus import PairView, Sentence
from .errors import DimensionMismatch, EmptyCorpus

NULL = "<null>"

PROB_FLOOR = 1e-12

# Neighbor offsets in the order the standard grow-diag sweep examines them.
_NEIGHBORS = ((-1, 0), (0, -1), (1, 0), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1))


@dataclass(frozen=True)
class AlignmentLinks:
    """1-based (source position, target position) links for one pair."""

    src_len: int
    tgt_len: int
    links: frozenset[tuple[int, int]]

    def __post_init__(self):
        for s, t in self.links:
            if not (1 <= s <= self.src_len and 1 <= t <= self.tgt_len):
                raise ValueError(f"link ({s},{t}) outside {self.src_len}x{self.tgt_len}")


class TranslationTable:
    """t(f|e) rows keyed by conditioning token e; rows sum to one."""

    def __init__(self, probs: dict[str, dict[str, float]], history: list[float]):
        self.probs = probs
        self.history = history  # corpus log-likelihood after each EM iteration

    def prob(self, f: str, e: str) -> float:
        return self.probs.get(e, {}).get(f, 0.0)

    def dump(self, path) -> None:
        """Write "e<TAB>f<TAB>prob" lines for inspection."""
        with open(path, "w", encoding="utf-8") as fh:
            for e in sorted(self.probs):
                for f in sorted(self.probs[e]):
                    fh.write(f"{e}\t{f}\t{self.probs[e][f]:.12g}\n")


def _as_pairs(pairs) -> tuple[tuple[Sentence, Sentence], ...]:
    if isinstance(pairs, PairView):
        return pairs.pairs
    return tuple(pairs)


def train_model1(pairs, iterations: int = 5) -> TranslationTable:
    """EM for IBM Model 1, starting from t(f|e) uniform over the source vocab."""
    pairs = _as_pairs(pairs)
    if not pairs:
        raise EmptyCorpus("no sentence pairs to train on")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    src_vocab = {f for src, _ in pairs for f in src}
    uniform = 1.0 / len(src_vocab)
    probs: dict[str, dict[str, float]] = defaultdict(dict)
    for src, tgt in pairs:
        for e in (NULL, *tgt):
            for f in src:
                probs[e][f] = uniform
    table = TranslationTable(dict(probs), [])
    for _ in range(iterations):
        counts: dict[str, dict[str, float]] = defaultdict(lambda: defaultdict(float))
        totals: dict[str, float] = defaultdict(float)
        for src, tgt in pairs:
            e_tokens = (NULL, *tgt)
            for f in src:
                denom = sum(table.prob(f, e) for e in e_tokens)
                for e in e_tokens:
                    share = table.prob(f, e) / denom
                    counts[e][f] += share
                    totals[e] += share
        table = TranslationTable(
            {e: {f: c / totals[e] for f, c in fs.items()} for e, fs in counts.items()},
            table.history)
        table.history.append(log_likelihood(table, pairs))
    return table


def log_likelihood(table: TranslationTable, pairs) -> float:
    """Model 1 log-likelihood with uniform alignment priors, floored per token."""
    pairs = _as_pairs(pairs)
    total = 0.0
    for src, tgt in pairs:
        e_tokens = (NULL, *tgt)
        for f in src:
            p = sum(table.prob(f, e) for e in e_tokens) / len(e_tokens)
            total += math.log(max(p, PROB_FLOOR))
    return total


def viterbi_align(table: TranslationTable, pair: tuple[Sentence, Sentence]) -> AlignmentLinks:
    """Link each source token to its argmax conditioning token.

    NULL counts as position 0, so ties prefer NULL (link omitted) and then
    the smaller target position.
    """
    src, tgt = pair
    links = set()
    for j, f in enumerate(src, start=1):
        best_i, best_p = 0, table.prob(f, NULL)
        for i, e in enumerate(tgt, start=1):
            p = table.prob(f, e)
            if p > best_p:
                best_i, best_p = i, p
        if best_i > 0:
            links.add((j, best_i))
    return AlignmentLinks(len(src), len(tgt), frozenset(links))


def symmetrize(fwd: AlignmentLinks, rev: AlignmentLinks) -> AlignmentLinks:
    """Merge two directional alignments with grow-diag-final-and.

    Both arguments must be expressed in (source position, target position)
    space for the same sentence pair.
    """
    if (fwd.src_len, fwd.tgt_len) != (rev.src_len, rev.tgt_len):
        raise DimensionMismatch(
            f"{fwd.src_len}x{fwd.tgt_len} vs {rev.src_len}x{rev.tgt_len}")
    union = fwd.links | rev.links
    aligned = set(fwd.links & rev.links)
    src_cov = {s for s, _ in aligned}
    tgt_cov = {t for _, t in aligned}

    changed = True
    while changed:
        changed = False
        for s in range(1, fwd.src_len + 1):
            for t in range(1, fwd.tgt_len + 1):
                if (s, t) not in aligned:
                    continue
                for ds, dt in _NEIGHBORS:
                    cand = (s + ds, t + dt)
                    if (cand in union and cand not in aligned
                            and (cand[0] not in src_cov or cand[1] not in tgt_cov)):
                        aligned.add(cand)
                        src_cov.add(cand[0])
                        tgt_cov.add(cand[1])
                        changed = True

    for direction in (fwd.links, rev.links):
        for s in range(1, fwd.src_len + 1):
            for t in range(1, fwd.tgt_len + 1):
                if (s, t) in direction and s not in src_cov and t not in tgt_cov:
                    aligned.add((s, t))
                    src_cov.add(s)
                    tgt_cov.add(t)

    return AlignmentLinks(fwd.src_len, fwd.tgt_len, frozenset(aligned))
