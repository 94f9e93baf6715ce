"""Interpolated trigram language model over robot-language token sequences.

P(w|u,v) mixes ML trigram, bigram and unigram estimates with a uniform
floor over the vocabulary plus the end marker and an unknown-word class.
Orders whose context was never seen drop out of the mixture and the
remaining weights are renormalized, so every context distribution sums
to one exactly.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

from .corpus import Sentence
from .errors import EmptyCorpus, FormatError, InvalidLambda

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

DEFAULT_LAMBDAS = (0.7, 0.2, 0.09, 0.01)

MIN_FLOOR_WEIGHT = 1e-4


class TrigramModel:
    def __init__(self, vocab, lambdas, tri, tri_ctx, bi, bi_ctx, uni, uni_total):
        self.vocab = frozenset(vocab)
        self.lambdas = lambdas  # (l3, l2, l1, l0), post-clamp, sums to 1
        self.tri = tri
        self.tri_ctx = tri_ctx
        self.bi = bi
        self.bi_ctx = bi_ctx
        self.uni = uni
        self.uni_total = uni_total
        self._floor = 1.0 / (len(self.vocab) + 2)

    def map_token(self, token: str) -> str:
        if token in self.vocab or token in (BOS, EOS):
            return token
        return UNK

    def prob(self, w: str, u: str, v: str) -> float:
        w, u, v = self.map_token(w), self.map_token(u), self.map_token(v)
        l3, l2, l1, l0 = self.lambdas
        numer = l1 * (self.uni.get(w, 0) / self.uni_total) + l0 * self._floor
        denom = l1 + l0
        ctx3 = self.tri_ctx.get((u, v), 0)
        if ctx3:
            numer += l3 * (self.tri.get((u, v, w), 0) / ctx3)
            denom += l3
        ctx2 = self.bi_ctx.get(v, 0)
        if ctx2:
            numer += l2 * (self.bi.get((v, w), 0) / ctx2)
            denom += l2
        return numer / denom

    def logprob(self, w: str, u: str, v: str) -> float:
        return math.log(self.prob(w, u, v))


def _clamp_lambdas(lambdas) -> tuple[float, float, float, float]:
    if len(lambdas) != 4:
        raise InvalidLambda(f"expected 4 weights, got {len(lambdas)}")
    l3, l2, l1, l0 = (float(x) for x in lambdas)
    if min(l3, l2, l1, l0) < 0:
        raise InvalidLambda("weights must be non-negative")
    if abs(l3 + l2 + l1 + l0 - 1.0) > 1e-9:
        raise InvalidLambda(f"weights must sum to 1, got {l3 + l2 + l1 + l0}")
    # A positive floor keeps every score finite.
    if l0 < MIN_FLOOR_WEIGHT:
        l0 = MIN_FLOOR_WEIGHT
        rest = l3 + l2 + l1
        if rest > 0:
            scale = (1.0 - l0) / rest
            l3, l2, l1 = l3 * scale, l2 * scale, l1 * scale
        else:
            l0 = 1.0
    return (l3, l2, l1, l0)


def train_lm(sentences: Sequence[Sentence], lambdas=DEFAULT_LAMBDAS) -> TrigramModel:
    """Count padded n-grams (two begin markers, one end marker) and fix weights."""
    lambdas = _clamp_lambdas(lambdas)
    sentences = [tuple(sent) for sent in sentences]
    if not sentences:
        raise EmptyCorpus("no sentences to train the language model on")
    tri: Counter = Counter()
    tri_ctx: Counter = Counter()
    bi: Counter = Counter()
    bi_ctx: Counter = Counter()
    uni: Counter = Counter()
    vocab = set()
    for sent in sentences:
        if not sent:
            raise ValueError("cannot train on an empty sentence")
        vocab.update(sent)
        seq3 = (BOS, BOS) + sent + (EOS,)
        for i in range(2, len(seq3)):
            tri[seq3[i - 2:i + 1]] += 1
            tri_ctx[seq3[i - 2:i]] += 1
        seq2 = (BOS,) + sent + (EOS,)
        for i in range(1, len(seq2)):
            bi[seq2[i - 1:i + 1]] += 1
            bi_ctx[seq2[i - 1]] += 1
        for w in sent + (EOS,):
            uni[w] += 1
    return TrigramModel(vocab, lambdas, dict(tri), dict(tri_ctx), dict(bi),
                        dict(bi_ctx), dict(uni), sum(uni.values()))


def score_sequence(model: TrigramModel, sent: Sentence) -> float:
    """Log-probability of sent, padded, end marker included; always finite."""
    seq = (BOS, BOS) + tuple(model.map_token(w) for w in sent) + (EOS,)
    total = 0.0
    for i in range(2, len(seq)):
        total += model.logprob(seq[i], seq[i - 2], seq[i - 1])
    return total


def save_lm(model: TrigramModel, path) -> None:
    """Dump "order<TAB>n-gram<TAB>count" lines under a lambda header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("lambda\t" + "\t".join(repr(l) for l in model.lambdas) + "\n")
        for order, counts in ((1, model.uni), (2, model.bi), (3, model.tri)):
            for gram in sorted(counts):
                key = gram if order == 1 else " ".join(gram)
                fh.write(f"{order}\t{key}\t{counts[gram]}\n")


def load_lm(path) -> TrigramModel:
    tri: dict = {}
    bi: dict = {}
    uni: dict = {}
    lambdas = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if fields[0] == "lambda":
                if len(fields) != 5:
                    raise FormatError("lambda header needs 4 values", line_no)
                lambdas = tuple(float(x) for x in fields[1:])
                continue
            if len(fields) != 3:
                raise FormatError(f"expected 3 fields, got {len(fields)}", line_no)
            try:
                order, count = int(fields[0]), int(fields[2])
            except ValueError as exc:
                raise FormatError(str(exc), line_no) from exc
            gram = tuple(fields[1].split())
            if order == 1 and len(gram) == 1:
                uni[gram[0]] = count
            elif order == 2 and len(gram) == 2:
                bi[gram] = count
            elif order == 3 and len(gram) == 3:
                tri[gram] = count
            else:
                raise FormatError(f"order {fields[0]} does not match n-gram {fields[1]!r}", line_no)
    if lambdas is None:
        raise FormatError("missing lambda header")
    if not uni:
        raise FormatError("missing unigram counts")
    tri_ctx: Counter = Counter()
    for (u, v, _), c in tri.items():
        tri_ctx[(u, v)] += c
    bi_ctx: Counter = Counter()
    for (v, _), c in bi.items():
        bi_ctx[v] += c
    vocab = set(uni) - {EOS}
    return TrigramModel(vocab, lambdas, tri, dict(tri_ctx), bi, dict(bi_ctx),
                        uni, sum(uni.values()))
