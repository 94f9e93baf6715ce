"""Parallel (s, t, r) command tuples: tokenization, loading, splitting, pairing.

A corpus record holds a natural-language command ``s``, a human paraphrase
``t`` and the robot-language command ``r``. Sentences are plain tuples of
lowercase tokens; span positions elsewhere in the package are 1-based.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import EmptyInput, GrammarViolation, ParseError

Sentence = tuple[str, ...]

TASKS = ("navigation", "manipulation")

PAIR_MODES = ("s_to_r", "t_to_r", "both_to_r")

_PUNCT_RE = re.compile(r"([.,;:!?])")


def tokenize(raw: str) -> Sentence:
    """Lowercase ``raw`` and split on whitespace, isolating . , ; : ! ? tokens."""
    if not raw or raw.isspace():
        raise EmptyInput("input is empty or all whitespace")
    return tuple(_PUNCT_RE.sub(r" \1 ", raw.lower()).split())


def detokenize(sent: Sentence) -> str:
    return " ".join(sent)


@dataclass(frozen=True)
class ParallelTuple:
    id: str
    task: str
    s: Sentence
    t: Sentence
    r: Sentence


Corpus = tuple[ParallelTuple, ...]


@dataclass(frozen=True)
class PairView:
    """Sentence pairs feeding one training direction.

    mode ``s_to_r`` pairs the original command with r, ``t_to_r`` the
    paraphrase with r, and ``both_to_r`` yields both pairs per tuple.
    """

    mode: str
    pairs: tuple[tuple[Sentence, Sentence], ...]


def _make_tuple(rec_id, task, s_raw, t_raw, r_raw, grammars, line_no):
    if task not in TASKS:
        raise ParseError(f"unknown task {task!r}", line_no)
    try:
        s = tokenize(s_raw)
        t = tokenize(t_raw)
        r = tokenize(r_raw)
    except EmptyInput as exc:
        raise ParseError(f"empty field: {exc}", line_no) from exc
    if grammars is not None:
        grammar = grammars.get(task)
        if grammar is None:
            raise GrammarViolation(f"no grammar supplied for task {task!r}")
        if not grammar.validates(r):
            raise GrammarViolation(f"invalid robot command: {detokenize(r)!r}")
    return ParallelTuple(rec_id, task, s, t, r)


def load_corpus(path, grammars: Mapping[str, object] | None = None, fmt: str | None = None) -> Corpus:
    """Read a corpus file (tab-separated or JSON lines, one record per line).

    When ``grammars`` maps task names to Grammar objects, every record's r is
    validated and bad records raise GrammarViolation. Duplicate ids raise
    ParseError.
    """
    if fmt is None:
        fmt = "jsonl" if str(path).endswith((".jsonl", ".json")) else "tsv"
    if fmt not in ("tsv", "jsonl"):
        raise ValueError(f"unknown corpus format {fmt!r}")
    records = []
    seen_ids = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if fmt == "jsonl":
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"bad JSON: {exc}", line_no) from exc
                missing = {"id", "task", "s", "t", "r"} - obj.keys()
                if missing:
                    raise ParseError(f"missing keys {sorted(missing)}", line_no)
                fields = [str(obj[k]) for k in ("id", "task", "s", "t", "r")]
            else:
                fields = line.split("\t")
                if len(fields) != 5:
                    raise ParseError(f"expected 5 tab-separated fields, got {len(fields)}", line_no)
            rec_id = fields[0].strip()
            if rec_id in seen_ids:
                raise ParseError(f"duplicate id {rec_id!r}", line_no)
            seen_ids.add(rec_id)
            records.append(_make_tuple(rec_id, fields[1].strip(), *fields[2:], grammars, line_no))
    return tuple(records)


def save_corpus(corpus: Iterable[ParallelTuple], path) -> None:
    """Write tab-separated records; load_corpus(save_corpus(c)) round-trips."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in corpus:
            fh.write("\t".join([rec.id, rec.task, detokenize(rec.s),
                                detokenize(rec.t), detokenize(rec.r)]) + "\n")


def split(corpus: Corpus, test_fraction: float, seed: int) -> tuple[Corpus, Corpus]:
    """Deterministic partition with |test| = round(test_fraction * |corpus|)."""
    if not corpus:
        raise EmptyInput("cannot split an empty corpus")
    if not 0.0 <= test_fraction <= 1.0:
        raise ValueError("test_fraction must be in [0, 1]")
    n = len(corpus)
    n_test = int(test_fraction * n + 0.5)
    rng = random.Random(seed)
    test_idx = set(rng.sample(range(n), n_test))
    train = tuple(rec for i, rec in enumerate(corpus) if i not in test_idx)
    test = tuple(rec for i, rec in enumerate(corpus) if i in test_idx)
    return train, test


def pair_view(corpus: Corpus, mode: str) -> PairView:
    """Expose (source, target) sentence pairs for one training direction."""
    if mode not in PAIR_MODES:
        raise ValueError(f"unknown pair mode {mode!r}")
    pairs = []
    for rec in corpus:
        if mode in ("s_to_r", "both_to_r"):
            pairs.append((rec.s, rec.r))
        if mode in ("t_to_r", "both_to_r"):
            pairs.append((rec.t, rec.r))
    return PairView(mode, tuple(pairs))
