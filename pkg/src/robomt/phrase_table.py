"""Phrase pair extraction and the relative-frequency translation table.

A phrase pair (src span, tgt span) is extracted when at least one alignment
link connects the spans and no link leaves either span toward a position
outside the other. Scores are g = ln(count(src,tgt) / count(src)).
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable

from .alignment import AlignmentLinks
from .corpus import Sentence
from .errors import FormatError, SpanOutOfBounds

DEFAULT_MAX_LEN = 7

FIELD_SEP = " ||| "


@dataclass(frozen=True)
class PhrasePair:
    src: tuple[str, ...]
    tgt: tuple[str, ...]

    def __post_init__(self):
        if not self.src or not self.tgt:
            raise ValueError("phrase pair sides must be non-empty")


@dataclass(frozen=True)
class TableEntry:
    tgt: tuple[str, ...]
    count: int
    g: float


class PhraseTable:
    """src phrase -> candidates ordered by descending g, then tgt."""

    def __init__(self, entries: dict[tuple[str, ...], tuple[TableEntry, ...]],
                 src_totals: dict[tuple[str, ...], int], task: str | None = None):
        self.entries = entries
        self.src_totals = src_totals
        self.task = task

    def __eq__(self, other):
        if not isinstance(other, PhraseTable):
            return NotImplemented
        return self.entries == other.entries and self.src_totals == other.src_totals

    def __len__(self):
        return sum(len(v) for v in self.entries.values())

    def max_src_len(self) -> int:
        return max((len(src) for src in self.entries), default=0)


def extract_phrases(pair: tuple[Sentence, Sentence], links: AlignmentLinks,
                    max_len: int = DEFAULT_MAX_LEN) -> set[PhrasePair]:
    """All alignment-consistent phrase pairs with both sides <= max_len."""
    src, tgt = pair
    if (links.src_len, links.tgt_len) != (len(src), len(tgt)):
        raise ValueError("alignment dimensions do not match the sentence pair")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    tgt_of_src = defaultdict(set)
    src_of_tgt = defaultdict(set)
    for s, t in links.links:
        tgt_of_src[s].add(t)
        src_of_tgt[t].add(s)

    result = set()
    for i1 in range(1, len(src) + 1):
        for i2 in range(i1, min(len(src), i1 + max_len - 1) + 1):
            linked = [t for s in range(i1, i2 + 1) for t in tgt_of_src[s]]
            if not linked:
                continue
            j1, j2 = min(linked), max(linked)
            if any(not i1 <= s <= i2
                   for t in range(j1, j2 + 1) for s in src_of_tgt[t]):
                continue
            # Grow the target span over unaligned boundary words.
            jj1 = j1
            while True:
                if j2 - jj1 + 1 > max_len:
                    break
                jj2 = j2
                while True:
                    if jj2 - jj1 + 1 > max_len:
                        break
                    result.add(PhrasePair(src[i1 - 1:i2], tgt[jj1 - 1:jj2]))
                    if jj2 + 1 > len(tgt) or src_of_tgt[jj2 + 1]:
                        break
                    jj2 += 1
                if jj1 - 1 < 1 or src_of_tgt[jj1 - 1]:
                    break
                jj1 -= 1
    return result


def build_table(extracted: Iterable[PhrasePair], task: str | None = None) -> PhraseTable:
    """Group extracted pairs by source phrase and score by relative frequency."""
    counts = extracted if isinstance(extracted, Counter) else Counter(extracted)
    grouped: dict[tuple[str, ...], list[tuple[tuple[str, ...], int]]] = defaultdict(list)
    totals: dict[tuple[str, ...], int] = defaultdict(int)
    for pair, count in counts.items():
        if count < 1:
            continue
        grouped[pair.src].append((pair.tgt, count))
        totals[pair.src] += count
    entries = {}
    for src in sorted(grouped):
        table_entries = [TableEntry(tgt, count, math.log(count / totals[src]))
                         for tgt, count in grouped[src]]
        table_entries.sort(key=lambda ent: (-ent.g, ent.tgt))
        entries[src] = tuple(table_entries)
    return PhraseTable(entries, dict(totals), task)


def lookup(table: PhraseTable, sent: Sentence, b: int, e: int) -> list[tuple[tuple[str, ...], float]]:
    """Candidates for the exact surface span s_b..s_e (1-based, inclusive)."""
    if not 1 <= b <= e <= len(sent):
        raise SpanOutOfBounds(f"span ({b},{e}) invalid for length {len(sent)}")
    return [(ent.tgt, ent.g) for ent in table.entries.get(sent[b - 1:e], ())]


@dataclass(frozen=True)
class TableStats:
    distinct_entries: int
    distinct_source_phrases: int
    task: str | None = None


def table_stats(table: PhraseTable) -> TableStats:
    return TableStats(len(table), len(table.entries), table.task)


def save_table(table: PhraseTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for src in sorted(table.entries):
            for ent in table.entries[src]:
                fh.write(FIELD_SEP.join([" ".join(src), " ".join(ent.tgt),
                                         str(ent.count), f"{ent.g:.12g}"]) + "\n")


def load_table(path, task: str | None = None) -> PhraseTable:
    """Read a phrase-table file; g is re-derived from the counts."""
    counts: Counter[PhrasePair] = Counter()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split(FIELD_SEP)
            if len(fields) != 4:
                raise FormatError(f"expected 4 ||| fields, got {len(fields)}", line_no)
            src, tgt = tuple(fields[0].split()), tuple(fields[1].split())
            if not src or not tgt:
                raise FormatError("empty phrase side", line_no)
            try:
                count = int(fields[2])
                float(fields[3])
            except ValueError as exc:
                raise FormatError(str(exc), line_no) from exc
            if count < 1:
                raise FormatError(f"count must be positive, got {count}", line_no)
            counts[PhrasePair(src, tgt)] += count
    return build_table(counts, task)
