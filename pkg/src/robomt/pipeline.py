"""End-to-end training and translation glue shared by the CLI and evaluation.

train_pipeline runs the whole extraction chain on one pair view: EM in both
directions, Viterbi alignment, grow-diag-final-and, consistent-phrase
extraction, relative-frequency scoring, and a trigram LM over the robot
side of the training split.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .alignment import AlignmentLinks, symmetrize, train_model1, viterbi_align
from .corpus import Sentence
from .decoder import Derivation, DecoderConfig, Weights, beam_decode
from .errors import NoDerivation
from .grammar import Grammar, parse_robot
from .language_model import DEFAULT_LAMBDAS, TrigramModel, train_lm
from .phrase_table import DEFAULT_MAX_LEN, PhraseTable, build_table, extract_phrases


@dataclass
class RunSettings:
    """Every numeric knob of a training/translation run."""

    mode: str = "s_to_r"
    seed: int = 13
    split_fraction: float = 0.2
    em_iterations: int = 5
    max_phrase_len: int = DEFAULT_MAX_LEN
    lambdas: tuple[float, float, float, float] = DEFAULT_LAMBDAS
    weights: Weights = field(default_factory=Weights)
    decoder: DecoderConfig = field(default_factory=DecoderConfig)
    teach_threshold: float = -3.0


@dataclass
class TrainedModel:
    table: PhraseTable
    lm: TrigramModel


def align_pairs(pairs: Sequence[tuple[Sentence, Sentence]],
                em_iterations: int = 5) -> list[AlignmentLinks]:
    """Symmetrized word alignments for every pair, EM in both directions."""
    pairs = list(pairs)
    fwd_table = train_model1(pairs, em_iterations)
    rev_table = train_model1([(tgt, src) for src, tgt in pairs], em_iterations)
    links = []
    for src, tgt in pairs:
        fwd = viterbi_align(fwd_table, (src, tgt))
        rev_raw = viterbi_align(rev_table, (tgt, src))
        rev = AlignmentLinks(len(src), len(tgt),
                             frozenset((s, t) for t, s in rev_raw.links))
        links.append(symmetrize(fwd, rev))
    return links


def train_pipeline(pairs: Sequence[tuple[Sentence, Sentence]],
                   lm_sentences: Sequence[Sentence],
                   settings: RunSettings, task: Optional[str] = None) -> TrainedModel:
    links = align_pairs(pairs, settings.em_iterations)
    extracted: Counter = Counter()
    for pair, link in zip(pairs, links):
        extracted.update(extract_phrases(pair, link, settings.max_phrase_len))
    table = build_table(extracted, task)
    lm = train_lm(lm_sentences, settings.lambdas)
    return TrainedModel(table, lm)


@dataclass(frozen=True)
class Translation:
    source: Sentence
    target: Sentence
    derivation: Optional[Derivation]
    score: float
    status: str  # ok | residue | no-derivation

    @property
    def per_token_score(self) -> float:
        return self.score / max(len(self.source), 1)


def translate_sentence(sent: Sentence, model: TrainedModel, settings: RunSettings,
                       grammar: Optional[Grammar] = None) -> Translation:
    """Beam-decode one sentence and grade the output against the grammar."""
    try:
        derivation, score = beam_decode(sent, model.table, model.lm,
                                        settings.weights, settings.decoder)
    except NoDerivation:
        return Translation(sent, (), None, float("-inf"), "no-derivation")
    from .decoder import target_of

    target = target_of(derivation)
    status = "ok"
    if grammar is not None:
        try:
            status = "ok" if parse_robot(target, grammar).ok else "residue"
        except Exception:
            status = "residue"
    return Translation(sent, target, derivation, score, status)
