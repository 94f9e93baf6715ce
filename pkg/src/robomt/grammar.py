"""The robot command language: concept inventories, realization, parsing.

A robot command is (action, object1[, relation, object2]). Realization is
deterministic: "<action> to the <object1>" optionally followed by
"that is <relation-phrase> the <object2>". Parsing is the greedy inverse
and accepts the synonym phrases listed in the surface template.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import Corpus, ParallelTuple, Sentence
from .errors import BankGap, ConfigError, NoParse, UnknownConcept

NAVIGATION_ACTIONS = ("navigate",)
NAVIGATION_OBJECTS = ("traffic barrel", "building", "car")
NAVIGATION_RELATIONS = ("left", "right", "front", "back")

# Canonical surface first; the rest are accepted when parsing only.
NAVIGATION_SURFACES = {
    "left": ("on the left of", "on the left side of"),
    "right": ("on the right of", "on the right side of"),
    "front": ("in front of", "before"),
    "back": ("behind", "on the back of"),
}

# Natural-language fragments per concept, used by the synthetic generator.
# Action fragments include the connective ("go to"), relation fragments the
# full spatial connector, object fragments the bare noun phrase.
NAVIGATION_BANK = {
    "navigate": ("navigate to", "go to", "move forward to", "walk to",
                 "head to", "drive to"),
    "traffic barrel": ("traffic barrel", "orange barrel", "traffic cone",
                       "barrel"),
    "building": ("building", "big building", "tall building", "house"),
    "car": ("car", "parked car", "vehicle"),
    "left": ("on the left of", "on the left side of", "to the left of",
             "left of"),
    "right": ("on the right of", "located at the right hand side of",
              "on the right side of", "to the right of"),
    "front": ("in front of", "before", "ahead of"),
    "back": ("behind", "on the back of", "at the backyard of", "in back of"),
}


@dataclass(frozen=True)
class ConceptInventory:
    task: str
    actions: tuple[str, ...]
    objects: tuple[str, ...]
    relations: tuple[str, ...]

    def all_concepts(self) -> tuple[str, ...]:
        return self.actions + self.objects + self.relations


@dataclass(frozen=True)
class SurfaceTemplate:
    """Per-relation surface phrases; surfaces[rel][0] is the canonical one."""

    surfaces: Mapping[str, tuple[str, ...]]

    def canonical(self, relation: str) -> str:
        return self.surfaces[relation][0]


@dataclass(frozen=True)
class RobotCommand:
    action: str
    object1: str
    relation: str | None = None
    object2: str | None = None

    def __post_init__(self):
        if (self.relation is None) != (self.object2 is None):
            raise ValueError("relation and object2 must both be present or both absent")


@dataclass(frozen=True)
class ParseResult:
    commands: tuple[RobotCommand, ...]
    residue: Sentence

    @property
    def ok(self) -> bool:
        return not self.residue


@dataclass(frozen=True)
class Grammar:
    inventory: ConceptInventory
    template: SurfaceTemplate
    bank: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def validates(self, sent: Sentence) -> bool:
        """True when sent parses fully (no residue) under this grammar."""
        try:
            return parse_robot(sent, self).ok
        except NoParse:
            return False


def _check_concept_list(name, items):
    if not items:
        raise ConfigError(f"empty concept list: {name}")
    seen = set()
    for item in items:
        if not item or item != item.lower() or item != " ".join(item.split()):
            raise ConfigError(f"{name} concept {item!r} must be a lowercase token sequence")
        if item in seen:
            raise ConfigError(f"duplicate {name} concept {item!r}")
        seen.add(item)


def _validate_grammar(inventory: ConceptInventory, template: SurfaceTemplate):
    _check_concept_list("action", inventory.actions)
    _check_concept_list("object", inventory.objects)
    _check_concept_list("relation", inventory.relations)
    for a, b in (("actions", "objects"), ("actions", "relations"), ("objects", "relations")):
        overlap = set(getattr(inventory, a)) & set(getattr(inventory, b))
        if overlap:
            raise ConfigError(f"{a} and {b} overlap: {sorted(overlap)}")
    phrase_owner = {}
    for rel in inventory.relations:
        phrases = template.surfaces.get(rel, ())
        if not phrases:
            raise ConfigError(f"relation {rel!r} has no surface phrase")
        for phrase in phrases:
            if phrase_owner.setdefault(phrase, rel) != rel:
                raise ConfigError(f"surface phrase {phrase!r} maps to two relations")


def _parse_grammar_config(path):
    sections = {"task": [], "actions": [], "objects": [], "relations": [],
                "surfaces": [], "paraphrase_bank": []}
    current = None
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                current = line[1:-1].strip().lower()
                if current not in sections:
                    raise ConfigError(f"unknown section [{current}]")
                continue
            if current is None:
                raise ConfigError(f"content before any section: {line!r}")
            sections[current].append(line.lower())
    return sections


def load_grammar(config) -> Grammar:
    """Load a grammar: the built-in name "navigation" or a config file path.

    Config files use sections [task], [actions], [objects], [relations],
    [surfaces] ("relation = phrase", first phrase per relation is canonical)
    and [paraphrase_bank] ("concept = variant", repeatable).
    """
    if config == "navigation":
        inventory = ConceptInventory("navigation", NAVIGATION_ACTIONS,
                                     NAVIGATION_OBJECTS, NAVIGATION_RELATIONS)
        template = SurfaceTemplate(dict(NAVIGATION_SURFACES))
        grammar = Grammar(inventory, template, dict(NAVIGATION_BANK))
        _validate_grammar(inventory, template)
        return grammar

    sections = _parse_grammar_config(config)
    task = sections["task"][0] if sections["task"] else "custom"
    surfaces: dict[str, list[str]] = {}
    for line in sections["surfaces"]:
        if "=" not in line:
            raise ConfigError(f"bad surface line {line!r}, expected 'relation = phrase'")
        rel, phrase = (part.strip() for part in line.split("=", 1))
        surfaces.setdefault(rel, []).append(phrase)
    bank: dict[str, list[str]] = {}
    for line in sections["paraphrase_bank"]:
        if "=" not in line:
            raise ConfigError(f"bad bank line {line!r}, expected 'concept = variant'")
        concept, variant = (part.strip() for part in line.split("=", 1))
        bank.setdefault(concept, []).append(variant)
    inventory = ConceptInventory(task, tuple(sections["actions"]),
                                 tuple(sections["objects"]), tuple(sections["relations"]))
    unknown = set(surfaces) - set(inventory.relations)
    if unknown:
        raise ConfigError(f"surfaces given for unknown relations: {sorted(unknown)}")
    template = SurfaceTemplate({rel: tuple(phrases) for rel, phrases in surfaces.items()})
    _validate_grammar(inventory, template)
    return Grammar(inventory, template, {c: tuple(v) for c, v in bank.items()})


def realize(cmd: RobotCommand, grammar: Grammar) -> Sentence:
    """Render a command as its canonical robot-language token sequence."""
    inv = grammar.inventory
    if cmd.action not in inv.actions:
        raise UnknownConcept(f"unknown action {cmd.action!r}")
    if cmd.object1 not in inv.objects:
        raise UnknownConcept(f"unknown object {cmd.object1!r}")
    tokens = cmd.action.split() + ["to", "the"] + cmd.object1.split()
    if cmd.relation is not None:
        if cmd.relation not in inv.relations:
            raise UnknownConcept(f"unknown relation {cmd.relation!r}")
        if cmd.object2 not in inv.objects:
            raise UnknownConcept(f"unknown object {cmd.object2!r}")
        tokens += ["that", "is"] + grammar.template.canonical(cmd.relation).split()
        tokens += ["the"] + cmd.object2.split()
    return tuple(tokens)


def _match_longest(tokens: Sentence, pos: int, concepts: Sequence[str]) -> str | None:
    best = None
    for concept in concepts:
        parts = tuple(concept.split())
        if tokens[pos:pos + len(parts)] == parts:
            if best is None or len(parts) > len(best.split()):
                best = concept
    return best


def _match_command(tokens: Sentence, pos: int, grammar: Grammar):
    inv = grammar.inventory
    action = _match_longest(tokens, pos, inv.actions)
    if action is None:
        return None
    pos += len(action.split())
    if tokens[pos:pos + 2] != ("to", "the"):
        return None
    pos += 2
    object1 = _match_longest(tokens, pos, inv.objects)
    if object1 is None:
        return None
    pos += len(object1.split())

    # Greedy: consume a relational clause whenever one matches here.
    if tokens[pos:pos + 2] == ("that", "is"):
        rel_pos = pos + 2
        best = None
        for rel in inv.relations:
            for phrase in grammar.template.surfaces.get(rel, ()):
                parts = tuple(phrase.split())
                if tokens[rel_pos:rel_pos + len(parts)] == parts:
                    if best is None or len(parts) > len(best[1].split()):
                        best = (rel, phrase)
        if best is not None:
            rel, phrase = best
            after = rel_pos + len(phrase.split())
            if tokens[after:after + 1] == ("the",):
                object2 = _match_longest(tokens, after + 1, inv.objects)
                if object2 is not None:
                    end = after + 1 + len(object2.split())
                    return RobotCommand(action, object1, rel, object2), end
    return RobotCommand(action, object1), pos


def parse_robot(sent: Sentence, grammar: Grammar) -> ParseResult:
    """Greedy left-to-right parse into commands plus unconsumed residue."""
    pos = 0
    commands = []
    while pos < len(sent):
        match = _match_command(sent, pos, grammar)
        if match is None:
            break
        cmd, pos = match
        commands.append(cmd)
    if not commands:
        raise NoParse(f"no realization frame matches: {' '.join(sent)!r}")
    return ParseResult(tuple(commands), sent[pos:])


def enumerate_commands(inventory: ConceptInventory) -> tuple[RobotCommand, ...]:
    """All |A||O| non-relational plus |A||O||R||O| relational commands."""
    commands = [RobotCommand(a, o)
                for a in sorted(inventory.actions) for o in sorted(inventory.objects)]
    commands += [RobotCommand(a, o1, rel, o2)
                 for a in sorted(inventory.actions)
                 for o1 in sorted(inventory.objects)
                 for rel in sorted(inventory.relations)
                 for o2 in sorted(inventory.objects)]
    return tuple(commands)


@dataclass(frozen=True)
class SyntheticRecord:
    """A generated tuple plus the bank fragments each side was built from."""

    tuple: ParallelTuple
    s_fragments: tuple[str, ...]
    t_fragments: tuple[str, ...]


def _canonical_fragment(concept: str, kind: str, grammar: Grammar) -> str:
    if kind == "action":
        return f"{concept} to"
    if kind == "relation":
        return grammar.template.canonical(concept)
    return concept


def _compose(fragments: Sequence[str], relational: bool) -> Sentence:
    parts = [fragments[0], "the", fragments[1]]
    if relational:
        parts += ["that is", fragments[2], "the", fragments[3]]
    return tuple(" ".join(parts).split())


def gen_synthetic_records(grammar: Grammar, n_per_command: int, seed: int,
                          bank: Mapping[str, Sequence[str]] | None = None,
                          t_bias: float = 0.75) -> tuple[SyntheticRecord, ...]:
    """Deterministically generate paraphrase tuples for every command.

    s draws each fragment uniformly from the bank; t prefers the canonical
    robot-language wording with probability t_bias per slot, modeling
    paraphrases elicited after the robot concepts were shown.
    """
    if bank is None:
        bank = grammar.bank
    inv = grammar.inventory
    for concept in inv.all_concepts():
        if not bank.get(concept):
            raise BankGap(f"paraphrase bank has no variants for {concept!r}")
    rng = random.Random(seed)
    records = []
    for index, cmd in enumerate(enumerate_commands(inv)):
        slots = [(cmd.action, "action"), (cmd.object1, "object")]
        if cmd.relation is not None:
            slots += [(cmd.relation, "relation"), (cmd.object2, "object")]
        r = realize(cmd, grammar)
        for k in range(n_per_command):
            s_frags = tuple(rng.choice(bank[c]) for c, _ in slots)
            s = _compose(s_frags, cmd.relation is not None)
            for _ in range(10):
                t_frags = tuple(
                    _canonical_fragment(c, kind, grammar)
                    if rng.random() < t_bias else rng.choice(bank[c])
                    for c, kind in slots)
                t = _compose(t_frags, cmd.relation is not None)
                if t != s:
                    break
            rec = ParallelTuple(f"syn-{index * n_per_command + k:04d}", inv.task, s, t, r)
            records.append(SyntheticRecord(rec, s_frags, t_frags))
    return tuple(records)


def gen_synthetic(grammar: Grammar, n_per_command: int, seed: int,
                  bank: Mapping[str, Sequence[str]] | None = None,
                  t_bias: float = 0.75) -> Corpus:
    records = gen_synthetic_records(grammar, n_per_command, seed, bank, t_bias)
    return tuple(rec.tuple for rec in records)
