"""Word relations and the stored axiom collection."""

from __future__ import annotations

from dataclasses import dataclass, field

from .axiom import PHRASE, WORD, from_record, to_record
from .config import DEFAULT_CONFIG
from .errors import FormatError

KINDS = ("synonym", "hypernym", "antonym")
HEADER = "#v1"


@dataclass(frozen=True)
class WordRelation:
    source: str
    target: str
    kind: str


@dataclass
class KnowledgeBase:
    """Lexical relations plus extracted axioms.

    ``lookup(a, b)`` answers whether ``a`` licenses ``b``.  Synonymy and
    antonymy are symmetric, hypernymy is not.
    """

    relations: dict = field(default_factory=dict)
    axioms: list = field(default_factory=list)
    _keys: set = field(default_factory=set, repr=False)

    def add_relation(self, rel):
        if rel.kind not in KINDS:
            raise ValueError(f"unknown relation kind {rel.kind!r}")
        self.relations.setdefault((rel.source, rel.target), rel)
        if rel.kind in ("synonym", "antonym"):
            self.relations.setdefault((rel.target, rel.source),
                                      WordRelation(rel.target, rel.source, rel.kind))

    def lookup(self, source, target):
        return self.relations.get((source, target))

    def add_axiom(self, ax):
        """Insert unless an alpha-equivalent axiom is already stored."""
        k = ax.key()
        if k in self._keys:
            return False
        self._keys.add(k)
        self.axioms.append(ax)
        return True

    def add_axioms(self, axioms):
        return sum(self.add_axiom(a) for a in axioms)

    @property
    def phrase_axioms(self):
        return [a for a in self.axioms if a.provenance.mode == PHRASE]

    @property
    def word_axioms(self):
        return [a for a in self.axioms if a.provenance.mode == WORD]

    def sorted_axioms(self):
        return sorted(self.axioms, key=lambda a: a.key())


def parse_relations(text):
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = raw.rstrip("\n").split("\t")
        if len(parts) != 3 or not all(p.strip() for p in parts):
            raise FormatError(f"expected 'source<TAB>target<TAB>kind', got {raw!r}", n)
        src, tgt, kind = (p.strip() for p in parts)
        if kind not in KINDS:
            raise FormatError(f"unknown relation kind {kind!r}", n)
        out.append(WordRelation(src, tgt, kind))
    return out


def load_word_relations(path, kb=None):
    kb = kb or KnowledgeBase()
    with open(path, encoding="utf-8") as fh:
        for rel in parse_relations(fh.read()):
            kb.add_relation(rel)
    return kb


def dump_axioms(axioms):
    lines = [HEADER] + sorted(to_record(a) for a in axioms)
    return "\n".join(lines) + "\n"


def save_axioms(path, axioms):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_axioms(axioms))


def parse_axioms(text, config=DEFAULT_CONFIG):
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise FormatError(f"missing {HEADER!r} header", 1)
    out = []
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        out.append(from_record(line, config, n))
    return out


def load_axioms(path, kb=None, config=DEFAULT_CONFIG):
    kb = kb or KnowledgeBase()
    with open(path, encoding="utf-8") as fh:
        kb.add_axioms(parse_axioms(fh.read(), config))
    return kb
