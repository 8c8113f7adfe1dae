"""Universally quantified implications injected into proofs."""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass, field

from .config import DEFAULT_CONFIG
from .errors import FormatError
from .formula import (
    ENTITY,
    EVENT,
    Implies,
    Not,
    Var,
    atom_key,
    atom_vars,
    conj,
    decompose_basic,
    exists,
    forall,
    make_var,
    parse_formula,
    print_formula,
    subst_atom,
)

WORD = "word"
PHRASE = "phrase"
_MAX_RENAMINGS = 5040


@dataclass(frozen=True)
class Provenance:
    pair_id: str = ""
    mode: str = PHRASE
    gold: str = ""


@dataclass(frozen=True)
class Axiom:
    """``forall U (antecedent -> exists X consequent)``.

    ``negated`` marks antonym axioms whose consequent is negated.
    Equality and hashing ignore provenance; two axioms are the same when
    their canonical renderings agree.
    """

    antecedent: frozenset
    consequent: frozenset
    universal_vars: frozenset
    existential_vars: frozenset
    negated: bool = False
    provenance: Provenance = field(default_factory=Provenance, compare=False)

    def key(self):
        return _canonical_key(self.antecedent, self.consequent, self.negated)

    def __eq__(self, other):
        return isinstance(other, Axiom) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_formula(self):
        rhs = exists(_ordered(self.existential_vars), conj(*sorted(self.consequent, key=atom_key)))
        if self.negated:
            rhs = Not(rhs)
        lhs = conj(*sorted(self.antecedent, key=atom_key))
        return forall(_ordered(self.universal_vars), Implies(lhs, rhs))

    def __str__(self):
        return print_formula(self.to_formula())


def _ordered(variables):
    return sorted(variables, key=lambda v: (v.sort != ENTITY, v.index))


def make_axiom(antecedent, consequent, *, negated=False, provenance=None):
    """Build and canonicalize an axiom from atom collections.

    Universal variables are those of the antecedent, existential ones are
    the remaining consequent variables.  Consequent atoms that already
    occur in the antecedent are dropped.
    """
    ante = frozenset(antecedent)
    cons = frozenset(consequent)
    if not negated:
        cons = cons - ante
    universal = set()
    for a in ante:
        universal |= atom_vars(a)
    ex = set()
    for a in cons:
        ex |= atom_vars(a)
    ex -= universal
    ax = Axiom(ante, cons, frozenset(universal), frozenset(ex), negated,
               provenance or Provenance())
    return canonicalize(ax)


def _rename(ax, mapping):
    return Axiom(
        frozenset(subst_atom(a, mapping) for a in ax.antecedent),
        frozenset(subst_atom(a, mapping) for a in ax.consequent),
        frozenset(mapping.get(v, v) for v in ax.universal_vars),
        frozenset(mapping.get(v, v) for v in ax.existential_vars),
        ax.negated,
        ax.provenance,
    )


def _render(ant, cons, negated):
    return (" & ".join(sorted(atom_key(a) for a in ant))
            + (" -> -" if negated else " -> ")
            + " & ".join(sorted(atom_key(a) for a in cons)))


def _by_sort(variables):
    return ([v for v in variables if v.sort == ENTITY],
            [v for v in variables if v.sort == EVENT])


def _candidate_maps(universal, existential):
    ue, uv = _by_sort(sorted(universal))
    xe, xv = _by_sort(sorted(existential))
    groups = [(ue, 1, ENTITY), (uv, 1, EVENT),
              (xe, len(ue) + 1, ENTITY), (xv, len(uv) + 1, EVENT)]
    total = math.prod(math.factorial(len(g[0])) for g in groups)
    if total > _MAX_RENAMINGS:
        return None
    options = []
    for members, first, sort in groups:
        names = [make_var(sort, first + i) for i in range(len(members))]
        options.append([dict(zip(members, perm)) for perm in itertools.permutations(names)])
    maps = []
    for combo in itertools.product(*options):
        m = {}
        for part in combo:
            m.update(part)
        maps.append(m)
    return maps


def _first_occurrence_map(ax):
    """Fallback for large axioms: rename by first occurrence in a
    name-independent atom order."""

    def shape(a):
        return atom_key(subst_atom(a, {v: Var(v.name[0]) for v in atom_vars(a)}))

    order = []
    for a in sorted(ax.antecedent, key=lambda a: (shape(a), atom_key(a))) + \
            sorted(ax.consequent, key=lambda a: (shape(a), atom_key(a))):
        for t in sorted(atom_vars(a), key=lambda v: atom_key(a).index(v.name)):
            if t not in order:
                order.append(t)
    counters = {ENTITY: 1, EVENT: 1}
    m = {}
    for group in (ax.universal_vars, ax.existential_vars):
        for v in order:
            if v in group and v not in m:
                m[v] = make_var(v.sort, counters[v.sort])
                counters[v.sort] += 1
    return m


def canonicalize(ax):
    """Rename variables so that alpha-equivalent axioms become identical."""
    maps = _candidate_maps(ax.universal_vars, ax.existential_vars)
    if maps is None:
        return _rename(ax, _first_occurrence_map(ax))
    best = None
    for m in maps:
        text = _render((subst_atom(a, m) for a in ax.antecedent),
                       (subst_atom(a, m) for a in ax.consequent), ax.negated)
        if best is None or text < best[0]:
            best = (text, m)
    return _rename(ax, best[1])


@functools.lru_cache(maxsize=65536)
def _canonical_key(antecedent, consequent, negated):
    universal = set()
    for a in antecedent:
        universal |= atom_vars(a)
    ex = set()
    for a in consequent:
        ex |= atom_vars(a)
    ax = Axiom(antecedent, consequent, frozenset(universal), frozenset(ex - universal), negated)
    return canonical_text(canonicalize(ax))


def canonical_text(ax):
    return _render(ax.antecedent, ax.consequent, ax.negated)


def alpha_equivalent(a, b):
    return canonical_text(canonicalize(a)) == canonical_text(canonicalize(b))


def axiom_from_formula(f, config=DEFAULT_CONFIG, provenance=None):
    """Read ``forall U (A -> exists X B)`` (or ``-B``) back into an Axiom."""
    from .formula import normalize

    f = normalize(f, config)
    while f.__class__.__name__ == "Forall":
        f = f.body
    if not isinstance(f, Implies):
        raise FormatError(f"axiom is not an implication: {print_formula(f)}")
    negated = isinstance(f.right, Not)
    rhs = f.right.body if negated else f.right
    ante = decompose_basic(f.left).atoms
    cons = decompose_basic(rhs).atoms
    return make_axiom(ante, cons, negated=negated, provenance=provenance)


# ---------------------------------------------------------------- records

def to_record(ax):
    return json.dumps(
        {
            "antecedent": sorted(atom_key(a) for a in ax.antecedent),
            "consequent": sorted(atom_key(a) for a in ax.consequent),
            "universal": [v.name for v in _ordered(ax.universal_vars)],
            "existential": [v.name for v in _ordered(ax.existential_vars)],
            "negated": ax.negated,
            "provenance": {
                "pair": ax.provenance.pair_id,
                "mode": ax.provenance.mode,
                "gold": ax.provenance.gold,
            },
        },
        sort_keys=True,
        separators=(",", ":"),
    )


def _parse_atoms(texts, names, config):
    if not texts:
        return frozenset()
    prefix = f"exists {' '.join(names)} (" if names else "("
    f = parse_formula(prefix + " & ".join(texts) + ")", config)
    return decompose_basic(_normalize_no_rename(f, config)).atoms


def _normalize_no_rename(f, config):
    from .formula import _normalize_atom, And, Exists

    if isinstance(f, Exists):
        return Exists(f.var, _normalize_no_rename(f.body, config))
    if isinstance(f, And):
        return conj(*(_normalize_no_rename(a, config) for a in f.args))
    return _normalize_atom(f, config.args)


def from_record(line, config=DEFAULT_CONFIG, lineno=None):
    try:
        rec = json.loads(line)
        names = list(rec["universal"]) + list(rec["existential"])
        ante = _parse_atoms(rec["antecedent"], rec["universal"], config)
        cons = _parse_atoms(rec["consequent"], names, config)
        prov = rec.get("provenance", {})
        ax = Axiom(
            ante,
            cons,
            frozenset(Var(n) for n in rec["universal"]),
            frozenset(Var(n) for n in rec["existential"]),
            bool(rec.get("negated", False)),
            Provenance(prov.get("pair", ""), prov.get("mode", PHRASE), prov.get("gold", "")),
        )
    except FormatError:
        raise
    except Exception as exc:  # malformed json, missing keys, bad atoms
        raise FormatError(f"bad axiom record: {exc}", lineno) from exc
    return ax
