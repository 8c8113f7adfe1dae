import sys
import random
from pathlib import Path

import pytest

from ndphrase.config import EngineConfig
from ndphrase.corpus import load_dataset
from ndphrase.formula import AtomSet, Pred, Role, Var, parse_formula, recompose
from ndphrase.knowledge import KnowledgeBase, WordRelation, load_word_relations

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
MINI = DATA / "mini"


def fixture_pairs():
    return {r.id: r for r in load_dataset(DATA / "fixtures.jsonl")}


def pair_formulas(rec):
    return parse_formula(rec.premise), parse_formula(rec.hypothesis)


@pytest.fixture
def fixtures():
    return fixture_pairs()


@pytest.fixture
def fixture_kb():
    return load_word_relations(DATA / "relations.tsv")


@pytest.fixture
def kb_lady_cut():
    kb = KnowledgeBase()
    kb.add_relation(WordRelation("lady", "woman", "hypernym"))
    kb.add_relation(WordRelation("cut", "slice", "synonym"))
    return kb


# ---------------------------------------------------------------- random pairs

UNARY = ("p", "q", "r")
PREPS = ("on",)
ROLES = ("subj", "obj")


def _random_atoms(rng, n_atoms, entities, events):
    atoms = set()
    for _ in range(n_atoms):
        kind = rng.random()
        if events and entities and kind < 0.25:
            atoms.add(Role(rng.choice(ROLES), rng.choice(events), rng.choice(entities)))
        elif events and entities and kind < 0.4:
            atoms.add(Pred(rng.choice(PREPS), (rng.choice(events), rng.choice(entities))))
        else:
            pool = entities + events
            atoms.add(Pred(rng.choice(UNARY), (rng.choice(pool),)))
    return atoms


def random_basic_pair(rng, max_atoms=6, max_vars=5):
    """Premise and goal atom sets over at most two sorts.

    Goal variables are named apart from premise variables.  About half
    the goals are built by renaming a subset of the premise so that
    provable instances are well represented.
    """
    n_e = rng.randint(1, max_vars - 1)
    n_v = rng.randint(0, max_vars - n_e)
    pe = [Var(f"x{i}") for i in range(1, n_e + 1)]
    pv = [Var(f"y{i}") for i in range(1, n_v + 1)]
    premise = _random_atoms(rng, rng.randint(1, max_atoms), pe, pv)
    if rng.random() < 0.5:
        picked = rng.sample(sorted(premise, key=str), rng.randint(1, len(premise)))
        targets = {}
        goal_e = iter(Var(f"x{i}") for i in range(11, 30))
        goal_v = iter(Var(f"y{i}") for i in range(11, 30))
        for a in picked:
            for t in a.args:
                if t not in targets:
                    targets[t] = next(goal_e) if t.sort == "entity" else next(goal_v)
        # occasionally merge two goal variables of one sort
        goal = set()
        for a in picked:
            args = tuple(targets[t] for t in a.args)
            goal.add(Role(a.role, *args) if isinstance(a, Role) else Pred(a.name, args))
        if rng.random() < 0.3 and len(goal) > 1:
            goal.pop()
            goal |= _random_atoms(rng, 1, [v for v in targets.values() if v.sort == "entity"],
                                  [v for v in targets.values() if v.sort == "event"])
    else:
        ge = [Var(f"x{i}") for i in range(11, 11 + rng.randint(1, max_vars - 1))]
        gv = [Var(f"y{i}") for i in range(11, 11 + rng.randint(0, 1))]
        goal = _random_atoms(rng, rng.randint(1, max_atoms), ge, gv)
    return AtomSet(frozenset(premise), frozenset()), AtomSet(frozenset(goal), frozenset())


def random_pairs(n, seed=0):
    rng = random.Random(seed)
    return [random_basic_pair(rng) for _ in range(n)]


def as_formula(atom_set):
    return recompose(atom_set)


NONE = EngineConfig(mode="none")


def pytest_terminal_summary(terminalreporter):
    lines = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
