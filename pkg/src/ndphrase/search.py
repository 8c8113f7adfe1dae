"""Proof states and the backtracking unification search over atom pools."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field, replace

from .axiom import WORD, Provenance, make_axiom
from .config import DEFAULT_CONFIG
from .errors import (
    BranchLimitExceeded,
    ChainLimitExceeded,
    OracleTooLarge,
    TimeLimitExceeded,
)
from .formula import (
    Func,
    Pred,
    Role,
    Var,
    atom_key,
    atom_terms,
    atom_vars,
    flatten_functional,
    make_var,
    subst_atom,
    subst_term,
)

MATCH = "match"
RULE = "rule"
WORD_ABDUCTION = "word"
PHRASE_ABDUCTION = "phrase"
AXIOM_APPLY = "axiom"

RULE_NAMES = frozenset({"∨-I", "∨-E", "→-I", "→-E", "¬-I", "¬-E", "∀-I", "∀-E"})


@dataclass(frozen=True)
class ProofStep:
    kind: str
    premise_atom: object = None
    goal_atom: object = None
    axiom: object = None
    rule: str | None = None
    delta: tuple = ()
    added: tuple = ()

    def __post_init__(self):
        if self.kind == RULE and self.rule not in RULE_NAMES:
            raise ValueError(f"unknown inference rule {self.rule!r}")

    def to_text(self):
        """One tab-separated record: kind, atoms, substitution delta."""
        if self.kind == RULE:
            atoms = self.rule
        elif self.kind in (MATCH, WORD_ABDUCTION):
            atoms = f"{self.premise_atom} => {self.goal_atom}"
            if self.axiom is not None:
                atoms += f" by {self.axiom}"
        elif self.kind == AXIOM_APPLY:
            atoms = f"{self.axiom} adds {', '.join(str(a) for a in self.added)}"
        else:
            atoms = str(self.axiom)
        delta = ", ".join(f"{v}:={t}" for v, t in self.delta) or "-"
        return f"{self.kind}\t{atoms}\t{delta}"


@dataclass(frozen=True)
class ProofState:
    """One branch of a proof over atoms.

    ``subgoals`` keeps the goal atoms as written; ``pending()`` applies the
    current substitution.  Only ``goal_vars`` may be bound.  Values are
    treated as immutable snapshots: every step returns a new state.
    """

    premises: tuple
    subgoals: tuple
    goal_vars: frozenset
    subst: dict = field(default_factory=dict)
    trace: tuple = ()
    used_axioms: tuple = ()
    negations: tuple = ()
    fired: frozenset = frozenset()
    chain: int = 0
    matched: tuple = ()

    @classmethod
    def initial(cls, premises, subgoals, goal_vars):
        return cls(
            premises=tuple(sorted(set(premises), key=atom_key)),
            subgoals=tuple(sorted(set(subgoals), key=goal_order)),
            goal_vars=frozenset(goal_vars),
        )

    def pending(self):
        return [subst_atom(g, self.subst) for g in self.subgoals]

    @property
    def proved(self):
        return not self.subgoals

    def unified(self):
        return {v for v in self.goal_vars if v in self.subst}

    def non_unified(self):
        used = set()
        for g in self.subgoals:
            used |= atom_vars(g)
        for g, _ in self.matched:
            used |= atom_vars(g)
        return {v for v in self.goal_vars & used if v not in self.subst}

    def with_premises(self, atoms):
        merged = set(self.premises) | set(atoms)
        return replace(self, premises=tuple(sorted(merged, key=atom_key)))


def goal_order(a):
    return (a.name, a.arity, atom_key(a))


def term_sort(t):
    return t.sort


def _unify_term(p, f, subst, flexible):
    if isinstance(p, Var) and p in flexible:
        if p in subst:
            return subst if subst[p] == f else None
        if p.sort != term_sort(f):
            return None
        new = dict(subst)
        new[p] = f
        return new
    if isinstance(p, Func):
        if not isinstance(f, Func) or f.role != p.role:
            return None
        return _unify_term(p.arg, f.arg, subst, flexible)
    return subst if p == f else None


def match_atom(pattern, fact, subst, flexible):
    """Extend ``subst`` so that ``pattern`` becomes ``fact``; None if impossible."""
    if type(pattern) is not type(fact) or pattern.name != fact.name:
        return None
    if len(pattern.args) != len(fact.args):
        return None
    for p, f in zip(pattern.args, fact.args):
        subst = _unify_term(p, f, subst, flexible)
        if subst is None:
            return None
    return subst


def _index(atoms):
    idx = {}
    for a in atoms:
        idx.setdefault((type(a), a.name, a.arity), []).append(a)
    return idx


def _delta(old, new):
    return tuple(sorted(((k, v) for k, v in new.items() if k not in old), key=lambda kv: kv[0].name))


class Budget:
    """Counts finished branches and enforces the wall-clock deadline."""

    def __init__(self, config=DEFAULT_CONFIG, deadline=None):
        self.max_branches = config.max_branches
        self.deadline = deadline
        if deadline is None and config.timeout_secs:
            self.deadline = time.monotonic() + config.timeout_secs
        self.leaves = 0

    def leaf(self):
        self.leaves += 1
        if self.leaves > self.max_branches:
            raise BranchLimitExceeded(f"more than {self.max_branches} branches")

    def tick(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise TimeLimitExceeded("proof deadline passed")


def match_step(state, goal, premise, new_subst):
    step = ProofStep(MATCH, premise_atom=premise, goal_atom=goal,
                     delta=_delta(state.subst, new_subst))
    return replace(
        state,
        subgoals=tuple(g for g in state.subgoals if g != goal),
        subst=new_subst,
        trace=state.trace + (step,),
        matched=state.matched + ((goal, premise),),
    )


def exact_candidates(state):
    """First pending sub-goal (in goal order) that some premise matches,
    with every premise match for it.  Empty when the state is saturated."""
    idx = _index(state.premises)
    for g in state.subgoals:
        found = []
        for p in idx.get((type(g), g.name, g.arity), ()):
            s = match_atom(g, p, state.subst, state.goal_vars)
            if s is not None:
                found.append((p, s))
        if found:
            return g, found
    return None, []


def iter_exact(state, budget=None):
    """Depth-first enumeration of maximal exact-match branches."""
    budget = budget or Budget()
    budget.tick()
    goal, found = exact_candidates(state)
    if goal is None:
        yield state
        return
    for premise, s in found:
        yield from iter_exact(match_step(state, goal, premise, s), budget)


def unify_search(state, config=DEFAULT_CONFIG):
    """All maximal exact-match branches, in deterministic order.

    Raises BranchLimitExceeded (carrying the branches found so far) when
    more than ``config.max_branches`` branches exist.
    """
    budget = Budget(config)
    out = []
    try:
        for leaf in iter_exact(state, budget):
            budget.leaf()
            out.append(leaf)
    except BranchLimitExceeded as exc:
        raise BranchLimitExceeded(str(exc), out) from None
    return out


# ---------------------------------------------------------------- word abduction

def word_axiom(source, target, sort, negated=False, pair_id=""):
    v = make_var(sort, 1)
    return make_axiom([Pred(source, (v,))], [Pred(target, (v,))], negated=negated,
                      provenance=Provenance(pair_id, WORD, ""))


def word_candidates(state, kb, kinds=("synonym", "hypernym")):
    """First pending unary sub-goal with a lexically related premise.

    Returns (goal, [(premise, subst, relation), ...]); (None, []) if none.
    """
    if kb is None:
        return None, []
    unary = [p for p in state.premises if isinstance(p, Pred) and p.arity == 1]
    for g in state.subgoals:
        if not (isinstance(g, Pred) and g.arity == 1):
            continue
        found = []
        for p in unary:
            if p.name == g.name:
                continue
            rel = kb.lookup(p.name, g.name)
            if rel is None or rel.kind not in kinds:
                continue
            s = match_atom(Pred(p.name, g.args), p, state.subst, state.goal_vars)
            if s is not None:
                found.append((p, s, rel))
        if found:
            return g, found
    return None, []


def abduce_word(state, goal, premise, new_subst, relation):
    negated = relation.kind == "antonym"
    ax = word_axiom(premise.name, goal.name, term_sort(premise.args[0]), negated)
    step = ProofStep(WORD_ABDUCTION, premise_atom=premise, goal_atom=goal, axiom=ax,
                     delta=_delta(state.subst, new_subst))
    return replace(
        state,
        subgoals=tuple(g for g in state.subgoals if g != goal),
        subst=new_subst,
        trace=state.trace + (step,),
        used_axioms=state.used_axioms + (ax,),
        matched=state.matched + ((goal, premise),),
    ), ax


def word_abduction(state, kb, kinds=("synonym", "hypernym")):
    """Remove one unary sub-goal using a lexical relation, or return None."""
    goal, found = word_candidates(state, kb, kinds)
    if goal is None:
        return None
    premise, s, rel = found[0]
    return abduce_word(state, goal, premise, s, rel)


# ---------------------------------------------------------------- axioms

def iter_matches(patterns, facts, flexible, subst=None):
    """Every extension of ``subst`` mapping all patterns into ``facts``."""
    idx = _index(facts)
    patterns = sorted(patterns, key=goal_order)

    def go(i, s):
        if i == len(patterns):
            yield s
            return
        p = patterns[i]
        for f in idx.get((type(p), p.name, p.arity), ()):
            s2 = match_atom(p, f, s, flexible)
            if s2 is not None:
                yield from go(i + 1, s2)

    yield from go(0, dict(subst or {}))


def _fresh_after(atoms, variables=()):
    from .formula import FreshNames

    used = set(variables)
    for a in atoms:
        used |= atom_vars(a)
    return FreshNames(used)


def prepare_axiom(axiom):
    """Flatten role terms of an axiom into pattern atoms.

    Returns (antecedent atoms, consequent atoms, pattern vars, existential vars).
    """
    fresh = _fresh_after(list(axiom.antecedent) + list(axiom.consequent))
    ante, ante_new = flatten_functional(sorted(axiom.antecedent, key=atom_key), fresh)
    ante_roles = [a for a in ante if isinstance(a, Role)]
    cons, cons_new = flatten_functional(ante_roles + sorted(axiom.consequent, key=atom_key), fresh)
    cons = [a for a in cons if a not in ante_roles]
    pattern_vars = set(axiom.universal_vars) | set(ante_new)
    existential = set(axiom.existential_vars) | set(cons_new)
    return ante, cons, frozenset(pattern_vars), frozenset(existential)


def _fire(axiom, prepared, state, sigma, fresh):
    ante, cons, pattern_vars, existential = prepared
    role_targets = {}
    for p in state.premises:
        if isinstance(p, Role):
            role_targets.setdefault((p.role, p.event), p.arg)
    sigma = dict(sigma)
    if axiom.negated:
        from .formula import Not, conj, exists

        body = conj(*(subst_atom(c, sigma) for c in cons))
        return Not(exists(sorted(existential, key=lambda v: (v.sort, v.index)), body)), []
    for e in sorted(existential, key=lambda v: (v.sort, v.index)):
        target = None
        for c in cons:
            if isinstance(c, Role) and c.arg == e:
                target = role_targets.get((c.role, subst_term(c.event, sigma)))
        sigma[e] = target if target is not None else fresh.fresh(e.sort)
    added = [subst_atom(c, sigma) for c in cons]
    return None, [a for a in added if a not in set(state.premises)]


def _firing_key(axiom, sigma, pattern_vars):
    # raw rendering, not the canonical one: premise-local conditionals may
    # mention rigid variables that must not be identified
    from .axiom import canonical_text

    return (canonical_text(axiom), tuple(sorted((v.name, str(t)) for v, t in sigma.items() if v in pattern_vars)))


def apply_axiom(axiom, state, config=DEFAULT_CONFIG, fresh=None):
    """Fire ``axiom`` on every antecedent match not fired before.

    One new state per match.  Fresh names come from ``fresh`` (shared by
    the whole proof) so that existential witnesses never collide.
    """
    if state.chain >= config.max_chain:
        raise ChainLimitExceeded(f"axiom chaining deeper than {config.max_chain}")
    fresh = fresh or _fresh_after(state.premises, state.goal_vars)
    prepared = prepare_axiom(axiom)
    ante, _, pattern_vars, _ = prepared
    out = []
    for sigma in iter_matches(ante, state.premises, pattern_vars):
        key = _firing_key(axiom, sigma, pattern_vars)
        if key in state.fired:
            continue
        negation, added = _fire(axiom, prepared, state, sigma, fresh)
        step = ProofStep(AXIOM_APPLY, axiom=axiom, added=tuple(added),
                         delta=tuple(sorted(((v, t) for v, t in sigma.items() if v in pattern_vars),
                                            key=lambda kv: kv[0].name)))
        new = state.with_premises(added)
        new = replace(
            new,
            trace=state.trace + (step,),
            used_axioms=state.used_axioms + (axiom,),
            fired=state.fired | {key},
            chain=state.chain + 1,
            negations=state.negations + ((negation,) if negation is not None else ()),
        )
        out.append(new)
    return out


def saturate(state, axioms, config=DEFAULT_CONFIG, fresh=None):
    """Forward chaining: fire all axioms on all matches, up to max_chain rounds.

    Returns the saturated state and whether chaining was cut off.
    """
    fresh = fresh or _fresh_after(state.premises, state.goal_vars)
    prepared = [(ax, prepare_axiom(ax)) for ax in axioms]
    truncated = False
    for round_no in range(config.max_chain + 1):
        progress = False
        for ax, prep in prepared:
            ante, _, pattern_vars, _ = prep
            for sigma in list(iter_matches(ante, state.premises, pattern_vars)):
                key = _firing_key(ax, sigma, pattern_vars)
                if key in state.fired:
                    continue
                if round_no == config.max_chain:
                    truncated = True
                    break
                negation, added = _fire(ax, prep, state, sigma, fresh)
                step = ProofStep(AXIOM_APPLY, axiom=ax, added=tuple(added))
                state = replace(
                    state.with_premises(added),
                    trace=state.trace + (step,),
                    used_axioms=state.used_axioms + (ax,),
                    fired=state.fired | {key},
                    negations=state.negations + ((negation,) if negation is not None else ()),
                )
                progress = True
        if not progress:
            break
        state = replace(state, chain=state.chain + 1)
    return state, truncated


# ---------------------------------------------------------------- replay

def replay(initial, trace):
    """Re-apply a trace to an initial state; returns the remaining sub-goals.

    Raises ValueError if a step does not apply.
    """
    premises = set(initial.premises)
    remaining = list(initial.subgoals)
    subst = dict(initial.subst)
    for step in trace:
        if step.kind == AXIOM_APPLY:
            premises |= set(step.added)
            continue
        if step.kind not in (MATCH, WORD_ABDUCTION):
            continue
        if step.goal_atom not in remaining:
            raise ValueError(f"{step.goal_atom} is not an open sub-goal")
        if step.premise_atom not in premises:
            raise ValueError(f"{step.premise_atom} is not a premise")
        for v, t in step.delta:
            if v in subst and subst[v] != t:
                raise ValueError(f"conflicting binding for {v}")
            subst[v] = t
        g = subst_atom(step.goal_atom, subst)
        if step.kind == MATCH and g != step.premise_atom:
            raise ValueError(f"{g} does not match {step.premise_atom}")
        if step.kind == WORD_ABDUCTION and g.args != step.premise_atom.args:
            raise ValueError(f"{g} and {step.premise_atom} have different arguments")
        remaining.remove(step.goal_atom)
    return remaining


# ---------------------------------------------------------------- oracle

ORACLE_LIMIT = 10 ** 7


def oracle_entails(premise, goal, limit=ORACLE_LIMIT):
    """Brute force: is there a sort-respecting map from goal variables to
    premise terms sending every goal atom onto a premise atom?

    Independent of the search above; used as ground truth in tests.
    """
    terms = set()
    for a in premise.atoms:
        for t in atom_terms(a):
            terms.add(t)
    terms = [t for t in terms if not isinstance(t, Func)]
    by_sort = {}
    for t in terms:
        by_sort.setdefault(t.sort, []).append(t)
    gvars = sorted(goal.variables, key=lambda v: v.name)
    choices = [sorted(by_sort.get(v.sort, []), key=str) for v in gvars]
    size = math.prod(len(c) for c in choices) if gvars else 1
    if size > limit:
        raise OracleTooLarge(f"{size} candidate mappings exceed {limit}")
    facts = premise.atoms
    for combo in itertools.product(*choices):
        m = dict(zip(gvars, combo))
        if all(subst_atom(g, m) in facts for g in goal.atoms):
            return True
    return False
