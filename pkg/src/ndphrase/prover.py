"""Natural deduction over event-semantics formulas, with abduction.

Non-basic structure is removed by ``reduce_goal`` (introduction rules on
the goal, elimination rules on premises).  What is left are obligations
whose goal is either a basic formula or False; these go to the atom-level
search in ``search`` with word and phrase abduction layered on top.
"""

from __future__ import annotations

import dataclasses
import enum
import itertools
import time
from dataclasses import dataclass, field, replace

from .abduction import generate_phrase_axioms, reverse_alignment
from .axiom import Axiom, Provenance
from .config import DEFAULT_CONFIG
from .knowledge import WordRelation
from .errors import DepthExceeded, ProverLimit
from .formula import (
    FALSE,
    And,
    Exists,
    FalseF,
    Forall,
    FreshNames,
    Implies,
    Not,
    Or,
    all_vars,
    bound_vars,
    decompose_basic,
    existential_vars,
    is_basic,
    max_indices,
    normalize,
    print_formula,
    subst_formula,
    ATOM_TYPES,
)
from .search import (
    PHRASE_ABDUCTION,
    RULE,
    WORD_ABDUCTION,
    Budget,
    ProofState,
    ProofStep,
    abduce_word,
    iter_exact,
    saturate,
    word_candidates,
)

ENTAILMENT_KINDS = ("synonym", "hypernym")
CONTRADICTION_KINDS = ("synonym", "hypernym", "antonym")


class Label(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    def __str__(self):
        return self.value


PROVED = "proved"
UNPROVABLE = "unprovable"


@dataclass
class ProofResult:
    status: str
    final_state: ProofState | None
    generated_axioms: list = field(default_factory=list)
    truncated: bool = False
    notes: list = field(default_factory=list)

    @property
    def proved(self):
        return self.status == PROVED

    def trace_text(self):
        if self.final_state is None:
            return ""
        return "\n".join(s.to_text() for s in self.final_state.trace)


# ---------------------------------------------------------------- obligations

@dataclass(frozen=True)
class Obligation:
    """Premise formulas and a goal that is basic or False."""

    premises: tuple
    goal: object
    rules: tuple = ()
    assumptions: tuple = ()

    def __str__(self):
        ps = "; ".join(print_formula(p) for p in self.premises)
        return f"{ps} |- {print_formula(self.goal)}"


def _fresh_for(formulas):
    names = FreshNames()
    for f in formulas:
        names.reserve(all_vars(f))
    return names


def _split_premise(f):
    """Strip existential prefixes and conjunctions (∃-E, ∧-E)."""
    if isinstance(f, Exists):
        return _split_premise(f.body)
    if isinstance(f, And):
        out = []
        for a in f.args:
            out += _split_premise(a)
        return out
    return [f]


def _flatten_premises(premises):
    out = []
    for p in premises:
        for q in _split_premise(p):
            if q not in out:
                out.append(q)
    return tuple(out)


def reduce_goal(premises, goal, config=DEFAULT_CONFIG, *, depth=0, rules=(), assumptions=(),
                fresh=None):
    """Alternatives of obligation tuples; each tuple must be fully proved.

    Goals: ¬-I, →-I, ∀-I (fresh eigenvariable), ∨-I (one alternative per
    side).  Premises: ∨-E splits every alternative in two.  A False goal
    yields one ¬-E alternative per negated premise, then itself (left to
    the solver for stored negations and antonyms).  →-E backwards when the
    goal is the consequent of a premise implication.
    """
    if isinstance(premises, (list, tuple)):
        premises = _flatten_premises(premises)
    else:
        premises = _flatten_premises([premises])
    if depth > config.max_depth:
        raise DepthExceeded(f"more than {config.max_depth} rule applications")
    fresh = fresh or _fresh_for(list(premises) + [goal])

    def again(ps, g, rule, extra_assumptions=()):
        return reduce_goal(ps, g, config, depth=depth + 1, rules=rules + (rule,),
                           assumptions=assumptions + extra_assumptions, fresh=fresh)

    # ∨-E on the first disjunctive premise
    for i, p in enumerate(premises):
        if isinstance(p, Or):
            rest = premises[:i] + premises[i + 1:]
            left = again(rest + (p.left,), goal, "∨-E")
            right = again(rest + (p.right,), goal, "∨-E")
            return [a + b for a, b in itertools.product(left, right)]

    if isinstance(goal, Not):
        return again(premises + (goal.body,), FALSE, "¬-I", (goal.body,))
    if isinstance(goal, Implies):
        return again(premises + (goal.left,), goal.right, "→-I")
    if isinstance(goal, Forall):
        eigen = fresh.fresh(goal.var.sort)
        return again(premises, subst_formula(goal.body, {goal.var: eigen}), "∀-I")
    if isinstance(goal, Or):
        return again(premises, goal.left, "∨-I") + again(premises, goal.right, "∨-I")
    if isinstance(goal, And) and not is_basic(goal):
        # conjunctive goal with non-basic parts: prove each conjunct
        parts = [reduce_goal(premises, g, config, depth=depth + 1, rules=rules,
                             assumptions=assumptions, fresh=fresh) for g in goal.args]
        return [sum(combo, ()) for combo in itertools.product(*parts)]

    out = []
    if isinstance(goal, FalseF):
        for i, p in enumerate(premises):
            if isinstance(p, Not):
                rest = premises[:i] + premises[i + 1:]
                out += again(rest, p.body, "¬-E")
    for p in premises:
        if isinstance(p, Implies) and p.right == goal and not isinstance(goal, FalseF):
            out += again(premises, p.left, "→-E")
    out.append((Obligation(premises, goal, rules, assumptions),))
    return out


# ---------------------------------------------------------------- conditionals

def _conditional(f):
    """A premise ``∀v̄(A → B)`` or ``A → B`` (A basic; B basic or ¬basic)
    as a rule for forward chaining; rigid variables stay fixed."""
    universal = []
    while isinstance(f, Forall):
        universal.append(f.var)
        f = f.body
    if not isinstance(f, Implies) or not is_basic(f.left):
        return None
    rhs, negated = f.right, False
    if isinstance(rhs, Not):
        rhs, negated = rhs.body, True
    if not is_basic(rhs):
        return None
    ante = decompose_basic(f.left)
    cons = decompose_basic(rhs)
    pattern = frozenset(universal) | existential_vars(f.left)
    return Axiom(ante.atoms, cons.atoms, pattern, existential_vars(rhs), negated,
                 Provenance(mode="premise"))


# ---------------------------------------------------------------- solving

class _Lexicon:
    """Relations usable when aligning an assumed hypothesis onto the text:
    lexical relations under word abduction, and stored one-place negated
    axioms (``p(x) -> -q(x)``) read as antonyms under stored-axiom modes."""

    def __init__(self, kb, config):
        self.kb = kb if config.word_abduction else None
        self.antonyms = set()
        if config.stored_axioms and kb is not None:
            for ax in kb.axioms:
                if ax.negated and len(ax.antecedent) == 1 and len(ax.consequent) == 1:
                    (a,), (c,) = ax.antecedent, ax.consequent
                    if a.arity == 1 and c.arity == 1 and a.args == c.args:
                        self.antonyms.add((a.name, c.name))

    def __bool__(self):
        return self.kb is not None or bool(self.antonyms)

    def lookup(self, source, target):
        rel = self.kb.lookup(source, target) if self.kb is not None else None
        if rel is None and (source, target) in self.antonyms:
            rel = WordRelation(source, target, "antonym")
        return rel


@dataclass
class _Context:
    kb: object
    config: object
    deadline: float | None
    text_vars: frozenset
    hyp_vars: frozenset
    notes: list = field(default_factory=list)

    def budget(self):
        return Budget(self.config, self.deadline)


@dataclass
class _Outcome:
    proved: bool
    state: ProofState | None
    truncated: bool = False


def _generated(state):
    out = []
    for s in state.trace:
        if s.kind in (WORD_ABDUCTION, PHRASE_ABDUCTION) and s.axiom not in out:
            out.append(s.axiom)
    return out


def _escalate(state, ctx, budget, *, word, phrase, kinds, fresh, lexicon):
    """Terminal states of one basic proof: exact matching, then word
    abduction on saturated branches, then phrase abduction."""
    for leaf in iter_exact(state, budget):
        if leaf.proved:
            budget.leaf()
            yield leaf
            continue
        if word:
            goal, found = word_candidates(leaf, lexicon, kinds)
            if goal is not None:
                for premise, s, rel in found:
                    nxt, _ = abduce_word(leaf, goal, premise, s, rel)
                    yield from _escalate(nxt, ctx, budget, word=word, phrase=phrase,
                                         kinds=kinds, fresh=fresh, lexicon=lexicon)
                continue
        if phrase:
            res = generate_phrase_axioms(leaf, config=ctx.config)
            ctx.notes.extend(n for n in res.notes if n not in ctx.notes)
            if res.axioms:
                steps = tuple(ProofStep(PHRASE_ABDUCTION, axiom=a) for a in res.axioms)
                nxt = replace(leaf, trace=leaf.trace + steps)
                nxt, _ = saturate(nxt, res.axioms, ctx.config, fresh)
                yield from _escalate(nxt, ctx, budget, word=word, phrase=False,
                                     kinds=kinds, fresh=fresh, lexicon=lexicon)
                continue
        budget.leaf()
        yield leaf


def _is_reverse(goal_vars, ctx):
    return bool(goal_vars) and not (goal_vars & ctx.hyp_vars) and bool(goal_vars & ctx.text_vars)


def _solve_basic(base, goal, ctx, fresh, *, kinds=ENTAILMENT_KINDS, require_antonym=False,
                 flexible=None, lexicon=None):
    config = ctx.config
    g = decompose_basic(goal)
    goal_vars = frozenset(flexible) if flexible is not None else existential_vars(goal)
    state = ProofState.initial(base.premises, g.atoms, goal_vars)
    state = replace(state, trace=base.trace, used_axioms=base.used_axioms,
                    negations=base.negations, fired=base.fired, chain=base.chain)
    reverse = _is_reverse(goal_vars, ctx)
    phrase = config.phrase_abduction and not reverse and not require_antonym
    budget = ctx.budget()
    first = None
    word = config.word_abduction if lexicon is None else bool(lexicon)
    lexicon = ctx.kb if lexicon is None else lexicon
    for leaf in _escalate(state, ctx, budget, word=word, phrase=phrase,
                          kinds=kinds, fresh=fresh, lexicon=lexicon):
        if leaf.proved:
            if require_antonym and not any(
                    s.kind == WORD_ABDUCTION and s.axiom.negated for s in leaf.trace):
                first = first or leaf
                continue
            if reverse and config.phrase_abduction:
                res = reverse_alignment(leaf, ctx.text_vars, config)
                ctx.notes.extend(n for n in res.notes if n not in ctx.notes)
                steps = tuple(ProofStep(PHRASE_ABDUCTION, axiom=a) for a in res.axioms)
                leaf = replace(leaf, trace=leaf.trace + steps)
            return _Outcome(True, leaf)
        first = first or leaf
    return _Outcome(False, first)


def _solve_obligation(ob, ctx):
    config = ctx.config
    fresh = _fresh_for(list(ob.premises) + [ob.goal])
    atoms, others = [], []
    for p in ob.premises:
        (atoms if isinstance(p, ATOM_TYPES) else others).append(p)
    negations = tuple(p for p in others if isinstance(p, Not))
    conditionals = [c for c in (_conditional(p) for p in others) if c is not None]
    base = ProofState.initial(atoms, (), ())
    base = replace(base, trace=tuple(ProofStep(RULE, rule=r) for r in ob.rules))
    axioms = list(conditionals)
    if config.stored_axioms and ctx.kb is not None:
        axioms += ctx.kb.sorted_axioms()
    truncated = False
    if axioms:
        base, truncated = saturate(base, axioms, config, fresh)

    if not isinstance(ob.goal, FalseF):
        if not is_basic(ob.goal):
            return _Outcome(False, base, truncated)
        out = _solve_basic(base, ob.goal, ctx, fresh)
        out.truncated |= truncated
        return out

    # goal False: negations derived from stored or premise axioms
    derived = [n for n in base.negations if n not in negations]
    first = None
    for neg in derived:
        body = neg.body
        if not is_basic(body):
            continue
        st = replace(base, trace=base.trace + (ProofStep(RULE, rule="¬-E"),))
        out = _solve_basic(st, body, ctx, fresh)
        if out.proved:
            out.truncated |= truncated
            return out
        first = first or out.state
    # antonym route: the assumed hypothesis clashes with the text when
    # aligned onto it, given at least one antonym pair
    lexicon = _Lexicon(ctx.kb, config)
    if lexicon:
        for assumption in ob.assumptions:
            if not is_basic(assumption):
                continue
            assumed = decompose_basic(assumption)
            flexible = existential_vars(assumption)
            rest = [a for a in base.premises if a not in assumed.atoms]
            st = replace(base, premises=tuple(rest))
            out = _solve_basic(st, assumption, ctx, fresh, kinds=CONTRADICTION_KINDS,
                               require_antonym=True, flexible=flexible, lexicon=lexicon)
            if out.proved:
                out.truncated |= truncated
                return out
            first = first or out.state
    return _Outcome(False, first or base, truncated)


def prove(premises, goal, kb=None, config=DEFAULT_CONFIG, *, text_vars=frozenset(),
          hyp_vars=frozenset(), deadline=None):
    """Try to derive ``goal`` from ``premises``; first successful
    alternative wins.  Prover limits end the attempt as unprovable with
    ``truncated`` set."""
    if deadline is None and config.timeout_secs:
        deadline = time.monotonic() + config.timeout_secs
    ctx = _Context(kb, config, deadline, frozenset(text_vars), frozenset(hyp_vars))
    truncated = False
    first = None
    try:
        alternatives = reduce_goal(list(premises), goal, config)
        for alt in alternatives:
            states, ok = [], True
            for ob in alt:
                try:
                    out = _solve_obligation(ob, ctx)
                except ProverLimit as exc:
                    truncated = True
                    ctx.notes.append(f"{type(exc).__name__}: {exc}")
                    ok = False
                    break
                truncated |= out.truncated
                if out.state is not None:
                    states.append(out.state)
                if not out.proved:
                    ok = False
                    first = first or out.state
                    break
            if ok:
                generated = []
                for st in states:
                    generated += [a for a in _generated(st) if a not in generated]
                return ProofResult(PROVED, states[-1] if states else None, generated,
                                   truncated, ctx.notes)
    except ProverLimit as exc:
        truncated = True
        ctx.notes.append(f"{type(exc).__name__}: {exc}")
    generated = _generated(first) if first is not None else []
    return ProofResult(UNPROVABLE, first, generated, truncated, ctx.notes)


# ---------------------------------------------------------------- classification

def prepare_pair(premise, hypothesis, config=DEFAULT_CONFIG):
    """Normalize both formulas, renaming the hypothesis apart."""
    p = normalize(premise, config)
    top = max_indices(p)
    h = normalize(hypothesis, config, start={s: i + 1 for s, i in top.items()})
    return p, h


def _pair_context(p, h):
    return frozenset(bound_vars(p)), frozenset(bound_vars(h))


def classify(premise, hypothesis, kb=None, config=DEFAULT_CONFIG):
    """Label a pair: yes if T ⇒ H, no if T ⇒ ¬H, unknown otherwise.

    Returns (label, entailment attempt, contradiction attempt); the second
    attempt is None when the first succeeds.
    """
    deadline = time.monotonic() + config.timeout_secs if config.timeout_secs else None
    p, h = prepare_pair(premise, hypothesis, config)
    text_vars, hyp_vars = _pair_context(p, h)
    yes = prove([p], h, kb, config, text_vars=text_vars, hyp_vars=hyp_vars, deadline=deadline)
    if yes.proved:
        return Label.YES, yes, None
    no = prove([p], Not(h), kb, config, text_vars=text_vars, hyp_vars=hyp_vars,
               deadline=deadline)
    if no.proved:
        return Label.NO, yes, no
    return Label.UNKNOWN, yes, no


def extract_from_pair(premise, hypothesis, gold, kb=None, config=DEFAULT_CONFIG, pair_id=""):
    """Axioms abduced on the first proof of the gold direction.

    Phrase abduction is switched on regardless of ``config``.  Returns an
    empty list when no proof is found even with abduction.
    """
    gold = Label(gold)
    if gold is Label.UNKNOWN:
        raise ValueError("axioms are only extracted from yes/no pairs")
    config = config.replace(phrase_abduction=True)
    deadline = time.monotonic() + config.timeout_secs if config.timeout_secs else None
    p, h = prepare_pair(premise, hypothesis, config)
    text_vars, hyp_vars = _pair_context(p, h)
    goal = h if gold is Label.YES else Not(h)
    res = prove([p], goal, kb, config, text_vars=text_vars, hyp_vars=hyp_vars,
                deadline=deadline)
    if not res.proved:
        return []
    out = []
    for ax in res.generated_axioms:
        prov = Provenance(pair_id, ax.provenance.mode, gold.value)
        out.append(dataclasses.replace(ax, provenance=prov))
    return out
