"""Terms and formulas of Neo-Davidsonian event semantics.

Text syntax::

    exists x1 y1 (dog(x1) & run(y1) & subj(y1)=x1)
    -exists y1 (cut(y1))
    forall x1 (lady(x1) -> woman(x1))
    False

Identifiers are ``[a-z][a-z0-9_]*``.  Variables are ``x<n>`` (entities)
and ``y<n>`` (events) and must be bound by a quantifier; any other
identifier in argument position is a constant.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .config import DEFAULT_CONFIG
from .errors import (
    FormulaSyntaxError,
    NormalizationError,
    NotBasic,
    SortError,
    UnboundVariable,
)

ENTITY = "entity"
EVENT = "event"
_SORT_PREFIX = {ENTITY: "x", EVENT: "y"}
VAR_RE = re.compile(r"[xy][0-9]+\Z")


# ---------------------------------------------------------------- terms

@dataclass(frozen=True, order=True)
class Var:
    name: str

    @property
    def sort(self):
        return ENTITY if self.name[0] == "x" else EVENT

    @property
    def index(self):
        return int(self.name[1:])

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class Const:
    name: str

    # constants denote individuals; they never stand for events
    sort = ENTITY

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class Func:
    role: str
    arg: Union[Var, Const]

    sort = ENTITY

    def __str__(self):
        return f"{self.role}({self.arg})"


Term = Union[Var, Const, Func]


def make_var(sort, index):
    return Var(f"{_SORT_PREFIX[sort]}{index}")


def term_vars(t):
    if isinstance(t, Var):
        return {t}
    if isinstance(t, Func):
        return term_vars(t.arg)
    return set()


# ---------------------------------------------------------------- formulas

class Formula:
    """Base class; ``str()`` gives the canonical text form."""

    __slots__ = ()

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True, order=True)
class Pred(Formula):
    """One-place (content word) or two-place (preposition) predicate."""

    name: str
    args: tuple

    @property
    def arity(self):
        return len(self.args)

    __str__ = Formula.__str__


@dataclass(frozen=True, order=True)
class Role(Formula):
    """Role link ``role(event)=arg``, the normalized form of role equalities."""

    role: str
    event: Term
    arg: Term

    @property
    def name(self):
        return self.role

    @property
    def args(self):
        return (self.event, self.arg)

    arity = 2
    __str__ = Formula.__str__


@dataclass(frozen=True, order=True)
class Eq(Formula):
    lhs: Term
    rhs: Term

    @property
    def name(self):
        return "="

    @property
    def args(self):
        return (self.lhs, self.rhs)

    arity = 2
    __str__ = Formula.__str__


Atom = Union[Pred, Role, Eq]
ATOM_TYPES = (Pred, Role, Eq)


@dataclass(frozen=True)
class And(Formula):
    args: tuple
    __str__ = Formula.__str__


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula
    __str__ = Formula.__str__


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula
    __str__ = Formula.__str__


@dataclass(frozen=True)
class Not(Formula):
    body: Formula
    __str__ = Formula.__str__


@dataclass(frozen=True)
class Exists(Formula):
    var: Var
    body: Formula
    __str__ = Formula.__str__


@dataclass(frozen=True)
class Forall(Formula):
    var: Var
    body: Formula
    __str__ = Formula.__str__


@dataclass(frozen=True)
class FalseF(Formula):
    __str__ = Formula.__str__


FALSE = FalseF()


def conj(*parts):
    """n-ary conjunction with nested conjunctions flattened."""
    flat = []
    for p in parts:
        if isinstance(p, And):
            flat.extend(p.args)
        else:
            flat.append(p)
    if not flat:
        raise ValueError("empty conjunction")
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def exists(variables, body):
    for v in reversed(list(variables)):
        body = Exists(v, body)
    return body


def forall(variables, body):
    for v in reversed(list(variables)):
        body = Forall(v, body)
    return body


def atom_key(a):
    return str(a)


def atom_vars(a):
    out = set()
    for t in a.args:
        out |= term_vars(t)
    return out


def atom_terms(a):
    """Top-level and nested terms of an atom."""
    out = []
    for t in a.args:
        out.append(t)
        if isinstance(t, Func):
            out.append(t.arg)
    return out


def free_vars(f, bound=frozenset()):
    if isinstance(f, ATOM_TYPES):
        return atom_vars(f) - bound
    if isinstance(f, And):
        out = set()
        for a in f.args:
            out |= free_vars(a, bound)
        return out
    if isinstance(f, (Or, Implies)):
        return free_vars(f.left, bound) | free_vars(f.right, bound)
    if isinstance(f, Not):
        return free_vars(f.body, bound)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body, bound | {f.var})
    return set()


def bound_vars(f):
    if isinstance(f, (Exists, Forall)):
        return {f.var} | bound_vars(f.body)
    if isinstance(f, And):
        out = set()
        for a in f.args:
            out |= bound_vars(a)
        return out
    if isinstance(f, (Or, Implies)):
        return bound_vars(f.left) | bound_vars(f.right)
    if isinstance(f, Not):
        return bound_vars(f.body)
    return set()


def all_vars(f):
    return free_vars(f) | bound_vars(f)


# ---------------------------------------------------------------- substitution

def subst_term(t, s):
    if isinstance(t, Var):
        return s.get(t, t)
    if isinstance(t, Func):
        inner = s.get(t.arg, t.arg) if isinstance(t.arg, Var) else t.arg
        return Func(t.role, inner)
    return t


def subst_atom(a, s):
    if not s:
        return a
    if isinstance(a, Pred):
        return Pred(a.name, tuple(subst_term(t, s) for t in a.args))
    if isinstance(a, Role):
        return Role(a.role, subst_term(a.event, s), subst_term(a.arg, s))
    return Eq(subst_term(a.lhs, s), subst_term(a.rhs, s))


def subst_formula(f, s):
    """Capture-unaware substitution; callers keep bound names distinct."""
    if isinstance(f, ATOM_TYPES):
        return subst_atom(f, s)
    if isinstance(f, And):
        return And(tuple(subst_formula(a, s) for a in f.args))
    if isinstance(f, Or):
        return Or(subst_formula(f.left, s), subst_formula(f.right, s))
    if isinstance(f, Implies):
        return Implies(subst_formula(f.left, s), subst_formula(f.right, s))
    if isinstance(f, Not):
        return Not(subst_formula(f.body, s))
    if isinstance(f, (Exists, Forall)):
        inner = {k: v for k, v in s.items() if k != f.var}
        return type(f)(f.var, subst_formula(f.body, inner))
    return f


class FreshNames:
    """Supply of variable names not used so far, one counter per sort."""

    def __init__(self, used=()):
        self._next = {ENTITY: 1, EVENT: 1}
        self.reserve(used)

    def reserve(self, variables):
        for v in variables:
            if isinstance(v, Var) and VAR_RE.match(v.name):
                self._next[v.sort] = max(self._next[v.sort], v.index + 1)

    def fresh(self, sort):
        i = self._next[sort]
        self._next[sort] = i + 1
        return make_var(sort, i)

    def copy(self):
        other = FreshNames()
        other._next = dict(self._next)
        return other


# ---------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"\s+|#[^\n]*|(?P<tok>->|[-&|(),=]|[a-z][a-z0-9_]*|False\b)"
)
_IDENT_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.group("tok"):
            tokens.append((m.group("tok"), m.start()))
        pos = m.end()
    tokens.append(("<eof>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, args):
        self.tokens = _tokenize(text)
        self.i = 0
        self.args = args
        self.scopes = []

    def peek(self, k=0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)][0]

    def pos(self):
        return self.tokens[self.i][1]

    def advance(self):
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def expect(self, tok):
        if self.peek() != tok:
            got = "end of input" if self.peek() == "<eof>" else repr(self.peek())
            raise FormulaSyntaxError(f"found {got}", self.pos(), repr(tok))
        return self.advance()

    def fail(self, expected):
        got = "end of input" if self.peek() == "<eof>" else repr(self.peek())
        raise FormulaSyntaxError(f"found {got}", self.pos(), expected)

    def is_ident(self, tok):
        return bool(_IDENT_RE.match(tok)) and tok not in ("exists", "forall")

    # formula := disj ('->' formula)?
    def formula(self):
        left = self.disj()
        if self.peek() == "->":
            self.advance()
            return Implies(left, self.formula())
        return left

    def disj(self):
        left = self.conj_()
        while self.peek() == "|":
            self.advance()
            left = Or(left, self.conj_())
        return left

    def conj_(self):
        parts = [self.unary()]
        while self.peek() == "&":
            self.advance()
            parts.append(self.unary())
        return conj(*parts) if len(parts) > 1 else parts[0]

    def unary(self):
        tok = self.peek()
        if tok == "-":
            self.advance()
            return Not(self.unary())
        if tok in ("exists", "forall"):
            return self.quantified()
        if tok == "False":
            self.advance()
            return FALSE
        if tok == "(":
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if self.is_ident(tok):
            return self.atom()
        self.fail("a formula")

    def quantified(self):
        kind = self.advance()
        variables = []
        while self.is_ident(self.peek()):
            name, pos = self.advance(), self.tokens[self.i - 1][1]
            if not VAR_RE.match(name):
                raise SortError(
                    f"quantified variable {name!r} at position {pos} must be "
                    "x<n> (entity) or y<n> (event)"
                )
            v = Var(name)
            if v in variables or any(v in s for s in self.scopes):
                raise FormulaSyntaxError(f"variable {name} bound twice", pos)
            variables.append(v)
        if not variables:
            self.fail("a variable")
        self.expect("(")
        self.scopes.append(set(variables))
        body = self.formula()
        self.scopes.pop()
        self.expect(")")
        return (exists if kind == "exists" else forall)(variables, body)

    def simple_term(self):
        tok = self.peek()
        if not self.is_ident(tok):
            self.fail("a term")
        pos = self.pos()
        self.advance()
        if VAR_RE.match(tok):
            v = Var(tok)
            if not any(v in s for s in self.scopes):
                raise UnboundVariable(f"variable {tok} at position {pos} is not bound")
            return v
        return Const(tok)

    def term(self):
        if self.is_ident(self.peek()) and self.peek(1) == "(":
            pos = self.pos()
            role = self.advance()
            if role not in self.args:
                raise FormulaSyntaxError(f"{role!r} is not a semantic role", pos)
            self.advance()
            arg = self.simple_term()
            self.expect(")")
            return Func(role, arg)
        return self.simple_term()

    def atom(self):
        pos = self.pos()
        if self.peek(1) != "(":
            lhs = self.simple_term()
            self.expect("=")
            return Eq(lhs, self.term())
        name = self.advance()
        self.advance()
        terms = [self.term()]
        while self.peek() == ",":
            self.advance()
            terms.append(self.term())
        self.expect(")")
        if len(terms) > 2:
            raise FormulaSyntaxError(f"predicate {name} has {len(terms)} arguments", pos)
        if self.peek() == "=":
            if name not in self.args or len(terms) != 1:
                raise FormulaSyntaxError(f"{name}(...) is not a role term", pos)
            if isinstance(terms[0], Func):
                raise FormulaSyntaxError("roles nest at most once", pos)
            self.advance()
            return Eq(Func(name, terms[0]), self.term())
        if name in self.args and len(terms) == 1:
            raise FormulaSyntaxError(f"role {name} used as a predicate", pos, "'='")
        return Pred(name, tuple(terms))


def parse_formula(text, config=DEFAULT_CONFIG):
    p = _Parser(text, config.args)
    f = p.formula()
    if p.peek() != "<eof>":
        p.fail("end of input")
    return f


# ---------------------------------------------------------------- printing

def _fmt(f):
    if isinstance(f, Pred):
        return f"{f.name}({','.join(str(t) for t in f.args)})"
    if isinstance(f, Role):
        return f"{f.role}({f.event})={f.arg}"
    if isinstance(f, Eq):
        return f"{f.lhs}={f.rhs}"
    if isinstance(f, And):
        return "(" + " & ".join(_fmt(a) for a in f.args) + ")"
    if isinstance(f, Or):
        return f"({_fmt(f.left)} | {_fmt(f.right)})"
    if isinstance(f, Implies):
        return f"({_fmt(f.left)} -> {_fmt(f.right)})"
    if isinstance(f, Not):
        return "-" + _fmt(f.body)
    if isinstance(f, (Exists, Forall)):
        kind = type(f)
        names = []
        while isinstance(f, kind):
            names.append(f.var.name)
            f = f.body
        inner = _fmt(f)
        if isinstance(f, (And, Or, Implies)):
            inner = inner[1:-1]
        word = "exists" if kind is Exists else "forall"
        return f"{word} {' '.join(names)} ({inner})"
    if isinstance(f, FalseF):
        return "False"
    raise TypeError(f"not a formula: {f!r}")


def print_formula(f):
    return _fmt(f)


# ---------------------------------------------------------------- structure

def is_basic(f):
    if isinstance(f, ATOM_TYPES):
        return True
    if isinstance(f, And):
        return all(is_basic(a) for a in f.args)
    if isinstance(f, Exists):
        return is_basic(f.body)
    return False


@dataclass(frozen=True)
class AtomSet:
    atoms: frozenset
    variables: frozenset

    def __post_init__(self):
        object.__setattr__(self, "atoms", frozenset(self.atoms))
        used = set()
        for a in self.atoms:
            used |= atom_vars(a)
        object.__setattr__(self, "variables", frozenset(self.variables) | used)

    def sorted(self):
        return sorted(self.atoms, key=atom_key)

    def __len__(self):
        return len(self.atoms)

    def __iter__(self) -> Iterator:
        return iter(self.sorted())


def _matrix(f):
    if isinstance(f, ATOM_TYPES):
        return [f], []
    if isinstance(f, And):
        atoms, vs = [], []
        for a in f.args:
            x, y = _matrix(a)
            atoms += x
            vs += y
        return atoms, vs
    if isinstance(f, Exists):
        atoms, vs = _matrix(f.body)
        return atoms, [f.var] + vs
    raise NotBasic(f"not a basic formula: {print_formula(f)}")


def decompose_basic(f):
    atoms, vs = _matrix(f)
    return AtomSet(frozenset(atoms), frozenset(vs))


def existential_vars(f):
    """Variables bound by the existential prefix/matrix of a basic formula."""
    return frozenset(_matrix(f)[1])


def recompose(atom_set):
    """Existential closure of the conjunction of an atom set."""
    atoms = atom_set.sorted()
    if not atoms:
        raise ValueError("cannot recompose an empty atom set")
    variables = sorted(atom_set.variables, key=lambda v: (v.sort, v.index))
    return exists(variables, conj(*atoms))


# ---------------------------------------------------------------- normalization

def _normalize_atom(a, args):
    if isinstance(a, Role):
        return a
    if isinstance(a, Pred):
        if a.name in args and a.arity == 2:
            return Role(a.name, a.args[0], a.args[1])
        return a
    lhs, rhs = a.lhs, a.rhs
    if isinstance(lhs, Func) and isinstance(rhs, Func):
        raise NormalizationError(f"equality between two role terms: {print_formula(a)}")
    if isinstance(rhs, Func):
        lhs, rhs = rhs, lhs
    if isinstance(lhs, Func):
        if lhs.role not in args:
            raise NormalizationError(f"{lhs.role} is not a semantic role")
        return Role(lhs.role, lhs.arg, rhs)
    raise NormalizationError(f"equality between plain terms: {print_formula(a)}")


def normalize(f, config=DEFAULT_CONFIG, *, start=None):
    """Canonical form: role links, flat conjunctions, indexed bound variables.

    Bound variables are renamed ``x1, x2, ...`` / ``y1, y2, ...`` in
    binding order.  ``start`` gives the first index per sort, which is how
    a hypothesis is renamed apart from its premise.
    """
    counters = {ENTITY: 1, EVENT: 1}
    if start:
        counters.update(start)

    def go(g, env):
        if isinstance(g, ATOM_TYPES):
            return _normalize_atom(subst_atom(g, env), config.args)
        if isinstance(g, And):
            return conj(*(go(a, env) for a in g.args))
        if isinstance(g, Or):
            return Or(go(g.left, env), go(g.right, env))
        if isinstance(g, Implies):
            return Implies(go(g.left, env), go(g.right, env))
        if isinstance(g, Not):
            return Not(go(g.body, env))
        if isinstance(g, (Exists, Forall)):
            sort = g.var.sort
            new = make_var(sort, counters[sort])
            counters[sort] += 1
            return type(g)(new, go(g.body, {**env, g.var: new}))
        return g

    return go(f, {})


def max_indices(f):
    """Largest variable index per sort occurring anywhere in ``f``."""
    out = {ENTITY: 0, EVENT: 0}
    for v in all_vars(f):
        if VAR_RE.match(v.name):
            out[v.sort] = max(out[v.sort], v.index)
    return out


# ---------------------------------------------------------------- functional terms

def flatten_functional(atoms: Iterable, fresh: FreshNames):
    """Replace role terms used as arguments by the variable they denote.

    ``camera(obj(y1))`` becomes ``camera(v) & obj(y1)=v``; ``v`` is the
    target of an existing ``obj`` link from ``y1`` if there is one, else a
    fresh entity variable.  Returns the new atoms and the fresh variables.
    """
    atoms = list(atoms)
    targets = {}
    for a in atoms:
        if isinstance(a, Role) and isinstance(a.arg, Var):
            targets.setdefault((a.role, a.event), a.arg)
    new_vars = []
    out = []

    def resolve(t):
        if not isinstance(t, Func):
            return t
        key = (t.role, t.arg)
        if key not in targets:
            v = fresh.fresh(ENTITY)
            targets[key] = v
            new_vars.append(v)
            out.append(Role(t.role, t.arg, v))
        return targets[key]

    for a in atoms:
        if isinstance(a, Pred):
            out.append(Pred(a.name, tuple(resolve(t) for t in a.args)))
        elif isinstance(a, Role):
            out.append(Role(a.role, resolve(a.event), resolve(a.arg)))
        else:
            out.append(a)
    seen = set()
    uniq = []
    for a in out:
        if a not in seen:
            seen.add(a)
            uniq.append(a)
    return uniq, new_vars
