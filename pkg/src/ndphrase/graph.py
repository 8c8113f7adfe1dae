"""Directed labelled graphs for basic formulas.

Variables and constants are vertices, one-place predicates become ``isa``
edges into predicate vertices, prepositions and semantic roles become
labelled edges between terms.

Text export (``to_text``/``from_text``), one record per line::

    #semgraph v1
    vertex var x1 unified
    vertex const bob
    vertex pred dog
    edge x1 isa p:dog
    edge y1 prep:on x3
    edge y1 role:subj x1

Vertex ids are variable names, ``c:<name>`` for constants and
``p:<name>`` for predicates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import DEFAULT_CONFIG
from .errors import EmptyGraph, FormatError, NormalizationError
from .formula import (
    AtomSet,
    Const,
    Eq,
    FreshNames,
    Pred,
    Role,
    Var,
    atom_key,
    flatten_functional,
    recompose,
)

ISA = "isa"
PREP = "prep"
ROLE = "role"


@dataclass(frozen=True, order=True)
class PredV:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class EdgeLabel:
    kind: str
    name: str = ""

    def __str__(self):
        return ISA if self.kind == ISA else f"{self.kind}:{self.name}"


ISA_LABEL = EdgeLabel(ISA)


@dataclass(frozen=True)
class Edge:
    src: object
    label: EdgeLabel
    dst: object

    def __str__(self):
        return f"<{self.src}, {self.label.name or ISA}, {self.dst}>"

    def key(self):
        return (str(self.src), str(self.label), str(self.dst))

    def variables(self):
        return {t for t in (self.src, self.dst) if isinstance(t, Var)}

    def terms(self):
        return {t for t in (self.src, self.dst) if isinstance(t, (Var, Const))}


@dataclass(frozen=True)
class SemGraph:
    vertices: frozenset
    edges: frozenset
    unified: frozenset = frozenset()
    non_unified: frozenset = frozenset()

    def variables(self):
        return {v for v in self.vertices if isinstance(v, Var)}

    def with_partition(self, unified):
        """New snapshot with ``unified`` variables marked, the rest non-unified."""
        variables = self.variables()
        unified = frozenset(unified) & variables
        return SemGraph(self.vertices, self.edges, unified, frozenset(variables - unified))

    def sorted_edges(self):
        return sorted(self.edges, key=Edge.key)

    def incident(self, vertex):
        return {e for e in self.edges if e.src == vertex or e.dst == vertex}


def atom_to_edge(a, config=DEFAULT_CONFIG):
    if isinstance(a, Role):
        return Edge(a.event, EdgeLabel(ROLE, a.role), a.arg)
    if isinstance(a, Eq):
        raise NormalizationError(f"un-normalized equality {a}")
    if a.arity == 1:
        return Edge(a.args[0], ISA_LABEL, PredV(a.name))
    if a.name in config.args:
        raise NormalizationError(f"role {a.name} written as a predicate: {a}")
    return Edge(a.args[0], EdgeLabel(PREP, a.name), a.args[1])


def edge_to_atom(e):
    """The three-way edge-to-atom mapping: isa, preposition, role."""
    if e.label.kind == ISA:
        return Pred(e.dst.name, (e.src,))
    if e.label.kind == PREP:
        return Pred(e.label.name, (e.src, e.dst))
    return Role(e.label.name, e.src, e.dst)


def to_graph(atoms, config=DEFAULT_CONFIG, fresh=None):
    """Graph of a normalized atom set; every variable starts non-unified.

    A role term used as an argument (``camera(obj(y1))``) is drawn as the
    vertex the ``obj`` edge of ``y1`` points to, created if absent.
    """
    if isinstance(atoms, AtomSet):
        extra_vars = set(atoms.variables)
        atoms = atoms.sorted()
    else:
        extra_vars = set()
        atoms = sorted(atoms, key=atom_key)
    fresh = fresh or FreshNames(_all_vars(atoms) | extra_vars)
    flat, new_vars = flatten_functional(atoms, fresh)
    edges = frozenset(atom_to_edge(a, config) for a in flat)
    vertices = set(extra_vars) | set(new_vars)
    for e in edges:
        vertices.add(e.src)
        vertices.add(e.dst)
    variables = frozenset(v for v in vertices if isinstance(v, Var))
    return SemGraph(frozenset(vertices), edges, frozenset(), variables)


def _all_vars(atoms):
    from .formula import atom_vars

    out = set()
    for a in atoms:
        out |= atom_vars(a)
    return out


def graph_atoms(g):
    return AtomSet(frozenset(edge_to_atom(e) for e in g.edges), frozenset(g.variables()))


def from_graph(g):
    """Existential closure of the conjunction of all edge atoms."""
    if not g.edges:
        raise EmptyGraph("graph has no edges")
    return recompose(graph_atoms(g))


def is_acyclic(g):
    succ = {}
    for e in g.edges:
        succ.setdefault(e.src, []).append(e.dst)
    state = {}

    def visit(v):
        state[v] = 1
        for w in succ.get(v, ()):
            if state.get(w) == 1:
                return False
            if w not in state and not visit(w):
                return False
        state[v] = 2
        return True

    return all(visit(v) for v in list(succ) if v not in state)


# ---------------------------------------------------------------- text export

def _vid(v):
    if isinstance(v, Var):
        return v.name
    if isinstance(v, Const):
        return f"c:{v.name}"
    return f"p:{v.name}"


def _parse_vid(s):
    if s.startswith("c:"):
        return Const(s[2:])
    if s.startswith("p:"):
        return PredV(s[2:])
    return Var(s)


def to_text(g):
    lines = ["#semgraph v1"]
    for v in sorted(g.vertices, key=_vid):
        if isinstance(v, Var):
            status = "unified" if v in g.unified else "non_unified"
            lines.append(f"vertex var {v.name} {status}")
        elif isinstance(v, Const):
            lines.append(f"vertex const {v.name}")
        else:
            lines.append(f"vertex pred {v.name}")
    for e in sorted(g.edges, key=lambda e: (_vid(e.src), str(e.label), _vid(e.dst))):
        lines.append(f"edge {_vid(e.src)} {e.label} {_vid(e.dst)}")
    return "\n".join(lines) + "\n"


def from_text(text):
    vertices, edges, unified = set(), set(), set()
    lines = text.splitlines()
    if not lines or lines[0].strip() != "#semgraph v1":
        raise FormatError("missing '#semgraph v1' header", 1)
    for n, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "vertex" and len(parts) in (3, 4):
            kind, name = parts[1], parts[2]
            if kind == "var":
                v = Var(name)
                if len(parts) == 4 and parts[3] == "unified":
                    unified.add(v)
            elif kind == "const":
                v = Const(name)
            elif kind == "pred":
                v = PredV(name)
            else:
                raise FormatError(f"unknown vertex kind {kind!r}", n)
            vertices.add(v)
        elif parts[0] == "edge" and len(parts) == 4:
            src, lab, dst = _parse_vid(parts[1]), parts[2], _parse_vid(parts[3])
            if lab == ISA:
                label = ISA_LABEL
            else:
                kind, _, name = lab.partition(":")
                if kind not in (PREP, ROLE) or not name:
                    raise FormatError(f"bad edge label {lab!r}", n)
                label = EdgeLabel(kind, name)
            edges.add(Edge(src, label, dst))
        else:
            raise FormatError(f"cannot read {line!r}", n)
    variables = {v for v in vertices if isinstance(v, Var)}
    return SemGraph(frozenset(vertices), frozenset(edges), frozenset(unified),
                    frozenset(variables - unified))
