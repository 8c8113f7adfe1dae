"""Subgraph alignment between premise and goal graphs, and phrase axioms.

A non-unified goal variable spans the unproved phrase around it: the
edges reachable from it without crossing a semantic-role edge.  Its
premise-side counterpart is the material attached to the unified
variables of that phrase.  Each pair becomes an axiom

    forall C (corr-atoms -> exists R (reach-atoms))
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .axiom import PHRASE, Provenance, make_axiom
from .config import DEFAULT_CONFIG
from .errors import NotNonUnified, UnknownVertex
from .formula import Const, Func, Role, Var, atom_key, subst_atom
from .graph import ISA, ROLE, Edge, SemGraph, edge_to_atom, to_graph


@dataclass(frozen=True)
class Partition:
    representative: Var
    reach: frozenset
    corr: frozenset


@dataclass
class AlignmentResult:
    partitions: list
    residual_groups: list = field(default_factory=list)
    unifier: dict = field(default_factory=dict)
    axioms: list = field(default_factory=list)
    notes: list = field(default_factory=list)


def _edges_of(g):
    return g.edges if isinstance(g, SemGraph) else frozenset(g)


def phrase_set(edges, x):
    """Non-role edges incident to ``x``."""
    pool = _edges_of(edges)
    if isinstance(edges, SemGraph):
        if x not in edges.vertices:
            raise UnknownVertex(f"{x} is not a vertex of the graph")
    elif not any(e.src == x or e.dst == x for e in pool):
        raise UnknownVertex(f"{x} does not occur in the edge set")
    return frozenset(e for e in pool if (e.src == x or e.dst == x) and e.label.kind != ROLE)


def reach(v, goal_graph):
    """Closure of phrase sets from ``v`` through non-unified variables."""
    if v not in goal_graph.non_unified:
        raise NotNonUnified(f"{v} is not a non-unified variable")
    out = set()
    seen = {v}
    todo = [v]
    while todo:
        u = todo.pop()
        for e in phrase_set(goal_graph, u):
            out.add(e)
            for w in e.variables():
                if w not in seen and w in goal_graph.non_unified:
                    seen.add(w)
                    todo.append(w)
    return frozenset(out)


def reach_vertices(edges):
    out = set()
    for e in edges:
        out |= e.terms()
    return out


def corr(v, reach_edges, premise_graph, goal_graph):
    """Premise edges one step away from the unified vertices of a phrase.

    ``goal_graph`` carries the unifier: its unified vertices already bear
    premise names.  Role edges are left out.  A preposition edge is kept
    when its far end is another anchor of the same phrase or a premise
    vertex with no goal counterpart; in the latter case that vertex's
    attributes come along so that the noun it stands for is not lost.
    """
    shared = set(goal_graph.vertices) & set(premise_graph.vertices)
    anchors = reach_vertices(reach_edges) & shared
    out = set()
    for a in sorted(anchors, key=str):
        for e in premise_graph.incident(a):
            if e.label.kind == ROLE:
                continue
            if e.label.kind == ISA:
                out.add(e)
                continue
            other = e.dst if e.src == a else e.src
            if other in anchors:
                out.add(e)
            elif other not in shared:
                out.add(e)
                out |= {f for f in premise_graph.incident(other)
                        if f.label.kind == ISA and f.src == other}
    return frozenset(out)


def _refunctionalize(atoms_a, atoms_b, premise_graph):
    """Write a variable reached by a role edge from another axiom variable
    as the role term, e.g. ``camera(x3)`` with ``obj(y1)=x3`` becomes
    ``camera(obj(y1))``."""
    vars_ = set()
    for a in list(atoms_a) + list(atoms_b):
        for t in a.args:
            if isinstance(t, Var):
                vars_.add(t)
    mapping = {}
    role_edges = sorted((e for e in premise_graph.edges if e.label.kind == ROLE), key=Edge.key)
    for e in role_edges:
        w, u = e.dst, e.src
        if (isinstance(w, Var) and w in vars_ and u in vars_ and w != u
                and w not in mapping and u not in mapping and isinstance(u, (Var, Const))):
            mapping[w] = Func(e.label.name, u)
    if not mapping:
        return list(atoms_a), list(atoms_b)
    # a replaced variable must not itself be the base of another replacement
    mapping = {w: f for w, f in mapping.items() if f.arg not in mapping}
    return ([subst_atom(a, mapping) for a in atoms_a],
            [subst_atom(a, mapping) for a in atoms_b])


def axiom_from_alignment(corr_edges, reach_edges, premise_graph, provenance=None):
    ante = [edge_to_atom(e) for e in sorted(corr_edges, key=Edge.key)]
    cons = [edge_to_atom(e) for e in sorted(reach_edges, key=Edge.key)]
    ante, cons = _refunctionalize(ante, cons, premise_graph)
    return make_axiom(ante, cons, provenance=provenance or Provenance(mode=PHRASE))


def _residual_groups(atoms):
    """Connected groups of atoms, linked through shared terms."""
    atoms = sorted(atoms, key=atom_key)
    groups = []
    for a in atoms:
        terms = {t for t in a.args if isinstance(t, (Var, Const))}
        hit = [g for g in groups if g[1] & terms]
        merged_atoms = [a]
        merged_terms = set(terms)
        for g in hit:
            merged_atoms += g[0]
            merged_terms |= g[1]
            groups.remove(g)
        groups.append((merged_atoms, merged_terms))
    return [sorted(g[0], key=atom_key) for g in groups]


def align(premise_graph, goal_graph, residual_atoms=(), config=DEFAULT_CONFIG,
          provenance=None, residual=True):
    """Partitions of non-unified goal variables plus residual groups, and
    one axiom for each that has a premise-side anchor."""
    result = AlignmentResult(partitions=[])
    covered = set()
    for v in sorted(goal_graph.non_unified, key=lambda v: (v.sort, v.index)):
        if v in covered:
            continue
        r = reach(v, goal_graph)
        covered |= {w for w in reach_vertices(r) if w in goal_graph.non_unified}
        covered.add(v)
        if not r:
            result.notes.append(f"NoAnchor: {v} has no phrase edges")
            continue
        c = corr(v, r, premise_graph, goal_graph)
        part = Partition(v, r, c)
        result.partitions.append(part)
        anchors = reach_vertices(r) & set(premise_graph.vertices)
        bare = {a for a in anchors if not any(a in e.terms() for e in c)}
        if not c or bare:
            result.notes.append(f"NoAnchor: phrase of {v} has no premise-side counterpart")
            continue
        result.axioms.append(axiom_from_alignment(c, r, premise_graph, provenance))
    if residual:
        for group in _residual_groups(residual_atoms):
            roles = [a for a in group if isinstance(a, Role)]
            if roles:
                result.notes.append(
                    "NoAnchor: unproved role link " + ", ".join(str(a) for a in roles))
                continue
            r = to_graph(group, config).edges
            c = corr(None, r, premise_graph, goal_graph)
            result.residual_groups.append((group, c))
            terms = reach_vertices(r)
            bare = {a for a in terms if not any(a in e.terms() for e in c)}
            if not c or bare:
                result.notes.append(
                    "NoAnchor: " + ", ".join(str(a) for a in group) + " has no premise-side counterpart")
                continue
            result.axioms.append(axiom_from_alignment(c, r, premise_graph, provenance))
    seen = set()
    uniq = []
    for ax in result.axioms:
        if not ax.consequent:
            # everything it would add is already in its antecedent
            continue
        if ax.key() not in seen:
            seen.add(ax.key())
            uniq.append(ax)
    result.axioms = uniq
    return result


def state_graphs(state, config=DEFAULT_CONFIG):
    """Premise and (substituted) goal graphs of a proof state."""
    premise_graph = to_graph(state.premises, config)
    goal_atoms = [subst_atom(g, state.subst) for g, _ in state.matched] + state.pending()
    goal_graph = to_graph(goal_atoms, config)
    goal_graph = goal_graph.with_partition(goal_graph.variables() - state.non_unified())
    return premise_graph, goal_graph


def residual_atoms(state):
    nu = state.non_unified()
    out = []
    for g in state.pending():
        vs = {t for t in g.args if isinstance(t, Var)}
        if not vs & nu:
            out.append(g)
    return out


def generate_phrase_axioms(state, premise_graph=None, goal_graph=None,
                           config=DEFAULT_CONFIG, provenance=None, residual=True):
    """Phrase axioms for a saturated proof state (see ``align``)."""
    if premise_graph is None or goal_graph is None:
        premise_graph, goal_graph = state_graphs(state, config)
    result = align(premise_graph, goal_graph, residual_atoms(state), config,
                   provenance, residual)
    result.unifier = dict(state.subst)
    return result


def reverse_alignment(state, text_vars, config=DEFAULT_CONFIG, provenance=None):
    """Align text-side goal atoms against hypothesis-side premise atoms.

    Used in contradiction proofs where the text ends up as the goal: the
    hypothesis material left uncovered by the unifier is spanned from its
    own unmatched variables, and its counterpart is read off the text.
    """
    inverse = {}
    for v, t in sorted(state.subst.items(), key=lambda kv: kv[0].name):
        if isinstance(t, Var):
            inverse.setdefault(t, v)
    source_atoms = [subst_atom(g, state.subst) for g, _ in state.matched] + state.pending()
    hyp_atoms = [p for p in state.premises
                 if any(isinstance(t, Var) and t not in text_vars for t in p.args)
                 and not any(isinstance(t, Var) and t in text_vars for t in p.args)]
    source_graph = to_graph(source_atoms, config)
    target_graph = to_graph(hyp_atoms, config)
    images = set(state.subst.values())
    target_graph = target_graph.with_partition(
        {v for v in target_graph.variables() if v in images})
    return align(source_graph, target_graph, (), config, provenance, residual=False)
