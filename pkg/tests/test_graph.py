import pytest

from conftest import random_pairs
from ndphrase.errors import EmptyGraph, FormatError, NormalizationError
from ndphrase.formula import (
    Eq,
    Func,
    Pred,
    Role,
    Var,
    decompose_basic,
    normalize,
    parse_formula,
)
from ndphrase.graph import (
    ISA,
    PREP,
    ROLE,
    Edge,
    EdgeLabel,
    ISA_LABEL,
    PredV,
    atom_to_edge,
    edge_to_atom,
    from_graph,
    from_text,
    is_acyclic,
    to_graph,
    to_text,
)
from ndphrase.search import oracle_entails

x1, x2, y1 = Var("x1"), Var("x2"), Var("y1")


def test_edge_mapping_three_cases():
    assert atom_to_edge(Pred("dog", (x1,))) == Edge(x1, ISA_LABEL, PredV("dog"))
    assert atom_to_edge(Pred("on", (y1, x1))) == Edge(y1, EdgeLabel(PREP, "on"), x1)
    assert atom_to_edge(Role("subj", y1, x1)) == Edge(y1, EdgeLabel(ROLE, "subj"), x1)
    for a in (Pred("dog", (x1,)), Pred("on", (y1, x1)), Role("subj", y1, x1)):
        assert edge_to_atom(atom_to_edge(a)) == a


def test_unnormalized_atoms_rejected():
    with pytest.raises(NormalizationError):
        atom_to_edge(Eq(x1, x2))
    with pytest.raises(NormalizationError):
        atom_to_edge(Pred("subj", (y1, x1)))


def test_running_example_graph():
    f = normalize(parse_formula(
        "exists x1 x2 y1 (lady(x1) & meat(x2) & cut(y1) & up(y1) & precisely(y1)"
        " & subj(y1)=x1 & obj(y1)=x2)"))
    g = to_graph(decompose_basic(f))
    assert len(g.edges) == 7
    assert g.non_unified == {x1, x2, y1} and not g.unified
    isa = {e.dst.name for e in g.edges if e.src == y1 and e.label.kind == ISA}
    assert isa == {"cut", "up", "precisely"}
    assert is_acyclic(g)


def test_functional_argument_becomes_role_target():
    g = to_graph([Pred("camera", (Func("obj", y1),)), Pred("burn", (y1,))])
    roles = [e for e in g.edges if e.label.kind == ROLE]
    assert len(roles) == 1
    target = roles[0].dst
    assert Edge(target, ISA_LABEL, PredV("camera")) in g.edges


def test_empty_graph():
    with pytest.raises(EmptyGraph):
        from_graph(to_graph([]))


def test_partition_snapshot():
    g = to_graph([Pred("dog", (x1,)), Pred("cat", (x2,))]).with_partition({x1})
    assert g.unified == {x1} and g.non_unified == {x2}


def test_text_export_round_trip():
    g = to_graph([Pred("dog", (x1,)), Pred("on", (y1, x1)), Role("subj", y1, x2)]).with_partition({x1})
    text = to_text(g)
    assert text.startswith("#semgraph v1\n")
    assert from_text(text) == g
    with pytest.raises(FormatError):
        from_text("edge x1 isa p:dog\n")


def test_graph_round_trip_equivalence_on_random_sets():
    # to_graph then from_graph yields a formula logically equivalent to the
    # original: each entails the other by the homomorphism oracle
    for p, _ in random_pairs(100, seed=7):
        back = decompose_basic(from_graph(to_graph(p)))
        assert oracle_entails(p, back) and oracle_entails(back, p)
