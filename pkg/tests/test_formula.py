import pytest
from hypothesis import given, settings, strategies as st

from ndphrase.errors import (
    FormulaSyntaxError,
    NormalizationError,
    NotBasic,
    SortError,
    UnboundVariable,
)
from ndphrase.formula import (
    AtomSet,
    Const,
    Exists,
    Func,
    Not,
    Pred,
    Role,
    Var,
    decompose_basic,
    flatten_functional,
    FreshNames,
    is_basic,
    normalize,
    parse_formula,
    print_formula,
    recompose,
)

RUNNING_PREMISE = ("exists x1 x2 y1 (lady(x1) & meat(x2) & cut(y1) & up(y1) & precisely(y1)"
                   " & subj(y1)=x1 & obj(y1)=x2)")


def test_parse_print_round_trip_running_example():
    f = parse_formula(RUNNING_PREMISE)
    assert print_formula(f) == RUNNING_PREMISE
    assert parse_formula(print_formula(f)) == f


def test_role_equality_normalizes_to_role_atom():
    f = normalize(parse_formula("exists x1 y1 (run(y1) & subj(y1)=x1)"))
    atoms = decompose_basic(f).atoms
    assert Role("subj", Var("y1"), Var("x1")) in atoms
    # both orientations give the same atom
    g = normalize(parse_formula("exists x1 y1 (run(y1) & x1=subj(y1))"))
    assert decompose_basic(g).atoms == atoms


def test_role_written_as_predicate_is_normalized():
    f = normalize(parse_formula("exists x1 y1 (subj(y1,x1))"))
    assert decompose_basic(f).atoms == {Role("subj", Var("y1"), Var("x1"))}


def test_normalize_renames_bound_variables_in_binding_order():
    f = normalize(parse_formula("exists x9 (dog(x9))"))
    assert print_formula(f) == "exists x1 (dog(x1))"
    g = normalize(parse_formula("exists x4 y7 (dog(x4) & run(y7))"), start={"entity": 5, "event": 3})
    assert print_formula(g) == "exists x5 y3 (dog(x5) & run(y3))"


def test_constants_are_entities():
    f = parse_formula("exists y1 (run(y1) & subj(y1)=bob)")
    atoms = decompose_basic(normalize(f)).atoms
    assert Role("subj", Var("y1"), Const("bob")) in atoms


@pytest.mark.parametrize("text, error", [
    ("exists x1 (dog(x1)", FormulaSyntaxError),
    ("exists x1 (dog(x1) &)", FormulaSyntaxError),
    ("dog(x1)", UnboundVariable),
    ("exists z1 (dog(z1))", SortError),
    ("exists x1 (exists x1 (dog(x1)))", FormulaSyntaxError),
])
def test_malformed_input(text, error):
    with pytest.raises(error):
        parse_formula(text)


def test_syntax_error_carries_position():
    with pytest.raises(FormulaSyntaxError) as exc:
        parse_formula("exists x1 (dog(x1) & )")
    assert exc.value.pos is not None


@pytest.mark.parametrize("text", [
    "exists x1 x2 (subj(x1)=obj(x2))",
    "exists x1 x2 (x1=x2)",
])
def test_bad_equalities_rejected(text):
    with pytest.raises(NormalizationError):
        normalize(parse_formula(text))


def test_basic_fragment():
    assert is_basic(parse_formula(RUNNING_PREMISE))
    assert not is_basic(parse_formula("-exists x1 (dog(x1))"))
    with pytest.raises(NotBasic):
        decompose_basic(parse_formula("exists x1 (dog(x1) | cat(x1))"))


def test_decompose_recompose():
    f = normalize(parse_formula(RUNNING_PREMISE))
    atoms = decompose_basic(f)
    assert len(atoms) == 7
    assert decompose_basic(recompose(atoms)).atoms == atoms.atoms


def test_full_language_prints_and_parses():
    f = parse_formula("forall x1 (lady(x1) -> woman(x1))")
    assert parse_formula(print_formula(f)) == f
    g = parse_formula("-exists x1 y1 ((dog(x1) | cat(x1)) & run(y1) & subj(y1)=x1)")
    assert isinstance(g, Not) and isinstance(g.body, Exists)
    assert parse_formula(print_formula(g)) == g
    assert parse_formula("False") == parse_formula(print_formula(parse_formula("False")))


def test_functional_terms_flatten_to_role_targets():
    atoms = [Pred("camera", (Func("obj", Var("y1")),)), Role("obj", Var("y1"), Var("x2"))]
    flat, new = flatten_functional(atoms, FreshNames([Var("y1"), Var("x2")]))
    assert Pred("camera", (Var("x2"),)) in flat and not new
    flat, new = flatten_functional(atoms[:1], FreshNames([Var("y1")]))
    assert list(new) == [Var("x1")]
    assert Role("obj", Var("y1"), Var("x1")) in flat


# ---------------------------------------------------------------- properties

NAMES = st.sampled_from(["dog", "run", "cut", "blow_torch", "a1"])


@st.composite
def basic_formulas(draw):
    n_e = draw(st.integers(1, 3))
    n_v = draw(st.integers(0, 2))
    ents = [f"x{i}" for i in range(1, n_e + 1)]
    evs = [f"y{i}" for i in range(1, n_v + 1)]
    atoms = []
    for _ in range(draw(st.integers(1, 5))):
        kind = draw(st.integers(0, 2))
        if kind == 0 or not evs:
            atoms.append(f"{draw(NAMES)}({draw(st.sampled_from(ents + evs))})")
        elif kind == 1:
            atoms.append(f"{draw(st.sampled_from(['subj', 'obj']))}({draw(st.sampled_from(evs))})"
                         f"={draw(st.sampled_from(ents))}")
        else:
            atoms.append(f"on({draw(st.sampled_from(evs))},{draw(st.sampled_from(ents))})")
    return f"exists {' '.join(ents + evs)} ({' & '.join(atoms)})"


@settings(max_examples=200, deadline=None)
@given(basic_formulas())
def test_print_parse_identity(text):
    f = parse_formula(text)
    assert parse_formula(print_formula(f)) == f


@settings(max_examples=200, deadline=None)
@given(basic_formulas())
def test_normalize_is_idempotent(text):
    f = normalize(parse_formula(text))
    assert normalize(f) == f


@settings(max_examples=100, deadline=None)
@given(basic_formulas())
def test_atom_sets_are_order_independent(text):
    f = normalize(parse_formula(text))
    atoms = decompose_basic(f)
    assert isinstance(atoms, AtomSet)
    assert decompose_basic(recompose(atoms)).atoms == atoms.atoms
