import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from veristep.fol import (
    And,
    Atom,
    Const,
    DanglingQuantifier,
    Exists,
    ForAll,
    FormulaError,
    FormulaSyntaxError,
    Iff,
    Implies,
    LexError,
    Not,
    Or,
    UnsupportedTerm,
    Var,
    Xor,
    ast_equal,
    atom,
    collect_constants,
    free_variables,
    is_closed,
    parse_formula,
    print_formula,
)
from veristep.fol.formula import depth
from veristep.fol.generate import random_formula

P, Q, R = Atom("p", ()), Atom("q", ()), Atom("r", ())


@pytest.mark.parametrize(
    "text, expected",
    [
        ("p ∧ q ∨ r", Or(And(P, Q), R)),
        ("p ∨ q ∧ r", Or(P, And(Q, R))),
        ("p → q → r", Implies(P, Implies(Q, R))),
        ("p ↔ q ↔ r", Iff(P, Iff(Q, R))),
        ("p ⊕ q ⊕ r", Xor(Xor(P, Q), R)),
        ("p ∨ q ⊕ r", Xor(Or(P, Q), R)),
        ("p ⊕ q → r", Implies(Xor(P, Q), R)),
        ("p → q ↔ r", Iff(Implies(P, Q), R)),
        ("¬p ∧ q", And(Not(P), Q)),
        ("¬(p ∧ q)", Not(And(P, Q))),
        ("p ∧ q ∧ r", And(And(P, Q), R)),
    ],
)
def test_precedence_and_associativity(text, expected):
    assert parse_formula(text) == expected


def test_quantifier_scopes_to_the_right():
    x = Var("x")
    f = parse_formula("∀x, s x → t x")
    assert f == ForAll("x", Implies(Atom("s", (x,)), Atom("t", (x,))))
    g = parse_formula("p ∧ ∃y, s y ∨ q")
    assert g == And(P, Exists("y", Or(Atom("s", (Var("y"),)), Q)))


def test_application_styles_agree():
    a = parse_formula("mentors(Silas, Ada)")
    b = parse_formula("mentors Silas Ada")
    assert a == b == atom("mentors", "Silas", "Ada")


@pytest.mark.parametrize(
    "ascii_text, unicode_text",
    [
        ("~p & q | r", "¬p ∧ q ∨ r"),
        ("!p && q || r", "¬p ∧ q ∨ r"),
        ("p ^ q -> r <-> p", "p ⊕ q → r ↔ p"),
        ("p => q <=> r", "p → q ↔ r"),
        ("forall x, s x", "∀x, s x"),
        ("exists x. s x", "∃x, s x"),
    ],
)
def test_ascii_aliases(ascii_text, unicode_text):
    assert parse_formula(ascii_text) == parse_formula(unicode_text)


def test_variables_by_binding_not_case():
    f = parse_formula("∀X (likes X Bob)")
    assert f == ForAll("X", Atom("likes", (Var("X"), Const("Bob"))))
    g = parse_formula("likes x Bob")
    # unbound lowercase names are constants
    assert g.args[0] == Const("x")
    assert is_closed(g)


def test_multi_variable_binder():
    f = parse_formula("∀x y, u x y")
    assert f == ForAll("x", ForAll("y", Atom("u", (Var("x"), Var("y")))))


def test_juxtaposed_quantifier_body():
    f = parse_formula("∀x s x")
    assert f == ForAll("x", Atom("s", (Var("x"),)))


@pytest.mark.parametrize(
    "text, exc",
    [
        ("p ∧", FormulaSyntaxError),
        ("(p", FormulaSyntaxError),
        ("p q)", FormulaSyntaxError),
        ("p # q", LexError),
        ("∀x,", DanglingQuantifier),
        ("f(g(a))", UnsupportedTerm),
        ("", FormulaSyntaxError),
    ],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_formula(text)


def test_error_reports_position():
    with pytest.raises(FormulaError) as info:
        parse_formula("p ∧ # q")
    assert info.value.position == 4


def test_alpha_equivalence():
    a = parse_formula("∀x, s x → t x")
    b = parse_formula("∀y, s y → t y")
    c = parse_formula("∀y, s y → t A")
    assert ast_equal(a, b)
    assert not ast_equal(a, c)
    # shadowing: inner binder wins
    assert ast_equal(parse_formula("∀x ∃x, s x"), parse_formula("∀y ∃z, s z"))
    assert not ast_equal(parse_formula("∀x ∃y, u x y"), parse_formula("∀x ∃y, u y x"))


def test_free_variables_and_constants():
    f = ForAll("x", Atom("u", (Var("x"), Var("y"))))
    assert free_variables(f) == {"y"}
    assert not is_closed(f)
    assert collect_constants(parse_formula("u A B ∧ ∀x, s x")) == {"A", "B"}


def test_printer_canonical_forms():
    assert print_formula(parse_formula("¬(¬gains_community_respect(Hattie))")) == "¬(¬gains_community_respect Hattie)"
    assert print_formula(parse_formula("∀x (has_moral_courage x → stands_up_for_principles x)")) == (
        "∀ x, (has_moral_courage x → stands_up_for_principles x)"
    )
    assert print_formula(parse_formula("(p → q) → r")) == "(p → q) → r"
    assert print_formula(parse_formula("p → (q → r)")) == "p → q → r"
    assert print_formula(parse_formula("p ∧ (q ∧ r)")) == "p ∧ (q ∧ r)"


def test_round_trip_random_asts_deep():
    rng = random.Random(7)
    for _ in range(500):
        f = random_formula(rng, 8)
        assert depth(f) <= 9
        assert ast_equal(parse_formula(print_formula(f)), f)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), max_depth=st.integers(0, 8))
def test_round_trip_property(seed, max_depth):
    f = random_formula(random.Random(seed), max_depth)
    printed = print_formula(f)
    assert ast_equal(parse_formula(printed), f)
    # printing is a fixed point after one round trip
    assert print_formula(parse_formula(printed)) == printed


def test_corpus_formulas_parse(corpus_records):
    count = 0
    for rec in corpus_records:
        for text in [*rec.nl2fol.values(), rec.conclusion_fol]:
            parse_formula(text)
            count += 1
        assert rec.diagnostics == []
    assert count >= 30
