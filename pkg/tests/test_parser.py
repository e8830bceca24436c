from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from rplhorn.parser import (
    ParseError,
    parse_formula,
    parse_structure,
    parse_term,
    parse_theory,
    print_formula,
    print_structure,
    print_theory,
)
from rplhorn.syntax import (
    SIM,
    Atom,
    Const,
    Equiv,
    Exists,
    Fn,
    Forall,
    Implies,
    Not,
    Signature,
    StrongConj,
    Var,
    WeakConj,
    classify_horn,
)

SIG = Signature({"a": 0, "b": 0, "F": 2, "G": 1}, {"P": 1, "R": 2, "Q": 0}, similarity=True)
a = Fn("a")

EXAMPLES = [
    "(P(a),0.5)",
    "(P(a),0.6)&(R(a,x),0.3)",
    "(P(a),0.5)->(R(a,a),0.1)",
    "(P(a),0.6)&(R(a,x),0.3)->(P(x),0.8)",
    "forall x. (P(x),0.6) & (R(a,x),0.3)",
    "forall x. ((P(x),0.6)&(R(a,x),0.3)->(P(a),0.9))",
]


def test_evaluated_atom():
    assert parse_formula("(P(a),0.5)", SIG) == Implies(Const(F(1, 2)), Atom("P", (a,)))
    assert parse_formula("(P(a), 3/10)", SIG) == Implies(Const(F(3, 10)), Atom("P", (a,)))


def test_clause_five_ast():
    f = parse_formula(EXAMPLES[4], SIG)
    x = Var("x")
    assert f == Forall("x", StrongConj((
        Implies(Const(F(3, 5)), Atom("P", (x,))),
        Implies(Const(F(3, 10)), Atom("R", (a, x))),
    )))


@pytest.mark.parametrize("text", EXAMPLES)
def test_examples_round_trip(text):
    f = parse_formula(text, SIG)
    printed = print_formula(f)
    assert parse_formula(printed, SIG) == f
    assert print_formula(parse_formula(printed, SIG)) == printed
    assert classify_horn(f).is_horn


def test_canonical_printing():
    assert print_formula(parse_formula(EXAMPLES[5], SIG)) == \
        "forall x. (P(x), 3/5) & (R(a, x), 3/10) -> (P(a), 9/10)"
    assert print_formula(parse_formula("0.5 -> P(a)", SIG)) == "(P(a), 1/2)"


def test_nested_term_round_trip():
    t = parse_term("F(F(a,x),y)", SIG)
    assert t == Fn("F", (Fn("F", (a, Var("x"))), Var("y")))
    f = Atom("R", (t, Var("z")))
    assert parse_formula(print_formula(f), SIG) == f


def test_precedence():
    f = parse_formula("Q & Q /\\ Q -> Q <-> ~Q", SIG)
    q = Atom("Q")
    assert f == Equiv(Implies(WeakConj((StrongConj((q, q)), q)), q), Not(q))
    assert parse_formula("Q -> Q -> Q", SIG) == Implies(q, Implies(q, q))
    assert parse_formula("(Q & Q) & Q", SIG) == StrongConj((StrongConj((q, q)), q))
    assert parse_formula("Q & forall x. P(x) & Q", SIG) == \
        StrongConj((q, Forall("x", StrongConj((Atom("P", (Var("x"),)), q)))))
    assert parse_formula("a ~= G(b)", SIG) == Atom(SIM, (a, Fn("G", (Fn("b"),))))
    assert parse_formula("forall x y. R(x, y)", SIG) == \
        Forall("x", Forall("y", Atom("R", (Var("x"), Var("y")))))


@pytest.mark.parametrize("text, col", [
    ("P(a, a)", 1),        # arity
    ("P(c(a))", 3),        # undeclared function
    ("T(a)", 1),           # undeclared predicate
    ("(P(a), 1.5)", 8),    # degree out of range
    ("P(a) &", 7),         # dangling operator
    ("P(a) $ Q", 6),       # lexical
    ("F(a)", 1),           # function where predicate expected
    ("P(F(a))", 3),        # function arity
])
def test_errors_have_positions(text, col):
    with pytest.raises(ParseError) as info:
        parse_formula(text, SIG)
    assert info.value.line == 1 and info.value.column == col


def test_similarity_requires_declaration():
    with pytest.raises(ParseError):
        parse_formula("a ~= b", Signature({"a": 0, "b": 0}, {}))


# random ASTs -------------------------------------------------------------

variables = st.sampled_from(["x", "y", "z"])
terms = st.recursive(
    st.one_of(st.sampled_from([Fn("a"), Fn("b")]), variables.map(Var)),
    lambda sub: st.one_of(
        sub.map(lambda t: Fn("G", (t,))),
        st.tuples(sub, sub).map(lambda ts: Fn("F", ts)),
    ),
    max_leaves=4,
)
degrees = st.fractions(min_value=0, max_value=1, max_denominator=12)
atoms_ = st.one_of(
    st.just(Atom("Q")),
    terms.map(lambda t: Atom("P", (t,))),
    st.tuples(terms, terms).map(lambda ts: Atom("R", ts)),
    st.tuples(terms, terms).map(lambda ts: Atom(SIM, ts)),
    degrees.map(Const),
)
formulas = st.recursive(
    atoms_,
    lambda sub: st.one_of(
        sub.map(Not),
        st.lists(sub, min_size=2, max_size=3).map(lambda xs: StrongConj(tuple(xs))),
        st.lists(sub, min_size=2, max_size=3).map(lambda xs: WeakConj(tuple(xs))),
        st.tuples(sub, sub).map(lambda p: Implies(*p)),
        st.tuples(sub, sub).map(lambda p: Equiv(*p)),
        st.tuples(variables, sub).map(lambda p: Forall(*p)),
        st.tuples(variables, sub).map(lambda p: Exists(*p)),
    ),
    max_leaves=8,
)


@settings(max_examples=400, deadline=None)
@given(formulas)
def test_random_round_trip(f):
    text = print_formula(f)
    assert parse_formula(text, SIG) == f
    assert print_formula(parse_formula(text, SIG)) == text


# files -------------------------------------------------------------------

THEORY = """
# comment line
func a/0
pred P/1
pred R/2
clause c1: (P(a), 0.5)   # trailing comment
clause (P(a), 0.6) & (R(a, x), 0.3) -> (P(x), 0.8)
"""


def test_parse_theory():
    th = parse_theory(THEORY)
    assert th.signature.functions == {"a": 0}
    assert th.signature.predicates == {"P": 1, "R": 2}
    assert th.labels == ["c1", "c2"] and th.lines == [6, 7]
    again = parse_theory(print_theory(th))
    assert again.formulas == th.formulas and again.labels == th.labels


def test_theory_errors():
    with pytest.raises(ParseError) as info:
        parse_theory("pred P/1\nclause P(x, y)")
    assert (info.value.line, info.value.column) == (2, 8)
    with pytest.raises(ParseError) as info:
        parse_theory("pred P/1\nbogus line")
    assert info.value.line == 2 and info.value.column == 1
    with pytest.raises(ParseError):
        parse_theory("pred P/1\nfunc P/0")
    with pytest.raises(ParseError):
        parse_theory("func a/0\nclause (a ~= a, 1)")


def test_theory_sim_declaration():
    th = parse_theory("sim\nfunc a/0\nclause (a ~= a, 1)")
    assert th.signature.similarity
    assert th.formulas[0] == Implies(Const(F(1)), Atom(SIM, (a, a)))


STRUCT = """
domain a b
func c: () -> b
func G: (a) -> b
func G: (b) -> b
pred P: (a) = 0.4
pred R: (a, b) = 3/4
pred ~=: (a, b) = 0.5
pred ~=: (b, a) = 0.5
"""


def test_parse_structure():
    s = parse_structure(STRUCT).structure
    assert s.domain == ("a", "b")
    assert s.func("G", ("a",)) == "b" and s.func("c", ()) == "b"
    assert s.pred("P", ("a",)) == F(2, 5)
    assert s.pred("P", ("b",)) == 0
    assert s.pred("R", ("a", "b")) == F(3, 4)
    assert s.similarity("a", "a") == 1 and s.similarity("a", "b") == F(1, 2)
    again = parse_structure(print_structure(s)).structure
    assert again.predicates["P"] == s.predicates["P"]
    assert print_structure(again) == print_structure(s)


@pytest.mark.parametrize("text", [
    "domain a\nfunc G: (a) -> z",
    "domain a\npred P: (z) = 1",
    "domain a\npred P: (a) = 2",
    "domain a\nfunc G: (a) -> a\nfunc G: (a, a) -> a",
    "pred P: (a) = 1",
    "domain a a",
    "domain a b\nfunc G: (a) -> a",
    "domain a\nwhat",
])
def test_structure_errors(text):
    with pytest.raises(ParseError):
        parse_structure(text)


def test_structure_annotations():
    sf = parse_structure("domain a\nclass a b c\ndegree P(a) = 3/5\ndegree a ~= b = 1")
    assert sf.classes == {"a": ["a", "b", "c"]}
    assert sf.degrees == {"P(a)": F(3, 5), "a ~= b": 1}


def test_compound_elements():
    s = parse_structure("domain a F(a)\nfunc F: (a) -> F(a)\nfunc F: (F(a)) -> F(a)").structure
    assert s.func("F", ("F(a)",)) == "F(a)"
