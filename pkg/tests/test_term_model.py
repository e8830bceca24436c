import itertools
import random
from fractions import Fraction as F

import pytest

from generators import random_signature, random_theory
from rplhorn.oracle import Grid, oracle_min_model
from rplhorn.parser import parse_formula, parse_structure, parse_theory
from rplhorn.semantics import (
    FiniteStructure,
    check_similarity_axioms,
    eval_formula,
    eval_term,
    is_model,
)
from rplhorn.syntax import SIM, Atom, Fn, Signature, Var
from rplhorn.term_model import (
    InconsistentTheory,
    NotHornError,
    PreconditionError,
    TermModelError,
    build_universe,
    free_homomorphism,
    ground_instances,
    horn_theory,
    least_fixpoint,
    render_term_structure,
    rule_violations,
    solve,
)

a, b, c = Fn("a"), Fn("b"), Fn("c")


def theory(text):
    th = parse_theory(text)
    return th.formulas, th.signature


def enumerate_terms(sig, d):
    """Independent enumeration: all terms, filtered by depth."""
    def terms_of(k):
        if k == 0:
            return {Fn(n) for n, ar in sig.functions.items() if ar == 0}
        smaller = terms_of(k - 1)
        out = set(smaller)
        for n, ar in sig.functions.items():
            if ar:
                out |= {Fn(n, args) for args in itertools.product(smaller, repeat=ar)}
        return out
    return terms_of(d)


def test_build_universe_examples():
    assert build_universe(Signature({"a": 0}), 5).terms == (a,)
    u = build_universe(Signature({"a": 0, "F": 1}), 2)
    assert u.terms == (a, Fn("F", (a,)), Fn("F", (Fn("F", (a,)),)))
    sig = Signature({"a": 0, "b": 0, "G": 2})
    u = build_universe(sig, 1)
    assert set(u.terms) == enumerate_terms(sig, 1)
    assert u.terms == (a, b) + tuple(Fn("G", p) for p in itertools.product((a, b), repeat=2))
    sig = Signature({"a": 0, "b": 0, "G": 2, "F": 1})
    for d in range(3):
        u = build_universe(sig, d)
        assert set(u.terms) == enumerate_terms(sig, d) and len(u.terms) == len(set(u.terms))
    with pytest.raises(TermModelError):
        build_universe(Signature({"F": 1}), 1)
    assert build_universe(Signature({"F": 1}), 1, generators=["x"]).terms == (Var("x"), Fn("F", (Var("x"),)))


def test_saturation():
    u = build_universe(Signature({"a": 0, "F": 1, "G": 2}), 1)
    Fa = Fn("F", (a,))
    assert u.normalize(Fn("F", (Fa,))) == Fa
    assert u.normalize(Fn("G", (a, Fa))) == Fa
    assert u.normalize(Fn("F", (Fn("F", (Fn("F", (a,)),)),))) == Fa


def test_ground_instances():
    forms, sig = theory("func a/0\npred P/1\npred R/2\n"
                        "clause forall x. ((P(x),0.6)&(R(a,x),0.3)->(P(a),0.9))")
    clauses, _ = horn_theory(forms)
    (rule,) = ground_instances(clauses, build_universe(sig, 2))
    assert rule.body == ((Atom("P", (a,)), F(3, 5)), (Atom("R", (a, a)), F(3, 10)))
    assert rule.head == (Atom("P", (a,)), F(9, 10))
    forms, sig = theory("func a/0\nfunc b/0\nfunc c/0\npred P/1\n"
                        "clause forall x. (P(x),0.5) & ((P(a),1) -> (P(x),0.2))")
    clauses, _ = horn_theory(forms)
    assert len(ground_instances(clauses, build_universe(sig, 0))) == 3 * 2
    forms, sig = theory("func a/0\npred P/1\nclause (P(a),0.5)")
    clauses, _ = horn_theory(forms)
    assert [r.head for r in ground_instances(clauses, build_universe(sig, 0))] == [(Atom("P", (a,)), F(1, 2))]


def degrees_by_name(deg):
    from rplhorn.parser import print_atom
    return {print_atom(k): v for k, v in deg.items()}


def test_fixpoint_chain_example_against_oracle():
    forms, sig = theory("func a/0\npred P/1\npred R/2\n"
                        "clause (P(a),0.6)\nclause (P(a),0.5)->(R(a,a),0.1)")
    sol = solve(forms, sig)
    assert degrees_by_name(sol.degrees) == {"P(a)": F(3, 5), "R(a, a)": F(1, 10)}
    assert oracle_min_model(sol.sentences, sol.universe, Grid(10)) == sol.degrees


def test_fixpoint_congruence_example_against_oracle():
    forms, sig = theory("func a/0\nfunc b/0\npred P/1\nsim\n"
                        "clause (a ~= b, 1)\nclause (P(a), 0.6)")
    sol = solve(forms, sig)
    assert sol.degrees[Atom("P", (b,))] == F(3, 5)
    # grid 1/5 carries every constant of the theory; 1/10 would take minutes
    assert oracle_min_model(sol.sentences, sol.universe, Grid(5)) == sol.degrees


def test_fixpoint_transitivity_example():
    forms, sig = theory("func a/0\nfunc b/0\nfunc c/0\nsim\n"
                        "clause (a ~= b, 0.8)\nclause (b ~= c, 0.7)")
    sol = solve(forms, sig)
    assert sol.degrees[Atom(SIM, (a, c))] == F(1, 2) == sol.degrees[Atom(SIM, (c, a))]
    # 11^9 grid maps are out of reach; certify instead: the map is a model and
    # lowering any positive off-diagonal similarity by 1/10 breaks a sentence or axiom
    s = sol.term_structure.structure
    assert is_model(s, sol.sentences) and check_similarity_axioms(s)
    for (d, e), r in s.predicates[SIM].items():
        if d == e or r == 0:
            continue
        lowered = {k: dict(v) for k, v in s.predicates.items()}
        lowered[SIM][(d, e)] = lowered[SIM][(e, d)] = r - F(1, 10)
        t = FiniteStructure(s.domain, s.functions, lowered, s.signature)
        assert not (is_model(t, sol.sentences) and check_similarity_axioms(t))


def test_body_at_zero_still_fires():
    # (P(a),0.5) -> (R(a),0.9) with P(a) = 0 still forces R(a) >= 0.9 * 0.5 = 0.4
    forms, sig = theory("func a/0\npred P/1\npred R/1\nclause (P(a),0.5) -> (R(a),0.9)")
    sol = solve(forms, sig)
    assert sol.degrees[Atom("R", (a,))] == F(2, 5)
    assert oracle_min_model(sol.sentences, sol.universe, Grid(10)) == sol.degrees


def test_weak_rules():
    forms, sig = theory("func a/0\npred P/1\npred Q/1\npred R/1\n"
                        "clause (P(a), 0.7)\nclause (Q(a), 0.6)\n"
                        "clause (P(a), 1) /\\ (Q(a), 1) -> (R(a), 1)")
    sol = solve(forms, sig, weak=True)
    assert sol.degrees[Atom("R", (a,))] == F(3, 5)
    strong = solve([forms[0], forms[1], parse_formula(
        "(P(a), 1) & (Q(a), 1) -> (R(a), 1)", sig)], sig)
    assert strong.degrees[Atom("R", (a,))] == F(3, 10)
    assert is_model(sol.term_structure.structure, sol.sentences)
    with pytest.raises(NotHornError):
        solve(forms, sig)


def test_inconsistent_and_non_horn():
    forms, sig = theory("func a/0\npred P/1\nclause (P(a), 1)\nclause (P(a), 1) -> (0, 1)")
    with pytest.raises(InconsistentTheory):
        solve(forms, sig)
    forms, sig = theory("func a/0\npred P/1\nclause ~P(a)")
    with pytest.raises(NotHornError):
        solve(forms, sig)


def test_quotient_examples():
    sig = Signature({"a": 0, "b": 0}, {"P": 1}, similarity=True)
    sol = solve([], sig)
    assert sol.term_structure.classes == [[a], [b]]
    s = sol.term_structure.structure
    assert s.pred("P", ("a",)) == 0 and s.similarity("a", "b") == 0
    forms, sig = theory("func a/0\nfunc b/0\nsim\nclause (a ~= b, 1)")
    assert solve(forms, sig).term_structure.classes == [[a, b]]
    forms, sig = theory("func a/0\nfunc b/0\nsim\nclause (a ~= b, 0.9)")
    ts = solve(forms, sig).term_structure
    assert ts.classes == [[a], [b]] and ts.structure.similarity("a", "b") == F(9, 10)


def test_quotient_with_functions_is_a_congruence():
    forms, sig = theory("func a/0\nfunc b/0\nfunc F/1\npred P/1\nsim\n"
                        "clause (a ~= b, 1)\nclause (P(F(a)), 0.4)\n"
                        "clause forall x. (P(x), 0.4) -> (P(F(x)), 0.9)")
    sol = solve(forms, sig, depth_bound=2)
    ts = sol.term_structure
    assert [str(m[0]) for m in ts.classes] == ["a", "F(a)", "F(F(a))"]
    assert ts.term_class(Fn("F", (b,))) == "F(a)"
    checks = sol.verify()
    assert all(checks.values()), checks
    assert not rule_violations(sol.degrees, sol.rules, sol.universe)


def test_lemma_terms():
    forms, sig = theory("func a/0\nfunc G/2\nfunc F/1\npred P/1\npred R/2\nsim\n"
                        "clause (P(F(a)), 0.7)\nclause (F(a) ~= G(a, a), 1)\n"
                        "clause forall x. (P(x), 0.5) -> (R(x, F(x)), 0.8)")
    sol = solve(forms, sig, depth_bound=1, generators=["x"])
    ts = sol.term_structure
    e = ts.canonical_evaluation
    assert e == {"x": ts.class_of[Var("x")]}
    # (i) every term, including ones deeper than the bound, evaluates to its class
    rng = random.Random(3)
    pool = list(sol.universe.terms)
    for _ in range(200):
        t = rng.choice(pool)
        for _ in range(rng.randint(0, 3)):
            t = rng.choice([Fn("F", (t,)), Fn("G", (t, rng.choice(pool)))])
        assert eval_term(ts.structure, e, t) == ts.term_class(t)
    # (iii) an evaluated ground atom holds in the term structure iff its degree is reached
    for atom, r in sol.degrees.items():
        for s in (F(0), r, min(r + F(1, 10), F(1)), F(1)):
            value = eval_formula(ts.structure, e, parse_formula(f"({_show(atom)}, {s})", sig))
            assert (value == 1) == (r >= s)


def _show(atom):
    from rplhorn.parser import print_atom
    return print_atom(atom)


def test_order_independence_and_closure():
    rng = random.Random(11)
    for _ in range(30):
        sig = random_signature(rng, max_consts=2)
        sig.functions["G"] = 1
        forms = random_theory(rng, sig, max_clauses=4)
        clauses, _ = horn_theory(forms)
        u = build_universe(sig, 1)
        rules = ground_instances(clauses, u)
        fifo = least_fixpoint(rules, u, "fifo")
        assert least_fixpoint(rules, u, "lifo") == fifo
        assert least_fixpoint(list(reversed(rules)), u, "fifo") == fifo
        assert rule_violations(fifo, rules, u) == []


def test_free_homomorphism_examples():
    forms, sig = theory("func a/0\npred P/1\nclause (P(a), 1)")
    sol = solve(forms, sig)
    n = parse_structure("domain e\nfunc a: () -> e\npred P: (e) = 1").structure
    fh = free_homomorphism(sol.term_structure, n, {}, sol.sentences)
    assert fh.mapping == {"a": "e"} and fh.homomorphism
    own = free_homomorphism(sol.term_structure, sol.term_structure.structure, {}, sol.sentences)
    assert own.mapping == {"a": "a"}
    weak = parse_structure("domain e\nfunc a: () -> e\npred P: (e) = 0.9").structure
    with pytest.raises(PreconditionError) as info:
        free_homomorphism(sol.term_structure, weak, {}, sol.sentences)
    assert info.value.check == "not-a-model"


def test_free_homomorphism_identity_with_generator():
    forms, sig = theory("func a/0\nfunc b/0\npred P/1\nsim\n"
                        "clause (a ~= b, 0.5)\nclause forall y. (P(y), 0.5)")
    sol = solve(forms, sig, generators=["x"])
    ts = sol.term_structure
    fh = free_homomorphism(ts, ts.structure, ts.canonical_evaluation, sol.sentences)
    assert fh.mapping == {name: name for name in ts.structure.domain}
    assert fh.homomorphism


def test_free_homomorphism_rejects_unreduced():
    forms, sig = theory("func a/0\nfunc b/0\npred P/1\nsim\nclause (P(a), 1)")
    sol = solve(forms, sig)
    n = parse_structure("domain e f\nsim\nfunc a: () -> e\nfunc b: () -> f\n"
                        "pred P: (e) = 1\npred P: (f) = 1\n"
                        "pred ~=: (e, f) = 1\npred ~=: (f, e) = 1").structure
    with pytest.raises(PreconditionError) as info:
        free_homomorphism(sol.term_structure, n, {}, sol.sentences)
    assert info.value.check == "not-reduced"


def test_render_round_trips_through_structure_parser():
    forms, sig = theory("func a/0\nfunc b/0\nfunc F/1\npred P/1\nsim\n"
                        "clause (a ~= b, 1)\nclause (P(F(a)), 0.4)")
    ts = solve(forms, sig, depth_bound=1).term_structure
    text = render_term_structure(ts)
    assert "class a b" in text and "degree P(F(a)) = 2/5" in text
    sf = parse_structure(text)
    assert sf.structure.domain == ts.structure.domain
    assert sf.structure.predicates["P"] == {k: v for k, v in ts.structure.predicates["P"].items() if v}
    assert sf.classes["a"] == ["a", "b"]
    assert render_term_structure(ts) == text
