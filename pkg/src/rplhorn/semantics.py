"""Evaluation over finite structures on the standard Łukasiewicz algebra.

Domains are finite, so the infimum and supremum in the quantifier clauses
are plain ``min`` and ``max``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from . import algebra as alg
from .algebra import ONE, ZERO
from .syntax import (
    SIM,
    Atom,
    Const,
    Equiv,
    Exists,
    Fn,
    Forall,
    Formula,
    Implies,
    Not,
    Signature,
    StrongConj,
    Term,
    Var,
    WeakConj,
    free_vars,
)

Element = Hashable
Valuation = Mapping[str, Element]


class EvaluationError(ValueError):
    pass


@dataclass
class FiniteStructure:
    """A finite domain with total function tables and fuzzy predicate tables.

    Missing predicate tuples read as degree 0, except for the similarity
    predicate whose missing tuples read as crisp identity.
    """

    domain: tuple[Element, ...]
    functions: dict[str, dict[tuple, Element]] = field(default_factory=dict)
    predicates: dict[str, dict[tuple, Fraction]] = field(default_factory=dict)
    signature: Signature = field(default_factory=Signature)

    def __post_init__(self) -> None:
        if not self.domain:
            raise EvaluationError("domain must be non-empty")
        self.domain = tuple(self.domain)
        members = set(self.domain)
        if len(members) != len(self.domain):
            raise EvaluationError("duplicate domain elements")
        for name, arity in self.signature.functions.items():
            table = self.functions.get(name, {})
            for args in itertools.product(self.domain, repeat=arity):
                if args not in table:
                    raise EvaluationError(f"function {name} undefined at {args}")
                if table[args] not in members:
                    raise EvaluationError(f"{name}{args} = {table[args]} not in domain")
        for name, table in self.predicates.items():
            for args, r in table.items():
                if not set(args) <= members:
                    raise EvaluationError(f"{name}{args} mentions unknown elements")
                if not (ZERO <= r <= ONE):
                    raise EvaluationError(f"{name}{args} = {r} outside [0, 1]")

    def pred(self, name: str, args: tuple) -> Fraction:
        table = self.predicates.get(name)
        if table is not None and args in table:
            return table[args]
        if name == SIM:
            return ONE if args[0] == args[1] else ZERO
        return ZERO

    def func(self, name: str, args: tuple) -> Element:
        try:
            return self.functions[name][args]
        except KeyError:
            raise EvaluationError(f"function {name} undefined at {args}") from None

    def similarity(self, d: Element, e: Element) -> Fraction:
        return self.pred(SIM, (d, e))


def eval_term(s: FiniteStructure, v: Valuation, t: Term) -> Element:
    if isinstance(t, Var):
        try:
            return v[t.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {t.name}") from None
    return s.func(t.name, tuple(eval_term(s, v, a) for a in t.args))


def eval_formula(s: FiniteStructure, v: Valuation, f: Formula) -> Fraction:
    if isinstance(f, Atom):
        return s.pred(f.pred, tuple(eval_term(s, v, t) for t in f.args))
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Implies):
        return alg.implication(eval_formula(s, v, f.left), eval_formula(s, v, f.right))
    if isinstance(f, StrongConj):
        return alg.strong_conj_all(eval_formula(s, v, g) for g in f.items)
    if isinstance(f, WeakConj):
        return min(eval_formula(s, v, g) for g in f.items)
    if isinstance(f, Not):
        return alg.negation(eval_formula(s, v, f.body))
    if isinstance(f, Equiv):
        return alg.biimplication(eval_formula(s, v, f.left), eval_formula(s, v, f.right))
    if isinstance(f, (Forall, Exists)):
        inner = dict(v)
        values = []
        for d in s.domain:
            inner[f.var] = d
            r = eval_formula(s, inner, f.body)
            # short-circuit at the lattice bound
            if isinstance(f, Forall) and r == ZERO or isinstance(f, Exists) and r == ONE:
                return r
            values.append(r)
        return min(values) if isinstance(f, Forall) else max(values)
    raise TypeError(f"not a formula: {f!r}")


def valuations(s: FiniteStructure, variables: Iterable[str]) -> Iterable[dict[str, Element]]:
    names = sorted(variables)
    for combo in itertools.product(s.domain, repeat=len(names)):
        yield dict(zip(names, combo))


def truth_value(s: FiniteStructure, f: Formula) -> Fraction:
    """Infimum of the value of *f* over every valuation of its free variables."""
    best = ONE
    for v in valuations(s, free_vars(f)):
        best = min(best, eval_formula(s, v, f))
        if best == ZERO:
            break
    return best


@dataclass
class ModelReport:
    ok: bool
    values: list[Fraction]
    # index of the first sentence whose value is below 1
    failing: Optional[int] = None

    def __bool__(self) -> bool:
        return self.ok


def is_model(s: FiniteStructure, theory: Sequence[Formula], stop_early: bool = False) -> ModelReport:
    values: list[Fraction] = []
    failing = None
    for i, f in enumerate(theory):
        r = truth_value(s, f)
        values.append(r)
        if r != ONE and failing is None:
            failing = i
            if stop_early:
                break
    return ModelReport(failing is None, values, failing)


@dataclass
class Violation:
    """First failing instance of a structural check."""

    check: str
    instance: tuple
    value: Fraction = ZERO
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.check} fails at {self.instance}"
        if self.detail:
            text += f": {self.detail}"
        return text


@dataclass
class CheckReport:
    ok: bool
    violation: Optional[Violation] = None

    def __bool__(self) -> bool:
        return self.ok


def similarity_axioms(sig: Signature) -> list[tuple[str, Formula]]:
    """The similarity and congruence axioms as sentences, labelled."""

    def sim(a: Term, b: Term) -> Atom:
        return Atom(SIM, (a, b))

    x, y, z = Var("x"), Var("y"), Var("z")
    out: list[tuple[str, Formula]] = [
        ("S1", Forall("x", sim(x, x))),
        ("S2", Forall("x", Forall("y", Implies(sim(x, y), sim(y, x))))),
        (
            "S3",
            Forall("x", Forall("y", Forall("z", Implies(
                StrongConj((sim(x, y), sim(y, z))), sim(x, z))))),
        ),
    ]

    def congruence(n: int, conclusion) -> Formula:
        xs = [Var(f"x{i}") for i in range(1, n + 1)]
        ys = [Var(f"y{i}") for i in range(1, n + 1)]
        hyps = [sim(a, b) for a, b in zip(xs, ys)]
        hyp = hyps[0] if n == 1 else StrongConj(tuple(hyps))
        f: Formula = Implies(hyp, conclusion(tuple(xs), tuple(ys)))
        for v in reversed(xs + ys):
            f = Forall(v.name, f)
        return f

    for name, n in sorted(sig.functions.items()):
        if n:
            out.append((f"C1[{name}]", congruence(n, lambda a, b, F=name: sim(Fn(F, a), Fn(F, b)))))
    for name, n in sorted(sig.all_predicates().items()):
        if n:
            out.append((
                f"C2[{name}]",
                congruence(n, lambda a, b, P=name: Equiv(Atom(P, a), Atom(P, b))),
            ))
    return out


def check_similarity_axioms(s: FiniteStructure) -> CheckReport:
    """Verify S1-S3, C1 and C2 instance by instance on the tables."""
    D = s.domain
    e = s.similarity
    for d in D:
        if e(d, d) != ONE:
            return CheckReport(False, Violation("S1", (d,), e(d, d)))
    for d, f in itertools.product(D, repeat=2):
        if e(d, f) > e(f, d):
            return CheckReport(False, Violation("S2", (d, f), alg.implication(e(d, f), e(f, d))))
    for d, f, g in itertools.product(D, repeat=3):
        lhs = alg.strong_conj(e(d, f), e(f, g))
        if lhs > e(d, g):
            return CheckReport(False, Violation("S3", (d, f, g), alg.implication(lhs, e(d, g))))
    for name, n in sorted(s.signature.functions.items()):
        if not n:
            continue
        for xs in itertools.product(D, repeat=n):
            for ys in itertools.product(D, repeat=n):
                hyp = alg.strong_conj_all(e(a, b) for a, b in zip(xs, ys))
                concl = e(s.func(name, xs), s.func(name, ys))
                if hyp > concl:
                    return CheckReport(False, Violation(
                        f"C1[{name}]", (xs, ys), alg.implication(hyp, concl)))
    for name, n in sorted(s.signature.all_predicates().items()):
        if not n:
            continue
        for xs in itertools.product(D, repeat=n):
            px = s.pred(name, xs)
            for ys in itertools.product(D, repeat=n):
                hyp = alg.strong_conj_all(e(a, b) for a, b in zip(xs, ys))
                concl = alg.biimplication(px, s.pred(name, ys))
                if hyp > concl:
                    return CheckReport(False, Violation(
                        f"C2[{name}]", (xs, ys), alg.implication(hyp, concl)))
    return CheckReport(True)


def is_reduced(s: FiniteStructure) -> CheckReport:
    """Equality property: similarity degree 1 exactly on the diagonal."""
    for d, f in itertools.product(s.domain, repeat=2):
        if (s.similarity(d, f) == ONE) != (d == f):
            return CheckReport(False, Violation("EQP", (d, f), s.similarity(d, f)))
    return CheckReport(True)


def check_homomorphism(
    g: Mapping[Element, Element],
    s1: FiniteStructure,
    s2: FiniteStructure,
    exempt: Iterable[tuple[str, tuple]] = (),
) -> CheckReport:
    """Check function commutation (1) and preservation of degree-1 atoms (2).

    *exempt* lists ``(function, argument tuple)`` pairs skipped in (1).
    """
    skip = set(exempt)
    for d in s1.domain:
        if d not in g:
            return CheckReport(False, Violation("total", (d,), detail="map undefined"))
        if g[d] not in s2.domain:
            return CheckReport(False, Violation("total", (d,), detail=f"{g[d]} not in target"))
    for name, n in sorted(s1.signature.functions.items()):
        for args in itertools.product(s1.domain, repeat=n):
            if (name, args) in skip:
                continue
            lhs = g[s1.func(name, args)]
            rhs = s2.func(name, tuple(g[a] for a in args))
            if lhs != rhs:
                return CheckReport(False, Violation(
                    "(1)", (name, args), detail=f"g({name}{args}) = {lhs} but {name}(g...) = {rhs}"))
    for name, n in sorted(s1.signature.all_predicates().items()):
        for args in itertools.product(s1.domain, repeat=n):
            if s1.pred(name, args) == ONE:
                image = tuple(g[a] for a in args)
                r = s2.pred(name, image)
                if r != ONE:
                    return CheckReport(False, Violation(
                        "(2)", (name, args), r, detail=f"image {name}{image} has degree {r}"))
    return CheckReport(True)
