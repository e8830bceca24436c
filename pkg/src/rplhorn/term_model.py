"""Term structure of a Horn theory.

The theory is grounded over a depth-bounded Herbrand universe and atom
degrees are computed as the least fixpoint of the clause rules together with
the similarity and congruence closure rules.  Ground terms are then
quotiented by "similar to degree 1".

Clause rule.  A ground basic clause ``(a1,r1) & ... & (an,rn) -> (b,s)`` has
value 1 iff ``B <= s -> deg(b)`` with ``B = (r1 -> deg(a1)) * ... *
(rn -> deg(an))``, and by residuation iff ``s * B <= deg(b)`` (``*`` the
Łukasiewicz t-norm).  The least degree of ``b`` satisfying the clause is
therefore ``s * B``.  All rules are monotone and map multiples of ``1/D``
to multiples of ``1/D``, so chaotic iteration terminates on the finite
lattice and its result does not depend on the order rules fire in.

Depth truncation.  A composition ``F(t1..tn)`` deeper than the bound is
replaced by its leftmost argument of maximal depth, so every function is
total on the finite universe.  Grounding, the congruence rule and the
quotient's function tables all go through the same normalisation.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from . import algebra as alg
from .algebra import ONE, ZERO
from .semantics import (
    CheckReport,
    FiniteStructure,
    check_homomorphism,
    check_similarity_axioms,
    eval_term,
    is_model,
    is_reduced,
)
from .syntax import (
    SIM,
    Atom,
    Const,
    Fn,
    Formula,
    HornClause,
    Signature,
    Term,
    Var,
    classify_horn,
    constants_in,
    depth,
    free_vars,
    instantiate,
    universal_closure,
)


class TermModelError(ValueError):
    pass


class InconsistentTheory(TermModelError):
    pass


class QuotientError(TermModelError):
    """Representatives of one class disagree; the degree map is not closed."""


class PreconditionError(TermModelError):
    def __init__(self, check: str, detail: str):
        super().__init__(f"{check}: {detail}")
        self.check, self.detail = check, detail


# -- Herbrand universe ------------------------------------------------------


@dataclass
class HerbrandUniverse:
    depth: int
    terms: tuple[Term, ...]
    signature: Signature
    index: dict[Term, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.index = {t: i for i, t in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __contains__(self, t: object) -> bool:
        return t in self.index

    def compose(self, name: str, args: tuple[Term, ...]) -> Term:
        """``name(args)`` for arguments already in the universe, saturated."""
        t = Fn(name, args)
        if t in self.index:
            return t
        deepest = max(depth(a) for a in args)
        return next(a for a in args if depth(a) == deepest)

    def normalize(self, t: Term) -> Term:
        if isinstance(t, Var):
            if t not in self.index:
                raise TermModelError(f"variable {t.name} is not a generator of the universe")
            return t
        return self.compose(t.name, tuple(self.normalize(a) for a in t.args))

    def overflows(self, name: str, args: tuple[Term, ...]) -> bool:
        return Fn(name, args) not in self.index


def build_universe(
    signature: Signature, depth_bound: int = 2, generators: Sequence[str] = ()
) -> HerbrandUniverse:
    """Ground terms of depth at most *depth_bound*, shallowest first.

    *generators* adds variables as extra depth-0 terms; they play the role of
    the free generators of the term structure.
    """
    if depth_bound < 0:
        raise TermModelError("depth bound must be non-negative")
    level0: list[Term] = [Fn(c) for c in signature.constants]
    level0 += [Var(g) for g in generators]
    if not level0:
        raise TermModelError("signature has no individual constants; inject one")
    terms = list(level0)
    prev_max = list(level0)  # terms of exactly the previous depth
    funcs = sorted((n, k) for n, k in signature.functions.items() if k > 0)
    for _ in range(depth_bound):
        fresh: list[Term] = []
        newest = set(prev_max)
        for name, k in funcs:
            for args in itertools.product(terms, repeat=k):
                if any(a in newest for a in args):
                    fresh.append(Fn(name, args))
        if not fresh:
            break
        terms += fresh
        prev_max = fresh
    return HerbrandUniverse(depth_bound, tuple(terms), signature)


def herbrand_base(u: HerbrandUniverse) -> list[Atom]:
    out = []
    for name, k in sorted(u.signature.all_predicates().items()):
        for args in itertools.product(u.terms, repeat=k):
            out.append(Atom(name, args))
    return out


# -- grounding --------------------------------------------------------------

GroundAtom = Union[Atom, Const]


@dataclass(frozen=True)
class GroundRule:
    body: tuple[tuple[GroundAtom, Fraction], ...]
    head: tuple[GroundAtom, Fraction]
    # weak rules combine the body with min instead of the t-norm
    weak: bool = False


def _ground_atom(a: GroundAtom, u: HerbrandUniverse) -> GroundAtom:
    if isinstance(a, Const):
        return a
    return Atom(a.pred, tuple(u.normalize(t) for t in a.args))


def ground_instances(theory: Iterable[HornClause], u: HerbrandUniverse) -> list[GroundRule]:
    """Every basic conjunct of every clause under every assignment of the prefix."""
    rules: dict[GroundRule, None] = {}
    for clause in theory:
        matrix = clause.matrix
        loose = free_vars(matrix) - set(clause.prefix) - {t.name for t in u if isinstance(t, Var)}
        if loose:
            raise TermModelError(f"clause has free variables {sorted(loose)}; close it first")
        for combo in itertools.product(u.terms, repeat=len(clause.prefix)):
            sigma = dict(zip(clause.prefix, combo))
            for basic in clause.conjuncts:
                body = []
                for ev in basic.body:
                    atom = instantiate(ev.atom, sigma) if isinstance(ev.atom, Atom) else ev.atom
                    body.append((_ground_atom(atom, u), ev.degree))
                h = basic.head
                head_atom = instantiate(h.atom, sigma) if isinstance(h.atom, Atom) else h.atom
                head = (_ground_atom(head_atom, u), h.degree)
                rules[GroundRule(tuple(body), head, clause.weak)] = None
    return list(rules)


# -- fixpoint ---------------------------------------------------------------

DegreeMap = dict[Atom, Fraction]


def _rule_bound(rule: GroundRule, deg: Mapping[Atom, Fraction]) -> Fraction:
    premises = (
        alg.implication(r, atom.value if isinstance(atom, Const) else deg[atom])
        for atom, r in rule.body
    )
    if rule.weak:
        return alg.strong_conj(rule.head[1], min(premises, default=ONE))
    return alg.strong_conj_all(itertools.chain((rule.head[1],), premises))


class _Engine:
    def __init__(self, rules: Sequence[GroundRule], u: HerbrandUniverse, order: str):
        self.u = u
        self.sig = u.signature
        self.rules = list(rules)
        self.lifo = order == "lifo"
        if order not in ("fifo", "lifo"):
            raise ValueError(f"unknown order {order!r}")
        self.deg: DegreeMap = {a: ZERO for a in herbrand_base(u)}
        self.by_body: dict[Atom, list[int]] = {}
        for i, rule in enumerate(self.rules):
            for atom, _ in rule.body:
                if isinstance(atom, Atom):
                    self.by_body.setdefault(atom, []).append(i)
        self.queue: deque[Atom] = deque()
        self.queued: set[Atom] = set()
        self.functions = sorted((n, k) for n, k in self.sig.functions.items() if k > 0)
        self.predicates = sorted((n, k) for n, k in self.sig.predicates.items() if k > 0)

    def raise_to(self, atom: Atom, value: Fraction) -> None:
        if value > self.deg[atom]:
            self.deg[atom] = value
            if atom not in self.queued:
                self.queued.add(atom)
                self.queue.append(atom)

    def fire(self, i: int) -> None:
        rule = self.rules[i]
        bound = _rule_bound(rule, self.deg)
        head, _ = rule.head
        if isinstance(head, Const):
            if bound > head.value:
                raise InconsistentTheory(f"a clause forces the constant {head.value} to degree {bound}")
            return
        self.raise_to(head, bound)

    def sim(self, a: Term, b: Term) -> Fraction:
        return self.deg[Atom(SIM, (a, b))]

    def pairs_product(self, n: int):
        """All n-tuples of (p, q) pairs with positive similarity, with their t-norm."""
        pairs = [
            (p, q, self.sim(p, q))
            for p in self.u.terms for q in self.u.terms
            if self.sim(p, q) > ZERO
        ]
        for combo in itertools.product(pairs, repeat=n):
            weight = alg.strong_conj_all(w for _, _, w in combo)
            if weight > ZERO:
                yield tuple(p for p, _, _ in combo), tuple(q for _, q, _ in combo), weight

    def on_similarity(self, t: Term, s: Term) -> None:
        d = self.sim(t, s)
        self.raise_to(Atom(SIM, (s, t)), d)
        for w in self.u.terms:
            self.raise_to(Atom(SIM, (t, w)), alg.strong_conj(d, self.sim(s, w)))
            self.raise_to(Atom(SIM, (w, s)), alg.strong_conj(self.sim(w, t), d))
        for name, k in self.functions:
            for i in range(k):
                for ps, qs, weight in self.pairs_product(k - 1):
                    p = ps[:i] + (t,) + ps[i:]
                    q = qs[:i] + (s,) + qs[i:]
                    self.raise_to(
                        Atom(SIM, (self.u.compose(name, p), self.u.compose(name, q))),
                        alg.strong_conj(d, weight),
                    )
        for name, k in self.predicates:
            for i in range(k):
                for ps, qs, weight in self.pairs_product(k - 1):
                    p = ps[:i] + (t,) + ps[i:]
                    q = qs[:i] + (s,) + qs[i:]
                    src = self.deg[Atom(name, p)]
                    self.raise_to(Atom(name, q), alg.strong_conj_all((src, d, weight)))

    def on_predicate(self, atom: Atom) -> None:
        d = self.deg[atom]
        choices = []
        for p in atom.args:
            choices.append([(q, self.sim(p, q)) for q in self.u.terms if self.sim(p, q) > ZERO])
        for combo in itertools.product(*choices):
            value = alg.strong_conj_all([d] + [w for _, w in combo])
            self.raise_to(Atom(atom.pred, tuple(q for q, _ in combo)), value)

    def run(self) -> DegreeMap:
        if self.sig.similarity:
            for t in self.u.terms:
                self.raise_to(Atom(SIM, (t, t)), ONE)
        for i in range(len(self.rules)):
            self.fire(i)
        while self.queue:
            atom = self.queue.pop() if self.lifo else self.queue.popleft()
            self.queued.discard(atom)
            for i in self.by_body.get(atom, ()):
                self.fire(i)
            if not self.sig.similarity:
                continue
            if atom.pred == SIM:
                self.on_similarity(*atom.args)
            elif atom.args:
                self.on_predicate(atom)
        return self.deg


def least_fixpoint(
    rules: Sequence[GroundRule], u: HerbrandUniverse, order: str = "fifo"
) -> DegreeMap:
    """Least degree map closed under the clause, similarity and congruence rules.

    *order* picks the worklist discipline (``"fifo"`` or ``"lifo"``); the
    result is the same either way.
    """
    return _Engine(rules, u, order).run()


def rule_violations(deg: Mapping[Atom, Fraction], rules: Sequence[GroundRule],
                    u: HerbrandUniverse) -> list[tuple[str, Atom, Fraction]]:
    """Instances where re-applying a rule would raise a degree.

    Brute force over every rule instance, written separately from the
    worklist engine so it can audit it.
    """
    out: list[tuple[str, Atom, Fraction]] = []

    def need(kind: str, atom: Atom, value: Fraction) -> None:
        if value > deg[atom]:
            out.append((kind, atom, value))

    for rule in rules:
        head = rule.head[0]
        bound = _rule_bound(rule, deg)
        if isinstance(head, Const):
            if bound > head.value:
                out.append(("clause", Atom("<const>"), bound))
        else:
            need("clause", head, bound)
    sig = u.signature
    if not sig.similarity:
        return out
    T = u.terms

    def e(a: Term, b: Term) -> Fraction:
        return deg[Atom(SIM, (a, b))]

    for t in T:
        need("S1", Atom(SIM, (t, t)), ONE)
    for t, s in itertools.product(T, repeat=2):
        need("S2", Atom(SIM, (s, t)), e(t, s))
    for t, s, w in itertools.product(T, repeat=3):
        need("S3", Atom(SIM, (t, w)), alg.strong_conj(e(t, s), e(s, w)))
    for name, k in sorted(sig.functions.items()):
        if not k:
            continue
        for ps in itertools.product(T, repeat=k):
            for qs in itertools.product(T, repeat=k):
                hyp = alg.strong_conj_all(e(p, q) for p, q in zip(ps, qs))
                need("C1", Atom(SIM, (u.compose(name, ps), u.compose(name, qs))), hyp)
    for name, k in sorted(sig.predicates.items()):
        if not k:
            continue
        for ps in itertools.product(T, repeat=k):
            for qs in itertools.product(T, repeat=k):
                hyp = alg.strong_conj_all(e(p, q) for p, q in zip(ps, qs))
                need("C2", Atom(name, qs), alg.strong_conj(deg[Atom(name, ps)], hyp))
    return out


# -- quotient ---------------------------------------------------------------


@dataclass
class TermStructure:
    universe: HerbrandUniverse
    degrees: DegreeMap
    classes: list[list[Term]]
    class_of: dict[Term, str]
    structure: FiniteStructure
    canonical_evaluation: dict[str, str]
    # (function, class tuple) pairs whose representative composition saturated
    boundary: frozenset = frozenset()

    def representative(self, name: str) -> Term:
        return self.classes[self.structure.domain.index(name)][0]

    def members(self, name: str) -> list[Term]:
        return self.classes[self.structure.domain.index(name)]

    def term_class(self, t: Term) -> str:
        return self.class_of[self.universe.normalize(t)]


def _find(parent: dict[Term, Term], t: Term) -> Term:
    root = t
    while parent[root] != root:
        root = parent[root]
    while parent[t] != root:
        parent[t], t = root, parent[t]
    return root


def quotient(deg: Mapping[Atom, Fraction], u: HerbrandUniverse) -> TermStructure:
    sig = u.signature
    parent = {t: t for t in u.terms}
    if sig.similarity:
        for t, s in itertools.product(u.terms, repeat=2):
            if deg[Atom(SIM, (t, s))] == ONE:
                a, b = _find(parent, t), _find(parent, s)
                if a != b:
                    # keep the earliest term as root so representatives are stable
                    if u.index[a] < u.index[b]:
                        parent[b] = a
                    else:
                        parent[a] = b
    groups: dict[Term, list[Term]] = {}
    for t in u.terms:
        groups.setdefault(_find(parent, t), []).append(t)
    classes = list(groups.values())
    names = [str(c[0]) for c in classes]
    class_of = {t: name for name, c in zip(names, classes) for t in c}
    reps = {name: c[0] for name, c in zip(names, classes)}

    functions: dict[str, dict[tuple, str]] = {}
    boundary = set()
    for name, k in sorted(sig.functions.items()):
        table = {}
        for cls in itertools.product(names, repeat=k):
            args = tuple(reps[c] for c in cls)
            table[cls] = class_of[u.compose(name, args)]
            if k and u.overflows(name, args):
                boundary.add((name, cls))
        for args in itertools.product(u.terms, repeat=k):
            cls = tuple(class_of[a] for a in args)
            if class_of[u.compose(name, args)] != table[cls]:
                raise QuotientError(f"{name} is not compatible with the classes at {args}")
        functions[name] = table

    predicates: dict[str, dict[tuple, Fraction]] = {}
    for name, k in sorted(sig.all_predicates().items()):
        table = {}
        for args in itertools.product(u.terms, repeat=k):
            cls = tuple(class_of[a] for a in args)
            value = deg[Atom(name, args)]
            if cls in table and table[cls] != value:
                raise QuotientError(f"degree of {name}{args} differs within its class")
            table[cls] = value
        predicates[name] = table

    qsig = Signature(dict(sig.functions), dict(sig.predicates), sig.similarity)
    structure = FiniteStructure(tuple(names), functions, predicates, qsig)
    canonical = {t.name: class_of[t] for t in u.terms if isinstance(t, Var)}
    return TermStructure(u, dict(deg), classes, class_of, structure, canonical, frozenset(boundary))


# -- free homomorphism ------------------------------------------------------


@dataclass
class FreeHomomorphism:
    mapping: dict[str, object]
    homomorphism: CheckReport
    # function compositions skipped in condition (1) because of depth truncation
    exempt: frozenset = frozenset()


def free_homomorphism(
    t: TermStructure,
    n: FiniteStructure,
    v: Mapping[str, object],
    theory: Sequence[Formula] = (),
    check_preconditions: bool = True,
) -> FreeHomomorphism:
    """The map sending the class of a term to its value in *n* under *v*."""
    for name, k in t.universe.signature.functions.items():
        if n.signature.functions.get(name) != k:
            raise PreconditionError("signature", f"target does not interpret {name}/{k}")
    if check_preconditions:
        report = is_model(n, theory, stop_early=True)
        if not report:
            i = report.failing
            raise PreconditionError(
                "not-a-model", f"sentence {i + 1} has value {report.values[i]}")
        red = is_reduced(n)
        if not red:
            raise PreconditionError("not-reduced", str(red.violation))
        if n.signature.similarity:
            sim = check_similarity_axioms(n)
            if not sim:
                raise PreconditionError("similarity", str(sim.violation))
    missing = set(t.canonical_evaluation) - set(v)
    if missing:
        raise PreconditionError("valuation", f"no value for generators {sorted(missing)}")
    mapping: dict[str, object] = {}
    for name in t.structure.domain:
        values = {eval_term(n, v, m) for m in t.members(name)}
        if len(values) != 1:
            raise PreconditionError(
                "not-reduced", f"class {name} is sent to several elements {sorted(map(str, values))}")
        mapping[name] = values.pop()
    hom = check_homomorphism(mapping, t.structure, n, exempt=t.boundary)
    return FreeHomomorphism(mapping, hom, t.boundary)


# -- end to end -------------------------------------------------------------


@dataclass
class Solution:
    clauses: list[HornClause]
    closed: list[Optional[list[str]]]
    universe: HerbrandUniverse
    rules: list[GroundRule]
    degrees: DegreeMap
    term_structure: TermStructure
    grid: int

    @property
    def sentences(self) -> list[Formula]:
        return [c.to_formula() for c in self.clauses]

    def verify(self) -> dict[str, object]:
        s = self.term_structure.structure
        return {
            "model": is_model(s, self.sentences),
            "reduced": is_reduced(s),
            "similarity": check_similarity_axioms(s),
        }


class NotHornError(TermModelError):
    def __init__(self, index: int, classification):
        super().__init__(
            f"formula {index + 1} is not a Horn clause: {classification.reason}")
        self.index, self.classification = index, classification


def horn_theory(
    formulas: Sequence[Formula], weak: bool = False
) -> tuple[list[HornClause], list[Optional[list[str]]]]:
    """Close open formulas universally and validate them as Horn clauses."""
    clauses, closed = [], []
    for i, f in enumerate(formulas):
        loose = free_vars(f)
        c = classify_horn(universal_closure(f), weak)
        if not c.is_horn:
            raise NotHornError(i, c)
        clauses.append(c.clause)
        closed.append(sorted(loose) if loose else None)
    return clauses, closed


def theory_grid(formulas: Iterable[Formula]) -> int:
    return alg.common_denominator(r for f in formulas for r in constants_in(f))


def solve(
    formulas: Sequence[Formula],
    signature: Signature,
    depth_bound: int = 2,
    generators: Sequence[str] = (),
    weak: bool = False,
    order: str = "fifo",
) -> Solution:
    clauses, closed = horn_theory(formulas, weak)
    u = build_universe(signature, depth_bound, generators)
    rules = ground_instances(clauses, u)
    deg = least_fixpoint(rules, u, order)
    ts = quotient(deg, u)
    return Solution(clauses, closed, u, rules, deg, ts, theory_grid(formulas))


def render_term_structure(ts: TermStructure) -> str:
    """Structure-file text plus ``class`` and ``degree`` listings."""
    from .parser import print_atom, print_structure
    from .algebra import format_degree

    lines = [print_structure(ts.structure).rstrip("\n")]
    for members in ts.classes:
        lines.append("class " + " ".join(map(str, members)))
    u = ts.universe
    ordered = sorted(ts.degrees, key=lambda a: (a.pred, [u.index[t] for t in a.args]))
    for atom in ordered:
        lines.append(f"degree {print_atom(atom)} = {format_degree(ts.degrees[atom])}")
    return "\n".join(lines) + "\n"
