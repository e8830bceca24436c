"""Terms, formulas, signatures and the Horn-clause views over them."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Union

from .algebra import ONE, ZERO

SIM = "~="


class FormulaError(ValueError):
    """Malformed AST (arity mismatch, bad substitution, ...)."""


# -- terms ------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Fn:
    """Function application; a constant is ``Fn(name, ())``."""

    name: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(map(str, self.args))})"


Term = Union[Var, Fn]


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def is_ground(t: Term) -> bool:
    return not term_vars(t)


def depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(depth(a) for a in t.args)


def subst_term(t: Term, sigma: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if not t.args:
        return t
    return Fn(t.name, tuple(subst_term(a, sigma) for a in t.args))


# -- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class StrongConj:
    items: tuple["Formula", ...]


@dataclass(frozen=True)
class WeakConj:
    items: tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Equiv:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Const, Atom, Not, StrongConj, WeakConj, Implies, Equiv, Forall, Exists]


def evaluated(body: Formula, degree: Fraction) -> Implies:
    """The evaluated formula ``(body, degree)``, i.e. ``degree -> body``."""
    return Implies(Const(Fraction(degree)), body)


def is_atomic(f: Formula) -> bool:
    return isinstance(f, (Atom, Const))


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Const, Atom)):
        return ()
    if isinstance(f, (Not, Forall, Exists)):
        return (f.body,)
    if isinstance(f, (StrongConj, WeakConj)):
        return f.items
    return (f.left, f.right)


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    for c in children(f):
        yield from subformulas(c)


def atoms(f: Formula) -> Iterator[Atom]:
    return (g for g in subformulas(f) if isinstance(g, Atom))


def constants_in(f: Formula) -> Iterator[Fraction]:
    return (g.value for g in subformulas(f) if isinstance(g, Const))


def rank(f: Formula) -> int:
    if isinstance(f, (Const, Atom)):
        return 0
    if isinstance(f, (Not, Forall, Exists)):
        return rank(f.body) + 1
    return sum(rank(c) for c in children(f))


def free_vars(f: Formula) -> set[str]:
    if isinstance(f, Const):
        return set()
    if isinstance(f, Atom):
        out: set[str] = set()
        for t in f.args:
            out |= term_vars(t)
        return out
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body) - {f.var}
    out = set()
    for c in children(f):
        out |= free_vars(c)
    return out


def bound_vars(f: Formula) -> set[str]:
    return {g.var for g in subformulas(f) if isinstance(g, (Forall, Exists))}


def universal_closure(f: Formula) -> Formula:
    for v in sorted(free_vars(f), reverse=True):
        f = Forall(v, f)
    return f


def _rebuild(f: Formula, kids: list[Formula]) -> Formula:
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, Forall):
        return Forall(f.var, kids[0])
    if isinstance(f, Exists):
        return Exists(f.var, kids[0])
    if isinstance(f, StrongConj):
        return StrongConj(tuple(kids))
    if isinstance(f, WeakConj):
        return WeakConj(tuple(kids))
    if isinstance(f, Implies):
        return Implies(*kids)
    return Equiv(*kids)


def instantiate(f: Formula, sigma: Mapping[str, Term]) -> Formula:
    """Replace free occurrences of variables; no capture check.

    Only safe when no term in *sigma* contains a variable bound in *f*.
    """
    if isinstance(f, Const):
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(subst_term(t, sigma) for t in f.args))
    if isinstance(f, (Forall, Exists)) and f.var in sigma:
        inner = {k: v for k, v in sigma.items() if k != f.var}
        return _rebuild(f, [instantiate(f.body, inner)])
    return _rebuild(f, [instantiate(c, sigma) for c in children(f)])


def substitute(f: Formula, sigma: Mapping[str, Term]) -> Formula:
    """Simultaneous substitution of ground terms for free variables."""
    bound = bound_vars(f)
    for name, t in sigma.items():
        if name in bound:
            raise FormulaError(f"substitution touches bound variable {name!r}")
        if not is_ground(t):
            raise FormulaError(f"substituted term {t} is not ground")
    return instantiate(f, sigma)


# -- signatures -------------------------------------------------------------


@dataclass
class Signature:
    functions: dict[str, int] = field(default_factory=dict)
    predicates: dict[str, int] = field(default_factory=dict)
    similarity: bool = False

    def __post_init__(self) -> None:
        if SIM in self.predicates:
            if self.predicates.pop(SIM) != 2:
                raise FormulaError("similarity predicate must be binary")
            self.similarity = True

    @property
    def constants(self) -> list[str]:
        return sorted(n for n, k in self.functions.items() if k == 0)

    def all_predicates(self) -> dict[str, int]:
        preds = dict(self.predicates)
        if self.similarity:
            preds[SIM] = 2
        return preds

    def declare_function(self, name: str, arity: int) -> None:
        if self.functions.get(name, arity) != arity:
            raise FormulaError(f"function {name} redeclared with arity {arity}")
        self.functions[name] = arity

    def declare_predicate(self, name: str, arity: int) -> None:
        if name == SIM:
            if arity != 2:
                raise FormulaError("similarity predicate must be binary")
            self.similarity = True
            return
        if self.predicates.get(name, arity) != arity:
            raise FormulaError(f"predicate {name} redeclared with arity {arity}")
        self.predicates[name] = arity

    def check_term(self, t: Term) -> None:
        if isinstance(t, Var):
            return
        if self.functions.get(t.name) != len(t.args):
            if t.name not in self.functions:
                raise FormulaError(f"undeclared function symbol {t.name}")
            raise FormulaError(
                f"{t.name} expects {self.functions[t.name]} arguments, got {len(t.args)}"
            )
        for a in t.args:
            self.check_term(a)

    def check_formula(self, f: Formula) -> None:
        preds = self.all_predicates()
        for a in atoms(f):
            if a.pred not in preds:
                raise FormulaError(f"undeclared predicate symbol {a.pred}")
            if preds[a.pred] != len(a.args):
                raise FormulaError(
                    f"{a.pred} expects {preds[a.pred]} arguments, got {len(a.args)}"
                )
            for t in a.args:
                self.check_term(t)


# -- Horn clauses -----------------------------------------------------------


@dataclass(frozen=True)
class EvaluatedAtom:
    """``(atom, degree)``; *atom* may also be the truth constant 0 or 1."""

    atom: Union[Atom, Const]
    degree: Fraction

    def to_formula(self) -> Formula:
        return evaluated(self.atom, self.degree)


@dataclass(frozen=True)
class BasicHorn:
    body: tuple[EvaluatedAtom, ...]
    head: EvaluatedAtom

    def to_formula(self, weak: bool = False) -> Formula:
        if not self.body:
            return self.head.to_formula()
        if len(self.body) == 1:
            antecedent = self.body[0].to_formula()
        else:
            conj = WeakConj if weak else StrongConj
            antecedent = conj(tuple(e.to_formula() for e in self.body))
        return Implies(antecedent, self.head.to_formula())


@dataclass(frozen=True)
class HornClause:
    prefix: tuple[str, ...]
    conjuncts: tuple[BasicHorn, ...]
    weak: bool = False

    @property
    def matrix(self) -> Formula:
        parts = [c.to_formula(self.weak) for c in self.conjuncts]
        if len(parts) == 1:
            return parts[0]
        return (WeakConj if self.weak else StrongConj)(tuple(parts))

    def to_formula(self) -> Formula:
        f = self.matrix
        for v in reversed(self.prefix):
            f = Forall(v, f)
        return f


BASIC = "basic"
QUANTIFIER_FREE = "quantifier-free"
HORN = "horn"
NOT_HORN = "not-horn"


@dataclass(frozen=True)
class Classification:
    kind: str
    clause: Optional[HornClause] = None
    # path of child indices to the first offending subformula
    position: tuple[int, ...] = ()
    offending: Optional[Formula] = None
    reason: str = ""

    @property
    def is_horn(self) -> bool:
        return self.kind != NOT_HORN


class _NotHorn(Exception):
    def __init__(self, path: tuple[int, ...], sub: Formula, reason: str):
        self.path, self.sub, self.reason = path, sub, reason


def _evaluated_atom(f: Formula, path: tuple[int, ...]) -> EvaluatedAtom:
    if (
        isinstance(f, Implies)
        and isinstance(f.left, Const)
        and is_atomic(f.right)
    ):
        if isinstance(f.right, Const) and f.right.value not in (ZERO, ONE):
            raise _NotHorn(path + (1,), f.right, "only 0 and 1 may appear as constants")
        return EvaluatedAtom(f.right, f.left.value)
    raise _NotHorn(path, f, "expected an evaluated atom (atom, degree)")


def _flatten(f: Formula, conj: type, path: tuple[int, ...]):
    if isinstance(f, conj):
        for i, item in enumerate(f.items):
            yield from _flatten(item, conj, path + (i,))
    else:
        yield f, path


def _basic(f: Formula, conj: type, path: tuple[int, ...]) -> BasicHorn:
    if isinstance(f, Implies) and not isinstance(f.left, Const):
        body = tuple(
            _evaluated_atom(g, p) for g, p in _flatten(f.left, conj, path + (0,))
        )
        return BasicHorn(body, _evaluated_atom(f.right, path + (1,)))
    return BasicHorn((), _evaluated_atom(f, path))


def classify_horn(f: Formula, weak_mode: bool = False) -> Classification:
    """Recognise basic / quantifier-free / full Horn clauses.

    With *weak_mode* the weak conjunction plays the role of ``&``.
    """
    conj = WeakConj if weak_mode else StrongConj
    prefix: list[str] = []
    path: tuple[int, ...] = ()
    g = f
    while isinstance(g, Forall):
        prefix.append(g.var)
        g = g.body
        path += (0,)
    try:
        conjuncts = tuple(_basic(h, conj, p) for h, p in _flatten(g, conj, path))
    except _NotHorn as e:
        return Classification(NOT_HORN, position=e.path, offending=e.sub, reason=e.reason)
    clause = HornClause(tuple(prefix), conjuncts, weak_mode)
    if prefix:
        kind = HORN
    elif len(conjuncts) == 1:
        kind = BASIC
    else:
        kind = QUANTIFIER_FREE
    return Classification(kind, clause)
