"""Brute-force grid oracle.

Enumerates every assignment of degrees in ``{0, 1/D, ..., 1}`` to the
Herbrand base, keeps those whose induced structure is a model of the theory
and of the similarity axioms, and takes pointwise minima.  It shares no code
with the fixpoint engine beyond the universe and the evaluator.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .algebra import ONE
from .semantics import FiniteStructure, check_similarity_axioms, is_model, truth_value
from .syntax import Atom, Formula, Signature, constants_in
from .term_model import HerbrandUniverse, herbrand_base

DEFAULT_CAP = 10**7


class OracleError(ValueError):
    pass


class CapExceeded(OracleError):
    pass


class NoGridModel(OracleError):
    pass


@dataclass(frozen=True)
class Grid:
    denominator: int

    def __post_init__(self) -> None:
        if self.denominator < 1:
            raise OracleError("grid denominator must be at least 1")

    @property
    def degrees(self) -> list[Fraction]:
        return [Fraction(i, self.denominator) for i in range(self.denominator + 1)]

    def admits(self, theory: Sequence[Formula]) -> bool:
        return all((r * self.denominator).denominator == 1
                   for f in theory for r in constants_in(f))


def enumerate_interpretations(
    base: Sequence[Atom], grid: Grid, cap: int = DEFAULT_CAP
) -> Iterator[dict[Atom, Fraction]]:
    size = (grid.denominator + 1) ** len(base)
    if size > cap:
        raise CapExceeded(f"{size} interpretations exceed the cap of {cap}")
    values = grid.degrees
    for combo in itertools.product(values, repeat=len(base)):
        yield dict(zip(base, combo))


class _Induced:
    """Builds the Herbrand structure for a degree map without re-validating."""

    def __init__(self, u: HerbrandUniverse):
        self.u = u
        sig = u.signature
        self.names = {t: str(t) for t in u.terms}
        functions: dict[str, dict[tuple, str]] = {}
        for name, k in sig.functions.items():
            functions[name] = {
                tuple(self.names[a] for a in args): self.names[u.compose(name, args)]
                for args in itertools.product(u.terms, repeat=k)
            }
        self.template = FiniteStructure(
            tuple(self.names[t] for t in u.terms),
            functions,
            {},
            Signature(dict(sig.functions), dict(sig.predicates), sig.similarity),
        )

    def __call__(self, deg: dict[Atom, Fraction]) -> FiniteStructure:
        preds: dict[str, dict[tuple, Fraction]] = {}
        for atom, r in deg.items():
            preds.setdefault(atom.pred, {})[tuple(self.names[a] for a in atom.args)] = r
        s = object.__new__(FiniteStructure)
        s.domain = self.template.domain
        s.functions = self.template.functions
        s.signature = self.template.signature
        s.predicates = preds
        return s


def grid_models(
    theory: Sequence[Formula], u: HerbrandUniverse, grid: Grid, cap: int = DEFAULT_CAP
) -> Iterator[tuple[dict[Atom, Fraction], FiniteStructure]]:
    """Every grid Herbrand interpretation that models *theory* and the similarity axioms."""
    induced = _Induced(u)
    similarity = u.signature.similarity
    for deg in enumerate_interpretations(herbrand_base(u), grid, cap):
        s = induced(deg)
        if similarity and not check_similarity_axioms(s):
            continue
        if is_model(s, theory, stop_early=True):
            yield deg, s


def oracle_min_model(
    theory: Sequence[Formula], u: HerbrandUniverse, grid: Grid, cap: int = DEFAULT_CAP
) -> dict[Atom, Fraction]:
    best: dict[Atom, Fraction] | None = None
    for deg, _ in grid_models(theory, u, grid, cap):
        if best is None:
            best = dict(deg)
        else:
            for atom, r in deg.items():
                if r < best[atom]:
                    best[atom] = r
    if best is None:
        raise NoGridModel(f"no model on the grid 1/{grid.denominator}")
    return best


def oracle_truth_degrees(
    theory: Sequence[Formula],
    sentences: Sequence[Formula],
    u: HerbrandUniverse,
    grid: Grid,
    cap: int = DEFAULT_CAP,
) -> list[Fraction]:
    """Minimum value of each sentence over all grid Herbrand models."""
    best = [ONE] * len(sentences)
    found = False
    for _, s in grid_models(theory, u, grid, cap):
        found = True
        for i, f in enumerate(sentences):
            if best[i]:
                best[i] = min(best[i], truth_value(s, f))
    if not found:
        raise NoGridModel(f"no model on the grid 1/{grid.denominator}")
    return best


def oracle_truth_degree(
    theory: Sequence[Formula], sentence: Formula, u: HerbrandUniverse, grid: Grid,
    cap: int = DEFAULT_CAP,
) -> Fraction:
    return oracle_truth_degrees(theory, [sentence], u, grid, cap)[0]
