"""Concrete syntax for formulas, theory files and structure files.

Formula syntax::

    forall x. phi        exists x. phi       (scope extends to the right)
    phi <-> psi          phi -> psi          (-> associates to the right)
    phi /\\ psi           phi & psi           (& binds tighter than /\\)
    ~phi                 (phi, 0.3)          (evaluated formula, 0.3 -> phi)
    P(t, ...)            t ~= s              3/10   0.3   (truth constants)

Theory files hold one declaration per line: ``func NAME/ARITY``,
``pred NAME/ARITY``, ``sim`` and ``clause [LABEL:] FORMULA``.

Structure files hold ``domain e1 e2 ...``, ``func F: (e1, e2) -> e3`` and
``pred P: (e1) = 2/5`` lines.  Predicate tuples that are not listed have
degree 0; unlisted ``~=`` tuples follow crisp identity.  ``func NAME/ARITY``,
``pred NAME/ARITY`` and ``sim`` may also declare symbols explicitly.  Lines
``class e t1 t2 ...`` and ``degree ATOM = r`` are kept as annotations.
``#`` starts a comment everywhere.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .algebra import format_degree, rational01
from .semantics import FiniteStructure
from .syntax import (
    SIM,
    Atom,
    Const,
    Equiv,
    Exists,
    Fn,
    Forall,
    Formula,
    FormulaError,
    Implies,
    Not,
    Signature,
    StrongConj,
    Term,
    Var,
    WeakConj,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.message, self.line, self.column = message, line, column


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op><->|->|/\\|~=|[~&().,:=])
    """,
    re.VERBOSE,
)

KEYWORDS = {"forall", "exists"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str, line: int = 1, column: int = 1) -> list[Token]:
    tokens = []
    pos = 0
    text = text.split("#", 1)[0]
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column + pos)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), line, column + pos))
        pos = m.end()
    tokens.append(Token("eof", "", line, column + pos))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], signature: Signature):
        self.toks = tokens
        self.i = 0
        self.sig = signature

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text in texts

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind != "ident" or self.tok.text in KEYWORDS:
            raise self.error("expected a name")
        return self.advance()

    def expect_eof(self) -> None:
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")

    def degree(self) -> Fraction:
        tok = self.tok
        if tok.kind != "num":
            raise self.error("expected a rational degree")
        self.advance()
        try:
            return rational01(tok.text)
        except (ValueError, ZeroDivisionError) as exc:
            raise self.error(str(exc), tok) from None

    # formulas, lowest precedence first

    def formula(self) -> Formula:
        if self.at("forall", "exists"):
            return self.quantified()
        left = self.implication()
        if self.at("<->"):
            self.advance()
            right = self.quantified() if self.at("forall", "exists") else self.implication()
            return Equiv(left, right)
        return left

    def quantified(self) -> Formula:
        kind = Forall if self.advance().text == "forall" else Exists
        names = [self.expect_ident().text]
        while self.tok.kind == "ident" and not self.at(*KEYWORDS):
            names.append(self.advance().text)
        self.expect(".")
        body = self.formula()
        for name in reversed(names):
            body = kind(name, body)
        return body

    def implication(self) -> Formula:
        left = self.weak()
        if self.at("->"):
            self.advance()
            if self.at("forall", "exists"):
                return Implies(left, self.quantified())
            return Implies(left, self.implication())
        return left

    def _chain(self, op: str, sub, node) -> Formula:
        items = [sub()]
        while self.at(op):
            self.advance()
            if self.at("forall", "exists"):
                items.append(self.quantified())
                break
            items.append(sub())
        return items[0] if len(items) == 1 else node(tuple(items))

    def weak(self) -> Formula:
        return self._chain("/\\", self.strong, WeakConj)

    def strong(self) -> Formula:
        return self._chain("&", self.unary, StrongConj)

    def unary(self) -> Formula:
        if self.at("~"):
            self.advance()
            if self.at("forall", "exists"):
                return Not(self.quantified())
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        tok = self.tok
        if tok.kind == "num":
            return Const(self.degree())
        if self.at("("):
            self.advance()
            inner = self.formula()
            if self.at(","):
                self.advance()
                r = self.degree()
                self.expect(")")
                return Implies(Const(r), inner)
            self.expect(")")
            return inner
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            preds = self.sig.all_predicates()
            if tok.text in preds and tok.text not in self.sig.functions:
                return self.atom()
            t = self.term()
            if not self.at("~="):
                raise self.error(f"{tok.text!r} is not a declared predicate", tok)
            if not self.sig.similarity:
                raise self.error("similarity '~=' used but not declared (add 'sim')")
            self.advance()
            return Atom(SIM, (t, self.term()))
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")

    def atom(self) -> Atom:
        tok = self.advance()
        args: tuple[Term, ...] = ()
        if self.at("("):
            args = self.term_args()
        arity = self.sig.all_predicates()[tok.text]
        if len(args) != arity:
            raise self.error(f"{tok.text} expects {arity} arguments, got {len(args)}", tok)
        return Atom(tok.text, args)

    def term_args(self) -> tuple[Term, ...]:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.term())
            while self.at(","):
                self.advance()
                args.append(self.term())
        self.expect(")")
        return tuple(args)

    def term(self) -> Term:
        tok = self.expect_ident()
        if tok.text in self.sig.functions:
            args: tuple[Term, ...] = ()
            if self.at("("):
                args = self.term_args()
            arity = self.sig.functions[tok.text]
            if len(args) != arity:
                raise self.error(f"{tok.text} expects {arity} arguments, got {len(args)}", tok)
            return Fn(tok.text, args)
        if self.at("("):
            raise self.error(f"undeclared symbol {tok.text!r}", tok)
        if tok.text in self.sig.all_predicates():
            raise self.error(f"predicate {tok.text!r} used as a term", tok)
        return Var(tok.text)


def parse_formula(text: str, signature: Signature, line: int = 1, column: int = 1) -> Formula:
    p = _Parser(tokenize(text, line, column), signature)
    f = p.formula()
    p.expect_eof()
    return f


def parse_term(text: str, signature: Signature) -> Term:
    p = _Parser(tokenize(text), signature)
    t = p.term()
    p.expect_eof()
    return t


# -- printing ---------------------------------------------------------------

_EQUIV, _IMPL, _WEAK, _STRONG, _UNARY, _ATOM = range(1, 7)


def print_term(t: Term) -> str:
    return str(t)


def print_atom(a: Atom) -> str:
    if a.pred == SIM:
        return f"{print_term(a.args[0])} ~= {print_term(a.args[1])}"
    if not a.args:
        return a.pred
    return f"{a.pred}({', '.join(map(print_term, a.args))})"


def _prec(f: Formula) -> int:
    if isinstance(f, Equiv):
        return _EQUIV
    if isinstance(f, Implies):
        return _ATOM if isinstance(f.left, Const) else _IMPL
    if isinstance(f, WeakConj):
        return _WEAK
    if isinstance(f, StrongConj):
        return _STRONG
    if isinstance(f, Not):
        return _UNARY
    if isinstance(f, (Forall, Exists)):
        return 0
    return _ATOM


def _wrap(f: Formula, minimum: int) -> str:
    text = print_formula(f)
    return text if _prec(f) >= minimum else f"({text})"


def print_formula(f: Formula) -> str:
    """Canonical text; ``parse_formula(print_formula(f))`` rebuilds *f*."""
    if isinstance(f, Const):
        return format_degree(f.value)
    if isinstance(f, Atom):
        return print_atom(f)
    if isinstance(f, (Forall, Exists)):
        word = "forall" if isinstance(f, Forall) else "exists"
        return f"{word} {f.var}. {print_formula(f.body)}"
    if isinstance(f, Not):
        return "~" + _wrap(f.body, _UNARY)
    if isinstance(f, Implies):
        if isinstance(f.left, Const):
            return f"({print_formula(f.right)}, {format_degree(f.left.value)})"
        return f"{_wrap(f.left, _IMPL + 1)} -> {_wrap(f.right, _IMPL)}"
    if isinstance(f, Equiv):
        return f"{_wrap(f.left, _IMPL)} <-> {_wrap(f.right, _IMPL)}"
    if isinstance(f, StrongConj):
        return " & ".join(_wrap(g, _STRONG + 1) for g in f.items)
    if isinstance(f, WeakConj):
        return " /\\ ".join(_wrap(g, _WEAK + 1) for g in f.items)
    raise TypeError(f"not a formula: {f!r}")


# -- theory files -----------------------------------------------------------


@dataclass
class TheoryFile:
    signature: Signature
    formulas: list[Formula] = field(default_factory=list)
    labels: list[str] = field(default_factory=list)
    lines: list[int] = field(default_factory=list)


_DECL = re.compile(r"^\s*(?P<name>[A-Za-z_][A-Za-z0-9_']*|~=)\s*/\s*(?P<arity>\d+)\s*$")


def _split_keyword(raw: str) -> tuple[str, str, int]:
    body = raw.split("#", 1)[0]
    stripped = body.lstrip()
    if not stripped:
        return "", "", 0
    offset = len(body) - len(stripped)
    word, _, rest = stripped.partition(" ")
    return word, rest, offset + len(word) + 2


def _declaration(rest: str, lineno: int, col: int) -> tuple[str, int]:
    m = _DECL.match(rest)
    if not m:
        raise ParseError("expected NAME/ARITY", lineno, col)
    return m.group("name"), int(m.group("arity"))


def _declare(sig: Signature, word: str, rest: str, lineno: int, col: int) -> bool:
    try:
        if word == "sim" and not rest.strip():
            sig.similarity = True
        elif word in ("func", "pred") and _DECL.match(rest):
            name, arity = _declaration(rest, lineno, col)
            if word == "func":
                if name in sig.all_predicates():
                    raise ParseError(f"{name} already declared as a predicate", lineno, col)
                sig.declare_function(name, arity)
            else:
                if name in sig.functions:
                    raise ParseError(f"{name} already declared as a function", lineno, col)
                sig.declare_predicate(name, arity)
        else:
            return False
    except FormulaError as exc:
        raise ParseError(str(exc), lineno, col) from None
    return True


def parse_theory(text: str) -> TheoryFile:
    sig = Signature()
    pending = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        word, rest, col = _split_keyword(raw)
        if not word:
            continue
        if _declare(sig, word, rest, lineno, col):
            continue
        if word == "clause":
            pending.append((lineno, col, rest))
            continue
        raise ParseError(f"unknown directive {word!r}", lineno, col - len(word) - 1)
    theory = TheoryFile(sig)
    for lineno, col, rest in pending:
        label = None
        m = re.match(r"^(\s*)([A-Za-z_][A-Za-z0-9_']*)\s*:", rest)
        if m:
            label = m.group(2)
            col += m.end()
            rest = rest[m.end():]
        f = parse_formula(rest, sig, lineno, col)
        theory.formulas.append(f)
        theory.labels.append(label or f"c{len(theory.formulas)}")
        theory.lines.append(lineno)
    return theory


def print_theory(theory: TheoryFile) -> str:
    sig = theory.signature
    lines = [f"func {n}/{k}" for n, k in sorted(sig.functions.items())]
    lines += [f"pred {n}/{k}" for n, k in sorted(sig.predicates.items())]
    if sig.similarity:
        lines.append("sim")
    for label, f in zip(theory.labels, theory.formulas):
        lines.append(f"clause {label}: {print_formula(f)}")
    return "\n".join(lines) + "\n"


# -- structure files --------------------------------------------------------


@dataclass
class StructureFile:
    structure: FiniteStructure
    classes: dict[str, list[str]] = field(default_factory=dict)
    degrees: dict[str, Fraction] = field(default_factory=dict)


class _ElementParser(_Parser):
    """Domain elements are written like ground terms: ``a``, ``F(a,b)``."""

    def element(self) -> str:
        tok = self.expect_ident()
        if self.at("("):
            self.advance()
            args = [self.element()]
            while self.at(","):
                self.advance()
                args.append(self.element())
            self.expect(")")
            return f"{tok.text}({','.join(args)})"
        return tok.text

    def tuple_(self) -> tuple[str, ...]:
        self.expect("(")
        out = []
        if not self.at(")"):
            out.append(self.element())
            while self.at(","):
                self.advance()
                out.append(self.element())
        self.expect(")")
        return tuple(out)


def parse_structure(text: str) -> StructureFile:
    sig = Signature()
    domain: list[str] = []
    functions: dict[str, dict[tuple, str]] = {}
    predicates: dict[str, dict[tuple, Fraction]] = {}
    classes: dict[str, list[str]] = {}
    degrees: dict[str, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        word, rest, col = _split_keyword(raw)
        if not word:
            continue
        if _declare(sig, word, rest, lineno, col):
            continue
        toks = tokenize(rest, lineno, col)
        p = _ElementParser(toks, sig)
        if word == "domain":
            while p.tok.kind != "eof":
                tok = p.tok
                e = p.element()
                if e in domain:
                    raise ParseError(f"duplicate element {e!r}", tok.line, tok.column)
                domain.append(e)
        elif word == "class":
            members = []
            while p.tok.kind != "eof":
                members.append(p.element())
            if not members:
                raise p.error("empty class")
            classes[members[0]] = members
        elif word == "degree":
            head, sep, tail = rest.rpartition("=")
            if not sep:
                raise ParseError("expected 'degree ATOM = r'", lineno, col)
            try:
                degrees[" ".join(head.split())] = rational01(tail)
            except ValueError as exc:
                raise ParseError(str(exc), lineno, col + len(head) + 1) from None
        elif word in ("func", "pred"):
            if p.at("~="):
                name_tok = p.advance()
            else:
                name_tok = p.expect_ident()
            name = name_tok.text
            p.expect(":")
            args = p.tuple_()
            try:
                if word == "func":
                    if name in sig.all_predicates():
                        raise ParseError(f"{name} already declared as a predicate",
                                         name_tok.line, name_tok.column)
                    p.expect("->")
                    value = p.element()
                    sig.declare_function(name, len(args))
                    table = functions.setdefault(name, {})
                    if args in table and table[args] != value:
                        raise p.error(f"conflicting entries for {name}{args}")
                    table[args] = value
                else:
                    if name in sig.functions:
                        raise ParseError(f"{name} already declared as a function",
                                         name_tok.line, name_tok.column)
                    p.expect("=")
                    r = p.degree()
                    sig.declare_predicate(name, len(args))
                    predicates.setdefault(name, {})[args] = r
            except FormulaError as exc:
                raise ParseError(str(exc), name_tok.line, name_tok.column) from None
            p.expect_eof()
        else:
            raise ParseError(f"unknown directive {word!r}", lineno, col - len(word) - 1)
    if not domain:
        raise ParseError("missing 'domain' line", 1, 1)
    members = set(domain)
    for table in list(functions.values()) + list(predicates.values()):
        for args, value in table.items():
            for e in args + ((value,) if isinstance(value, str) else ()):
                if e not in members:
                    raise ParseError(f"element {e!r} not in domain", 1, 1)
    try:
        structure = FiniteStructure(tuple(domain), functions, predicates, sig)
    except ValueError as exc:
        raise ParseError(str(exc), 1, 1) from None
    return StructureFile(structure, classes, degrees)


def print_structure(s: FiniteStructure) -> str:
    """Structure-file text with every table listed in a stable order."""
    import itertools

    lines = ["domain " + " ".join(map(str, s.domain))]
    sig = s.signature
    if sig.similarity:
        lines.append("sim")
    for name, n in sorted(sig.functions.items()):
        lines.append(f"func {name}/{n}")
        for args in itertools.product(s.domain, repeat=n):
            lines.append(f"func {name}: ({', '.join(map(str, args))}) -> {s.func(name, args)}")
    for name, n in sorted(sig.all_predicates().items()):
        if name != SIM:
            lines.append(f"pred {name}/{n}")
        for args in itertools.product(s.domain, repeat=n):
            r = s.pred(name, args)
            crisp = name == SIM and r == (1 if args[0] == args[1] else 0)
            if r and not crisp or name == SIM and args[0] == args[1]:
                lines.append(f"pred {name}: ({', '.join(map(str, args))}) = {format_degree(r)}")
    return "\n".join(lines) + "\n"
