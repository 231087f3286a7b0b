"""Meadow terms: abstract syntax, parsing, printing and substitution.

Concrete syntax::

    term    := sum
    sum     := prod (("+" | "-") prod)*
    prod    := unary (("*" | "/") unary)*
    unary   := "-" unary | postfix
    postfix := atom ("^-1" | "^" NAT)*
    atom    := NAT | IDENT | IDENT "(" term ("," term)* ")"
             | "1_(" term ")" | "0_(" term ")" | "(" term ")"

``x - y`` is ``x + (-y)``, ``t / u`` is ``t * u^-1``, ``inv(t)`` is ``t^-1``,
``t^n`` is the left-folded product of n copies of t (``t^0`` is 1),
``1_(t)`` is ``t * t^-1`` and ``0_(t)`` is ``1 - 1_(t)``.  The literals
``0`` and ``1`` are the constants; larger literals expand to numerals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

DEFAULT_SYMBOLS: dict[str, int] = {"s": 1, "eq": 2}
RESERVED = frozenset({"inv"})


class Term:
    __slots__ = ()

    def __add__(self, other: Term) -> Term:
        return Add(self, other)

    def __sub__(self, other: Term) -> Term:
        return Add(self, Neg(other))

    def __mul__(self, other: Term) -> Term:
        return Mul(self, other)

    def __neg__(self) -> Term:
        return Neg(self)

    def inv(self) -> Term:
        return Inv(self)

    def __str__(self) -> str:
        return render(self)

    # Equality and hashing walk the tree with an explicit stack so that long
    # numeral chains do not hit the recursion limit.
    def __eq__(self, other) -> bool:
        if not isinstance(other, Term):
            return NotImplemented
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if type(a) is not type(b) or _atoms(a) != _atoms(b):
                return False
            ka, kb = _kids(a), _kids(b)
            if len(ka) != len(kb):
                return False
            stack.extend(zip(ka, kb))
        return True

    def __ne__(self, other) -> bool:
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __getstate__(self):
        # cached hashes depend on the per-process string hash seed
        return {k: v for k, v in self.__dict__.items() if k != "_hash"}

    def __hash__(self) -> int:
        cached = self.__dict__.get("_hash")
        if cached is not None:
            return cached
        stack = [(self, False)]
        while stack:
            t, ready = stack.pop()
            if "_hash" in t.__dict__:
                continue
            kids = _kids(t)
            if ready or not kids:
                h = hash((type(t).__name__, _atoms(t), tuple(k.__dict__["_hash"] for k in kids)))
                object.__setattr__(t, "_hash", h)
            else:
                stack.append((t, True))
                stack.extend((k, False) for k in kids)
        return self.__dict__["_hash"]


@dataclass(frozen=True, eq=False)
class Zero(Term):
    pass


@dataclass(frozen=True, eq=False)
class One(Term):
    pass


@dataclass(frozen=True, eq=False)
class Var(Term):
    name: str


@dataclass(frozen=True, eq=False)
class Const(Term):
    name: str


@dataclass(frozen=True, eq=False)
class Add(Term):
    left: Term
    right: Term


@dataclass(frozen=True, eq=False)
class Neg(Term):
    arg: Term


@dataclass(frozen=True, eq=False)
class Mul(Term):
    left: Term
    right: Term


@dataclass(frozen=True, eq=False)
class Inv(Term):
    arg: Term


@dataclass(frozen=True, eq=False)
class App(Term):
    symbol: str
    args: tuple[Term, ...]


def _kids(t: Term) -> tuple[Term, ...]:
    if isinstance(t, (Add, Mul)):
        return (t.left, t.right)
    if isinstance(t, (Neg, Inv)):
        return (t.arg,)
    if isinstance(t, App):
        return t.args
    return ()


def _atoms(t: Term):
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, App):
        return t.symbol
    return None


ZERO = Zero()
ONE = One()


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return f"{render(self.lhs)} = {render(self.rhs)}"


@dataclass(frozen=True)
class Theory:
    """A named finite list of equations.

    Parametric families (prime inverses, formal realness) are instantiated up
    to ``bound`` by the constructors in :mod:`meadowkit.theories`.
    """

    name: str
    equations: tuple[Equation, ...]
    bound: int | None = None
    symbols: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.bound is not None and self.bound < 0:
            raise ValueError("theory bound must be >= 0")

    def __iter__(self):
        return iter(self.equations)

    def __len__(self) -> int:
        return len(self.equations)


def numeral(n: int) -> Term:
    if n < 0:
        raise ValueError("numerals are defined for natural numbers only")
    t: Term = ZERO
    for _ in range(n):
        t = Add(t, ONE)
    return t


def numeral_value(t: Term) -> int | None:
    """n if t is literally ``numeral(n)``, else None."""
    n = 0
    while isinstance(t, Add) and t.right == ONE:
        n += 1
        t = t.left
    return n if t == ZERO else None


def one_of(t: Term) -> Term:
    return Mul(t, Inv(t))


def zero_of(t: Term) -> Term:
    return Add(ONE, Neg(Mul(t, Inv(t))))


def power(t: Term, n: int) -> Term:
    if n == 0:
        return ONE
    out = t
    for _ in range(n - 1):
        out = Mul(out, t)
    return out


# ---------------------------------------------------------------- traversal


def free_vars(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            out.add(u.name)
        elif isinstance(u, (Add, Mul)):
            stack.extend((u.left, u.right))
        elif isinstance(u, (Neg, Inv)):
            stack.append(u.arg)
        elif isinstance(u, App):
            stack.extend(u.args)
    return out


def constants_of(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Const):
            out.add(u.name)
        elif isinstance(u, (Add, Mul)):
            stack.extend((u.left, u.right))
        elif isinstance(u, (Neg, Inv)):
            stack.append(u.arg)
        elif isinstance(u, App):
            stack.extend(u.args)
    return out


def symbols_of(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, App):
            out.add(u.symbol)
            stack.extend(u.args)
        elif isinstance(u, (Add, Mul)):
            stack.extend((u.left, u.right))
        elif isinstance(u, (Neg, Inv)):
            stack.append(u.arg)
    return out


def substitute(t: Term, env: Mapping[str, Term]) -> Term:
    """Simultaneous substitution of variables; constants are left alone."""
    if isinstance(t, Var):
        return env.get(t.name, t)
    if isinstance(t, (Zero, One, Const)):
        return t
    if isinstance(t, Add):
        if numeral_value(t) is not None:
            return t
        return Add(substitute(t.left, env), substitute(t.right, env))
    if isinstance(t, Mul):
        return Mul(substitute(t.left, env), substitute(t.right, env))
    if isinstance(t, Neg):
        return Neg(substitute(t.arg, env))
    if isinstance(t, Inv):
        return Inv(substitute(t.arg, env))
    if isinstance(t, App):
        return App(t.symbol, tuple(substitute(a, env) for a in t.args))
    raise TypeError(f"not a term: {t!r}")


def term_size(t: Term) -> int:
    n = 0
    stack = [t]
    while stack:
        u = stack.pop()
        n += 1
        if isinstance(u, (Add, Mul)):
            stack.extend((u.left, u.right))
        elif isinstance(u, (Neg, Inv)):
            stack.append(u.arg)
        elif isinstance(u, App):
            stack.extend(u.args)
    return n


# ----------------------------------------------------------------- printing

_SUM, _PROD, _UNARY, _POSTFIX = range(4)


def _level(t: Term) -> int:
    if isinstance(t, Add) and numeral_value(t) in (None, 1):
        return _SUM
    if isinstance(t, Mul):
        return _PROD
    if isinstance(t, Neg):
        return _UNARY
    if isinstance(t, Inv):
        return _POSTFIX
    return _POSTFIX + 1


def _wrap(t: Term, min_level: int) -> str:
    s = render(t)
    return f"({s})" if _level(t) < min_level else s


def render(t: Term) -> str:
    """Print a term so that :func:`parse_term` reads it back unchanged."""
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, One):
        return "1"
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, Add):
        n = numeral_value(t)
        if n is not None:
            return "0 + 1" if n == 1 else str(n)
        left = _wrap(t.left, _SUM)
        if isinstance(t.right, Neg):
            return f"{left} - {_wrap(t.right.arg, _PROD)}"
        return f"{left} + {_wrap(t.right, _PROD)}"
    if isinstance(t, Mul):
        return f"{_wrap(t.left, _PROD)} * {_wrap(t.right, _UNARY)}"
    if isinstance(t, Neg):
        return f"-{_wrap(t.arg, _UNARY)}"
    if isinstance(t, Inv):
        return f"{_wrap(t.arg, _POSTFIX + 1)}^-1"
    if isinstance(t, App):
        return f"{t.symbol}({', '.join(render(a) for a in t.args)})"
    raise TypeError(f"not a term: {t!r}")


# ------------------------------------------------------------------ parsing


class TermSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{msg} at line {line}, column {col}")


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<idem>[01]_\()
  | (?P<inv>\^\s*-\s*1(?![0-9]))
  | (?P<pow>\^\s*[0-9]+)
  | (?P<nat>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/(),=])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise TermSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        else:
            nl = m.group().count("\n")
            if nl:
                line += nl
                line_start = pos + m.group().rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, symbols: Mapping[str, int], constants: Iterable[str]):
        self.toks = _tokenize(text)
        self.i = 0
        self.symbols = dict(symbols)
        self.constants = frozenset(constants)

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise TermSyntaxError(msg, tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        tok = self.peek()
        if tok.text != text:
            self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return self.take()

    def sum(self) -> Term:
        t = self.prod()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            u = self.prod()
            t = Add(t, u) if op == "+" else Add(t, Neg(u))
        return t

    def prod(self) -> Term:
        t = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.take().text
            u = self.unary()
            t = Mul(t, u) if op == "*" else Mul(t, Inv(u))
        return t

    def unary(self) -> Term:
        if self.peek().text == "-":
            self.take()
            return Neg(self.unary())
        return self.postfix()

    def postfix(self) -> Term:
        t = self.atom()
        while self.peek().kind in ("inv", "pow"):
            tok = self.take()
            if tok.kind == "inv":
                t = Inv(t)
            else:
                t = power(t, int(tok.text[1:].strip()))
        return t

    def args(self) -> list[Term]:
        self.expect("(")
        out = [self.sum()]
        while self.peek().text == ",":
            self.take()
            out.append(self.sum())
        self.expect(")")
        return out

    def atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "nat":
            self.take()
            n = int(tok.text)
            return ZERO if n == 0 else ONE if n == 1 else numeral(n)
        if tok.kind == "idem":
            self.take()
            inner = self.sum()
            self.expect(")")
            return one_of(inner) if tok.text[0] == "1" else zero_of(inner)
        if tok.text == "(":
            self.take()
            inner = self.sum()
            self.expect(")")
            return inner
        if tok.kind == "ident":
            self.take()
            name = tok.text
            is_call = self.peek().text == "("
            if name == "inv":
                if not is_call:
                    self.error("'inv' needs an argument", tok)
                args = self.args()
                if len(args) != 1:
                    self.error(f"arity mismatch: inv takes 1 argument, got {len(args)}", tok)
                return Inv(args[0])
            if name in self.symbols:
                if not is_call:
                    self.error(f"symbol {name!r} used without arguments", tok)
                args = self.args()
                if len(args) != self.symbols[name]:
                    self.error(
                        f"arity mismatch: {name} takes {self.symbols[name]} argument(s), got {len(args)}",
                        tok,
                    )
                return App(name, tuple(args))
            if is_call:
                self.error(f"unknown symbol {name!r}", tok)
            return Const(name) if name in self.constants else Var(name)
        self.error(f"unexpected {tok.text or 'end of input'!r}")


def parse_term(
    text: str,
    symbols: Mapping[str, int] | None = None,
    constants: Iterable[str] = (),
) -> Term:
    p = _Parser(text, DEFAULT_SYMBOLS if symbols is None else symbols, constants)
    t = p.sum()
    if p.peek().kind != "eof":
        p.error(f"unexpected {p.peek().text!r}")
    return t


def parse_equation(
    text: str,
    symbols: Mapping[str, int] | None = None,
    constants: Iterable[str] = (),
) -> Equation:
    p = _Parser(text, DEFAULT_SYMBOLS if symbols is None else symbols, constants)
    lhs = p.sum()
    p.expect("=")
    rhs = p.sum()
    if p.peek().kind != "eof":
        p.error(f"unexpected {p.peek().text!r}")
    return Equation(lhs, rhs)


def parse_equations(
    text: str, symbols: Mapping[str, int] | None = None
) -> tuple[list[str], list[Equation]]:
    """Read the equation-file format.

    One ``lhs = rhs`` per line, ``#`` starts a comment, and ``const a, b``
    lines declare constants for the lines that follow.
    """
    constants: list[str] = []
    equations: list[Equation] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("const "):
            for name in line[6:].split(","):
                name = name.strip()
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name in RESERVED:
                    raise TermSyntaxError(f"bad constant name {name!r}", lineno, 1)
                constants.append(name)
            continue
        try:
            equations.append(parse_equation(line, symbols, constants))
        except TermSyntaxError as e:
            raise TermSyntaxError(str(e).rsplit(" at line", 1)[0], lineno, e.col) from None
    return constants, equations


def load_theory(path: str | Path, symbols: Mapping[str, int] | None = None) -> Theory:
    text = Path(path).read_text(encoding="utf-8")
    _, eqs = parse_equations(text, symbols)
    return Theory(Path(path).stem, tuple(eqs))
