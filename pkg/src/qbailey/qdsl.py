"""A small expression language for q-series.

Grammar (EBNF)::

    expr   = term { ("+" | "-") term } ;
    term   = unary { ("*" | "/") unary } ;
    unary  = "-" unary | power ;
    power  = atom [ "^" unary ] ;
    atom   = INT | "q" | IDENT | "(" expr ")"
           | "poch" "(" expr "," ( expr | "inf" ) ")"
           | "sum" "(" IDENT "," expr "," ( expr | "inf" ) "," expr ")"
           | "bsum" "(" IDENT "," expr ")" ;

Exponents, Pochhammer counts and summation bounds are integer expressions.
Infinite sums stop after ``window`` consecutive terms whose valuation
exceeds the requested order.
"""

from __future__ import annotations

import configparser
import itertools
import re
import time
from dataclasses import dataclass
from importlib.resources import files
from typing import Iterator, Optional, Union

from .report import FAIL, PASS, Mismatch, VerificationReport
from .series import (
    INFINITE,
    OrderExceeded,
    QSeries,
    first_difference,
    invert,
    monomial,
    pochhammer,
    zero,
)

KEYWORDS = {"poch", "sum", "bsum", "inf"}
SYMBOLS = set("^*/+-(),")
DEFAULT_WINDOW = 4
DEFAULT_BUDGET = 2000


class DSLError(Exception):
    pass


class LexError(DSLError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class ParseError(DSLError):
    def __init__(self, expected: str, found: "Token"):
        where = f"line {found.line}, column {found.column}"
        super().__init__(f"expected {expected}, found {found.text or 'end of input'!r} at {where}")
        self.expected = expected
        self.found = found
        self.line = found.line
        self.column = found.column


class EvalError(DSLError):
    pass


class EvalDivergence(EvalError):
    pass


class ManifestError(DSLError):
    pass


# -- tokens ------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", "q", a keyword, a symbol, or "eof"
    text: str
    line: int
    column: int

    def __repr__(self) -> str:
        return self.text if self.kind != "eof" else "<eof>"


_TOKEN_RE = re.compile(r"\s+|\d+|[A-Za-z_][A-Za-z_0-9]*|.", re.S)


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    for m in _TOKEN_RE.finditer(text):
        s = m.group()
        if s.isspace():
            pass
        elif s.isdigit():
            tokens.append(Token("int", s, line, col))
        elif s[0].isalpha() or s[0] == "_":
            kind = "q" if s == "q" else s if s in KEYWORDS else "ident"
            tokens.append(Token(kind, s, line, col))
        elif s in SYMBOLS:
            tokens.append(Token(s, s, line, col))
        else:
            raise LexError(f"unexpected character {s!r}", line, col)
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
    tokens.append(Token("eof", "", line, col))
    return tokens


# -- AST ---------------------------------------------------------------------


class Expr:
    pass


@dataclass(frozen=True)
class Num(Expr):
    value: int


@dataclass(frozen=True)
class Q(Expr):
    pass


@dataclass(frozen=True)
class Inf(Expr):
    pass


@dataclass(frozen=True)
class Param(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True)
class Poch(Expr):
    base: Expr
    count: Expr  # Inf() for the infinite product


@dataclass(frozen=True)
class Sum(Expr):
    index: str
    lo: Expr
    hi: Expr  # Inf() for an infinite sum
    body: Expr


@dataclass(frozen=True)
class BSum(Expr):
    index: str
    body: Expr


# -- parser ------------------------------------------------------------------


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def match(self, *kinds: str) -> Optional[Token]:
        if self.peek().kind in kinds:
            return self.advance()
        return None

    def expect(self, kind: str, what: Optional[str] = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(what or repr(kind), tok)
        return self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        self.expect("eof", "end of input")
        return e

    def expr(self) -> Expr:
        left = self.term()
        while (op := self.match("+", "-")) is not None:
            left = BinOp(op.kind, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while (op := self.match("*", "/")) is not None:
            left = BinOp(op.kind, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.match("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.match("^"):
            return Pow(base, self.unary())
        return base

    def bound(self) -> Expr:
        return Inf() if self.match("inf") else self.expr()

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return Num(int(tok.text))
        if tok.kind == "q":
            self.advance()
            return Q()
        if tok.kind == "ident":
            self.advance()
            return Param(tok.text)
        if tok.kind == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "poch":
            self.advance()
            self.expect("(")
            base = self.expr()
            self.expect(",")
            count = self.bound()
            self.expect(")")
            return Poch(base, count)
        if tok.kind == "sum":
            self.advance()
            self.expect("(")
            index = self.expect("ident", "index variable").text
            self.expect(",")
            lo = self.expr()
            self.expect(",")
            hi = self.bound()
            self.expect(",")
            body = self.expr()
            self.expect(")")
            return Sum(index, lo, hi, body)
        if tok.kind == "bsum":
            self.advance()
            self.expect("(")
            index = self.expect("ident", "index variable").text
            self.expect(",")
            body = self.expr()
            self.expect(")")
            return BSum(index, body)
        raise ParseError("an expression", tok)


def parse(source: Union[str, list[Token]]) -> Expr:
    tokens = tokenize(source) if isinstance(source, str) else source
    return Parser(tokens).parse()


def to_text(e: Expr) -> str:
    """Normal form: every compound node parenthesized, so parse(to_text(e)) == e."""
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Q):
        return "q"
    if isinstance(e, Inf):
        return "inf"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_text(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    if isinstance(e, Pow):
        return f"({to_text(e.base)}^{to_text(e.exponent)})"
    if isinstance(e, Poch):
        return f"poch({to_text(e.base)}, {to_text(e.count)})"
    if isinstance(e, Sum):
        return f"sum({e.index}, {to_text(e.lo)}, {to_text(e.hi)}, {to_text(e.body)})"
    if isinstance(e, BSum):
        return f"bsum({e.index}, {to_text(e.body)})"
    raise TypeError(f"not an expression node: {e!r}")


# -- evaluation --------------------------------------------------------------


@dataclass
class Evaluator:
    order: int
    window: int = DEFAULT_WINDOW
    budget: int = DEFAULT_BUDGET
    slack: int = 0

    @property
    def working(self) -> int:
        return self.order + self.slack

    def integer(self, e: Expr, env: dict) -> int:
        if isinstance(e, Num):
            return e.value
        if isinstance(e, Param):
            return self._lookup(e.name, env)
        if isinstance(e, Neg):
            return -self.integer(e.operand, env)
        if isinstance(e, BinOp):
            a, b = self.integer(e.left, env), self.integer(e.right, env)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            if b == 0 or a % b:
                raise EvalError(f"{a}/{b} is not an exact integer division")
            return a // b
        if isinstance(e, Pow):
            a, b = self.integer(e.base, env), self.integer(e.exponent, env)
            if b < 0:
                raise EvalError("negative exponent in an integer expression")
            return a**b
        raise EvalError(f"{to_text(e)} is not an integer expression")

    def _lookup(self, name: str, env: dict) -> int:
        if name not in env:
            raise EvalError(f"unbound parameter {name!r}")
        value = env[name]
        if not isinstance(value, int):
            raise EvalError(f"parameter {name!r} must be an integer")
        return value

    def series(self, e: Expr, env: dict) -> QSeries:
        T = self.working
        if isinstance(e, Num):
            return monomial(e.value, 0)
        if isinstance(e, Q):
            return monomial(1, 1)
        if isinstance(e, Param):
            return monomial(self._lookup(e.name, env), 0)
        if isinstance(e, Inf):
            raise EvalError("inf is only allowed as a count or an upper bound")
        if isinstance(e, Neg):
            return -self.series(e.operand, env)
        if isinstance(e, BinOp):
            a, b = self.series(e.left, env), self.series(e.right, env)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return _cap(a * b, T)
            return _cap(a * self._reciprocal(b), T)
        if isinstance(e, Pow):
            k = self.integer(e.exponent, env)
            if isinstance(e.base, Q):
                return monomial(1, k)
            base = self.series(e.base, env)
            if k < 0:
                base, k = self._reciprocal(base), -k
            return _cap(base**k, T)
        if isinstance(e, Poch):
            base = self.series(e.base, env)
            if isinstance(e.count, Inf):
                v = base.valuation
                if base.is_zero():
                    return monomial(1, 0)
                if v is None or v < 1:
                    raise EvalError("poch(x, inf) needs a base of positive valuation")
                return pochhammer(base, INFINITE, T)
            n = self.integer(e.count, env)
            keep_exact = base.is_exact and (base.valuation or 0) <= 0
            return pochhammer(base, n, None if keep_exact and n >= 0 else T)
        if isinstance(e, Sum):
            lo = self.integer(e.lo, env)
            if isinstance(e.hi, Inf):
                return self._infinite(e.index, e.body, env, itertools.count(lo))
            hi = self.integer(e.hi, env)
            total = zero(None)
            for i in range(lo, hi + 1):
                total = total + self.series(e.body, {**env, e.index: i})
            return _cap(total, T)
        if isinstance(e, BSum):
            up = self._infinite(e.index, e.body, env, itertools.count(0))
            down = self._infinite(e.index, e.body, env, itertools.count(-1, -1))
            return up + down
        raise TypeError(f"not an expression node: {e!r}")

    def _reciprocal(self, s: QSeries) -> QSeries:
        if s.is_exact and len(s.coeffs) == 1:
            return invert(s)
        v = s.valuation or 0
        return invert(s, order=self.working - min(v, 0) if s.is_exact else None)

    def _infinite(self, index: str, body: Expr, env: dict, indices: Iterator[int]) -> QSeries:
        total = zero(self.working)
        quiet = 0
        for count, i in enumerate(indices):
            if count >= self.budget:
                raise EvalDivergence(
                    f"sum over {index} did not settle within {self.budget} terms"
                )
            term = self.series(body, {**env, index: i})
            v = term.valuation
            if v is None or v > self.order:
                quiet += 1
                if quiet >= self.window:
                    break
            else:
                quiet = 0
            total = total + term
        return total


def _cap(s: QSeries, T: int) -> QSeries:
    # exact intermediates are kept exact; everything else lives at the working order
    return s if s.is_exact else s.with_order(T)


def evaluate(e: Union[Expr, str], env: Optional[dict] = None, T: int = 40,
             window: int = DEFAULT_WINDOW, budget: int = DEFAULT_BUDGET) -> QSeries:
    """Value of an expression modulo q^(T+1).

    Work happens at a slightly higher internal order, which is raised when
    negative valuations eat into the precision.
    """
    if isinstance(e, str):
        e = parse(e)
    env = dict(env or {})
    slack = 8
    for _ in range(5):
        ev = Evaluator(T, window, budget, slack)
        try:
            result = ev.series(e, env)
        except OrderExceeded:
            slack *= 4
            continue
        if result.order is None or result.order >= T:
            return result.with_order(T) if result.order is not None else result.truncate(T)
        slack += 2 * (T - result.order) + 8
    raise EvalError(f"could not reach order {T}; precision lost to negative valuations")


# -- manifests ---------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    params: dict  # name -> tuple of values
    lhs: Expr
    rhs: Expr
    order: int
    lhs_text: str = ""
    rhs_text: str = ""

    def grid(self) -> list[dict]:
        names = sorted(self.params)
        return [dict(zip(names, combo)) for combo in itertools.product(*(self.params[n] for n in names))]


@dataclass(frozen=True)
class Manifest:
    checks: tuple = ()

    def tasks(self) -> list[tuple[Check, dict]]:
        return [(c, p) for c in self.checks for p in c.grid()]

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


_ALLOWED_KEYS = {"params", "lhs", "rhs", "order"}


def _parse_params(text: str, block: str) -> dict:
    out: dict = {}
    for item in filter(None, (s.strip() for s in re.split(r"[,;]", text))):
        if "=" not in item:
            raise ManifestError(f"[{block}] params: expected name=value, got {item!r}")
        name, value = (s.strip() for s in item.split("=", 1))
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name) or name == "q" or name in KEYWORDS:
            raise ManifestError(f"[{block}] params: bad parameter name {name!r}")
        if name in out:
            raise ManifestError(f"[{block}] params: {name} given twice")
        try:
            if ".." in value:
                lo, hi = (int(s) for s in value.split(".."))
                values = tuple(range(lo, hi + 1))
            else:
                values = tuple(int(s) for s in value.split("|"))
        except ValueError:
            raise ManifestError(f"[{block}] params: bad value {value!r} for {name}") from None
        out[name] = values
    return out


def parse_manifest(text: str, default_order: int = 40) -> Manifest:
    """Parse an INI-style manifest: one ``[name]`` block per check.

    Keys: ``lhs`` and ``rhs`` (required), ``order`` and ``params`` (optional,
    e.g. ``params = M=0..3, k=2`` or ``k=1|3``).
    """
    cp = configparser.ConfigParser(interpolation=None, strict=True, default_section="\x00")
    try:
        cp.read_string(text)
    except configparser.DuplicateSectionError as exc:
        raise ManifestError(f"duplicate check name [{exc.section}]") from None
    except configparser.Error as exc:
        raise ManifestError(str(exc).splitlines()[0]) from None
    checks = []
    for name in cp.sections():
        block = cp[name]
        extra = set(block) - _ALLOWED_KEYS
        if extra:
            raise ManifestError(f"[{name}] unknown key(s): {', '.join(sorted(extra))}")
        for key in ("lhs", "rhs"):
            if key not in block or not block[key].strip():
                raise ManifestError(f"[{name}] missing key {key!r}")
        try:
            order = int(block.get("order", str(default_order)))
        except ValueError:
            raise ManifestError(f"[{name}] order must be an integer") from None
        if order < 0:
            raise ManifestError(f"[{name}] order must be >= 0")
        sides = {}
        for key in ("lhs", "rhs"):
            try:
                sides[key] = parse(block[key])
            except DSLError as exc:
                raise ManifestError(f"[{name}] {key}: {exc}") from None
        checks.append(Check(name, _parse_params(block.get("params", ""), name),
                            sides["lhs"], sides["rhs"], order, block["lhs"].strip(), block["rhs"].strip()))
    return Manifest(tuple(checks))


def run_check(check: Check, params: dict, order: Optional[int] = None,
              window: int = DEFAULT_WINDOW, budget: int = DEFAULT_BUDGET):
    """Evaluate both sides of a manifest check and compare them coefficient-wise."""
    T = check.order if order is None else order
    t0 = time.perf_counter()
    lhs = evaluate(check.lhs, params, T, window, budget)
    rhs = evaluate(check.rhs, params, T, window, budget)
    diff = first_difference(lhs, rhs, T)
    return VerificationReport(check.name, dict(params), T, PASS if diff is None else FAIL,
                              Mismatch(*diff) if diff else None, time.perf_counter() - t0,
                              {}, lhs, rhs)


def load_manifest(path) -> Manifest:
    with open(path, encoding="utf-8") as fh:
        return parse_manifest(fh.read())


def shipped_manifest_text() -> str:
    return files("qbailey").joinpath("manifests/identities.ini").read_text(encoding="utf-8")
