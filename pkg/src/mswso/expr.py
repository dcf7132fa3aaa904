"""Real-valued coefficient and map expressions.

A small recursive-descent parser for formulas such as ``2*x1/(1+x1)`` or
``abs(x1-0.5)+x2^2``.  Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom ('^' exponent)?
    atom   := number | variable | func '(' expr ')' | '(' expr ')'
    exponent := '-'? number | '(' '-'? number ')'

Variables are ``x1`` .. ``x<m>``; when the arity is 1 the bare name ``x`` is
accepted as an alias of ``x1``.  Functions are ``abs``, ``exp``, ``ln`` and
``sqrt``.  Evaluation accepts scalars or numpy arrays (one array per
coordinate) and raises :class:`ExprDomainError` instead of returning
non-finite values.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

FUNCTIONS = ("abs", "exp", "ln", "sqrt")
BINARY_OPS = ("+", "-", "*", "/", "^")


class ExprError(ValueError):
    """Base class for expression parse errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, offset: int, expected: str, found: str):
        self.offset = offset
        self.expected = expected
        self.found = found
        super().__init__(f"syntax error at offset {offset}: expected {expected}, found {found}")


class UnknownIdentifier(ExprError):
    def __init__(self, offset: int, name: str):
        self.offset = offset
        self.name = name
        super().__init__(f"unknown identifier {name!r} at offset {offset}")


class ArityError(ExprError):
    def __init__(self, offset: int, index: int, arity: int):
        self.offset = offset
        self.index = index
        self.arity = arity
        super().__init__(f"variable x{index} at offset {offset} exceeds arity {arity}")


class ExprDomainError(ArithmeticError):
    """Evaluation left the real domain (ln/sqrt/division/overflow)."""


# -- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Unary:
    op: str  # 'neg' or a function name
    operand: "Node"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"


Node = Union[Const, Var, Unary, Binary]


@dataclass(frozen=True)
class Expr:
    """Parsed expression of fixed arity."""

    root: Node
    arity: int

    def __call__(self, *coords):
        return evaluate(self, coords)

    def __str__(self) -> str:
        return to_text(self.root)


# -- tokenizer -------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    offset: int


def _tokenize(source: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExprSyntaxError(pos, "token", repr(source[pos]))
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(source)))
    return toks


class _Parser:
    def __init__(self, source: str, arity: int):
        self.toks = _tokenize(source)
        self.i = 0
        self.arity = arity

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _fail(self, expected: str):
        t = self.tok
        raise ExprSyntaxError(t.offset, expected, "end of input" if t.kind == "eof" else repr(t.text))

    def _accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def _expect(self, text: str):
        if not self._accept(text):
            self._fail(repr(text))

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "eof":
            self._fail("operator or end of input")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = Binary(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self._accept("-"):
            return Unary("neg", self.factor())
        node = self.atom()
        if self._accept("^"):
            node = Binary("^", node, self.exponent())
        return node

    def exponent(self) -> Node:
        if self._accept("("):
            node = self._signed_number()
            self._expect(")")
            return node
        return self._signed_number()

    def _signed_number(self) -> Node:
        neg = self._accept("-")
        if self.tok.kind != "number":
            self._fail("number")
        value = float(self.tok.text)
        self.i += 1
        return Const(-value if neg else value)

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "number":
            self.i += 1
            return Const(float(t.text))
        if t.kind == "ident":
            self.i += 1
            if t.text in FUNCTIONS:
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return Unary(t.text, arg)
            return self._variable(t)
        if self._accept("("):
            node = self.expr()
            self._expect(")")
            return node
        self._fail("number, variable, function or '('")

    def _variable(self, t: _Tok) -> Var:
        if t.text == "x" and self.arity == 1:
            return Var(1)
        m = re.fullmatch(r"x([1-9]\d*)", t.text)
        if m is None:
            raise UnknownIdentifier(t.offset, t.text)
        idx = int(m.group(1))
        if idx > self.arity:
            raise ArityError(t.offset, idx, self.arity)
        return Var(idx)


def parse(source: str, arity: int) -> Expr:
    """Parse ``source`` into an :class:`Expr` over ``x1..x<arity>``.

    Raises :class:`ExprSyntaxError` (with byte offset), :class:`UnknownIdentifier`
    or :class:`ArityError`.
    """
    if arity < 0:
        raise ValueError("arity must be non-negative")
    if not source or not source.strip():
        raise ExprSyntaxError(0, "expression", "end of input")
    return Expr(_Parser(source, arity).parse(), arity)


# -- evaluation ------------------------------------------------------------

def _check_finite(value, what: str):
    if not np.all(np.isfinite(value)):
        raise ExprDomainError(f"{what} produced a non-finite value")
    return value


def _eval(node: Node, xs):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return xs[node.index - 1]
    if isinstance(node, Unary):
        v = _eval(node.operand, xs)
        op = node.op
        if op == "neg":
            return -v
        if op == "abs":
            return np.abs(v)
        if op == "exp":
            with np.errstate(over="ignore"):
                return _check_finite(np.exp(v), "exp")
        if op == "ln":
            if np.any(np.asarray(v) <= 0):
                raise ExprDomainError("ln of a non-positive argument")
            return np.log(v)
        if op == "sqrt":
            if np.any(np.asarray(v) < 0):
                raise ExprDomainError("sqrt of a negative argument")
            return np.sqrt(v)
        raise AssertionError(op)
    lhs = _eval(node.left, xs)
    rhs = _eval(node.right, xs)
    op = node.op
    if op == "+":
        return lhs + rhs
    if op == "-":
        return lhs - rhs
    if op == "*":
        return lhs * rhs
    if op == "/":
        if np.any(np.asarray(rhs) == 0):
            raise ExprDomainError("division by zero")
        return lhs / rhs
    if op == "^":
        base = np.asarray(lhs, dtype=float)
        if rhs != int(rhs) and np.any(base < 0):
            raise ExprDomainError("fractional power of a negative base")
        if rhs < 0 and np.any(base == 0):
            raise ExprDomainError("negative power of zero")
        with np.errstate(over="ignore"):
            out = np.power(base, rhs)
        return _check_finite(out, "pow")
    raise AssertionError(op)


def evaluate(e: Expr, point) -> float | np.ndarray:
    """Evaluate ``e`` at ``point`` (a sequence of ``arity`` scalars or arrays).

    Scalar input gives a Python float; array coordinates broadcast.
    """
    xs = list(point)
    if len(xs) != e.arity:
        raise ValueError(f"expected {e.arity} coordinates, got {len(xs)}")
    scalar = all(np.ndim(x) == 0 for x in xs)
    xs = [np.asarray(x, dtype=float) for x in xs]
    out = _eval(e.root, xs)
    if scalar:
        return float(out)
    return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast_shapes(*(x.shape for x in xs))).copy()


# -- printing --------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _num(value: float) -> str:
    text = repr(float(value))
    if value < 0 or text.startswith("-"):
        return f"(-{repr(-float(value))})"
    return text


def _prec(node: Node) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary) and node.op == "neg":
        return 3
    return 5  # atoms, calls, and negative constants (printed parenthesized)


def to_text(node: Node) -> str:
    """Print ``node`` with the minimum parentheses needed to re-parse it."""
    if isinstance(node, Expr):
        node = node.root
    if isinstance(node, Const):
        return _num(node.value)
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Unary):
        if node.op == "neg":
            inner = to_text(node.operand)
            if _prec(node.operand) < 3:
                inner = f"({inner})"
            return f"-{inner}"
        return f"{node.op}({to_text(node.operand)})"
    if node.op == "^":
        base = to_text(node.left)
        if _prec(node.left) < 5:
            base = f"({base})"
        return f"{base}^{_num(node.right.value)}"
    p = _PREC[node.op]
    left = to_text(node.left)
    if _prec(node.left) < p:
        left = f"({left})"
    right = to_text(node.right)
    # left-associative: equal precedence on the right needs parentheses
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left}{node.op}{right}"
