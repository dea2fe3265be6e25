"""Tiny expression language for user-supplied real functions of one variable.

Grammar (precedence climbing, ^ right-associative and binding tightest,
then unary minus, then * /, then + -):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | FUNC '(' expr ')' | VARIABLE | '(' expr ')'

Known function names: sin, cos, exp, abs, sqrt.  The only identifier allowed
besides those is the declared variable (``x`` by default).  Evaluation never
lets a non-finite value escape silently: division by zero, fractional powers
of negatives, even roots of negatives and overflow all raise typed errors.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .errors import EvaluationError

__all__ = [
    "FunctionExpr",
    "parse",
    "ExpressionSyntaxError",
    "UnknownIdentifierError",
    "ExpressionEvalError",
]


class ExpressionSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ExpressionSyntaxError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r}", offset)
        self.name = name


class ExpressionEvalError(EvaluationError):
    pass


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]

_FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "abs": abs,
}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num | ident | op | end
    text: str
    offset: int


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad = len(text) - len(stripped)
            raise ExpressionSyntaxError(f"unexpected character {text[bad]!r}", bad)
        if m.lastgroup == "num":
            tokens.append(_Token("num", m.group("num"), m.start("num")))
        elif m.lastgroup == "ident":
            tokens.append(_Token("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(_Token("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variable: str):
        self.text = text
        self.variable = variable
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> None:
        tok = self.peek()
        if tok.kind != "op" or tok.text != op:
            found = repr(tok.text) if tok.kind != "end" else "end of input"
            raise ExpressionSyntaxError(f"expected {op!r}, found {found}", tok.offset)
        self.advance()

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ExpressionSyntaxError(f"unexpected trailing {tok.text!r}", tok.offset)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            if tok.text == self.variable:
                return Var()
            if tok.text == "sqrt" or tok.text in _FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(tok.text, arg)
            raise UnknownIdentifierError(tok.text, tok.offset)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        found = tok.text if tok.kind != "end" else "end of input"
        raise ExpressionSyntaxError(
            f"expected a number, {self.variable!r}, function call or '(', found {found!r}",
            tok.offset,
        )


def _int_pow(base: float, e: int) -> float:
    # repeated multiplication keeps small monomials exact
    if e < 0:
        if base == 0.0:
            raise ExpressionEvalError("zero raised to a negative power")
        return 1.0 / _int_pow(base, -e)
    if e <= 64:
        out = 1.0
        for _ in range(e):
            out *= base
        return out
    out = 1.0
    acc = base
    while e:
        if e & 1:
            out *= acc
        acc *= acc
        e >>= 1
    return out


def _eval(node: Node, x: float) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval(node.operand, x)
    if isinstance(node, Call):
        arg = _eval(node.arg, x)
        if node.name == "sqrt":
            if arg < 0:
                raise ExpressionEvalError(f"square root of negative value {arg}")
            return math.sqrt(arg)
        try:
            out = _FUNCTIONS[node.name](arg)
        except (OverflowError, ValueError) as exc:
            raise ExpressionEvalError(f"{node.name}({arg}) failed: {exc}") from None
        return _check(out, node.name)
    left = _eval(node.left, x)
    right = _eval(node.right, x)
    op = node.op
    if op == "+":
        return _check(left + right, op)
    if op == "-":
        return _check(left - right, op)
    if op == "*":
        return _check(left * right, op)
    if op == "/":
        if right == 0.0:
            raise ExpressionEvalError(f"division by zero ({left} / 0)")
        return _check(left / right, op)
    # op == "^"
    if right == int(right) and abs(right) <= 2**31:
        return _check(_int_pow(left, int(right)), op)
    if left < 0:
        raise ExpressionEvalError(
            f"fractional power of negative base ({left} ^ {right})"
        )
    if left == 0.0 and right < 0:
        raise ExpressionEvalError("zero raised to a negative power")
    try:
        return _check(math.pow(left, right), op)
    except (OverflowError, ValueError) as exc:
        raise ExpressionEvalError(f"{left} ^ {right} failed: {exc}") from None


def _check(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise ExpressionEvalError(f"non-finite result from {what!r}")
    return value


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM_PREC = 9


def _to_source(node: Node, variable: str, ctx: float = 0.0) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return variable
    if isinstance(node, Call):
        return f"{node.name}({_to_source(node.arg, variable)})"
    if isinstance(node, Neg):
        body = "-" + _to_source(node.operand, variable, _PREC["^"])
        return f"({body})" if _NEG_PREC < ctx else body
    prec = _PREC[node.op]
    if node.op == "^":
        left = _to_source(node.left, variable, prec + 1)
        right = _to_source(node.right, variable, prec)
    else:
        left = _to_source(node.left, variable, prec)
        right = _to_source(node.right, variable, prec + 1)
    body = f"{left}{node.op}{right}"
    return f"({body})" if prec < ctx else body


@dataclass(frozen=True)
class FunctionExpr:
    """Parsed, immutable expression; evaluation is pure and shareable."""

    ast: Node
    variable: str = "x"

    def __call__(self, x: float) -> float:
        return _eval(self.ast, x)

    def to_source(self) -> str:
        return _to_source(self.ast, self.variable)

    def compose_square(self) -> "FunctionExpr":
        """The function z -> f(z^2), built by substitution (no re-parse)."""
        return FunctionExpr(_substitute(self.ast, BinOp("^", Var(), Num(2.0))), self.variable)


def _substitute(node: Node, replacement: Node) -> Node:
    if isinstance(node, Var):
        return replacement
    if isinstance(node, Neg):
        return Neg(_substitute(node.operand, replacement))
    if isinstance(node, BinOp):
        return BinOp(
            node.op,
            _substitute(node.left, replacement),
            _substitute(node.right, replacement),
        )
    if isinstance(node, Call):
        return Call(node.name, _substitute(node.arg, replacement))
    return node


def parse(text: str, variable: str = "x") -> FunctionExpr:
    """Parse an expression over one variable into an evaluable form."""
    return FunctionExpr(_Parser(text, variable).parse(), variable)
