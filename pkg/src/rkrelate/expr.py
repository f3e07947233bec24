"""Arithmetic expressions over variables ``x1 .. xn``.

Grammar, loosest binding first::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')'

So ``-x1^2`` is ``-(x1^2)`` and ``2^-1`` is ``0.5``, as in Python.  Every
intermediate result is checked: a division by zero, a domain error or a
non-finite value raises :class:`EvaluationError` instead of leaking NaN/inf.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence, Union

from .errors import EvaluationError, ExpressionSyntaxError

FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sqrt": math.sqrt,
}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


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


# --------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<var>x(?P<idx>\d+))
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'num', 'var', 'name', 'op', 'end'
    text: str
    pos: int


def tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind == "idx":
            kind = "var"
        if kind != "ws":
            # 'x12abc' would match var then name; treat the whole word as a name
            if kind == "var" and m.end() < len(text) and (text[m.end()].isalpha() or text[m.end()] == "_"):
                m = re.compile(r"[A-Za-z_][A-Za-z_0-9]*").match(text, pos)
                kind = "name"
            tokens.append(_Token(kind, m.group(0), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


# --------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text: str, nvars: int | None):
        self.text = text
        self.nvars = nvars
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        return ExpressionSyntaxError(message, self.text, tok.pos)

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str):
        if not self.accept(op):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {op!r}, found {found!r}")

    def parse(self) -> Node:
        if self.tok.kind == "end":
            raise self.error("empty expression")
        node = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.accept("^"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "var":
            self.advance()
            index = int(tok.text[1:])
            if index < 1:
                raise self.error("variable indices start at x1", tok)
            if self.nvars is not None and index > self.nvars:
                raise self.error(f"variable {tok.text} exceeds dimension {self.nvars}", tok)
            return Var(index)
        if tok.kind == "name":
            if tok.text not in FUNCTIONS:
                known = ", ".join(sorted(FUNCTIONS))
                raise self.error(f"unknown function {tok.text!r} (known: {known})", tok)
            self.advance()
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Call(tok.text, arg)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}")


def parse(text: str, nvars: int | None = None) -> Node:
    """Parse ``text`` into an AST.

    If ``nvars`` is given, any variable ``xk`` with ``k > nvars`` is a
    syntax error reported at the variable's position.
    """
    return _Parser(text, nvars).parse()


# --------------------------------------------------------------------------
# evaluation


def _checked(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise EvaluationError(f"{what} produced non-finite value {value!r}")
    return value


def _apply_binop(op: str, a: float, b: float) -> float:
    try:
        if op == "+":
            r = a + b
        elif op == "-":
            r = a - b
        elif op == "*":
            r = a * b
        elif op == "/":
            r = a / b
        else:
            r = math.pow(a, b)
    except ZeroDivisionError:
        raise EvaluationError(f"division by zero in {a!r} / {b!r}") from None
    except (OverflowError, ValueError) as exc:
        raise EvaluationError(f"{a!r} {op} {b!r}: {exc}") from None
    return _checked(r, f"{a!r} {op} {b!r}")


def _apply_call(name: str, a: float) -> float:
    try:
        r = FUNCTIONS[name](a)
    except (OverflowError, ValueError) as exc:
        raise EvaluationError(f"{name}({a!r}): {exc}") from None
    return _checked(r, f"{name}({a!r})")


def evaluate(node: Node, args: Sequence[float]) -> float:
    """Tree-walking evaluation; ``args[0]`` binds ``x1``."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return _checked(float(args[node.index - 1]), f"x{node.index}")
    if isinstance(node, Neg):
        return -evaluate(node.operand, args)
    if isinstance(node, BinOp):
        return _apply_binop(node.op, evaluate(node.left, args), evaluate(node.right, args))
    if isinstance(node, Call):
        return _apply_call(node.name, evaluate(node.arg, args))
    raise TypeError(f"not an expression node: {node!r}")


def compile_node(node: Node) -> Callable[[Sequence[float]], float]:
    """Turn an AST into a closure; same operations as :func:`evaluate`, less dispatch."""
    if isinstance(node, Num):
        value = node.value
        return lambda args: value
    if isinstance(node, Var):
        k = node.index - 1

        def var(args):
            v = args[k]
            if not math.isfinite(v):
                raise EvaluationError(f"x{k + 1} is non-finite ({v!r})")
            return v

        return var
    if isinstance(node, Neg):
        inner = compile_node(node.operand)
        return lambda args: -inner(args)
    if isinstance(node, Call):
        inner = compile_node(node.arg)
        name = node.name
        return lambda args: _apply_call(name, inner(args))
    if isinstance(node, BinOp):
        left, right = compile_node(node.left), compile_node(node.right)
        op = node.op
        isfinite = math.isfinite
        if op == "+":
            def add(args):
                r = left(args) + right(args)
                if not isfinite(r):
                    raise EvaluationError(f"addition produced non-finite value {r!r}")
                return r
            return add
        if op == "-":
            def sub(args):
                r = left(args) - right(args)
                if not isfinite(r):
                    raise EvaluationError(f"subtraction produced non-finite value {r!r}")
                return r
            return sub
        if op == "*":
            def mul(args):
                r = left(args) * right(args)
                if not isfinite(r):
                    raise EvaluationError(f"multiplication produced non-finite value {r!r}")
                return r
            return mul
        return lambda args: _apply_binop(op, left(args), right(args))
    raise TypeError(f"not an expression node: {node!r}")


# --------------------------------------------------------------------------
# printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_UNARY_PREC = 3


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _UNARY_PREC
    return 5


def to_text(node: Node) -> str:
    """Render ``node`` so that ``parse(to_text(node))`` evaluates identically.

    Literals use the shortest round-trip repr, and parentheses are inserted
    wherever the tree shape differs from what the grammar would rebuild.
    """
    if isinstance(node, Num):
        text = repr(float(node.value))
        if node.value < 0 or text.startswith("-"):
            return f"({text})"
        if "inf" in text or "nan" in text:
            raise ValueError(f"cannot print non-finite literal {node.value!r}")
        return text
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Call):
        return f"{node.name}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        if _prec(node.operand) < _UNARY_PREC:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        left, right = to_text(node.left), to_text(node.right)
        if node.op == "^":
            # base must be an atom; exponent may be a unary/power chain
            if _prec(node.left) <= p:
                left = f"({left})"
            if _prec(node.right) < _UNARY_PREC:
                right = f"({right})"
        else:
            if _prec(node.left) < p:
                left = f"({left})"
            # left-associative: equal precedence on the right needs parens
            if _prec(node.right) <= p:
                right = f"({right})"
        return f"{left} {node.op} {right}"
    raise TypeError(f"not an expression node: {node!r}")


def max_var(node: Node) -> int:
    """Largest variable index referenced (0 for a constant expression)."""
    if isinstance(node, Var):
        return node.index
    if isinstance(node, (Neg, Call)):
        return max_var(node.operand if isinstance(node, Neg) else node.arg)
    if isinstance(node, BinOp):
        return max(max_var(node.left), max_var(node.right))
    return 0


class Expression:
    """A parsed, compiled expression. Call it with a sequence of floats."""

    __slots__ = ("text", "node", "_fn")

    def __init__(self, text: str, nvars: int | None = None):
        self.text = text
        self.node = parse(text, nvars)
        self._fn = compile_node(self.node)

    @classmethod
    def from_node(cls, node: Node) -> "Expression":
        return cls(to_text(node))

    @property
    def nvars(self) -> int:
        return max_var(self.node)

    def __call__(self, args: Sequence[float]) -> float:
        return self._fn(args)

    def __repr__(self):
        return f"Expression({self.text!r})"
