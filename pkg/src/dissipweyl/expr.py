"""Recursive-descent parser for damping expressions over ``x, y, z``.

Grammar::

    expr     := term (('+' | '-') term)*
    term     := factor (('*' | '/') factor)*
    factor   := ('+' | '-') factor | power
    power    := base ('^' factor)?
    base     := number | 'x' | 'y' | 'z' | 'sqrt' '(' expr ')' | '(' expr ')'

Numbers are decimal with an optional exponent.  Unary signs bind looser
than ``^`` (``-x^2`` is ``-(x^2)``) and ``^`` is right-associative.  Trees evaluate
elementwise on numpy arrays, and ``str(tree)`` prints a fully
parenthesized form that parses back to an equal tree.
"""

import re
from dataclasses import dataclass

import numpy as np

from .errors import ExpressionSyntaxError, UnknownIdentifier

VARIABLES = ("x", "y", "z")

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class Num:
    value: float

    def __str__(self):
        return repr(float(self.value))

    def evaluate(self, env):
        return self.value


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name

    def evaluate(self, env):
        return env[self.name]


@dataclass(frozen=True)
class Neg:
    arg: object

    def __str__(self):
        return f"(-{self.arg})"

    def evaluate(self, env):
        return -self.arg.evaluate(env)


@dataclass(frozen=True)
class Sqrt:
    arg: object

    def __str__(self):
        return f"sqrt({self.arg})"

    def evaluate(self, env):
        return np.sqrt(self.arg.evaluate(env))


_BINOPS = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": np.divide,
    "^": np.power,
}


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"

    def evaluate(self, env):
        return _BINOPS[self.op](self.left.evaluate(env), self.right.evaluate(env))


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def tokenize(source):
    toks = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if not m or m.end() == pos:
            bad = pos + len(source[pos:]) - len(source[pos:].lstrip())
            raise ExpressionSyntaxError(f"unexpected character {source[bad]!r}", bad)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", n))
    return toks


class _Parser:
    def __init__(self, source):
        self.toks = tokenize(source)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def advance(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.tok
        if t.text != text or t.kind == "end":
            what = "end of input" if t.kind == "end" else repr(t.text)
            raise ExpressionSyntaxError(f"expected {text!r}, found {what}", t.pos)
        return self.advance()

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            raise ExpressionSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            arg = self.factor()
            return Neg(arg) if op == "-" else arg
        return self.power()

    def power(self):
        node = self.base()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            node = BinOp("^", node, self.factor())
        return node

    def base(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "name":
            self.advance()
            if t.text in VARIABLES:
                return Var(t.text)
            if t.text == "sqrt":
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Sqrt(arg)
            raise UnknownIdentifier(t.text, t.pos)
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ExpressionSyntaxError(f"expected a number, variable or '(', found {what}", t.pos)


def parse(source):
    """Parse ``source`` into an expression tree."""
    return _Parser(source).parse()


def free_variables(node):
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, BinOp):
        return free_variables(node.left) | free_variables(node.right)
    return free_variables(node.arg)


@dataclass(frozen=True)
class Constant:
    """Spatially constant damping."""

    gamma: float

    def __call__(self, x, y=0.0, z=0.0):
        shape = np.broadcast(np.asarray(x), np.asarray(y), np.asarray(z)).shape
        return np.full(shape, float(self.gamma)) if shape else float(self.gamma)

    def __str__(self):
        return repr(float(self.gamma))


@dataclass(frozen=True)
class Expression:
    """Damping given by an expression in the Cartesian coordinates."""

    source: str
    tree: object

    def __call__(self, x, y=0.0, z=0.0):
        x, y, z = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float), np.asarray(z, float))
        val = np.asarray(self.tree.evaluate({"x": x, "y": y, "z": z}), dtype=float)
        return np.broadcast_to(val, x.shape).copy() if x.shape else float(val)

    def __str__(self):
        return self.source


def parse_damping(source):
    """Parse a damping descriptor; variable-free input becomes a :class:`Constant`."""
    tree = parse(source)
    if not free_variables(tree):
        return Constant(float(tree.evaluate({})))
    return Expression(source, tree)
