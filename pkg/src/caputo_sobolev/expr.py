"""A small arithmetic expression language for coefficients and sources.

Grammar (``^`` is right-associative and binds tighter than unary minus)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | NAME | NAME "(" expr ("," expr)* ")" | "(" expr ")"

Names are the variables ``x`` and ``t`` (as allowed by the caller), the
constant ``pi`` and the functions ``sin``, ``cos``, ``exp``, ``gamma`` and
``powf(base, exponent)``. Expressions evaluate elementwise on numpy arrays.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mittag_leffler import gamma


class ExprError(ValueError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)

_FUNCS: dict[str, tuple[int, Callable]] = {
    "sin": (1, np.sin),
    "cos": (1, np.cos),
    "exp": (1, np.exp),
    "gamma": (1, gamma),
    "powf": (2, np.power),
}
_CONSTS = {"pi": np.pi}

Node = Callable[[dict], np.ndarray]


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    pos, out = 0, []
    src = src.rstrip()
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ExprError(f"unexpected character {src[pos:].lstrip()[:1]!r} at position {pos}")
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src: str, variables: frozenset[str]):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0
        self.variables = variables
        self.used: set[str] = set()

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def take(self, value: str | None = None) -> tuple[str, str, int]:
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            where = f"position {tok[2]}" if tok[0] != "end" else "end of input"
            raise ExprError(f"expected {value!r} at {where} in {self.src!r}")
        self.i += 1
        return tok

    def parse(self) -> Node:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprError(f"unexpected {val!r} at position {pos} in {self.src!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            node = _bin(np.add if op == "+" else np.subtract, node, rhs)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            node = _bin(np.multiply if op == "*" else np.true_divide, node, rhs)
        return node

    def unary(self) -> Node:
        if self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            inner = self.unary()
            return inner if op == "+" else (lambda env: np.negative(inner(env)))
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return _bin(np.power, base, self.unary())
        return base

    def atom(self) -> Node:
        kind, val, pos = self.take()
        if kind == "num":
            c = float(val)
            return lambda env: c
        if kind == "name":
            if self.peek()[1] == "(":
                return self.call(val, pos)
            if val in self.variables:
                self.used.add(val)
                return lambda env: env[val]
            if val in _CONSTS:
                c = _CONSTS[val]
                return lambda env: c
            raise ExprError(f"unknown name {val!r} at position {pos}; allowed variables: {sorted(self.variables)}")
        if val == "(":
            node = self.expr()
            self.take(")")
            return node
        where = f"position {pos}" if kind != "end" else "end of input"
        raise ExprError(f"unexpected {val or 'end'!r} at {where} in {self.src!r}")

    def call(self, name: str, pos: int) -> Node:
        if name not in _FUNCS:
            raise ExprError(f"unknown function {name!r} at position {pos}")
        arity, fn = _FUNCS[name]
        self.take("(")
        args = [self.expr()]
        while self.peek()[1] == ",":
            self.take()
            args.append(self.expr())
        self.take(")")
        if len(args) != arity:
            raise ExprError(f"{name} takes {arity} argument(s), got {len(args)}")
        return lambda env: fn(*(a(env) for a in args))


def _bin(fn, lhs: Node, rhs: Node) -> Node:
    return lambda env: fn(lhs(env), rhs(env))


@dataclass(frozen=True)
class Expression:
    source: str
    variables: frozenset[str]
    _node: Node
    used: frozenset[str] = frozenset()

    def __call__(self, **values) -> np.ndarray:
        missing = self.used - values.keys()
        if missing:
            raise ExprError(f"missing values for {sorted(missing)}")
        env = {k: np.asarray(v, dtype=float) for k, v in values.items()}
        shape = np.broadcast_shapes(*(np.shape(v) for v in env.values())) if env else ()
        with np.errstate(all="ignore"):
            out = self._node(env)
        return np.broadcast_to(np.asarray(out, dtype=float), shape).copy()


def compile_expr(src: str, variables: tuple[str, ...] = ("x", "t")) -> Expression:
    """Parse ``src`` once; the result is a vectorised callable of the named variables."""
    if not src.strip():
        raise ExprError("empty expression")
    parser = _Parser(src, frozenset(variables))
    node = parser.parse()
    return Expression(src, parser.variables, node, frozenset(parser.used))
