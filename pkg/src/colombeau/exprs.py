"""A closed expression grammar for scalar nets.

``expr := term (('+'|'-') term)*``, ``term := unary (('*'|'/') unary)*``,
``unary := ('+'|'-') unary | power``, ``power := atom ('^' unary)?``,
``atom := number | name | name '(' expr ')' | '(' expr ')'``.

Names are the declared variables (default ``x, y, z``), ``eps``, ``pi`` and
``e``.  Functions: ``sin cos exp log sqrt`` and the eps-free mollifier pieces
``bump`` (the normalised bump, integral one) and ``step`` (its primitive), so
``bump(x/eps)/eps`` is a delta net and ``step(x/eps)`` a smoothed Heaviside.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import jets as J
from .errors import ParseError
from .jets import Jet
from .nets import BoxDomain, Focus, Net, preimage_foci

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(.))")
FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "bump", "step")
CONSTANTS = {"pi": math.pi, "e": math.e}


def _tokens(text: str) -> list:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", float(num)))
        elif name is not None:
            out.append(("name", name))
        elif op.strip():
            if op not in "+-*/^(),":
                raise ParseError(f"unexpected character {op!r} in {text!r}")
            out.append(("op", op))
        pos = m.end()
    return out


@dataclass(frozen=True)
class Node:
    kind: str  # num, var, eps, neg, add, sub, mul, div, pow, call
    value: object = None
    args: tuple = ()

    @property
    def uses_eps(self) -> bool:
        if self.kind == "eps" or (self.kind == "call" and self.value in ("bump", "step")):
            return True
        return any(a.uses_eps for a in self.args)


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.toks = _tokens(text)
        self.i = 0
        self.variables = tuple(variables)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, op=None):
        tok = self.peek()
        if tok[0] is None:
            raise ParseError(f"unexpected end of {self.text!r}")
        if op is not None and tok != ("op", op):
            raise ParseError(f"expected {op!r} in {self.text!r}, got {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> Node:
        if not self.toks:
            raise ParseError("empty expression")
        node = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input {self.toks[self.i][1]!r} in {self.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = Node("add" if op == "+" else "sub", args=(node, self.term()))
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            node = Node("mul" if op == "*" else "div", args=(node, self.unary()))
        return node

    def unary(self) -> Node:
        if self.peek() == ("op", "-"):
            self.take()
            return Node("neg", args=(self.unary(),))
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return Node("pow", args=(base, self.unary()))
        return base

    def atom(self) -> Node:
        kind, val = self.take()
        if kind == "num":
            return Node("num", val)
        if kind == "op" and val == "(":
            node = self.expr()
            self.take(")")
            return node
        if kind == "name":
            if val in FUNCTIONS:
                self.take("(")
                arg = self.expr()
                self.take(")")
                return Node("call", val, (arg,))
            if val == "eps":
                return Node("eps")
            if val in self.variables:
                return Node("var", self.variables.index(val))
            if val in CONSTANTS:
                return Node("num", CONSTANTS[val])
            raise ParseError(f"unknown name {val!r} in {self.text!r}")
        raise ParseError(f"unexpected {val!r} in {self.text!r}")


def parse_expression(text: str, variables: Sequence[str] = ("x", "y", "z")) -> Node:
    return _Parser(text, variables).parse()


def _profile():
    from .distributions import make_mollifier
    return make_mollifier(0)


def _call(name: str, a):
    if not isinstance(a, Jet):
        a = np.asarray(a, dtype=float)
        if name == "bump":
            out = _profile()(a)
        elif name == "step":
            out = _profile().cdf(a)
        else:
            with np.errstate(invalid="ignore", divide="ignore"):
                out = getattr(np, name)(a)
        return float(out) if out.ndim == 0 else out
    if name in ("bump", "step"):
        phi = _profile()
        v = np.real(a.value)
        k = a.order
        d = phi.derivatives(v, k)
        if name == "step":
            d = np.concatenate([phi.cdf(v)[None], d[:k]])
        return a.compose_univariate(d)
    return getattr(J, name)(a)


def evaluate(node: Node, eps: float, coords: Sequence):
    """Value of the tree with ``coords`` (jets or numbers) for the variables."""
    k = node.kind
    if k == "num":
        return node.value
    if k == "eps":
        return eps
    if k == "var":
        if node.value >= len(coords):
            raise ParseError(f"variable {node.value} used on a {len(coords)}-dimensional domain")
        return coords[node.value]
    args = [evaluate(a, eps, coords) for a in node.args]
    if k == "neg":
        return -args[0]
    if k == "add":
        return args[0] + args[1]
    if k == "sub":
        return args[0] - args[1]
    if k == "mul":
        return args[0] * args[1]
    if k == "div":
        return args[0] / args[1]
    if k == "pow":
        b, p = args
        if isinstance(p, Jet):
            return J.exp(p * J.log(b))
        if float(p).is_integer() and abs(p) <= 64:
            return b ** int(p)
        return J.power(b, float(p)) if isinstance(b, Jet) else np.power(b, float(p))
    if k == "call":
        return _call(node.value, args[0])
    raise ParseError(f"bad node {k}")


class _ArgMap:
    """The argument of a ``bump``/``step`` call viewed as a scalar map, for foci."""

    def __init__(self, node: Node):
        self.node = node

    def jets(self, eps, X, order, check=True):
        v = evaluate(self.node, eps, Jet.variables(X, order))
        if not isinstance(v, Jet):
            v = Jet.constant(v, X.shape[1], order, (X.shape[0],))
        return [v]


_UNIT = Net(BoxDomain.open((-math.inf,), (math.inf,)), lambda eps, X, k: Jet.variables(X, k)[0],
            foci=lambda eps, K: [Focus((0.0,), 0, 1.0)], label="bump-arg")


def _calls(node: Node) -> list:
    out = [node] if node.kind == "call" and node.value in ("bump", "step") else []
    for a in node.args:
        out.extend(_calls(a))
    return out


def expression_net(text: str, domain: BoxDomain, variables: Sequence[str] = ("x", "y", "z"),
                   max_order: int = 8) -> Net:
    """Net whose level ``eps`` is the expression with ``eps`` substituted.

    Each ``bump``/``step`` call contributes foci where its argument crosses the
    unit window, so eps-thin features are sampled.
    """
    node = parse_expression(text, variables[:domain.dim])
    n = domain.dim

    def jet_fn(eps, X, order):
        v = evaluate(node, eps, Jet.variables(X, order))
        if not isinstance(v, Jet):
            v = Jet.constant(v, n, order, (X.shape[0],))
        return v

    calls = _calls(node)

    def foci(eps, K):
        out = []
        for c in calls:
            out.extend(preimage_foci(_ArgMap(c.args[0]), eps, _UNIT, K))
        return out
    return Net(domain, jet_fn, max_order, "real", foci if calls and n else None, text)


def expression_function(text: str, variables: Sequence[str]):
    """``(eps, P) -> values`` for points ``P`` of shape ``(M, len(variables))``."""
    node = parse_expression(text, variables)

    def fn(eps, P):
        P = np.asarray(P, dtype=float)
        P = P.reshape(-1, len(variables)) if variables else P.reshape(P.shape[0] if P.ndim == 2 else 1, 0)
        v = evaluate(node, eps, [P[:, i] for i in range(P.shape[1])]) if P.shape[1] else \
            evaluate(node, eps, [])
        return np.broadcast_to(np.asarray(_numeric(v), dtype=float), (P.shape[0],)).copy()
    return fn


def _numeric(v):
    return v.value if isinstance(v, Jet) else v
