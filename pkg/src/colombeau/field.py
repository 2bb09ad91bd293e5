"""Truncated series in the infinitesimal ``rho`` with rational exponents.

An :class:`AsymptoticNumber` is ``sum c_i rho^{q_i} + O(rho^Q)``.  ``Q = None``
means the series is exact.  Exponents are :class:`fractions.Fraction` so
Newton polygon geometry stays exact; coefficients are machine floats or
complex numbers.
"""

from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import InsufficientPrecisionError, NotASquareError, ParseError, ShapeError

REAL = "real"
COMPLEX = "complex"
DROP_TOL = 1e-12
DEFAULT_TARGET = Fraction(8)

LESS, EQUAL, GREATER = "Less", "Equal", "Greater"


class Infinite(ArithmeticError):
    """Raised by :func:`standard_part` for numbers of negative valuation."""


def _frac(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, float):
        return Fraction(q).limit_denominator(10 ** 6)
    return Fraction(q)


def _qmin(*qs):
    finite = [q for q in qs if q is not None]
    return min(finite) if finite else None


def _qadd(a, b):
    return None if a is None or b is None else a + b


class AsymptoticNumber:
    """Immutable truncated series; see the module docstring."""

    __slots__ = ("terms", "error_order", "kind")

    def __init__(self, terms: Iterable = (), error_order=None, kind: str | None = None):
        merged: dict = {}
        for q, c in terms:
            q = _frac(q)
            merged[q] = merged.get(q, 0) + c
        if kind is None:
            kind = COMPLEX if any(isinstance(c, complex) for c in merged.values()) else REAL
        if kind not in (REAL, COMPLEX):
            raise ShapeError(f"unknown scalar kind {kind!r}")
        Q = None if error_order is None else _frac(error_order)
        conv = complex if kind == COMPLEX else float
        out = []
        for q in sorted(merged):
            c = merged[q]
            if kind == REAL and isinstance(c, complex):
                if c.imag != 0:
                    raise ShapeError("complex coefficient in a real-kind number")
                c = c.real
            c = conv(c)
            if c == 0 or (Q is not None and q >= Q):
                continue
            out.append((q, c))
        object.__setattr__(self, "terms", tuple(out))
        object.__setattr__(self, "error_order", Q)
        object.__setattr__(self, "kind", kind)

    def __setattr__(self, name, value):
        raise AttributeError("AsymptoticNumber is immutable")

    # constructors
    @classmethod
    def constant(cls, c, kind=None):
        return cls([(0, c)], None, kind)

    @classmethod
    def monomial(cls, c, q, kind=None):
        return cls([(q, c)], None, kind)

    @classmethod
    def big_o(cls, Q, kind=REAL):
        return cls((), Q, kind)

    @classmethod
    def coerce(cls, x) -> "AsymptoticNumber":
        if isinstance(x, AsymptoticNumber):
            return x
        if isinstance(x, (int, float, complex, np.number)):
            return cls.constant(x.item() if isinstance(x, np.number) else x)
        raise TypeError(f"cannot interpret {x!r} as an asymptotic number")

    # basic properties
    @property
    def valuation(self):
        """Least exponent present, or the error order for term-less numbers (None = exact zero)."""
        return self.terms[0][0] if self.terms else self.error_order

    @property
    def leading(self):
        return self.terms[0] if self.terms else None

    @property
    def is_exact(self) -> bool:
        return self.error_order is None

    @property
    def is_zero(self) -> bool:
        return not self.terms and self.error_order is None

    def exact_part(self) -> "AsymptoticNumber":
        return AsymptoticNumber(self.terms, None, self.kind)

    def truncate(self, Q) -> "AsymptoticNumber":
        return AsymptoticNumber(self.terms, _qmin(self.error_order, _frac(Q)), self.kind)

    def coefficient(self, q) -> float | complex:
        return dict(self.terms).get(_frac(q), 0.0)

    def as_kind(self, kind: str) -> "AsymptoticNumber":
        if kind == self.kind:
            return self
        if kind == COMPLEX:
            return AsymptoticNumber([(q, complex(c)) for q, c in self.terms], self.error_order, COMPLEX)
        return AsymptoticNumber(self.terms, self.error_order, REAL)

    def real_part(self) -> "AsymptoticNumber":
        return AsymptoticNumber([(q, complex(c).real) for q, c in self.terms], self.error_order, REAL)

    def imag_part(self) -> "AsymptoticNumber":
        return AsymptoticNumber([(q, complex(c).imag) for q, c in self.terms], self.error_order, REAL)

    def evaluate(self, eps: float):
        """Value of the exact part at ``rho = eps``."""
        total = 0.0 if self.kind == REAL else 0j
        for q, c in self.terms:
            total = total + c * eps ** float(q)
        return total

    # arithmetic
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return neg(self)

    def __sub__(self, other):
        return add(self, neg(AsymptoticNumber.coerce(other)))

    def __rsub__(self, other):
        return add(AsymptoticNumber.coerce(other), neg(self))

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = AsymptoticNumber.coerce(other)
        return mul(self, inverse(other, _division_target(self, other)))

    def __rtruediv__(self, other):
        return AsymptoticNumber.coerce(other) / self

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("only integer powers")
        if k < 0:
            return inverse(self, DEFAULT_TARGET) ** (-k)
        result = AsymptoticNumber.constant(1, self.kind)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, AsymptoticNumber):
            try:
                other = AsymptoticNumber.coerce(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms and self.error_order == other.error_order

    def __hash__(self):
        return hash((self.terms, self.error_order))

    def __repr__(self):
        return f"AsymptoticNumber({format_number(self)!r})"

    def __str__(self):
        return format_number(self)


AN = AsymptoticNumber
RHO = AsymptoticNumber.monomial(1.0, 1)


def _pair(a, b):
    a = AsymptoticNumber.coerce(a)
    b = AsymptoticNumber.coerce(b)
    if a.kind != b.kind:
        a, b = a.as_kind(COMPLEX), b.as_kind(COMPLEX)
    return a, b


def add(a, b) -> AsymptoticNumber:
    a, b = _pair(a, b)
    acc: dict = {}
    scale: dict = {}
    for q, c in a.terms + b.terms:
        acc[q] = acc.get(q, 0) + c
        scale[q] = max(scale.get(q, 0.0), abs(c))
    terms = [(q, c) for q, c in acc.items() if abs(c) > DROP_TOL * scale[q]]
    return AsymptoticNumber(terms, _qmin(a.error_order, b.error_order), a.kind)


def neg(a) -> AsymptoticNumber:
    a = AsymptoticNumber.coerce(a)
    return AsymptoticNumber([(q, -c) for q, c in a.terms], a.error_order, a.kind)


def mul(a, b) -> AsymptoticNumber:
    a, b = _pair(a, b)
    Q = _qmin(_qadd(a.error_order, b.valuation), _qadd(b.error_order, a.valuation))
    acc: dict = {}
    scale: dict = {}
    for qa, ca in a.terms:
        for qb, cb in b.terms:
            q = qa + qb
            if Q is not None and q >= Q:
                continue
            p = ca * cb
            acc[q] = acc.get(q, 0) + p
            scale[q] = max(scale.get(q, 0.0), abs(p))
    terms = [(q, c) for q, c in acc.items() if abs(c) > DROP_TOL * scale[q]]
    return AsymptoticNumber(terms, Q, a.kind)


def _unit_part(a: AsymptoticNumber):
    """Split ``a = c0 rho^q0 (1 + u)``; returns ``(c0, q0, u)``."""
    q0, c0 = a.terms[0]
    rel_Q = None if a.error_order is None else a.error_order - q0
    u = AsymptoticNumber([(q - q0, c / c0) for q, c in a.terms[1:]], rel_Q, a.kind)
    return c0, q0, u


def _series(u: AsymptoticNumber, coeffs, R) -> AsymptoticNumber:
    """``sum_k coeffs(k) u^k`` truncated at relative order ``R`` (u has positive valuation)."""
    total = AsymptoticNumber.constant(1.0, u.kind).truncate(R)
    if not u.terms and u.error_order is None:
        return AsymptoticNumber.constant(1.0, u.kind)
    gap = u.valuation
    kmax = math.ceil(R / gap) + 1
    power = AsymptoticNumber.constant(1.0, u.kind)
    for k in range(1, kmax + 1):
        power = mul(power, u).truncate(R)
        ck = coeffs(k)
        total = add(total, mul(AsymptoticNumber.constant(ck, u.kind), power))
    return total.truncate(R)


def inverse(a, target=None) -> AsymptoticNumber:
    """``b`` with ``a*b = 1 + O(rho^R)``, ``R = min(target, Q_a - v_a)``; exact for monomials."""
    a = AsymptoticNumber.coerce(a)
    if not a.terms:
        raise ZeroDivisionError("no invertible information in a term-less number")
    c0, q0, u = _unit_part(a)
    lead = AsymptoticNumber.monomial(1 / c0, -q0, a.kind)
    if not u.terms and u.error_order is None:
        return lead
    target = DEFAULT_TARGET if target is None else _frac(target)
    R = _qmin(target, u.error_order)
    if R <= 0:
        raise InsufficientPrecisionError("inverse has no significant terms", exponent=a.error_order)
    return mul(lead, _series(u, lambda k: (-1.0) ** k, R))


def _division_target(num: AsymptoticNumber, den: AsymptoticNumber):
    if num.error_order is None and den.error_order is None:
        return DEFAULT_TARGET
    return None


def sqrt(a, target=None) -> AsymptoticNumber:
    """Square root with ``b*b = a + O(rho^target)``; principal branch for complex kind."""
    a = AsymptoticNumber.coerce(a)
    if not a.terms:
        if a.error_order is None:
            return a
        return AsymptoticNumber.big_o(a.error_order / 2, a.kind)
    c0, q0, u = _unit_part(a)
    if a.kind == REAL:
        if c0 < 0:
            raise NotASquareError(f"leading coefficient {c0} is negative")
        root = math.sqrt(c0)
    else:
        root = cmath.sqrt(c0)
    lead = AsymptoticNumber.monomial(root, q0 / 2, a.kind)
    if not u.terms and u.error_order is None:
        return lead
    target = DEFAULT_TARGET + q0 if target is None else _frac(target)
    R = _qmin(target - q0, u.error_order)
    if R <= 0:
        raise InsufficientPrecisionError("square root has no significant terms", exponent=target)

    def binom(k):
        c = 1.0
        for i in range(k):
            c *= (0.5 - i) / (i + 1)
        return c
    return mul(lead, _series(u, binom, R))


def compare(a, b) -> str:
    """Sign of the leading coefficient of ``a - b`` (real kind)."""
    d = AsymptoticNumber.coerce(a) - AsymptoticNumber.coerce(b)
    if d.kind != REAL:
        raise ShapeError("comparison needs real-kind numbers")
    if not d.terms:
        return EQUAL
    return GREATER if d.terms[0][1] > 0 else LESS


def standard_part(a) -> float:
    a = AsymptoticNumber.coerce(a)
    if a.terms and a.terms[0][0] < 0:
        raise Infinite(f"valuation {a.terms[0][0]} is negative")
    return a.coefficient(0)


def to_scalar_net(a):
    """The constant-in-x net ``eps -> sum c_i eps^q_i`` on ``R^0``."""
    from .nets import BoxDomain, Net

    a = AsymptoticNumber.coerce(a)

    def jet_fn(eps, X, order):
        return a.evaluate(eps)
    return Net(BoxDomain.point(), jet_fn, kind=a.kind, label=format_number(a))


# polynomials -------------------------------------------------------------------


def poly_eval(coeffs: Sequence, x) -> AsymptoticNumber:
    """Horner evaluation; ``coeffs`` ascending in degree."""
    x = AsymptoticNumber.coerce(x)
    acc = AsymptoticNumber.coerce(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _shift(coeffs: list, r: AsymptoticNumber, bounds) -> list:
    """Coefficients of ``S(y) = P(r + y)`` truncated at ``bounds[j]``."""
    p = len(coeffs) - 1
    powers = [AsymptoticNumber.constant(1.0, r.kind)]
    for _ in range(p):
        powers.append(powers[-1] * r)
    out = []
    for j in range(p + 1):
        acc = AsymptoticNumber.constant(0.0, r.kind)
        for i in range(j, p + 1):
            acc = acc + coeffs[i] * powers[i - j] * float(math.comb(i, j))
        if bounds[j] is not None:
            acc = acc.truncate(bounds[j])
        out.append(acc)
    return out


def _lower_hull(points: list) -> list:
    """Lower convex hull of ``(j, v)`` points sorted by j (exact fractions)."""
    hull: list = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def _polish(coeffs_desc: np.ndarray, z: complex) -> complex:
    d = np.polyder(coeffs_desc)
    for _ in range(3):
        fd = np.polyval(d, z)
        if fd == 0:
            break
        step = np.polyval(coeffs_desc, z) / fd
        cand = z - step
        if not np.isfinite(cand) or abs(np.polyval(coeffs_desc, cand)) >= abs(np.polyval(coeffs_desc, z)):
            break
        z = cand
    return complex(z)


def _cluster(zs: list, tol: float = 1e-3) -> list:
    """Group numerically equal roots; returns ``(mean, multiplicity)`` pairs."""
    groups: list = []
    for z in zs:
        for g in groups:
            if abs(z - g[0]) <= tol * max(1.0, abs(g[0])):
                g.append(z)
                break
        else:
            groups.append([z])
    return [(complex(np.mean(g)), len(g)) for g in groups]


def _clean(z: complex) -> complex:
    re_, im = z.real, z.imag
    if abs(im) <= 1e-13 * max(1.0, abs(re_)):
        im = 0.0
    if abs(re_) <= 1e-13 * max(1.0, abs(im)):
        re_ = 0.0
    return complex(re_, im)


MAX_DEPTH = 64


def roots(coeffs: Sequence, target=None) -> list:
    """Roots of ``sum coeffs[j] x^j`` with multiplicity via Newton-Puiseux.

    Each returned root ``r`` satisfies ``valuation(P(r.exact_part())) >= target``.
    """
    target = DEFAULT_TARGET if target is None else _frac(target)
    P = [AsymptoticNumber.coerce(c).as_kind(COMPLEX) for c in coeffs]
    while P and P[-1].is_zero:
        P.pop()
    if len(P) < 2:
        raise ValueError("root finding needs degree at least 1")
    if not P[-1].terms:
        raise InsufficientPrecisionError("leading coefficient is not invertible",
                                         exponent=P[-1].error_order)
    out: list = []
    zero = AsymptoticNumber((), None, COMPLEX)
    _branch(P, zero, None, len(P) - 1, target, out, 0)
    return out


def _branch(P, r, v_last, mult, target, out, depth):
    if depth > MAX_DEPTH:
        raise InsufficientPrecisionError("Newton-Puiseux iteration did not reach the target", exponent=target)
    p = len(P) - 1
    bounds = [None] + [None if v_last is None else target - j * v_last for j in range(1, p + 1)]
    S = _shift(P, r, bounds)
    S0 = S[0]
    v0 = S0.valuation
    if v0 is None or v0 >= target:
        err = target
        if v0 is not None:
            for j in range(1, mult + 1):
                if S[j].terms:
                    err = min(err, (v0 - S[j].valuation) / j)
        if err < target and S0.terms:
            # the residual is small enough but the root is still coarse: refine
            # further when the data allow, else report the coarse root
            finer: list = []
            try:
                _polygon(P, S, r, v_last, target, finer, depth)
            except InsufficientPrecisionError:
                finer = []
            if len(finer) == mult:
                out.extend(finer)
                return
        root = AsymptoticNumber(r.terms, err, COMPLEX)
        out.extend([root] * mult)
        return
    if not S0.terms:
        raise InsufficientPrecisionError(
            f"constant coefficient is only known as O(r^{S0.error_order})", exponent=S0.error_order)
    _polygon(P, S, r, v_last, target, out, depth)


def _polygon(P, S, r, v_last, target, out, depth):
    """One Newton polygon step from the shifted coefficients ``S`` of ``P(r + y)``."""
    p = len(S) - 1
    known = [(Fraction(j), S[j].valuation) for j in range(p + 1) if S[j].terms]
    unknown = [(j, S[j].error_order) for j in range(p + 1) if not S[j].terms and S[j].error_order is not None]
    hull = _lower_hull(known)
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        gamma = (y1 - y2) / (x2 - x1)
        if v_last is not None and gamma <= v_last:
            continue
        j0, j1 = int(x1), int(x2)
        if gamma >= target:
            # corrections at or beyond the target order are invisible
            out.extend([AsymptoticNumber(r.terms, target, COMPLEX)] * (j1 - j0))
            continue
        level = y1 + x1 * gamma
        for j, Qj in unknown:
            if Qj + j * gamma <= level:
                raise InsufficientPrecisionError(
                    f"coefficient of y^{j} known only to O(r^{Qj}), needed to resolve exponent {gamma}",
                    exponent=Qj)
        on_seg = {j: S[j].terms[0][1] for j in range(j0, j1 + 1)
                  if S[j].terms and S[j].valuation + j * gamma == level}
        char = np.array([on_seg.get(j, 0) for j in range(j1, j0 - 1, -1)], dtype=complex)
        for c, k in _cluster(list(np.roots(char))):
            # a k-fold root is a simple root of the (k-1)-th derivative
            c = _clean(_polish(np.polyder(char, k - 1) if k > 1 else char, c))
            step = AsymptoticNumber.monomial(c, gamma, COMPLEX)
            _branch(P, r + step, gamma, k, target, out, depth + 1)


# text syntax ---------------------------------------------------------------------


def _fmt_coef(c) -> str:
    if isinstance(c, complex):
        return repr(c)
    if float(c).is_integer() and abs(c) < 1e17:
        return str(int(c))
    return repr(float(c))


def _fmt_exp(q: Fraction) -> str:
    if q.denominator == 1 and q >= 0:
        return str(q.numerator)
    return "{" + str(q) + "}"


def format_number(a: AsymptoticNumber) -> str:
    """Canonical text form, e.g. ``1 - 1*r^1 + 1*r^2 + O(r^3)``."""
    parts: list = []
    for q, c in a.terms:
        neg_ = isinstance(c, float) and (c < 0 or (c == 0 and math.copysign(1, c) < 0))
        mag = -c if neg_ and parts else c
        body = _fmt_coef(mag) if q == 0 else f"{_fmt_coef(mag)}*r^{_fmt_exp(q)}"
        if parts:
            parts.append(("- " if neg_ else "+ ") + body)
        else:
            parts.append(body)
    if a.error_order is not None:
        big = f"O(r^{_fmt_exp(a.error_order)})"
        parts.append(("+ " + big) if parts else big)
    if not parts:
        return "0j" if a.kind == COMPLEX else "0"
    return " ".join(parts)


_TOKEN = re.compile(r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?j?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(){},]))")


def _tokenize(text: str) -> list:
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at position {pos}: {text[pos:pos + 10]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    out.append(("end", ""))
    return out


class _Poly:
    """Polynomial in ``x`` with asymptotic coefficients, used while parsing."""

    def __init__(self, coeffs: dict):
        self.c = {k: v for k, v in coeffs.items()}

    @classmethod
    def number(cls, a):
        return cls({0: AsymptoticNumber.coerce(a)})

    @property
    def degree(self) -> int:
        return max(self.c) if self.c else 0

    def scalar(self) -> AsymptoticNumber:
        if any(k > 0 for k in self.c):
            raise ParseError("polynomial variable x is only allowed inside roots(...)")
        return self.c.get(0, AsymptoticNumber())

    def __add__(self, o):
        out = dict(self.c)
        for k, v in o.c.items():
            out[k] = out[k] + v if k in out else v
        return _Poly(out)

    def __neg__(self):
        return _Poly({k: -v for k, v in self.c.items()})

    def __mul__(self, o):
        out: dict = {}
        for i, a in self.c.items():
            for j, b in o.c.items():
                out[i + j] = out[i + j] + a * b if i + j in out else a * b
        return _Poly(out)

    def ascending(self) -> list:
        zero = AsymptoticNumber()
        return [self.c.get(k, zero) for k in range(self.degree + 1)]


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok

    def parse(self):
        val = self.expr()
        if self.peek()[0] != "end":
            raise ParseError(f"trailing input at {self.peek()[1]!r}")
        return val

    def expr(self):
        val = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val + (-rhs)
        return val

    def term(self):
        val = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                val = val * rhs
            else:
                val = _Poly.number(val.scalar() / rhs.scalar()) if not val.degree else \
                    val * _Poly.number(inverse(rhs.scalar()))
        return val

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        kind, tok = self.peek()
        if kind == "name" and tok == "r" and self.toks[self.i + 1][1] == "^":
            self.take()
            self.take("^")
            return _Poly.number(AsymptoticNumber.monomial(1.0, self.exponent()))
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            k = self.exponent()
            if k.denominator != 1 or k < 0:
                raise ParseError("only non-negative integer powers of expressions")
            out = _Poly.number(1.0)
            for _ in range(int(k)):
                out = out * base
            return out
        return base

    def exponent(self) -> Fraction:
        sign = 1
        while self.peek()[1] == "-":
            self.take()
            sign = -sign
        if self.peek()[1] in ("{", "("):
            close = "}" if self.take()[1] == "{" else ")"
            q = self.rational()
            self.take(close)
            return sign * q
        kind, tok = self.take()
        if kind != "num" or not tok.isdigit():
            raise ParseError(f"bad exponent {tok!r}")
        return sign * Fraction(int(tok))

    def rational(self) -> Fraction:
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        kind, tok = self.take()
        if kind != "num" or not tok.isdigit():
            raise ParseError(f"bad rational {tok!r}")
        q = Fraction(int(tok))
        if self.peek()[1] == "/":
            self.take()
            kind, tok = self.take()
            if kind != "num" or not tok.isdigit() or int(tok) == 0:
                raise ParseError(f"bad denominator {tok!r}")
            q /= int(tok)
        return sign * q

    def order_arg(self) -> Fraction:
        self.take(",")
        return self.exponent()

    def atom(self):
        kind, tok = self.take()
        if kind == "num":
            return _Poly.number(complex(tok) if tok.endswith("j") else float(tok))
        if tok == "(":
            val = self.expr()
            self.take(")")
            return val
        if kind == "name":
            if tok == "r":
                return _Poly.number(RHO)
            if tok == "x":
                return _Poly({1: AsymptoticNumber.constant(1.0)})
            if tok == "O":
                self.take("(")
                if self.peek()[1] == "1":
                    self.take()
                    Q = Fraction(0)
                else:
                    self.take("r")
                    self.take("^")
                    Q = self.exponent()
                self.take(")")
                return _Poly.number(AsymptoticNumber.big_o(Q))
            if tok in ("inv", "sqrt"):
                self.take("(")
                arg = self.expr().scalar()
                Q = self.order_arg() if self.peek()[1] == "," else None
                self.take(")")
                fn = inverse if tok == "inv" else sqrt
                return _Poly.number(fn(arg, Q))
            if tok == "roots":
                raise ParseError("roots(...) must be the whole expression")
        raise ParseError(f"unexpected token {tok or 'end of input'!r}")


def parse_number(text: str) -> AsymptoticNumber:
    """Inverse of :func:`format_number`; also accepts ``inv``/``sqrt`` and arithmetic."""
    return _Parser(text).parse().scalar()


def parse_polynomial(text: str) -> list:
    """Ascending coefficients of a polynomial in ``x``."""
    return _Parser(text).parse().ascending()


def evaluate_command(text: str) -> list:
    """Evaluate CLI input: a number expression or ``roots(poly, Q)``.

    Returns printable lines.
    """
    stripped = text.strip()
    if stripped.startswith("roots"):
        m = re.fullmatch(r"roots\s*\((.*)\)", stripped, re.S)
        if not m:
            raise ParseError("malformed roots(...) call")
        body = m.group(1)
        depth = 0
        split = None
        for i, ch in enumerate(body):
            if ch in "({":
                depth += 1
            elif ch in ")}":
                depth -= 1
            elif ch == "," and depth == 0:
                split = i
        poly_text, q_text = (body, None) if split is None else (body[:split], body[split + 1:])
        coeffs = parse_polynomial(poly_text)
        target = None
        if q_text is not None:
            p = _Parser(q_text)
            target = p.exponent()
            if p.peek()[0] != "end":
                raise ParseError("bad target order")
        lines = []
        for root in roots(coeffs, target):
            resid = poly_eval([c.as_kind(COMPLEX) for c in coeffs], root.exact_part())
            v = resid.valuation
            shown = root.real_part() if all(complex(c).imag == 0 for _, c in root.terms) else root
            lines.append(f"{format_number(shown)}    residual valuation {'inf' if v is None else v}")
        return lines
    return [format_number(parse_number(stripped))]
