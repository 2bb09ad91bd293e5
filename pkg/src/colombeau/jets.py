"""Truncated multivariate Taylor jets over batches of base points.

A :class:`Jet` in ``n`` variables of order ``K`` stores the normalised Taylor
coefficients ``D^a f(x0) / a!`` for every multi-index ``|a| <= K``, for a whole
batch of base points at once.  Arithmetic is truncated polynomial arithmetic,
which makes the Leibniz rule and the chain rule (jet composition) exact
operations rather than approximations.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

MultiIndex = tuple  # tuple[int, ...]


def _of_degree(n: int, d: int) -> list[tuple[int, ...]]:
    if n == 0:
        return [()] if d == 0 else []
    if n == 1:
        return [(d,)]
    out = []
    for first in range(d, -1, -1):
        out.extend((first,) + rest for rest in _of_degree(n - 1, d - first))
    return out


@lru_cache(maxsize=None)
def multi_indices(n: int, order: int) -> tuple[tuple[int, ...], ...]:
    """All multi-indices in ``n`` variables of total degree ``<= order``, graded."""
    out: list[tuple[int, ...]] = []
    for d in range(order + 1):
        out.extend(_of_degree(n, d))
    return tuple(out)


def alpha_factorial(alpha: Sequence[int]) -> int:
    return math.prod(math.factorial(k) for k in alpha)


class _Tables:
    def __init__(self, n: int, order: int):
        self.idx = multi_indices(n, order)
        self.pos = {a: i for i, a in enumerate(self.idx)}
        self.fact = np.array([alpha_factorial(a) for a in self.idx], dtype=float)
        self.degree = np.array([sum(a) for a in self.idx], dtype=int)
        rows, left, right = [], [], []
        for i, a in enumerate(self.idx):
            for j, b in enumerate(self.idx):
                if sum(a) + sum(b) <= order:
                    rows.append(self.pos[tuple(x + y for x, y in zip(a, b))])
                    left.append(i)
                    right.append(j)
        self.left = np.array(left, dtype=int)
        self.right = np.array(right, dtype=int)
        mat = np.zeros((len(self.idx), len(rows)))
        mat[rows, np.arange(len(rows))] = 1.0
        self.mul_matrix = mat


@lru_cache(maxsize=None)
def tables(n: int, order: int) -> _Tables:
    return _Tables(n, order)


class Jet:
    """Truncated Taylor expansion of a scalar function at a batch of points.

    ``c`` has shape ``(M, *batch)`` where ``M = len(multi_indices(n, order))``.
    """

    __slots__ = ("n", "order", "c")
    __array_priority__ = 1000

    def __init__(self, n: int, order: int, c):
        self.n = n
        self.order = order
        self.c = c

    # construction -------------------------------------------------------
    @classmethod
    def variables(cls, X, order: int) -> list["Jet"]:
        """Coordinate jets ``x_i`` at the rows of ``X`` (shape ``(P, n)``)."""
        X = np.asarray(X, dtype=float)
        n = X.shape[1]
        t = tables(n, order)
        out = []
        for i in range(n):
            c = np.zeros((len(t.idx), X.shape[0]))
            c[0] = X[:, i]
            if order >= 1:
                unit = tuple(1 if k == i else 0 for k in range(n))
                c[t.pos[unit]] = 1.0
            out.append(cls(n, order, c))
        return out

    @classmethod
    def constant(cls, value, n: int, order: int, batch_shape=()) -> "Jet":
        value = np.broadcast_to(np.asarray(value), batch_shape)
        m = len(tables(n, order).idx)
        c = np.zeros((m,) + tuple(batch_shape), dtype=np.result_type(value, float))
        c[0] = value
        return cls(n, order, c)

    # accessors ------------------------------------------------------------
    @property
    def value(self):
        return self.c[0]

    @property
    def batch_shape(self):
        return self.c.shape[1:]

    def coefficient(self, alpha) -> np.ndarray:
        return self.c[tables(self.n, self.order).pos[tuple(alpha)]]

    def partial(self, alpha) -> np.ndarray:
        """``D^alpha f`` at every base point."""
        alpha = tuple(alpha)
        t = tables(self.n, self.order)
        if sum(alpha) > self.order:
            raise ValueError(f"jet of order {self.order} has no derivative {alpha}")
        i = t.pos[alpha]
        return t.fact[i] * self.c[i]

    # arithmetic -----------------------------------------------------------
    def _like(self, c) -> "Jet":
        return Jet(self.n, self.order, c)

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.n != self.n:
                raise ValueError("jets in different numbers of variables")
            if other.order != self.order:
                k = min(self.order, other.order)
                return other.truncate(k)
            return other
        return Jet.constant(other, self.n, self.order, np.broadcast_shapes(self.batch_shape, np.shape(other)))

    def _align(self, other):
        other = self._coerce(other)
        me = self.truncate(other.order) if other.order < self.order else self
        return me, other

    def __add__(self, other):
        if not isinstance(other, Jet):
            c = self.c.astype(np.result_type(self.c, np.asarray(other)), copy=True)
            c[0] = c[0] + other
            return self._like(c)
        a, b = self._align(other)
        return a._like(a.c + b.c)

    __radd__ = __add__

    def __neg__(self):
        return self._like(-self.c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self._like(self.c * np.asarray(other))
        a, b = self._align(other)
        t = tables(a.n, a.order)
        batch = np.broadcast_shapes(a.batch_shape, b.batch_shape)
        ca = np.broadcast_to(a.c, (a.c.shape[0],) + batch)
        cb = np.broadcast_to(b.c, (b.c.shape[0],) + batch)
        if a.order == 0:
            return a._like(ca * cb)
        prod = ca[t.left] * cb[t.right]
        flat = prod.reshape(prod.shape[0], -1)
        out = (t.mul_matrix @ flat).reshape((len(t.idx),) + batch)
        return a._like(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self._like(self.c / np.asarray(other))
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            result = Jet.constant(1.0, self.n, self.order, self.batch_shape)
            base = self
            k = int(p)
            while k:
                if k & 1:
                    result = result * base
                k >>= 1
                if k:
                    base = base * base
            return result
        return power(self, p)

    # structure --------------------------------------------------------------
    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        m = len(tables(self.n, order).idx)
        return Jet(self.n, order, self.c[:m])

    def compose_univariate(self, derivs) -> "Jet":
        """``f(self)`` given ``derivs[k] = f^(k)`` evaluated at ``self.value``."""
        derivs = np.asarray(derivs)
        if derivs.shape[0] < self.order + 1:
            raise ValueError("not enough derivatives for the jet order")
        delta = self._like(self.c.copy())
        delta.c[0] = 0
        k = self.order
        res = Jet.constant(derivs[k] / math.factorial(k), self.n, self.order, self.batch_shape)
        for j in range(k - 1, -1, -1):
            res = res * delta
            res.c[0] = res.c[0] + derivs[j] / math.factorial(j)
        return res

    def derive(self, alpha) -> "Jet":
        """Jet of ``D^alpha f`` with the order lowered by ``|alpha|``."""
        alpha = tuple(alpha)
        k = sum(alpha)
        if k > self.order:
            raise ValueError("derivative exceeds jet order")
        if k == 0:
            return self
        src = tables(self.n, self.order)
        dst = tables(self.n, self.order - k)
        c = np.empty((len(dst.idx),) + self.batch_shape, dtype=self.c.dtype)
        for i, b in enumerate(dst.idx):
            ab = tuple(x + y for x, y in zip(alpha, b))
            c[i] = self.c[src.pos[ab]] * (alpha_factorial(ab) / alpha_factorial(b))
        return Jet(self.n, self.order - k, c)

    def embed(self, n_new: int, axes: Sequence[int]) -> "Jet":
        """View as a jet in ``n_new`` variables; variable ``i`` becomes ``axes[i]``."""
        dst = tables(n_new, self.order)
        c = np.zeros((len(dst.idx),) + self.batch_shape, dtype=self.c.dtype)
        for i, a in enumerate(multi_indices(self.n, self.order)):
            new = [0] * n_new
            for var, k in zip(axes, a):
                new[var] = k
            c[dst.pos[tuple(new)]] = self.c[i]
        return Jet(n_new, self.order, c)

    def select(self, keep: Sequence[int]) -> "Jet":
        """Restrict to the variables ``keep`` (the others are frozen)."""
        dst = tables(len(keep), self.order)
        src = tables(self.n, self.order)
        c = np.empty((len(dst.idx),) + self.batch_shape, dtype=self.c.dtype)
        for i, a in enumerate(dst.idx):
            full = [0] * self.n
            for var, k in zip(keep, a):
                full[var] = k
            c[i] = self.c[src.pos[tuple(full)]]
        return Jet(len(keep), self.order, c)

    def reshape_batch(self, shape) -> "Jet":
        return self._like(self.c.reshape((self.c.shape[0],) + tuple(shape)))

    @property
    def real(self) -> "Jet":
        return self._like(np.real(self.c))

    @property
    def imag(self) -> "Jet":
        return self._like(np.imag(self.c))

    def __repr__(self):
        return f"Jet(n={self.n}, order={self.order}, batch={self.batch_shape})"


def compose(outer: Jet, inner: Sequence[Jet]) -> Jet:
    """Chain rule: ``outer`` is the jet of ``u`` at ``(g_1, ..., g_m)`` values.

    ``inner`` are the jets of ``g_i`` in the source variables.  The Taylor
    polynomial of ``u`` is evaluated at ``g - g(x0)`` in truncated arithmetic.
    """
    m = len(inner)
    if outer.n != m:
        raise ValueError("outer jet dimension does not match the number of inner jets")
    if m == 0:
        raise ValueError("cannot compose with a map into R^0")
    n = inner[0].n
    order = min(outer.order, min(g.order for g in inner))
    batch = inner[0].batch_shape
    deltas = []
    for g in inner:
        d = g.truncate(order)
        d = d._like(d.c.copy())
        d.c[0] = 0
        deltas.append(d)
    powers = []
    for d in deltas:
        row = [Jet.constant(1.0, n, order, batch)]
        for _ in range(order):
            row.append(row[-1] * d)
        powers.append(row)
    cache: dict[tuple[int, ...], Jet] = {}

    def monomial(beta):
        if beta in cache:
            return cache[beta]
        last = max(i for i, b in enumerate(beta) if b) if any(beta) else -1
        if last < 0:
            res = powers[0][0]
        else:
            head = tuple(b if i < last else 0 for i, b in enumerate(beta))
            res = monomial(head) * powers[last][beta[last]] if any(head) else powers[last][beta[last]]
        cache[beta] = res
        return res

    out_c = None
    outer_t = tables(m, outer.order)
    for beta in multi_indices(m, order):
        coef = outer.c[outer_t.pos[beta]]
        term = monomial(beta).c * coef
        out_c = term if out_c is None else out_c + term
    return Jet(n, order, out_c)


# elementary functions --------------------------------------------------------


def _univariate(x, order_derivs):
    if isinstance(x, Jet):
        return x.compose_univariate(order_derivs(x.value, x.order))
    return order_derivs(np.asarray(x), 0)[0]


def exp(x):
    def d(v, k):
        e = np.exp(v)
        return np.broadcast_to(e, (k + 1,) + np.shape(e))
    return _univariate(x, d)


def log(x):
    def d(v, k):
        out = [np.log(v)]
        for j in range(1, k + 1):
            out.append((-1) ** (j - 1) * math.factorial(j - 1) / v**j)
        return np.array(out)
    return _univariate(x, d)


def sin(x):
    def d(v, k):
        s, c = np.sin(v), np.cos(v)
        cyc = [s, c, -s, -c]
        return np.array([cyc[j % 4] for j in range(k + 1)])
    return _univariate(x, d)


def cos(x):
    def d(v, k):
        s, c = np.sin(v), np.cos(v)
        cyc = [c, -s, -c, s]
        return np.array([cyc[j % 4] for j in range(k + 1)])
    return _univariate(x, d)


def power(x, p):
    """``x ** p`` for a real exponent (base must stay positive unless p is integral)."""
    def d(v, k):
        out = []
        coef = 1.0
        for j in range(k + 1):
            out.append(coef * np.power(v, p - j))
            coef *= p - j
        return np.array(out)
    return _univariate(x, d)


def sqrt(x):
    return power(x, 0.5)


def reciprocal(x):
    def d(v, k):
        out = []
        for j in range(k + 1):
            out.append((-1) ** j * math.factorial(j) / v ** (j + 1))
        return np.array(out)
    return _univariate(x, d)
