"""Mollifier embeddings of one-dimensional distributions and weak pairings.

A distribution ``u`` becomes the net ``f_eps = u * phi_eps`` with
``phi_eps(x) = phi(x/eps)/eps``.  The profile ``phi`` is a polynomial times
the standard bump, chosen so its moments ``1..N`` vanish.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import jets as J
from .errors import CapabilityError, IntegrationError, ParseError, ShapeError
from .jets import Jet
from .nets import BoxDomain, CompactBox, Focus, Net, as_alpha, derive, mul, neg, add, scale
from .order import EpsilonScale, OrderEstimate, estimate_from_samples, estimate_order

MAX_MOMENTS = 8
EDGE = 2e-3
DEFAULT_DOMAIN = BoxDomain.open((-4.0,), (4.0,))


class PairingWarning(UserWarning):
    """Quadrature at two resolutions disagreed."""


class BoundaryWarning(UserWarning):
    """A convolution window was clamped to the domain."""


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _gl_panels(a, b, n):
    """Nodes and weights for GL-n on each panel ``[a_i, b_i]`` (arrays of equal shape)."""
    x, w = gauss_legendre(n)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def bump(t):
    """Standard bump ``exp(-1/(1-t^2))`` on ``(-1, 1)``, zero outside."""
    t = np.asarray(t, dtype=float)
    inside = 1 - t * t > EDGE
    safe = np.where(inside, t, 0.0)
    with np.errstate(over="ignore", under="ignore"):
        return np.where(inside, np.exp(-1.0 / (1.0 - safe * safe)), 0.0)


def bump_jet(t: Jet) -> Jet:
    """Jet of the standard bump (works for any jet dimension)."""
    v = np.real(t.value)
    inside = 1 - v * v > EDGE
    safe = t * 1.0
    safe.c = np.where(inside, safe.c, 0.0)
    with np.errstate(over="ignore", under="ignore"):
        b = J.exp(-1.0 / (1.0 - safe * safe))
    b.c = np.where(inside, b.c, 0.0)
    return b


def _bump_moments(count: int) -> np.ndarray:
    x, w = gauss_legendre(256)
    b = bump(x)
    return np.array([np.sum(w * b * x ** m) for m in range(count)])


@dataclass(frozen=True, eq=False)
class Mollifier:
    """``phi(x) = q(x/r) b(x/r) / r`` with ``q`` of degree ``N``."""

    moments: int
    radius: float
    coeffs: tuple

    def _q_jet(self, tj: Jet) -> Jet:
        acc = Jet.constant(self.coeffs[-1], tj.n, tj.order, tj.batch_shape)
        for a in reversed(self.coeffs[:-1]):
            acc = acc * tj + a
        return acc * bump_jet(tj)

    def derivatives(self, xi, kmax: int) -> np.ndarray:
        """``phi^(k)(xi)`` for ``k = 0..kmax``; shape ``(kmax+1,) + xi.shape``."""
        xi = np.asarray(xi, dtype=float)
        r = self.radius
        t = (xi / r).reshape(-1, 1)
        jet = self._q_jet(Jet.variables(t, kmax)[0])
        out = np.stack([jet.partial((k,)) * r ** (-1 - k) for k in range(kmax + 1)])
        return out.reshape((kmax + 1,) + xi.shape)

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        t = xi / self.radius
        q = np.polynomial.polynomial.polyval(t, np.array(self.coeffs))
        return q * bump(t) / self.radius

    def moment(self, j: int, points: int = 256) -> float:
        x, w = gauss_legendre(points)
        x = x * self.radius
        w = w * self.radius
        return float(np.sum(w * self(x) * x ** j))

    @property
    def cdf_table(self):
        return _cdf_table(self)

    def cdf(self, xi) -> np.ndarray:
        """``Phi(xi) = int_{-inf}^{xi} phi``."""
        xi = np.asarray(xi, dtype=float)
        r = self.radius
        knots, cum = self.cdf_table
        flat = xi.ravel()
        inner = np.clip(flat, -r, r)
        i = np.clip(np.searchsorted(knots, inner, side="right") - 1, 0, len(knots) - 2)
        nodes, weights = _gl_panels(knots[i], inner, 24)
        part = cum[i] + np.sum(weights * self(nodes), axis=-1)
        part = np.where(flat <= -r, 0.0, np.where(flat >= r, cum[-1], part))
        return part.reshape(xi.shape)


@lru_cache(maxsize=None)
def _cdf_table_cached(N, r, coeffs):
    phi = Mollifier(N, r, coeffs)
    knots = np.linspace(-r, r, 65)
    nodes, weights = _gl_panels(knots[:-1], knots[1:], 32)
    panel = np.sum(weights * phi(nodes), axis=-1)
    return knots, np.concatenate([[0.0], np.cumsum(panel)])


def _cdf_table(phi: Mollifier):
    return _cdf_table_cached(phi.moments, phi.radius, phi.coeffs)


@lru_cache(maxsize=None)
def make_mollifier(N: int = 4, radius: float = 1.0) -> Mollifier:
    """Profile with ``int phi = 1`` and vanishing moments ``1..N``."""
    if N < 0:
        raise ValueError("N must be non-negative")
    if N > MAX_MOMENTS:
        raise CapabilityError(f"moment system is too ill-conditioned beyond N = {MAX_MOMENTS}")
    if radius <= 0:
        raise ValueError("radius must be positive")
    m = _bump_moments(2 * N + 1)
    H = np.array([[m[i + j] for j in range(N + 1)] for i in range(N + 1)])
    rhs = np.zeros(N + 1)
    rhs[0] = 1.0
    coeffs = np.linalg.solve(H, rhs)
    return Mollifier(N, float(radius), tuple(float(c) for c in coeffs))


# distribution specs ------------------------------------------------------------


@dataclass(frozen=True)
class DeltaDerivative:
    k: int = 0
    at: float = 0.0

    def derivative(self):
        return DeltaDerivative(self.k + 1, self.at)

    def action(self, psi: "TestFunction") -> float:
        d = psi.derivative_at((self.at,), (self.k,))
        return (-1) ** self.k * d

    def __str__(self):
        return "delta" + "'" * self.k


@dataclass(frozen=True)
class Heaviside:
    at: float = 0.0

    def derivative(self):
        return DeltaDerivative(0, self.at)

    def action(self, psi):
        from scipy.integrate import quad
        lo, hi = max(self.at, psi.support.lower[0]), psi.support.upper[0]
        if hi <= lo:
            return 0.0
        return quad(lambda x: psi.value_at(x), lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)[0]

    def __str__(self):
        return "heaviside"


@dataclass(frozen=True)
class PrincipalValue:
    """The principal value of ``1/(x - at)``."""

    at: float = 0.0

    def derivative(self):
        raise CapabilityError("the derivative of pv 1/x is not in the built-in vocabulary")

    def action(self, psi):
        from scipy.integrate import quad
        L = max(abs(psi.support.lower[0] - self.at), abs(psi.support.upper[0] - self.at))

        def g(u):
            return (psi.value_at(self.at + u) - psi.value_at(self.at - u)) / u if u > 0 else \
                2 * psi.derivative_at((self.at,), (1,))
        return quad(g, 0.0, L, epsabs=1e-14, epsrel=1e-13, limit=200)[0]

    def __str__(self):
        return "pv"


@dataclass(frozen=True)
class LocallyIntegrable:
    """Piecewise smooth ``f`` with kinks or jumps at ``breakpoints``."""

    f: Callable
    breakpoints: tuple = ()
    deriv: Callable | None = field(default=None, compare=False)
    name: str = "f"
    increment: Callable | None = field(default=None, compare=False)

    def delta(self, x, h):
        """``f(x + h) - f(x)``, in a cancellation-free form when one is known."""
        if self.increment is not None:
            return self.increment(x, h)
        return self.f(x + h) - self.f(x)

    def derivative(self):
        if self.deriv is None:
            raise CapabilityError(f"no distributional derivative known for {self.name}")
        return self.deriv()

    def action(self, psi):
        from scipy.integrate import quad
        lo, hi = psi.support.lower[0], psi.support.upper[0]
        pts = [b for b in self.breakpoints if lo < b < hi]
        return quad(lambda x: self.f(np.array(x)) * psi.value_at(x), lo, hi, points=pts or None,
                    epsabs=1e-14, epsrel=1e-13, limit=200)[0]

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class SmoothFn:
    """A smooth function given on coordinate jets; ``alpha`` differentiates it."""

    f: Callable
    name: str = "f"
    alpha: tuple = ()

    def derivative(self):
        a = self.alpha or (0,)
        return SmoothFn(self.f, self.name, (a[0] + 1,) + tuple(a[1:]))

    def action(self, psi):
        from scipy.integrate import quad
        lo, hi = psi.support.lower[0], psi.support.upper[0]
        a = self.alpha or (0,)

        def g(x):
            jet = self.f(Jet.variables(np.array([[x]]), a[0]))
            return float(np.real(_as_jet(jet, 1, a[0], 1).partial(a)[0])) * psi.value_at(x)
        return quad(g, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)[0]

    def __str__(self):
        return f"smooth:{self.name}"


@dataclass(frozen=True)
class Combination:
    terms: tuple  # ((coef, spec), ...)

    def derivative(self):
        return Combination(tuple((c, s.derivative()) for c, s in self.terms))

    def action(self, psi):
        return sum(c * s.action(psi) for c, s in self.terms)

    def __str__(self):
        return " + ".join(f"{c}*{s}" for c, s in self.terms)


def differentiate(u, alpha) -> object:
    alpha = as_alpha(alpha, 1)
    for _ in range(alpha[0]):
        u = u.derivative()
    return u


def _sign(x):
    return np.sign(x)


def _abs_increment(x, h):
    den = np.abs(x + h) + np.abs(x)
    safe = np.where(den > 0, den, 1.0)
    return np.where(den > 0, h * (2 * x + h) / safe, 0.0)


def abs_spec() -> LocallyIntegrable:
    return LocallyIntegrable(np.abs, (0.0,), sign_spec, "abs", _abs_increment)


def sign_spec() -> LocallyIntegrable:
    return LocallyIntegrable(_sign, (0.0,), lambda: Combination(((2.0, DeltaDerivative(0)),)), "sign")


SMOOTH_BUILTINS = {
    "exp": lambda v: J.exp(v[0]),
    "sin": lambda v: J.sin(v[0]),
    "cos": lambda v: J.cos(v[0]),
    "cube": lambda v: v[0] * v[0] * v[0],
    "x3": lambda v: v[0] * v[0] * v[0],
    "square": lambda v: v[0] * v[0],
    "one": lambda v: 1.0,
}


def parse_distribution(text: str):
    """Grammar: ``delta``, ``delta'``, ``delta''``, ``heaviside``, ``pv``, ``abs``, ``smooth:<name>``."""
    text = text.strip()
    if text.startswith("delta"):
        rest = text[5:]
        if rest and set(rest) != {"'"}:
            raise ParseError(f"unknown distribution {text!r}")
        return DeltaDerivative(len(rest))
    if text == "heaviside":
        return Heaviside()
    if text == "pv":
        return PrincipalValue()
    if text == "abs":
        return abs_spec()
    if text.startswith("smooth:"):
        name = text[7:]
        if name not in SMOOTH_BUILTINS:
            raise ParseError(f"unknown smooth builtin {name!r}; choose from {sorted(SMOOTH_BUILTINS)}")
        return SmoothFn(SMOOTH_BUILTINS[name], name)
    raise ParseError(f"unknown distribution {text!r}")


# embedding ---------------------------------------------------------------------


def _as_jet(value, n, order, batch):
    if isinstance(value, Jet):
        return value
    return Jet.constant(value, n, order, (batch,))


def _point_foci(at: float, phi: Mollifier):
    def foci(eps, K):
        return [Focus((at,), 0, phi.radius * eps)]
    return foci


def _univariate_net(domain, derivs_fn, phi, at, label, max_order):
    """Net whose x-derivatives at X are ``derivs_fn(eps, xi, order)`` (shape (order+1, P))."""
    def jet_fn(eps, X, order):
        x = Jet.variables(X, order)[0]
        xi = (X[:, 0] - at) / eps
        return x.compose_univariate(derivs_fn(eps, xi, order))
    return Net(domain, jet_fn, max_order, "real", _point_foci(at, phi), label)


def embed(u, phi: Mollifier | None = None, domain: BoxDomain = DEFAULT_DOMAIN,
          max_order: int = 8, quad_points: int | None = None) -> Net:
    """The net ``u * phi_eps`` with exact derivatives through jets.

    ``quad_points`` is the Gauss-Legendre order per panel for the kinds that
    need quadrature (default 128 for pv, 256 for locally integrable kinds).
    """
    phi = phi or make_mollifier()
    if domain.dim != 1 and not isinstance(u, SmoothFn):
        raise ShapeError("singular distributions are built in for dimension 1 only")
    if isinstance(u, DeltaDerivative):
        k = u.k

        def derivs(eps, xi, order):
            d = phi.derivatives(xi, k + order)
            return np.stack([eps ** (-1.0 - k - j) * d[k + j] for j in range(order + 1)])
        return _univariate_net(domain, derivs, phi, u.at, str(u), max_order)
    if isinstance(u, Heaviside):
        def derivs(eps, xi, order):
            out = [phi.cdf(xi)]
            if order:
                d = phi.derivatives(xi, order - 1)
                out.extend(eps ** (-1.0 - j) * d[j] for j in range(order))
            return np.stack(out)
        return _univariate_net(domain, derivs, phi, u.at, str(u), max_order)
    if isinstance(u, PrincipalValue):
        def derivs(eps, xi, order):
            return _pv_derivatives(phi, xi, order, eps, quad_points or 128)
        return _univariate_net(domain, derivs, phi, u.at, str(u), max_order)
    if isinstance(u, LocallyIntegrable):
        return _embed_locally_integrable(u, phi, domain, max_order, quad_points or 256)
    if isinstance(u, SmoothFn):
        return _embed_smooth_fn(u, phi, domain, max_order)
    if isinstance(u, Combination):
        nets = [scale(c, embed(s, phi, domain, max_order, quad_points)) for c, s in u.terms]
        out = nets[0]
        for n in nets[1:]:
            out = add(out, n)
        return out
    raise TypeError(f"not a distribution spec: {u!r}")


def _pv_derivatives(phi, xi, order, eps, npts):
    """``eps^{-1-j} int_0^inf [phi^(j)(xi-u) - phi^(j)(xi+u)]/u du`` for j <= order."""
    r = phi.radius
    xi = np.asarray(xi, dtype=float)
    out = np.zeros((order + 1, xi.size))
    for p, x0 in enumerate(xi):
        upper = abs(x0) + r
        cuts = sorted({0.0, upper} | {c for c in (x0 - r, x0 + r, -x0 - r, r - x0) if 0 < c < upper})
        a = np.array(cuts[:-1])
        b = np.array(cuts[1:])
        nodes, weights = _gl_panels(a, b, npts)
        u = nodes.ravel()
        w = weights.ravel()
        left = phi.derivatives(x0 - u, order)
        right = phi.derivatives(x0 + u, order)
        vals = (left - right) / u
        out[:, p] = vals @ w
    scale_ = np.array([eps ** (-1.0 - j) for j in range(order + 1)])
    return out * scale_[:, None]


def _embed_locally_integrable(u: LocallyIntegrable, phi, domain, max_order, npts):
    r = phi.radius
    lo, hi = domain.lower[0], domain.upper[0]

    def derivs(eps, X, order):
        x = X[:, 0]
        P = x.size
        out = np.zeros((order + 1, P))
        fx = u.f(x)
        clamped = False
        for p in range(P):
            s_lo, s_hi = -r, r
            # the window x - eps*s must stay inside the domain
            s_min = (x[p] - hi) / eps
            s_max = (x[p] - lo) / eps
            if s_min > s_lo or s_max < s_hi:
                clamped = True
                s_lo, s_hi = max(s_lo, s_min), min(s_hi, s_max)
            cuts = sorted({s_lo, s_hi} | {(x[p] - b) / eps for b in u.breakpoints
                                          if s_lo < (x[p] - b) / eps < s_hi})
            nodes, weights = _gl_panels(np.array(cuts[:-1]), np.array(cuts[1:]), npts)
            s = nodes.ravel()
            w = weights.ravel()
            d = phi.derivatives(s, order)
            # f(x) integrates to zero against phi^(j), j >= 1; removing it avoids
            # cancellation when eps is small
            centred = u.delta(x[p], -eps * s)
            out[0, p] = fx[p] + (centred * d[0]) @ w
            for j in range(1, order + 1):
                out[j, p] = eps ** (-j) * ((centred * d[j]) @ w)
        if clamped:
            warnings.warn(f"convolution window of {u.name} clamped to the domain", BoundaryWarning)
        return out

    def jet_fn(eps, X, order):
        xj = Jet.variables(X, order)[0]
        return xj.compose_univariate(derivs(eps, X, order))

    def foci(eps, K):
        return [Focus((b,), 0, r * eps) for b in u.breakpoints]
    return Net(domain, jet_fn, max_order, "real", foci, u.name)


def _tensor_rule(phi: Mollifier, n: int, points: int):
    x, w = gauss_legendre(points)
    s = x * phi.radius
    wt = w * phi.radius * phi(s)
    wt = wt / wt.sum()
    grids = np.meshgrid(*([s] * n), indexing="ij")
    S = np.stack([g.ravel() for g in grids], axis=1)
    W = np.ones(len(S))
    for g in np.meshgrid(*([wt] * n), indexing="ij"):
        W = W * g.ravel()
    return S, W


def _embed_smooth_fn(u: SmoothFn, phi, domain, max_order):
    n = domain.dim
    points = 128 if n == 1 else (24 if n == 2 else 12)
    S, W = _tensor_rule(phi, n, points)
    alpha = as_alpha(u.alpha or None, n)
    shift = sum(alpha)

    def jet_fn(eps, X, order):
        P = X.shape[0]
        Y = (X[:, None, :] - eps * S[None, :, :]).reshape(-1, n)
        jet = _as_jet(u.f(Jet.variables(Y, order + shift)), n, order + shift, Y.shape[0])
        if shift:
            jet = jet.derive(alpha)
        c = jet.c.reshape(jet.c.shape[0], P, len(W))
        return Jet(n, order, c @ W)
    return Net(domain, jet_fn, max_order, "real", None, str(u))


# test functions and pairing ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Compactly supported smooth function given on coordinate jets."""

    support: CompactBox
    jet_fn: Callable
    label: str = "psi"

    __test__ = False  # not a pytest class

    def values(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float).reshape(-1, self.support.dim)
        return np.real(_as_jet(self.jet_fn(Jet.variables(X, 0)), self.support.dim, 0, len(X)).value)

    def value_at(self, x) -> float:
        return float(self.values(np.atleast_1d(np.asarray(x, dtype=float)))[0])

    def derivative_at(self, x, alpha) -> float:
        X = np.asarray(x, dtype=float).reshape(1, -1)
        k = sum(alpha)
        jet = _as_jet(self.jet_fn(Jet.variables(X, k)), X.shape[1], k, 1)
        return float(np.real(jet.partial(tuple(alpha))[0]))

    def vanishes_outside(self, order: int = 3, margin: float = 1e-3, samples: int = 16) -> bool:
        """Checks the function and derivatives just outside each face of the support."""
        lo, hi = np.array(self.support.lower), np.array(self.support.upper)
        pts = []
        for i in range(self.support.dim):
            for face, shift in ((lo[i], -margin), (hi[i], margin)):
                P = lo + (hi - lo) * np.random.default_rng(i).random((samples, len(lo)))
                P[:, i] = face + shift
                pts.append(P)
        X = np.concatenate(pts)
        jet = _as_jet(self.jet_fn(Jet.variables(X, order)), len(lo), order, len(X))
        return bool(np.all(np.abs(jet.c) < 1e-12))


def bump_test_function(center: float = 0.2, halfwidth: float = 1.5, tilt: float = 0.3,
                       amplitude: float = 1.0) -> TestFunction:
    """``amplitude * (1 + tilt*t) * bump(t)`` with ``t = (x - center)/halfwidth``."""
    def jet_fn(v):
        t = (v[0] - center) / halfwidth
        return amplitude * (1.0 + tilt * t) * bump_jet(t)
    return TestFunction(CompactBox((center - halfwidth,), (center + halfwidth,)), jet_fn,
                        f"psi[{center},{halfwidth},{tilt}]")


def zero_test_function(lower=-1.0, upper=1.0) -> TestFunction:
    return TestFunction(CompactBox((lower,), (upper,)), lambda v: 0.0, "zero")


def default_test_functions() -> list:
    return [bump_test_function(0.2, 1.5, 0.3), bump_test_function(-0.3, 1.0, -0.5),
            bump_test_function(0.5, 2.0, 0.8, 2.0)]


def _pair_once(a: Net, eps: float, psi: TestFunction, points: int) -> float:
    K = psi.support
    if K.dim == 1:
        lo, hi = K.lower[0], K.upper[0]
        cuts = {lo, hi}
        for f in a.focus_list(eps, K):
            for c in (f.point[0] - f.halfwidth, f.point[0] + f.halfwidth):
                if lo < c < hi:
                    cuts.add(c)
        cuts = sorted(cuts)
        nodes, weights = _gl_panels(np.array(cuts[:-1]), np.array(cuts[1:]), points)
        X = nodes.reshape(-1, 1)
        W = weights.ravel()
    else:
        x, w = gauss_legendre(points)
        axes = [(0.5 * (b + a) + 0.5 * (b - a) * x, 0.5 * (b - a) * w) for a, b in zip(K.lower, K.upper)]
        grids = np.meshgrid(*[ax[0] for ax in axes], indexing="ij")
        X = np.stack([g.ravel() for g in grids], axis=1)
        W = np.ones(len(X))
        for g in np.meshgrid(*[ax[1] for ax in axes], indexing="ij"):
            W = W * g.ravel()
    vals = a.values(eps, X) * psi.values(X)
    return complex(vals @ W) if a.kind == "complex" else float(vals @ W)


def pair(a: Net, eps: float, psi: TestFunction, quad_points: int = 64, check: bool = True):
    """``<f_eps, psi>`` by Gauss-Legendre quadrature over the support of ``psi``."""
    if not psi.support.inside(a.domain):
        raise ShapeError("test function support is not inside the net's domain")
    if quad_points < 2:
        raise ValueError("quad_points must be at least 2")
    val = _pair_once(a, eps, psi, quad_points)
    if not check:
        return val
    fine = _pair_once(a, eps, psi, 2 * quad_points)
    if not np.isfinite(fine):
        raise IntegrationError(f"pairing at eps={eps} is not finite")
    if abs(fine - val) > 1e-6 * max(1.0, abs(fine)):
        warnings.warn(f"pairing quadrature unresolved at eps={eps}: {val} vs {fine}", PairingWarning)
    return fine


# checks --------------------------------------------------------------------------


def check_derivative_commutes(u, phi: Mollifier, alpha=(1,), grid: int = 64,
                              scale: EpsilonScale = EpsilonScale(), K: CompactBox | None = None) -> float:
    """Max ``|D^alpha embed(u) - embed(D^alpha u)|`` over grid samples and the scale."""
    alpha = as_alpha(alpha, 1)
    lhs = derive(embed(u, phi), alpha)
    rhs = embed(differentiate(u, alpha), phi)
    K = K or CompactBox.interval(-1.0, 1.0)
    worst = 0.0
    for eps in scale.values:
        X = lhs.sample_points(eps, K, grid)
        worst = max(worst, float(np.max(np.abs(lhs.values(eps, X) - rhs.values(eps, X)))))
    return worst


def pairing_errors(u, phi: Mollifier, psi: TestFunction, scale: EpsilonScale,
                   quad_points: int = 64) -> tuple:
    """``(reference, [(eps, pairing, abs_error)...], OrderEstimate)`` for ``<embed(u), psi>``."""
    net = embed(u, phi)
    ref = u.action(psi)
    rows = []
    for eps in scale.values:
        val = pair(net, eps, psi, quad_points)
        rows.append((eps, val, abs(val - ref)))
    est = estimate_from_samples([(e, err) for e, _, err in rows], psi.support, (0,), probe=psi.label)
    return ref, rows, est


@dataclass
class WitnessReport:
    sup_order: OrderEstimate
    pairing_decay: OrderEstimate

    def to_json(self):
        return {"sup_order": self.sup_order.to_json(), "pairing_decay": self.pairing_decay.to_json()}


def schwartz_witness(phi: Mollifier | None = None, scale: EpsilonScale = EpsilonScale(),
                     grid: int = 64, psi: TestFunction | None = None) -> WitnessReport:
    """Orders of ``w = H_eps^2 - H_eps``: bounded sup, but pairings that vanish like eps."""
    phi = phi or make_mollifier()
    psi = psi or bump_test_function()
    H = embed(Heaviside(), phi)
    w = add(mul(H, H), neg(H))
    K = CompactBox.interval(-1.0, 1.0)
    sup = estimate_order(w, K, (0,), scale, grid)
    samples = [(eps, abs(pair(w, eps, psi))) for eps in scale.values]
    decay = estimate_from_samples(samples, psi.support, (0,), probe=psi.label)
    return WitnessReport(sup, decay)
