"""Nets of smooth maps between boxes, judged through scalar and plot probes.

A map net is moderate when every composite ``u o f o rho`` is, for scalar
probes ``u`` on the target and plots ``rho`` into the source.  Only finitely
many probes can be run, so verdicts are "not falsified by this probe set".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import jets as J
from .errors import CapabilityError, DomainError, ShapeError
from .jets import Jet, compose as compose_jets
from .nets import (BoxDomain, CompactBox, Focus, Net, alphas_up_to, default_grid,
                   focus_samples, preimage_foci, _sup)
from .order import (EpsilonScale, MODERATE, OrderEstimate, Verdict,
                    estimate_from_samples, verdict_from_estimates, classify)

IMAGE_TOL = 1e-9

EQUIVALENT = "Equivalent"
NOT_EQUIVALENT = "NotEquivalent"


@dataclass(frozen=True, eq=False)
class MapNet:
    """``eps -> f_eps : source -> target`` with jets ``jet_fn(eps, X, order) -> list[Jet]``.

    ``split`` marks a product source ``X x Y``: the first ``split`` coordinates
    belong to ``X``.
    """

    source: BoxDomain
    target: BoxDomain
    jet_fn: Callable
    max_order: int = 8
    foci: Callable | None = None
    label: str = "f"
    split: int | None = None

    @property
    def domain(self) -> BoxDomain:
        return self.source

    def focus_list(self, eps, K):
        return list(self.foci(eps, K)) if self.foci is not None else []

    def jets(self, eps: float, X, order: int, check: bool = True) -> list:
        X = np.asarray(X, dtype=float).reshape(-1, self.source.dim)
        if check:
            if not 0 < eps <= 1:
                raise ValueError(f"eps must lie in (0, 1], got {eps}")
            if order > self.max_order:
                raise CapabilityError(f"{self.label} supports order {self.max_order}, {order} requested")
            inside = self.source.contains(X)
            if not inside.all():
                raise DomainError(f"point {tuple(X[~inside][0])} outside the source of {self.label}")
        with np.errstate(over="ignore", invalid="ignore"):
            comps = self.jet_fn(eps, X, order)
        n = self.source.dim
        out = []
        for c in comps:
            if not isinstance(c, Jet):
                c = Jet.constant(c, n, order, (X.shape[0],))
            elif c.batch_shape != (X.shape[0],):
                c = Jet(c.n, c.order, np.broadcast_to(c.c, (c.c.shape[0], X.shape[0])).copy())
            out.append(c)
        if len(out) != self.target.dim:
            raise ShapeError(f"{self.label} returned {len(out)} components, target has {self.target.dim}")
        if check and out:
            Y = np.stack([np.real(c.value) for c in out], axis=1)
            finite = np.isfinite(Y).all(axis=1)
            ok = self.target.contains(Y[finite], IMAGE_TOL)
            if not ok.all():
                raise DomainError(f"{self.label} maps a point to {tuple(Y[finite][~ok][0])}, outside its target")
        return out

    def values(self, eps: float, X) -> np.ndarray:
        return np.stack([np.real(c.value) for c in self.jets(eps, X, 0)], axis=1)

    def component(self, i: int) -> Net:
        return Net(self.source, lambda eps, X, k: self.jets(eps, X, k, False)[i],
                   self.max_order, "real", self.foci, f"{self.label}[{i}]")


def map_from_function(f: Callable, source: BoxDomain, target: BoxDomain, label: str = "f",
                      max_order: int = 8, foci=None, split=None) -> MapNet:
    """Map net from ``f(eps, coordinate_jets) -> list of jets``."""
    def jet_fn(eps, X, order):
        return list(f(eps, Jet.variables(X, order)))
    return MapNet(source, target, jet_fn, max_order, foci, label, split)


def embed_map(f: Callable, source: BoxDomain, target: BoxDomain, label: str = "f", split=None) -> MapNet:
    """Constant net of the smooth map ``f(coordinate_jets) -> list of jets``."""
    return map_from_function(lambda eps, v: f(v), source, target, label, split=split)


def identity_map(domain: BoxDomain) -> MapNet:
    return embed_map(lambda v: list(v), domain, domain, "id")


def _merge(*fs):
    fs = [f for f in fs if f is not None]
    if not fs:
        return None

    def foci(eps, K):
        out = []
        for f in fs:
            out.extend(f(eps, K))
        return out
    return foci


def compose(g: MapNet, f: MapNet) -> MapNet:
    """Levelwise ``g_eps o f_eps``; jets follow the chain rule."""
    if f.target.dim != g.source.dim:
        raise ShapeError(f"cannot compose {g.label} after {f.label}: dimension mismatch")

    def jet_fn(eps, X, order):
        inner = f.jets(eps, X, order, False)
        Y = np.stack([np.real(c.value) for c in inner], axis=1)
        if not g.source.contains(Y, IMAGE_TOL).all():
            raise DomainError(f"image of {f.label} leaves the source of {g.label}")
        Y = np.clip(Y, g.source.lower, g.source.upper)
        outer = g.jets(eps, Y, order, False)
        return [compose_jets(o, inner) for o in outer]

    def transported(eps, K):
        return preimage_foci(f, eps, g, K) if g.foci is not None else []
    foci = _merge(f.foci, transported if g.foci is not None else None)
    return MapNet(f.source, g.target, jet_fn, min(f.max_order, g.max_order), foci,
                  f"{g.label}o{f.label}", f.split)


def compose_scalar(u: Net, f: MapNet) -> Net:
    """The scalar net ``u o f``."""
    from .nets import pullback
    return pullback(u, f)


# probes ------------------------------------------------------------------------


def compact_core(domain: BoxDomain, shrink: float = 0.02, cap: float = 1.0) -> CompactBox:
    """A compact box inside ``domain``: open faces pulled in, infinite sides capped."""
    lo, hi = [], []
    for i in range(domain.dim):
        a, b = domain.lower[i], domain.upper[i]
        if not math.isfinite(a):
            a = -cap if not math.isfinite(b) else min(-cap, b - 2 * cap)
        if not math.isfinite(b):
            b = max(cap, a + 2 * cap)
        w = b - a
        if domain.open_lower[i] and math.isfinite(domain.lower[i]):
            a = a + shrink * w
        if domain.open_upper[i] and math.isfinite(domain.upper[i]):
            b = b - shrink * w
        lo.append(a)
        hi.append(b)
    return CompactBox(tuple(lo), tuple(hi))


def coordinate_probe(domain: BoxDomain, i: int, power: int = 1) -> Net:
    return Net(domain, lambda eps, X, k: Jet.variables(X, k)[i] ** power, label=f"y{i}^{power}"
               if power > 1 else f"y{i}")


def exp_probe(domain: BoxDomain, i: int) -> Net:
    return Net(domain, lambda eps, X, k: J.exp(Jet.variables(X, k)[i]), label=f"exp(y{i})")


def product_probe(domain: BoxDomain, i: int, j: int) -> Net:
    def fn(eps, X, k):
        v = Jet.variables(X, k)
        return v[i] * v[j]
    return Net(domain, fn, label=f"y{i}*y{j}")


def delta_probe(domain: BoxDomain, i: int, center: float, phi=None) -> Net:
    """``delta_eps(y_i - center)``: an eps-dependent stress probe."""
    from .distributions import make_mollifier

    phi = phi or make_mollifier(0)
    r = phi.radius

    def fn(eps, X, k):
        y = Jet.variables(X, k)[i]
        xi = (X[:, i] - center) / eps
        d = phi.derivatives(xi, k)
        return y.compose_univariate(np.stack([eps ** (-1.0 - j) * d[j] for j in range(k + 1)]))

    def foci(eps, K):
        point = tuple(center if a == i else 0.5 * (K.lower[a] + K.upper[a]) for a in range(domain.dim))
        return [Focus(point, i, r * eps)]
    return Net(domain, fn, 8, "real", foci, f"delta(y{i}-{center:g})")


def affine_plot(source: BoxDomain, K: CompactBox | None = None, label: str = "affine") -> MapNet:
    """``[-1,1]^n -> K`` onto a compact core of the source."""
    K = K or compact_core(source)
    c = 0.5 * (np.array(K.lower) + np.array(K.upper))
    h = 0.5 * (np.array(K.upper) - np.array(K.lower))
    U = BoxDomain.closed((-1.0,) * source.dim, (1.0,) * source.dim)
    return embed_map(lambda v: [c[i] + h[i] * v[i] for i in range(source.dim)], U, source, label)


def diagonal_plot(source: BoxDomain, K: CompactBox | None = None) -> MapNet:
    K = K or compact_core(source)
    c = 0.5 * (np.array(K.lower) + np.array(K.upper))
    h = 0.5 * (np.array(K.upper) - np.array(K.lower))
    U = BoxDomain.closed((-1.0,), (1.0,))
    return embed_map(lambda v: [c[i] + h[i] * v[0] for i in range(source.dim)], U, source, "diagonal")


def constant_plot(source: BoxDomain, point=None) -> MapNet:
    K = compact_core(source)
    p = np.array(point if point is not None else 0.5 * (np.array(K.lower) + np.array(K.upper)))
    U = BoxDomain.closed((-1.0,), (1.0,))
    return embed_map(lambda v: [0.0 * v[0] + p[i] for i in range(source.dim)], U, source, "constant")


@dataclass
class ProbeSet:
    scalar_probes: list
    plot_probes: list
    verdicts: dict = field(default_factory=dict)

    def certify(self, scale: EpsilonScale = EpsilonScale(), max_alpha_order: int = 1) -> "ProbeSet":
        """Classify each scalar probe on a compact core of its domain and each plot probe's components."""
        for u in self.scalar_probes:
            K = compact_core(u.domain)
            self.verdicts[u.label] = classify(u, [K], max_alpha_order, scale)
        for rho in self.plot_probes:
            K = compact_core(rho.source)
            worst = []
            for i in range(rho.target.dim):
                worst.extend(classify(rho.component(i), [K], max_alpha_order, scale).evidence)
            self.verdicts[rho.label] = verdict_from_estimates(worst)
        return self

    @property
    def labels(self) -> list:
        return [u.label for u in self.scalar_probes] + [r.label for r in self.plot_probes]


def default_probes(source: BoxDomain, target: BoxDomain, stress: bool = True) -> ProbeSet:
    """Coordinates, squares, cubes, a mixed product, exponentials, delta stress probes;
    affine, diagonal and constant plots."""
    m = target.dim
    scalars = []
    for i in range(m):
        scalars.append(coordinate_probe(target, i))
        scalars.append(coordinate_probe(target, i, 2))
        scalars.append(coordinate_probe(target, i, 3))
        scalars.append(exp_probe(target, i))
    if m >= 2:
        scalars.append(product_probe(target, 0, 1))
    if stress:
        K = compact_core(target)
        for i in range(m):
            scalars.append(delta_probe(target, i, 0.5 * (K.lower[i] + K.upper[i])))
    plots = [affine_plot(source)]
    if source.dim > 1:
        plots.append(diagonal_plot(source))
    plots.append(constant_plot(source))
    return ProbeSet(scalars, plots)


def smooth_probes(source: BoxDomain, target: BoxDomain) -> ProbeSet:
    """Default probes without the eps-dependent stress probes."""
    return default_probes(source, target, stress=False)


# verdicts over probes -----------------------------------------------------------


def _sample_points(plot: MapNet, maps: Sequence[MapNet], probes: Sequence[Net], eps, K, grid):
    X = K.grid(grid if grid is not None else default_grid(K.dim))
    extra = []
    for f in maps:
        g = compose(f, plot)
        foci = g.focus_list(eps, K)
        for u in probes:
            if u.foci is not None:
                foci.extend(preimage_foci(g, eps, u, K))
        if foci:
            extra.append(focus_samples(foci, K))
    if extra:
        X = np.concatenate([X] + extra)
    return X


def _probe_sups(f: MapNet, probes: ProbeSet, scale: EpsilonScale, max_alpha_order: int,
                grid, other: MapNet | None, boxes) -> list:
    """``(probe label, box, alpha) -> [(eps, sup)]`` for composites (or their differences)."""
    table: dict = {}
    for rho in probes.plot_probes:
        Ks = [K for K in (boxes or []) if K.dim == rho.source.dim] or [compact_core(rho.source)]
        alphas = alphas_up_to(rho.source.dim, max_alpha_order)
        order = max_alpha_order
        maps = [f] if other is None else [f, other]
        for K in Ks:
            for eps in scale.values:
                X = _sample_points(rho, maps, probes.scalar_probes, eps, K, grid)
                G = compose(f, rho).jets(eps, X, order)
                Y = np.stack([np.real(c.value) for c in G], axis=1)
                G2 = Y2 = None
                if other is not None:
                    G2 = compose(other, rho).jets(eps, X, order)
                    Y2 = np.stack([np.real(c.value) for c in G2], axis=1)
                if not all(np.isfinite(c.c).all() for c in list(G) + list(G2 or [])):
                    # overflow in the map itself: every composite overflows
                    for u in probes.scalar_probes:
                        key = (f"{u.label} o {{f}} o {rho.label}", K)
                        for al in alphas:
                            table.setdefault(key + (al,), []).append((eps, math.inf))
                    continue
                for u in probes.scalar_probes:
                    with np.errstate(invalid="ignore", over="ignore"):
                        uj = compose_jets(u.jets(eps, _clip(Y, u.domain), order), G)
                        if other is not None:
                            uj = compose_jets(u.jets(eps, _clip(Y2, u.domain), order), G2) - uj
                    key = (f"{u.label} o {{f}} o {rho.label}", K)
                    # inf*0 inside the chain rule turns overflow into NaN
                    blown = not bool(np.isfinite(uj.c).all())
                    with np.errstate(invalid="ignore", over="ignore"):
                        for al in alphas:
                            s = math.inf if blown else _sup(uj.partial(al))
                            table.setdefault(key + (al,), []).append((eps, s))
    return [(k[0], k[1], k[2], v) for k, v in table.items()]


def _clip(Y, domain):
    return np.clip(Y, domain.lower, domain.upper)


def is_moderate_map(f: MapNet, probes: ProbeSet | None = None, boxes=None,
                    scale: EpsilonScale = EpsilonScale(), max_alpha_order: int = 1,
                    grid: int | None = None, p_max: int = 4) -> Verdict:
    """Map-level verdict: every ``u o f o rho`` classified; evidence names the probe."""
    probes = probes or default_probes(f.source, f.target)
    rows = _probe_sups(f, probes, scale, max_alpha_order, grid, None, boxes)
    ests = [estimate_from_samples(s, K, al, probe=name.format(f=f.label)) for name, K, al, s in rows]
    return verdict_from_estimates(ests, p_max)


@dataclass
class EquivalenceVerdict:
    kind: str
    order: float
    evidence: list
    p_max: int

    def to_json(self):
        p = None if not math.isfinite(self.order) else int(self.order)
        return {"kind": self.kind, "m_or_p": p, "evidence": [e.to_json() for e in self.evidence]}

    def summary(self) -> str:
        o = "inf" if not math.isfinite(self.order) else str(int(self.order))
        return f"{self.kind}(order {o})"


def equivalence_from_estimates(ests: Sequence[OrderEstimate], p_max: int) -> EquivalenceVerdict:
    order = min(e.negligibility for e in ests) if ests else math.inf
    kind = EQUIVALENT if order >= p_max else NOT_EQUIVALENT
    return EquivalenceVerdict(kind, order, list(ests), p_max)


def equivalent(f: MapNet, g: MapNet, probes: ProbeSet | None = None, boxes=None,
               scale: EpsilonScale = EpsilonScale(), p_max: int = 2,
               max_alpha_order: int = 0, grid: int | None = None) -> EquivalenceVerdict:
    """Negligibility of ``(u o g - u o f) o rho`` over the probe set.

    ``order`` is the largest p verified for every probe pair (inf for exact agreement).
    """
    if f.source != g.source or f.target.dim != g.target.dim:
        raise ShapeError("equivalence needs maps with the same source and target")
    probes = probes or smooth_probes(f.source, f.target)
    rows = _probe_sups(f, probes, scale, max_alpha_order, grid, g, boxes)
    ests = [estimate_from_samples(s, K, al, probe=name.format(f=f"[{g.label} - {f.label}]"))
            for name, K, al, s in rows]
    return equivalence_from_estimates(ests, p_max)


@dataclass
class CompositeReport:
    """Moderateness of ``g o f`` next to the orders of its factors.

    The chain rule bounds a derivative of order ``k`` of the composite by
    ``eps^-(m_g + k m_f)``; ``bound`` records that exponent for the tested ``k``.
    """

    f: Verdict
    g: Verdict
    composite: Verdict
    bound: int | None

    @property
    def within_bound(self) -> bool:
        return (self.composite.is_moderate and self.bound is not None
                and self.composite.m_or_p is not None and self.composite.m_or_p <= self.bound)

    def to_json(self) -> dict:
        return {"f": self.f.summary(), "g": self.g.summary(), "bound": self.bound,
                "composite": self.composite.to_json()}


def certify_composite(g: MapNet, f: MapNet, probes: ProbeSet | None = None,
                      scale: EpsilonScale = EpsilonScale(), max_alpha_order: int = 1,
                      grid: int | None = None, verdicts: tuple | None = None) -> CompositeReport:
    """Classify ``f``, ``g`` and ``g o f`` on default probes and record the chain-rule bound.

    ``verdicts`` may supply already computed ``(verdict of f, verdict of g)``.
    """
    if verdicts is None:
        verdicts = (is_moderate_map(f, None, None, scale, max_alpha_order, grid),
                    is_moderate_map(g, None, None, scale, max_alpha_order, grid))
    vf, vg = verdicts
    gf = compose(g, f)
    vc = is_moderate_map(gf, probes, None, scale, max_alpha_order, grid)
    bound = None
    if vf.kind == MODERATE and vg.kind == MODERATE:
        bound = vg.m_or_p + max(1, max_alpha_order) * vf.m_or_p
    elif vf.is_moderate and vg.is_moderate:
        bound = 0
    return CompositeReport(vf, vg, vc, bound)


# currying ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CurriedFamily:
    """A map ``X -> (maps Y -> Z)`` given jointly smooth: ``fn(eps, xjets, yjets) -> list[Jet]``."""

    x_domain: BoxDomain
    y_domain: BoxDomain
    target: BoxDomain
    fn: Callable
    label: str = "g"
    max_order: int = 8

    def at(self, x) -> MapNet:
        x = np.asarray(x, dtype=float).reshape(-1)
        if len(x) != self.x_domain.dim or not self.x_domain.contains(x[None, :]).all():
            raise DomainError(f"{tuple(x)} is not a point of the parameter box")
        m = self.y_domain.dim

        def jet_fn(eps, Y, order):
            yv = Jet.variables(Y, order)
            xv = [Jet.constant(v, m, order, (Y.shape[0],)) for v in x]
            return self.fn(eps, xv, yv)
        return MapNet(self.y_domain, self.target, jet_fn, self.max_order, None,
                      f"{self.label}({', '.join(f'{v:g}' for v in x)})")


def curry_family(f: MapNet) -> CurriedFamily:
    if f.split is None or not 0 < f.split < f.source.dim:
        raise ShapeError(f"{f.label} has no declared product source")
    k = f.split
    xd = BoxDomain(f.source.lower[:k], f.source.upper[:k], f.source.open_lower[:k], f.source.open_upper[:k])
    yd = BoxDomain(f.source.lower[k:], f.source.upper[k:], f.source.open_lower[k:], f.source.open_upper[k:])

    def fn(eps, xv, yv):
        allv = list(xv) + list(yv)
        X = np.stack([np.real(v.value) for v in allv], axis=1)
        base = f.jets(eps, X, allv[0].order)
        return [compose_jets(b, allv) for b in base]
    return CurriedFamily(xd, yd, f.target, fn, f.label, f.max_order)


def curry(f: MapNet, x) -> MapNet:
    """The slice ``y -> f(x, y)``; jets keep the y-partials."""
    return curry_family(f).at(x)


def uncurry(g: CurriedFamily) -> MapNet:
    k = g.x_domain.dim
    src = g.x_domain.product(g.y_domain)

    def jet_fn(eps, X, order):
        v = Jet.variables(X, order)
        return g.fn(eps, v[:k], v[k:])
    return MapNet(src, g.target, jet_fn, g.max_order, None, f"uncurry({g.label})", k)


# built-in examples ---------------------------------------------------------------

LINE = BoxDomain.open((-2.0,), (2.0,))


def builtin_maps() -> dict:
    """Moderate self-maps of ``(-2, 2)`` used for composition checks."""
    out = {
        "id": identity_map(LINE),
        "osc": map_from_function(lambda e, v: [0.5 * v[0] + 0.25 * e * J.sin(v[0] / e)], LINE, LINE, "osc"),
        "sin": embed_map(lambda v: [J.sin(v[0])], LINE, LINE, "sin"),
        "cube": embed_map(lambda v: [v[0] * v[0] * v[0] / 8.0], LINE, LINE, "cube"),
        "softabs": map_from_function(lambda e, v: [J.sqrt(v[0] * v[0] + e * e) - 1.0], LINE, LINE, "softabs"),
    }
    return out


SQUARE = BoxDomain.open((-2.0, -2.0), (2.0, 2.0))
VALUES = BoxDomain.open((-10.0,), (10.0,))


def builtin_product_maps() -> dict:
    """Moderate maps ``(-2,2) x (-2,2) -> (-10, 10)`` with the product split declared."""
    return {
        "xy": embed_map(lambda v: [v[0] * v[1]], SQUARE, VALUES, "xy", split=1),
        "osc": map_from_function(lambda e, v: [v[0] * e * J.sin(v[1] / e)], SQUARE, VALUES, "osc", split=1),
        "expcos": embed_map(lambda v: [J.exp(v[0]) * J.cos(v[1])], SQUARE, VALUES, "expcos", split=1),
        "softdist": map_from_function(lambda e, v: [J.sqrt((v[0] - v[1]) ** 2 + e * e)], SQUARE, VALUES,
                                      "softdist", split=1),
    }
