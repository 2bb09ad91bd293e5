"""Nets of smooth scalar functions on boxes, evaluated through jets.

A :class:`Net` is a lazily evaluated family ``eps -> f_eps`` of smooth
functions on a :class:`BoxDomain`.  Every evaluation goes through a jet
function ``(eps, X, order) -> Jet`` so derivatives of sums, products and
pullbacks are exact consequences of jet arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import jets as J
from .errors import CapabilityError, DomainError, ShapeError
from .jets import Jet, multi_indices

DEFAULT_MAX_ORDER = 8


def default_grid(dim: int) -> int:
    return 64 if dim <= 2 else 16


# domains ---------------------------------------------------------------------


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box; each face is independently open or closed."""

    lower: tuple
    upper: tuple
    open_lower: tuple = None
    open_upper: tuple = None

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi):
            raise ShapeError("lower and upper bounds differ in length")
        if any(not a < b for a, b in zip(lo, hi)):
            raise ShapeError(f"degenerate box {lo} x {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        for name in ("open_lower", "open_upper"):
            flags = getattr(self, name)
            flags = (True,) * len(lo) if flags is None else tuple(bool(f) for f in flags)
            if len(flags) != len(lo):
                raise ShapeError(f"{name} has the wrong length")
            object.__setattr__(self, name, flags)

    @classmethod
    def open(cls, lower, upper):
        return cls(tuple(lower), tuple(upper))

    @classmethod
    def closed(cls, lower, upper):
        n = len(tuple(lower))
        return cls(tuple(lower), tuple(upper), (False,) * n, (False,) * n)

    @classmethod
    def cube(cls, dim: int):
        """The closed unit cube ``I^dim``."""
        return cls.closed((0.0,) * dim, (1.0,) * dim)

    @classmethod
    def point(cls):
        """``R^0``."""
        return cls((), ())

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def is_closed(self) -> bool:
        return not any(self.open_lower) and not any(self.open_upper)

    def contains(self, X, tol: float = 0.0) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        lo = np.array(self.lower)
        hi = np.array(self.upper)
        ol = np.array(self.open_lower)
        ou = np.array(self.open_upper)
        above = np.where(ol, X > lo - tol, X >= lo - tol) if tol == 0 else X >= lo - tol
        below = np.where(ou, X < hi + tol, X <= hi + tol) if tol == 0 else X <= hi + tol
        return np.all(above & below, axis=1)

    def product(self, other: "BoxDomain") -> "BoxDomain":
        return BoxDomain(self.lower + other.lower, self.upper + other.upper,
                         self.open_lower + other.open_lower, self.open_upper + other.open_upper)

    def compact(self) -> "CompactBox":
        """Largest compact box usable inside; only valid for closed boxes."""
        if not self.is_closed:
            raise ShapeError("an open box has no largest compact subset")
        return CompactBox(self.lower, self.upper)


@dataclass(frozen=True)
class CompactBox:
    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi) or any(a > b for a, b in zip(lo, hi)):
            raise ShapeError(f"invalid compact box {lo} x {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def interval(cls, a: float, b: float):
        return cls((a,), (b,))

    @property
    def dim(self) -> int:
        return len(self.lower)

    def inside(self, domain: BoxDomain) -> bool:
        if domain.dim != self.dim:
            return False
        for i in range(self.dim):
            lo, hi = domain.lower[i], domain.upper[i]
            if self.lower[i] < lo or (domain.open_lower[i] and self.lower[i] <= lo):
                return False
            if self.upper[i] > hi or (domain.open_upper[i] and self.upper[i] >= hi):
                return False
        return True

    def grid(self, grid_per_axis: int) -> np.ndarray:
        """Uniform tensor grid with ``grid_per_axis`` intervals per axis (corners included)."""
        if grid_per_axis < 2:
            raise ValueError("grid_per_axis must be at least 2")
        if self.dim == 0:
            return np.zeros((1, 0))
        axes = [np.linspace(a, b, grid_per_axis + 1) if b > a else np.array([a])
                for a, b in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def to_json(self):
        return [[a, b] for a, b in zip(self.lower, self.upper)]


class Focus(NamedTuple):
    """A region where a net has features of size ``halfwidth`` across ``axis``."""

    point: tuple
    axis: int
    halfwidth: float


FOCUS_SAMPLES = 17


def focus_samples(foci: Sequence[Focus], K: CompactBox, count: int = FOCUS_SAMPLES) -> np.ndarray:
    if not foci or K.dim == 0:
        return np.zeros((0, K.dim))
    s = np.linspace(-1.0, 1.0, count)
    pts = []
    lo, hi = np.array(K.lower), np.array(K.upper)
    for f in foci:
        p = np.tile(np.asarray(f.point, dtype=float), (count, 1))
        p[:, f.axis] = p[:, f.axis] + f.halfwidth * s
        pts.append(p)
    P = np.concatenate(pts)
    keep = np.all((P >= lo) & (P <= hi), axis=1)
    return P[keep]


def as_alpha(alpha, n: int) -> tuple:
    if alpha is None:
        return (0,) * n
    if isinstance(alpha, (int, np.integer)):
        if n != 1:
            if alpha == 0:
                return (0,) * n
            raise ShapeError("integer multi-index only allowed in one dimension")
        return (int(alpha),)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != n or any(a < 0 for a in alpha):
        raise ShapeError(f"multi-index {alpha} invalid in dimension {n}")
    return alpha


def _as_jet(value, n: int, order: int, batch: int) -> Jet:
    if isinstance(value, Jet):
        if value.order > order:
            value = value.truncate(order)
        if value.batch_shape != (batch,):
            value = Jet(value.n, value.order, np.broadcast_to(value.c, (value.c.shape[0], batch)).copy())
        return value
    return Jet.constant(value, n, order, (batch,))


def _points(X, dim: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if dim == 0:
        # points of R^0 carry no coordinates; the row count is the batch size
        return np.zeros((X.shape[0] if X.ndim == 2 else 1, 0))
    return X.reshape(-1, dim)


def _check_eps(eps: float):
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")


# nets --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Net:
    """An eps-net of smooth scalar functions on ``domain``.

    ``jet_fn(eps, X, order)`` returns the :class:`Jet` of ``f_eps`` at the rows
    of ``X`` (shape ``(P, dim)``).  ``foci(eps, K)`` optionally lists where the
    net concentrates features narrower than a uniform grid would resolve.
    """

    domain: BoxDomain
    jet_fn: Callable
    max_order: int = DEFAULT_MAX_ORDER
    kind: str = "real"
    foci: Callable | None = None
    label: str = ""

    @property
    def dim(self) -> int:
        return self.domain.dim

    def jets(self, eps: float, X, order: int, check: bool = True) -> Jet:
        X = _points(X, self.dim)
        if check:
            _check_eps(eps)
            if order > self.max_order:
                raise CapabilityError(
                    f"{self.label or 'net'} supports derivatives up to order {self.max_order}, "
                    f"{order} requested")
            inside = self.domain.contains(X)
            if not inside.all():
                bad = X[~inside][0]
                raise DomainError(f"point {tuple(bad)} outside the domain of {self.label or 'net'}")
        with np.errstate(over="ignore", invalid="ignore"):
            jet = self.jet_fn(eps, X, order)
        return _as_jet(jet, self.dim, order, X.shape[0])

    def values(self, eps: float, X, alpha=None) -> np.ndarray:
        alpha = as_alpha(alpha, self.dim)
        return self.jets(eps, X, sum(alpha)).partial(alpha)

    def eval(self, eps: float, x, alpha=None):
        """``D^alpha f_eps(x)`` at a single point."""
        x = np.asarray(x, dtype=float).reshape(1, self.dim)
        return self.values(eps, x, alpha)[0]

    def focus_list(self, eps: float, K: CompactBox) -> list:
        return list(self.foci(eps, K)) if self.foci is not None else []

    def sample_points(self, eps: float, K: CompactBox, grid_per_axis: int | None = None) -> np.ndarray:
        grid = default_grid(self.dim) if grid_per_axis is None else grid_per_axis
        X = K.grid(grid)
        extra = focus_samples(self.focus_list(eps, K), K)
        return np.concatenate([X, extra]) if len(extra) else X

    # operator sugar
    def __add__(self, other):
        return add(self, other if isinstance(other, Net) else constant_net(other, self.domain, self.kind))

    __radd__ = __add__

    def __neg__(self):
        return neg(self)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Net):
            return mul(self, other)
        return scale(other, self)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Net({self.label or '?'}, dim={self.dim}, max_order={self.max_order})"


def _merge_foci(*nets):
    parts = [n.foci for n in nets if n.foci is not None]
    if not parts:
        return None
    if len(parts) == 1:
        return parts[0]

    def foci(eps, K):
        out = []
        for p in parts:
            out.extend(p(eps, K))
        return out
    return foci


def _kind(*kinds):
    return "complex" if "complex" in kinds else "real"


def _check_compatible(a: Net, b: Net):
    if a.domain != b.domain:
        raise ShapeError(f"domain mismatch: {a.domain} vs {b.domain}")
    if a.kind != b.kind:
        raise ShapeError(f"scalar kind mismatch: {a.kind} vs {b.kind}")


def add(a: Net, b: Net) -> Net:
    _check_compatible(a, b)
    return Net(a.domain, lambda eps, X, k: a.jets(eps, X, k, False) + b.jets(eps, X, k, False),
               min(a.max_order, b.max_order), a.kind, _merge_foci(a, b), f"({a.label} + {b.label})")


def mul(a: Net, b: Net) -> Net:
    """Pointwise product; derivatives follow the Leibniz rule through jet products."""
    _check_compatible(a, b)
    return Net(a.domain, lambda eps, X, k: a.jets(eps, X, k, False) * b.jets(eps, X, k, False),
               min(a.max_order, b.max_order), a.kind, _merge_foci(a, b), f"({a.label} * {b.label})")


def scale(c, a: Net) -> Net:
    kind = "complex" if isinstance(c, complex) else a.kind
    return Net(a.domain, lambda eps, X, k: a.jets(eps, X, k, False) * c,
               a.max_order, kind, a.foci, f"{c}*{a.label}")


def neg(a: Net) -> Net:
    return Net(a.domain, lambda eps, X, k: -a.jets(eps, X, k, False),
               a.max_order, a.kind, a.foci, f"-{a.label}")


def derive(a: Net, alpha) -> Net:
    alpha = as_alpha(alpha, a.dim)
    k = sum(alpha)
    if k > a.max_order:
        raise CapabilityError(f"cannot differentiate {a.label} to order {k} (max {a.max_order})")
    return Net(a.domain, lambda eps, X, order: a.jets(eps, X, order + k, False).derive(alpha),
               a.max_order - k, a.kind, a.foci, f"D{alpha}{a.label}")


def constant_net(value, domain: BoxDomain, kind: str | None = None) -> Net:
    kind = kind or ("complex" if isinstance(value, complex) else "real")
    return Net(domain, lambda eps, X, k: value, DEFAULT_MAX_ORDER, kind, None, repr(value))


def embed_smooth(f: Callable, domain: BoxDomain, kind: str = "real",
                 max_order: int = DEFAULT_MAX_ORDER, label: str = "") -> Net:
    """The constant net with value ``f``.

    ``f`` receives the list of coordinate jets and returns a jet (or a number),
    so ordinary arithmetic and the functions in :mod:`colombeau.jets` work.
    """
    def jet_fn(eps, X, order):
        return f(Jet.variables(X, order))
    return Net(domain, jet_fn, max_order, kind, None, label or getattr(f, "__name__", "f"))


def net_from_function(f: Callable, domain: BoxDomain, kind: str = "real",
                      max_order: int = DEFAULT_MAX_ORDER, label: str = "", foci=None) -> Net:
    """Net given by ``f(eps, coordinate_jets) -> Jet``."""
    def jet_fn(eps, X, order):
        return f(eps, Jet.variables(X, order))
    return Net(domain, jet_fn, max_order, kind, foci, label)


# pullback ------------------------------------------------------------------


def map_jets(F, eps: float, X, order: int) -> list:
    return F.jets(eps, X, order)


def pullback(a: Net, F) -> Net:
    """``f_eps o F_eps`` for a map ``F`` with jets (any object with ``source``,
    ``target``, ``max_order`` and ``jets(eps, X, order) -> list[Jet]``)."""
    if F.target.dim != a.dim:
        raise ShapeError("map target dimension does not match the net's domain")
    tol = 1e-9

    def jet_fn(eps, X, order):
        inner = F.jets(eps, X, order)
        if not inner:
            raise ShapeError("map into R^0 cannot be pulled back along")
        Y = np.stack([np.real(g.value) for g in inner], axis=1)
        inside = a.domain.contains(Y) | a.domain.contains(Y, tol)
        if not inside.all():
            bad = Y[~inside][0]
            raise DomainError(f"image point {tuple(bad)} escapes the domain of {a.label}")
        lo, hi = np.array(a.domain.lower), np.array(a.domain.upper)
        Y = np.clip(Y, lo, hi)
        outer = a.jets(eps, Y, order, False)
        return J.compose(outer, inner)

    own = getattr(F, "foci", None)

    def foci(eps, K):
        out = list(own(eps, K)) if own is not None else []
        if a.foci is not None:
            out.extend(preimage_foci(F, eps, a, K))
        return out

    has_foci = a.foci is not None or own is not None
    return Net(F.source, jet_fn, min(a.max_order, F.max_order), a.kind,
               foci if has_foci else None, f"{a.label}o{getattr(F, 'label', 'F')}")


def _line_grid(K: CompactBox, axis: int, lines: int, samples: int):
    """Sample points on lines parallel to ``axis`` through a coarse grid of K."""
    others = [i for i in range(K.dim) if i != axis]
    t = np.linspace(K.lower[axis], K.upper[axis], samples)
    coarse = [np.linspace(K.lower[i], K.upper[i], lines + 1) for i in others]
    if coarse:
        mesh = np.meshgrid(*coarse, indexing="ij")
        bases = np.stack([m.ravel() for m in mesh], axis=1)
    else:
        bases = np.zeros((1, 0))
    P = np.empty((bases.shape[0], samples, K.dim))
    P[:, :, axis] = t
    for j, i in enumerate(others):
        P[:, :, i] = bases[:, j:j + 1]
    return P


def preimage_foci(F, eps: float, a: Net, K: CompactBox, lines: int = 4, samples: int = 257) -> list:
    """Transport the foci of ``a`` back along ``F`` by bracketing ``F_i = c`` on lines."""
    if K.dim == 0:
        return []
    target_box = CompactBox(a.domain.lower, a.domain.upper)
    targets = a.focus_list(eps, target_box)
    if not targets:
        return []
    out = []
    extent = np.array(K.upper) - np.array(K.lower)
    for axis in range(K.dim):
        if extent[axis] == 0:
            continue
        P = _line_grid(K, axis, lines, samples)
        flat = P.reshape(-1, K.dim)
        vals = np.stack([np.real(g.value) for g in F.jets(eps, flat, 0)], axis=1)
        vals = vals.reshape(P.shape[0], samples, -1)
        for foc in targets:
            g = vals[:, :, foc.axis] - foc.point[foc.axis]
            li, si = np.nonzero((g[:, :-1] * g[:, 1:] <= 0) & (g[:, :-1] != g[:, 1:]) | (g[:, :-1] == 0))
            absg = np.abs(g)
            mi, mj = np.nonzero((absg[:, 1:-1] <= absg[:, :-2]) & (absg[:, 1:-1] <= absg[:, 2:])
                                & (absg[:, 1:-1] < 4 * foc.halfwidth))
            lo_t = P[li, si, axis]
            hi_t = P[li, si + 1, axis]
            base = P[li, si].copy()
            roots = _bisect(F, eps, base, axis, lo_t, hi_t, foc.axis, foc.point[foc.axis])
            cand = np.concatenate([roots, P[mi, mj + 1]]) if len(mi) else roots
            if len(cand) == 0:
                continue
            grads = F.jets(eps, cand, 1)[foc.axis]
            unit = tuple(1 if i == axis else 0 for i in range(K.dim))
            slope = np.abs(np.real(grads.partial(unit)))
            spacing = extent[axis] / (samples - 1)
            # transversal crossings get the exact preimage width; near-tangencies a grid cell pair
            width = foc.halfwidth / np.maximum(slope, 1e-300)
            width[len(roots):] = np.minimum(width[len(roots):], spacing * 2)
            width = np.where(slope * extent[axis] < foc.halfwidth, spacing * 2, width)
            for p, w in zip(cand, width):
                out.append(Focus(tuple(p), axis, float(w)))
    return out


def _bisect(F, eps, base, axis, lo, hi, comp, c, iters=60):
    if len(lo) == 0:
        return np.zeros((0, base.shape[1]))
    lo = lo.copy()
    hi = hi.copy()
    pts = base.copy()

    def g(t):
        pts[:, axis] = t
        return np.real(F.jets(eps, pts, 0)[comp].value) - c
    glo = g(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        left = np.sign(gm) == np.sign(glo)
        lo = np.where(left, mid, lo)
        glo = np.where(left, gm, glo)
        hi = np.where(left, hi, mid)
    pts[:, axis] = 0.5 * (lo + hi)
    return pts.copy()


# sampling ---------------------------------------------------------------------


def sup_on_box(a: Net, eps: float, K: CompactBox, alpha=None, grid_per_axis: int | None = None) -> float:
    """Max of ``|D^alpha f_eps|`` over the uniform grid of K plus the net's focus samples."""
    alpha = as_alpha(alpha, a.dim)
    if not K.inside(a.domain):
        raise DomainError(f"compact box {K} not inside {a.domain}")
    X = a.sample_points(eps, K, grid_per_axis)
    with np.errstate(invalid="ignore", over="ignore"):
        return _sup(a.values(eps, X, alpha))


def sups_on_box(a: Net, eps: float, K: CompactBox, alphas: Sequence[tuple],
                grid_per_axis: int | None = None) -> dict:
    """Like :func:`sup_on_box` for several multi-indices from one jet evaluation."""
    if not K.inside(a.domain):
        raise DomainError(f"compact box {K} not inside {a.domain}")
    order = max(sum(al) for al in alphas)
    X = a.sample_points(eps, K, grid_per_axis)
    jet = a.jets(eps, X, order)
    with np.errstate(invalid="ignore", over="ignore"):
        return {al: _sup(jet.partial(al)) for al in alphas}


def _sup(values) -> float:
    v = np.abs(values)
    # inf * 0 turns overflow into NaN at isolated points; report the overflow
    if np.isinf(v).any():
        return math.inf
    return float(np.max(v))


def alphas_up_to(dim: int, order: int) -> list:
    return list(multi_indices(dim, order))


def leibniz(a_vals: dict, b_vals: dict, alpha: tuple):
    """Reference Leibniz expansion from per-multi-index derivative values."""
    total = 0
    for beta in multi_indices(len(alpha), sum(alpha)):
        if all(b <= a for a, b in zip(alpha, beta)):
            gamma = tuple(x - y for x, y in zip(alpha, beta))
            coef = math.prod(math.comb(x, y) for x, y in zip(alpha, beta))
            total = total + coef * a_vals[beta] * b_vals[gamma]
    return total
