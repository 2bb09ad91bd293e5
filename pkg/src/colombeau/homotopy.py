"""Retraction of the cube onto ``L^n``, its mollification, and homotopy extension
over finite cell complexes.

Cube coordinates are ``(s_1, ..., s_n, t)`` with ``t`` last, so
``L^n = (boundary of I^n) x I  union  I^n x {0}``.  The retraction is the
central projection from ``p = (1/2, ..., 1/2, 2)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .distributions import gauss_legendre, make_mollifier
from .errors import ConsistencyError, DomainError, ParseError, PreconditionError, ShapeError
from .jets import Jet, multi_indices, tables
from .maps import (EQUIVALENT, MapNet, equivalent, map_from_function,
                   smooth_probes)
from .nets import BoxDomain
from .order import EpsilonScale, estimate_from_samples

LAYER_TOL = 1e-12
SEAM_TOL = 1e-9
DEFAULT_QUAD = 24


def cube(dim: int) -> BoxDomain:
    return BoxDomain.closed((0.0,) * dim, (1.0,) * dim)


# retraction ----------------------------------------------------------------------


def retraction(n: int, u) -> np.ndarray:
    """The retraction for the pair ``(I^{n+1} x I, L)``: points have ``n + 2`` coordinates."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return retract(n + 1, u)


def retract(n: int, u) -> np.ndarray:
    """Central projection of ``I^n x I`` onto ``L = (boundary I^n) x I + I^n x {0}``
    from ``(1/2, ..., 1/2, 2)``; points have ``n + 1`` coordinates.

    The exit point with the smallest ray parameter wins; ties go to the bottom
    face, then to the sides in coordinate order.  The coordinate of the face
    that is hit is set exactly, and points of ``L^n`` are returned unchanged.
    """
    U = np.asarray(u, dtype=float)
    single = U.ndim == 1
    U = np.atleast_2d(U)
    if U.shape[1] != n + 1:
        raise ShapeError(f"points of I^{n + 1} need {n + 1} coordinates, got {U.shape[1]}")
    if ((U < 0) | (U > 1)).any() or not np.isfinite(U).all():
        raise DomainError("retraction is defined on the closed unit cube")
    p = np.full(n + 1, 0.5)
    p[n] = 2.0
    d = U - p
    # ray parameter of each face, with the point u itself at parameter 1
    hits = [2.0 / (2.0 - U[:, n])]
    with np.errstate(divide="ignore"):
        for i in range(n):
            a = np.abs(d[:, i])
            hits.append(np.where(a > 0, 0.5 / np.where(a > 0, a, 1.0), np.inf))
    S = np.stack(hits, axis=1)
    face = np.argmin(S, axis=1)  # argmin keeps the first minimum: bottom, then sides
    s = S[np.arange(len(U)), face]
    out = np.clip(p + s[:, None] * d, 0.0, 1.0)
    bottom = face == 0
    out[bottom, n] = 0.0
    for i in range(n):
        m = face == i + 1
        out[m, i] = np.where(d[m, i] > 0, 1.0, 0.0)
    # exact membership rather than s <= 1, which rounding can satisfy just off L
    fixed = on_L(n, U)
    out[fixed] = U[fixed]
    return out[0] if single else out


def on_L(n: int, P, tol: float = 0.0) -> np.ndarray:
    P = np.atleast_2d(np.asarray(P, dtype=float))
    side = np.any((P[:, :n] <= tol) | (P[:, :n] >= 1 - tol), axis=1) if n else np.zeros(len(P), bool)
    return side | (P[:, n] <= tol)


def L_grid(n: int, per_axis: int) -> np.ndarray:
    """Grid points of ``L^n``: the bottom face and every side face."""
    g = np.linspace(0.0, 1.0, per_axis + 1)
    mesh = np.stack(np.meshgrid(*([g] * (n + 1)), indexing="ij"), -1).reshape(-1, n + 1)
    return mesh[on_L(n, mesh)]


# mollification of continuous maps ------------------------------------------------


@lru_cache(maxsize=None)
def _nodes(dim: int, q: int):
    """Tensor Gauss-Legendre nodes on ``[-1,1]^dim`` (two panels per axis)."""
    x, w = gauss_legendre(q // 2)
    y = np.concatenate([0.5 * x - 0.5, 0.5 * x + 0.5])
    wy = np.concatenate([0.5 * w, 0.5 * w])
    Y = np.stack(np.meshgrid(*([y] * dim), indexing="ij"), -1).reshape(-1, dim)
    W = np.prod(np.stack(np.meshgrid(*([wy] * dim), indexing="ij"), -1).reshape(-1, dim), axis=1)
    return y, Y, W


@lru_cache(maxsize=None)
def _kernel(dim: int, q: int, order: int, moments: int):
    """``W * D^beta (phi x ... x phi)(Y)`` for every multi-index ``|beta| <= order``."""
    phi = make_mollifier(moments)
    y, Y, W = _nodes(dim, q)
    d1 = phi.derivatives(y, order)  # (order+1, q)
    idx = multi_indices(dim, order)
    grids = np.meshgrid(*([np.arange(len(y))] * dim), indexing="ij")
    flat = [g.reshape(-1) for g in grids]
    K = np.empty((len(idx), len(W)))
    for j, beta in enumerate(idx):
        K[j] = W * np.prod([d1[b][flat[i]] for i, b in enumerate(beta)], axis=0)
    K[0] /= K[0].sum()
    return Y, K


def mollify_map(r: Callable, dim: int, target: BoxDomain, moments: int = 0, quad: int = DEFAULT_QUAD,
                label: str = "R", max_order: int = 4) -> MapNet:
    """``R_eps(x) = int r(clip(x - eps y)) phi(y) dy`` on the closed cube ``I^dim``.

    ``r(eps, P)`` returns an ``(M, m)`` array for points of the closed cube; the
    nearest-point projection (clipping) extends it to a neighbourhood.  Jets come
    from differentiating the kernel.  Values are computed as increments over
    ``r(x)`` so that constant maps are reproduced exactly.
    """
    m = target.dim

    def jet_fn(eps, X, order):
        Y, K = _kernel(dim, quad, order, moments)
        t = tables(dim, order)
        X = np.asarray(X, dtype=float)
        M = X.shape[0]
        coeff = np.zeros((m, len(t.idx), M))
        chunk = max(1, 400_000 // len(Y))
        for start in range(0, M, chunk):
            Xc = np.clip(X[start:start + chunk], 0.0, 1.0)
            P = np.clip(Xc[:, None, :] - eps * Y[None], 0.0, 1.0).reshape(-1, dim)
            G = np.asarray(r(eps, P), dtype=float).reshape(len(Xc), len(Y), m)
            g0 = np.asarray(r(eps, Xc), dtype=float).reshape(len(Xc), m)
            D = G - g0[:, None, :]
            # D^beta R = eps^-|beta| sum_k K_beta(Y_k) D_k, stored as D^beta R / beta!
            vals = np.einsum("jq,mqc->cjm", K, D)
            vals *= (eps ** -t.degree.astype(float) / t.fact)[None, :, None]
            vals[:, 0, :] += g0.T
            coeff[:, :, start:start + chunk] = vals
        return [Jet(dim, order, coeff[c]) for c in range(m)]

    return MapNet(cube(dim), target, jet_fn, max_order, None, label)


def mollified_retraction(n: int, moments: int = 0, quad: int = DEFAULT_QUAD) -> MapNet:
    """Mollified :func:`retraction` on the cube of dimension ``n + 2``."""
    k = n + 1
    return mollify_map(lambda eps, P: retract(k, P), k + 1, cube(k + 1), moments, quad, f"R{n}")


# homotopies ----------------------------------------------------------------------


@dataclass(frozen=True)
class HomotopyNet:
    """A map net on ``X x I`` with ``t`` as the last source coordinate."""

    net: MapNet

    @property
    def space_dim(self) -> int:
        return self.net.source.dim - 1

    def at(self, t: float) -> MapNet:
        """The endpoint (or any time slice) as a map net on ``X``."""
        n = self.space_dim
        src = BoxDomain(self.net.source.lower[:n], self.net.source.upper[:n],
                        self.net.source.open_lower[:n], self.net.source.open_upper[:n])

        def jet_fn(eps, X, order):
            X = np.asarray(X, dtype=float).reshape(-1, n)
            Xt = np.concatenate([X, np.full((len(X), 1), float(t))], axis=1)
            return [c.select(list(range(n))) for c in self.net.jets(eps, Xt, order, False)]
        return MapNet(src, self.net.target, jet_fn, self.net.max_order, None, f"{self.net.label}(.,{t:g})")

    def values(self, eps: float, X, t) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        T = np.broadcast_to(np.asarray(t, dtype=float), (len(X),)).reshape(-1, 1)
        return self.net.values(eps, np.concatenate([X, T], axis=1))


def retracting_homotopy(R: MapNet) -> HomotopyNet:
    """``h(u, t) = (1 - t) R(u) + t u`` on ``I^{n+1} x I``."""
    d = R.source.dim
    if R.target.dim != d:
        raise ShapeError("the retraction must map the cube to itself")

    def jet_fn(eps, X, order):
        X = np.asarray(X, dtype=float)
        v = Jet.variables(X, order)
        Rj = [c.embed(d + 1, list(range(d))) for c in R.jets(eps, X[:, :d], order, False)]
        t = v[d]
        return [(1.0 - t) * Rj[i] + t * v[i] for i in range(d)]
    net = MapNet(cube(d + 1), R.target, jet_fn, R.max_order, None, f"h[{R.label}]")
    return HomotopyNet(net)


# data on L^n and its extension ---------------------------------------------------


def face_names(n: int) -> list:
    return ["bottom"] + [f"s{i}={v}" for i in range(n) for v in (0, 1)]


@dataclass
class LData:
    """A map on ``L^n`` given face by face: ``faces[name](eps, P) -> (M, m)``."""

    n: int
    faces: dict
    target: BoxDomain

    @classmethod
    def from_function(cls, n: int, fn: Callable, target: BoxDomain) -> "LData":
        return cls(n, {name: fn for name in face_names(n)}, target)

    def __post_init__(self):
        missing = set(face_names(self.n)) - set(self.faces)
        if missing:
            raise ConsistencyError(f"faces {sorted(missing)} of L^{self.n} have no data", None)

    def face_of(self, P) -> np.ndarray:
        """Index into :func:`face_names`: bottom first, then sides in coordinate order."""
        P = np.atleast_2d(P)
        n = self.n
        out = np.full(len(P), -1)
        out[P[:, n] == 0.0] = 0
        for i in range(n):
            for v in (0, 1):
                m = (out < 0) & (P[:, i] == float(v))
                out[m] = 1 + 2 * i + v
        return out

    def evaluate(self, eps: float, P) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))
        face = self.face_of(P)
        if (face < 0).any():
            raise DomainError(f"point {tuple(P[face < 0][0])} is not on L^{self.n}")
        out = np.empty((len(P), self.target.dim))
        names = face_names(self.n)
        for k in np.unique(face):
            m = face == k
            out[m] = np.asarray(self.faces[names[k]](eps, P[m]), dtype=float).reshape(-1, self.target.dim)
        return out

    def check_seams(self, eps_values=(0.5, 0.1, 0.01), per_axis: int = 8, tol: float = SEAM_TOL,
                    cell=None) -> float:
        """Largest disagreement of neighbouring faces on shared edges."""
        n = self.n
        pts = L_grid(n, per_axis)
        names = face_names(n)
        worst = 0.0
        for eps in eps_values:
            vals = {}
            for k, name in enumerate(names):
                on = _on_face(n, pts, k)
                if on.any():
                    vals[name] = (on, np.asarray(self.faces[name](eps, pts[on])).reshape(-1, self.target.dim))
            for a in names:
                for b in names:
                    if a >= b or a not in vals or b not in vals:
                        continue
                    ia, va = vals[a]
                    ib, vb = vals[b]
                    both = ia & ib
                    if not both.any():
                        continue
                    ra = va[np.cumsum(ia)[both] - 1]
                    rb = vb[np.cumsum(ib)[both] - 1]
                    worst = max(worst, float(np.max(np.abs(ra - rb))))
        if worst > tol:
            raise ConsistencyError(f"face data disagree on a shared edge by {worst:.3g}", cell)
        return worst


def _on_face(n: int, P, k: int) -> np.ndarray:
    if k == 0:
        return P[:, n] == 0.0
    i, v = divmod(k - 1, 2)
    return P[:, i] == float(v)


def extend_from_L(g: LData, moments: int = 0, quad: int = DEFAULT_QUAD, check: bool = True,
                  label: str = "ext") -> MapNet:
    """Extension of ``g`` from ``L^n`` to ``I^{n+1}``: the mollified ``g o r``."""
    if check:
        g.check_seams()
    n = g.n
    return mollify_map(lambda eps, P: g.evaluate(eps, retract(n, P)), n + 1, g.target, moments,
                       quad, label)


# cell complexes ------------------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    dim: int
    attach: dict


@dataclass
class CellComplex:
    """Base points ``A`` (finitely many vertices) and cells attached in order.

    Attaching maps: ``endpoints`` (1-cells, a point reference per end),
    ``collapse`` (the whole boundary to one point) and ``perimeter`` (the
    boundary square, traversed counterclockwise from the origin, onto a loop
    1-cell).  A point reference is ``["base", i]`` or ``["cell", j, [s...]]``.
    """

    n_base: int
    cells: list
    name: str = "complex"

    def __post_init__(self):
        if self.n_base < 0:
            raise ConsistencyError("negative number of base points", None)
        for b, cell in enumerate(self.cells):
            self._validate(b, cell)

    def piece_dim(self, piece: int) -> int:
        return 0 if piece < self.n_base else self.cells[piece - self.n_base].dim

    def _ref(self, b: int, ref) -> tuple:
        if not isinstance(ref, (list, tuple)) or not ref:
            raise ConsistencyError(f"bad point reference {ref!r}", b)
        if ref[0] == "base":
            i = int(ref[1])
            if not 0 <= i < self.n_base:
                raise ConsistencyError(f"base point {i} does not exist", b)
            return i, np.zeros(0)
        if ref[0] == "cell":
            j = int(ref[1])
            if not 0 <= j < b:
                raise ConsistencyError(f"cell {b} attaches to cell {j}, which is not earlier", b)
            s = np.asarray(ref[2] if len(ref) > 2 else [], dtype=float)
            if len(s) != self.cells[j].dim or ((s < 0) | (s > 1)).any():
                raise ConsistencyError(f"point {list(s)} is not in cell {j}", b)
            return self.n_base + j, s
        raise ConsistencyError(f"bad point reference {ref!r}", b)

    def _validate(self, b: int, cell: Cell):
        kind = cell.attach.get("kind")
        if cell.dim < 1:
            raise ConsistencyError("cells have dimension at least 1", b)
        if kind == "endpoints":
            if cell.dim != 1 or len(cell.attach.get("to", [])) != 2:
                raise ConsistencyError("endpoints attach 1-cells to two points", b)
            for ref in cell.attach["to"]:
                self._ref(b, ref)
        elif kind == "collapse":
            self._ref(b, cell.attach.get("to"))
        elif kind == "perimeter":
            j = int(cell.attach.get("cell", -1))
            if cell.dim != 2 or not 0 <= j < b or self.cells[j].dim != 1:
                raise ConsistencyError("perimeter attaches a 2-cell onto an earlier 1-cell", b)
            ends = self.cells[j].attach
            if ends.get("kind") != "endpoints" or list(ends["to"][0]) != list(ends["to"][1]):
                raise ConsistencyError(f"cell {j} is not a loop", b)
        else:
            raise ConsistencyError(f"unknown attaching map {kind!r}", b)

    def attach(self, b: int, S) -> tuple:
        """Images of boundary points ``S`` of cell ``b``: ``(piece ids, coordinates)``."""
        cell = self.cells[b]
        S = np.atleast_2d(np.asarray(S, dtype=float))
        M = len(S)
        width = max([c.dim for c in self.cells[:b]] + [1])
        coords = np.full((M, width), np.nan)
        kind = cell.attach["kind"]
        if kind == "endpoints":
            pieces = np.empty(M, dtype=int)
            for end, ref in enumerate(cell.attach["to"]):
                m = S[:, 0] == float(end)
                pid, s = self._ref(b, ref)
                pieces[m] = pid
                coords[np.ix_(m, np.arange(len(s)))] = s
            if not np.isin(S[:, 0], (0.0, 1.0)).all():
                raise DomainError("1-cell boundary points are 0 and 1")
            return pieces, coords
        if kind == "collapse":
            pid, s = self._ref(b, cell.attach["to"])
            coords[:, :len(s)] = s
            return np.full(M, pid), coords
        # perimeter: arclength fraction around the unit square
        x, y = S[:, 0], S[:, 1]
        sigma = np.where(y == 0, x / 4, np.where(x == 1, 0.25 + y / 4,
                         np.where(y == 1, 0.5 + (1 - x) / 4, 0.75 + (1 - y) / 4)))
        sigma = np.where(sigma >= 1.0, 0.0, sigma)
        coords[:, 0] = sigma
        return np.full(M, self.n_base + int(cell.attach["cell"])), coords

    @classmethod
    def from_json(cls, data: dict) -> "CellComplex":
        try:
            cells = [Cell(int(c["dim"]), dict(c["attach"])) for c in data.get("cells", [])]
            return cls(int(data["base"]), cells, data.get("name", "complex"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed cell complex: {exc}") from exc


def boundary_grid(n: int, per_axis: int) -> np.ndarray:
    g = np.linspace(0.0, 1.0, per_axis + 1)
    mesh = np.stack(np.meshgrid(*([g] * n), indexing="ij"), -1).reshape(-1, n)
    return mesh[np.any((mesh == 0) | (mesh == 1), axis=1)]


# maps on complexes ---------------------------------------------------------------


@dataclass
class PieceMap:
    """A map on a complex, piece by piece: ``fn(eps, coordinate_jets) -> list of jets``.

    Base pieces get zero coordinates; a time variable, when present, comes last.
    """

    pieces: list
    target_dim: int

    def jets(self, piece: int, eps: float, X, order: int) -> list:
        X = np.asarray(X, dtype=float)
        out = self.pieces[piece](eps, Jet.variables(X, order))
        res = []
        for c in out:
            if not isinstance(c, Jet):
                c = Jet.constant(c, X.shape[1], order, (X.shape[0],))
            res.append(c)
        if len(res) != self.target_dim:
            raise ShapeError(f"piece {piece} has {len(res)} components, expected {self.target_dim}")
        return res

    def values(self, piece: int, eps: float, X) -> np.ndarray:
        return np.stack([np.real(c.value) for c in self.jets(piece, eps, X, 0)], axis=1)


def expression_piece(texts: Sequence[str], variables: Sequence[str]) -> Callable:
    from .exprs import evaluate, parse_expression
    nodes = [parse_expression(t, variables) for t in texts]
    return lambda eps, v: [evaluate(node, eps, v) for node in nodes]


@dataclass
class HEPReport:
    complex_name: str
    trivial: bool
    h0_vs_f: list = field(default_factory=list)   # (cell, EquivalenceVerdict)
    glue: list = field(default_factory=list)      # (cell, OrderEstimate)

    @property
    def order(self) -> float:
        orders = [v.order for _, v in self.h0_vs_f] + [e.negligibility for _, e in self.glue]
        return min(orders) if orders else math.inf

    def to_json(self) -> dict:
        def order(v):
            return None if not math.isfinite(v) else int(v)
        return {
            "complex": self.complex_name,
            "result": "H = h" if self.trivial else "extended",
            "H0_vs_f": [{"cell": b, "kind": v.kind, "order": order(v.order),
                         "evidence": [e.to_json() for e in v.evidence]} for b, v in self.h0_vs_f],
            "H_on_A_vs_h": [{"cell": b, "kind": EQUIVALENT if e.negligibility >= 1 else "NotEquivalent",
                             "order": order(e.negligibility), "evidence": e.to_json()}
                            for b, e in self.glue],
            "verdict": EQUIVALENT if self.order >= 1 else "NotEquivalent",
            "order": order(self.order),  # null: every tested order holds
        }


@dataclass
class ExtendedHomotopy:
    """``H`` on ``X x I``: base points follow ``h``, each cell its extension."""

    complex: CellComplex
    f: PieceMap
    h: PieceMap
    cell_nets: list
    target: BoxDomain

    def values(self, eps: float, pieces, coords, t) -> np.ndarray:
        pieces = np.asarray(pieces, dtype=int).reshape(-1)
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        t = np.broadcast_to(np.asarray(t, dtype=float), pieces.shape)
        out = np.empty((len(pieces), self.target.dim))
        X = self.complex
        for pid in np.unique(pieces):
            m = pieces == pid
            if pid < X.n_base:
                out[m] = self.h.values(pid, eps, t[m][:, None])
            else:
                d = X.piece_dim(pid)
                P = np.concatenate([coords[m][:, :d], t[m][:, None]], axis=1)
                out[m] = self.cell_nets[pid - X.n_base].values(eps, P)
        return out

    def cell_homotopy(self, b: int) -> HomotopyNet:
        return HomotopyNet(self.cell_nets[b])

    def to_csv(self, eps: float, per_axis: int = 8, times: int = 5) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        dmax = max([c.dim for c in self.complex.cells] + [0])
        w.writerow(["piece"] + [f"s{i}" for i in range(dmax)] + ["t"]
                   + [f"H{j}" for j in range(self.target.dim)])
        T = np.linspace(0.0, 1.0, times)
        for pid in range(self.complex.n_base + len(self.complex.cells)):
            d = self.complex.piece_dim(pid)
            if d == 0:
                S = np.zeros((1, 0))
                tag = f"base{pid}"
            else:
                g = np.linspace(0.0, 1.0, per_axis + 1)
                S = np.stack(np.meshgrid(*([g] * d), indexing="ij"), -1).reshape(-1, d)
                tag = f"cell{pid - self.complex.n_base}"
            for t in T:
                V = self.values(eps, np.full(len(S), pid), S if d else np.zeros((len(S), 1)), t)
                for s, v in zip(S, V):
                    w.writerow([tag] + [f"{x:.12g}" for x in s] + [""] * (dmax - d) + [f"{t:.12g}"]
                               + [f"{x:.12g}" for x in v])
        return buf.getvalue()


PRECONDITION_EPS = (0.5, 0.1, 0.01)


def extend_homotopy(X: CellComplex, f: PieceMap, h: PieceMap, target: BoxDomain,
                    moments: int = 0, quad: int = DEFAULT_QUAD, tol: float = SEAM_TOL) -> ExtendedHomotopy:
    """Extend ``h`` on ``A x I`` to ``H`` on ``X x I`` with ``H_0 ~ f``, cell by cell.

    For cell ``b`` of dimension ``n`` the data on ``L^n`` are ``f_b`` on the
    bottom and the homotopy built so far, pulled back along the attaching map,
    on the sides; :func:`extend_from_L` fills the cube.
    """
    if f.target_dim != target.dim or h.target_dim != target.dim:
        raise ShapeError("f, h and the target must agree in dimension")
    zero = np.zeros((1, 1))
    for v in range(X.n_base):
        for eps in PRECONDITION_EPS:
            gap = float(np.max(np.abs(h.values(v, eps, zero) - f.values(v, eps, np.zeros((1, 0))))))
            if gap > tol:
                raise PreconditionError(f"h(a, t=0) differs from f(a) at base point {v} by {gap:.3g} "
                                        f"(eps={eps:g}); the homotopy must start at f (t=0)")
    H = ExtendedHomotopy(X, f, h, [], target)
    for b, cell in enumerate(X.cells):
        n = cell.dim
        pid = X.n_base + b
        S = boundary_grid(n, 8)
        pieces, coords = X.attach(b, S)
        for eps in PRECONDITION_EPS:
            prev = _f_values(X, f, eps, pieces, coords)
            gap = float(np.max(np.abs(f.values(pid, eps, S) - prev)))
            if gap > tol:
                raise ConsistencyError(f"f on cell {b} does not match f on its attaching image "
                                       f"(gap {gap:.3g})", b)
        H.cell_nets.append(extend_from_L(_cell_L_data(H, b), moments, quad, check=False,
                                         label=f"H[cell{b}]"))
    return H


def _f_values(X: CellComplex, f: PieceMap, eps, pieces, coords) -> np.ndarray:
    out = np.empty((len(pieces), f.target_dim))
    for pid in np.unique(pieces):
        m = pieces == pid
        d = X.piece_dim(pid)
        out[m] = f.values(pid, eps, coords[m][:, :d])
    return out


def _cell_L_data(H: ExtendedHomotopy, b: int) -> LData:
    X = H.complex
    n = X.cells[b].dim
    pid = X.n_base + b

    def bottom(eps, P):
        return H.f.values(pid, eps, P[:, :n])

    def side(eps, P):
        pieces, coords = X.attach(b, P[:, :n])
        return H.values(eps, pieces, coords, P[:, n])
    faces = {name: side for name in face_names(n)}
    faces["bottom"] = bottom
    return LData(n, faces, H.target)


def hep_report(H: ExtendedHomotopy, scale: EpsilonScale = EpsilonScale(0.25, 0.5, 6),
               p_max: int = 1, per_axis: int = 16) -> HEPReport:
    """``H_0 ~ f`` per cell (probe equivalence) and the seam ``H`` vs the
    attaching data on boundary x I (sup deviation order)."""
    X = H.complex
    rep = HEPReport(X.name, trivial=not X.cells)
    for b, cell in enumerate(X.cells):
        n = cell.dim
        pid = X.n_base + b
        fb = map_from_function(lambda eps, v, pid=pid: H.f.pieces[pid](eps, v), cube(n), H.target,
                               f"f[cell{b}]")
        H0 = HomotopyNet(H.cell_nets[b]).at(0.0)
        rep.h0_vs_f.append((b, equivalent(fb, H0, smooth_probes(cube(n), H.target), scale=scale,
                                          p_max=p_max, grid=per_axis)))
        S = boundary_grid(n, 4)
        T = np.linspace(0.0, 1.0, per_axis + 1)
        SS = np.repeat(S, len(T), axis=0)
        TT = np.tile(T, len(S))
        pieces, coords = X.attach(b, SS)
        samples = []
        for eps in scale.values:
            mine = H.cell_nets[b].values(eps, np.concatenate([SS, TT[:, None]], axis=1))
            theirs = H.values(eps, pieces, coords, TT)
            samples.append((eps, float(np.max(np.abs(mine - theirs)))))
        rep.glue.append((b, estimate_from_samples(samples, probe=f"seam of cell {b}")))
    return rep


# files ---------------------------------------------------------------------------


def load_problem(path) -> tuple:
    """``(complex, f, h, target)`` from a JSON file with expression-valued maps.

    ``f.base`` lists one vector per base point, ``f.cells`` one vector per cell
    in variables ``x, y`` (cell coordinates); ``h`` lists one vector per base
    point in the variable ``t``.  Expressions may use ``eps``.
    """
    data = json.loads(Path(path).read_text())
    return problem_from_json(data)


def problem_from_json(data: dict) -> tuple:
    X = CellComplex.from_json(data)
    try:
        m = int(data["target_dim"])
        fb = data["f"]["base"]
        fc = data["f"]["cells"]
        hb = data["h"]["base"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed problem file: missing {exc}") from exc
    if len(fb) != X.n_base or len(hb) != X.n_base or len(fc) != len(X.cells):
        raise ParseError("f and h must list one entry per base point and f one per cell")
    names = ("x", "y", "z")
    pieces = [expression_piece(v, ()) for v in fb]
    pieces += [expression_piece(v, names[:c.dim]) for v, c in zip(fc, X.cells)]
    f = PieceMap(pieces, m)
    h = PieceMap([expression_piece(v, ("t",)) for v in hb], m)
    for comp in list(fb) + list(fc) + list(hb):
        if len(comp) != m:
            raise ParseError(f"expected {m} components, got {len(comp)}")
    lo = data.get("target_box", [[-10.0] * m, [10.0] * m])
    target = BoxDomain.open(tuple(lo[0]), tuple(lo[1]))
    return X, f, h, target


def demo_path(name: str = "circle") -> Path:
    return Path(__file__).with_name("data") / f"{name}.json"
