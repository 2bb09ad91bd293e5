"""Empirical growth orders of nets as eps -> 0 and the verdicts built on them."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EvaluationError
from .nets import CompactBox, Net, alphas_up_to, as_alpha, sups_on_box

FIT_THRESHOLD = 0.98
MARGIN = 0.25
SUPERPOLY_JUMP = 1.0

MODERATE = "Moderate"
NEGLIGIBLE = "Negligible"
NOT_MODERATE = "NotModerate"
INDETERMINATE = "Indeterminate"

EXACT_ZERO = "exact zero"
OVERFLOW = "overflow"
SUPERPOLY = "superpolynomial"
BELOW_FLOOR = "below noise floor"
ENVELOPE = "envelope"
SUPERPOLY_DECAY = "superpolynomial decay"

# sups at or below this are treated as floating point rounding of zero
NOISE_FLOOR = 1e-13
MIN_FIT_POINTS = 3
SLOPE_FLOOR = 2.0
ENVELOPE_VERTICES = 3


@dataclass(frozen=True)
class EpsilonScale:
    """Geometric sample ``eps_k = eps0 * ratio**k`` for ``k < count``."""

    eps0: float = 0.5
    ratio: float = 0.5
    count: int = 12

    def __post_init__(self):
        if not 0 < self.eps0 <= 1:
            raise ValueError("eps0 must lie in (0, 1]")
        if not 0 < self.ratio < 1:
            raise ValueError("ratio must lie in (0, 1)")
        if self.count < 4:
            raise ValueError("count must be at least 4")

    @property
    def values(self) -> list:
        return [self.eps0 * self.ratio ** k for k in range(self.count)]

    @classmethod
    def parse(cls, text: str) -> "EpsilonScale":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError("scale must be 'eps0,ratio,count'")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]))


@dataclass
class OrderEstimate:
    """Measured exponent ``m`` in ``sup ~ C eps^-m``; negative means decay."""

    exponent: float
    fit_quality: float
    samples: list
    box: CompactBox | None = None
    alpha: tuple = ()
    marker: str | None = None
    first_used: int = 0
    tail_exponent: float | None = None
    probe: str | None = None

    @property
    def negligibility(self) -> float:
        """Largest integer p with ``exponent <= -p + margin`` (inf for exact zero)."""
        if self.exponent == -math.inf:
            return math.inf
        return math.floor(-self.exponent + MARGIN)

    def to_json(self) -> dict:
        out = {
            "box": self.box.to_json() if self.box is not None else None,
            "alpha": list(self.alpha),
            "exponent": None if not math.isfinite(self.exponent) else float(self.exponent),
            "fit": float(self.fit_quality),
            # overflowed sups have no JSON number; the marker records the overflow
            "samples": [[float(e), float(s) if math.isfinite(s) else None] for e, s in self.samples],
        }
        if self.marker:
            out["marker"] = self.marker
        if self.probe is not None:
            out["probe"] = self.probe
        return out


def _fit(x: np.ndarray, y: np.ndarray) -> tuple:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    sxx = float(((x - x.mean()) ** 2).sum())
    # R^2 with the total variation floored at what a slope of SLOPE_FLOOR would
    # explain, so bounded but jittery sups (sampled oscillations) are not
    # mistaken for a failed fit; keeps the slope standard error below ~0.1
    quality = 1.0 - ss_res / max(ss_tot, sxx * SLOPE_FLOOR ** 2)
    return float(slope), max(0.0, min(1.0, quality))


def estimate_from_samples(samples: Sequence, box=None, alpha=(), probe=None,
                          floor: float | None = None) -> OrderEstimate:
    """Fit ``log sup`` against ``log(1/eps)`` for ``(eps, sup)`` pairs ordered by decreasing eps.

    Sups at or below ``floor`` are rounding noise and excluded from the fit;
    when fewer than three samples remain the exponent is ``-inf``.
    """
    floor = NOISE_FLOOR if floor is None else floor
    samples = [(float(e), float(s)) for e, s in samples]
    if not samples:
        raise ValueError("no samples")
    for e, s in samples:
        if math.isnan(s):
            raise EvaluationError("evaluation produced NaN", box=box, alpha=alpha, eps=e)
    common = dict(box=box, alpha=tuple(alpha), probe=probe)
    marker = OVERFLOW if any(math.isinf(s) for _, s in samples) else None
    keep = [i for i, (e, s) in enumerate(samples) if s > floor and math.isfinite(s)]
    if marker is None and len(keep) < MIN_FIT_POINTS:
        tag = EXACT_ZERO if all(s == 0 for _, s in samples) else BELOW_FLOOR
        return OrderEstimate(-math.inf, 1.0, samples, marker=tag, **common)
    if len(keep) < 2:
        return OrderEstimate(math.inf, 0.0, samples, marker=marker, **common)
    x = np.array([-math.log(samples[i][0]) for i in keep])
    y = np.array([math.log(samples[i][1]) for i in keep])
    full, _ = _fit(x, y)
    tail = max(len(x) // 2, 2)
    tail_exp, _ = _fit(x[-tail:], y[-tail:])
    if marker is None and tail_exp > 0 and tail_exp - full > SUPERPOLY_JUMP:
        marker = SUPERPOLY
    if marker is None and tail_exp < 0 and full - tail_exp > SUPERPOLY_JUMP:
        # accelerating decay (e.g. exp(-1/eps)): the tail slope is the honest bound
        return OrderEstimate(tail_exp, 1.0, samples, marker=SUPERPOLY_DECAY,
                             first_used=len(x) - tail, tail_exponent=tail_exp, **common)
    first = 0
    exp, quality = full, 0.0
    for first in range(0, len(x) // 2 + 1):
        if len(x) - first < 2:
            break
        exp, quality = _fit(x[first:], y[first:])
        if quality >= FIT_THRESHOLD:
            break
    if quality < FIT_THRESHOLD and marker is None:
        env = _envelope(x, y)
        if env is not None and env[1] >= FIT_THRESHOLD:
            exp, quality = env
            marker = ENVELOPE
    return OrderEstimate(exp, quality, samples, marker=marker, first_used=first,
                         tail_exponent=tail_exp, **common)


def _envelope(x: np.ndarray, y: np.ndarray, vertices: int = ENVELOPE_VERTICES):
    """Slope through the last vertices of the upper concave hull of ``(x, y)``.

    Erratic but bounded data (pointwise evaluations of oscillating nets) has no
    good least-squares line, yet its upper hull still bounds the growth rate.
    """
    hull: list = []
    for p in zip(x, y):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) > 0:
                hull.pop()
            else:
                break
        hull.append(p)
    if len(hull) < vertices:
        return None
    hx, hy = np.array(hull[-vertices:]).T
    return _fit(hx, hy)


def estimate_order(a: Net, K: CompactBox, alpha=None, scale: EpsilonScale = EpsilonScale(),
                   grid_per_axis: int | None = None, floor: float | None = None) -> OrderEstimate:
    alpha = as_alpha(alpha, a.dim)
    samples = []
    for eps in scale.values:
        samples.append((eps, sups_on_box(a, eps, K, [alpha], grid_per_axis)[alpha]))
    return estimate_from_samples(samples, K, alpha, floor=floor)


@dataclass
class Verdict:
    kind: str
    m_or_p: int | None
    evidence: list = field(default_factory=list)
    negligible_to: float = 0.0

    @property
    def is_moderate(self) -> bool:
        return self.kind in (MODERATE, NEGLIGIBLE)

    def certifies_negligible(self, p: int) -> bool:
        return self.kind in (MODERATE, NEGLIGIBLE) and self.negligible_to >= p

    def to_json(self) -> dict:
        return {"kind": self.kind, "m_or_p": self.m_or_p,
                "evidence": [e.to_json() for e in self.evidence]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def summary(self) -> str:
        tag = self.kind if self.m_or_p is None else f"{self.kind}({self.m_or_p})"
        return tag


def verdict_from_estimates(estimates: Sequence[OrderEstimate], p_max: int = 4) -> Verdict:
    if p_max < 1:
        raise ValueError("p_max must be at least 1")
    estimates = list(estimates)
    if not estimates:
        raise ValueError("no evidence")
    if any(e.marker in (OVERFLOW, SUPERPOLY) for e in estimates):
        return Verdict(NOT_MODERATE, None, estimates)
    if any(e.marker not in (EXACT_ZERO, BELOW_FLOOR) and e.fit_quality < FIT_THRESHOLD for e in estimates):
        return Verdict(INDETERMINATE, None, estimates)
    p_star = min(e.negligibility for e in estimates)
    if p_star >= p_max:
        return Verdict(NEGLIGIBLE, p_max, estimates, p_star)
    worst = max(e.exponent for e in estimates)
    m = max(0, math.ceil(worst - MARGIN))
    return Verdict(MODERATE, m, estimates, max(p_star, 0))


def classify(a: Net, boxes: Sequence[CompactBox], max_alpha_order: int = 1,
             scale: EpsilonScale = EpsilonScale(), p_max: int = 4,
             grid_per_axis: int | None = None, floor: float | None = None) -> Verdict:
    """Moderate / Negligible / NotModerate / Indeterminate verdict for ``a``."""
    if not boxes:
        raise ValueError("at least one compact box is required")
    alphas = alphas_up_to(a.dim, max_alpha_order)
    estimates = []
    for K in boxes:
        per_alpha = {al: [] for al in alphas}
        for eps in scale.values:
            try:
                sups = sups_on_box(a, eps, K, alphas, grid_per_axis)
            except FloatingPointError as exc:
                raise EvaluationError(str(exc), box=K, alpha=None, eps=eps) from exc
            for al in alphas:
                per_alpha[al].append((eps, sups[al]))
        for al in alphas:
            estimates.append(estimate_from_samples(per_alpha[al], K, al, floor=floor))
    return verdict_from_estimates(estimates, p_max)
