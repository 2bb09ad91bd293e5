"""The acceptance suite behind ``colombeau selftest``.

Each criterion returns a :class:`Result` whose detail string holds rounded
measurements only (no timings), so reports are byte-identical for a seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import field as F
from . import jets as J
from .distributions import (Heaviside, DeltaDerivative, abs_spec, check_derivative_commutes,
                            default_test_functions, embed, make_mollifier, pairing_errors,
                            schwartz_witness)
from .exprs import expression_net
from .homotopy import (L_grid, demo_path, extend_homotopy, hep_report, load_problem,
                       mollified_retraction, retraction)
from .maps import (builtin_maps, builtin_product_maps, certify_composite, curry, curry_family,
                   equivalent, is_moderate_map, uncurry)
from .nets import BoxDomain, CompactBox, embed_smooth, mul, net_from_function
from .order import (NOT_MODERATE, EpsilonScale, classify, estimate_from_samples, estimate_order)


@dataclass(frozen=True)
class Result:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{self.number:>2}  {'PASS' if self.passed else 'FAIL'}  {self.title}: {self.detail}"


K1 = CompactBox.interval(-1.0, 1.0)
LINE = BoxDomain.open((-4.0,), (4.0,))


def _f(x: float, digits: int = 4) -> str:
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return str(x)
    return f"{x:.{digits}f}"


# 1 ------------------------------------------------------------------------------


def smooth_nets() -> dict:
    return {"exp": embed_smooth(lambda v: J.exp(v[0]), LINE, label="exp"),
            "sin": embed_smooth(lambda v: J.sin(v[0]), LINE, label="sin"),
            "cubic": embed_smooth(lambda v: v[0] ** 3 - v[0], LINE, label="cubic")}


def criterion_1(seed: int = 0) -> Result:
    delta = embed(DeltaDerivative(0), make_mollifier(4))
    exps = [estimate_order(delta, K1, (k,)).exponent for k in range(3)]
    ok = all(abs(e - (k + 1)) <= 0.1 for k, e in enumerate(exps))
    smooth = [estimate_order(n, K1, (k,)).exponent for n in smooth_nets().values() for k in (0, 1)]
    ok &= all(abs(e) <= 0.05 for e in smooth)
    wild = net_from_function(lambda eps, v: np.exp(1 / eps) * v[0], LINE, label="exp(1/eps) x")
    kind = classify(wild, [K1]).kind
    ok &= kind == NOT_MODERATE
    return Result(1, "moderateness calculus", ok,
                  f"delta exponents {[_f(e) for e in exps]}, smooth max |m| {_f(max(map(abs, smooth)))}, "
                  f"exp(1/eps)x {kind}")


# 2 ------------------------------------------------------------------------------


def ring_nets() -> list:
    phi = make_mollifier(4)
    return [embed(DeltaDerivative(0), phi), embed(Heaviside(), phi),
            *smooth_nets().values(),
            expression_net("eps^2*sin(x/eps)", LINE), expression_net("x^2 + eps", LINE)]


def ring_axiom_errors(seed: int, triples: int = 500) -> float:
    """Worst relative defect of the commutative ring axioms on sampled jets."""
    rng = np.random.default_rng(seed)
    nets = ring_nets()
    scale = EpsilonScale().values
    worst = 0.0
    for _ in range(triples):
        a, b, c = (nets[i] for i in rng.integers(0, len(nets), 3))
        eps = float(scale[rng.integers(0, len(scale))])
        x = rng.uniform(-1.0, 1.0, size=(4, 1))
        k = int(rng.integers(0, 3))
        A, B, C = (n.jets(eps, x, k) for n in (a, b, c))
        al = (k,)
        pairs = [((A + B) + C, A + (B + C), [A, B, C]),
                 ((A * B) * C, A * (B * C), [A * B * C]),
                 (A * (B + C), A * B + A * C, [A * B, A * C]),
                 (A * B, B * A, [A * B]),
                 (A + B, B + A, [A, B])]
        for lhs, rhs, parts in pairs:
            l, r = lhs.partial(al), rhs.partial(al)
            size = sum(np.abs(p.partial(al)) for p in parts) + np.abs(l) + 1e-300
            worst = max(worst, float(np.max(np.abs(l - r) / size)))
    return worst


def fd_slopes() -> tuple:
    """Convergence slopes of central differences against jet derivatives of ``a*b`` and ``u o F``."""
    a = smooth_nets()["exp"]
    b = smooth_nets()["sin"]
    prod = mul(a, b)
    u = lambda v: J.sin(v[0]) * J.exp(0.5 * v[0])  # noqa: E731
    inner = lambda v: v[0] ** 2 + 0.3 * v[0]  # noqa: E731
    chain = embed_smooth(lambda v: u([inner(v)]), LINE, label="chain")
    x0 = np.array([[0.37]])
    hs = 0.1 * 0.5 ** np.arange(6)
    out = []
    for net in (prod, chain):
        exact = float(net.jets(0.5, x0, 1).partial((1,))[0])
        errs = []
        for h in hs:
            v = net.values(0.5, np.array([[x0[0, 0] + h], [x0[0, 0] - h]]))
            errs.append(abs((v[0] - v[1]) / (2 * h) - exact))
        out.append(float(np.polyfit(np.log(hs), np.log(errs), 1)[0]))
    return tuple(out)


def criterion_2(seed: int = 0) -> Result:
    worst = ring_axiom_errors(seed)
    slopes = fd_slopes()
    ok = worst <= 1e-10 and all(1.7 <= s <= 2.3 for s in slopes)
    return Result(2, "differential algebra", ok,
                  f"ring defect {worst:.2e}, Leibniz slope {_f(slopes[0], 3)}, chain slope {_f(slopes[1], 3)}")


# 3 ------------------------------------------------------------------------------


def criterion_3(seed: int = 0) -> Result:
    phi = make_mollifier(4)
    devs = [check_derivative_commutes(Heaviside(), phi, (1,)),
            check_derivative_commutes(DeltaDerivative(0), phi, (1,)),
            check_derivative_commutes(abs_spec(), phi, (2,))]
    ok = all(d < 1e-8 for d in devs)
    return Result(3, "embedding commutes with derivatives", ok,
                  f"H' {devs[0]:.1e}, delta' {devs[1]:.1e}, |x|'' {devs[2]:.1e}")


# 4 ------------------------------------------------------------------------------


PAIRING_SCALE = EpsilonScale(0.25, 0.75, 8)


def criterion_4(seed: int = 0) -> Result:
    worst = {}
    for N in (2, 4):
        phi = make_mollifier(N)
        decay = math.inf
        for u in (DeltaDerivative(0), DeltaDerivative(1), Heaviside()):
            for psi in default_test_functions():
                decay = min(decay, -pairing_errors(u, phi, psi, PAIRING_SCALE)[2].exponent)
        worst[N] = decay
    ok = all(worst[N] >= N - 0.5 for N in worst)
    return Result(4, "association with distributions", ok,
                  ", ".join(f"N={N} min decay {_f(d, 3)}" for N, d in worst.items()))


# 5 ------------------------------------------------------------------------------


def criterion_5(seed: int = 0) -> Result:
    rep = schwartz_witness()
    s, p = rep.sup_order.exponent, rep.pairing_decay.exponent
    ok = -0.2 <= s <= 0.2 and p <= -0.8
    return Result(5, "Schwartz witness", ok, f"sup exponent {_f(s)}, pairing exponent {_f(p)}")


# 6 ------------------------------------------------------------------------------


def random_number(rng, kind=F.REAL) -> F.AsymptoticNumber:
    """Dyadic coefficients on a few rational exponents, so float arithmetic is exact."""
    count = int(rng.integers(1, 4))
    exps = sorted({Fraction(int(rng.integers(-2, 5)), int(rng.choice([1, 2]))) for _ in range(count)})
    terms = [(q, float(rng.integers(-8, 9) or 1) / 4) for q in exps]
    return F.AsymptoticNumber(terms, None, kind)


def field_axiom_failures(seed: int, trials: int = 300) -> int:
    rng = np.random.default_rng(seed)
    bad = 0
    one, zero = F.AN.constant(1.0), F.AN.constant(0.0)
    for _ in range(trials):
        a, b, c = (random_number(rng) for _ in range(3))
        checks = [(a + b) + c == a + (b + c), (a * b) * c == a * (b * c), a + b == b + a,
                  a * b == b * a, a * (b + c) == a * b + a * c, a + zero == a, a * one == a,
                  a + (-a) == zero]
        if len(a.terms) == 1:
            checks.append(a * F.inverse(a) == one)
        bad += sum(not ok for ok in checks)
    return bad


def criterion_6(seed: int = 0) -> Result:
    bad = field_axiom_failures(seed)
    one_plus = F.AN.constant(1.0) + F.RHO
    prod = F.inverse(one_plus, 6) * one_plus
    inv_ok = prod.exact_part() == F.AN.constant(1.0) and prod.error_order == 6
    rts = F.roots([F.AN.constant(-1.0) * F.RHO, F.AN.constant(0.0), F.AN.constant(1.0)], 2)
    vals = []
    for r in rts:
        res = F.poly_eval([F.AN.constant(0j) - F.RHO.as_kind(F.COMPLEX), F.AN.constant(0j),
                           F.AN.constant(1 + 0j)], r)
        vals.append(math.inf if res.valuation is None else float(res.valuation))
    roots_ok = len(rts) == 2 and all(v >= 2 for v in vals)
    order_ok = all(F.compare(F.RHO, 0) == F.GREATER and F.compare(F.RHO, c) == F.LESS
                   for c in (1e-6, 1.0, 1e6))
    ok = bad == 0 and inv_ok and roots_ok and order_ok
    return Result(6, "asymptotic field", ok,
                  f"axiom failures {bad}, (1+r)^-1(1+r) = {F.format_number(prod)}, "
                  f"root residual valuations {[str(v) for v in vals]}, order checks {order_ok}")


# 7 ------------------------------------------------------------------------------


def criterion_7(seed: int = 0) -> Result:
    pool = builtin_maps()
    single = {name: is_moderate_map(m) for name, m in pool.items()}
    lines, ok = [], True
    for gn, g in pool.items():
        for fn, f in pool.items():
            rep = certify_composite(g, f, verdicts=(single[fn], single[gn]))
            ok &= rep.within_bound and rep.composite.kind != NOT_MODERATE
            lines.append(f"{gn}o{fn}={rep.composite.summary()}<={rep.bound}")
    return Result(7, "composition lemma", ok, f"{len(lines)} composites; " + " ".join(lines))


# 8 ------------------------------------------------------------------------------


SLICES = (-0.9, -0.45, 0.0, 0.45, 0.9)


def criterion_8(seed: int = 0) -> Result:
    ok = True
    parts = []
    for name, f in builtin_product_maps().items():
        slices = [is_moderate_map(curry(f, [x])) for x in SLICES]
        rt = equivalent(f, uncurry(curry_family(f)))
        good = all(v.is_moderate for v in slices) and rt.order >= 2
        ok &= good
        order = "inf" if not math.isfinite(rt.order) else str(int(rt.order))
        parts.append(f"{name}: slices {[v.summary() for v in slices]}, round trip order {order}")
    return Result(8, "currying", ok, "; ".join(parts))


# 9 ------------------------------------------------------------------------------


RETRACTION_SCALE = EpsilonScale(0.25, 0.5, 6)


def retraction_idempotent(n: int, per_axis: int) -> bool:
    g = np.linspace(0.0, 1.0, per_axis)
    U = np.stack(np.meshgrid(*([g] * (n + 2)), indexing="ij"), -1).reshape(-1, n + 2)
    r = retraction(n, U)
    return bool(np.array_equal(retraction(n, r), r))


def retraction_deviation(n: int, per_axis: int) -> float:
    R = mollified_retraction(n)
    P = L_grid(n + 1, per_axis)
    samples = [(eps, float(np.max(np.abs(R.values(eps, P) - P)))) for eps in RETRACTION_SCALE.values]
    return estimate_from_samples(samples).exponent


def criterion_9(seed: int = 0) -> Result:
    idem = retraction_idempotent(0, 64) and retraction_idempotent(1, 32)
    devs = [retraction_deviation(0, 32), retraction_deviation(1, 8)]
    X, f, h, target = load_problem(demo_path())
    rep = hep_report(extend_homotopy(X, f, h, target)).to_json()
    h0 = min(c["order"] for c in rep["H0_vs_f"])
    ha = min(c["order"] for c in rep["H_on_A_vs_h"])
    ok = idem and all(d <= -0.8 for d in devs) and h0 >= 1 and ha >= 1
    return Result(9, "retraction and homotopy extension", ok,
                  f"idempotent {idem}, deviation exponents {[_f(d) for d in devs]}, "
                  f"H0~f order {h0}, H|AxI~h order {ha}")


# 10 -----------------------------------------------------------------------------


def criterion_10(seed: int = 0) -> Result:
    first = (ring_axiom_errors(seed, 50), field_axiom_failures(seed, 50))
    second = (ring_axiom_errors(seed, 50), field_axiom_failures(seed, 50))
    ok = first == second
    return Result(10, "determinism", ok, f"seeded suites repeat exactly: {ok}")


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10)


def run(seed: int = 7, only=None) -> list:
    return [c(seed) for i, c in enumerate(CRITERIA, 1) if only is None or i in only]


def report(results) -> str:
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    return "\n".join(lines) + "\n"
