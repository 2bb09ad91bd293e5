import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from colombeau import jets as J
from colombeau.distributions import DeltaDerivative, SmoothFn, embed, make_mollifier
from colombeau.errors import EvaluationError
from colombeau.exprs import expression_net
from colombeau.nets import (BoxDomain, CompactBox, add, constant_net, derive, embed_smooth, mul,
                            neg, net_from_function)
from colombeau.order import (ENVELOPE, EXACT_ZERO, INDETERMINATE, MODERATE, NEGLIGIBLE,
                             NOT_MODERATE, OVERFLOW, SUPERPOLY_DECAY, EpsilonScale, OrderEstimate,
                             classify, estimate_from_samples, estimate_order, verdict_from_estimates)

LINE = BoxDomain.open((-4.0,), (4.0,))
K1 = CompactBox.interval(-1.0, 1.0)
K01 = CompactBox.interval(0.0, 1.0)
SMOOTH = {"exp": lambda v: J.exp(v[0]), "sin": lambda v: J.sin(v[0]), "x3": lambda v: v[0] ** 3}


def test_scale_validation():
    assert EpsilonScale(0.5, 0.5, 4).values == [0.5, 0.25, 0.125, 0.0625]
    for bad in ((0.0, 0.5, 6), (1.5, 0.5, 6), (0.5, 1.0, 6), (0.5, 0.5, 3)):
        with pytest.raises(ValueError):
            EpsilonScale(*bad)
    assert EpsilonScale.parse("0.25,0.5,6") == EpsilonScale(0.25, 0.5, 6)


def test_constant_net_exponent():
    est = estimate_order(constant_net(5.0, LINE), K1)
    assert abs(est.exponent) <= 0.05
    assert est.fit_quality >= 0.99


def test_delta_exponent_and_derivative_shift():
    delta = embed(DeltaDerivative(0))
    for k in range(3):
        assert estimate_order(delta, K1, (k,)).exponent == pytest.approx(1 + k, abs=0.1)
        assert estimate_order(derive(delta, (k,)), K1).exponent == pytest.approx(1 + k, abs=0.1)


def test_eps_squared_sine():
    net = expression_net("eps^2*sin(x/eps)", LINE)
    assert estimate_order(net, K01, (0,)).exponent == pytest.approx(-2, abs=0.1)
    assert estimate_order(net, K01, (1,)).exponent == pytest.approx(-1, abs=0.1)


def test_exact_zero_sentinel():
    zero = add(embed_smooth(SMOOTH["exp"], LINE), neg(embed_smooth(SMOOTH["exp"], LINE)))
    est = estimate_order(zero, K1)
    assert est.exponent == -math.inf
    assert est.marker == EXACT_ZERO
    v = classify(zero, [K1])
    assert v.kind == NEGLIGIBLE and all(v.certifies_negligible(p) for p in range(1, 5))


def test_nan_raises_evaluation_error():
    with pytest.raises(EvaluationError):
        estimate_from_samples([(0.5, 1.0), (0.25, float("nan")), (0.125, 1.0)])


def test_classify_examples():
    assert classify(embed_smooth(SMOOTH["exp"], LINE), [K1]).summary() == "Moderate(0)"
    wild = net_from_function(lambda eps, v: np.exp(1 / eps) * v[0], LINE)
    assert classify(wild, [K1]).kind == NOT_MODERATE
    with pytest.raises(ValueError):
        classify(wild, [])


@pytest.mark.parametrize("N", [2, 4, 6])
@pytest.mark.parametrize("name", sorted(SMOOTH))
def test_mollified_smooth_is_negligible(N, name):
    f = SMOOTH[name]
    diff = add(embed(SmoothFn(f, name), make_mollifier(N)), neg(embed_smooth(f, LINE)))
    v = classify(diff, [K1], 1, p_max=N)
    assert v.kind == NEGLIGIBLE and v.certifies_negligible(N)


def test_monotone_negligibility():
    net = expression_net("eps^3*cos(x)", LINE)
    v = classify(net, [K1], 1, p_max=3)
    assert v.kind == NEGLIGIBLE
    assert all(v.certifies_negligible(q) for q in range(1, 4))
    assert not v.certifies_negligible(4)


def test_product_orders_add():
    a = embed(DeltaDerivative(0))
    b = expression_net("1/(eps + x^2)", LINE)
    va, vb = classify(a, [K1], 0), classify(b, [K1], 0)
    vab = classify(mul(a, b), [K1], 0)
    assert vab.kind == MODERATE
    assert vab.m_or_p <= va.m_or_p + vb.m_or_p + 1


def test_moderate_times_negligible():
    a = embed(DeltaDerivative(0))
    n = expression_net("eps^5*exp(x)", LINE)
    v = classify(mul(a, n), [K1], 0, p_max=3)
    assert v.certifies_negligible(3)


def test_scale_robustness():
    delta = embed(DeltaDerivative(0))
    base = estimate_order(delta, K1, (1,)).exponent
    for scale in (EpsilonScale(0.25, 0.5, 12), EpsilonScale(0.5, 0.5, 16)):
        assert abs(estimate_order(delta, K1, (1,), scale).exponent - base) <= 0.1


@settings(max_examples=60)
@given(st.floats(-4.0, 6.0), st.floats(0.1, 100.0))
def test_recovers_power_laws(m, c):
    samples = [(e, c * e ** -m) for e in EpsilonScale().values]
    est = estimate_from_samples(samples)
    assert est.exponent == pytest.approx(m, abs=1e-9)
    assert est.fit_quality == pytest.approx(1.0)


@settings(max_examples=40)
@given(st.floats(-2.0, 3.0), st.integers(0, 2**32 - 1))
def test_bounded_jitter_keeps_slope(m, seed):
    rng = np.random.default_rng(seed)
    samples = [(e, e ** -m * rng.uniform(0.5, 1.0)) for e in EpsilonScale().values]
    est = estimate_from_samples(samples)
    assert est.fit_quality >= 0.98
    assert abs(est.exponent - m) <= 0.25


def test_envelope_for_pointwise_zeros():
    # sups hit near-zeros at some levels (a node of an oscillation) but the
    # envelope still grows like eps^-1
    eps = EpsilonScale().values
    dips = {1, 4, 7, 10}
    samples = [(e, (1e-3 if i in dips else 1.0) / e) for i, e in enumerate(eps)]
    est = estimate_from_samples(samples)
    assert est.marker == ENVELOPE
    assert est.exponent == pytest.approx(1.0, abs=0.1)


def test_superpolynomial_decay_marker():
    samples = [(e, math.exp(-1 / e)) for e in EpsilonScale(0.5, 0.7, 10).values]
    est = estimate_from_samples(samples)
    assert est.marker == SUPERPOLY_DECAY
    assert est.negligibility >= 4


def test_overflow_is_not_moderate():
    est = estimate_from_samples([(0.5, 1.0), (0.25, 10.0), (0.125, math.inf), (0.0625, math.inf)])
    assert est.marker == OVERFLOW
    assert verdict_from_estimates([est]).kind == NOT_MODERATE
    assert est.to_json()["samples"][2][1] is None


def test_poor_fit_is_indeterminate():
    est = OrderEstimate(1.0, 0.5, [(0.5, 1.0)])
    assert verdict_from_estimates([est]).kind == INDETERMINATE
