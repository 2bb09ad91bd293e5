import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from colombeau import jets as J
from colombeau.jets import Jet, compose, multi_indices

finite = st.floats(-2.0, 2.0, allow_nan=False)


def var(x, order=4):
    return Jet.variables(np.array([[x]]), order)[0]


def test_multi_indices_graded():
    idx = multi_indices(2, 2)
    assert idx[0] == (0, 0)
    assert len(idx) == 6
    assert [sum(a) for a in idx] == sorted(sum(a) for a in idx)


def test_polynomial_derivatives():
    x = var(3.0)
    p = x ** 3 - 2 * x
    assert p.partial((0,))[0] == pytest.approx(21.0)
    assert p.partial((1,))[0] == pytest.approx(25.0)
    assert p.partial((2,))[0] == pytest.approx(18.0)
    assert p.partial((3,))[0] == pytest.approx(6.0)
    assert p.partial((4,))[0] == pytest.approx(0.0)


def test_mixed_partials():
    x, y = Jet.variables(np.array([[1.5, -0.5]]), 3)
    f = x * x * y
    assert f.partial((1, 1))[0] == pytest.approx(2 * 1.5)
    assert f.partial((2, 1))[0] == pytest.approx(2.0)
    assert f.partial((0, 2))[0] == pytest.approx(0.0)


@given(finite)
def test_exp_log_inverse(x):
    j = J.log(J.exp(var(x)))
    np.testing.assert_allclose(j.c[:, 0], var(x).c[:, 0], atol=1e-10)


@given(finite)
def test_sin_derivatives_cycle(x):
    s = J.sin(var(x))
    expected = [math.sin(x), math.cos(x), -math.sin(x), -math.cos(x), math.sin(x)]
    np.testing.assert_allclose([s.partial((k,))[0] for k in range(5)], expected, atol=1e-12)


@given(st.floats(0.2, 3.0))
def test_sqrt_squares_back(x):
    r = J.sqrt(var(x))
    np.testing.assert_allclose((r * r).c[:, 0], var(x).c[:, 0], atol=1e-12)


@given(st.floats(0.2, 3.0))
def test_reciprocal(x):
    q = 1.0 / var(x)
    expected = [(-1) ** k * math.factorial(k) * x ** (-k - 1) for k in range(5)]
    np.testing.assert_allclose([q.partial((k,))[0] for k in range(5)], expected, rtol=1e-10)


@settings(max_examples=50)
@given(finite, finite)
def test_leibniz_second_order(x, y):
    X = np.array([[x, y]])
    a, b = Jet.variables(X, 2)
    f = J.sin(a) * J.exp(b)
    g = a * a + b
    fg = f * g
    al = (1, 1)
    lhs = fg.partial(al)[0]
    rhs = (f.partial((1, 1)) * g.partial((0, 0)) + f.partial((1, 0)) * g.partial((0, 1))
           + f.partial((0, 1)) * g.partial((1, 0)) + f.partial((0, 0)) * g.partial((1, 1)))[0]
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def test_chain_rule_compose():
    # (x + 1)^2 at x = 1: first derivative 4
    x = var(1.0, 2)
    inner = [x + 1.0]
    outer_var = Jet.variables(np.array([[2.0]]), 2)[0]
    out = compose(outer_var * outer_var, inner)
    assert out.partial((1,))[0] == pytest.approx(4.0)
    assert out.partial((2,))[0] == pytest.approx(2.0)


def test_select_and_embed_round_trip():
    x, y = Jet.variables(np.array([[0.3, 0.7]]), 3)
    f = J.exp(x) * y
    g = f.select([0])
    assert g.n == 1
    assert g.partial((2,))[0] == pytest.approx(math.exp(0.3) * 0.7)
    h = J.sin(var(0.3, 3)).embed(2, [0])
    assert h.partial((1, 0))[0] == pytest.approx(math.cos(0.3))
    assert h.partial((0, 1))[0] == 0.0


def test_partial_beyond_order_raises():
    with pytest.raises(ValueError):
        var(0.0, 2).partial((3,))
