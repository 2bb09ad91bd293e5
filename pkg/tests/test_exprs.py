import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from colombeau.distributions import DeltaDerivative, Heaviside, embed, make_mollifier
from colombeau.errors import ParseError
from colombeau.exprs import expression_function, expression_net, parse_expression
from colombeau.nets import BoxDomain, CompactBox
from colombeau.order import estimate_order

LINE = BoxDomain.open((-4.0,), (4.0,))
K1 = CompactBox.interval(-1.0, 1.0)
X = np.linspace(-1, 1, 41)[:, None]


def test_precedence_and_power():
    f = expression_function("1 + 2*x^2 - x/4", ("x",))
    np.testing.assert_allclose(f(0.5, X), 1 + 2 * X[:, 0] ** 2 - X[:, 0] / 4)
    assert expression_function("-2^2", ("x",))(0.5, [[0.0]])[0] == -4.0
    assert expression_function("2^-1", ("x",))(0.5, [[0.0]])[0] == 0.5
    assert expression_function("pi*e", ())(0.5, np.zeros((1, 0)))[0] == pytest.approx(math.pi * math.e)


@pytest.mark.parametrize("bad", ["", "x +", "sin x", "foo(x)", "x $ 2", "(x", "x y"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_expression(bad)


def test_bump_is_the_normalised_mollifier():
    net = expression_net("bump(x/eps)/eps", LINE)
    delta = embed(DeltaDerivative(0), make_mollifier(0))
    for eps in (0.5, 0.1):
        np.testing.assert_allclose(net.values(eps, X), delta.values(eps, X), atol=1e-12)
        np.testing.assert_allclose(net.values(eps, X, (2,)), delta.values(eps, X, (2,)), rtol=1e-9, atol=1e-9)
    assert estimate_order(net, K1).exponent == pytest.approx(1.0, abs=0.1)


def test_step_is_smoothed_heaviside():
    net = expression_net("step(x/eps)", LINE)
    H = embed(Heaviside(), make_mollifier(0))
    np.testing.assert_allclose(net.values(0.1, X), H.values(0.1, X), atol=1e-12)
    assert estimate_order(net, K1, (1,)).exponent == pytest.approx(1.0, abs=0.1)


def test_thin_features_are_found_off_centre():
    net = expression_net("bump((x - 0.3)/eps)", LINE)
    assert estimate_order(net, K1).exponent == pytest.approx(0.0, abs=0.05)
    foci = net.focus_list(0.01, K1)
    assert any(abs(f.point[0] - 0.3) < 1e-6 for f in foci)


@given(st.floats(-1.0, 1.0), st.sampled_from([0.5, 0.1, 0.01]))
def test_jets_match_numeric_values(x, eps):
    text = "exp(x)*sin(x/eps) + sqrt(1 + x^2) + log(2 + cos(x))"
    net = expression_net(text, LINE)
    fn = expression_function(text, ("x",))
    assert net.eval(eps, x) == pytest.approx(fn(eps, [[x]])[0], rel=1e-12)


def test_two_variables():
    square = BoxDomain.open((-2.0, -2.0), (2.0, 2.0))
    net = expression_net("x*y^2", square)
    assert net.eval(0.5, [1.5, 2.0 - 1e-9], (1, 1)) == pytest.approx(2 * (2.0 - 1e-9))


def test_unknown_variable_for_dimension():
    with pytest.raises(ParseError):
        expression_net("y", LINE)
