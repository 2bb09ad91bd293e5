import itertools
import warnings

import numpy as np
import pytest

from colombeau import jets as J
from colombeau.distributions import (Combination, DeltaDerivative, Heaviside, PrincipalValue,
                                     SmoothFn, abs_spec, bump_test_function,
                                     check_derivative_commutes, default_test_functions, embed,
                                     make_mollifier, pair, pairing_errors, parse_distribution,
                                     schwartz_witness, zero_test_function)
from colombeau.errors import CapabilityError, ParseError, ShapeError
from colombeau.nets import BoxDomain, CompactBox, add, embed_smooth
from colombeau.order import EpsilonScale

LINE = BoxDomain.open((-4.0,), (4.0,))
PSI = bump_test_function()
# oracles for psi = psi[0.2,1.5,0.3]: value and derivative at 0 (Richardson
# central differences of the closed form), scipy quad for the integral over
# (0, 1.7), the Cauchy principal value of psi/x, and the integral of |x| psi
PSI_AT_0 = 0.3468296499083202
DPSI_AT_0 = 0.13616696613849566
PSI_POSITIVE_HALF = 0.4380860392015298
PSI_PV = 0.33321106586395555
PSI_ABS = 0.36195575594986495
SCALE = EpsilonScale(0.25, 0.75, 8)


@pytest.mark.parametrize("N", range(0, 9))
def test_mollifier_moments(N):
    phi = make_mollifier(N)
    assert phi.moment(0) == pytest.approx(1.0, abs=1e-10)
    for j in range(1, N + 1):
        assert abs(phi.moment(j)) < 1e-8


def test_odd_moment_vanishes_by_symmetry():
    assert abs(make_mollifier(0).moment(1)) < 1e-15


def test_mollifier_limits():
    with pytest.raises(CapabilityError):
        make_mollifier(9)
    with pytest.raises(ValueError):
        make_mollifier(-1)


def test_mollifier_cdf_reaches_one():
    phi = make_mollifier(4)
    assert phi.cdf(np.array([-2.0]))[0] == 0.0
    assert phi.cdf(np.array([2.0]))[0] == pytest.approx(1.0, abs=1e-12)
    assert phi.cdf(np.array([0.0]))[0] == pytest.approx(0.5, abs=1e-12)


def test_parse_distribution():
    assert parse_distribution("delta''") == DeltaDerivative(2)
    assert isinstance(parse_distribution("heaviside"), Heaviside)
    assert isinstance(parse_distribution("pv"), PrincipalValue)
    for bad in ("gamma", "delta'x", "smooth:nope"):
        with pytest.raises(ParseError):
            parse_distribution(bad)


def test_test_functions_vanish_outside_support():
    for psi in default_test_functions():
        assert psi.vanishes_outside()


def test_actions_match_oracles():
    assert DeltaDerivative(0).action(PSI) == pytest.approx(PSI_AT_0, rel=1e-12)
    assert DeltaDerivative(1).action(PSI) == pytest.approx(-DPSI_AT_0, rel=1e-7)
    assert Heaviside().action(PSI) == pytest.approx(PSI_POSITIVE_HALF, rel=1e-10)
    assert PrincipalValue().action(PSI) == pytest.approx(PSI_PV, rel=1e-8)
    assert abs_spec().action(PSI) == pytest.approx(PSI_ABS, rel=1e-8)


@pytest.mark.parametrize("u, ref", [(DeltaDerivative(0), PSI_AT_0), (Heaviside(), PSI_POSITIVE_HALF),
                                    (PrincipalValue(), PSI_PV), (abs_spec(), PSI_ABS)])
def test_pairings_converge(u, ref):
    net = embed(u, make_mollifier(4))
    assert pair(net, 0.02, PSI) == pytest.approx(ref, abs=1e-6)


def test_pair_zero_and_smooth_zero():
    zero = embed_smooth(lambda v: 0.0, LINE)
    assert pair(zero, 0.1, PSI) == 0.0
    delta = embed(DeltaDerivative(0))
    assert pair(delta, 0.1, zero_test_function()) == 0.0


@pytest.mark.parametrize("N", [2, 4])
def test_association_rate(N):
    phi = make_mollifier(N)
    for u in (DeltaDerivative(0), DeltaDerivative(1), Heaviside()):
        for psi in default_test_functions():
            _, rows, est = pairing_errors(u, phi, psi, SCALE)
            assert -est.exponent >= N - 0.5


def test_derivative_commutes():
    phi = make_mollifier(4)
    assert check_derivative_commutes(Heaviside(), phi, (1,)) < 1e-10
    assert check_derivative_commutes(DeltaDerivative(0), phi, (1,)) < 1e-10
    assert check_derivative_commutes(abs_spec(), phi, (2,)) < 1e-8


def test_derivative_of_abs_is_twice_delta():
    phi = make_mollifier(4)
    lhs = embed(abs_spec().derivative().derivative(), phi)
    rhs = embed(Combination(((2.0, DeltaDerivative(0)),)), phi)
    X = np.linspace(-1, 1, 41)[:, None]
    np.testing.assert_allclose(lhs.values(0.1, X), rhs.values(0.1, X), atol=1e-12)


def test_linearity_of_embed():
    phi = make_mollifier(4)
    specs = [DeltaDerivative(0), DeltaDerivative(1), Heaviside(), abs_spec(),
             SmoothFn(lambda v: J.sin(v[0]), "sin")]
    X = np.linspace(-1, 1, 33)[:, None]
    for u, v in itertools.combinations(specs, 2):
        both = embed(Combination(((1.0, u), (1.0, v))), phi)
        summed = add(embed(u, phi), embed(v, phi))
        for eps in (0.5, 0.1):
            np.testing.assert_allclose(both.values(eps, X), summed.values(eps, X), atol=1e-9)


def test_schwartz_witness():
    rep = schwartz_witness()
    assert -0.2 <= rep.sup_order.exponent <= 0.2
    assert rep.pairing_decay.exponent <= -0.8
    H = embed(Heaviside())
    w_sup = max(abs(v - v * v) for v in H.values(0.05, np.linspace(-0.2, 0.2, 401)[:, None]))
    assert w_sup == pytest.approx(0.25, abs=1e-3)


def test_heaviside_square_pairs_to_half_line_integral():
    H = embed(Heaviside())
    assert pair(H * H, 0.01, PSI) == pytest.approx(PSI_POSITIVE_HALF, abs=1e-3)


def test_pairing_quadrature_is_resolved():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for eps in SCALE.values:
            pair(embed(DeltaDerivative(1)), eps, PSI)


def test_support_outside_domain():
    narrow = embed(DeltaDerivative(0), domain=BoxDomain.open((-1.0,), (1.0,)))
    with pytest.raises(ShapeError):
        pair(narrow, 0.1, PSI)
    assert CompactBox.interval(-1.3, 1.7).inside(LINE)
