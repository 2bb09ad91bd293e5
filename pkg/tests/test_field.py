from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from colombeau import field as F
from colombeau.errors import InsufficientPrecisionError, NotASquareError, ParseError
from colombeau.order import EXACT_ZERO, classify, estimate_from_samples, EpsilonScale
from colombeau.nets import BoxDomain, CompactBox

AN, RHO = F.AN, F.RHO
ONE = AN.constant(1.0)

exponents = st.builds(Fraction, st.integers(-6, 12), st.integers(1, 6))
dyadic = st.integers(-16, 16).filter(bool).map(lambda k: k / 4)
complex_dyadic = st.tuples(st.integers(-8, 8), st.integers(-8, 8)).filter(any).map(
    lambda p: complex(p[0] / 4, p[1] / 4))


@st.composite
def numbers(draw, kind=F.REAL, with_error=True):
    qs = sorted(draw(st.sets(exponents, min_size=1, max_size=4)))
    coef = complex_dyadic if kind == F.COMPLEX else dyadic
    terms = [(q, draw(coef)) for q in qs]
    Q = None
    if with_error and draw(st.booleans()):
        Q = qs[-1] + draw(st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(3)]))
    return AN(terms, Q, kind)


def same(x, y):
    """Equality at the shared error order."""
    Q = F._qmin(x.error_order, y.error_order)
    return x.truncate(Q) == y.truncate(Q) if Q is not None else x == y


def test_add_mul_examples():
    z = RHO + (-RHO)
    assert z.is_zero
    assert (RHO + AN([(1, -1.0)], 3) + AN.big_o(2)).error_order == 2
    assert RHO * RHO == AN.monomial(1.0, 2)
    b = AN([(0, 1.0), (1, -1.0), (2, 1.0)], 3)
    assert (ONE + RHO) * b == AN([(0, 1.0)], 3)


def test_inverse_examples():
    assert F.inverse(ONE) == ONE
    assert F.inverse(RHO) == AN.monomial(1.0, -1)
    assert F.inverse(ONE + RHO, 3) == AN([(0, 1.0), (1, -1.0), (2, 1.0)], 3)
    with pytest.raises(ZeroDivisionError):
        F.inverse(AN.big_o(3))


def test_sqrt_examples():
    assert F.sqrt(RHO * RHO) == RHO
    assert F.sqrt(ONE + RHO, 3) == AN([(0, 1.0), (1, 0.5), (2, -0.125)], 3)
    r = F.sqrt(RHO)
    assert r == AN.monomial(1.0, Fraction(1, 2))
    assert r * r == RHO
    with pytest.raises(NotASquareError):
        F.sqrt(-RHO)


def test_compare_examples():
    assert F.compare(RHO, 0) == F.GREATER
    for c in (1e-6, 1.0, 1e6):
        assert F.compare(RHO, c) == F.LESS
    assert F.compare(ONE + RHO, 1) == F.GREATER
    assert F.compare(AN.big_o(2), 0) == F.EQUAL


def test_standard_part():
    assert F.standard_part(ONE + RHO) == 1.0
    assert F.standard_part(RHO) == 0.0
    with pytest.raises(F.Infinite):
        F.standard_part(F.inverse(RHO))


def roots_of(coeffs, target):
    return sorted((F.format_number(r.real_part()) for r in F.roots(coeffs, target)))


def test_roots_examples():
    assert roots_of([-RHO, 0, 1], 2) == ["-1*r^{1/2} + O(r^2)", "1*r^{1/2} + O(r^2)"]
    assert roots_of([-1, 0, 1], 2) == ["-1 + O(r^2)", "1 + O(r^2)"]
    assert roots_of([RHO * RHO, -2 * RHO, 1], 2) == ["1*r^1 + O(r^2)"] * 2


def test_roots_precision_error_names_exponent():
    with pytest.raises(InsufficientPrecisionError) as info:
        F.roots([AN([(0, 1.0)], 1), AN.constant(2.0), ONE], 3)
    assert info.value.exponent == 1


def test_scalar_net_orders():
    R0 = BoxDomain.point()
    K = CompactBox((), ())
    assert classify(F.to_scalar_net(RHO), [K], 0).summary() == "Moderate(0)"
    v = classify(F.to_scalar_net(F.inverse(RHO)), [K], 0)
    assert v.summary() == "Moderate(1)"
    assert v.evidence[0].exponent == pytest.approx(1.0, abs=1e-9)
    assert classify(F.to_scalar_net(RHO), [K], 0).evidence[0].exponent == pytest.approx(-1.0, abs=1e-9)
    zero = F.to_scalar_net(AN.constant(0.0))
    samples = [(e, abs(zero.values(e, [[]])[0])) for e in EpsilonScale().values]
    assert estimate_from_samples(samples).marker == EXACT_ZERO
    assert F.to_scalar_net(RHO).domain == R0


@settings(max_examples=1000)
@given(st.sampled_from([F.REAL, F.COMPLEX]).flatmap(lambda k: st.tuples(numbers(k), numbers(k), numbers(k))))
def test_field_axioms(abc):
    a, b, c = abc
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert same(a * (b + c), a * b + a * c)
    assert a + 0 == a and a * 1 == a
    assert (a + (-a)).terms == ()


@settings(max_examples=300)
@given(numbers(with_error=False), st.integers(2, 8))
def test_inverse_property(a, Q):
    prod = a * F.inverse(a, Q)
    assert prod == AN([(0, 1.0)], prod.error_order)
    gap = a.terms[1][0] - a.terms[0][0] if len(a.terms) > 1 else 0
    assert prod.error_order is None or prod.error_order >= Q - gap


@settings(max_examples=300)
@given(numbers(with_error=False), numbers(with_error=False), numbers(with_error=False))
def test_order_axioms(a, b, c):
    ab, ba = F.compare(a, b), F.compare(b, a)
    assert {ab, ba} == {F.LESS, F.GREATER} or ab == ba == F.EQUAL
    if ab == F.GREATER:
        assert F.compare(a + c, b + c) == F.GREATER
        if c.leading[1] > 0:
            assert F.compare(a * c, b * c) == F.GREATER


@settings(max_examples=300)
@given(numbers(with_error=False), numbers(with_error=False), numbers(with_error=False),
       numbers(with_error=False))
def test_complex_decomposition(a, b, c, d):
    i = AN.constant(1j)
    z = a.as_kind(F.COMPLEX) + i * b
    w = c.as_kind(F.COMPLEX) + i * d
    zw = z * w
    assert zw.real_part() == a * c - b * d
    assert zw.imag_part() == a * d + b * c


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(0, 2)), min_size=1, max_size=3),
       st.integers(1, 4))
def test_roots_back_substitute(lower, target):
    coeffs = [AN.monomial(float(c), q) if c else AN.constant(0.0) for c, q in lower] + [ONE]
    assume(not coeffs[0].is_zero)
    rts = F.roots(coeffs, target)
    assert len(rts) == len(coeffs) - 1
    P = [c.as_kind(F.COMPLEX) for c in coeffs]
    for r in rts:
        v = F.poly_eval(P, r.exact_part()).valuation
        assert v is None or v >= target


def test_parse_and_format():
    assert F.format_number(F.parse_number("1 + 2*r^{1/2} + O(r^3)")) == "1 + 2*r^{1/2} + O(r^3)"
    with pytest.raises(ParseError):
        F.parse_number("1 + + ")


def test_evaluate_command_examples():
    assert F.evaluate_command("inv(1 + 1*r^1, 3)") == ["1 - 1*r^1 + 1*r^2 + O(r^3)"]
    lines = F.evaluate_command("roots(x^2 - 1*r^1, 2)")
    assert [ln.split()[0] for ln in lines] == ["1*r^{1/2}", "-1*r^{1/2}"]
    assert all("O(r^2)" in ln for ln in lines)
    assert F.evaluate_command("1*r^1 * 1*r^1") == ["1*r^2"]
