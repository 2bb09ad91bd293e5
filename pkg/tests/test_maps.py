import math

import numpy as np
import pytest

from colombeau import jets as J
from colombeau.errors import DomainError, ShapeError
from colombeau.maps import (EQUIVALENT, NOT_EQUIVALENT, ProbeSet, builtin_maps,
                            builtin_product_maps, certify_composite, compose, coordinate_probe,
                            curry, curry_family, default_probes, embed_map, equivalent,
                            identity_map, is_moderate_map, map_from_function, uncurry)
from colombeau.nets import BoxDomain
from colombeau.order import MODERATE, NOT_MODERATE

LINE = BoxDomain.open((-2.0,), (2.0,))
REALS = BoxDomain.open((-math.inf,), (math.inf,))
GRID = np.linspace(-1.9, 1.9, 39)[:, None]


def test_compose_with_identity():
    for f in builtin_maps().values():
        for eps in (0.5, 0.05):
            np.testing.assert_array_equal(compose(identity_map(LINE), f).values(eps, GRID),
                                          f.values(eps, GRID))
            np.testing.assert_array_equal(compose(f, identity_map(LINE)).values(eps, GRID),
                                          f.values(eps, GRID))


def test_compose_chain_rule():
    sq = embed_map(lambda v: [v[0] * v[0]], REALS, REALS)
    shift = embed_map(lambda v: [v[0] + 1.0], REALS, REALS)
    g = compose(sq, shift)
    assert g.jets(0.5, np.array([[1.0]]), 1)[0].partial((1,))[0] == pytest.approx(4.0)


def test_compose_shape_mismatch():
    plane = embed_map(lambda v: [v[0], v[0]], LINE, BoxDomain.open((-2.0, -2.0), (2.0, 2.0)))
    with pytest.raises(ShapeError):
        compose(plane, plane)


def test_composition_associative():
    pool = builtin_maps()
    h, g, f = pool["sin"], pool["osc"], pool["softabs"]
    for eps in (0.5, 0.1, 0.02):
        left = compose(h, compose(g, f)).jets(eps, GRID, 2)[0]
        right = compose(compose(h, g), f).jets(eps, GRID, 2)[0]
        np.testing.assert_allclose(left.c, right.c, rtol=1e-10, atol=1e-10)


def test_image_outside_target():
    big = embed_map(lambda v: [3.0 * v[0]], LINE, LINE)
    with pytest.raises(DomainError):
        big.values(0.5, np.array([[1.0]]))


def test_smooth_map_is_moderate():
    f = embed_map(lambda v: [J.sin(v[0])], LINE, LINE)
    v = is_moderate_map(f)
    assert v.kind == MODERATE
    assert all(e.probe for e in v.evidence)


def test_oscillating_perturbation_is_moderate():
    unit = BoxDomain.closed((0.0,), (1.0,))
    f = map_from_function(lambda e, v: [v[0] + e * J.sin(v[0] / e)], unit, BoxDomain.open((-1.0,), (2.0,)))
    assert is_moderate_map(f).kind == MODERATE


def test_wild_map_is_not_moderate():
    wild = map_from_function(lambda e, v: [np.exp(1 / e) * v[0]], LINE, REALS, "wild")
    probes = ProbeSet([coordinate_probe(REALS, 0)], default_probes(LINE, REALS).plot_probes)
    assert is_moderate_map(wild, probes).kind == NOT_MODERATE


def test_composites_recertify():
    pool = builtin_maps()
    for gn, fn in (("sin", "osc"), ("softabs", "cube"), ("osc", "softabs")):
        rep = certify_composite(pool[gn], pool[fn])
        assert rep.composite.kind != NOT_MODERATE
        assert rep.within_bound
        assert rep.to_json()["bound"] == rep.bound


def test_equivalence_examples():
    wide = BoxDomain.open((-3.0,), (3.0,))
    ident = embed_map(lambda v: [v[0]], LINE, wide)
    assert math.isinf(equivalent(ident, ident).order)
    for p in (1, 2, 3):
        near = map_from_function(lambda e, v, p=p: [v[0] + e ** p * 0.1 * J.exp(-v[0] * v[0])], LINE, wide)
        v = equivalent(ident, near, p_max=p)
        assert v.kind == EQUIVALENT and v.order == p
    shifted = embed_map(lambda v: [v[0] + 0.1], LINE, wide)
    v = equivalent(ident, shifted)
    assert v.kind == NOT_EQUIVALENT and v.order == 0


def test_equivalence_symmetric_and_transitive():
    wide = BoxDomain.open((-3.0,), (3.0,))
    maps = [map_from_function(lambda e, v, k=k: [v[0] + k * e * e * J.cos(v[0])], LINE, wide)
            for k in (0.0, 0.1, -0.1)]
    a, b, c = maps
    ab, ba = equivalent(a, b), equivalent(b, a)
    assert ab.order == ba.order
    bc, ac = equivalent(b, c), equivalent(a, c)
    assert ac.order >= min(ab.order, bc.order) - 1


def test_curry_product_at_two():
    xy = builtin_product_maps()["xy"]
    s = curry(xy, [1.5])
    Y = np.linspace(-1.9, 1.9, 21)[:, None]
    np.testing.assert_allclose(s.values(0.3, Y)[:, 0], 1.5 * Y[:, 0])
    wide = BoxDomain.open((-3.0, -2.0), (3.0, 2.0))
    xy_wide = embed_map(lambda v: [v[0] * v[1]], wide, BoxDomain.open((-10.0,), (10.0,)), split=1)
    np.testing.assert_allclose(curry(xy_wide, [2.0]).values(0.3, Y)[:, 0], 2.0 * Y[:, 0])
    jet = curry(xy_wide, [2.0]).jets(0.3, Y, 1)[0]
    np.testing.assert_allclose(jet.partial((1,)), 2.0)


def test_round_trip_and_slices():
    P = np.stack(np.meshgrid(np.linspace(-1.8, 1.8, 9), np.linspace(-1.8, 1.8, 9)), -1).reshape(-1, 2)
    for f in builtin_product_maps().values():
        g = uncurry(curry_family(f))
        for eps in (0.5, 0.05):
            np.testing.assert_allclose(g.values(eps, P), f.values(eps, P), rtol=1e-12)
        fam = curry_family(uncurry(curry_family(f)))
        Y = P[:9, 1:]
        np.testing.assert_allclose(fam.at([0.4]).values(0.1, Y), curry(f, [0.4]).values(0.1, Y))


def test_slices_of_moderate_map_are_moderate():
    f = builtin_product_maps()["osc"]
    for x in (-0.9, 0.0, 0.9):
        assert is_moderate_map(curry(f, [x])).is_moderate


def test_curry_requires_split():
    plain = embed_map(lambda v: [v[0] + v[1]], BoxDomain.open((-2.0, -2.0), (2.0, 2.0)), LINE)
    with pytest.raises(ShapeError):
        curry(plain, [0.0])
    with pytest.raises(DomainError):
        curry(builtin_product_maps()["xy"], [5.0])
