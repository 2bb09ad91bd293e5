import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from colombeau import jets as J
from colombeau.errors import ConsistencyError, DomainError, PreconditionError, ShapeError
from colombeau.homotopy import (Cell, CellComplex, LData, L_grid, PieceMap, extend_from_L,
                                extend_homotopy, face_names, hep_report, load_problem,
                                mollified_retraction, on_L, retracting_homotopy, retraction,
                                problem_from_json)
from colombeau.homotopy import demo_path
from colombeau.nets import BoxDomain
from colombeau.order import EpsilonScale, estimate_from_samples

PLANE = BoxDomain.open((-3.0, -3.0), (3.0, 3.0))
SCALE = EpsilonScale(0.25, 0.5, 6)


def test_retraction_examples():
    np.testing.assert_array_equal(retraction(0, [0.5, 1.0]), [0.5, 0.0])
    np.testing.assert_array_equal(retraction(0, [0.75, 1.0]), [1.0, 0.0])
    for p in ([0.0, 0.3], [1.0, 0.9], [0.4, 0.0]):
        np.testing.assert_array_equal(retraction(0, p), p)


def test_retraction_errors():
    with pytest.raises(ShapeError):
        retraction(0, [0.5, 0.5, 0.5])
    with pytest.raises(DomainError):
        retraction(0, [1.5, 0.5])
    with pytest.raises(ValueError):
        retraction(-1, [0.5])


@settings(max_examples=200)
@given(st.integers(0, 2).flatmap(lambda n: st.tuples(
    st.just(n), arrays(float, (16, n + 2), elements=st.floats(0.0, 1.0)))))
def test_retraction_lands_on_L_and_is_idempotent(case):
    n, U = case
    r = retraction(n, U)
    assert on_L(n + 1, r).all()
    np.testing.assert_array_equal(retraction(n, r), r)


def test_L_grid_is_fixed():
    for n in (0, 1):
        P = L_grid(n + 1, 12)
        assert np.max(np.abs(retraction(n, P) - P)) < 1e-12


def test_mollified_retraction_approaches_identity_on_L():
    R = mollified_retraction(0)
    P = L_grid(1, 32)
    samples = [(eps, float(np.max(np.abs(R.values(eps, P) - P)))) for eps in SCALE.values]
    assert estimate_from_samples(samples).exponent <= -0.8


def test_mollified_retraction_derivative_growth():
    R = mollified_retraction(0)
    X = np.array([[0.5, 0.6], [0.3, 0.8], [0.9, 0.5]])
    for alpha in ((1, 0), (0, 1), (1, 1), (2, 0)):
        samples = [(eps, float(np.max(np.abs(R.component(0).values(eps, X, alpha)))))
                   for eps in SCALE.values]
        assert estimate_from_samples(samples).exponent <= sum(alpha) + 0.2


def test_retracting_homotopy_endpoints():
    R = mollified_retraction(0)
    h = retracting_homotopy(R)
    X = np.array([[0.2, 0.3], [0.5, 0.9], [0.8, 0.1]])
    for eps in (0.3, 0.1):
        np.testing.assert_allclose(h.values(eps, X, 1.0), X, atol=1e-14)
        np.testing.assert_allclose(h.values(eps, X, 0.0), R.values(eps, X), atol=1e-14)
        np.testing.assert_allclose(h.at(0.0).values(eps, X), R.values(eps, X), atol=1e-14)


def test_constant_extension_is_exact():
    g = LData.from_function(1, lambda eps, P: np.full((len(P), 2), [0.5, -1.0]), PLANE)
    ext = extend_from_L(g)
    X = np.random.default_rng(0).random((20, 2))
    for eps in (0.5, 0.05):
        np.testing.assert_allclose(ext.values(eps, X), np.tile([0.5, -1.0], (20, 1)), atol=1e-12)


def test_smooth_extension_deviates_at_order_one():
    fn = lambda eps, P: np.stack([np.sin(P[:, 0] + P[:, 1]), P[:, 0] * P[:, 1]], axis=1)
    ext = extend_from_L(LData.from_function(1, fn, PLANE))
    P = L_grid(1, 16)
    samples = [(eps, float(np.max(np.abs(ext.values(eps, P) - fn(eps, P))))) for eps in SCALE.values]
    assert estimate_from_samples(samples).exponent <= -0.8


def test_seams_must_agree():
    faces = {name: (lambda eps, P: np.zeros((len(P), 2))) for name in face_names(1)}
    faces["s0=1"] = lambda eps, P: np.ones((len(P), 2))
    with pytest.raises(ConsistencyError):
        LData(1, faces, PLANE).check_seams()
    with pytest.raises(ConsistencyError):
        LData(1, {"bottom": faces["bottom"]}, PLANE)


def const_piece(*v):
    return lambda eps, x: list(v)


def test_trivial_complex_keeps_h():
    X = CellComplex(1, [])
    f = PieceMap([const_piece(1.0, 0.0)], 2)
    h = PieceMap([lambda eps, x: [J.cos(x[0]), J.sin(x[0])]], 2)
    H = extend_homotopy(X, f, h, PLANE)
    assert hep_report(H).to_json()["result"] == "H = h"
    t = np.linspace(0, 1, 5)
    np.testing.assert_allclose(H.values(0.1, np.zeros(5), np.zeros((5, 1)), t),
                               np.stack([np.cos(t), np.sin(t)], 1))


def test_constant_data_give_constant_H():
    X = CellComplex(1, [Cell(1, {"kind": "endpoints", "to": [["base", 0], ["base", 0]]})])
    f = PieceMap([const_piece(0.5, 0.5)] * 2, 2)
    h = PieceMap([const_piece(0.5, 0.5)], 2)
    H = extend_homotopy(X, f, h, PLANE)
    S = np.random.default_rng(1).random((10, 1))
    for t in (0.0, 0.5, 1.0):
        np.testing.assert_allclose(H.values(0.1, np.ones(10), S, t), 0.5, atol=1e-12)


def test_circle_demo():
    X, f, h, target = load_problem(demo_path())
    rep = hep_report(extend_homotopy(X, f, h, target))
    assert rep.order >= 1
    assert rep.to_json()["result"] == "extended"


def test_h_must_start_at_f():
    X = CellComplex(1, [])
    f = PieceMap([const_piece(1.0, 0.0)], 2)
    h = PieceMap([lambda eps, x: [J.cos(x[0] + 0.3), J.sin(x[0])]], 2)
    with pytest.raises(PreconditionError, match="t=0"):
        extend_homotopy(X, f, h, PLANE)


def test_inconsistent_f_names_the_cell():
    X = CellComplex(1, [Cell(1, {"kind": "endpoints", "to": [["base", 0], ["base", 0]]})])
    f = PieceMap([const_piece(0.0, 0.0), lambda eps, x: [x[0], 0.0 * x[0]]], 2)
    h = PieceMap([const_piece(0.0, 0.0)], 2)
    with pytest.raises(ConsistencyError) as info:
        extend_homotopy(X, f, h, PLANE)
    assert info.value.cell == 0


def test_bad_attaching_data():
    with pytest.raises(ConsistencyError) as info:
        CellComplex(1, [Cell(1, {"kind": "endpoints", "to": [["base", 0], ["base", 3]]})])
    assert info.value.cell == 0
    with pytest.raises(ConsistencyError):
        CellComplex(0, [Cell(2, {"kind": "perimeter", "cell": 0})])


def two_arcs(order):
    """Two 1-cells on disjoint pairs of base points, listed in the given order."""
    ends = {"a": [["base", 0], ["base", 1]], "b": [["base", 2], ["base", 3]]}
    X = CellComplex(4, [Cell(1, {"kind": "endpoints", "to": ends[k]}) for k in order])
    base = [const_piece(0.0, 0.0), const_piece(1.0, 0.0), const_piece(0.0, 1.0), const_piece(1.0, 1.0)]
    arcs = {"a": lambda eps, x: [x[0], 0.0 * x[0]], "b": lambda eps, x: [x[0], 1.0 + 0.0 * x[0]]}
    f = PieceMap(base + [arcs[k] for k in order], 2)
    h = PieceMap([lambda eps, t, p=p: [p[0] + 0.2 * t[0], p[1] - 0.1 * t[0] * t[0]]
                  for p in ((0, 0), (1, 0), (0, 1), (1, 1))], 2)
    return extend_homotopy(X, f, h, PLANE)


def test_cell_order_does_not_matter():
    H1, H2 = two_arcs("ab"), two_arcs("ba")
    S = np.linspace(0, 1, 9)[:, None]
    for t in (0.0, 0.4, 1.0):
        a1 = H1.values(0.1, np.full(9, 4), S, t)
        a2 = H2.values(0.1, np.full(9, 5), S, t)
        assert np.max(np.abs(a1 - a2)) < 1e-9


def test_to_csv_header_and_rows():
    X, f, h, target = load_problem(demo_path())
    text = extend_homotopy(X, f, h, target).to_csv(0.1, per_axis=4, times=3)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["piece", "s0", "t", "H0", "H1"]
    assert len(rows) == 1 + 3 + 5 * 3
    assert rows[1][0] == "base0" and rows[-1][0] == "cell0"


def test_problem_file_validation():
    from colombeau.errors import ParseError
    with pytest.raises(ParseError):
        problem_from_json({"base": 1, "cells": [], "target_dim": 2, "f": {"base": [], "cells": []},
                           "h": {"base": []}})
