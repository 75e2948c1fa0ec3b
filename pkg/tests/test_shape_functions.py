import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import quad, shapes
from phnet1d.mesh import Element
from phnet1d.shape_functions import (ShapeKind as K, build_shape_set, evaluate,
                                     integrate, normalization_report)

ORACLE_NAME = {K.P_AM: "p_am", K.P_MB: "p_mb", K.QZ_A: "qz_a", K.QZ_M: "qz_m",
               K.QZ_B: "qz_b", K.Q_AM: "q_am", K.Q_MB: "q_mb", K.PZ_A: "pz_a",
               K.PZ_M: "pz_m", K.PZ_B: "pz_b"}

UNIT = build_shape_set(Element(0, 1))


def test_reference_values():
    ss = build_shape_set(Element(0, 1))
    assert evaluate(ss, K.PZ_A, 0.5) == pytest.approx(0.25, abs=1e-15)
    assert integrate(ss.piece(K.P_AM, "am"), 0, 0.5) == pytest.approx(1.0, abs=1e-15)
    assert integrate(ss.piece(K.P_AM, "mb"), 0.5, 1) == 0.0
    ss = build_shape_set(Element(2, 4))
    assert [evaluate(ss, K.QZ_M, z) for z in (3, 2, 4)] == pytest.approx([1, 0, 0], abs=1e-15)


@pytest.mark.parametrize("kind, z, expected", [
    (K.P_AM, 0.2, 2.0), (K.QZ_A, 0.25, 0.75), (K.Q_MB, 1.0, 3.0)])
def test_eval_examples(kind, z, expected):
    assert UNIT(kind, z) == pytest.approx(expected, abs=1e-14)


def test_eval_outside_element():
    with pytest.raises(ValueError):
        evaluate(UNIT, K.P_AM, 1.5)


@pytest.mark.parametrize("a, b, tol", [(0, 1, 1e-13), (0, 1e-6, 1e-10), (-5, 7, 1e-12),
                                       (3.25, 3.5, 1e-13), (1e3, 1e3 + 2, 1e-12)])
def test_normalization(a, b, tol):
    assert normalization_report(build_shape_set(Element(a, b))).max_residual <= tol


@given(st.floats(-100, 100), st.floats(1e-3, 50))
def test_matches_explicit_formulas(a, h):
    b = a + h
    ss = build_shape_set(Element(a, b))
    fn, _ = shapes(a, b)
    z = np.linspace(a, b, 41)
    for kind, name in ORACLE_NAME.items():
        scale = 1.0 / h if kind.family.is_oneform else 1.0
        np.testing.assert_allclose(ss(kind, z) / scale, fn[name](z) / scale,
                                   atol=1e-9 * max(1.0, abs(a) / h) ** 2)


@given(st.floats(-10, 10), st.floats(1e-2, 10), st.floats(0, 1))
def test_affine_invariance(a, h, t):
    # zero-forms are unchanged and densities scale with 1/h under z -> a + h t
    ss = build_shape_set(Element(a, a + h))
    z = min(a + h * t, a + h)
    for kind in K:
        scale = h if kind.family.is_oneform else 1.0
        assert ss(kind, z) * scale == pytest.approx(UNIT(kind, t), abs=1e-8)


@given(st.floats(0, 1), st.floats(1e-2, 10))
def test_partition_identities(t, h):
    ss = build_shape_set(Element(1, 1 + h))
    z = min(1 + h * t, 1 + h)
    assert ss(K.QZ_A, z) + ss(K.QZ_B, z) == pytest.approx(1.0, abs=1e-12)
    assert (ss(K.Q_AM, z) + ss(K.Q_MB, z)) * h == pytest.approx(2.0, abs=1e-12)
    assert (ss(K.P_AM, z) + ss(K.P_MB, z)) * h == pytest.approx(2.0, abs=1e-12)
    # quadratic zero-forms reproduce constants only up to the midpoint bubble
    total = ss(K.PZ_A, z) + ss(K.PZ_B, z) + 0.5 * ss(K.PZ_M, z)
    assert total == pytest.approx(1.0, abs=1e-12)


def test_oneform_integrals_by_quadrature():
    a, b = -0.3, 1.9
    ss = build_shape_set(Element(a, b))
    m = 0.5 * (a + b)
    for kind in (K.P_AM, K.P_MB, K.Q_AM, K.Q_MB):
        left = quad(lambda z: ss.piece(kind, "am")(z), a, m)
        right = quad(lambda z: ss.piece(kind, "mb")(z), m, b)
        expect = (1.0, 0.0) if kind.index == "am" else (0.0, 1.0)
        assert (left, right) == pytest.approx(expect, abs=1e-13)
