import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import (check_flow_and_power_identities, element_matrices_by_quadrature,
                     expansions, quad, shapes)
from phnet1d.element_matrices import (SingularDiracPairError, build_dirac_pair,
                                      compute_matrices, element_model,
                                      element_state_space, passivity_matrix)
from phnet1d.mesh import Element

M2 = np.array([[-0.5, 1, 0.5], [-0.5, -1, 0.5]])
M3 = np.array([[-0.75, 1, 0.25], [-0.25, -1, 0.75]])
M4 = np.array([[7 / 12, 2 / 3, 1 / 12], [1 / 12, 2 / 3, 7 / 12]])
M5 = np.array([[5 / 6, 0.5, 1 / 6], [1 / 6, 0.5, 5 / 6]])
M6 = np.array([[-1.0, 0, 0], [0, 0, 0], [0, 0, 1]])


def random_elements(n, seed=0):
    # moderate offsets: the z-based oracle itself loses ~|a|/h digits
    rng = np.random.default_rng(seed)
    a = rng.uniform(-5, 5, n)
    return [Element(x, x + h) for x, h in zip(a, rng.uniform(0.1, 10, n))]


@pytest.mark.parametrize("el", [Element(0, 1), Element(-5, 7), Element(3, 3.001), Element(1e4, 1e4 + 1e-3)])
def test_rational_tables(el):
    mx = compute_matrices(el)
    assert np.all(mx.M1 == 0)
    for got, want in zip((mx.M2, mx.M3, mx.M4, mx.M5, mx.M6), (M2, M3, M4, M5, M6)):
        np.testing.assert_allclose(got, want, rtol=0, atol=1e-12)


@pytest.mark.parametrize("el", random_elements(10) + [Element(0, 1)])
@pytest.mark.parametrize("sigma", [0.0, 0.3, 2.0])
def test_against_quadrature_oracle(el, sigma):
    mx = compute_matrices(el, sigma)
    oracle = element_matrices_by_quadrature(el.a, el.b, sigma)
    for got, want in zip((mx.M1, mx.M2, mx.M3, mx.M4, mx.M5, mx.M6), oracle):
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12 * max(1, el.h))


def test_dissipation_block_unit_element():
    np.testing.assert_allclose(compute_matrices(Element(0, 1), 2.0).M1, M4, atol=1e-14)
    h = 0.25
    np.testing.assert_allclose(compute_matrices(Element(1, 1 + h), 3.0).M1,
                               3.0 * h * M4 / 2, atol=1e-14)


@pytest.mark.parametrize("sigma", [-1.0, np.nan, [0.1, 0.2]])
def test_bad_sigma(sigma):
    with pytest.raises(ValueError):
        compute_matrices(Element(0, 1), sigma)


def test_dirac_pair_examples():
    pair = build_dirac_pair(compute_matrices(Element(0, 1)))
    assert pair.dirac_defect <= 1e-12
    assert pair.kernel_rank == 6
    np.testing.assert_array_equal(pair.M_u @ [0, 0, 0, 1, 0, 0], [-1, 0])
    np.testing.assert_array_equal(pair.M_u @ [0, 0, 1, 0, 0, 0], [0, 1])
    np.testing.assert_array_equal(pair.M_y @ [1, 0, 0, 0, 0, 0], [-1, 0])
    np.testing.assert_array_equal(pair.M_y @ [0, 0, 0, 0, 0, 1], [0, -1])


def test_singular_pair_rejected():
    mx = compute_matrices(Element(0, 1))
    broken = type(mx)(mx.M1, mx.M2, mx.M3, 0 * mx.M4, mx.M5, mx.M6, 0.0, 1.0)
    with pytest.raises(SingularDiracPairError):
        build_dirac_pair(broken)


def test_conservative_state_space():
    model = element_model(Element(0, 1))
    assert np.abs(model.A + model.A.T).max() <= 1e-12
    assert np.abs(model.C - model.B.T).max() <= 1e-12
    assert np.abs(model.D + model.D.T).max() <= 1e-12
    assert np.abs(model.R).max() <= 1e-12
    rng = np.random.default_rng(1)
    for _ in range(20):
        es, fe = rng.normal(size=4), rng.normal(size=2)
        fs = -model.A @ es - model.B @ fe
        ee = model.C @ es + model.D @ fe
        assert abs(es @ fs + ee @ fe) <= 1e-12 * max(1, np.abs(es).max() ** 2)


@pytest.mark.parametrize("sigma, h", [(0.5, 0.5), (0.1, 1.0), (1.0, 0.01), (10.0, 3.0)])
def test_dissipative_state_space(sigma, h):
    model = element_model(Element(0, h), sigma)
    assert model.min_dissipation_eig >= -1e-10
    assert np.abs(model.R).max() > 0
    np.testing.assert_allclose(model.R, passivity_matrix(model.A, model.B, model.C, model.D))


def test_state_space_reproduces_pair():
    # [-A -B; C D] maps (e^s, f^e) to (f^s, e^e) along the Dirac pair
    pair = build_dirac_pair(compute_matrices(Element(-1, 2), 0.7))
    model = element_state_space(pair)
    v = np.random.default_rng(3).normal(size=6)
    fs, es, fe, ee = pair.flows_efforts(v)
    np.testing.assert_allclose(-model.A @ es - model.B @ fe, fs, atol=1e-12)
    np.testing.assert_allclose(model.C @ es + model.D @ fe, ee, atol=1e-12)


def test_residual_and_power_integrals():
    rng = np.random.default_rng(7)
    for el in random_elements(100, seed=11):
        v = rng.normal(size=6)
        sigma = rng.choice([0.0, rng.uniform(0, 5)])
        assert check_flow_and_power_identities(el, sigma, v, rng.normal(size=4)) <= 1e-10


def test_residual_detects_wrong_flows():
    # the oracle is not vacuous: perturbing a flow breaks the residual integral
    el, v = Element(0, 1), np.ones(6)
    pair = build_dirac_pair(compute_matrices(el))
    fs = pair.M_f @ v + np.array([1e-3, 0, 0, 0])
    _, ep, eq, dep, deq = expansions(el, v)
    fn, _ = shapes(0, 1)
    r = quad(lambda z: fs[0] * fn["p_am"](z) + fs[1] * fn["p_mb"](z) - deq(z), 0, 0.5)
    assert abs(r) > 1e-4


@settings(max_examples=100, deadline=None)
@given(st.floats(-100, 100), st.floats(1e-4, 100))
def test_dirac_identity_random_elements(a, h):
    mx = compute_matrices(Element(a, a + h))
    pair = build_dirac_pair(mx)
    assert pair.dirac_defect <= 1e-12
    assert pair.kernel_rank == 6
    assert np.abs(mx.pairing_identity).max() <= 1e-12
