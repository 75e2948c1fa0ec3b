import warnings

import numpy as np
import pytest

from oracles import quad_halves, shapes
from phnet1d.hamiltonian import (DensityError, ElementState, EnergyDensity,
                                 element_gradient, element_hamiltonian,
                                 element_hessian, mesh_hamiltonian,
                                 quadratic_density, quartic_density,
                                 stacked_gradient)
from phnet1d.mesh import Domain, Element, build_mesh

UNIT = Element(0, 1)
ONE = quadratic_density(1.0)


def oracle_energy(el, dens_p, dens_q, x):
    fn, _ = shapes(el.a, el.b)
    rho_p = lambda z: x[0] * fn["p_am"](z) + x[1] * fn["p_mb"](z)
    rho_q = lambda z: x[2] * fn["q_am"](z) + x[3] * fn["q_mb"](z)
    return sum(quad_halves(lambda z: dens_p(rho_p(z)) + dens_q(rho_q(z)), el.a, el.b))


def fd_gradient(f, x, rel=1e-6):
    g = np.zeros_like(x)
    for i in range(x.size):
        step = rel * max(1.0, abs(x[i]))
        e = np.zeros_like(x)
        e[i] = step
        g[i] = (f(x + e) - f(x - e)) / (2 * step)
    return g


def test_closed_form_examples():
    assert element_hamiltonian(UNIT, ONE, ONE, ElementState(1, 0, 0, 0)) == pytest.approx(1.0)
    assert element_hamiltonian(UNIT, ONE, ONE, ElementState(0, 0, 1, 1)) == pytest.approx(2.0)
    assert element_hamiltonian(UNIT, quartic_density(3), ONE, np.zeros(4)) == 0.0


def test_charge_energy_closed_form():
    rng = np.random.default_rng(0)
    for _ in range(10):
        h, C = rng.uniform(0.1, 5), rng.uniform(0.01, 3)
        qa, qb = rng.normal(size=2)
        want = (7 * qa**2 - 2 * qa * qb + 7 * qb**2) / (6 * C * h)
        got = element_hamiltonian(Element(1, 1 + h), ONE, quadratic_density(C), [0, 0, qa, qb])
        assert got == pytest.approx(want, rel=1e-13)


def test_gradient_examples():
    np.testing.assert_allclose(element_gradient(UNIT, ONE, ONE, [1, 0, 0, 0]), [2, 0, 0, 0])
    assert element_gradient(UNIT, ONE, ONE, [0, 0, 1, 1])[2] == pytest.approx(2.0)
    assert np.all(element_gradient(Element(-2, 5), quartic_density(), ONE, np.zeros(4)) == 0)


@pytest.mark.parametrize("seed", range(5))
def test_matches_quadrature_oracle(seed):
    rng = np.random.default_rng(seed)
    a, h = rng.uniform(-5, 5), rng.uniform(0.05, 5)
    el = Element(a, a + h)
    x = rng.normal(size=4)
    L, C = rng.uniform(0.1, 3, 2)
    quadratic = (quadratic_density(L), quadratic_density(C))
    assert element_hamiltonian(el, *quadratic, x) == pytest.approx(
        oracle_energy(el, *quadratic, x), rel=1e-10)
    quartic = (quartic_density(L), quartic_density(C))
    assert element_hamiltonian(el, *quartic, x, quad_order=5) == pytest.approx(
        oracle_energy(el, *quartic, x), rel=1e-8)


@pytest.mark.parametrize("dens", [quadratic_density(0.3), quartic_density(2.0)])
def test_gradient_and_hessian_match_differences(dens):
    rng = np.random.default_rng(4)
    el = Element(0.5, 1.7)
    for _ in range(5):
        x = rng.normal(size=4)
        H = lambda y: element_hamiltonian(el, dens, dens, y)
        g = element_gradient(el, dens, dens, x)
        np.testing.assert_allclose(g, fd_gradient(H, x), rtol=1e-6, atol=1e-8)
        G = lambda y: element_gradient(el, dens, dens, y)
        hess = np.array([fd_gradient(lambda y: G(y)[i], x) for i in range(4)])
        np.testing.assert_allclose(element_hessian(el, dens, dens, x), hess,
                                   rtol=1e-5, atol=1e-7)


def test_additivity_over_mesh():
    mesh = build_mesh(Domain(0, 2), [0, 0.3, 1.1, 2])
    rng = np.random.default_rng(5)
    x = rng.normal(size=12)
    dp, dq = [quadratic_density(1), quartic_density(2), quadratic_density(3)], quartic_density(1)
    total = mesh_hamiltonian(mesh, dp, dq, x)
    parts = [element_hamiltonian(el, d, dq, x[4 * i:4 * i + 4])
             for i, (el, d) in enumerate(zip(mesh, dp))]
    assert total == pytest.approx(sum(parts), rel=1e-14)
    g = stacked_gradient(mesh.widths, dp, dq, x)
    want = np.concatenate([element_gradient(el, d, dq, x[4 * i:4 * i + 4])
                           for i, (el, d) in enumerate(zip(mesh, dp))])
    np.testing.assert_allclose(g, want, rtol=1e-14)


def test_quadratic_density():
    d = quadratic_density(1.0)
    assert float(d(3.0)) == 4.5
    assert float(d.d(3.0)) == 3.0
    assert float(quadratic_density(0.01)(1.0)) == pytest.approx(50.0)
    for bad in (-1.0, 0.0, np.inf):
        with pytest.raises(ValueError):
            quadratic_density(bad)


def test_finite_difference_fallback_is_flagged():
    with pytest.warns(RuntimeWarning):
        d = EnergyDensity(lambda r: np.cosh(r), name="cosh")
    assert d.uses_finite_differences
    assert float(d.d(0.7)) == pytest.approx(np.sinh(0.7), rel=1e-8)
    assert float(d.d2(0.7)) == pytest.approx(np.cosh(0.7), rel=1e-6)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert not quartic_density().uses_finite_differences


def test_non_finite_density_rejected():
    blowup = EnergyDensity(lambda r: np.exp(r), lambda r: np.exp(r), name="exp")
    with np.errstate(over="ignore"), pytest.raises(DensityError):
        element_hamiltonian(UNIT, blowup, ONE, [1e4, 0, 0, 0])
    with pytest.raises(ValueError):
        element_hamiltonian(UNIT, ONE, ONE, [np.nan, 0, 0, 0])
    with pytest.raises(ValueError):
        element_hamiltonian(UNIT, ONE, ONE, np.zeros(4), quad_order=0)
