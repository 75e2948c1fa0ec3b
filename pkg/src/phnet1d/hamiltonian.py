"""Element Hamiltonians for decomposable energy densities.

An energy density is a scalar function of the density ``rho`` of an energy
one-form (``p = rho dz``). On an element the flux variable ``p`` is
piecewise constant with density ``2 p_s / h`` on each half, while the charge
variable ``q`` is affine with density
``(q_am (3 - 4t) + q_mb (4t - 1)) / h`` in the local coordinate
``t = (z - a) / h``.

The state of one element is ``x = (p_am, p_mb, q_am, q_mb)``. Functions
named ``stacked_*`` work on all elements of a mesh at once, with states
stacked element by element.
"""

from __future__ import annotations

import functools
import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .mesh import Element, Mesh

__all__ = ["EnergyDensity", "DensityError", "ElementState", "quadratic_density",
           "quartic_density", "element_hamiltonian", "element_gradient",
           "element_hessian", "stacked_hamiltonian", "stacked_gradient",
           "stacked_hessian_blocks", "mesh_hamiltonian", "DEFAULT_QUAD_ORDER"]

DEFAULT_QUAD_ORDER = 5

_FD_STEP = 1e-6


class DensityError(ValueError):
    """An energy density returned a non-finite value."""


@dataclass(frozen=True)
class EnergyDensity:
    """Energy per unit length as a function of a one-form density.

    Parameters
    ----------
    value : callable
        ``rho -> H(rho)``. Must accept numpy arrays.
    derivative : callable, optional
        ``rho -> H'(rho)``. Central differences are used if omitted, which
        is reported through `uses_finite_differences` and a warning.
    second : callable, optional
        ``rho -> H''(rho)``, used for Newton iterations. Falls back to
        differencing `derivative`.
    name : str
        Label used in reports and configuration files.
    """

    value: Callable
    derivative: Optional[Callable] = None
    second: Optional[Callable] = None
    name: str = "custom"
    uses_finite_differences: bool = field(init=False, default=False)

    def __post_init__(self):
        if self.derivative is None:
            object.__setattr__(self, "uses_finite_differences", True)
            warnings.warn(f"energy density {self.name!r} has no derivative; "
                          "falling back to central finite differences",
                          RuntimeWarning, stacklevel=2)

    def __call__(self, rho):
        return _finite(self.value(rho), self.name)

    def d(self, rho):
        if self.derivative is not None:
            return _finite(self.derivative(rho), self.name)
        rho = np.asarray(rho, dtype=float)
        eps = _FD_STEP * np.maximum(1.0, np.abs(rho))
        return _finite((self.value(rho + eps) - self.value(rho - eps)) / (2 * eps),
                       self.name)

    def d2(self, rho):
        if self.second is not None:
            return _finite(self.second(rho), self.name)
        rho = np.asarray(rho, dtype=float)
        eps = 1e-4 * np.maximum(1.0, np.abs(rho))
        return _finite((self.d(rho + eps) - self.d(rho - eps)) / (2 * eps), self.name)


def _finite(val, name):
    val = np.asarray(val, dtype=float)
    if not np.all(np.isfinite(val)):
        raise DensityError(f"energy density {name!r} returned a non-finite value")
    return val


def quadratic_density(coefficient: float) -> EnergyDensity:
    """``H(rho) = rho**2 / (2 coefficient)``, e.g. magnetic (L) or electric (C)."""
    coefficient = float(coefficient)
    if not np.isfinite(coefficient) or coefficient <= 0:
        raise ValueError(f"coefficient must be positive, got {coefficient}")
    inv = 1.0 / coefficient
    return EnergyDensity(
        value=lambda rho: 0.5 * inv * np.square(rho),
        derivative=lambda rho: inv * np.asarray(rho, dtype=float),
        second=lambda rho: np.full(np.shape(rho), inv),
        name=f"quadratic:{coefficient!r}",
    )


def quartic_density(k: float = 1.0) -> EnergyDensity:
    """``H(rho) = k rho**4 / 4``."""
    k = float(k)
    if not np.isfinite(k) or k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    return EnergyDensity(
        value=lambda rho: 0.25 * k * np.asarray(rho, dtype=float) ** 4,
        derivative=lambda rho: k * np.asarray(rho, dtype=float) ** 3,
        second=lambda rho: 3.0 * k * np.asarray(rho, dtype=float) ** 2,
        name=f"quartic:{k!r}",
    )


class ElementState(NamedTuple):
    p_am: float
    p_mb: float
    q_am: float
    q_mb: float

    @property
    def x(self) -> np.ndarray:
        return np.array(self, dtype=float)


Densities = Union[EnergyDensity, Sequence[EnergyDensity]]


def _gauss_halves(order: int):
    """Gauss-Legendre nodes/weights in ``t`` covering [0, 1/2] and [1/2, 1]."""
    if isinstance(order, bool) or int(order) != order or order < 1:
        raise ValueError(f"quad_order must be a positive integer, got {order!r}")
    return _gauss_halves_cached(int(order))


@functools.lru_cache(maxsize=None)
def _gauss_halves_cached(order: int):
    xi, w = np.polynomial.legendre.leggauss(order)
    t = np.concatenate([(xi + 1) / 4, (xi + 3) / 4])
    weights = np.concatenate([w, w]) / 4
    phi = np.stack([3 - 4 * t, 4 * t - 1])
    for arr in (t, weights, phi):
        arr.flags.writeable = False
    return t, weights, phi


def _apply(dens: Densities, method: str, rho: np.ndarray) -> np.ndarray:
    """Evaluate a density method row-wise; `rho` has one row per element."""
    if isinstance(dens, EnergyDensity):
        return getattr(dens, method)(rho)
    if len(dens) != rho.shape[0]:
        raise ValueError(f"got {len(dens)} densities for {rho.shape[0]} elements")
    return np.stack([getattr(d, method)(r) for d, r in zip(dens, rho)])


def _split(widths, x):
    h = np.atleast_1d(np.asarray(widths, dtype=float))
    X = np.asarray(x, dtype=float).reshape(h.size, 4)
    if not np.all(np.isfinite(X)):
        raise ValueError("state must be finite")
    return h, X


def _q_profile(h, X, order):
    # phi: (2, nq) shape-function densities times h
    t, w, phi = _gauss_halves(order)
    rho = (X[:, 2:] @ phi) / h[:, None]              # (N, nq)
    return rho, phi, w


def stacked_hamiltonian(widths, dens_p: Densities, dens_q: Densities, x,
                        quad_order: int = DEFAULT_QUAD_ORDER) -> np.ndarray:
    """Per-element energies for states `x` stacked element by element."""
    h, X = _split(widths, x)
    Hp = 0.5 * h * _apply(dens_p, "__call__", 2 * X[:, :2] / h[:, None]).sum(axis=1)
    rho, _, w = _q_profile(h, X, quad_order)
    Hq = h * (_apply(dens_q, "__call__", rho) @ w)
    return Hp + Hq


def stacked_gradient(widths, dens_p: Densities, dens_q: Densities, x,
                     quad_order: int = DEFAULT_QUAD_ORDER) -> np.ndarray:
    """Gradient of the total energy, flattened like `x`."""
    h, X = _split(widths, x)
    G = np.empty_like(X)
    G[:, :2] = _apply(dens_p, "d", 2 * X[:, :2] / h[:, None])
    rho, phi, w = _q_profile(h, X, quad_order)
    G[:, 2:] = (_apply(dens_q, "d", rho) * w) @ phi.T
    return G.ravel()


def stacked_hessian_blocks(widths, dens_p: Densities, dens_q: Densities, x,
                           quad_order: int = DEFAULT_QUAD_ORDER) -> np.ndarray:
    """4x4 Hessian blocks of the (block-diagonal) total energy, shape (N, 4, 4)."""
    h, X = _split(widths, x)
    out = np.zeros((h.size, 4, 4))
    curv = _apply(dens_p, "d2", 2 * X[:, :2] / h[:, None]) * (2 / h[:, None])
    out[:, 0, 0] = curv[:, 0]
    out[:, 1, 1] = curv[:, 1]
    rho, phi, w = _q_profile(h, X, quad_order)
    c = _apply(dens_q, "d2", rho) * w / h[:, None]   # (N, nq)
    out[:, 2:, 2:] = np.einsum("nk,ik,jk->nij", c, phi, phi)
    return out


def _element_args(element: Element, state):
    return np.array([element.h]), np.asarray(state, dtype=float).reshape(1, 4)


def element_hamiltonian(element: Element, dens_p: EnergyDensity,
                        dens_q: EnergyDensity, state,
                        quad_order: int = DEFAULT_QUAD_ORDER) -> float:
    """Energy stored on one element.

    The flux part is exact; the charge part uses `quad_order` Gauss-Legendre
    points on each half of the element (exact for polynomial densities of
    degree ``2 * quad_order - 1``).
    """
    h, X = _element_args(element, state)
    return float(stacked_hamiltonian(h, dens_p, dens_q, X, quad_order)[0])


def element_gradient(element: Element, dens_p: EnergyDensity,
                     dens_q: EnergyDensity, state,
                     quad_order: int = DEFAULT_QUAD_ORDER) -> np.ndarray:
    """Storage efforts ``e^s = dH/dx`` of one element."""
    h, X = _element_args(element, state)
    return stacked_gradient(h, dens_p, dens_q, X, quad_order)


def element_hessian(element: Element, dens_p: EnergyDensity,
                    dens_q: EnergyDensity, state,
                    quad_order: int = DEFAULT_QUAD_ORDER) -> np.ndarray:
    h, X = _element_args(element, state)
    return stacked_hessian_blocks(h, dens_p, dens_q, X, quad_order)[0]


def mesh_hamiltonian(mesh: Mesh, dens_p: Densities, dens_q: Densities, x,
                     quad_order: int = DEFAULT_QUAD_ORDER) -> float:
    """Total energy ``H_N`` summed over all elements of `mesh`."""
    return float(stacked_hamiltonian(mesh.widths, dens_p, dens_q, x,
                                     quad_order).sum())

