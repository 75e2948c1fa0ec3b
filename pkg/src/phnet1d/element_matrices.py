"""Element matrices, the element Dirac structure and its state-space form.

Coefficient vectors are ordered as follows::

    v   = (e_a^p, e_m^p, e_b^p, e_a^q, e_m^q, e_b^q)   effort nodal values
    f^s = (f_am^p, f_mb^p, f_am^q, f_mb^q)              storage flows
    e^s = (e_am^p, e_mb^p, e_am^q, e_mb^q)              storage efforts
    f^e = (-e^q(a), e^p(b))                             port inputs
    e^e = (-e^p(a), -e^q(b))                            port outputs
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .mesh import Element
from .shape_functions import (P_ONEFORMS, P_ZEROFORMS, Q_ONEFORMS, Q_ZEROFORMS,
                              ShapeSet, build_shape_set, half_bounds, integrate)

__all__ = ["ElementMatrices", "DiracPair", "ElementModel", "compute_matrices",
           "build_dirac_pair", "element_state_space", "passivity_matrix",
           "element_model", "SingularDiracPairError", "U_SELECT", "Y_SELECT",
           "MAX_CONDITION"]

MAX_CONDITION = 1e12

# row selectors applied to blockdiag(M6, I3) v
U_SELECT = np.array([[0, 0, 0, -1, 0, 0],
                     [0, 0, 1, 0, 0, 0]], dtype=float)
Y_SELECT = np.array([[1, 0, 0, 0, 0, 0],
                     [0, 0, 0, 0, 0, -1]], dtype=float)

_HALVES = ("am", "mb")
_REFERENCE = build_shape_set(Element(0.0, 1.0))


class SingularDiracPairError(np.linalg.LinAlgError):
    """F is singular or too badly conditioned to invert."""


@dataclass(frozen=True)
class ElementMatrices:
    M1: np.ndarray
    M2: np.ndarray
    M3: np.ndarray
    M4: np.ndarray
    M5: np.ndarray
    M6: np.ndarray
    sigma: float
    h: float

    @property
    def pairing_identity(self) -> np.ndarray:
        """``M4^T M2 + M3^T M5 + M6^T diag(-1, 0, -1)``; zero for valid shapes."""
        return (self.M4.T @ self.M2 + self.M3.T @ self.M5
                + self.M6.T @ np.diag([-1.0, 0.0, -1.0]))


@dataclass(frozen=True)
class DiracPair:
    """Image representation ``[f^s; e^e] = E^T v``, ``[e^s; f^e] = F^T v``."""

    E: np.ndarray
    F: np.ndarray
    M_f: np.ndarray
    M_e: np.ndarray
    M_u: np.ndarray
    M_y: np.ndarray
    sigma: float
    h: float
    condition: float

    def flows_efforts(self, v):
        """Map nodal coefficients `v` to ``(f^s, e^s, f^e, e^e)``."""
        v = np.asarray(v, dtype=float)
        return self.M_f @ v, self.M_e @ v, self.M_u @ v, self.M_y @ v

    @property
    def dirac_defect(self) -> float:
        """``max |F E^T + E F^T|``."""
        return float(np.abs(self.F @ self.E.T + self.E @ self.F.T).max())

    @property
    def kernel_rank(self) -> int:
        return int(np.linalg.matrix_rank(np.hstack([self.F, self.E])))


@dataclass(frozen=True)
class ElementModel:
    """Input-state-output form ``xdot = A g + B u``, ``y = C g + D u``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    R: np.ndarray
    sigma: float
    h: float

    @property
    def min_dissipation_eig(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.R + self.R.T)).min())


def _check_sigma(sigma) -> float:
    if np.ndim(sigma) != 0:
        raise ValueError("only a scalar (homogeneous) dissipation coefficient "
                         "is supported per element")
    sigma = float(sigma)
    if not np.isfinite(sigma) or sigma < 0:
        raise ValueError(f"sigma must be finite and nonnegative, got {sigma}")
    return sigma


def _boundary_jump(shapes: ShapeSet, kind, half: str) -> float:
    """Value at the right end of a half-interval minus value at its left end."""
    lo, hi = half_bounds(shapes.element, half)
    piece = shapes.piece(kind, half)
    return float(piece(hi) - piece(lo))


def _endpoint_value(shapes: ShapeSet, kind, node: str) -> float:
    el = shapes.element
    if node == "a":
        return float(shapes.piece(kind, "am")(el.a))
    return float(shapes.piece(kind, "mb")(el.b))


def _wedge_integral(shapes: ShapeSet, zero_form, one_form) -> float:
    total = 0.0
    for half in _HALVES:
        lo, hi = half_bounds(shapes.element, half)
        total += integrate(shapes.piece(zero_form, half)
                           * shapes.piece(one_form, half), lo, hi)
    return total


def compute_matrices(element: Element, sigma: float = 0.0) -> ElementMatrices:
    """Integrate the shape-function products on `element` exactly.

    Parameters
    ----------
    element : Element
    sigma : float
        Homogeneous dissipation coefficient, ``>= 0``.
    """
    sigma = _check_sigma(sigma)
    # M2..M6 do not depend on the element and M1 scales with h, so everything
    # is integrated on [0, 1] where the midpoint is exact; working with
    # z directly loses about |a|/h digits to cancellation.
    shapes = _REFERENCE
    el = _REFERENCE.element

    M1 = np.zeros((2, 3))
    M2 = np.zeros((2, 3))
    M3 = np.zeros((2, 3))
    M4 = np.zeros((2, 3))
    M5 = np.zeros((2, 3))
    for s, half in enumerate(_HALVES):
        lo, hi = half_bounds(el, half)
        for l in range(3):
            pz, qz = P_ZEROFORMS[l], Q_ZEROFORMS[l]
            if sigma:
                M1[s, l] = sigma * element.h * integrate(shapes.piece(pz, half), lo, hi)
            M2[s, l] = _boundary_jump(shapes, qz, half)
            M3[s, l] = _boundary_jump(shapes, pz, half)
            M4[s, l] = _wedge_integral(shapes, pz, P_ONEFORMS[s])
            M5[s, l] = _wedge_integral(shapes, qz, Q_ONEFORMS[s])

    M6 = np.zeros((3, 3))
    for k, qz in enumerate(Q_ZEROFORMS):
        for l, pz in enumerate(P_ZEROFORMS):
            M6[k, l] = (_endpoint_value(shapes, qz, "b") * _endpoint_value(shapes, pz, "b")
                        - _endpoint_value(shapes, qz, "a") * _endpoint_value(shapes, pz, "a"))

    return ElementMatrices(M1, M2, M3, M4, M5, M6, sigma, element.h)


def build_dirac_pair(matrices: ElementMatrices) -> DiracPair:
    """Assemble ``E`` and ``F`` from the element matrices.

    Raises
    ------
    SingularDiracPairError
        If ``F`` is singular or its condition number exceeds 1e12.
    """
    mx = matrices
    zero = np.zeros((2, 3))
    M_f = np.block([[mx.M1, mx.M2], [mx.M3, zero]])
    M_e = np.block([[mx.M4, zero], [zero, mx.M5]])
    lift = sla.block_diag(mx.M6, np.eye(3))
    M_u = U_SELECT @ lift
    M_y = Y_SELECT @ lift

    E = np.vstack([M_f, M_y]).T
    F = np.vstack([M_e, M_u]).T
    cond = float(np.linalg.cond(F, 1))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularDiracPairError(
            f"F is singular or ill-conditioned (cond_1 = {cond:.3g})")
    return DiracPair(E, F, M_f, M_e, M_u, M_y, mx.sigma, mx.h, cond)


def passivity_matrix(A, B, C, D) -> np.ndarray:
    """``R = [[-A - A^T, C^T - B], [C - B^T, D + D^T]]``."""
    return np.block([[-A - A.T, C.T - B], [C - B.T, D + D.T]])


def element_state_space(pair: DiracPair) -> ElementModel:
    """Eliminate ``v`` to get ``[-A -B; C D] = E^T F^{-T}``."""
    lu = sla.lu_factor(pair.F)
    # S = E^T F^{-T}  <=>  S^T = F^{-1} E
    S = sla.lu_solve(lu, pair.E).T
    A = -S[:4, :4]
    B = -S[:4, 4:]
    C = S[4:, :4]
    D = S[4:, 4:]
    return ElementModel(A, B, C, D, passivity_matrix(A, B, C, D),
                        pair.sigma, pair.h)


def element_model(element: Element, sigma: float = 0.0) -> ElementModel:
    """Shortcut for matrices -> Dirac pair -> state space."""
    return element_state_space(build_dirac_pair(compute_matrices(element, sigma)))
