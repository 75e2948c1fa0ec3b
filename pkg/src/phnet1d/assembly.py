"""Chain composition of element Dirac structures into one sparse model.

Element ``i`` contributes its nodal coefficients ``v_i`` to the stacked
unknown ``w = (v_1, ..., v_N)``. The square system ``G w = rhs`` collects

* ``4N`` effort rows ``M_e v_i = e^s_i`` (the Hamiltonian gradient),
* 2 boundary rows that impose the external inputs,
* ``2(N - 1)`` coupling rows at the interior breakpoints, which make the
  current-type and voltage-type efforts continuous and the shared port
  power-neutral.

Since ``G`` does not depend on the state, it is eliminated once and the
result is stored as the explicit model ``xdot = A g + B u``,
``y = C g + D u`` with ``g = dH/dx``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .element_matrices import (build_dirac_pair, compute_matrices,
                               passivity_matrix, MAX_CONDITION)
from .mesh import Mesh

__all__ = ["IOMap", "InterconnectionSystem", "AggregateModel", "compose_chain",
           "SparsityReport", "sparsity_report", "io_map_description",
           "ZERO_THRESHOLD", "REFERENCE_ZERO_FRACTION_N20",
           "IllConditionedInterconnection"]

ZERO_THRESHOLD = 1e-12

# published zero fraction of A for the 20-element transmission line
REFERENCE_ZERO_FRACTION_N20 = 4720 / (80 * 80)


class IllConditionedInterconnection(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class IOMap:
    """How the aggregate inputs/outputs sit on the element boundary ports.

    ``u_signs[k]`` multiplies ``u_k`` to give the element port flow it
    drives; ``y_signs[k]`` multiplies the element port effort to give
    ``y_k``. Index 0 is the left end of the first element, index 1 the
    right end of the last element.
    """

    u_signs: tuple = (-1.0, 1.0)
    y_signs: tuple = (-1.0, 1.0)

    def describe(self) -> str:
        return "\n".join([
            "u1 = e^q(z_start) (voltage, left end):  (M_u v_1)_1 = -u1, since f^e_1 = -e^q(a)",
            "u2 = e^p(z_end) (current, right end):   (M_u v_N)_2 = u2, since f^e_2 = e^p(b)",
            "y1 = e^p(z_start) (current, left end):  y1 = -(M_y v_1)_1, since e^e_1 = -e^p(a)",
            "y2 = -e^q(z_end) (voltage, right end):  y2 = (M_y v_N)_2, since e^e_2 = -e^q(b)",
            "power balance: dH/dt = y1*u1 + y2*u2 = "
            "e^q(z_start) e^p(z_start) - e^q(z_end) e^p(z_end)",
        ])


@dataclass(frozen=True)
class InterconnectionSystem:
    """``G w = S_g g + S_u u`` with ``xdot = -M_f w`` and ``y = S_y w``.

    Attributes
    ----------
    G : scipy.sparse.csc_matrix
        ``6N x 6N`` coefficient matrix.
    S_g, S_u : scipy.sparse matrices
        Right-hand-side selectors for the gradient and the input.
    M_f : scipy.sparse matrix
        Block diagonal of the element flow maps.
    S_y : scipy.sparse matrix
        Output selector, ``2 x 6N``.
    n_effort_rows, n_boundary_rows, n_coupling_rows : int
    condition : float
        1-norm condition estimate of ``G``.
    """

    G: sp.csc_matrix
    S_g: sp.csr_matrix
    S_u: sp.csr_matrix
    M_f: sp.csr_matrix
    S_y: sp.csr_matrix
    n_effort_rows: int
    n_boundary_rows: int
    n_coupling_rows: int
    condition: float

    def solve(self, g, u) -> np.ndarray:
        """Nodal coefficients ``w`` for gradient `g` and input `u`."""
        rhs = self.S_g @ np.asarray(g, dtype=float) + self.S_u @ np.asarray(u, dtype=float)
        return spla.spsolve(self.G, rhs)


@dataclass(frozen=True)
class AggregateModel:
    """Explicit sparse port-Hamiltonian model of the element chain.

    States are ordered element by element as ``(p_am, p_mb, q_am, q_mb)``.
    """

    mesh: Mesh
    sigma: np.ndarray
    A: sp.csr_matrix
    B: sp.csr_matrix
    C: sp.csr_matrix
    D: np.ndarray
    io_map: IOMap
    interconnection: InterconnectionSystem
    pairs: tuple = field(repr=False)
    threshold: float = ZERO_THRESHOLD

    @property
    def n_elements(self) -> int:
        return self.mesh.n_elements

    @property
    def state_dim(self) -> int:
        return 4 * self.mesh.n_elements

    @property
    def is_conservative(self) -> bool:
        return bool(np.all(self.sigma == 0))

    @property
    def kernel(self) -> tuple:
        """Block-diagonal ``(E, F)`` of the uncoupled element kernels."""
        return (sp.block_diag([p.E for p in self.pairs], format="csr"),
                sp.block_diag([p.F for p in self.pairs], format="csr"))

    def state_derivative(self, g, u) -> np.ndarray:
        return self.A @ g + self.B @ u

    def output(self, g, u) -> np.ndarray:
        return self.C @ g + self.D @ u

    def passivity_matrix(self) -> np.ndarray:
        return passivity_matrix(self.A.toarray(), self.B.toarray(),
                                self.C.toarray(), self.D)

    def skewness_defects(self) -> dict:
        """Entrywise violations of ``A = -A^T``, ``C = B^T``, ``D = -D^T``."""
        return {
            "A+A^T": float(abs(self.A + self.A.T).max()),
            "C-B^T": float(abs(self.C - self.B.T).max()),
            "D+D^T": float(np.abs(self.D + self.D.T).max()),
        }


def _sigma_per_element(sigma, n):
    sig = np.broadcast_to(np.asarray(sigma, dtype=float), (n,)).copy() \
        if np.ndim(sigma) == 0 else np.asarray(sigma, dtype=float)
    if sig.shape != (n,):
        raise ValueError(f"expected a scalar sigma or {n} values, got shape {sig.shape}")
    if not np.all(np.isfinite(sig)) or np.any(sig < 0):
        raise ValueError("sigma must be finite and nonnegative")
    return sig


def _condition_estimate(G, lu) -> float:
    n = G.shape[0]
    inv = spla.LinearOperator(
        (n, n), matvec=lu.solve, rmatvec=lambda b: lu.solve(b, trans="T"),
        dtype=float)
    return float(spla.onenormest(G) * spla.onenormest(inv))


def _prune(M, threshold):
    M = np.where(np.abs(M) < threshold, 0.0, M)
    return sp.csr_matrix(M)


def compose_chain(mesh: Mesh, sigma: Union[float, Sequence[float]] = 0.0,
                  threshold: float = ZERO_THRESHOLD) -> AggregateModel:
    """Interconnect the elements of `mesh` and eliminate the coefficients.

    Parameters
    ----------
    mesh : Mesh
    sigma : float or sequence of float
        Dissipation coefficient, one per element or shared.
    threshold : float
        Entries of the eliminated matrices below this magnitude are dropped.

    Raises
    ------
    IllConditionedInterconnection
        If ``G`` is singular or its condition estimate exceeds 1e12.
    """
    n = mesh.n_elements
    sig = _sigma_per_element(sigma, n)
    pairs = tuple(build_dirac_pair(compute_matrices(el, s))
                  for el, s in zip(mesh, sig))
    io = IOMap()

    G = sp.lil_matrix((6 * n, 6 * n))
    row = 0
    for i, pair in enumerate(pairs):
        G[row:row + 4, 6 * i:6 * i + 6] = pair.M_e
        row += 4
    G[row, 0:6] = pairs[0].M_u[0]
    G[row + 1, 6 * (n - 1):6 * n] = pairs[-1].M_u[1]
    row += 2
    for i in range(n - 1):
        left, right = pairs[i], pairs[i + 1]
        cols_l = slice(6 * i, 6 * i + 6)
        cols_r = slice(6 * i + 6, 6 * i + 12)
        # (M_u v_i)_2 + (M_y v_{i+1})_1 = 0: e^p continuous
        G[row, cols_l] = left.M_u[1]
        G[row, cols_r] = right.M_y[0]
        # (M_y v_i)_2 - (M_u v_{i+1})_1 = 0: e^q continuous
        G[row + 1, cols_l] = left.M_y[1]
        G[row + 1, cols_r] = -right.M_u[0]
        row += 2
    G = G.tocsc()

    S_g = sp.eye(6 * n, 4 * n, format="csr")
    S_u = sp.csr_matrix(([io.u_signs[0], io.u_signs[1]],
                         ([4 * n, 4 * n + 1], [0, 1])), shape=(6 * n, 2))
    M_f = sp.block_diag([p.M_f for p in pairs], format="csr")
    S_y = sp.lil_matrix((2, 6 * n))
    S_y[0, 0:6] = io.y_signs[0] * pairs[0].M_y[0]
    S_y[1, 6 * (n - 1):6 * n] = io.y_signs[1] * pairs[-1].M_y[1]
    S_y = S_y.tocsr()

    try:
        lu = spla.splu(G)
    except RuntimeError as exc:
        raise IllConditionedInterconnection(f"interconnection matrix is singular: {exc}") from exc
    cond = _condition_estimate(G, lu)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise IllConditionedInterconnection(
            f"interconnection matrix is ill-conditioned (cond_1 ~ {cond:.3g})")

    rhs = sp.hstack([S_g, S_u]).toarray()
    W = lu.solve(rhs)
    AB = -(M_f @ W)
    CD = S_y @ W

    system = InterconnectionSystem(G, S_g, S_u, M_f, S_y, 4 * n, 2,
                                   2 * (n - 1), cond)
    D = np.where(np.abs(CD[:, 4 * n:]) < threshold, 0.0, CD[:, 4 * n:])
    return AggregateModel(mesh, sig, _prune(AB[:, :4 * n], threshold),
                          _prune(AB[:, 4 * n:], threshold),
                          _prune(CD[:, :4 * n], threshold), D, io, system,
                          pairs, threshold)


@dataclass(frozen=True)
class SparsityReport:
    threshold: float
    nonzeros: dict
    shapes: dict
    kernel_zero_fraction: float
    kernel_lower_bound: float
    reference: float = REFERENCE_ZERO_FRACTION_N20

    def zero_fraction(self, name: str) -> float:
        rows, cols = self.shapes[name]
        return 1.0 - self.nonzeros[name] / (rows * cols)

    def lines(self) -> list:
        out = [f"threshold: {self.threshold:g}"]
        for name in self.nonzeros:
            rows, cols = self.shapes[name]
            out.append(f"{name}: {rows}x{cols}, nonzeros {self.nonzeros[name]}, "
                       f"zeros {rows * cols - self.nonzeros[name]}, "
                       f"zero fraction {self.zero_fraction(name):.6f}")
        out.append(f"kernel [F | E]: zero fraction {self.kernel_zero_fraction:.6f} "
                   f"(lower bound 1 - 6/(6N-2) = {self.kernel_lower_bound:.6f})")
        out.append(f"reference zero fraction of A for N=20: {self.reference:.4f}")
        return out


def _count(M, threshold) -> int:
    data = M.data if sp.issparse(M) else np.asarray(M).ravel()
    return int(np.count_nonzero(np.abs(data) >= threshold))


def sparsity_report(model: AggregateModel, threshold: float = ZERO_THRESHOLD) -> SparsityReport:
    """Count nonzeros of the aggregate matrices at `threshold`.

    Thresholds below the pruning threshold the model was built with count
    as that threshold.
    """
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    thr = max(threshold, model.threshold)
    mats = {"A": model.A, "B": model.B, "C": model.C, "D": model.D}
    nnz = {k: _count(v, thr) for k, v in mats.items()}
    shapes = {k: v.shape for k, v in mats.items()}
    E, F = model.kernel
    kernel_nnz = _count(E, thr) + _count(F, thr)
    kernel_size = E.shape[0] * (E.shape[1] + F.shape[1])
    n = model.n_elements
    return SparsityReport(thr, nnz, shapes, 1.0 - kernel_nnz / kernel_size,
                          1.0 - 6.0 / (6 * n - 2))


def io_map_description(model: AggregateModel) -> str:
    return model.io_map.describe()
