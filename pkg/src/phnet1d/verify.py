"""Invariant checks on element and aggregate models, collected as a report."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .assembly import compose_chain
from .element_matrices import build_dirac_pair, compute_matrices, element_state_space
from .mesh import Mesh
from .shape_functions import build_shape_set, normalization_report

__all__ = ["Check", "run_checks", "format_checks"]


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    # "le": value <= tolerance, "ge": value >= tolerance, "eq": value == tolerance
    mode: str = "le"

    @property
    def passed(self) -> bool:
        if self.mode == "le":
            return bool(self.value <= self.tolerance)
        if self.mode == "ge":
            return bool(self.value >= self.tolerance)
        return bool(self.value == self.tolerance)

    def line(self) -> str:
        op = {"le": "<=", "ge": ">=", "eq": "=="}[self.mode]
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name} = {self.value:.3e} {op} {self.tolerance:g}"


def run_checks(mesh: Mesh, sigma: Union[float, Sequence[float]] = 0.0) -> list:
    """Run every structural check on `mesh` and return the results."""
    n = mesh.n_elements
    sig = np.broadcast_to(np.asarray(sigma, dtype=float), (n,))
    norm_res, app_b, defect, rank_min, rank_max = 0.0, 0.0, 0.0, 6, 6
    r_cons, r_min = 0.0, np.inf
    any_conservative = False
    for el, s in zip(mesh, sig):
        norm_res = max(norm_res, normalization_report(build_shape_set(el)).max_residual)
        mx = compute_matrices(el, s)
        app_b = max(app_b, float(np.abs(mx.pairing_identity).max()))
        pair = build_dirac_pair(mx)
        model = element_state_space(pair)
        if s == 0:
            any_conservative = True
            defect = max(defect, pair.dirac_defect)
            rank = pair.kernel_rank
            rank_min, rank_max = min(rank_min, rank), max(rank_max, rank)
            r_cons = max(r_cons, float(np.abs(model.R).max()))
        else:
            r_min = min(r_min, model.min_dissipation_eig)

    checks = [
        Check("max shape-function normalization residual", norm_res, 1e-10),
        Check("max |M4^T M2 + M3^T M5 + M6^T diag(-1,0,-1)|", app_b, 1e-12),
    ]
    if any_conservative:
        checks += [
            Check("max |FE^T+EF^T|", defect, 1e-12),
            Check("min rank [F|E]", rank_min, 6, "eq"),
            Check("max rank [F|E]", rank_max, 6, "eq"),
            Check("max |R| of conservative elements", r_cons, 1e-12),
        ]
    if np.isfinite(r_min):
        checks.append(Check("min eig R of dissipative elements", r_min, -1e-10, "ge"))

    agg = compose_chain(mesh, sig)
    if agg.is_conservative:
        for key, val in agg.skewness_defects().items():
            checks.append(Check(f"aggregate max |{key}|", val, 1e-10))
    else:
        eig = float(np.linalg.eigvalsh(agg.passivity_matrix()).min())
        checks.append(Check("aggregate min eig R", eig, -1e-8, "ge"))
    return checks


def format_checks(checks) -> str:
    return "\n".join(c.line() for c in checks)
