"""Time integration of aggregate models and energy bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import AggregateModel
from .hamiltonian import (DEFAULT_QUAD_ORDER, Densities, EnergyDensity,
                          stacked_gradient,
                          stacked_hamiltonian, stacked_hessian_blocks)
from .mesh import Mesh

__all__ = ["Scenario", "SimulationResult", "NewtonConvergenceError",
           "sine_pulse", "zero_signal", "gradient_stack", "step", "run",
           "INTEGRATORS", "NEWTON_TOL", "NEWTON_MAXITER"]

INTEGRATORS = ("implicit_midpoint", "rk4")
NEWTON_TOL = 1e-10
NEWTON_MAXITER = 50


class NewtonConvergenceError(RuntimeError):
    def __init__(self, t, residual, iterations):
        super().__init__(f"implicit midpoint step at t={t:g} did not converge: "
                         f"residual {residual:.3e} after {iterations} iterations")
        self.t = t
        self.residual = residual
        self.iterations = iterations


def sine_pulse(amplitude: float = 1.0, duration: float = 2.0) -> Callable:
    """One period of ``amplitude * sin(2 pi t / duration)`` on the first input.

    The second input is held at zero; with the default parameters this is a
    voltage ``sin(pi t)`` on ``[0, 2]`` at the left end of an open line.
    """
    if not duration > 0:
        raise ValueError("duration must be positive")
    omega = 2 * np.pi / duration

    def u(t):
        v = amplitude * math.sin(omega * t) if 0.0 <= t <= duration else 0.0
        return np.array([v, 0.0])

    u.name = "sine_pulse"
    return u


def zero_signal() -> Callable:
    def u(t):
        return np.zeros(2)

    u.name = "zero"
    return u


@dataclass
class Scenario:
    """Everything needed to integrate one aggregate model.

    `dens_p` and `dens_q` are either one density shared by all elements or
    one per element.
    """

    model: AggregateModel
    dens_p: Densities
    dens_q: Densities
    input_signal: Callable = field(default_factory=zero_signal)
    t_end: float = 10.0
    dt: float = 1e-3
    integrator: str = "implicit_midpoint"
    initial_state: Optional[np.ndarray] = None
    quad_order: int = DEFAULT_QUAD_ORDER

    def __post_init__(self):
        if not (np.isfinite(self.dt) and np.isfinite(self.t_end)):
            raise ValueError("dt and t_end must be finite")
        if not 0 < self.dt <= self.t_end:
            raise ValueError(f"need 0 < dt <= t_end, got dt={self.dt}, t_end={self.t_end}")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"unknown integrator {self.integrator!r}; "
                             f"choose from {INTEGRATORS}")
        n = self.model.state_dim
        if self.initial_state is None:
            self.initial_state = np.zeros(n)
        self.initial_state = np.asarray(self.initial_state, dtype=float)
        if self.initial_state.shape != (n,):
            raise ValueError(f"initial state must have length {n}")
        if not np.all(np.isfinite(self.initial_state)):
            raise ValueError("initial state must be finite")
        self._jac_cache = None

    @property
    def mesh(self) -> Mesh:
        return self.model.mesh

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.t_end / self.dt * (1 + 1e-12)))

    def gradient(self, x) -> np.ndarray:
        return stacked_gradient(self.mesh.widths, self.dens_p, self.dens_q, x,
                                self.quad_order)

    def hamiltonian(self, x) -> float:
        return float(stacked_hamiltonian(self.mesh.widths, self.dens_p,
                                         self.dens_q, x, self.quad_order).sum())

    def vector_field(self, t, x) -> np.ndarray:
        return self.model.state_derivative(self.gradient(x), self.input_signal(t))

    def output(self, t, x) -> np.ndarray:
        return self.model.output(self.gradient(x), self.input_signal(t))

    def _batched(self, fn, X):
        """Apply a stacked energy function to many states at once (rows of `X`)."""
        reps = X.shape[0]
        tile = lambda d: d if isinstance(d, EnergyDensity) else list(d) * reps
        out = fn(np.tile(self.mesh.widths, reps), tile(self.dens_p),
                 tile(self.dens_q), X.ravel(), self.quad_order)
        return out.reshape(reps, -1)


@dataclass
class SimulationResult:
    """Trajectory on the grid ``t_k = k dt``.

    For the implicit midpoint rule the interior outputs are averages of the
    two adjacent stage outputs ``y(x_{k +- 1/2})``, which are the efforts
    the scheme actually advances with; `stage_outputs` keeps them. The end
    points use the node state.
    """

    times: np.ndarray
    states: np.ndarray
    inputs: np.ndarray
    outputs: np.ndarray
    hamiltonian: np.ndarray
    power: np.ndarray
    dHdt: np.ndarray
    power_residual: np.ndarray
    integrator: str
    stage_outputs: Optional[np.ndarray] = None
    stage_power: Optional[np.ndarray] = None

    @property
    def max_power_residual(self) -> float:
        return float(np.nanmax(self.power_residual))

    @property
    def max_power(self) -> float:
        return float(np.abs(self.power).max())

    def drift(self, t_from: float) -> float:
        """Relative spread ``(max H - min H) / max |H|`` for ``t >= t_from``."""
        H = self.hamiltonian[self.times >= t_from - 1e-12]
        scale = np.abs(H).max()
        return float((H.max() - H.min()) / scale) if scale > 0 else 0.0

    def dissipation_violation(self) -> float:
        """Largest ``dH/dt - y^T u - 1e-4 max(1, |y^T u|)`` over interior points."""
        excess = (self.dHdt[1:-1] - self.power[1:-1]
                  - 1e-4 * np.maximum(1.0, np.abs(self.power[1:-1])))
        return float(excess.max()) if excess.size else -np.inf


def gradient_stack(mesh: Mesh, dens_p: Densities, dens_q: Densities, x,
                   quad_order: int = DEFAULT_QUAD_ORDER) -> np.ndarray:
    """Element gradients concatenated in mesh order."""
    return stacked_gradient(mesh.widths, dens_p, dens_q, x, quad_order)


def _rk4(sc: Scenario, t, x):
    dt = sc.dt
    k1 = sc.vector_field(t, x)
    k2 = sc.vector_field(t + dt / 2, x + dt / 2 * k1)
    k3 = sc.vector_field(t + dt / 2, x + dt / 2 * k2)
    k4 = sc.vector_field(t + dt, x + dt * k3)
    return x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _midpoint_jacobian(sc: Scenario, x_mid):
    blocks = stacked_hessian_blocks(sc.mesh.widths, sc.dens_p, sc.dens_q,
                                    x_mid, sc.quad_order)
    cache = sc._jac_cache
    if cache is not None and np.array_equal(cache[0], blocks):
        return cache[1]
    hess = sp.block_diag(list(blocks), format="csc")
    n = sc.model.state_dim
    J = sp.identity(n, format="csc") - 0.5 * sc.dt * (sc.model.A @ hess)
    lu = spla.splu(J.tocsc())
    sc._jac_cache = (blocks, lu)
    return lu


def _implicit_midpoint(sc: Scenario, t, x):
    dt = sc.dt
    u_mid = sc.input_signal(t + dt / 2)
    Bu = sc.model.B @ u_mid

    def residual(x_new):
        g = sc.gradient(0.5 * (x + x_new))
        return x_new - x - dt * (sc.model.A @ g + Bu)

    x_new = x.copy()
    r = residual(x_new)
    rnorm = np.abs(r).max()
    for it in range(NEWTON_MAXITER + 1):
        if rnorm <= NEWTON_TOL * max(1.0, np.abs(x_new).max()):
            return x_new
        if it == NEWTON_MAXITER:
            break
        lu = _midpoint_jacobian(sc, 0.5 * (x + x_new))
        delta = lu.solve(r)
        # damped update: halve until the residual decreases
        lam = 1.0
        for _ in range(10):
            trial = x_new - lam * delta
            r_trial = residual(trial)
            n_trial = np.abs(r_trial).max()
            if n_trial < rnorm:
                break
            lam *= 0.5
        x_new, r, rnorm = trial, r_trial, n_trial
    raise NewtonConvergenceError(t, rnorm, NEWTON_MAXITER)


def step(scenario: Scenario, t: float, x) -> np.ndarray:
    """Advance the state from `t` to ``t + dt``.

    Raises
    ------
    NewtonConvergenceError
        If the implicit midpoint stage equation is not solved to a
        residual of ``1e-10 * max(1, |x|_inf)`` within 50 iterations.
    """
    x = np.asarray(x, dtype=float)
    if scenario.integrator == "rk4":
        return _rk4(scenario, t, x)
    return _implicit_midpoint(scenario, t, x)


def run(scenario: Scenario) -> SimulationResult:
    """Integrate `scenario` over ``[0, t_end]`` and collect diagnostics."""
    sc = scenario
    n = sc.n_steps
    dt = sc.dt
    times = np.arange(n + 1) * dt
    X = np.empty((n + 1, sc.model.state_dim))
    X[0] = sc.initial_state
    for k in range(n):
        X[k + 1] = step(sc, times[k], X[k])

    U = np.array([sc.input_signal(t) for t in times])
    H = sc._batched(stacked_hamiltonian, X).sum(axis=1)
    G = sc._batched(stacked_gradient, X)
    Y = (sc.model.C @ G.T).T + U @ sc.model.D.T

    stage_y = stage_p = None
    if sc.integrator == "implicit_midpoint" and n >= 1:
        U_mid = np.array([sc.input_signal(t + dt / 2) for t in times[:-1]])
        G_mid = sc._batched(stacked_gradient, 0.5 * (X[1:] + X[:-1]))
        stage_y = (sc.model.C @ G_mid.T).T + U_mid @ sc.model.D.T
        stage_p = np.einsum("ij,ij->i", stage_y, U_mid)
        Y[1:-1] = 0.5 * (stage_y[1:] + stage_y[:-1])

    P = np.einsum("ij,ij->i", Y, U)
    dHdt = np.gradient(H, dt) if n >= 2 else np.full(n + 1, np.nan)
    resid = np.full(n + 1, np.nan)
    if n >= 2:
        resid[1:-1] = np.abs((H[2:] - H[:-2]) / (2 * dt) - P[1:-1])
    return SimulationResult(times, X, U, Y, H, P, dHdt, resid, sc.integrator,
                            stage_y, stage_p)
