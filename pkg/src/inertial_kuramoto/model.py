"""Second-order phase oscillators with inertia and frustration on a digraph.

The governing system for phases theta_i with frequencies omega_i = dtheta_i/dt:

    m * domega_i/dt + omega_i = Omega_i + kappa * sum_{j in N_i} sin(theta_j - theta_i + alpha)

where N_i is the in-neighbor set, kappa >= 0 the coupling strength, m > 0 the
inertia, alpha in [0, pi/2) the frustration angle, and Omega_i the natural
frequencies. The acceleration a = domega/dt and jerk b = da/dt are closed-form
functions of (theta, omega) obtained from the system and its time derivative:

    a_i = (-omega_i + Omega_i + kappa * sum sin(theta_j - theta_i + alpha)) / m
    b_i = (kappa * sum cos(theta_j - theta_i + alpha) * (omega_j - omega_i) - a_i) / m

Phases are unwrapped reals and are never reduced mod 2*pi: every diagnostic
downstream is an order statistic of real values, and the regimes of interest
keep the phase spread below pi, so wrapping is never needed.

The per-edge kernels are JIT-compiled; the integrator drives the same
compiled functions, so there is a single implementation of the dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .digraph import Digraph

__all__ = ["ModelParams", "State", "rhs", "acceleration", "jerk"]


@njit(cache=True, nogil=True)
def _accel(theta, omega, omega_nat, adj, kappa, alpha, m, out):  # pragma: no cover
    n = theta.shape[0]
    for i in range(n):
        s = 0.0
        for j in range(n):
            if adj[i, j] != 0.0:
                s += math.sin(theta[j] - theta[i] + alpha)
        out[i] = (-omega[i] + omega_nat[i] + kappa * s) / m


@njit(cache=True, nogil=True)
def _jerk(theta, omega, accel, adj, kappa, alpha, m, out):  # pragma: no cover
    n = theta.shape[0]
    for i in range(n):
        s = 0.0
        for j in range(n):
            if adj[i, j] != 0.0:
                s += math.cos(theta[j] - theta[i] + alpha) * (omega[j] - omega[i])
        out[i] = (kappa * s - accel[i]) / m


@dataclass(frozen=True)
class ModelParams:
    """Immutable model parameters; shared freely across threads.

    kappa = 0 is admitted (decoupled control runs); the synchronization
    conditions then fail, which is the point of such runs.
    """

    m: float
    kappa: float
    alpha: float
    omega_nat: np.ndarray
    graph: Digraph

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"inertia m must be positive, got {self.m}")
        if not self.kappa >= 0:
            raise ValueError(f"coupling kappa must be nonnegative, got {self.kappa}")
        if not 0 <= self.alpha < math.pi / 2:
            raise ValueError(f"frustration alpha must lie in [0, pi/2), got {self.alpha}")
        om = np.asarray(self.omega_nat, dtype=np.float64).copy()
        if om.ndim != 1 or om.shape[0] != self.graph.n:
            raise ValueError(
                f"omega_nat must have one entry per vertex ({self.graph.n}), got shape {om.shape}"
            )
        if not np.isfinite(om).all():
            raise ValueError("omega_nat entries must be finite")
        om.setflags(write=False)
        object.__setattr__(self, "omega_nat", om)
        adj_f = self.graph.adjacency.astype(np.float64)
        adj_f.setflags(write=False)
        object.__setattr__(self, "_adj_f", adj_f)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def omega_nat_spread(self) -> float:
        """Diameter of the natural frequencies, max - min."""
        return float(self.omega_nat.max() - self.omega_nat.min())


@dataclass(frozen=True)
class State:
    """Snapshot (t, theta, omega) of the integrated variables."""

    t: float
    theta: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=np.float64).copy()
        om = np.asarray(self.omega, dtype=np.float64).copy()
        if th.ndim != 1 or om.shape != th.shape:
            raise ValueError(f"theta and omega must be vectors of equal length, got {th.shape} and {om.shape}")
        if not (np.isfinite(th).all() and np.isfinite(om).all() and math.isfinite(self.t)):
            raise ValueError("state entries must be finite")
        th.setflags(write=False)
        om.setflags(write=False)
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "omega", om)

    @property
    def n(self) -> int:
        return self.theta.shape[0]


def _check_state(p: ModelParams, s: State) -> None:
    if s.n != p.n:
        raise ValueError(f"state has {s.n} oscillators, parameters expect {p.n}")


def acceleration(p: ModelParams, s: State) -> np.ndarray:
    """Frequency derivative a_i = domega_i/dt as a function of the state."""
    _check_state(p, s)
    out = np.empty(p.n, dtype=np.float64)
    _accel(s.theta, s.omega, p.omega_nat, p._adj_f, p.kappa, p.alpha, p.m, out)
    return out


def rhs(p: ModelParams, s: State) -> tuple[np.ndarray, np.ndarray]:
    """Right-hand side (dtheta/dt, domega/dt) of the first-order system in (theta, omega)."""
    return s.omega.copy(), acceleration(p, s)


def jerk(p: ModelParams, s: State) -> np.ndarray:
    """Acceleration derivative b_i = da_i/dt as a function of the state."""
    _check_state(p, s)
    a = acceleration(p, s)
    out = np.empty(p.n, dtype=np.float64)
    _jerk(s.theta, s.omega, a, p._adj_f, p.kappa, p.alpha, p.m, out)
    return out
