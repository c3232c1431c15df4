"""Fixed-step classical fourth-order Runge-Kutta integration of (theta, omega).

The frequency equation relaxes on the inertia time scale m, so the explicit
stepper enforces dt <= m/4 unless the caller forces a larger step (the
stability boundary of the scheme on that mode sits near 2.78*m; m/4 leaves
margin). No adaptive stepping: diagnostic series are sampled on a uniform
grid so runs are reproducible bit for bit on one platform.

Recorded samples hold raw (theta, omega) only; every diagnostic is
recomputed downstream from these, keeping a single source of truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DivergenceError
from .model import ModelParams, State, _accel

__all__ = ["IntegratorConfig", "Trajectory", "rk4_step", "simulate"]

STIFFNESS_GUARD_FACTOR = 4.0


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, horizon and recording policy for one run."""

    dt: float
    t_end: float
    record_stride: int = 1
    max_steps: int = 50_000_000
    force_dt: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if not (isinstance(self.record_stride, (int, np.integer)) and self.record_stride >= 1):
            raise ValueError(f"record_stride must be a positive integer, got {self.record_stride}")
        if not self.max_steps >= 0:
            raise ValueError(f"max_steps must be nonnegative, got {self.max_steps}")


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered recorded samples of one run, initial and final states included."""

    params: ModelParams
    cfg: IntegratorConfig
    times: np.ndarray
    thetas: np.ndarray
    omegas: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        th = np.asarray(self.thetas, dtype=np.float64)
        om = np.asarray(self.omegas, dtype=np.float64)
        if th.shape != om.shape or th.ndim != 2 or th.shape[0] != t.shape[0]:
            raise ValueError("times, thetas and omegas must have matching sample counts")
        if t.shape[0] > 1 and not (np.diff(t) > 0).all():
            raise ValueError("sample times must be strictly increasing")
        for arr, name in ((t, "times"), (th, "thetas"), (om, "omegas")):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_samples(self) -> int:
        return self.times.shape[0]

    def state(self, k: int) -> State:
        return State(t=float(self.times[k]), theta=self.thetas[k], omega=self.omegas[k])

    def final_state(self) -> State:
        return self.state(self.n_samples - 1)


@njit(cache=True, nogil=True)
def _rk4_span(theta, omega, dt, n_steps, rec_steps, omega_nat, adj, kappa, alpha, m,
              out_theta, out_omega):  # pragma: no cover
    """Advance n_steps in place, recording at the step indices in rec_steps.

    Returns (status, step, n_recorded): status 0 on success, 1 when a
    non-finite component appeared at `step`.
    """
    n = theta.shape[0]
    k1t = np.empty(n)
    k1w = np.empty(n)
    k2t = np.empty(n)
    k2w = np.empty(n)
    k3t = np.empty(n)
    k3w = np.empty(n)
    k4t = np.empty(n)
    k4w = np.empty(n)
    tmp_t = np.empty(n)
    tmp_w = np.empty(n)

    rec_i = 0
    if rec_steps.shape[0] > 0 and rec_steps[0] == 0:
        for i in range(n):
            out_theta[0, i] = theta[i]
            out_omega[0, i] = omega[i]
        rec_i = 1

    half = 0.5 * dt
    sixth = dt / 6.0
    for step in range(1, n_steps + 1):
        _accel(theta, omega, omega_nat, adj, kappa, alpha, m, k1w)
        for i in range(n):
            k1t[i] = omega[i]
            tmp_t[i] = theta[i] + half * k1t[i]
            tmp_w[i] = omega[i] + half * k1w[i]
        _accel(tmp_t, tmp_w, omega_nat, adj, kappa, alpha, m, k2w)
        for i in range(n):
            k2t[i] = tmp_w[i]
            tmp_t[i] = theta[i] + half * k2t[i]
            tmp_w[i] = omega[i] + half * k2w[i]
        _accel(tmp_t, tmp_w, omega_nat, adj, kappa, alpha, m, k3w)
        for i in range(n):
            k3t[i] = tmp_w[i]
            tmp_t[i] = theta[i] + dt * k3t[i]
            tmp_w[i] = omega[i] + dt * k3w[i]
        _accel(tmp_t, tmp_w, omega_nat, adj, kappa, alpha, m, k4w)
        ok = True
        for i in range(n):
            k4t[i] = tmp_w[i]
            theta[i] += sixth * (k1t[i] + 2.0 * k2t[i] + 2.0 * k3t[i] + k4t[i])
            omega[i] += sixth * (k1w[i] + 2.0 * k2w[i] + 2.0 * k3w[i] + k4w[i])
            if not (math.isfinite(theta[i]) and math.isfinite(omega[i])):
                ok = False
        if not ok:
            return 1, step, rec_i
        if rec_i < rec_steps.shape[0] and step == rec_steps[rec_i]:
            for i in range(n):
                out_theta[rec_i, i] = theta[i]
                out_omega[rec_i, i] = omega[i]
            rec_i += 1
    return 0, n_steps, rec_i


def _run_span(p: ModelParams, theta, omega, dt, n_steps, rec_steps):
    out_theta = np.empty((rec_steps.shape[0], p.n), dtype=np.float64)
    out_omega = np.empty_like(out_theta)
    status, step, rec_i = _rk4_span(
        theta, omega, dt, n_steps, rec_steps,
        p.omega_nat, p._adj_f, p.kappa, p.alpha, p.m,
        out_theta, out_omega,
    )
    return status, step, rec_i, out_theta, out_omega


def rk4_step(p: ModelParams, s: State, dt: float) -> State:
    """One classical Runge-Kutta update of (theta, omega); t advances by dt."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if s.n != p.n:
        raise ValueError(f"state has {s.n} oscillators, parameters expect {p.n}")
    theta = s.theta.copy()
    omega = s.omega.copy()
    rec = np.array([1], dtype=np.int64)
    status, _, _, out_theta, out_omega = _run_span(p, theta, omega, float(dt), 1, rec)
    if status != 0:
        raise DivergenceError(t=s.t + dt)
    return State(t=s.t + dt, theta=out_theta[0], omega=out_omega[0])


def _check_stiffness(p: ModelParams, cfg: IntegratorConfig) -> None:
    limit = p.m / STIFFNESS_GUARD_FACTOR
    if cfg.dt > limit * (1 + 1e-12) and not cfg.force_dt:
        raise ValueError(
            f"dt = {cfg.dt:g} exceeds the stiffness guard m/{STIFFNESS_GUARD_FACTOR:g} = {limit:g}; "
            "reduce dt or set force_dt to run anyway"
        )


def simulate(p: ModelParams, init: State, cfg: IntegratorConfig) -> Trajectory:
    """Integrate from `init` over [init.t, init.t + t_end] and record samples.

    Records every record_stride-th step plus the initial and final states.
    Raises DivergenceError (carrying the partial trajectory) if the state
    leaves the finite floats, and ValueError when the step budget or the
    stiffness guard is exceeded.
    """
    if init.n != p.n:
        raise ValueError(f"initial state has {init.n} oscillators, parameters expect {p.n}")
    _check_stiffness(p, cfg)

    n_full = int(math.floor(cfg.t_end / cfg.dt + 1e-9))
    rem = cfg.t_end - n_full * cfg.dt
    has_partial = rem > 1e-9 * cfg.dt
    if n_full + int(has_partial) > cfg.max_steps:
        raise ValueError(
            f"run needs {n_full + int(has_partial)} steps, exceeding max_steps = {cfg.max_steps}"
        )

    rec_steps = np.arange(0, n_full + 1, cfg.record_stride, dtype=np.int64)
    if n_full % cfg.record_stride != 0:
        rec_steps = np.append(rec_steps, np.int64(n_full))

    theta = init.theta.copy()
    omega = init.omega.copy()
    status, step, rec_i, out_theta, out_omega = _run_span(
        p, theta, omega, float(cfg.dt), n_full, rec_steps
    )
    times = init.t + rec_steps.astype(np.float64) * cfg.dt
    if status != 0:
        partial = Trajectory(
            params=p, cfg=cfg,
            times=times[:rec_i], thetas=out_theta[:rec_i], omegas=out_omega[:rec_i],
        )
        raise DivergenceError(t=init.t + step * cfg.dt, partial=partial)

    if has_partial:
        status, _, _, fin_theta, fin_omega = _run_span(
            p, theta, omega, float(rem), 1, np.array([1], dtype=np.int64)
        )
        if status != 0:
            partial = Trajectory(params=p, cfg=cfg, times=times,
                                 thetas=out_theta, omegas=out_omega)
            raise DivergenceError(t=init.t + cfg.t_end, partial=partial)
        times = np.append(times, init.t + cfg.t_end)
        out_theta = np.vstack([out_theta, fin_theta])
        out_omega = np.vstack([out_omega, fin_omega])

    return Trajectory(params=p, cfg=cfg, times=times, thetas=out_theta, omegas=out_omega)
