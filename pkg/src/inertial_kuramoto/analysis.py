"""Trajectory diagnostics and numerical certification of the decay inequalities.

A recorded trajectory is turned into per-sample series: plain diameters of
theta/omega/acceleration/jerk, their order-weighted spreads Q/P/A/B, and the
composite energies E1/E2. On top of these the module locates order-change
samples, detects the entrance time (after which the phase diameter stays
below the target D_inf), fits empirical decay rates, and checks every
differential inequality of the synchronization argument at sampling
resolution.

Certification semantics. The inequalities hold on open intervals where the
orderings of phases, frequencies and accelerations are frozen; the
derivative formulas are invalid exactly at switch times. A sample is
therefore *admissible* when all three orderings match its two neighbors
(one-sample buffer on each side). Within a frozen interval the derivative
of a sorted weighted spread is the same weighted combination applied to the
entrywise derivative, so Q', Q'', P', P'', A' are evaluated exactly from
state quantities with the sample's permutations; B', E1', E2' fall back to
second-order centered differences of their series. A point satisfies an
inequality when LHS - RHS <= tol * max(1, |RHS|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .convex import make_weights, spread_batch, spread_along_batch
from .energy import (
    TheoryConfig,
    energy1_coeffs,
    energy2_coeffs,
    lambda_rate,
    lambda_tilde_rate,
)
from .errors import ResolutionError
from .integrator import Trajectory
from .model import _accel, _jerk

__all__ = [
    "DiagnosticsSeries",
    "InequalityStat",
    "CertificateReport",
    "diagnostics",
    "order_change_times",
    "detect_t_star",
    "fit_decay_rate",
    "certify_inequalities",
    "INEQUALITY_NAMES",
]

# Certified inequalities, keyed by the functional they constrain.
# The last four apply on the post-entrance segment only (D_omega_bound is
# pointwise and needs no derivatives or admissibility buffers).
INEQUALITY_NAMES = (
    "Q_second_order",   # m*Q'' + Q'  <= forcing - (2*eta*k*cos(a)*sin(g)/(g*M_N)) * Q
    "P_first_order",    # m*P'  + P   <= forcing + (2*N*k*cos(a)/eta) * Q
    "A_first_order",    # m*A'  + A   <= (2*N*k/eta) * P
    "E1_decay",         # E1'         <= 2*forcing - Lambda * E1
    "D_omega_bound",    # D_omega     <= D_omega(0) + D_Omega + 2*N*k
    "P_second_order",   # m*P'' + P'  <= -(2*eta*k*cos(D_inf+a)/M_N) * P
    "B_first_order",    # m*B'  + B   <= (2*k*N/eta)*(D_omega(0)+D_Omega+2*N*k)*P + (2*k*N/eta)*A
    "E2_decay",         # E2'         <= -Lambda_tilde * E2
)


@dataclass(frozen=True)
class DiagnosticsSeries:
    """Per-sample diagnostic values derived from a trajectory."""

    times: np.ndarray
    d_theta: np.ndarray
    d_omega: np.ndarray
    d_a: np.ndarray
    d_b: np.ndarray
    q: np.ndarray
    p: np.ndarray
    a: np.ndarray
    b: np.ndarray
    e1: np.ndarray
    e2: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.times.shape[0]

    def columns(self) -> dict[str, np.ndarray]:
        return {
            "D_theta": self.d_theta, "D_omega": self.d_omega,
            "Q": self.q, "P": self.p, "A": self.a, "B": self.b,
            "E1": self.e1, "E2": self.e2,
        }


@dataclass(frozen=True)
class InequalityStat:
    """Aggregate of one inequality over its admissible samples."""

    name: str
    n_points: int
    n_satisfied: int
    fraction: float
    worst_residual: float
    worst_time: float
    violation_indices: list[int] = field(default_factory=list)
    skipped_reason: str | None = None

    @property
    def evaluated(self) -> bool:
        return self.skipped_reason is None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n_points": self.n_points,
            "n_satisfied": self.n_satisfied,
            "fraction": self.fraction,
            "worst_residual": self.worst_residual,
            "worst_time": self.worst_time,
            "violation_indices": list(self.violation_indices),
            "skipped_reason": self.skipped_reason,
        }


@dataclass(frozen=True)
class CertificateReport:
    """Certification outcome across all inequalities of one trajectory."""

    stats: dict[str, InequalityStat]
    t_star: float | None
    fitted_rate: float | None
    lambda_: float
    lambda_tilde: float
    admissible_fraction: float
    tol: float
    notices: list[str] = field(default_factory=list)

    def passed(self, threshold: float = 0.99) -> bool:
        """True iff every evaluated inequality is satisfied at >= threshold fraction."""
        return all(
            s.fraction >= threshold for s in self.stats.values() if s.evaluated
        )

    def to_dict(self) -> dict:
        return {
            "t_star": self.t_star,
            "fitted_rate": self.fitted_rate,
            "lambda": self.lambda_,
            "lambda_tilde": self.lambda_tilde,
            "admissible_fraction": self.admissible_fraction,
            "tol": self.tol,
            "notices": list(self.notices),
            "inequalities": {name: s.to_dict() for name, s in self.stats.items()},
        }


def _batch_accel_jerk(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Acceleration and jerk rows for every sample, via the model kernels."""
    par = traj.params
    n_samples = traj.n_samples
    accels = np.empty((n_samples, par.n), dtype=np.float64)
    jerks = np.empty_like(accels)
    for k in range(n_samples):
        _accel(traj.thetas[k], traj.omegas[k], par.omega_nat, par._adj_f,
               par.kappa, par.alpha, par.m, accels[k])
        _jerk(traj.thetas[k], traj.omegas[k], accels[k], par._adj_f,
              par.kappa, par.alpha, par.m, jerks[k])
    return accels, jerks


def diagnostics(traj: Trajectory, cfg: TheoryConfig) -> DiagnosticsSeries:
    """Evaluate all diagnostic series sample by sample."""
    if traj.n_samples == 0:
        raise ValueError("trajectory has no samples")
    par = traj.params
    accels, jerks = _batch_accel_jerk(traj)
    w = make_weights(cfg.c, par.n)
    q = spread_batch(traj.thetas, w)
    p = spread_batch(traj.omegas, w)
    a = spread_batch(accels, w)
    b = spread_batch(jerks, w)
    c1p, c1a = energy1_coeffs(par, cfg)
    c2a, c2b = energy2_coeffs(par, cfg)
    return DiagnosticsSeries(
        times=traj.times.copy(),
        d_theta=traj.thetas.max(axis=1) - traj.thetas.min(axis=1),
        d_omega=traj.omegas.max(axis=1) - traj.omegas.min(axis=1),
        d_a=accels.max(axis=1) - accels.min(axis=1),
        d_b=jerks.max(axis=1) - jerks.min(axis=1),
        q=q, p=p, a=a, b=b,
        e1=q + c1p * p + c1a * a,
        e2=p + c2a * a + c2b * b,
    )


def _permutations_and_changes(traj: Trajectory):
    """Stable ascending-order permutations of theta/omega/accel per sample,
    plus the boolean mask of samples whose ordering differs from the previous one."""
    accels, _ = _batch_accel_jerk(traj)
    perms = tuple(
        np.argsort(values, axis=1, kind="stable")
        for values in (traj.thetas, traj.omegas, accels)
    )
    changed = np.zeros(traj.n_samples, dtype=bool)
    for perm in perms:
        if traj.n_samples > 1:
            changed[1:] |= (perm[1:] != perm[:-1]).any(axis=1)
    return perms, changed


def order_change_times(traj: Trajectory) -> set[int]:
    """Sample indices where the ordering of theta, omega or acceleration flips.

    These delimit, at sampling resolution, the intervals on which the
    derivative formulas for the sorted spreads are exact.
    """
    if traj.n_samples == 0:
        raise ValueError("trajectory has no samples")
    _, changed = _permutations_and_changes(traj)
    return set(np.flatnonzero(changed).tolist())


def detect_t_star(series: DiagnosticsSeries, cfg: TheoryConfig) -> float | None:
    """Earliest sample time after which D_theta < d_inf at every later sample."""
    if series.n_samples == 0:
        raise ValueError("series has no samples")
    below = series.d_theta < cfg.d_inf
    suffix_ok = np.logical_and.accumulate(below[::-1])[::-1]
    idx = np.flatnonzero(suffix_ok)
    if idx.size == 0:
        return None
    return float(series.times[idx[0]])


def fit_decay_rate(times, values, window: tuple[float, float]) -> float:
    """Least-squares slope of log(values) against time over [t_a, t_b], negated.

    Positive result means decay. Requires at least 3 samples in the window
    and strictly positive values there.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    t_a, t_b = window
    mask = (times >= t_a) & (times <= t_b)
    if mask.sum() < 3:
        raise ValueError(f"need at least 3 samples in window [{t_a:g}, {t_b:g}], got {int(mask.sum())}")
    v = values[mask]
    if not (v > 0).all():
        raise ValueError("values must be strictly positive inside the fit window")
    slope = np.polyfit(times[mask], np.log(v), 1)[0]
    return float(-slope)


def _centered_slopes(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Second-order three-point derivative at interior samples (non-uniform safe).

    Entry k holds the derivative at sample k for 1 <= k <= S-2; the two
    boundary entries are NaN.
    """
    out = np.full_like(values, np.nan)
    h0 = times[1:-1] - times[:-2]
    h1 = times[2:] - times[1:-1]
    out[1:-1] = (
        -values[:-2] * h1 / (h0 * (h0 + h1))
        + values[1:-1] * (h1 - h0) / (h0 * h1)
        + values[2:] * h0 / (h1 * (h0 + h1))
    )
    return out


def _stat(name: str, times, residual, rhs, masks, tol, skipped=None) -> InequalityStat:
    if skipped is not None:
        return InequalityStat(name=name, n_points=0, n_satisfied=0, fraction=math.nan,
                              worst_residual=math.nan, worst_time=math.nan,
                              skipped_reason=skipped)
    mask = masks.copy()
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return InequalityStat(name=name, n_points=0, n_satisfied=0, fraction=math.nan,
                              worst_residual=math.nan, worst_time=math.nan,
                              skipped_reason="no admissible samples in scope")
    res = residual[idx]
    thr = tol * np.maximum(1.0, np.abs(rhs[idx]))
    ok = res <= thr
    worst = int(np.argmax(res - thr))
    violations = idx[~ok][:20]
    return InequalityStat(
        name=name,
        n_points=int(idx.size),
        n_satisfied=int(ok.sum()),
        fraction=float(ok.mean()),
        worst_residual=float(res[worst]),
        worst_time=float(times[idx[worst]]),
        violation_indices=[int(i) for i in violations],
    )


def certify_inequalities(traj: Trajectory, cfg: TheoryConfig,
                         tol: float = 1e-6) -> CertificateReport:
    """Check every decay inequality at admissible samples; aggregate per inequality.

    Raises ResolutionError when fewer than 80% of samples are admissible or
    when the trajectory is too short to form derivative stencils. When no
    entrance time is detected, the post-entrance inequalities are skipped
    with a notice instead of failing.
    """
    n_samples = traj.n_samples
    if n_samples < 3:
        raise ResolutionError(
            f"certification needs at least 3 samples, got {n_samples}",
            hint="record more samples (smaller record_stride or dt)",
        )
    par = traj.params
    n = par.n
    times = traj.times
    series = diagnostics(traj, cfg)
    accels, jerks = _batch_accel_jerk(traj)
    (perm_theta, perm_omega, perm_accel), changed = _permutations_and_changes(traj)

    admissible = np.zeros(n_samples, dtype=bool)
    admissible[1:-1] = ~(changed[1:-1] | changed[2:])
    adm_fraction = float(admissible.mean())
    if adm_fraction < 0.8:
        spacing = float(np.median(np.diff(times))) if n_samples > 1 else math.nan
        raise ResolutionError(
            f"only {adm_fraction:.1%} of samples sit inside constant-order intervals "
            "(threshold 80%); the sampling is too coarse for derivative checks",
            hint=f"reduce the sample spacing below {spacing / 2:g} "
                 "(halve record_stride * dt) and rerun",
        )

    w = make_weights(cfg.c, n)
    eta_val = 1.0 - 4.0 / (cfg.c + 2)
    m_n = w.top
    m = par.m
    kappa = par.kappa
    d_om = par.omega_nat_spread
    d_omega0 = float(series.d_omega[0])
    forcing = d_om + 2.0 * n * kappa * math.sin(par.alpha)
    lam = lambda_rate(par, cfg)
    lam_tilde = lambda_tilde_rate(par, cfg, d_omega0)

    # Exact within-interval derivatives of the sorted spreads.
    q_dot = spread_along_batch(traj.omegas, perm_theta, w)
    q_ddot = spread_along_batch(accels, perm_theta, w)
    p_dot = spread_along_batch(accels, perm_omega, w)
    p_ddot = spread_along_batch(jerks, perm_omega, w)
    a_dot = spread_along_batch(jerks, perm_accel, w)
    # Series-level centered differences where no exact formula exists.
    b_dot = _centered_slopes(times, series.b)
    e1_dot = _centered_slopes(times, series.e1)
    e2_dot = _centered_slopes(times, series.e2)

    t_star = detect_t_star(series, cfg)
    notices: list[str] = []
    if t_star is None:
        notices.append(
            "entrance time not detected within the horizon; "
            "post-entrance inequalities skipped"
        )
        post_mask = np.zeros(n_samples, dtype=bool)
        post_skip = "entrance time not detected"
    else:
        post_mask = times >= t_star
        post_skip = None

    stats: dict[str, InequalityStat] = {}

    sg = math.sin(cfg.gamma)
    rhs = forcing - (2.0 * eta_val * kappa * math.cos(par.alpha) * sg / (cfg.gamma * m_n)) * series.q
    stats["Q_second_order"] = _stat(
        "Q_second_order", times, (m * q_ddot + q_dot) - rhs, rhs, admissible, tol)

    rhs = forcing + (2.0 * n * kappa * math.cos(par.alpha) / eta_val) * series.q
    stats["P_first_order"] = _stat(
        "P_first_order", times, (m * p_dot + series.p) - rhs, rhs, admissible, tol)

    rhs = (2.0 * n * kappa / eta_val) * series.p
    stats["A_first_order"] = _stat(
        "A_first_order", times, (m * a_dot + series.a) - rhs, rhs, admissible, tol)

    rhs = 2.0 * forcing - lam * series.e1
    stats["E1_decay"] = _stat(
        "E1_decay", times, e1_dot - rhs, rhs, admissible, tol)

    # Pointwise bound: no derivatives, no admissibility buffers, every sample.
    rhs = np.full(n_samples, d_omega0 + d_om + 2.0 * n * kappa)
    stats["D_omega_bound"] = _stat(
        "D_omega_bound", times, series.d_omega - rhs, rhs,
        np.ones(n_samples, dtype=bool), tol)

    cda = math.cos(cfg.d_inf + par.alpha)
    rhs = -(2.0 * eta_val * kappa * cda / m_n) * series.p
    stats["P_second_order"] = _stat(
        "P_second_order", times, (m * p_ddot + p_dot) - rhs, rhs,
        admissible & post_mask, tol, skipped=post_skip)

    coef = 2.0 * kappa * n / eta_val
    rhs = coef * (d_omega0 + d_om + 2.0 * n * kappa) * series.p + coef * series.a
    stats["B_first_order"] = _stat(
        "B_first_order", times, (m * b_dot + series.b) - rhs, rhs,
        admissible & post_mask, tol, skipped=post_skip)

    rhs = -lam_tilde * series.e2
    stats["E2_decay"] = _stat(
        "E2_decay", times, e2_dot - rhs, rhs,
        admissible & post_mask, tol, skipped=post_skip)

    fitted = None
    if t_star is not None:
        try:
            fitted = fit_decay_rate(times, series.d_omega, (t_star, float(times[-1])))
        except ValueError as exc:
            notices.append(f"decay-rate fit unavailable: {exc}")

    return CertificateReport(
        stats=stats,
        t_star=t_star,
        fitted_rate=fitted,
        lambda_=lam,
        lambda_tilde=lam_tilde,
        admissible_fraction=adm_fraction,
        tol=tol,
        notices=notices,
    )
