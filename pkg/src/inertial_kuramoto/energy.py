"""Diameters, composite energies, decay rates and the sufficient-condition set.

Given a convexity integer c (hence eta = 1 - 4/(c+2) and the top weight M_N),
a cone angle gamma with D_theta(0) < gamma < pi, a target spread D_inf with
D_inf + alpha < pi/2 and a slack epsilon in (0, 1), frequency synchronization
is guaranteed when four strict parameter inequalities hold. This module
evaluates them with signed margins, together with the two exponential rates:

    Lambda       = min( eta*kappa*cos(alpha)*sin(gamma) / (gamma*M_N),
                        1/m - 8*N^2*kappa*gamma*M_N / (eta^3*sin(gamma)),
                        1/(2m) )
    Lambda_tilde = min( eta*kappa*cos(D_inf+alpha)/M_N
                            - 4*m*kappa*N*(D_omega(0)+D_Omega+2*N*kappa)/eta,
                        (eta^2*cos(D_inf+alpha)/(2*N*M_N) - 4*N*m*kappa/eta)
                            / (m*eta^2*cos(D_inf+alpha)/(2*N*M_N)),
                        1/(2m) )

and the two composite energies built from the order-weighted spreads
Q, P, A, B of theta, omega, acceleration and jerk:

    E1 = Q + (eta^2*sin(gamma)/(2*N*gamma*M_N)) * m * P + 2*m^2 * A
    E2 = P + (eta^2*cos(D_inf+alpha)/(2*N*M_N)) * m * A + 2*m^2 * B

E1 obeys dE1/dt <= 2*(D_Omega + 2*N*kappa*sin(alpha)) - Lambda*E1 and bounds
the phase spread; E2 obeys dE2/dt <= -Lambda_tilde*E2 after the entrance time
and bounds the frequency spread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convex import eta, make_weights, spread
from .errors import InfeasibleError
from .model import ModelParams, State, acceleration, jerk

__all__ = [
    "TheoryConfig",
    "Condition",
    "ConditionReport",
    "diameter",
    "lambda_rate",
    "lambda_rate_branches",
    "lambda_tilde_rate",
    "lambda_tilde_rate_branches",
    "energy1",
    "energy2",
    "energy1_coeffs",
    "energy2_coeffs",
    "auto_select_c",
    "check_conditions",
]


@dataclass(frozen=True)
class TheoryConfig:
    """Analysis parameters: cone angle, target spread, slack and convexity integer."""

    gamma: float
    d_inf: float
    epsilon: float
    c: int

    def __post_init__(self):
        if not 0 < self.gamma < math.pi:
            raise ValueError(f"gamma must lie in (0, pi), got {self.gamma}")
        if not 0 < self.d_inf < math.pi / 2:
            raise ValueError(f"d_inf must lie in (0, pi/2), got {self.d_inf}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not (isinstance(self.c, (int, np.integer)) and not isinstance(self.c, bool) and self.c > 2):
            raise ValueError(f"c must be an integer greater than 2, got {self.c!r}")
        object.__setattr__(self, "c", int(self.c))


@dataclass(frozen=True)
class Condition:
    """One strict inequality, canonicalized as LHS < RHS; margin = LHS - RHS."""

    passed: bool
    margin: float


@dataclass(frozen=True)
class ConditionReport:
    """Pass/fail flags with signed margins for the full sufficient-condition set.

    `entrance_bound` records the informational inequality
    4*(D_Omega + 2*N*kappa*sin(alpha))/(eta*Lambda) < D_inf used when bounding
    the entrance time; it is reported but excluded from all_pass, which
    conjoins the eight primary flags.
    """

    gamma_bound: Condition
    c_lower: Condition
    c_initial: Condition
    quarter_circle: Condition
    mk_con1: Condition
    mk_con2: Condition
    mk_con3: Condition
    mk_con4: Condition
    entrance_bound: Condition
    eta: float
    m_n: float
    lambda_: float
    lambda_tilde: float
    d_a0: float
    d_theta0: float
    d_omega0: float
    d_omega_nat: float

    _PRIMARY = (
        "gamma_bound", "c_lower", "c_initial", "quarter_circle",
        "mk_con1", "mk_con2", "mk_con3", "mk_con4",
    )

    @property
    def all_pass(self) -> bool:
        return all(getattr(self, name).passed for name in self._PRIMARY)

    def conditions(self) -> dict[str, Condition]:
        out = {name: getattr(self, name) for name in self._PRIMARY}
        out["entrance_bound"] = self.entrance_bound
        return out

    def to_dict(self) -> dict:
        doc = {
            "all_pass": self.all_pass,
            "conditions": {
                name: {"passed": cond.passed, "margin": cond.margin}
                for name, cond in self.conditions().items()
            },
        }
        for key in ("eta", "m_n", "lambda_", "lambda_tilde",
                    "d_a0", "d_theta0", "d_omega0", "d_omega_nat"):
            doc[key.rstrip("_")] = getattr(self, key)
        return doc


def diameter(z) -> float:
    """max(z) - min(z); the plain spread of a state vector."""
    z = np.asarray(z, dtype=np.float64)
    if z.size == 0:
        raise ValueError("diameter of an empty vector is undefined")
    return float(z.max() - z.min())


def _eta_mn(n: int, c: int) -> tuple[float, float]:
    return eta(c), make_weights(c, n).top


def _lambda_branches_raw(n, kappa, alpha, gamma, m, eta_val, m_n):
    b1 = eta_val * kappa * math.cos(alpha) * math.sin(gamma) / (gamma * m_n)
    b2 = 1.0 / m - 8.0 * n * n * kappa * gamma * m_n / (eta_val ** 3 * math.sin(gamma))
    b3 = 1.0 / (2.0 * m)
    return b1, b2, b3


def lambda_rate_branches(p: ModelParams, cfg: TheoryConfig) -> tuple[float, float, float]:
    """The three candidate values whose minimum is the phase-side rate."""
    eta_val, m_n = _eta_mn(p.n, cfg.c)
    return _lambda_branches_raw(p.n, p.kappa, p.alpha, cfg.gamma, p.m, eta_val, m_n)


def lambda_rate(p: ModelParams, cfg: TheoryConfig) -> float:
    """Phase-side exponential rate; may be nonpositive when conditions fail."""
    return min(lambda_rate_branches(p, cfg))


def _lambda_tilde_branches_raw(n, kappa, alpha, d_inf, m, eta_val, m_n, d_om_total):
    # d_om_total = D_omega(0) + D_Omega, the non-coupling part of the frequency bound.
    cda = math.cos(d_inf + alpha)
    b1 = eta_val * kappa * cda / m_n - 4.0 * m * kappa * n * (d_om_total + 2.0 * n * kappa) / eta_val
    b2_coef = eta_val ** 2 * cda / (2.0 * n * m_n)
    b2 = (b2_coef - 4.0 * n * m * kappa / eta_val) / (m * b2_coef)
    b3 = 1.0 / (2.0 * m)
    return b1, b2, b3


def lambda_tilde_rate_branches(p: ModelParams, cfg: TheoryConfig,
                               d_omega0: float) -> tuple[float, float, float]:
    """The three candidate values whose minimum is the frequency-side rate.

    d_omega0 is the initial frequency diameter of the run under analysis;
    the rate depends on the initial data only, keeping this a pure function.
    """
    eta_val, m_n = _eta_mn(p.n, cfg.c)
    return _lambda_tilde_branches_raw(
        p.n, p.kappa, p.alpha, cfg.d_inf, p.m, eta_val, m_n,
        d_omega0 + p.omega_nat_spread,
    )


def lambda_tilde_rate(p: ModelParams, cfg: TheoryConfig, d_omega0: float) -> float:
    """Frequency-side exponential rate; may be nonpositive when conditions fail."""
    return min(lambda_tilde_rate_branches(p, cfg, d_omega0))


def energy1_coeffs(p: ModelParams, cfg: TheoryConfig) -> tuple[float, float]:
    """Coefficients (on P and on A) of the phase-side energy E1 = Q + cP*P + cA*A."""
    eta_val, m_n = _eta_mn(p.n, cfg.c)
    c_p = eta_val ** 2 * math.sin(cfg.gamma) / (2.0 * p.n * cfg.gamma * m_n) * p.m
    c_a = 2.0 * p.m ** 2
    return c_p, c_a


def energy2_coeffs(p: ModelParams, cfg: TheoryConfig) -> tuple[float, float]:
    """Coefficients (on A and on B) of the frequency-side energy E2 = P + cA*A + cB*B."""
    eta_val, m_n = _eta_mn(p.n, cfg.c)
    c_a = eta_val ** 2 * math.cos(cfg.d_inf + p.alpha) / (2.0 * p.n * m_n) * p.m
    c_b = 2.0 * p.m ** 2
    return c_a, c_b


def energy1(p: ModelParams, s: State, cfg: TheoryConfig) -> float:
    """Phase-side composite energy at one state."""
    w = make_weights(cfg.c, p.n)
    c_p, c_a = energy1_coeffs(p, cfg)
    return (spread(s.theta, w)
            + c_p * spread(s.omega, w)
            + c_a * spread(acceleration(p, s), w))


def energy2(p: ModelParams, s: State, cfg: TheoryConfig) -> float:
    """Frequency-side composite energy at one state."""
    w = make_weights(cfg.c, p.n)
    c_a, c_b = energy2_coeffs(p, cfg)
    return (spread(s.omega, w)
            + c_a * spread(acceleration(p, s), w)
            + c_b * spread(jerk(p, s), w))


def _structural_c_bound(n: int, gamma: float, d_inf: float, alpha: float) -> float:
    """Lower bound on c from the cone angle and the quarter-circle cosine."""
    b1 = n * gamma / math.sin(gamma)
    cda = math.cos(d_inf + alpha)
    if cda <= 0:
        raise InfeasibleError(
            f"d_inf + alpha = {d_inf + alpha:g} reaches a quarter circle; "
            "the constraint d_inf + alpha < pi/2 cannot hold"
        )
    return max(b1, n / cda)


def auto_select_c(p: ModelParams, gamma: float, d_inf: float, epsilon: float,
                  d_theta0: float) -> int:
    """Smallest integer c > 2 compatible with the weight-construction constraints.

    Requires c > max(N*gamma/sin(gamma), N/cos(d_inf + alpha)) and
    d_theta0 < (1 - 4/(c+2)) * (1 - epsilon) * gamma. Raises InfeasibleError,
    naming the violated inequality, when no integer can satisfy the second
    constraint (i.e. d_theta0 >= (1 - epsilon) * gamma).
    """
    if not 0 < gamma < math.pi:
        raise ValueError(f"gamma must lie in (0, pi), got {gamma}")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    target = (1.0 - epsilon) * gamma
    if not d_theta0 < target:
        raise InfeasibleError(
            f"initial phase diameter {d_theta0:g} >= (1 - epsilon)*gamma = {target:g}; "
            "no c satisfies the initial-spread inequality"
        )
    bound = _structural_c_bound(p.n, gamma, d_inf, p.alpha)
    # Closed-form start for the spread constraint: eta(c) > d_theta0/target.
    ratio = d_theta0 / target
    c_spread = 4.0 / (1.0 - ratio) - 2.0 if ratio > 0 else 2.0
    c = max(3, math.floor(bound) + 1, math.floor(c_spread) + 1)
    while not d_theta0 < eta(c) * target:  # float safety; at most a few bumps
        c += 1
    return c


def check_conditions(p: ModelParams, init: State, cfg: TheoryConfig) -> ConditionReport:
    """Evaluate the full sufficient-condition set on initial data, with margins.

    Margins are signed distances LHS - RHS of each strict inequality in
    canonical LHS < RHS form, so negative margins pass. Strictness is checked
    with exact floating-point comparison and no tolerance; the margins expose
    near-ties.
    """
    n = p.n
    eta_val, m_n = _eta_mn(n, cfg.c)
    d_theta0 = diameter(init.theta)
    d_omega0 = diameter(init.omega)
    d_a0 = diameter(acceleration(p, init))
    d_om = p.omega_nat_spread
    sg = math.sin(cfg.gamma)
    cda = math.cos(cfg.d_inf + p.alpha)
    lam = lambda_rate(p, cfg)
    lam_tilde = lambda_tilde_rate(p, cfg, d_omega0)
    forcing = d_om + 2.0 * n * p.kappa * math.sin(p.alpha)

    def cond(margin: float) -> Condition:
        return Condition(passed=margin < 0, margin=margin)

    gamma_bound = cond(max(d_theta0 - cfg.gamma, cfg.gamma - math.pi))

    bound2 = n / cda if cda > 0 else math.inf
    c_lower = cond(max(n * cfg.gamma / sg, bound2) - cfg.c)

    target = eta_val * (1.0 - cfg.epsilon) * cfg.gamma
    c_initial = cond(d_theta0 - target)

    quarter_circle = cond((cfg.d_inf + p.alpha) - math.pi / 2)

    mk1_rhs = eta_val ** 3 / (8.0 * n * n * m_n) * min(sg / cfg.gamma, cda)
    mk_con1 = cond(p.m * p.kappa - mk1_rhs)

    c_p, c_a = energy1_coeffs(p, cfg)
    mk2_lhs = d_theta0 + c_p * d_omega0 + c_a * d_a0
    mk_con2 = cond(max(mk2_lhs - target, target - math.pi))

    mk3_rhs = min((1.0 - cfg.epsilon) * cfg.gamma, cfg.d_inf / 2.0)
    if lam > 0:
        mk_con3 = cond(2.0 * forcing / (eta_val * lam) - mk3_rhs)
        entrance_bound = cond(4.0 * forcing / (eta_val * lam) - cfg.d_inf)
    else:
        # Nonpositive rate: no decay budget, the entrance inequalities cannot hold.
        mk_con3 = Condition(passed=False, margin=math.inf)
        entrance_bound = Condition(passed=False, margin=math.inf)

    mk4_lhs = 4.0 * n * p.m * m_n * (d_omega0 + d_om) + 8.0 * n * n * p.m * p.kappa * m_n
    mk_con4 = cond(mk4_lhs - eta_val ** 2 * cda)

    return ConditionReport(
        gamma_bound=gamma_bound,
        c_lower=c_lower,
        c_initial=c_initial,
        quarter_circle=quarter_circle,
        mk_con1=mk_con1,
        mk_con2=mk_con2,
        mk_con3=mk_con3,
        mk_con4=mk_con4,
        entrance_bound=entrance_bound,
        eta=eta_val,
        m_n=m_n,
        lambda_=lam,
        lambda_tilde=lam_tilde,
        d_a0=d_a0,
        d_theta0=d_theta0,
        d_omega0=d_omega0,
        d_omega_nat=d_om,
    )
