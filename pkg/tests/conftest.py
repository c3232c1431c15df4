"""Shared fixtures: the documented three-ring demo configuration and its reference run."""

import numpy as np
import pytest

from inertial_kuramoto import (
    Digraph,
    IntegratorConfig,
    ModelParams,
    State,
    TheoryConfig,
    simulate,
)

# Mean-centered phases with gaps (0.5, 0.533): D_theta(0) = 1.0330. Centering
# exploits the common-phase-shift invariance to keep |theta| small, preserving
# float resolution of the jerk diagnostics at m = 1e-5.
RING3_THETA0 = np.array([-0.5165, -0.0165, 0.5165])
RING3_OMEGA0 = np.array([-0.3, -0.1, 0.3080])
RING3_OMEGA_NAT = np.array([-7.5e-5, 0.0, 7.5e-5])


@pytest.fixture(scope="session")
def ring3() -> Digraph:
    return Digraph.ring(3)


@pytest.fixture(scope="session")
def demo_params(ring3) -> ModelParams:
    """Three-ring demo: kappa=1, m=1e-5, alpha=1e-5, D_Omega=1.5e-4."""
    return ModelParams(m=1e-5, kappa=1.0, alpha=1e-5,
                       omega_nat=RING3_OMEGA_NAT, graph=ring3)


@pytest.fixture(scope="session")
def demo_init() -> State:
    """Explicit initials with D_theta(0)=1.0330 and D_omega(0)=0.6080."""
    return State(t=0.0, theta=RING3_THETA0, omega=RING3_OMEGA0)


@pytest.fixture(scope="session")
def demo_theory() -> TheoryConfig:
    return TheoryConfig(gamma=1.8955, d_inf=0.4, epsilon=1e-3, c=7)


@pytest.fixture(scope="session")
def demo_run(demo_params, demo_init):
    """Reference run of the demo: 6e6 steps at dt = m/4, ~15000 samples."""
    cfg = IntegratorConfig(dt=2.5e-6, t_end=15.0, record_stride=400)
    return simulate(demo_params, demo_init, cfg)


@pytest.fixture()
def mild_params(ring3) -> ModelParams:
    """Same ring with m=1e-3: cheap to integrate, far from the jerk noise floor."""
    return ModelParams(m=1e-3, kappa=1.0, alpha=1e-5,
                       omega_nat=RING3_OMEGA_NAT, graph=ring3)
