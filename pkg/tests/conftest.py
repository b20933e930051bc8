import math

import pytest

from secbeam.geometry import NetworkConfig
from secbeam.planner import SecrecyTarget, plan


# reference operating point used across the suite: unit power, mu=0.5,
# free-space exponent, receiver at distance 5, half-bit secure rate with a
# generous outage allowance
REFERENCE_KWARGS = dict(p_t=1.0, mu=0.5, gamma=2.0, d_tr=5.0)


@pytest.fixture(scope="session")
def reference_target():
    return SecrecyTarget(secure_rate=0.5, outage=0.35, rho=1.0, kappa=1.0)


@pytest.fixture(scope="session")
def reference_plan(reference_target):
    probe = NetworkConfig(lambda_l=1.0, lambda_e=0.0, n_legit=1, **REFERENCE_KWARGS)
    return plan(probe, reference_target)


@pytest.fixture(scope="session")
def reference_config(reference_plan):
    """Simulation config at the plan's extreme densities; side fixed at 20 so
    the square contains both the protected disc and the receiver."""
    p = reference_plan
    side = 20.0
    return NetworkConfig(lambda_l=p.lambda_l_min, lambda_e=p.lambda_e_max,
                         n_legit=math.ceil(p.lambda_l_min * side * side),
                         **REFERENCE_KWARGS)
