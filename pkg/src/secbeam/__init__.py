"""Planner and Monte Carlo verifier for secure two-stage relay beamforming
in large Poisson wireless networks."""

from .geometry import NetworkConfig
from .planner import Plan, SecrecyTarget, InfeasiblePlanError, plan, validate_plan
from .montecarlo import OutageReport, TrialOutcome, estimate_outage, run_trial

__all__ = [
    "NetworkConfig", "Plan", "SecrecyTarget", "InfeasiblePlanError",
    "plan", "validate_plan", "OutageReport", "TrialOutcome",
    "estimate_outage", "run_trial",
]

__version__ = "0.1.0"
