"""Exact metric-distortion analysis of ranked voting rules.

The submodules cover profiles and metrics, the voting rules, the adversary's
linear program, flow certificates, the matching-based comparison graph, the
constraint-choice graph search, and instance generators.
"""

from .distortion import lp_optimal_winner, opt_dist, w_opt_dist, worst_case_metric
from .profile import PseudoMetric, VoteProfile, parse_metric, parse_profile

__all__ = [
    "PseudoMetric",
    "VoteProfile",
    "lp_optimal_winner",
    "opt_dist",
    "parse_metric",
    "parse_profile",
    "w_opt_dist",
    "worst_case_metric",
]
__version__ = "0.1.0"
