"""Exact analysis of the multiple-stopping odds problem.

Threshold strategies on independent Bernoulli sequences, their exact win
probabilities, optimal threshold search, and the asymptotic lower-bound
constants (lambda_1, ..., lambda_m).
"""

from .errors import BudgetExceededError, InvalidInputError, MultistopError
from .lambda_solver import (
    LambdaSolution,
    cumulative_lambda,
    lower_bound,
    solve_lambda_dp,
    solve_lambda_naive,
)
from .numerics import Rational, exp_neg, rat_parse, rat_to_decimal, rat_to_string
from .optimizer import optimal_dp, optimal_exhaustive, optimal_ola
from .patterns import enumerate_xi, enumerate_xi_hat, is_winning_pattern, xi_count
from .strategy import (
    OddsSequence,
    ThresholdVector,
    block_partition,
    simulate_threshold_run,
    win_probability,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "InvalidInputError",
    "LambdaSolution",
    "MultistopError",
    "OddsSequence",
    "Rational",
    "ThresholdVector",
    "block_partition",
    "cumulative_lambda",
    "enumerate_xi",
    "enumerate_xi_hat",
    "exp_neg",
    "is_winning_pattern",
    "lower_bound",
    "optimal_dp",
    "optimal_exhaustive",
    "optimal_ola",
    "rat_parse",
    "rat_to_decimal",
    "rat_to_string",
    "simulate_threshold_run",
    "solve_lambda_dp",
    "solve_lambda_naive",
    "win_probability",
    "xi_count",
]
