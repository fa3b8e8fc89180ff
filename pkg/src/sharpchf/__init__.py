"""Sharp constants for Taylor-remainder bounds on characteristic functions."""

from .constants import (
    CriticalConstants,
    QEvaluation,
    critical_constants,
    lambda_lower,
    lambda_upper,
    q,
    q_min,
    theta_n,
)
from .distributions import (
    DiscreteDistribution,
    MomentProfile,
    chf,
    moments,
    random_law,
    standardize,
    symmetric_three_point,
)
from .exceptions import DegenerateDistributionError, DomainError, PreconditionError
from .moment_bounds import GammaResult, TwoPointLaw, big_a, extremal_two_point, gamma, table1
from .remainder import normalized_deviation, prawitz_residual, remainder, tail_bound
from .verifier import BoundReport, q_oracle

__version__ = "0.1.0"
