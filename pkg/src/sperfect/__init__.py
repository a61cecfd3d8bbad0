"""Exact tools for S-perfect numbers: integers n with 1 + sum(l_j d_j) = n over
the divisors 1 < d_j < |n|, each weight l_j drawn from a fixed finite set S."""

from .arith import divisor_profile, factorize, is_abundant, is_prime, sigma, sigma_sieve
from .errors import (
    CacheFormatError,
    DomainError,
    EnumerationError,
    ResourceError,
    SearchExhausted,
    StructuralError,
)
from .presentation import (
    CoefficientSet,
    Kind,
    PresentationWitness,
    SearchConfig,
    SolveOutcome,
    Status,
    is_sperfect,
    solve,
    verify,
)
from .sequences import GOLDEN, EnumerationJob, crosscheck_golden, enumerate_members

__version__ = "0.1.0"
