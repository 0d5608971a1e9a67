from .approx import approx_expectation, approx_moments
from .gibbs import gibbs_expectation, gibbs_moments
from .truncnorm import TruncMoment, trunc_normal_moments

__all__ = [
    "TruncMoment",
    "approx_expectation",
    "approx_moments",
    "gibbs_expectation",
    "gibbs_moments",
    "trunc_normal_moments",
]
