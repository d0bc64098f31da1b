"""Exact tests for exponential mean ratios via the F distribution.

For n exponential outcomes with mean mu, twice their sum over mu is
chi-squared with 2n degrees of freedom, so under equal means the ratio of
group sample means follows F(2*n1, 2*n0). The two-sided p-value doubles
the smaller tail.
"""

import math
from dataclasses import dataclass

from . import _kernels
from .errors import DegenerateDataError


@dataclass(frozen=True)
class TestResult:
    f_stat: float
    df1: int
    df2: int
    p_value: float
    reject: bool


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    result = _kernels.reg_inc_beta(x, a, b)
    if math.isnan(result):
        raise ArithmeticError(
            f"incomplete beta continued fraction did not converge for x={x}, a={a}, b={b}"
        )
    return result


def f_cdf(f: float, df1: int, df2: int) -> float:
    """CDF of the F distribution with df1, df2 degrees of freedom."""
    if f < 0.0:
        raise ValueError(f"F statistic must be non-negative, got {f}")
    if df1 < 1 or df2 < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got ({df1}, {df2})")
    x = df1 * f / (df1 * f + df2)
    return reg_inc_beta(x, df1 / 2.0, df2 / 2.0)


def exp_ratio_test(
    sum1: float, n1: int, sum0: float, n0: int, cutoff: float
) -> TestResult:
    """Two-sided test of equal exponential means from group sums and sizes.

    Group 1 is the comparison arm, group 0 the reference (control). The
    statistic is the ratio of sample means, referred to F(2*n1, 2*n0).
    """
    if n1 < 1 or n0 < 1:
        raise DegenerateDataError(
            f"both groups need at least one observation, got n1={n1}, n0={n0}"
        )
    if sum1 < 0.0 or sum0 < 0.0:
        raise ValueError("outcome sums cannot be negative")
    if sum0 == 0.0:
        raise DegenerateDataError(
            "reference group sum is zero; the mean ratio is undefined"
        )
    if not 0.0 < cutoff < 1.0:
        raise ValueError(f"significance cutoff must lie in (0, 1), got {cutoff}")
    f_stat = (sum1 / n1) / (sum0 / n0)
    df1 = 2 * n1
    df2 = 2 * n0
    lower = f_cdf(f_stat, df1, df2)
    p_value = 2.0 * min(lower, 1.0 - lower)
    return TestResult(
        f_stat=f_stat,
        df1=df1,
        df2=df2,
        p_value=p_value,
        reject=p_value < cutoff,
    )


def bonferroni_alpha(family_alpha: float, comparisons: int) -> float:
    """Per-comparison significance level keeping the family-wise rate."""
    if comparisons < 1:
        raise ValueError(f"need at least one comparison, got {comparisons}")
    return family_alpha / comparisons
