"""Per-arm Bayesian state under the two-pseudo-observation prior.

Each arm starts with 2 pseudo-observations averaging the prior mean, so the
prior carries the same weight as two real participants. The cached index is
recomputed only when the arm itself receives an observation; in between it
stays bit-identical, which is exactly the staleness the allocation rule
relies on.
"""

from dataclasses import dataclass

from .table import IndexTable, gi_value

PRIOR_PSEUDO_COUNT = 2


@dataclass(frozen=True)
class ArmState:
    pseudo_n: int  # 2 (prior) + number of real observations
    total_sum: float  # real outcome sum plus the prior pseudo-sum 2*mu_prior
    allocated: int  # real participants allocated to this arm
    cached_gi: float  # index value; stale until the arm is next observed


def init_arm(mu_prior: float, table: IndexTable, d: float) -> ArmState:
    """Fresh arm state carrying only the prior's two pseudo-observations."""
    if mu_prior <= 0.0:
        raise ValueError(f"prior mean must be positive, got {mu_prior}")
    total = PRIOR_PSEUDO_COUNT * mu_prior
    return ArmState(
        pseudo_n=PRIOR_PSEUDO_COUNT,
        total_sum=total,
        allocated=0,
        cached_gi=gi_value(table, PRIOR_PSEUDO_COUNT, d, mu_prior),
    )


def observe(state: ArmState, outcome: float, table: IndexTable, d: float) -> ArmState:
    """Fold one observed outcome into the arm and refresh its cached index."""
    if outcome < 0.0:
        raise ValueError(f"outcomes are non-negative, got {outcome}")
    pseudo_n = state.pseudo_n + 1
    total = state.total_sum + outcome
    return ArmState(
        pseudo_n=pseudo_n,
        total_sum=total,
        allocated=state.allocated + 1,
        cached_gi=gi_value(table, pseudo_n, d, total / pseudo_n),
    )


def posterior_mean(state: ArmState) -> float:
    """Posterior mean outcome: total pseudo-sum over pseudo-count."""
    return state.total_sum / state.pseudo_n
