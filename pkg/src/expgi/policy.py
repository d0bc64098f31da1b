"""Allocation rules: equal randomisation and the constrained GI policy.

The constrained GI rule guarantees each arm at least floor(t/k) of the
first t participants. Whenever some arm falls below that threshold, the
next participant goes to the least-allocated arm; otherwise to the arm
with the highest cached index. All ties break uniformly at random, which
keeps the arms exchangeable under the null.
"""

from dataclasses import dataclass

from .arms import ArmState

KIND_ER = "ER"
KIND_GI = "GI"


@dataclass(frozen=True)
class PolicySpec:
    """Allocation design: ER, or constrained GI with factor k.

    d and mu_prior configure the index computation and are ignored by ER.
    """

    kind: str
    d: float
    mu_prior: float
    k: int | None = None

    def __post_init__(self):
        if self.kind not in (KIND_ER, KIND_GI):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if not 0.0 <= self.d < 1.0:
            raise ValueError(f"discount must lie in [0, 1), got {self.d}")
        if self.mu_prior <= 0.0:
            raise ValueError(f"prior mean must be positive, got {self.mu_prior}")
        if self.kind == KIND_GI:
            if self.k is None or self.k < 1:
                raise ValueError("constrained GI needs a positive integer k")
        elif self.k is not None:
            raise ValueError("k is only meaningful for the GI policy")

    @property
    def label(self) -> str:
        return KIND_ER if self.kind == KIND_ER else f"GI(k={self.k})"


def check_k_bounds(k: int, n_arms: int, n_total: int) -> None:
    """Enforce the conservative constraint-factor bound M <= k <= N/M."""
    if not n_arms <= k <= n_total / n_arms:
        raise ValueError(
            f"constraint factor k={k} violates M <= k <= N/M "
            f"(M={n_arms}, N={n_total}, N/M={n_total / n_arms:g})"
        )


def er_select(n_arms: int, rng) -> int:
    """Uniform arm choice consuming exactly one draw from the stream."""
    if n_arms < 2:
        raise ValueError(f"need at least 2 arms, got {n_arms}")
    return int(rng.random() * n_arms)


def deficient_arms(counts, t: int, k: int) -> list[int]:
    """Arms holding fewer than floor(t/k) of the t allocated participants."""
    threshold = t // k
    return [m for m, c in enumerate(counts) if c < threshold]


def gi_select(states: list[ArmState], t: int, spec: PolicySpec, rng) -> int:
    """Next arm under the constrained GI rule.

    If any arm is below its guaranteed share, the least-allocated arm is
    corrected first; otherwise the highest cached index wins. A tie-break
    draw is consumed only when there is an actual tie.
    """
    if not states:
        raise ValueError("no arms")
    if spec.kind != KIND_GI:
        raise ValueError("gi_select requires a constrained GI policy spec")
    counts = [s.allocated for s in states]
    if deficient_arms(counts, t, spec.k):
        best = min(counts)
        candidates = [m for m, c in enumerate(counts) if c == best]
    else:
        top = max(s.cached_gi for s in states)
        candidates = [m for m, s in enumerate(states) if s.cached_gi == top]
    if len(candidates) == 1:
        return candidates[0]
    return candidates[int(rng.random() * len(candidates))]
