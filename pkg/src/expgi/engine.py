"""Trial simulation and scenario-grid execution.

A trial allocates N participants one at a time under a policy, draws one
exponential outcome per allocation, and tests each experimental arm against
the control at the Bonferroni-corrected level. Replications are keyed by
(seed, replication index) through numpy seed sequences, so every number is
reproducible regardless of worker count or scheduling.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import DegenerateDataError
from .policy import KIND_ER, KIND_GI, PolicySpec, check_k_bounds
from .stats import bonferroni_alpha, exp_ratio_test
from .table import IndexTable, load_bundled_table, lookup_v


def sample_exponential(mean: float, rng) -> float:
    """Inverse-CDF exponential draw: -mean * ln(U), U uniform on (0, 1]."""
    if mean <= 0.0:
        raise ValueError(f"mean must be positive, got {mean}")
    return -mean * math.log1p(-rng.random())


@dataclass(frozen=True)
class TrialConfig:
    n_total: int
    n_arms: int
    true_means: tuple[float, ...]
    policy: PolicySpec
    family_alpha: float
    replications: int
    seed: int

    def __post_init__(self):
        if self.n_arms < 2:
            raise ValueError(f"need at least 2 arms, got {self.n_arms}")
        if self.n_total < self.n_arms:
            raise ValueError(
                f"horizon N={self.n_total} cannot be below the arm count {self.n_arms}"
            )
        if len(self.true_means) != self.n_arms:
            raise ValueError(
                f"expected {self.n_arms} true means, got {len(self.true_means)}"
            )
        if any(m <= 0.0 for m in self.true_means):
            raise ValueError("all true means must be positive")
        if not 0.0 < self.family_alpha < 1.0:
            raise ValueError(f"family alpha must lie in (0, 1), got {self.family_alpha}")
        if self.replications < 1:
            raise ValueError(f"need at least 1 replication, got {self.replications}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.policy.kind == KIND_GI:
            check_k_bounds(self.policy.k, self.n_arms, self.n_total)


@dataclass(frozen=True)
class TrialResult:
    counts: tuple[int, ...]
    sums: tuple[float, ...]
    estimates: tuple[float, ...]  # per-arm sample means, prior excluded
    rejections: tuple[bool, ...]  # arm m vs control, m = 1 .. M-1


@dataclass(frozen=True)
class OperatingCharacteristics:
    power: float  # fraction of replications rejecting any comparison
    sigma_estimate: tuple[float, ...]  # per-arm std of estimates (index 0 = control)
    rho_superior: float  # mean share allocated to the best arm
    eto_pct_increase: float  # mean % increase of total outcome over the ER expectation
    min_arm_count: int  # smallest final arm count seen in any replication


@lru_cache(maxsize=32)
def _prepared_vtab(table: IndexTable, d: float, n_total: int):
    """Normalized index values v(n, d, 1) for every reachable pseudo-count.

    Index by pseudo-count directly: entries 0 and 1 are unused. With the
    two-observation prior, pseudo-counts run from 2 to n_total + 2.
    """
    vtab = np.full(n_total + 3, np.nan)
    for n in range(2, n_total + 3):
        vtab[n] = lookup_v(table, n, d)
    vtab.setflags(write=False)
    return vtab


def run_trial(
    config: TrialConfig, replication_index: int, table: IndexTable | None = None
) -> TrialResult:
    """Simulate one experiment; fully determined by (config.seed, replication_index)."""
    if not 0 <= replication_index < config.replications:
        raise ValueError(
            f"replication index {replication_index} outside [0, {config.replications})"
        )
    if table is None:
        table = load_bundled_table()
    policy = config.policy
    if policy.kind == KIND_GI:
        code, k = 1, policy.k
        vtab = _prepared_vtab(table, policy.d, config.n_total)
    else:
        code, k = 0, 1
        vtab = _EMPTY_VTAB

    rng = np.random.default_rng(
        np.random.SeedSequence((config.seed, replication_index))
    )
    u = rng.random(2 * config.n_total)
    counts, sums = _kernels.simulate_trial(
        config.n_total,
        np.asarray(config.true_means, dtype=np.float64),
        code,
        k,
        policy.mu_prior,
        vtab,
        u[: config.n_total],
        u[config.n_total :],
    )
    if (counts == 0).any():
        empty = int(np.flatnonzero(counts == 0)[0])
        raise DegenerateDataError(
            f"arm {empty} received no participants in replication "
            f"{replication_index}; estimates and tests are undefined"
        )
    estimates = sums / counts
    cutoff = bonferroni_alpha(config.family_alpha, config.n_arms - 1)
    rejections = tuple(
        exp_ratio_test(float(sums[m]), int(counts[m]), float(sums[0]), int(counts[0]), cutoff).reject
        for m in range(1, config.n_arms)
    )
    return TrialResult(
        counts=tuple(int(c) for c in counts),
        sums=tuple(float(s) for s in sums),
        estimates=tuple(float(e) for e in estimates),
        rejections=rejections,
    )


_EMPTY_VTAB = np.full(3, np.nan)
_EMPTY_VTAB.setflags(write=False)


def aggregate(results: list[TrialResult], config: TrialConfig) -> OperatingCharacteristics:
    """Reduce replications of one scenario cell to operating characteristics."""
    if not results:
        raise ValueError("no results to aggregate")
    counts = np.array([r.counts for r in results], dtype=np.float64)
    sums = np.array([r.sums for r in results], dtype=np.float64)
    estimates = np.array([r.estimates for r in results], dtype=np.float64)
    rejections = np.array([r.rejections for r in results], dtype=bool)

    power = float(rejections.any(axis=1).mean())
    if len(results) > 1:
        sigma = tuple(float(s) for s in estimates.std(axis=0, ddof=1))
    else:
        sigma = tuple(0.0 for _ in range(config.n_arms))

    best = max(config.true_means)
    tied = [m for m, mu in enumerate(config.true_means) if mu == best]
    rho = float(counts[:, tied].mean(axis=1).mean() / config.n_total)

    er_expectation = (config.n_total / config.n_arms) * sum(config.true_means)
    eto = float(((sums.sum(axis=1) / er_expectation - 1.0) * 100.0).mean())

    return OperatingCharacteristics(
        power=power,
        sigma_estimate=sigma,
        rho_superior=rho,
        eto_pct_increase=eto,
        min_arm_count=int(counts.min()),
    )


@dataclass(frozen=True)
class ScenarioCell:
    index: int
    scenario_id: str
    true_means: tuple[float, ...]
    policy: PolicySpec
    seed: int  # derived from (root seed, cell index); reruns the cell alone


@dataclass(frozen=True)
class ScenarioGrid:
    n_total: int
    n_arms: int
    family_alpha: float
    replications: int
    root_seed: int
    cells: tuple[ScenarioCell, ...]


def derive_cell_seed(root_seed: int, cell_index: int) -> int:
    """Stable per-cell seed from the splittable root sequence."""
    ss = np.random.SeedSequence((root_seed, cell_index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_grid(
    n_total: int,
    n_arms: int,
    mean_vectors,
    designs,
    family_alpha: float,
    replications: int,
    root_seed: int,
) -> ScenarioGrid:
    """Enumerate (means, design) cells with derived per-cell seeds.

    Designs iterate fastest, matching one results row per (scenario, design).
    """
    cells = []
    index = 0
    for means in mean_vectors:
        for policy in designs:
            cells.append(
                ScenarioCell(
                    index=index,
                    scenario_id=f"{n_arms}arm-{index:03d}",
                    true_means=tuple(means),
                    policy=policy,
                    seed=derive_cell_seed(root_seed, index),
                )
            )
            index += 1
    return ScenarioGrid(
        n_total=n_total,
        n_arms=n_arms,
        family_alpha=family_alpha,
        replications=replications,
        root_seed=root_seed,
        cells=tuple(cells),
    )


def cell_config(grid: ScenarioGrid, cell: ScenarioCell) -> TrialConfig:
    return TrialConfig(
        n_total=grid.n_total,
        n_arms=grid.n_arms,
        true_means=cell.true_means,
        policy=cell.policy,
        family_alpha=grid.family_alpha,
        replications=grid.replications,
        seed=cell.seed,
    )


def run_cell(
    grid: ScenarioGrid, cell: ScenarioCell, table: IndexTable | None = None
) -> OperatingCharacteristics:
    """All replications of one cell, reduced."""
    config = cell_config(grid, cell)
    try:
        results = [
            run_trial(config, rep, table) for rep in range(config.replications)
        ]
        return aggregate(results, config)
    except Exception as exc:
        raise type(exc)(f"cell {cell.scenario_id} ({cell.policy.label}): {exc}") from exc


def _run_cell_args(args):
    return run_cell(*args)


def run_scenario_grid(
    grid: ScenarioGrid, table: IndexTable | None = None, workers: int = 1
) -> list[tuple[ScenarioCell, OperatingCharacteristics]]:
    """Run every cell; output is independent of worker count and scheduling."""
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if table is None:
        table = load_bundled_table()
    if workers == 1 or len(grid.cells) == 1:
        return [(cell, run_cell(grid, cell, table)) for cell in grid.cells]
    tasks = [(grid, cell, table) for cell in grid.cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        characteristics = list(pool.map(_run_cell_args, tasks))
    return list(zip(grid.cells, characteristics))
