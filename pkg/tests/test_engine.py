import math

import numpy as np
import pytest

from expgi.arms import init_arm, observe
from expgi.engine import (
    OperatingCharacteristics,
    TrialConfig,
    TrialResult,
    aggregate,
    make_grid,
    run_scenario_grid,
    run_trial,
    sample_exponential,
)
from expgi.errors import DegenerateDataError
from expgi.policy import PolicySpec, gi_select
from expgi.stats import bonferroni_alpha, exp_ratio_test

ER = PolicySpec(kind="ER", d=0.99, mu_prior=0.5)
GI5 = PolicySpec(kind="GI", d=0.99, mu_prior=0.5, k=5)


def config(means=(0.5, 0.9), policy=GI5, reps=50, seed=404, n=100, alpha=0.05):
    return TrialConfig(
        n_total=n,
        n_arms=len(means),
        true_means=tuple(means),
        policy=policy,
        family_alpha=alpha,
        replications=reps,
        seed=seed,
    )


class _FixedU:
    """Stub stream returning a preset value, for driving pure-path selectors."""

    def __init__(self):
        self.value = 0.0

    def random(self):
        return self.value


def run_trial_pure(cfg: TrialConfig, rep: int, table) -> TrialResult:
    """Reference trial built from the ArmState/policy surface only.

    Consumes the identical indexed uniforms as the kernel, so results must
    match the fast path bit for bit.
    """
    rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, rep)))
    u = rng.random(2 * cfg.n_total)
    u_sel, u_out = u[: cfg.n_total], u[cfg.n_total :]
    n_arms = cfg.n_arms
    stub = _FixedU()
    counts = [0] * n_arms
    sums = [0.0] * n_arms
    if cfg.policy.kind == "GI":
        states = [init_arm(cfg.policy.mu_prior, table, cfg.policy.d) for _ in range(n_arms)]
    for t in range(cfg.n_total):
        if cfg.policy.kind == "ER":
            arm = int(u_sel[t] * n_arms)
        else:
            stub.value = u_sel[t]
            arm = gi_select(states, t, cfg.policy, stub)
        y = -cfg.true_means[arm] * math.log1p(-u_out[t])
        counts[arm] += 1
        sums[arm] += y
        if cfg.policy.kind == "GI":
            states[arm] = observe(states[arm], y, table, cfg.policy.d)
    cutoff = bonferroni_alpha(cfg.family_alpha, n_arms - 1)
    rejections = tuple(
        exp_ratio_test(sums[m], counts[m], sums[0], counts[0], cutoff).reject
        for m in range(1, n_arms)
    )
    return TrialResult(
        counts=tuple(counts),
        sums=tuple(sums),
        estimates=tuple(s / c for s, c in zip(sums, counts)),
        rejections=rejections,
    )


class TestSampleExponential:
    def test_inverse_cdf_arithmetic(self):
        stub = _FixedU()
        stub.value = 0.5  # U = 1 - 0.5 = 0.5 -> mean * ln 2
        assert sample_exponential(2.0, stub) == pytest.approx(2.0 * math.log(2.0), rel=1e-15)

    def test_moments(self):
        rng = np.random.default_rng(606)
        draws = np.fromiter(
            (sample_exponential(0.5, rng) for _ in range(1_000_000)),
            dtype=np.float64,
            count=1_000_000,
        )
        assert draws.min() > 0.0
        assert abs(draws.mean() - 0.5) < 0.002
        assert abs(draws.var() - 0.25) < 0.01

    def test_scaling_with_identical_streams(self):
        r1, r2 = np.random.default_rng(12), np.random.default_rng(12)
        xs = [sample_exponential(0.4, r1) for _ in range(100)]
        ys = [sample_exponential(0.8, r2) for _ in range(100)]
        for x, y in zip(xs, ys):
            assert y == pytest.approx(2.0 * x, rel=1e-15)

    def test_nonpositive_mean_rejected(self):
        with pytest.raises(ValueError):
            sample_exponential(0.0, np.random.default_rng(0))


class TestRunTrial:
    def test_counts_sum_to_horizon(self, table):
        for policy in (ER, GI5):
            r = run_trial(config(policy=policy), 0, table)
            assert sum(r.counts) == 100

    def test_deterministic_in_seed_and_rep(self, table):
        cfg = config()
        assert run_trial(cfg, 3, table) == run_trial(cfg, 3, table)
        assert run_trial(cfg, 3, table) != run_trial(cfg, 4, table)

    def test_matches_pure_armstate_policy_path(self, table):
        # the jitted allocation loop and the readable ArmState/policy surface
        # must produce bit-identical trials
        cases = [
            config(policy=GI5, means=(0.5, 0.9)),
            config(policy=GI5, means=(0.5, 0.5)),
            config(policy=PolicySpec(kind="GI", d=0.9, mu_prior=0.25, k=9), means=(0.4, 0.1, 1.0)),
            config(policy=PolicySpec(kind="GI", d=0.99, mu_prior=0.5, k=50)),
            config(policy=ER, means=(0.3, 0.6, 0.9)),
        ]
        for cfg in cases:
            for rep in range(25):
                fast = run_trial(cfg, rep, table)
                ref = run_trial_pure(cfg, rep, table)
                assert fast == ref

    def test_er_counts_binomial_moments(self, table):
        cfg = config(policy=ER, means=(0.5, 0.5), reps=3000, seed=11)
        counts = np.array(
            [run_trial(cfg, i, table).counts[0] for i in range(cfg.replications)]
        )
        assert abs(counts.mean() - 50.0) < 0.5
        assert abs(counts.var(ddof=1) - 25.0) < 3.0

    def test_gi_k5_superior_count_capped(self, table):
        # floor-threshold catch-up guarantees the inferior arm 19 of 100
        cfg = config(policy=GI5, means=(0.5, 0.9), reps=3000, seed=17)
        top = max(
            run_trial(cfg, i, table).counts[1] for i in range(cfg.replications)
        )
        assert top <= 81

    def test_rejection_flag_consistent_with_test(self, table):
        cfg = config(reps=20, seed=5)
        for rep in range(20):
            r = run_trial(cfg, rep, table)
            expected = exp_ratio_test(r.sums[1], r.counts[1], r.sums[0], r.counts[0], 0.05)
            assert r.rejections == (expected.reject,)

    def test_bad_replication_index(self, table):
        with pytest.raises(ValueError):
            run_trial(config(reps=5), 5, table)


class TestAggregate:
    def test_eto_zero_when_outcomes_equal_means_at_even_split(self):
        cfg = config(means=(0.5, 0.9), reps=1)
        r = TrialResult(
            counts=(50, 50),
            sums=(25.0, 45.0),
            estimates=(0.5, 0.9),
            rejections=(False,),
        )
        oc = aggregate([r], cfg)
        assert oc.eto_pct_increase == 0.0

    def test_eto_formula_all_on_superior(self):
        # every participant on the 0.9 arm with outcomes exactly 0.9
        cfg = config(means=(0.5, 0.9), reps=1)
        r = TrialResult(
            counts=(0, 100),
            sums=(0.0, 90.0),
            estimates=(math.nan, 0.9),
            rejections=(False,),
        )
        oc = aggregate([r], cfg)
        assert oc.eto_pct_increase == pytest.approx((90.0 / 70.0 - 1.0) * 100.0, rel=1e-12)

    def test_power_boundaries(self):
        cfg = config(reps=3)
        all_reject = [
            TrialResult((50, 50), (25.0, 45.0), (0.5, 0.9), (True,)) for _ in range(3)
        ]
        none_reject = [
            TrialResult((50, 50), (25.0, 45.0), (0.5, 0.9), (False,)) for _ in range(3)
        ]
        assert aggregate(all_reject, cfg).power == 1.0
        assert aggregate(none_reject, cfg).power == 0.0

    def test_rho_superior_tie_rule(self):
        cfg = config(means=(0.5, 0.5), reps=1)
        r = TrialResult((30, 70), (15.0, 35.0), (0.5, 0.5), (False,))
        oc = aggregate([r], cfg)
        # tied superior arms average their shares: (0.3 + 0.7) / 2
        assert oc.rho_superior == pytest.approx(0.5, rel=1e-15)

    def test_sigma_and_min_count(self):
        cfg = config(means=(0.5, 0.9), reps=2)
        rs = [
            TrialResult((40, 60), (20.0, 54.0), (0.5, 0.9), (False,)),
            TrialResult((60, 40), (30.0, 44.0), (0.5, 1.1), (True,)),
        ]
        oc = aggregate(rs, cfg)
        assert oc.min_arm_count == 40
        assert oc.sigma_estimate[0] == pytest.approx(0.0, abs=1e-15)
        assert oc.sigma_estimate[1] == pytest.approx(np.std([0.9, 1.1], ddof=1), rel=1e-12)
        assert oc.power == 0.5


class TestScenarioGrid:
    def test_single_cell_grid_equals_direct_composition(self, table):
        grid = make_grid(
            n_total=100,
            n_arms=2,
            mean_vectors=[(0.5, 0.9)],
            designs=(GI5,),
            family_alpha=0.05,
            replications=40,
            root_seed=2026,
        )
        [(cell, oc)] = run_scenario_grid(grid, table)
        cfg = TrialConfig(
            n_total=100,
            n_arms=2,
            true_means=(0.5, 0.9),
            policy=GI5,
            family_alpha=0.05,
            replications=40,
            seed=cell.seed,
        )
        direct = aggregate([run_trial(cfg, i, table) for i in range(40)], cfg)
        assert oc == direct

    def test_worker_count_does_not_change_results(self, table):
        grid = make_grid(
            n_total=60,
            n_arms=2,
            mean_vectors=[(0.5, 0.3), (0.5, 0.5), (0.5, 0.8)],
            designs=(ER, GI5),
            family_alpha=0.05,
            replications=60,
            root_seed=99,
        )
        serial = run_scenario_grid(grid, table, workers=1)
        parallel = run_scenario_grid(grid, table, workers=4)
        assert serial == parallel

    def test_cell_errors_are_tagged(self, table):
        # N = M = 2 under ER leaves an arm empty with probability 1/2
        grid = make_grid(
            n_total=2,
            n_arms=2,
            mean_vectors=[(0.5, 0.5)],
            designs=(ER,),
            family_alpha=0.05,
            replications=50,
            root_seed=1,
        )
        with pytest.raises(DegenerateDataError, match="2arm-000"):
            run_scenario_grid(grid, table)

    def test_grid_cell_enumeration(self):
        grid = make_grid(
            n_total=100,
            n_arms=2,
            mean_vectors=[(0.5, m) for m in (0.1, 0.2)],
            designs=(ER, GI5),
            family_alpha=0.05,
            replications=10,
            root_seed=4,
        )
        assert len(grid.cells) == 4
        assert [c.true_means[1] for c in grid.cells] == [0.1, 0.1, 0.2, 0.2]
        assert [c.policy.kind for c in grid.cells] == ["ER", "GI", "ER", "GI"]
        assert len({c.seed for c in grid.cells}) == 4
