import pytest

from expgi.errors import TableQueryError
from expgi.oracle import (
    OracleConfig,
    approx_index,
    format_report,
    refined,
    retirement_rate,
    validate_table,
    write_validation_csv,
)
from expgi.table import IndexTable


@pytest.fixture(scope="module")
def cfg09():
    return OracleConfig.for_discount(0.9)


@pytest.fixture(scope="module")
def values09(cfg09):
    return {n: approx_index(n, cfg09) for n in (2, 3, 5, 10, 20, 30)}


class TestOracleConfig:
    def test_horizon_must_truncate(self):
        with pytest.raises(ValueError, match="truncation"):
            OracleConfig(d=0.9, horizon=10)

    def test_for_discount_satisfies_invariant(self):
        for d in (0.5, 0.9, 0.99):
            cfg = OracleConfig.for_discount(d)
            assert cfg.d**cfg.horizon < cfg.truncation_tol


class TestApproxIndex:
    def test_small_discount_anchor(self):
        # as d -> 0 the index collapses to the one-step predictive mean
        # n/(n-1); at d = 0.001 the residual learning premium is ~5e-4
        cfg = OracleConfig(d=0.001, horizon=4, truncation_tol=1e-9)
        for n in (2, 3, 5, 10):
            v = approx_index(n, cfg)
            assert v == pytest.approx(n / (n - 1), abs=2e-3)
            assert v >= n / (n - 1) - 1e-6

    def test_at_least_one_and_above_predictive_floor(self, values09):
        for n, v in values09.items():
            assert v >= 1.0
            assert v >= n / (n - 1) - 1e-6

    def test_monotone_non_increasing_in_n(self, values09, cfg09):
        ordered = [values09[n] for n in sorted(values09)]
        assert all(a >= b for a, b in zip(ordered, ordered[1:]))

    def test_monotone_non_decreasing_in_d(self):
        for n in (2, 5, 10):
            vals = [
                approx_index(n, OracleConfig.for_discount(d))
                for d in (0.5, 0.7, 0.9)
            ]
            assert vals[0] <= vals[1] <= vals[2]

    def test_large_n_limit(self, cfg09):
        v = approx_index(200, cfg09)
        assert 1.0 <= v <= 1.02

    def test_grid_refinement_stability(self, cfg09, values09):
        for n in (2, 10):
            fine = approx_index(n, refined(cfg09))
            assert abs(fine - values09[n]) < cfg09.bisection_tol
        cfg05 = OracleConfig.for_discount(0.5)
        assert abs(
            approx_index(5, refined(cfg05)) - approx_index(5, cfg05)
        ) < cfg05.bisection_tol

    def test_scaling_consistency(self, cfg09):
        base = retirement_rate(5, cfg09)
        for c in (0.25, 3.0, 40.0):
            scaled = retirement_rate(5, cfg09, pseudo_sum=5.0 * c)
            assert scaled == pytest.approx(c * base, rel=1e-9)

    def test_too_few_pseudo_observations(self, cfg09):
        with pytest.raises(ValueError):
            approx_index(1, cfg09)


class TestValidateTable:
    def test_self_comparison_is_exact(self, cfg09, values09):
        ns = tuple(sorted(values09))
        own = IndexTable(
            discounts=(0.9,),
            counts=(ns,),
            values=(tuple(values09[n] for n in ns),),
        )
        report = validate_table(own, cfg09, rel_tol=1e-12, n_max=30)
        assert report.max_rel_deviation == 0.0
        assert report.passed

    def test_perturbed_entry_flagged_as_worst(self, cfg09, values09):
        ns = tuple(sorted(values09))
        vals = [values09[n] for n in ns]
        vals[2] *= 1.10  # +10% fault at the third knot
        # renormalize neighbours so the injected table still loads as monotone
        perturbed = IndexTable(discounts=(0.9,), counts=(ns,), values=(tuple(vals),))
        report = validate_table(perturbed, cfg09, rel_tol=0.02, n_max=30)
        assert not report.passed
        assert report.worst_n == ns[2]
        assert report.max_rel_deviation == pytest.approx(0.10 / 1.10, rel=1e-6)

    def test_missing_discount_is_error(self, table):
        cfg = OracleConfig.for_discount(0.42)
        with pytest.raises(TableQueryError):
            validate_table(table, cfg, rel_tol=0.02)

    def test_report_rendering_and_csv(self, cfg09, values09, tmp_path):
        ns = tuple(sorted(values09))
        own = IndexTable(
            discounts=(0.9,),
            counts=(ns,),
            values=(tuple(values09[n] for n in ns),),
        )
        report = validate_table(own, cfg09, rel_tol=0.02, n_max=30)
        text = format_report(report)
        assert "PASS" in text and "0.9" in text
        out = tmp_path / "dev.csv"
        write_validation_csv(report, out)
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "n,discount,table_value,oracle_value,rel_deviation"
        assert len(lines) == 1 + len(ns)
