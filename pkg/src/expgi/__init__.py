"""Gittins-index adaptive allocation for experiments with exponential rewards.

The package simulates multi-armed experiments that allocate participants
either by equal randomisation or by a constrained Gittins-index rule, tests
arm means with the exact F-ratio test, and aggregates replications into the
standard operating characteristics (power, estimate spread, superior-arm
share, total-outcome gain).
"""

from .arms import ArmState, init_arm, observe, posterior_mean
from .engine import (
    OperatingCharacteristics,
    ScenarioCell,
    ScenarioGrid,
    TrialConfig,
    TrialResult,
    aggregate,
    make_grid,
    run_scenario_grid,
    run_trial,
    sample_exponential,
)
from .errors import (
    ConfigError,
    DegenerateDataError,
    ExpgiError,
    OracleConvergenceError,
    TableLoadError,
    TableQueryError,
)
from .oracle import OracleConfig, approx_index, validate_table
from .policy import PolicySpec, check_k_bounds, deficient_arms, er_select, gi_select
from .stats import TestResult, bonferroni_alpha, exp_ratio_test, f_cdf, reg_inc_beta
from .table import (
    IndexTable,
    bundled_table_path,
    gi_value,
    load_bundled_table,
    load_table,
    lookup_v,
)

__version__ = "0.1.0"

__all__ = [
    "ArmState",
    "ConfigError",
    "DegenerateDataError",
    "ExpgiError",
    "IndexTable",
    "OperatingCharacteristics",
    "OracleConfig",
    "OracleConvergenceError",
    "PolicySpec",
    "ScenarioCell",
    "ScenarioGrid",
    "TableLoadError",
    "TableQueryError",
    "TestResult",
    "TrialConfig",
    "TrialResult",
    "aggregate",
    "approx_index",
    "bonferroni_alpha",
    "bundled_table_path",
    "check_k_bounds",
    "deficient_arms",
    "er_select",
    "exp_ratio_test",
    "f_cdf",
    "gi_select",
    "gi_value",
    "init_arm",
    "load_bundled_table",
    "load_table",
    "lookup_v",
    "make_grid",
    "observe",
    "posterior_mean",
    "reg_inc_beta",
    "run_scenario_grid",
    "run_trial",
    "sample_exponential",
    "validate_table",
]
