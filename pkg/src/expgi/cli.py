"""Command-line entry point: simulate scenario grids, inspect the index
table, and validate it against the first-principles approximation.

Exit status: 0 success, 1 validation/configuration error, 2 runtime error.
"""

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .config import parse_config, plan_grid
from .engine import OperatingCharacteristics, ScenarioCell, ScenarioGrid, run_scenario_grid
from .errors import ConfigError, TableLoadError, TableQueryError
from .oracle import OracleConfig, format_report, validate_table, write_validation_csv
from .policy import KIND_ER
from .table import (
    load_bundled_table,
    load_table,
    lookup_with_status,
)

RESULTS_HEADER = (
    "scenario_id,mu_0,mu_1,mu_2,design,k,discount,prior_mean,replications,seed,"
    "power,type1_context,sigma_est_arm1,sigma_est_arm2,sigma_est_control,"
    "rho_superior,eto_pct_increase,min_arm_count"
)


@dataclass(frozen=True)
class RunManifest:
    config_path: Path
    output_dir: Path
    seed: int | None  # overrides the config seed when given
    workers: int
    overwrite: bool


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def results_rows(grid: ScenarioGrid, results) -> list[str]:
    """One CSV row per (scenario cell, design), in cell order."""
    rows = []
    for cell, oc in results:
        means = cell.true_means
        is_null = len(set(means)) == 1
        sigma = oc.sigma_estimate
        row = [
            cell.scenario_id,
            _fmt(means[0]),
            _fmt(means[1]),
            _fmt(means[2]) if grid.n_arms >= 3 else "",
            cell.policy.kind,
            "" if cell.policy.kind == KIND_ER else str(cell.policy.k),
            _fmt(cell.policy.d),
            _fmt(cell.policy.mu_prior),
            str(grid.replications),
            str(cell.seed),
            _fmt(oc.power),
            "null" if is_null else "alt",
            _fmt(sigma[1]),
            _fmt(sigma[2]) if grid.n_arms >= 3 else "",
            _fmt(sigma[0]),
            _fmt(oc.rho_superior),
            _fmt(oc.eto_pct_increase),
            str(oc.min_arm_count),
        ]
        rows.append(",".join(row))
    return rows


def write_results_csv(path: Path, grid: ScenarioGrid, results) -> None:
    text = "\n".join([RESULTS_HEADER, *results_rows(grid, results)]) + "\n"
    path.write_text(text, encoding="utf-8")


def _print_summary(grid: ScenarioGrid, results) -> None:
    by_design: dict[str, list[OperatingCharacteristics]] = {}
    for cell, oc in results:
        by_design.setdefault(cell.policy.label, []).append(oc)
    print(f"{len(results)} cells, {grid.replications} replications each")
    print(f"{'design':>10} {'mean power':>11} {'mean rho_sup':>13} {'mean ETO%':>10} {'min count':>10}")
    for label, ocs in by_design.items():
        mean = lambda xs: sum(xs) / len(xs)  # noqa: E731
        print(
            f"{label:>10} {mean([o.power for o in ocs]):>11.4f} "
            f"{mean([o.rho_superior for o in ocs]):>13.4f} "
            f"{mean([o.eto_pct_increase for o in ocs]):>10.2f} "
            f"{min(o.min_arm_count for o in ocs):>10d}"
        )


def _require_writable(path: Path, overwrite: bool) -> None:
    if path.exists() and not overwrite:
        raise ConfigError(
            f"refusing to overwrite existing {path}; pass --overwrite to replace it"
        )


def cmd_simulate(manifest: RunManifest) -> int:
    plan = parse_config(manifest.config_path)
    table = load_bundled_table()
    if plan.discount not in table.discounts:
        raise ConfigError(
            f"discount: {plan.discount:g} is not tabulated; available: "
            f"{', '.join(f'{d:g}' for d in table.discounts)}"
        )
    grid = plan_grid(plan, seed_override=manifest.seed)
    out_path = manifest.output_dir / f"{manifest.config_path.stem}_results.csv"
    _require_writable(out_path, manifest.overwrite)
    manifest.output_dir.mkdir(parents=True, exist_ok=True)
    results = run_scenario_grid(grid, table, workers=manifest.workers)
    write_results_csv(out_path, grid, results)
    _print_summary(grid, results)
    print(f"results written to {out_path}")
    return 0


def cmd_table(path, n: int, d: float, mu: float) -> int:
    table = load_table(path) if path else load_bundled_table()
    v, status = lookup_with_status(table, n, d)
    print(f"v(n={n}, d={d:g}, 1) = {v:.6f}  [{status}]")
    print(f"index at posterior mean {mu:g}: {mu * v:.6f}")
    return 0


def cmd_oracle(
    d: float,
    n_max: int,
    rel_tol: float,
    output_dir: Path,
    overwrite: bool,
    table_path=None,
) -> int:
    table = load_table(table_path) if table_path else load_bundled_table()
    config = OracleConfig.for_discount(d)
    report = validate_table(table, config, rel_tol, n_max=n_max)
    out_path = output_dir / f"oracle_validation_d{d:g}.csv"
    _require_writable(out_path, overwrite)
    output_dir.mkdir(parents=True, exist_ok=True)
    write_validation_csv(report, out_path)
    print(format_report(report))
    print(f"deviations written to {out_path}")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expgi",
        description="GI-based adaptive allocation simulations for exponential rewards",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario grid from a config file")
    sim.add_argument("--config", required=True, type=Path)
    sim.add_argument("--out", required=True, type=Path, help="output directory")
    sim.add_argument("--seed", type=int, default=None, help="override the config seed")
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--overwrite", action="store_true")

    tab = sub.add_parser("table", help="inspect the bundled index table")
    tab.add_argument("--n", required=True, type=int, help="pseudo-observation count")
    tab.add_argument("--discount", required=True, type=float)
    tab.add_argument("--mu", type=float, default=1.0, help="posterior mean to scale by")
    tab.add_argument("--table", type=Path, default=None, help="alternative table file")

    orc = sub.add_parser("oracle", help="validate the table against the approximation")
    orc.add_argument("--discount", required=True, type=float)
    orc.add_argument("--n-max", type=int, default=30)
    orc.add_argument("--rel-tol", type=float, default=0.02)
    orc.add_argument("--out", required=True, type=Path, help="output directory")
    orc.add_argument("--overwrite", action="store_true")
    orc.add_argument("--table", type=Path, default=None, help="alternative table file")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            manifest = RunManifest(
                config_path=args.config,
                output_dir=args.out,
                seed=args.seed,
                workers=args.workers,
                overwrite=args.overwrite,
            )
            return cmd_simulate(manifest)
        if args.command == "table":
            return cmd_table(args.table, args.n, args.discount, args.mu)
        if args.command == "oracle":
            return cmd_oracle(
                args.discount, args.n_max, args.rel_tol, args.out, args.overwrite, args.table
            )
        raise AssertionError(f"unhandled command {args.command}")
    except (ConfigError, TableLoadError, TableQueryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 2
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
