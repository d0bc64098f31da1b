"""Figure rendering for simulation results CSVs.

Consumes the flat results CSV emitted by the simulation CLI (header
``scenario_id,mu_0,mu_1,mu_2,design,k,...``) and draws the four standard
figure families:

- ``two_arm_learning``  — power and estimate spread against mu_1
- ``two_arm_earning``   — superior-arm share and ETO% against mu_1
- ``three_arm_learning``— 3D scatter over (mu_1, mu_2): power plus the two
  per-arm estimate spreads
- ``three_arm_earning`` — 3D scatter of share and ETO%, with both mu axes
  descending so the high-mean corner faces the viewer

Series and colors are derived from the design/k columns, so additional
constraint factors plot without code changes. Output is a static image;
the format follows the output path's extension (SVG recommended).
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

FIGURE_KINDS = (
    "two_arm_learning",
    "two_arm_earning",
    "three_arm_learning",
    "three_arm_earning",
)

_REQUIRED_COLUMNS = {
    "mu_1",
    "mu_2",
    "design",
    "k",
    "power",
    "sigma_est_arm1",
    "sigma_est_arm2",
    "rho_superior",
    "eto_pct_increase",
}


class FigureCsvError(Exception):
    """Results CSV is missing, empty, malformed, or of the wrong arity."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: Path
    figure_kind: str
    output_path: Path

    def __post_init__(self):
        if self.figure_kind not in FIGURE_KINDS:
            raise ValueError(
                f"unknown figure kind {self.figure_kind!r}; expected one of {FIGURE_KINDS}"
            )


@dataclass(frozen=True)
class ResultRow:
    mu_1: float
    mu_2: float | None
    label: str  # design plus constraint factor, e.g. "GI(k=5)"
    power: float
    sigma_arm1: float
    sigma_arm2: float | None
    rho_superior: float
    eto_pct_increase: float


def load_results(path) -> list[ResultRow]:
    path = Path(path)
    if not path.is_file():
        raise FigureCsvError(f"results CSV not found: {path}")
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = _REQUIRED_COLUMNS - set(reader.fieldnames or ())
        if missing:
            raise FigureCsvError(
                f"{path}: not a results CSV; missing columns {sorted(missing)}"
            )
        for record in reader:
            label = record["design"]
            if record["k"]:
                label = f"{label}(k={record['k']})"
            three_arm = record["mu_2"] != ""
            rows.append(
                ResultRow(
                    mu_1=float(record["mu_1"]),
                    mu_2=float(record["mu_2"]) if three_arm else None,
                    label=label,
                    power=float(record["power"]),
                    sigma_arm1=float(record["sigma_est_arm1"]),
                    sigma_arm2=float(record["sigma_est_arm2"]) if three_arm else None,
                    rho_superior=float(record["rho_superior"]),
                    eto_pct_increase=float(record["eto_pct_increase"]),
                )
            )
    if not rows:
        raise FigureCsvError(f"{path}: no data rows")
    arities = {row.mu_2 is None for row in rows}
    if len(arities) != 1:
        raise FigureCsvError(f"{path}: mixed 2-arm and 3-arm rows")
    return rows


def _check_arity(rows: list[ResultRow], kind: str, path) -> None:
    is_two_arm = rows[0].mu_2 is None
    wants_two_arm = kind.startswith("two_arm")
    if is_two_arm != wants_two_arm:
        have = "2-arm" if is_two_arm else "3-arm"
        raise FigureCsvError(f"{path} holds {have} results, incompatible with {kind}")


def _series(rows: list[ResultRow]) -> dict[str, list[ResultRow]]:
    by_label: dict[str, list[ResultRow]] = {}
    for row in rows:
        by_label.setdefault(row.label, []).append(row)
    return {label: by_label[label] for label in sorted(by_label)}


def _colors(labels) -> dict[str, str]:
    cycle = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    return {label: cycle[i % len(cycle)] for i, label in enumerate(labels)}


def _two_arm_panels(rows, panels):
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.5))
    series = _series(rows)
    colors = _colors(series)
    for ax, (title, getter) in zip(axes, panels):
        for label, srows in series.items():
            srows = sorted(srows, key=lambda r: r.mu_1)
            ax.plot(
                [r.mu_1 for r in srows],
                [getter(r) for r in srows],
                marker="o",
                linestyle="-",
                color=colors[label],
                label=label,
            )
        ax.set_xlabel("mu_1")
        ax.set_ylabel(title)
        ax.grid(True, alpha=0.3)
    axes[0].legend()
    fig.tight_layout()
    return fig


def _three_arm_axes(fig, positions):
    return [fig.add_subplot(pos, projection="3d") for pos in positions]


def _scatter_panel(ax, series, colors, getter, title, descending=False):
    for label, srows in series.items():
        ax.scatter(
            [r.mu_1 for r in srows],
            [r.mu_2 for r in srows],
            [getter(r) for r in srows],
            color=colors[label],
            label=label,
            s=12,
            depthshade=False,
        )
    ax.set_xlabel("mu_1")
    ax.set_ylabel("mu_2")
    ax.set_title(title)
    if descending:
        ax.invert_xaxis()
        ax.invert_yaxis()


def render(spec: FigureSpec):
    """Draw the requested figure and write it to spec.output_path.

    Returns the matplotlib figure (already saved) for inspection.
    """
    rows = load_results(spec.input_csv)
    _check_arity(rows, spec.figure_kind, spec.input_csv)

    if spec.figure_kind == "two_arm_learning":
        fig = _two_arm_panels(
            rows,
            [
                ("power", lambda r: r.power),
                ("sigma of mu_1 estimate", lambda r: r.sigma_arm1),
            ],
        )
    elif spec.figure_kind == "two_arm_earning":
        fig = _two_arm_panels(
            rows,
            [
                ("share on superior arm", lambda r: r.rho_superior),
                ("ETO % increase", lambda r: r.eto_pct_increase),
            ],
        )
    elif spec.figure_kind == "three_arm_learning":
        series = _series(rows)
        colors = _colors(series)
        fig = plt.figure(figsize=(12, 8))
        grid = fig.add_gridspec(2, 2)
        power_ax = fig.add_subplot(grid[:, 0], projection="3d")
        sigma2_ax = fig.add_subplot(grid[0, 1], projection="3d")
        sigma1_ax = fig.add_subplot(grid[1, 1], projection="3d")
        _scatter_panel(power_ax, series, colors, lambda r: r.power, "power")
        _scatter_panel(
            sigma2_ax, series, colors, lambda r: r.sigma_arm2, "sigma of mu_2 estimate"
        )
        _scatter_panel(
            sigma1_ax, series, colors, lambda r: r.sigma_arm1, "sigma of mu_1 estimate"
        )
        power_ax.legend(loc="upper left")
        fig.tight_layout()
    else:  # three_arm_earning
        series = _series(rows)
        colors = _colors(series)
        fig = plt.figure(figsize=(12, 5.5))
        share_ax = fig.add_subplot(1, 2, 1, projection="3d")
        eto_ax = fig.add_subplot(1, 2, 2, projection="3d")
        _scatter_panel(
            share_ax, series, colors,
            lambda r: r.rho_superior, "share on superior arm", descending=True,
        )
        _scatter_panel(
            eto_ax, series, colors,
            lambda r: r.eto_pct_increase, "ETO % increase", descending=True,
        )
        share_ax.legend(loc="upper left")
        fig.tight_layout()

    spec.output_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output_path)
    return fig
