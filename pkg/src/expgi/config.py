"""Scenario configuration files: INI-style, human-diffable.

One section ``[experiment]`` with keys:

  N            total participants (horizon)
  arms         number of arms including control
  mu           comma-separated baseline true means, one per arm
  mu_grid      optional per-arm sweeps "ARM=lo:hi:step", comma-separated;
               swept arms replace their baseline mean, grid cells are the
               cartesian product in arm order
  designs      comma-separated: ER and/or GI:<k>
  discount     discount factor d (must be tabulated)
  prior_mean   prior mean given to every arm (default 0.5)
  alpha        family-wise significance level (default 0.05)
  replications simulated experiments per cell
  seed         root seed (CLI --seed overrides)
"""

import configparser
import itertools
from dataclasses import dataclass
from pathlib import Path

from .engine import ScenarioGrid, make_grid
from .errors import ConfigError
from .policy import KIND_ER, KIND_GI, PolicySpec, check_k_bounds

_SECTION = "experiment"
_KNOWN_KEYS = {
    "n",
    "arms",
    "mu",
    "mu_grid",
    "designs",
    "discount",
    "prior_mean",
    "alpha",
    "replications",
    "seed",
}


@dataclass(frozen=True)
class SimulationPlan:
    n_total: int
    n_arms: int
    base_means: tuple[float, ...]
    sweeps: dict[int, tuple[float, ...]]
    designs: tuple[tuple[str, int | None], ...]
    discount: float
    prior_mean: float
    family_alpha: float
    replications: int
    seed: int


def _get(section, key, cast, *, default=None, required=True):
    if key not in section:
        if required:
            raise ConfigError(f"{key}: missing required key")
        return default
    raw = section[key].strip()
    try:
        return cast(raw)
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"{key}: {exc}") from None


def _parse_floats(raw: str) -> tuple[float, ...]:
    parts = [p for p in raw.replace(",", " ").split() if p]
    if not parts:
        raise ValueError("expected at least one number")
    return tuple(float(p) for p in parts)


def _parse_designs(raw: str) -> tuple[tuple[str, int | None], ...]:
    designs = []
    for token in (t.strip() for t in raw.split(",")):
        if not token:
            continue
        if token.upper() == KIND_ER:
            designs.append((KIND_ER, None))
        elif token.upper().startswith("GI:"):
            try:
                k = int(token[3:])
            except ValueError:
                raise ValueError(f"bad constraint factor in design {token!r}")
            designs.append((KIND_GI, k))
        else:
            raise ValueError(f"unknown design {token!r}; use ER or GI:<k>")
    if not designs:
        raise ValueError("expected at least one design")
    if len(set(designs)) != len(designs):
        raise ValueError("duplicate design entries")
    return tuple(designs)


def _parse_sweeps(raw: str, n_arms: int) -> dict[int, tuple[float, ...]]:
    sweeps: dict[int, tuple[float, ...]] = {}
    for token in (t.strip() for t in raw.split(",")):
        if not token:
            continue
        if "=" not in token:
            raise ValueError(f"sweep {token!r} must look like ARM=lo:hi:step")
        arm_raw, range_raw = token.split("=", 1)
        try:
            arm = int(arm_raw)
        except ValueError:
            raise ValueError(f"bad arm index in sweep {token!r}")
        if not 0 <= arm < n_arms:
            raise ValueError(f"sweep arm {arm} outside [0, {n_arms})")
        if arm in sweeps:
            raise ValueError(f"duplicate sweep for arm {arm}")
        pieces = range_raw.split(":")
        if len(pieces) != 3:
            raise ValueError(f"sweep range {range_raw!r} must be lo:hi:step")
        lo, hi, step = (float(p) for p in pieces)
        if step <= 0.0 or hi < lo:
            raise ValueError(f"bad sweep range {range_raw!r}")
        count = int(round((hi - lo) / step)) + 1
        values = tuple(round(lo + i * step, 10) for i in range(count))
        if any(v <= 0.0 for v in values):
            raise ValueError("sweep values must stay positive")
        sweeps[arm] = values
    if not sweeps:
        raise ValueError("expected at least one sweep")
    return sweeps


def parse_config(path) -> SimulationPlan:
    """Parse and validate a scenario configuration file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if _SECTION not in parser:
        raise ConfigError(f"{path}: missing [{_SECTION}] section")
    section = parser[_SECTION]
    unknown = set(section) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")

    n_total = _get(section, "n", int)
    n_arms = _get(section, "arms", int)
    if n_arms < 2:
        raise ConfigError(f"arms: need at least 2, got {n_arms}")
    if n_total < n_arms:
        raise ConfigError(f"n: horizon {n_total} below the arm count {n_arms}")

    base_means = _get(section, "mu", _parse_floats)
    if len(base_means) != n_arms:
        raise ConfigError(
            f"mu: expected {n_arms} means, got {len(base_means)}"
        )
    if any(m <= 0.0 for m in base_means):
        raise ConfigError("mu: true means must be positive")

    sweeps = _get(
        section,
        "mu_grid",
        lambda raw: _parse_sweeps(raw, n_arms),
        default={},
        required=False,
    )

    designs = _get(section, "designs", _parse_designs)
    for kind, k in designs:
        if kind == KIND_GI:
            try:
                check_k_bounds(k, n_arms, n_total)
            except ValueError as exc:
                raise ConfigError(f"designs: {exc}") from None

    discount = _get(section, "discount", float)
    if not 0.0 <= discount < 1.0:
        raise ConfigError(f"discount: must lie in [0, 1), got {discount}")
    prior_mean = _get(section, "prior_mean", float, default=0.5, required=False)
    if prior_mean <= 0.0:
        raise ConfigError(f"prior_mean: must be positive, got {prior_mean}")
    family_alpha = _get(section, "alpha", float, default=0.05, required=False)
    if not 0.0 < family_alpha < 1.0:
        raise ConfigError(f"alpha: must lie in (0, 1), got {family_alpha}")
    replications = _get(section, "replications", int)
    if replications < 1:
        raise ConfigError(f"replications: need at least 1, got {replications}")
    seed = _get(section, "seed", int, default=0, required=False)
    if seed < 0:
        raise ConfigError(f"seed: must be non-negative, got {seed}")

    return SimulationPlan(
        n_total=n_total,
        n_arms=n_arms,
        base_means=base_means,
        sweeps=sweeps,
        designs=designs,
        discount=discount,
        prior_mean=prior_mean,
        family_alpha=family_alpha,
        replications=replications,
        seed=seed,
    )


def enumerate_mean_vectors(plan: SimulationPlan) -> list[tuple[float, ...]]:
    """Cartesian product of per-arm sweeps over the baseline means."""
    if not plan.sweeps:
        return [plan.base_means]
    swept_arms = sorted(plan.sweeps)
    vectors = []
    for combo in itertools.product(*(plan.sweeps[a] for a in swept_arms)):
        means = list(plan.base_means)
        for arm, value in zip(swept_arms, combo):
            means[arm] = value
        vectors.append(tuple(means))
    return vectors


def plan_grid(plan: SimulationPlan, seed_override: int | None = None) -> ScenarioGrid:
    """Expand a plan into the full scenario grid with derived cell seeds."""
    designs = tuple(
        PolicySpec(kind=kind, d=plan.discount, mu_prior=plan.prior_mean, k=k)
        for kind, k in plan.designs
    )
    return make_grid(
        n_total=plan.n_total,
        n_arms=plan.n_arms,
        mean_vectors=enumerate_mean_vectors(plan),
        designs=designs,
        family_alpha=plan.family_alpha,
        replications=plan.replications,
        root_seed=plan.seed if seed_override is None else seed_override,
    )
