"""Tabulated normalized Gittins index values for exponential rewards.

The table stores v(n, d, 1): the index of an arm whose posterior mean is 1
after n pseudo-observations, at discount factor d. Indices for any other
posterior mean scale linearly: v(n, d, mu) = mu * v(n, d, 1).
"""

import bisect
import csv
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import TableLoadError, TableQueryError

BUNDLED_TABLE_NAME = "gi_exponential_table.csv"
_HEADER = ("discount", "n", "value")


@dataclass(frozen=True)
class IndexTable:
    """Immutable mapping (discount d, pseudo-observation count n) -> v(n, d, 1).

    discounts are ascending; within each discount the n-knots are strictly
    increasing and the values are >= 1 and non-increasing in n.
    """

    discounts: tuple[float, ...]
    counts: tuple[tuple[int, ...], ...]
    values: tuple[tuple[float, ...], ...]

    def row(self, d: float) -> tuple[tuple[int, ...], tuple[float, ...]]:
        """Knots and values for one discount; raises if d is not tabulated."""
        try:
            i = self.discounts.index(d)
        except ValueError:
            raise TableQueryError(
                f"discount {d!r} is not tabulated; available discounts: "
                f"{', '.join(repr(x) for x in self.discounts)}"
            ) from None
        return self.counts[i], self.values[i]


def load_table(path) -> IndexTable:
    """Load and validate an index table from a CSV file.

    The file must have the header ``discount,n,value`` and one row per
    (d, n) pair, in any order. Violations of the table invariants are
    rejected with the offending row numbers in the message.
    """
    path = Path(path)
    if not path.is_file():
        raise TableLoadError(f"index table file not found: {path}")

    per_discount: dict[float, dict[int, tuple[float, int]]] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TableLoadError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != _HEADER:
            raise TableLoadError(
                f"{path}: expected header 'discount,n,value', got {','.join(header)!r}"
            )
        for lineno, rowvals in enumerate(reader, start=2):
            if not rowvals or (len(rowvals) == 1 and not rowvals[0].strip()):
                continue
            if len(rowvals) != 3:
                raise TableLoadError(f"{path}:{lineno}: expected 3 columns, got {len(rowvals)}")
            try:
                d = float(rowvals[0])
                n = int(rowvals[1])
                v = float(rowvals[2])
            except ValueError as exc:
                raise TableLoadError(f"{path}:{lineno}: malformed row: {exc}") from None
            if not 0.0 <= d < 1.0:
                raise TableLoadError(f"{path}:{lineno}: discount {d} outside [0, 1)")
            if n < 1:
                raise TableLoadError(f"{path}:{lineno}: count n={n} must be >= 1")
            if v < 1.0:
                raise TableLoadError(f"{path}:{lineno}: value {v} below 1 (index cannot fall below the posterior mean)")
            slot = per_discount.setdefault(d, {})
            if n in slot:
                raise TableLoadError(
                    f"{path}:{lineno}: duplicate entry for (discount={d}, n={n}); first seen at row {slot[n][1]}"
                )
            slot[n] = (v, lineno)

    if not per_discount:
        raise TableLoadError(f"{path}: no data rows")

    discounts = tuple(sorted(per_discount))
    counts = []
    values = []
    for d in discounts:
        items = sorted(per_discount[d].items())
        ns = tuple(n for n, _ in items)
        vs = tuple(v for _, (v, _) in items)
        rows = tuple(ln for _, (_, ln) in items)
        for i in range(1, len(ns)):
            if vs[i] > vs[i - 1]:
                raise TableLoadError(
                    f"{path}: monotonicity violation at discount {d}: "
                    f"v(n={ns[i]})={vs[i]} > v(n={ns[i - 1]})={vs[i - 1]} "
                    f"(rows {rows[i]} and {rows[i - 1]})"
                )
        counts.append(ns)
        values.append(vs)

    table = IndexTable(discounts, tuple(counts), tuple(values))
    _check_discount_monotonicity(table, path)
    return table


def _check_discount_monotonicity(table: IndexTable, path) -> None:
    """At every n tabulated for consecutive discounts, v must not decrease in d."""
    for i in range(1, len(table.discounts)):
        lo_ns, lo_vs = table.counts[i - 1], table.values[i - 1]
        hi_ns, hi_vs = table.counts[i], table.values[i]
        lo_map = dict(zip(lo_ns, lo_vs))
        for n, v in zip(hi_ns, hi_vs):
            if n in lo_map and v < lo_map[n]:
                raise TableLoadError(
                    f"{path}: discount monotonicity violation at n={n}: "
                    f"v(d={table.discounts[i]})={v} < v(d={table.discounts[i - 1]})={lo_map[n]}"
                )


def lookup_v(table: IndexTable, n: int, d: float) -> float:
    """Normalized index v(n, d, 1), interpolating in 1/n between knots.

    Tabulated n return the stored value exactly. Beyond the largest knot the
    value is interpolated linearly in 1/n toward the known limit v -> 1 as
    n -> infinity. Queries below the smallest knot, or at an untabulated
    discount, are errors.
    """
    ns, vs = table.row(d)
    if n < ns[0]:
        raise TableQueryError(
            f"n={n} below the smallest tabulated count {ns[0]} for discount {d}"
        )
    i = bisect.bisect_left(ns, n)
    if i < len(ns) and ns[i] == n:
        return vs[i]
    if i == len(ns):
        n_max, v_max = ns[-1], vs[-1]
        return 1.0 + (v_max - 1.0) * (n_max / n)
    n_lo, n_hi = ns[i - 1], ns[i]
    v_lo, v_hi = vs[i - 1], vs[i]
    x, x_lo, x_hi = 1.0 / n, 1.0 / n_lo, 1.0 / n_hi
    w = (x - x_hi) / (x_lo - x_hi)
    return v_hi + w * (v_lo - v_hi)


def lookup_with_status(table: IndexTable, n: int, d: float) -> tuple[float, str]:
    """lookup_v plus a human-readable interpolation status."""
    ns, _ = table.row(d)
    v = lookup_v(table, n, d)
    i = bisect.bisect_left(ns, n)
    if i < len(ns) and ns[i] == n:
        return v, "exact"
    if i == len(ns):
        return v, f"interpolated beyond the last knot n={ns[-1]} toward the n->inf limit 1"
    return v, f"interpolated between knots n={ns[i - 1]} and n={ns[i]}"


def gi_value(table: IndexTable, n: int, d: float, mu: float) -> float:
    """Gittins index for posterior mean mu: mu * v(n, d, 1)."""
    if mu < 0.0:
        raise ValueError(f"posterior mean must be non-negative, got {mu}")
    return mu * lookup_v(table, n, d)


def bundled_table_path() -> Path:
    """Filesystem path of the index table shipped with the package."""
    return Path(str(resources.files("expgi").joinpath("data", BUNDLED_TABLE_NAME)))


@lru_cache(maxsize=1)
def load_bundled_table() -> IndexTable:
    return load_table(bundled_table_path())
