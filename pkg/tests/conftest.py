import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from expgi.table import IndexTable, load_bundled_table


@pytest.fixture(scope="session")
def table():
    return load_bundled_table()


@pytest.fixture
def toy_table():
    """Small hand-made table: knots chosen so 1/n midpoints land on integers."""
    return IndexTable(
        discounts=(0.5, 0.9),
        counts=((2, 6, 12), (2, 6, 12)),
        values=((2.4, 1.3, 1.12), (4.4, 1.7, 1.3)),
    )


def write_table_csv(path: Path, rows) -> Path:
    lines = ["discount,n,value"]
    lines += [f"{d},{n},{v}" for d, n, v in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
