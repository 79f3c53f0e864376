"""Shared fixtures.

The eight-record dataset below is the canonical hand-checkable case
used across the suite. Group "0" has one record in each (d, y) cell;
group "1" has two accepted true positives and two rejected true
negatives. Every conditional rate is a half or a whole, so expected
values can be derived by counting.
"""

from __future__ import annotations

import pytest

from justdist.data import Dataset, Record
from justdist.utility import UtilityWeights, WeightTable

T1_ROWS: list[tuple[str, str, int, int]] = [
    # (id, a, y, d)
    ("1", "0", 1, 1),
    ("2", "0", 0, 1),
    ("3", "0", 1, 0),
    ("4", "0", 0, 0),
    ("5", "1", 1, 1),
    ("6", "1", 1, 1),
    ("7", "1", 0, 0),
    ("8", "1", 0, 0),
]


def t1_records() -> list[Record]:
    return [Record(id=i, a=a, y=y, d=d) for i, a, y, d in T1_ROWS]


@pytest.fixture
def t1() -> Dataset:
    return Dataset.build(t1_records())


@pytest.fixture
def t1_csv() -> str:
    lines = ["id,a,y,d"] + [f"{i},{a},{y},{d}" for i, a, y, d in T1_ROWS]
    return "\n".join(lines) + "\n"


def wt(w11: float, w10: float, w01: float, w00: float) -> UtilityWeights:
    return UtilityWeights(shared=WeightTable(w11=w11, w10=w10, w01=w01, w00=w00))


@pytest.fixture
def w2101() -> UtilityWeights:
    """Mixed-sign weights giving the 0.5 / 1.5 golden profile."""
    return wt(2.0, -1.0, 0.0, 1.0)
