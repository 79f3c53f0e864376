"""Utility assignment over decision/outcome pairs and expected utility
per relevant group.

A weight table gives the payoff w_dy for each (decision, outcome) cell.
Individual utility is the table entry picked out by the record's cell;
group utility is the mean over a relevant group. Weights may optionally
vary by group, in which case each group's table overrides the shared one.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

import numpy as np

from .data import (
    ClaimsDifferentiator,
    ClaimsKind,
    Dataset,
    Record,
    RelevantGroupKey,
    partition_relevant_groups,
)
from .errors import EmptyRelevantGroup, NotDefined, ValidationError


@dataclass(frozen=True)
class WeightTable:
    """Payoffs indexed by decision then outcome: w11 accept/positive,
    w10 accept/negative, w01 reject/positive, w00 reject/negative."""

    w11: float
    w10: float
    w01: float
    w00: float

    def __post_init__(self):
        for name in ("w11", "w10", "w01", "w00"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and np.isfinite(v)):
                raise ValidationError(f"weight {name} must be finite, got {v!r}")

    def value(self, d: int, y: int) -> float:
        if d == 1:
            return float(self.w11 if y == 1 else self.w10)
        return float(self.w01 if y == 1 else self.w00)

    def entry(self, name: str) -> float:
        return float(getattr(self, name))

    def to_dict(self) -> dict:
        return {"w11": self.w11, "w10": self.w10, "w01": self.w01, "w00": self.w00}


@dataclass(frozen=True)
class UtilityWeights:
    """Shared weight table plus optional per-group overrides.

    When ``per_group`` is present it must cover every declared group of the
    dataset it is used with; the shared table then only serves as the
    documented default for groups constructed later.
    """

    shared: WeightTable
    per_group: Mapping[str, WeightTable] | None = None

    def table_for(self, a: str) -> WeightTable:
        if self.per_group is not None:
            return self.per_group.get(a, self.shared)
        return self.shared

    def validate_for(self, ds: Dataset) -> None:
        if self.per_group is not None:
            missing = [g for g in ds.groups if g not in self.per_group]
            if missing:
                raise ValidationError(
                    f"per-group weights must cover every declared group; missing {missing}"
                )

    def to_dict(self) -> dict:
        out: dict = dict(self.shared.to_dict())
        if self.per_group is not None:
            out["per_group"] = {a: t.to_dict() for a, t in sorted(self.per_group.items())}
        return out


def individual_utility(r: Record, w: UtilityWeights) -> float:
    """Utility of one record: the weight-table entry for its (d, y) cell."""
    return w.table_for(r.a).value(r.d, r.y)


@dataclass(frozen=True)
class ProfileEntry:
    """Expected utility and observation count for one relevant group.
    The count is fractional under randomized decision rules."""

    expected_utility: float
    n: float


@dataclass(frozen=True)
class UtilityProfile:
    """Expected utility per relevant group, with the inputs that produced it.

    ``empty_keys`` lists declared (group, stratum) combinations that held
    no records; they carry no entry rather than a fake zero.
    """

    entries: Mapping[RelevantGroupKey, ProfileEntry]
    weights_used: UtilityWeights
    cd: ClaimsDifferentiator
    empty_keys: tuple[RelevantGroupKey, ...] = ()

    @cached_property
    def sorted_keys(self) -> tuple[RelevantGroupKey, ...]:
        return tuple(sorted(self.entries, key=lambda k: (k.a, str(k.j))))

    def groups(self) -> tuple[str, ...]:
        return tuple(sorted({k.a for k in self.entries}))

    def strata(self) -> tuple:
        return tuple(sorted({k.j for k in self.entries}, key=str))

    def by_stratum(self) -> dict:
        """Map stratum value -> {group: expected utility}."""
        out: dict = {}
        for k in self.sorted_keys:
            out.setdefault(k.j, {})[k.a] = self.entries[k].expected_utility
        return out

    def values(self) -> tuple[float, ...]:
        return tuple(self.entries[k].expected_utility for k in self.sorted_keys)


def record_utilities(ds: Dataset, w: UtilityWeights) -> np.ndarray:
    """Vector of individual utilities for the whole dataset."""
    w.validate_for(ds)
    tables = [w.table_for(a) for a in ds.groups]
    w11 = np.array([t.w11 for t in tables], dtype=np.float64)[ds.a_codes]
    w10 = np.array([t.w10 for t in tables], dtype=np.float64)[ds.a_codes]
    w01 = np.array([t.w01 for t in tables], dtype=np.float64)[ds.a_codes]
    w00 = np.array([t.w00 for t in tables], dtype=np.float64)[ds.a_codes]
    y = ds.y_values
    d = ds.d_values
    return d * (y * w11 + (1 - y) * w10) + (1 - d) * (y * w01 + (1 - y) * w00)


def expected_group_utility(
    ds: Dataset, key: RelevantGroupKey, cd: ClaimsDifferentiator, w: UtilityWeights
) -> float:
    """Mean utility over one relevant group; NotDefined when it is empty."""
    buckets = partition_relevant_groups(ds, cd)
    if key not in buckets:
        raise NotDefined(f"no relevant group for group {key.a!r}, stratum {cd.label(key.j)!r}")
    idx = buckets[key]
    if not idx:
        raise NotDefined(
            f"relevant group (a={key.a!r}, {cd.label(key.j)}) is empty; "
            f"its expected utility is not defined"
        )
    u = record_utilities(ds, w)
    return float(u[np.asarray(idx, dtype=np.int64)].mean())


def utility_profile(ds: Dataset, cd: ClaimsDifferentiator, w: UtilityWeights) -> UtilityProfile:
    """Expected utility for every relevant group.

    Empty (group, stratum) buckets are recorded on ``empty_keys``; a group
    label with no records in any stratum makes the whole profile
    undefined and raises EmptyRelevantGroup.
    """
    w.validate_for(ds)
    buckets = partition_relevant_groups(ds, cd)
    u = record_utilities(ds, w)
    entries: dict[RelevantGroupKey, ProfileEntry] = {}
    empty: list[RelevantGroupKey] = []
    covered: set[str] = set()
    for key, idx in buckets.items():
        if idx:
            arr = np.asarray(idx, dtype=np.int64)
            entries[key] = ProfileEntry(float(u[arr].mean()), float(len(idx)))
            covered.add(key.a)
        else:
            empty.append(key)
    missing = [g for g in ds.groups if g not in covered]
    if missing:
        labels = tuple(
            f"a={k.a}, {cd.label(k.j)}" for k in empty if k.a in missing
        )
        raise EmptyRelevantGroup(labels)
    return UtilityProfile(
        entries=entries, weights_used=w, cd=cd, empty_keys=tuple(empty)
    )
