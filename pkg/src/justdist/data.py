"""Domain types and dataset handling for binary decision audits.

A dataset is a list of records, each carrying a group label ``a``, a binary
outcome ``y``, a binary decision ``d``, an optional score in [0, 1], and
optional categorical attributes declared legitimate grounds for unequal
claims. Relevant groups are the intersection of a claims-differentiator
stratum with a group label; all downstream metrics are computed per
relevant group.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    EmptyRelevantGroup,
    InvalidSpec,
    MissingColumn,
    NonBinaryValue,
    ScoreOutOfRange,
    UnknownGroup,
    ValidationError,
)

StratumValue = int | str | None


@dataclass(frozen=True)
class Record:
    """One decision subject.

    Args:
        id: opaque identifier, unique within a dataset by convention.
        a: group label (the sensitive attribute).
        y: binary outcome, 1 = positive.
        d: binary decision, 1 = accept.
        score: optional decision-relevant score in [0, 1], used only by
            threshold rules.
        legit: optional categorical attributes that may legitimately
            differentiate claims.
    """

    id: str
    a: str
    y: int
    d: int
    score: float | None = None
    legit: Mapping[str, str] | None = None


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of records with a declared group set.

    ``groups`` is sorted and covers every record's label. ``legit_schema``
    maps each declared legitimate attribute to its sorted value set. Build
    instances through :meth:`Dataset.build`, which validates and derives
    the declared sets.
    """

    records: tuple[Record, ...]
    groups: tuple[str, ...]
    legit_schema: Mapping[str, tuple[str, ...]]

    @classmethod
    def build(
        cls,
        records: Iterable[Record],
        groups: Sequence[str] | None = None,
        legit_schema: Mapping[str, Sequence[str]] | None = None,
    ) -> "Dataset":
        recs = tuple(records)
        if not recs:
            raise ValidationError("dataset is empty")
        declared = tuple(sorted(set(groups))) if groups is not None else None
        seen_groups: set[str] = set()
        attrs = tuple(sorted(legit_schema)) if legit_schema is not None else None
        seen_values: dict[str, set[str]] = {}
        for r in recs:
            if r.y not in (0, 1):
                raise NonBinaryValue("y", r.y)
            if r.d not in (0, 1):
                raise NonBinaryValue("d", r.d)
            if r.score is not None and not (
                isinstance(r.score, (int, float)) and np.isfinite(r.score) and 0.0 <= r.score <= 1.0
            ):
                raise ScoreOutOfRange(r.score)
            if declared is not None and r.a not in declared:
                raise UnknownGroup(r.a)
            seen_groups.add(r.a)
            if attrs is not None:
                keys = tuple(sorted(r.legit)) if r.legit else ()
                if keys != attrs:
                    raise ValidationError(
                        f"record {r.id!r}: legitimate attributes {keys} do not match "
                        f"the declared schema {attrs}"
                    )
            elif r.legit:
                for k, v in r.legit.items():
                    seen_values.setdefault(k, set()).add(str(v))
        if declared is None:
            declared = tuple(sorted(seen_groups))
        if attrs is not None:
            schema = {k: tuple(sorted(str(v) for v in legit_schema[k])) for k in attrs}
            for r in recs:
                for k in attrs:
                    if str(r.legit[k]) not in schema[k]:
                        raise ValidationError(
                            f"record {r.id!r}: value {r.legit[k]!r} for attribute {k!r} "
                            f"is outside the declared value set"
                        )
        else:
            # Schema derived from the data: every attribute observed anywhere
            # must be present on every record.
            if seen_values:
                for r in recs:
                    keys = tuple(sorted(r.legit)) if r.legit else ()
                    if keys != tuple(sorted(seen_values)):
                        raise ValidationError(
                            f"record {r.id!r}: legitimate attributes are not uniform "
                            f"across the dataset"
                        )
            schema = {k: tuple(sorted(vs)) for k, vs in sorted(seen_values.items())}
        return cls(records=recs, groups=declared, legit_schema=schema)

    def __len__(self) -> int:
        return len(self.records)

    @cached_property
    def _group_index(self) -> dict[str, int]:
        return {g: i for i, g in enumerate(self.groups)}

    @cached_property
    def a_codes(self) -> np.ndarray:
        idx = self._group_index
        return np.fromiter((idx[r.a] for r in self.records), dtype=np.int64, count=len(self.records))

    @cached_property
    def y_values(self) -> np.ndarray:
        return np.fromiter((r.y for r in self.records), dtype=np.int64, count=len(self.records))

    @cached_property
    def d_values(self) -> np.ndarray:
        return np.fromiter((r.d for r in self.records), dtype=np.int64, count=len(self.records))

    @cached_property
    def scores(self) -> np.ndarray | None:
        """Score column as float array, or None unless every record has one."""
        if any(r.score is None for r in self.records):
            return None
        return np.fromiter((r.score for r in self.records), dtype=np.float64, count=len(self.records))

    def legit_codes(self, attr: str) -> np.ndarray:
        values = self.legit_schema[attr]
        idx = {v: i for i, v in enumerate(values)}
        return np.fromiter(
            (idx[str(r.legit[attr])] for r in self.records), dtype=np.int64, count=len(self.records)
        )

    def summary(self) -> dict:
        out: dict = {"n_records": len(self.records), "groups": list(self.groups)}
        rates = {}
        acc = {}
        for g in self.groups:
            mask = self.a_codes == self._group_index[g]
            rates[g] = float(self.y_values[mask].mean())
            acc[g] = float(self.d_values[mask].mean())
        out["base_rates"] = rates
        out["acceptance_rates"] = acc
        out["legit_schema"] = {k: list(v) for k, v in self.legit_schema.items()}
        return out


class ClaimsKind(str, Enum):
    NONE = "none"
    OUTCOME = "outcome"
    DECISION = "decision"
    LEGITIMATE = "legitimate"


def stratum_label(kind: ClaimsKind, attr: str | None, j: StratumValue) -> str:
    if kind is ClaimsKind.NONE or j is None:
        return "all"
    if kind is ClaimsKind.OUTCOME:
        return f"y={j}"
    if kind is ClaimsKind.DECISION:
        return f"d={j}"
    return f"{attr}={j}"


@dataclass(frozen=True)
class ClaimsDifferentiator:
    """What, if anything, differentiates the strength of claims.

    ``kind=none`` treats every record alike; ``outcome`` and ``decision``
    stratify on y or d with ``values`` a subset of {0, 1}; ``legitimate``
    stratifies on a declared categorical attribute. Records whose stratum
    value is outside ``values`` fall outside every relevant group and are
    excluded from the audit (and surfaced as an excluded count).
    """

    kind: ClaimsKind
    attr: str | None = None
    values: frozenset = frozenset()

    def __post_init__(self):
        if self.kind is ClaimsKind.NONE:
            if self.attr is not None or self.values:
                raise InvalidSpec("claims kind 'none' takes no attr and no values")
            return
        if not self.values:
            raise InvalidSpec(f"claims kind {self.kind.value!r} needs a non-empty value set")
        if self.kind in (ClaimsKind.OUTCOME, ClaimsKind.DECISION):
            if self.attr is not None:
                raise InvalidSpec(f"claims kind {self.kind.value!r} takes no attr")
            if not self.values <= {0, 1}:
                raise InvalidSpec(f"values for {self.kind.value!r} must be a subset of {{0, 1}}")
        else:
            if not self.attr:
                raise InvalidSpec("claims kind 'legitimate' needs an attribute name")
            if not all(isinstance(v, str) for v in self.values):
                raise InvalidSpec("values for a legitimate attribute must be strings")

    @classmethod
    def none(cls) -> "ClaimsDifferentiator":
        return cls(kind=ClaimsKind.NONE)

    @classmethod
    def outcome(cls, values: Iterable[int] = (0, 1)) -> "ClaimsDifferentiator":
        return cls(kind=ClaimsKind.OUTCOME, values=frozenset(values))

    @classmethod
    def decision(cls, values: Iterable[int] = (0, 1)) -> "ClaimsDifferentiator":
        return cls(kind=ClaimsKind.DECISION, values=frozenset(values))

    @classmethod
    def legitimate(cls, attr: str, values: Iterable[str]) -> "ClaimsDifferentiator":
        return cls(kind=ClaimsKind.LEGITIMATE, attr=attr, values=frozenset(str(v) for v in values))

    def sorted_values(self) -> tuple[StratumValue, ...]:
        if self.kind is ClaimsKind.NONE:
            return (None,)
        return tuple(sorted(self.values, key=str))

    def validate_for(self, ds: Dataset) -> None:
        if self.kind is ClaimsKind.LEGITIMATE:
            if self.attr not in ds.legit_schema:
                raise InvalidSpec(
                    f"attribute {self.attr!r} is not a declared legitimate attribute"
                )
            declared = set(ds.legit_schema[self.attr])
            extra = self.values - declared
            if extra:
                raise InvalidSpec(
                    f"values {sorted(extra)} for attribute {self.attr!r} are not in "
                    f"the declared value set"
                )

    def stratum_of(self, r: Record) -> StratumValue:
        if self.kind is ClaimsKind.NONE:
            return None
        if self.kind is ClaimsKind.OUTCOME:
            return r.y
        if self.kind is ClaimsKind.DECISION:
            return r.d
        return str(r.legit[self.attr])

    def label(self, j: StratumValue) -> str:
        return stratum_label(self.kind, self.attr, j)

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.kind is ClaimsKind.LEGITIMATE:
            out["attr"] = self.attr
        if self.kind is not ClaimsKind.NONE:
            out["values"] = list(self.sorted_values())
        return out


@dataclass(frozen=True)
class RelevantGroupKey:
    """Identity of one relevant group: group label crossed with a stratum."""

    a: str
    j: StratumValue = None


def partition_relevant_groups(
    ds: Dataset, cd: ClaimsDifferentiator
) -> dict[RelevantGroupKey, list[int]]:
    """Partition record indices into relevant groups.

    Every declared (group, stratum) combination appears as a key, so empty
    relevant groups are visible to the caller rather than silently absent.
    Records whose stratum value lies outside ``cd.values`` appear in no
    bucket.
    """
    cd.validate_for(ds)
    buckets: dict[RelevantGroupKey, list[int]] = {}
    for a in ds.groups:
        for j in cd.sorted_values():
            buckets[RelevantGroupKey(a, j)] = []
    if cd.kind is ClaimsKind.NONE:
        for i, r in enumerate(ds.records):
            buckets[RelevantGroupKey(r.a, None)].append(i)
        return buckets
    allowed = cd.values
    for i, r in enumerate(ds.records):
        j = cd.stratum_of(r)
        if j in allowed:
            buckets[RelevantGroupKey(r.a, j)].append(i)
    return buckets


@dataclass(frozen=True)
class GroupSpec:
    """Synthetic population parameters for one group.

    ``base_rate`` is P(Y=1); ``accept_pos`` and ``accept_neg`` are the
    acceptance probabilities P(D=1 | Y=1) and P(D=1 | Y=0).
    """

    n: int
    base_rate: float
    accept_pos: float = 0.6
    accept_neg: float = 0.3

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise InvalidSpec(f"group size must be an integer >= 1, got {self.n!r}")
        for name in ("base_rate", "accept_pos", "accept_neg"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and np.isfinite(v) and 0.0 <= v <= 1.0):
                raise InvalidSpec(f"{name} must be a probability in [0, 1], got {v!r}")


@dataclass(frozen=True)
class SyntheticSpec:
    """Spec for a synthetic dataset: per-group populations, score noise,
    and optional legitimate attributes drawn uniformly."""

    groups: Mapping[str, GroupSpec]
    score_noise: float = 0.25
    legit: Mapping[str, tuple[str, ...]] | None = None

    def __post_init__(self):
        if not self.groups:
            raise InvalidSpec("synthetic spec needs at least one group")
        if not (np.isfinite(self.score_noise) and self.score_noise >= 0.0):
            raise InvalidSpec(f"score_noise must be >= 0, got {self.score_noise!r}")
        if self.legit is not None:
            for attr, values in self.legit.items():
                if not values:
                    raise InvalidSpec(f"legitimate attribute {attr!r} needs at least one value")


def generate_synthetic(spec: SyntheticSpec, seed: int) -> Dataset:
    """Generate a dataset from ``spec``; identical (spec, seed) pairs
    produce identical datasets.

    The score is the outcome blurred by Gaussian noise and clipped to
    [0, 1], so thresholds on it are informative but imperfect.
    """
    rng = np.random.default_rng(seed)
    records: list[Record] = []
    legit_attrs = tuple(sorted(spec.legit)) if spec.legit else ()
    for a in sorted(spec.groups):
        gs = spec.groups[a]
        y = (rng.random(gs.n) < gs.base_rate).astype(np.int64)
        noise = rng.normal(0.0, spec.score_noise, gs.n) if spec.score_noise > 0 else np.zeros(gs.n)
        score = np.clip(0.25 + 0.5 * y + noise, 0.0, 1.0)
        u = rng.random(gs.n)
        d = np.where(y == 1, u < gs.accept_pos, u < gs.accept_neg).astype(np.int64)
        drawn: dict[str, np.ndarray] = {}
        for attr in legit_attrs:
            values = spec.legit[attr]
            drawn[attr] = rng.integers(0, len(values), gs.n)
        for i in range(gs.n):
            legit = (
                {attr: spec.legit[attr][drawn[attr][i]] for attr in legit_attrs}
                if legit_attrs
                else None
            )
            records.append(
                Record(
                    id=f"{a}-{i}",
                    a=a,
                    y=int(y[i]),
                    d=int(d[i]),
                    score=float(score[i]),
                    legit=legit,
                )
            )
    schema = {attr: tuple(spec.legit[attr]) for attr in legit_attrs} if legit_attrs else None
    return Dataset.build(records, groups=sorted(spec.groups), legit_schema=schema)


def exact_rate_dataset(
    groups: Mapping[str, tuple[int, float]],
    with_scores: bool = False,
    decision: int = 0,
) -> Dataset:
    """Deterministic dataset whose empirical base rates are exact.

    Each group of size n gets exactly round(base_rate * n) positive
    outcomes. With ``with_scores`` the score ranks records so that the
    positives sit at the top, which makes threshold rules act cleanly.
    All decisions are set to ``decision``; rule evaluation replaces them.
    """
    records: list[Record] = []
    for a in sorted(groups):
        n, rate = groups[a]
        if not (isinstance(n, int) and n >= 1):
            raise InvalidSpec(f"group size must be an integer >= 1, got {n!r}")
        if not (0.0 <= rate <= 1.0):
            raise InvalidSpec(f"base rate must be in [0, 1], got {rate!r}")
        n_pos = round(rate * n)
        for i in range(n):
            records.append(
                Record(
                    id=f"{a}-{i}",
                    a=a,
                    y=1 if i < n_pos else 0,
                    d=decision,
                    score=(n - i - 0.5) / n if with_scores else None,
                )
            )
    return Dataset.build(records, groups=sorted(groups))


@dataclass(frozen=True)
class ColumnSchema:
    """Column mapping for CSV ingestion.

    ``id`` and ``score`` default to columns named "id" and "score" when
    present. ``legit`` names columns to treat as legitimate attributes.
    ``groups``, when given, is the declared group set; otherwise the
    observed labels are used.
    """

    a: str = "a"
    y: str = "y"
    d: str = "d"
    id: str | None = None
    score: str | None = None
    legit: tuple[str, ...] = ()
    groups: tuple[str, ...] | None = None


def _parse_binary(raw: str, column: str, row: int) -> int:
    v = raw.strip()
    if v == "0":
        return 0
    if v == "1":
        return 1
    raise NonBinaryValue(column, raw, row)


def load_dataset(path: str | Path, schema: ColumnSchema = ColumnSchema()) -> Dataset:
    """Load a CSV file into a Dataset.

    Errors name the offending data row (1-based) and column.
    """
    with open(path, "r", newline="", encoding="utf-8") as fh:
        return _read_csv(fh, schema, origin=str(path))


def parse_dataset_csv(text: str, schema: ColumnSchema = ColumnSchema()) -> Dataset:
    """Parse CSV text into a Dataset; same validation as load_dataset."""
    return _read_csv(io.StringIO(text), schema, origin="csv input")


def _read_csv(fh, schema: ColumnSchema, origin: str) -> Dataset:
    reader = csv.DictReader(fh)
    if reader.fieldnames is None:
        raise ValidationError(f"{origin}: file is empty")
    fields = reader.fieldnames
    id_col = schema.id if schema.id is not None else ("id" if "id" in fields else None)
    score_col = (
        schema.score if schema.score is not None else ("score" if "score" in fields else None)
    )
    for col in (schema.a, schema.y, schema.d, *schema.legit):
        if col not in fields:
            raise MissingColumn(col)
    if id_col is not None and id_col not in fields:
        raise MissingColumn(id_col)
    if score_col is not None and score_col not in fields:
        raise MissingColumn(score_col)
    declared = set(schema.groups) if schema.groups is not None else None
    records: list[Record] = []
    for row_no, row in enumerate(reader, start=1):
        a = (row[schema.a] or "").strip()
        if declared is not None and a not in declared:
            raise UnknownGroup(a, row_no)
        y = _parse_binary(row[schema.y] or "", schema.y, row_no)
        d = _parse_binary(row[schema.d] or "", schema.d, row_no)
        score = None
        if score_col is not None:
            raw = (row[score_col] or "").strip()
            if raw:
                try:
                    score = float(raw)
                except ValueError:
                    raise ScoreOutOfRange(raw, row_no) from None
                if not (np.isfinite(score) and 0.0 <= score <= 1.0):
                    raise ScoreOutOfRange(raw, row_no)
        legit = (
            {col: (row[col] or "").strip() for col in schema.legit} if schema.legit else None
        )
        rid = (row[id_col] or "").strip() if id_col is not None else str(row_no)
        records.append(Record(id=rid, a=a, y=y, d=d, score=score, legit=legit))
    if not records:
        raise ValidationError(f"{origin}: no data rows")
    return Dataset.build(records, groups=schema.groups)


def _format_score(score: float) -> str:
    return repr(float(score))


def dataset_csv_bytes(ds: Dataset) -> bytes:
    """Canonical CSV serialization: fixed column order, newline-terminated
    rows, shortest round-tripping float format for scores."""
    buf = io.StringIO()
    attrs = tuple(sorted(ds.legit_schema))
    has_score = any(r.score is not None for r in ds.records)
    cols = ["id", "a", "y", "d"] + (["score"] if has_score else []) + list(attrs)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in ds.records:
        row = [r.id, r.a, str(r.y), str(r.d)]
        if has_score:
            row.append(_format_score(r.score) if r.score is not None else "")
        for attr in attrs:
            row.append(r.legit[attr])
        writer.writerow(row)
    return buf.getvalue().encode("utf-8")


def write_dataset(ds: Dataset, path: str | Path) -> None:
    Path(path).write_bytes(dataset_csv_bytes(ds))


def dataset_hash(ds: Dataset) -> str:
    return hashlib.sha256(dataset_csv_bytes(ds)).hexdigest()


def read_back_schema(ds: Dataset) -> ColumnSchema:
    """Schema that reloads a written dataset with the same structure."""
    return ColumnSchema(legit=tuple(sorted(ds.legit_schema)), groups=ds.groups)
