"""Classical group fairness criteria as rate gaps.

Each criterion compares a conditional rate across groups: acceptance rates
for parity-style criteria, positive rates within a decision class for
calibration-style criteria. Gaps are absolute differences; with more than
two groups the largest pairwise gap governs, and criteria with several
conditioning strata aggregate by the worst stratum.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from .data import ClaimsKind, Dataset, StratumValue, stratum_label
from .errors import InvalidSpec, UndefinedRate


class CriterionKind(str, Enum):
    STATISTICAL_PARITY = "statistical_parity"
    CONDITIONAL_STATISTICAL_PARITY = "conditional_statistical_parity"
    EQUALITY_OF_OPPORTUNITY = "equality_of_opportunity"
    FPR_PARITY = "false_positive_rate_parity"
    EQUALIZED_ODDS = "equalized_odds"
    PREDICTIVE_PARITY = "predictive_parity"
    FOR_PARITY = "false_omission_rate_parity"
    SUFFICIENCY = "sufficiency"


@dataclass(frozen=True)
class ClassicalCriterion:
    """A criterion kind; conditional statistical parity also carries the
    stratifying attribute and an optional value subset (default: all
    declared values)."""

    kind: CriterionKind
    attr: str | None = None
    values: frozenset | None = None

    def __post_init__(self):
        if self.kind is CriterionKind.CONDITIONAL_STATISTICAL_PARITY:
            if not self.attr:
                raise InvalidSpec("conditional statistical parity needs an attribute name")
        elif self.attr is not None or self.values is not None:
            raise InvalidSpec(f"criterion {self.kind.value!r} takes no attr or values")

    def label(self) -> str:
        if self.kind is CriterionKind.CONDITIONAL_STATISTICAL_PARITY:
            return f"{self.kind.value}[{self.attr}]"
        return self.kind.value


@dataclass(frozen=True)
class GapReport:
    """Per-stratum rate gaps for one criterion, worst-stratum overall."""

    criterion: ClassicalCriterion
    gaps: Mapping[str, float]
    overall: float
    satisfied: bool


# Each criterion is a rate (numerator predicate given a conditioning
# predicate) measured per group within each stratum:
#   statistical parity            P(D=1 | A=a)
#   conditional stat. parity      P(D=1 | L=l, A=a)
#   equality of opportunity       P(D=1 | Y=1, A=a)
#   false positive rate parity    P(D=1 | Y=0, A=a)
#   equalized odds                both Y strata
#   predictive parity             P(Y=1 | D=1, A=a)
#   false omission rate parity    P(Y=1 | D=0, A=a)
#   sufficiency                   both D strata


def _strata_plan(
    ds: Dataset, c: ClassicalCriterion
) -> list[tuple[StratumValue, np.ndarray, np.ndarray, str]]:
    """(stratum value, conditioning mask, numerator values, label) tuples."""
    y = ds.y_values
    d = ds.d_values
    all_true = np.ones(len(ds.records), dtype=bool)
    k = c.kind
    if k is CriterionKind.STATISTICAL_PARITY:
        return [(None, all_true, d, stratum_label(ClaimsKind.NONE, None, None))]
    if k is CriterionKind.CONDITIONAL_STATISTICAL_PARITY:
        if c.attr not in ds.legit_schema:
            raise InvalidSpec(f"attribute {c.attr!r} is not a declared legitimate attribute")
        declared = ds.legit_schema[c.attr]
        wanted = sorted(c.values, key=str) if c.values is not None else list(declared)
        extra = [v for v in wanted if v not in declared]
        if extra:
            raise InvalidSpec(
                f"values {extra} for attribute {c.attr!r} are not in the declared value set"
            )
        codes = ds.legit_codes(c.attr)
        idx = {v: i for i, v in enumerate(declared)}
        return [
            (v, codes == idx[v], d, stratum_label(ClaimsKind.LEGITIMATE, c.attr, v))
            for v in wanted
        ]
    if k is CriterionKind.EQUALITY_OF_OPPORTUNITY:
        return [(1, y == 1, d, stratum_label(ClaimsKind.OUTCOME, None, 1))]
    if k is CriterionKind.FPR_PARITY:
        return [(0, y == 0, d, stratum_label(ClaimsKind.OUTCOME, None, 0))]
    if k is CriterionKind.EQUALIZED_ODDS:
        return [
            (0, y == 0, d, stratum_label(ClaimsKind.OUTCOME, None, 0)),
            (1, y == 1, d, stratum_label(ClaimsKind.OUTCOME, None, 1)),
        ]
    if k is CriterionKind.PREDICTIVE_PARITY:
        return [(1, d == 1, y, stratum_label(ClaimsKind.DECISION, None, 1))]
    if k is CriterionKind.FOR_PARITY:
        return [(0, d == 0, y, stratum_label(ClaimsKind.DECISION, None, 0))]
    if k is CriterionKind.SUFFICIENCY:
        return [
            (0, d == 0, y, stratum_label(ClaimsKind.DECISION, None, 0)),
            (1, d == 1, y, stratum_label(ClaimsKind.DECISION, None, 1)),
        ]
    raise InvalidSpec(f"unknown criterion kind {k!r}")


def group_rates(ds: Dataset, c: ClassicalCriterion) -> dict[str, dict[str, float]]:
    """The conditional rate per stratum and group, {stratum label: {a: rate}}.
    Raises UndefinedRate on an empty conditioning cell."""
    out: dict[str, dict[str, float]] = {}
    for _, mask, num, label in _strata_plan(ds, c):
        rates: dict[str, float] = {}
        for code, a in enumerate(ds.groups):
            cell = mask & (ds.a_codes == code)
            denom = int(cell.sum())
            if denom == 0:
                raise UndefinedRate(c.label(), f"(a={a}, {label})")
            rates[a] = float(num[cell].mean())
        out[label] = rates
    return out


def classical_gap(ds: Dataset, c: ClassicalCriterion, tol: float = 1e-9) -> GapReport:
    """Absolute rate gap per stratum; overall is the worst stratum and the
    criterion is satisfied when that stays within ``tol``."""
    rates = group_rates(ds, c)
    gaps: dict[str, float] = {}
    for label, per_group in rates.items():
        vs = list(per_group.values())
        gaps[label] = max(vs) - min(vs) if len(vs) > 1 else 0.0
    overall = max(gaps.values())
    return GapReport(criterion=c, gaps=gaps, overall=overall, satisfied=overall <= tol)


def standard_criteria(ds: Dataset) -> list[ClassicalCriterion]:
    """Every criterion computable on this dataset: the seven unconditional
    ones plus conditional statistical parity for each declared attribute."""
    out = [
        ClassicalCriterion(CriterionKind.STATISTICAL_PARITY),
        ClassicalCriterion(CriterionKind.EQUALITY_OF_OPPORTUNITY),
        ClassicalCriterion(CriterionKind.FPR_PARITY),
        ClassicalCriterion(CriterionKind.EQUALIZED_ODDS),
        ClassicalCriterion(CriterionKind.PREDICTIVE_PARITY),
        ClassicalCriterion(CriterionKind.FOR_PARITY),
        ClassicalCriterion(CriterionKind.SUFFICIENCY),
    ]
    for attr in sorted(ds.legit_schema):
        out.append(
            ClassicalCriterion(CriterionKind.CONDITIONAL_STATISTICAL_PARITY, attr=attr)
        )
    return out
