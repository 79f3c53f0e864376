"""Distribution-pattern metrics over utility profiles.

Four patterns: egalitarian (absolute gap between group utilities, lower is
better), maximin (utility of the worst-off group), prioritarian (weighted
sum giving the worst-off group a factor k > 1), and sufficientarian (count
of groups at or above a threshold t). Metrics never treat an empty group
as zero; a stratum missing a group makes the gap undefined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .data import StratumValue
from .errors import InvalidK, NotDefined, ValidationError
from .utility import UtilityProfile


class PatternKind(str, Enum):
    EGALITARIAN = "egalitarian"
    MAXIMIN = "maximin"
    PRIORITARIAN = "prioritarian"
    SUFFICIENTARIAN = "sufficientarian"


class Direction(str, Enum):
    LOWER_BETTER = "lower_better"
    HIGHER_BETTER = "higher_better"


@dataclass(frozen=True)
class PatternSpec:
    """A pattern choice plus its parameters: k for prioritarian weighting,
    t for the sufficiency threshold."""

    kind: PatternKind
    k: float | None = None
    t: float | None = None

    def __post_init__(self):
        if self.kind is PatternKind.PRIORITARIAN:
            if self.k is None or not (math.isfinite(self.k) and self.k > 1.0):
                raise InvalidK(self.k)
        if self.kind is PatternKind.SUFFICIENTARIAN:
            if self.t is None or not math.isfinite(self.t):
                raise ValidationError(f"sufficiency threshold t must be finite, got {self.t!r}")

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.k is not None:
            out["k"] = self.k
        if self.t is not None:
            out["t"] = self.t
        return out


@dataclass(frozen=True)
class PatternResult:
    kind: PatternKind
    value: float
    direction: Direction
    satisfied: bool | None
    per_stratum: Mapping[str, float]


def direction_of(kind: PatternKind) -> Direction:
    return Direction.LOWER_BETTER if kind is PatternKind.EGALITARIAN else Direction.HIGHER_BETTER


# Core computations over {stratum: {group: utility}} maps. The rule
# optimizer calls these directly so the searched objective and the
# reported metric cannot drift apart.


def egalitarian_value(
    by_stratum: Mapping[StratumValue, Mapping[str, float]], groups: tuple[str, ...]
) -> tuple[float, dict[StratumValue, float]]:
    """Largest pairwise utility gap per stratum; overall value is the worst
    stratum. Raises NotDefined when a stratum lacks one of ``groups``."""
    per: dict[StratumValue, float] = {}
    for j, utils in by_stratum.items():
        missing = [g for g in groups if g not in utils]
        if missing:
            raise NotDefined(
                f"gap undefined: stratum {str(j)!r} has no records for group(s) {missing}"
            )
        vs = [utils[g] for g in groups]
        per[j] = max(vs) - min(vs) if len(vs) > 1 else 0.0
    if not per:
        raise NotDefined("gap undefined: profile has no strata")
    return max(per.values()), per


def maximin_value(values: tuple[float, ...]) -> float:
    if not values:
        raise NotDefined("maximin undefined on an empty profile")
    return min(values)


def prioritarian_value(values: tuple[float, ...], k: float) -> float:
    """k times the worst entry plus the rest; on ties for the minimum the
    factor applies to exactly one entry."""
    if not (math.isfinite(k) and k > 1.0):
        raise InvalidK(k)
    if not values:
        raise NotDefined("prioritarian value undefined on an empty profile")
    lo = min(values)
    rest = list(values)
    rest.remove(lo)
    return k * lo + sum(rest)


def sufficientarian_count(values: tuple[float, ...], t: float) -> int:
    if not math.isfinite(t):
        raise ValidationError(f"sufficiency threshold t must be finite, got {t!r}")
    if not values:
        raise NotDefined("sufficiency count undefined on an empty profile")
    return sum(1 for v in values if v >= t)


def egalitarian_metric(
    profile: UtilityProfile, tol: float = 1e-9, ratio: bool = False
) -> PatternResult:
    """Gap between group utilities, per stratum, worst stratum governs.

    With ``ratio`` the metric is max/min within each stratum (1 is perfect);
    it is undefined when any utility is zero or the sign is mixed, so the
    absolute difference stays the default.
    """
    by_stratum = profile.by_stratum()
    groups = profile.groups()
    if ratio:
        per: dict = {}
        for j, utils in by_stratum.items():
            missing = [g for g in groups if g not in utils]
            if missing:
                raise NotDefined(
                    f"ratio undefined: stratum {str(j)!r} has no records for group(s) {missing}"
                )
            vs = [utils[g] for g in groups]
            if min(vs) <= 0.0:
                raise NotDefined("ratio undefined for zero or non-positive utilities")
            per[j] = max(vs) / min(vs)
        value = max(per.values())
        labelled = {profile.cd.label(j): v for j, v in per.items()}
        return PatternResult(
            kind=PatternKind.EGALITARIAN,
            value=value,
            direction=Direction.LOWER_BETTER,
            satisfied=(value - 1.0) <= tol,
            per_stratum=labelled,
        )
    value, per = egalitarian_value(by_stratum, groups)
    labelled = {profile.cd.label(j): v for j, v in per.items()}
    return PatternResult(
        kind=PatternKind.EGALITARIAN,
        value=value,
        direction=Direction.LOWER_BETTER,
        satisfied=value <= tol,
        per_stratum=labelled,
    )


def maximin_metric(profile: UtilityProfile) -> PatternResult:
    """Utility of the worst-off relevant group; higher is better. There is
    no satisfied verdict: the criterion is comparative, not a threshold."""
    by_stratum = profile.by_stratum()
    per = {profile.cd.label(j): min(utils.values()) for j, utils in by_stratum.items()}
    return PatternResult(
        kind=PatternKind.MAXIMIN,
        value=maximin_value(profile.values()),
        direction=Direction.HIGHER_BETTER,
        satisfied=None,
        per_stratum=per,
    )


def prioritarian_metric(profile: UtilityProfile, k: float) -> PatternResult:
    """Priority-weighted total: k times the worst-off group's utility plus
    every other group's utility."""
    by_stratum = profile.by_stratum()
    per = {
        profile.cd.label(j): prioritarian_value(tuple(utils.values()), k)
        for j, utils in by_stratum.items()
    }
    return PatternResult(
        kind=PatternKind.PRIORITARIAN,
        value=prioritarian_value(profile.values(), k),
        direction=Direction.HIGHER_BETTER,
        satisfied=None,
        per_stratum=per,
    )


def sufficientarian_metric(profile: UtilityProfile, t: float) -> PatternResult:
    """Count of relevant groups at or above the threshold (inclusive).
    Satisfied exactly when every group reaches it."""
    by_stratum = profile.by_stratum()
    per = {
        profile.cd.label(j): float(sufficientarian_count(tuple(utils.values()), t))
        for j, utils in by_stratum.items()
    }
    count = sufficientarian_count(profile.values(), t)
    return PatternResult(
        kind=PatternKind.SUFFICIENTARIAN,
        value=float(count),
        direction=Direction.HIGHER_BETTER,
        satisfied=(count == len(profile.entries)),
        per_stratum=per,
    )


def evaluate_pattern(profile: UtilityProfile, spec: PatternSpec, tol: float = 1e-9) -> PatternResult:
    if spec.kind is PatternKind.EGALITARIAN:
        return egalitarian_metric(profile, tol=tol)
    if spec.kind is PatternKind.MAXIMIN:
        return maximin_metric(profile)
    if spec.kind is PatternKind.PRIORITARIAN:
        return prioritarian_metric(profile, spec.k)
    return sufficientarian_metric(profile, spec.t)
