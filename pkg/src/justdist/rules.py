"""Decision-rule spaces and exhaustive pattern-optimal search.

Two rule families: per-group acceptance rates (randomized decisions,
evaluated analytically in expectation) and per-group score thresholds
(deterministic decisions). The optimizer scans a finite grid of parameter
vectors, scores each candidate with a pattern objective, and breaks ties
by preferring higher total utility and then the lexicographically
smallest parameter vector. A Pareto frontier over (total utility,
egalitarian gap) exposes the equality/welfare trade-off, including the
leveling-down corner where perfect equality is reached by giving both
groups nothing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Mapping, Sequence

import numpy as np

from .data import (
    ClaimsDifferentiator,
    ClaimsKind,
    Dataset,
    RelevantGroupKey,
    StratumValue,
    exact_rate_dataset,
    partition_relevant_groups,
)
from .errors import (
    EmptyRelevantGroup,
    InfeasibleSpace,
    MissingScore,
    NotDefined,
    ValidationError,
)
from .patterns import (
    PatternKind,
    PatternSpec,
    egalitarian_value,
    maximin_value,
    prioritarian_value,
    sufficientarian_count,
)
from .utility import ProfileEntry, UtilityProfile, UtilityWeights, WeightTable


class RuleKind(str, Enum):
    GROUP_RATES = "group_rates"
    GROUP_THRESHOLDS = "group_thresholds"


@dataclass(frozen=True)
class DecisionRule:
    """One parameter per group: an acceptance probability for group_rates,
    a score threshold (accept when score >= threshold) for
    group_thresholds. Parameters live in [0, 1]."""

    kind: RuleKind
    params: Mapping[str, float]

    def __post_init__(self):
        if not self.params:
            raise ValidationError("a decision rule needs at least one group parameter")
        for a, v in self.params.items():
            if not (isinstance(v, (int, float)) and np.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValidationError(f"parameter for group {a!r} must be in [0, 1], got {v!r}")

    def validate_for(self, ds: Dataset) -> None:
        missing = [g for g in ds.groups if g not in self.params]
        if missing:
            raise ValidationError(f"rule is missing parameters for group(s) {missing}")
        extra = [g for g in self.params if g not in ds.groups]
        if extra:
            raise ValidationError(f"rule has parameters for undeclared group(s) {extra}")

    def vector(self, groups: Sequence[str]) -> tuple[float, ...]:
        return tuple(float(self.params[a]) for a in groups)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "params": {a: float(v) for a, v in sorted(self.params.items())},
        }


@dataclass(frozen=True)
class RuleSpace:
    """Finite candidate grid per group. Grids are sorted and deduplicated,
    so candidate enumeration is lexicographic in the parameter vector."""

    kind: RuleKind
    grids: Mapping[str, tuple[float, ...]]

    def __post_init__(self):
        if not self.grids:
            raise InfeasibleSpace("rule space declares no groups")
        clean = {}
        for a, grid in self.grids.items():
            values = sorted(set(float(v) for v in grid))
            if not values:
                raise InfeasibleSpace(f"group {a!r} has an empty candidate grid")
            for v in values:
                if not (np.isfinite(v) and 0.0 <= v <= 1.0):
                    raise InfeasibleSpace(
                        f"grid value {v!r} for group {a!r} is outside [0, 1]"
                    )
            clean[a] = tuple(values)
        object.__setattr__(self, "grids", clean)

    def validate_for(self, ds: Dataset) -> None:
        missing = [g for g in ds.groups if g not in self.grids]
        if missing:
            raise InfeasibleSpace(f"rule space is missing grids for group(s) {missing}")
        extra = [g for g in self.grids if g not in ds.groups]
        if extra:
            raise InfeasibleSpace(f"rule space has grids for undeclared group(s) {extra}")

    def candidate_count(self) -> int:
        count = 1
        for grid in self.grids.values():
            count *= len(grid)
        return count

    def vectors(self, groups: Sequence[str]) -> Iterator[tuple[float, ...]]:
        return itertools.product(*(self.grids[a] for a in groups))


@dataclass(frozen=True)
class FrontierPoint:
    rule: DecisionRule
    total_utility: float
    egalitarian_gap: float


@dataclass(frozen=True)
class OptimizationResult:
    objective: PatternSpec
    best_rule: DecisionRule
    best_value: float
    profile_at_best: UtilityProfile
    candidates: int
    skipped: int
    frontier: tuple[FrontierPoint, ...] | None = None


@dataclass(frozen=True)
class _Bucket:
    key: RelevantGroupKey
    group_index: int
    n: int
    su1: float
    su0: float
    scores: np.ndarray | None = None
    pre_u1: np.ndarray | None = None
    pre_u0: np.ndarray | None = None


class _RuleEvaluator:
    """Precomputed sums that make a single candidate evaluation O(buckets).

    For every record, u1/u0 is its utility if accepted/rejected. Group
    rates mix those linearly; thresholds split each sorted-score bucket by
    binary search over precomputed prefix sums.
    """

    def __init__(self, ds: Dataset, cd: ClaimsDifferentiator, w: UtilityWeights, kind: RuleKind):
        w.validate_for(ds)
        cd.validate_for(ds)
        self.ds = ds
        self.cd = cd
        self.weights = w
        self.kind = kind
        self.groups = ds.groups
        y = ds.y_values
        tables = [w.table_for(a) for a in ds.groups]
        w11 = np.array([t.w11 for t in tables])[ds.a_codes]
        w10 = np.array([t.w10 for t in tables])[ds.a_codes]
        w01 = np.array([t.w01 for t in tables])[ds.a_codes]
        w00 = np.array([t.w00 for t in tables])[ds.a_codes]
        u1 = y * w11 + (1 - y) * w10
        u0 = y * w01 + (1 - y) * w00
        self.n_total = len(ds.records)

        scores = None
        if kind is RuleKind.GROUP_THRESHOLDS:
            scores = ds.scores
            if scores is None:
                offender = next(r for r in ds.records if r.score is None)
                raise MissingScore(offender.id)

        self.n_all: list[int] = []
        self.su1_all: list[float] = []
        self.su0_all: list[float] = []
        self.group_scores: list[np.ndarray] = []
        self.group_pre_u1: list[np.ndarray] = []
        self.group_pre_u0: list[np.ndarray] = []
        for gi in range(len(ds.groups)):
            mask = ds.a_codes == gi
            gu1 = u1[mask]
            gu0 = u0[mask]
            self.n_all.append(int(mask.sum()))
            self.su1_all.append(float(gu1.sum()))
            self.su0_all.append(float(gu0.sum()))
            if scores is not None:
                gs = scores[mask]
                order = np.argsort(gs, kind="stable")
                self.group_scores.append(gs[order])
                self.group_pre_u1.append(np.concatenate(([0.0], np.cumsum(gu1[order]))))
                self.group_pre_u0.append(np.concatenate(([0.0], np.cumsum(gu0[order]))))

        self.decision_strata: tuple[StratumValue, ...] = ()
        self.buckets: list[_Bucket] = []
        self.fixed_empty: tuple[RelevantGroupKey, ...] = ()
        if cd.kind is ClaimsKind.DECISION:
            self.decision_strata = cd.sorted_values()
        else:
            parts = partition_relevant_groups(ds, cd)
            gidx = {a: i for i, a in enumerate(ds.groups)}
            empty = []
            for key, idx in parts.items():
                if not idx:
                    empty.append(key)
                    continue
                sel = np.asarray(idx, dtype=np.int64)
                bu1 = u1[sel]
                bu0 = u0[sel]
                bucket = dict(
                    key=key,
                    group_index=gidx[key.a],
                    n=len(idx),
                    su1=float(bu1.sum()),
                    su0=float(bu0.sum()),
                )
                if scores is not None:
                    bs = scores[sel]
                    order = np.argsort(bs, kind="stable")
                    bucket["scores"] = bs[order]
                    bucket["pre_u1"] = np.concatenate(([0.0], np.cumsum(bu1[order])))
                    bucket["pre_u0"] = np.concatenate(([0.0], np.cumsum(bu0[order])))
                self.buckets.append(_Bucket(**bucket))
            self.fixed_empty = tuple(empty)

    def _split(self, gi: int, theta: float) -> tuple[int, int]:
        """(#rejected, #accepted) for group gi under threshold theta."""
        idx = int(np.searchsorted(self.group_scores[gi], theta, side="left"))
        return idx, self.n_all[gi] - idx

    def entries(
        self, params: tuple[float, ...]
    ) -> tuple[dict[RelevantGroupKey, tuple[float, float]], list[RelevantGroupKey]]:
        out: dict[RelevantGroupKey, tuple[float, float]] = {}
        empty: list[RelevantGroupKey] = []
        if self.cd.kind is ClaimsKind.DECISION:
            for gi, a in enumerate(self.groups):
                if self.kind is RuleKind.GROUP_RATES:
                    p = params[gi]
                    n_acc = p * self.n_all[gi]
                    n_rej = (1.0 - p) * self.n_all[gi]
                    eu_acc = self.su1_all[gi] / self.n_all[gi]
                    eu_rej = self.su0_all[gi] / self.n_all[gi]
                else:
                    idx, acc = self._split(gi, params[gi])
                    n_acc = float(acc)
                    n_rej = float(idx)
                    eu_acc = (
                        (self.su1_all[gi] - float(self.group_pre_u1[gi][idx])) / acc
                        if acc > 0
                        else 0.0
                    )
                    eu_rej = float(self.group_pre_u0[gi][idx]) / idx if idx > 0 else 0.0
                for j in self.decision_strata:
                    key = RelevantGroupKey(a, j)
                    n_j = n_acc if j == 1 else n_rej
                    if n_j > 0:
                        out[key] = ((eu_acc if j == 1 else eu_rej), float(n_j))
                    else:
                        empty.append(key)
            return out, empty
        for b in self.buckets:
            if self.kind is RuleKind.GROUP_RATES:
                p = params[b.group_index]
                eu = (p * b.su1 + (1.0 - p) * b.su0) / b.n
            else:
                idx = int(np.searchsorted(b.scores, params[b.group_index], side="left"))
                eu = ((b.su1 - float(b.pre_u1[idx])) + float(b.pre_u0[idx])) / b.n
            out[b.key] = (float(eu), float(b.n))
        return out, list(self.fixed_empty)

    def total_utility(self, params: tuple[float, ...]) -> float:
        """Population mean utility per record under the rule."""
        total = 0.0
        for gi in range(len(self.groups)):
            if self.kind is RuleKind.GROUP_RATES:
                p = params[gi]
                total += p * self.su1_all[gi] + (1.0 - p) * self.su0_all[gi]
            else:
                idx, _ = self._split(gi, params[gi])
                total += (self.su1_all[gi] - float(self.group_pre_u1[gi][idx])) + float(
                    self.group_pre_u0[gi][idx]
                )
        return total / self.n_total

    def objective_value(self, params: tuple[float, ...], objective: PatternSpec) -> float:
        entries, _ = self.entries(params)
        covered = {k.a for k in entries}
        missing = [g for g in self.groups if g not in covered]
        if missing:
            raise NotDefined(f"rule leaves group(s) {missing} with no relevant group")
        if objective.kind is PatternKind.EGALITARIAN:
            by_stratum: dict[StratumValue, dict[str, float]] = {}
            for k, (eu, _n) in entries.items():
                by_stratum.setdefault(k.j, {})[k.a] = eu
            value, _ = egalitarian_value(by_stratum, self.groups)
            return value
        values = tuple(eu for eu, _n in entries.values())
        if objective.kind is PatternKind.MAXIMIN:
            return maximin_value(values)
        if objective.kind is PatternKind.PRIORITARIAN:
            return prioritarian_value(values, objective.k)
        return float(sufficientarian_count(values, objective.t))

    def gap(self, params: tuple[float, ...]) -> float:
        entries, _ = self.entries(params)
        by_stratum: dict[StratumValue, dict[str, float]] = {}
        for k, (eu, _n) in entries.items():
            by_stratum.setdefault(k.j, {})[k.a] = eu
        value, _ = egalitarian_value(by_stratum, self.groups)
        return value

    def profile(self, rule: DecisionRule) -> UtilityProfile:
        params = rule.vector(self.groups)
        entries, empty = self.entries(params)
        covered = {k.a for k in entries}
        missing = [g for g in self.groups if g not in covered]
        if missing:
            labels = tuple(
                f"a={k.a}, {self.cd.label(k.j)}" for k in empty if k.a in missing
            )
            raise EmptyRelevantGroup(labels)
        return UtilityProfile(
            entries={
                k: ProfileEntry(expected_utility=eu, n=n) for k, (eu, n) in entries.items()
            },
            weights_used=self.weights,
            cd=self.cd,
            empty_keys=tuple(empty),
        )


def evaluate_rule(
    ds: Dataset, rule: DecisionRule, cd: ClaimsDifferentiator, w: UtilityWeights
) -> UtilityProfile:
    """Expected utility per relevant group under a hypothetical rule.

    Group-rate rules are evaluated analytically: each record contributes
    p_a times its accepted utility plus (1 - p_a) times its rejected
    utility. When the claims differentiator stratifies on the decision,
    the rule's own (possibly randomized) decisions stratify the records,
    so counts can be fractional.
    """
    rule.validate_for(ds)
    ev = _RuleEvaluator(ds, cd, w, rule.kind)
    return ev.profile(rule)


def optimize(
    ds: Dataset,
    space: RuleSpace,
    cd: ClaimsDifferentiator,
    w: UtilityWeights,
    objective: PatternSpec,
    include_frontier: bool = False,
) -> OptimizationResult:
    """Exhaustively search the grid for the pattern-optimal rule.

    Candidates on which the objective is undefined (a rule that empties a
    group's relevant groups) are skipped. Ties on the objective prefer
    the candidate with the higher total utility, then the
    lexicographically smallest parameter vector; enumeration is already
    lexicographic, so the first of any remaining tie wins.
    """
    space.validate_for(ds)
    ev = _RuleEvaluator(ds, cd, w, space.kind)
    lower_better = objective.kind is PatternKind.EGALITARIAN
    best_params: tuple[float, ...] | None = None
    best_value = 0.0
    best_total: float | None = None
    candidates = 0
    skipped = 0
    for params in space.vectors(ds.groups):
        candidates += 1
        try:
            value = ev.objective_value(params, objective)
        except NotDefined:
            skipped += 1
            continue
        if best_params is None:
            best_params, best_value, best_total = params, value, None
            continue
        better = value < best_value if lower_better else value > best_value
        if better:
            best_params, best_value, best_total = params, value, None
        elif value == best_value:
            if best_total is None:
                best_total = ev.total_utility(best_params)
            total = ev.total_utility(params)
            if total > best_total:
                best_params, best_total = params, total
    if best_params is None:
        raise NotDefined("no candidate rule yields a defined objective value")
    best_rule = DecisionRule(kind=space.kind, params=dict(zip(ds.groups, best_params)))
    frontier = pareto_frontier(ds, space, cd, w, _evaluator=ev) if include_frontier else None
    return OptimizationResult(
        objective=objective,
        best_rule=best_rule,
        best_value=float(best_value),
        profile_at_best=ev.profile(best_rule),
        candidates=candidates,
        skipped=skipped,
        frontier=frontier,
    )


def check_pattern_criterion(
    ds: Dataset,
    space: RuleSpace,
    cd: ClaimsDifferentiator,
    w: UtilityWeights,
    rule: DecisionRule,
    objective: PatternSpec,
    tol: float = 1e-9,
) -> bool:
    """Does ``rule`` realize the pattern criterion over the grid?

    True when the rule's objective value is within ``tol`` of the grid
    optimum. The rule itself is evaluated exactly whether or not it lies
    on the grid.
    """
    if rule.kind is not space.kind:
        raise ValidationError(
            f"rule kind {rule.kind.value!r} does not match space kind {space.kind.value!r}"
        )
    rule.validate_for(ds)
    ev = _RuleEvaluator(ds, cd, w, rule.kind)
    value = ev.objective_value(rule.vector(ds.groups), objective)
    opt = optimize(ds, space, cd, w, objective).best_value
    if objective.kind is PatternKind.EGALITARIAN:
        return value <= opt + tol
    return value >= opt - tol


def pareto_frontier(
    ds: Dataset,
    space: RuleSpace,
    cd: ClaimsDifferentiator,
    w: UtilityWeights,
    _evaluator: "_RuleEvaluator | None" = None,
) -> tuple[FrontierPoint, ...]:
    """Rules not dominated in (higher total utility, lower egalitarian
    gap), sorted by gap ascending. Exact ties collapse to the
    lexicographically smallest parameter vector."""
    space.validate_for(ds)
    ev = _evaluator
    if ev is None:
        ev = _RuleEvaluator(ds, cd, w, space.kind)
    points: list[tuple[float, float, tuple[float, ...]]] = []
    for params in space.vectors(ds.groups):
        try:
            gap = ev.gap(params)
        except NotDefined:
            continue
        points.append((gap, ev.total_utility(params), params))
    if not points:
        raise NotDefined("no candidate rule yields a defined egalitarian gap")
    points.sort(key=lambda p: (p[0], -p[1], p[2]))
    frontier: list[FrontierPoint] = []
    best_total = -np.inf
    for gap, total, params in points:
        if total > best_total:
            frontier.append(
                FrontierPoint(
                    rule=DecisionRule(kind=space.kind, params=dict(zip(ds.groups, params))),
                    total_utility=float(total),
                    egalitarian_gap=float(gap),
                )
            )
            best_total = total
    return tuple(frontier)


def leveling_down_scenario(n_per_group: int = 1000):
    """Two-group scenario where equalizing utilities levels everyone down.

    Base rates 0.2 and 0.8 (exact), weights that reward accepting
    positives and penalize accepting negatives (1, -1, 0, 0), and an
    11-point acceptance-rate grid per group. The egalitarian optimum
    accepts no one; maximin accepts everyone in the high-base-rate group.

    Returns (dataset, space, cd, weights).
    """
    ds = exact_rate_dataset({"0": (n_per_group, 0.2), "1": (n_per_group, 0.8)})
    w = UtilityWeights(shared=WeightTable(1.0, -1.0, 0.0, 0.0))
    grid = tuple(i / 10 for i in range(11))
    space = RuleSpace(kind=RuleKind.GROUP_RATES, grids={"0": grid, "1": grid})
    return ds, space, ClaimsDifferentiator.none(), w
