"""Machine checks of the correspondence between utility-gap metrics and
classical fairness criteria.

Under specific weight conditions, the egalitarian utility gap over the
matching relevant groups equals a classical criterion's rate gap scaled by
a constant factor. classify_weights finds which criterion (if any) a
weight setting encodes for a given claims differentiator;
verify_proposition checks the identity numerically on a dataset;
randomized_equivalence_suite stress-tests it across seeded random
datasets and conforming random weights.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .classical import ClassicalCriterion, CriterionKind, group_rates
from .data import (
    ClaimsDifferentiator,
    ClaimsKind,
    Dataset,
    GroupSpec,
    StratumValue,
    SyntheticSpec,
    generate_synthetic,
)
from .errors import ConditionViolated, ValidationError
from .patterns import egalitarian_value
from .utility import UtilityProfile, UtilityWeights, WeightTable, utility_profile

NEAR_EQUAL_TOL = 1e-12

_ENTRIES = ("w11", "w10", "w01", "w00")


@dataclass(frozen=True)
class _Row:
    """One row of the weight-condition table: the criterion it encodes,
    the claims differentiator it requires, the weight conditions, and the
    entry pair whose absolute difference scales the rate gap per stratum."""

    criterion: CriterionKind
    cd_kind: ClaimsKind
    cd_values: frozenset | None  # None: any value subset (legitimate attrs)
    equal: tuple[tuple[str, str], ...]
    unequal: tuple[tuple[str, str], ...]
    constrained: tuple[str, ...]
    factor: Mapping[StratumValue, tuple[str, str]]


_ROWS: tuple[_Row, ...] = (
    _Row(
        CriterionKind.STATISTICAL_PARITY,
        ClaimsKind.NONE,
        None,
        equal=(("w11", "w10"), ("w01", "w00")),
        unequal=(("w11", "w01"),),
        constrained=_ENTRIES,
        factor={None: ("w11", "w01")},
    ),
    _Row(
        CriterionKind.CONDITIONAL_STATISTICAL_PARITY,
        ClaimsKind.LEGITIMATE,
        None,
        equal=(("w11", "w10"), ("w01", "w00")),
        unequal=(("w11", "w01"),),
        constrained=_ENTRIES,
        factor={},  # filled per stratum at classification time
    ),
    _Row(
        CriterionKind.EQUALITY_OF_OPPORTUNITY,
        ClaimsKind.OUTCOME,
        frozenset({1}),
        equal=(),
        unequal=(("w11", "w01"),),
        constrained=("w11", "w01"),
        factor={1: ("w11", "w01")},
    ),
    _Row(
        CriterionKind.FPR_PARITY,
        ClaimsKind.OUTCOME,
        frozenset({0}),
        equal=(),
        unequal=(("w10", "w00"),),
        constrained=("w10", "w00"),
        factor={0: ("w10", "w00")},
    ),
    _Row(
        CriterionKind.EQUALIZED_ODDS,
        ClaimsKind.OUTCOME,
        frozenset({0, 1}),
        equal=(),
        unequal=(("w11", "w01"), ("w10", "w00")),
        constrained=_ENTRIES,
        factor={1: ("w11", "w01"), 0: ("w10", "w00")},
    ),
    _Row(
        CriterionKind.PREDICTIVE_PARITY,
        ClaimsKind.DECISION,
        frozenset({1}),
        equal=(),
        unequal=(("w11", "w10"),),
        constrained=("w11", "w10"),
        factor={1: ("w11", "w10")},
    ),
    _Row(
        CriterionKind.FOR_PARITY,
        ClaimsKind.DECISION,
        frozenset({0}),
        equal=(),
        unequal=(("w01", "w00"),),
        constrained=("w01", "w00"),
        factor={0: ("w01", "w00")},
    ),
    _Row(
        CriterionKind.SUFFICIENCY,
        ClaimsKind.DECISION,
        frozenset({0, 1}),
        equal=(),
        unequal=(("w11", "w10"), ("w01", "w00")),
        constrained=_ENTRIES,
        factor={1: ("w11", "w10"), 0: ("w01", "w00")},
    ),
)

# Entries a row leaves unconstrained may vary per group without breaking
# the correspondence; the suite exercises that freedom.
_FREE_ENTRIES: dict[CriterionKind, tuple[str, ...]] = {
    row.criterion: tuple(e for e in _ENTRIES if e not in row.constrained) for row in _ROWS
}


def _row_for(cd: ClaimsDifferentiator) -> _Row:
    for row in _ROWS:
        if row.cd_kind is not cd.kind:
            continue
        if row.cd_values is None or row.cd_values == cd.values:
            return row
    raise ValidationError(
        f"no criterion corresponds to claims differentiator kind {cd.kind.value!r} "
        f"with values {sorted(cd.values, key=str)}"
    )


def _warn_near_equal(name_a: str, name_b: str, va: float, vb: float) -> None:
    if va != vb and abs(va - vb) < NEAR_EQUAL_TOL:
        warnings.warn(
            f"weights {name_a} and {name_b} differ by {abs(va - vb):.3e}; equality "
            f"conditions are exact, so this looks like entry noise",
            stacklevel=3,
        )


@dataclass(frozen=True)
class WeightConditionFinding:
    """Result of classifying a weight setting against the condition table.

    ``matched`` is the encoded criterion or None. ``multiplier`` is the
    scale factor linking the utility gap to the rate gap; for the two
    conjunctive criteria (equalized odds, sufficiency) the factor varies
    by stratum and only ``stratum_multipliers`` is set.
    """

    matched: ClassicalCriterion | None
    required_cd: ClaimsDifferentiator
    conditions_checked: tuple[tuple[str, bool], ...]
    multiplier: float | None = None
    stratum_multipliers: Mapping[StratumValue, float] | None = None


def classify_weights(w: UtilityWeights, cd: ClaimsDifferentiator) -> WeightConditionFinding:
    """Decide which classical criterion, if any, this weight setting
    encodes for the given claims differentiator.

    Equality conditions are exact comparisons. A strict-inequality
    condition met by less than 1e-12 triggers a warning (the factor would
    be numerically meaningless), as does an equality condition missed by
    less than 1e-12.
    """
    row = _row_for(cd)
    tables: list[tuple[str, WeightTable]] = [("shared", w.shared)]
    if w.per_group:
        # Per-group tables shadow the shared one wherever they are defined;
        # independence is judged across the group tables themselves.
        tables = [(f"group {a!r}", w.per_group[a]) for a in sorted(w.per_group)]
    ref = tables[0][1]
    checked: list[tuple[str, bool]] = []
    ok = True

    independent = True
    for entry in row.constrained:
        vals = [(name, t.entry(entry)) for name, t in tables]
        base = vals[0][1]
        for name, v in vals[1:]:
            _warn_near_equal(f"{entry} ({vals[0][0]})", f"{entry} ({name})", base, v)
            if v != base:
                independent = False
    checked.append((f"{{{', '.join(row.constrained)}}} identical across groups", independent))
    ok = ok and independent

    for x, y_ in row.equal:
        vx, vy = ref.entry(x), ref.entry(y_)
        _warn_near_equal(x, y_, vx, vy)
        holds = vx == vy
        checked.append((f"{x} == {y_}", holds))
        ok = ok and holds
    for x, y_ in row.unequal:
        vx, vy = ref.entry(x), ref.entry(y_)
        _warn_near_equal(x, y_, vx, vy)
        holds = vx != vy
        checked.append((f"{x} != {y_}", holds))
        ok = ok and holds

    required = cd
    if not ok:
        return WeightConditionFinding(
            matched=None, required_cd=required, conditions_checked=tuple(checked)
        )

    factor = row.factor
    if row.criterion is CriterionKind.CONDITIONAL_STATISTICAL_PARITY:
        criterion = ClassicalCriterion(row.criterion, attr=cd.attr, values=cd.values)
        factor = {j: ("w11", "w01") for j in cd.sorted_values()}
    else:
        criterion = ClassicalCriterion(row.criterion)
    mults = {j: abs(ref.entry(hi) - ref.entry(lo)) for j, (hi, lo) in factor.items()}
    single = mults[next(iter(mults))] if len(set(mults.values())) == 1 else None
    return WeightConditionFinding(
        matched=criterion,
        required_cd=required,
        conditions_checked=tuple(checked),
        multiplier=single,
        stratum_multipliers=mults,
    )


@dataclass(frozen=True)
class StratumCheck:
    stratum: str
    f_egal: float
    classical_gap: float
    multiplier: float
    residual: float


@dataclass(frozen=True)
class EquivalenceReport:
    """Numerical check that the utility gap equals multiplier times the
    rate gap. The top-level numbers come from the stratum with the worst
    residual; per_stratum holds every stratum's check."""

    criterion: ClassicalCriterion
    f_egal: float
    classical_gap: float
    multiplier: float
    residual: float
    verdict: bool
    per_stratum: tuple[StratumCheck, ...]
    profile: UtilityProfile


def verify_proposition(
    ds: Dataset, w: UtilityWeights, cd: ClaimsDifferentiator, tol: float = 1e-9
) -> EquivalenceReport:
    """Verify, on data, that the egalitarian utility gap matches the
    classical criterion encoded by the weights.

    Raises ConditionViolated when the weights match no criterion for this
    claims differentiator. Both sides are computed through their own
    paths: the utility gap from per-record utilities, the rate gap from
    conditional counts.
    """
    w.validate_for(ds)
    finding = classify_weights(w, cd)
    if finding.matched is None:
        failed = [c for c, holds in finding.conditions_checked if not holds]
        raise ConditionViolated(
            f"weights do not encode a criterion for this claims differentiator; "
            f"failed: {failed}",
            conditions=finding.conditions_checked,
        )
    profile = utility_profile(ds, cd, w)
    by_stratum = profile.by_stratum()
    groups = profile.groups()
    _, per_gap = egalitarian_value(by_stratum, groups)
    rates = group_rates(ds, finding.matched)
    checks: list[StratumCheck] = []
    for j in cd.sorted_values():
        label = cd.label(j)
        f_j = per_gap[j]
        per_group = rates[label]
        vs = list(per_group.values())
        gap_j = max(vs) - min(vs) if len(vs) > 1 else 0.0
        m_j = finding.stratum_multipliers[j]
        checks.append(
            StratumCheck(
                stratum=label,
                f_egal=f_j,
                classical_gap=gap_j,
                multiplier=m_j,
                residual=abs(f_j - m_j * gap_j),
            )
        )
    worst = checks[0]
    for c in checks[1:]:
        if c.residual > worst.residual:
            worst = c
    return EquivalenceReport(
        criterion=finding.matched,
        f_egal=worst.f_egal,
        classical_gap=worst.classical_gap,
        multiplier=worst.multiplier,
        residual=worst.residual,
        verdict=max(c.residual for c in checks) <= tol,
        per_stratum=tuple(checks),
        profile=profile,
    )


@dataclass(frozen=True)
class RowTrials:
    criterion: str
    trials: int
    verified: int
    skipped: int
    max_residual: float


@dataclass(frozen=True)
class SuiteSummary:
    rows: tuple[RowTrials, ...]
    tol: float

    @property
    def max_residual(self) -> float:
        return max(r.max_residual for r in self.rows)

    @property
    def ok(self) -> bool:
        return self.max_residual <= self.tol and all(r.verified > 0 for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "tol": self.tol,
            "max_residual": self.max_residual,
            "ok": self.ok,
            "rows": [
                {
                    "criterion": r.criterion,
                    "trials": r.trials,
                    "verified": r.verified,
                    "skipped": r.skipped,
                    "max_residual": r.max_residual,
                }
                for r in self.rows
            ],
        }


_LEGIT_ATTR = "region"
_LEGIT_VALUES = ("east", "north", "west")


def _draw_distinct(rng: np.random.Generator, lo: float = -5.0, hi: float = 5.0) -> tuple[float, float]:
    while True:
        a, b = rng.uniform(lo, hi, 2)
        if abs(a - b) > 0.1:
            return float(a), float(b)


def _conforming_weights(
    row: _Row, rng: np.random.Generator, groups: tuple[str, ...]
) -> UtilityWeights:
    """Random weights satisfying the row's conditions, sometimes varying
    the unconstrained entries per group."""
    vals = {e: float(rng.uniform(-5.0, 5.0)) for e in _ENTRIES}
    for x, y in row.unequal:
        vals[x], vals[y] = _draw_distinct(rng)
    for x, y in row.equal:
        vals[y] = vals[x]
    shared = WeightTable(**vals)
    free = _FREE_ENTRIES[row.criterion]
    if free and rng.random() < 0.5:
        per_group = {}
        for a in groups:
            gvals = dict(vals)
            for e in free:
                gvals[e] = float(rng.uniform(-5.0, 5.0))
            per_group[a] = WeightTable(**gvals)
        return UtilityWeights(shared=shared, per_group=per_group)
    return UtilityWeights(shared=shared)


def _cd_for_row(row: _Row, rng: np.random.Generator) -> ClaimsDifferentiator:
    if row.cd_kind is ClaimsKind.NONE:
        return ClaimsDifferentiator.none()
    if row.cd_kind is ClaimsKind.LEGITIMATE:
        size = int(rng.integers(1, len(_LEGIT_VALUES) + 1))
        picked = rng.choice(len(_LEGIT_VALUES), size=size, replace=False)
        return ClaimsDifferentiator.legitimate(
            _LEGIT_ATTR, tuple(_LEGIT_VALUES[i] for i in sorted(picked))
        )
    values = row.cd_values
    if row.cd_kind is ClaimsKind.OUTCOME:
        return ClaimsDifferentiator.outcome(values)
    return ClaimsDifferentiator.decision(values)


def randomized_equivalence_suite(
    trials: int,
    n: int,
    seed: int,
    tol: float = 1e-9,
    weight_override: Callable[[str, np.random.Generator], UtilityWeights] | None = None,
) -> SuiteSummary:
    """Stress-test the correspondence on random data.

    For each criterion row: ``trials`` synthetic datasets of ``n`` records
    per group, with row-conforming random weights, checked through
    verify_proposition. Deterministic for a fixed seed. Trials whose
    weights fail classification are counted as skipped, not as failures;
    ``weight_override`` exists so tests can inject such weights.
    """
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials!r}")
    if n < 1:
        raise ValidationError(f"records per group must be >= 1, got {n!r}")
    groups = ("0", "1")
    rows: list[RowTrials] = []
    for row_index, row in enumerate(_ROWS):
        verified = 0
        skipped = 0
        max_residual = 0.0
        for trial in range(trials):
            ss = np.random.SeedSequence(entropy=seed, spawn_key=(row_index, trial))
            rng = np.random.default_rng(ss)
            cd = _cd_for_row(row, rng)
            legit = (
                {_LEGIT_ATTR: _LEGIT_VALUES}
                if row.cd_kind is ClaimsKind.LEGITIMATE
                else None
            )
            spec = SyntheticSpec(
                groups={
                    a: GroupSpec(
                        n=n,
                        base_rate=float(rng.uniform(0.2, 0.8)),
                        accept_pos=float(rng.uniform(0.55, 0.85)),
                        accept_neg=float(rng.uniform(0.15, 0.45)),
                    )
                    for a in groups
                },
                legit=legit,
            )
            ds = generate_synthetic(spec, seed=int(rng.integers(2**63)))
            if weight_override is not None:
                w = weight_override(row.criterion.value, rng)
            else:
                w = _conforming_weights(row, rng, groups)
            try:
                report = verify_proposition(ds, w, cd, tol=tol)
            except ConditionViolated:
                skipped += 1
                continue
            verified += 1
            worst = max(c.residual for c in report.per_stratum)
            if worst > max_residual:
                max_residual = worst
        rows.append(
            RowTrials(
                criterion=row.criterion.value,
                trials=trials,
                verified=verified,
                skipped=skipped,
                max_residual=max_residual,
            )
        )
    return SuiteSummary(rows=tuple(rows), tol=tol)
