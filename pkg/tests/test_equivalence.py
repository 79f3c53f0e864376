from __future__ import annotations

import numpy as np
import pytest

from justdist.classical import CriterionKind
from justdist.data import (
    ClaimsDifferentiator,
    Dataset,
    GroupSpec,
    Record,
    SyntheticSpec,
    generate_synthetic,
)
from justdist.equivalence import (
    classify_weights,
    randomized_equivalence_suite,
    verify_proposition,
)
from justdist.errors import ConditionViolated, UndefinedResult, ValidationError
from justdist.utility import UtilityWeights, WeightTable

from conftest import wt

CD_NONE = ClaimsDifferentiator.none()
CD_Y1 = ClaimsDifferentiator.outcome([1])
CD_Y0 = ClaimsDifferentiator.outcome([0])
CD_Y = ClaimsDifferentiator.outcome([0, 1])
CD_D1 = ClaimsDifferentiator.decision([1])
CD_D0 = ClaimsDifferentiator.decision([0])
CD_D = ClaimsDifferentiator.decision([0, 1])
CD_REGION = ClaimsDifferentiator.legitimate("region", ["east", "west"])


# One canonical generator per condition-table row, and one single-condition
# perturbation that must break the match entirely.
CANONICAL = [
    (wt(1, 1, 0, 0), CD_NONE, CriterionKind.STATISTICAL_PARITY, 1.0),
    (wt(1, 1, 0, 0), CD_REGION, CriterionKind.CONDITIONAL_STATISTICAL_PARITY, 1.0),
    (wt(5, 0.7, 2, -0.2), CD_Y1, CriterionKind.EQUALITY_OF_OPPORTUNITY, 3.0),
    (wt(0.3, 4, -1, 1), CD_Y0, CriterionKind.FPR_PARITY, 3.0),
    (wt(3, 2, 1, 0), CD_Y, CriterionKind.EQUALIZED_ODDS, 2.0),
    (wt(2, 0, 0.4, 0.9), CD_D1, CriterionKind.PREDICTIVE_PARITY, 2.0),
    (wt(-0.5, 0.1, 1.5, 0.5), CD_D0, CriterionKind.FOR_PARITY, 1.0),
    (wt(2, 0, 1, 0), CD_D, CriterionKind.SUFFICIENCY, None),
]

PERTURBED = [
    (wt(1, 1, 1, 1), CD_NONE),          # acceptance no longer matters
    (wt(1, 2, 0, 0), CD_REGION),        # outcome sneaks into the payoff
    (wt(2, 0.7, 2, -0.2), CD_Y1),       # w11 == w01
    (wt(0.3, 4, -1, 4), CD_Y0),         # w10 == w00
    (wt(1, 2, 1, 0), CD_Y),             # first inequality broken
    (wt(2, 2, 0.4, 0.9), CD_D1),        # w11 == w10
    (wt(-0.5, 0.1, 0.5, 0.5), CD_D0),   # w01 == w00
    (wt(2, 2, 1, 0), CD_D),             # w11 == w10
]


class TestClassifierTable:
    @pytest.mark.parametrize("w, cd, kind, mult", CANONICAL, ids=[k.value for *_, k, _m in CANONICAL])
    def test_canonical_generators_match_their_row(self, w, cd, kind, mult):
        finding = classify_weights(w, cd)
        assert finding.matched is not None
        assert finding.matched.kind is kind
        if mult is None:
            assert finding.multiplier is None
            assert finding.stratum_multipliers is not None
        else:
            assert finding.multiplier == pytest.approx(mult)

    @pytest.mark.parametrize("w, cd", PERTURBED, ids=[k.value for *_, k, _m in CANONICAL])
    def test_single_condition_perturbations_match_nothing(self, w, cd):
        finding = classify_weights(w, cd)
        assert finding.matched is None
        assert any(not holds for _, holds in finding.conditions_checked)

    def test_conditional_parity_carries_attr_and_values(self):
        finding = classify_weights(wt(2, 2, -1, -1), CD_REGION)
        assert finding.matched.attr == "region"
        assert finding.matched.values == frozenset({"east", "west"})
        assert finding.multiplier == pytest.approx(3.0)

    def test_conjunctive_rows_report_per_stratum_factors(self):
        finding = classify_weights(wt(3, 2, 0, 0), CD_Y)
        assert finding.multiplier is None
        assert finding.stratum_multipliers == {1: 3.0, 0: 2.0}

    def test_independence_required_on_constrained_entries(self):
        w = UtilityWeights(
            shared=WeightTable(1, 1, 0, 0),
            per_group={"0": WeightTable(1, 1, 0, 0), "1": WeightTable(2, 2, 0, 0)},
        )
        finding = classify_weights(w, CD_NONE)
        assert finding.matched is None
        cond = dict(finding.conditions_checked)
        assert cond["{w11, w10, w01, w00} identical across groups"] is False

    def test_unconstrained_entries_may_vary_per_group(self):
        w = UtilityWeights(
            shared=WeightTable(5, 0, 2, 0),
            per_group={"0": WeightTable(5, 9, 2, -3), "1": WeightTable(5, 0, 2, 4)},
        )
        finding = classify_weights(w, CD_Y1)
        assert finding.matched.kind is CriterionKind.EQUALITY_OF_OPPORTUNITY
        assert finding.multiplier == pytest.approx(3.0)

    def test_near_equality_warns(self):
        with pytest.warns(UserWarning):
            classify_weights(wt(1, 1, 1 - 1e-13, 0), CD_Y1)
        with pytest.warns(UserWarning):
            classify_weights(wt(1, 1 + 1e-13, 0, 0), CD_NONE)

    def test_matched_multiplier_never_zero(self):
        rng = np.random.default_rng(4)
        seen = 0
        for _ in range(200):
            w = wt(*rng.uniform(-3, 3, 4))
            finding = classify_weights(w, CD_NONE)
            if finding.matched is not None:
                seen += 1
                assert finding.multiplier > 0.0
        assert seen == 0  # random reals almost never satisfy exact equality

    def test_row_lookup_is_keyed_on_the_differentiator(self):
        # parity weights against the sufficiency differentiator: the lookup
        # lands on sufficiency's row and its inequalities fail
        finding = classify_weights(wt(1, 1, 0, 0), CD_D)
        assert finding.matched is None
        assert finding.required_cd == CD_D


class TestVerifyProposition:
    def test_true_positive_rate_identity_on_fixture(self, t1):
        rep = verify_proposition(t1, wt(1, 5, 0, -3), CD_Y1)
        assert rep.f_egal == pytest.approx(0.5)
        assert rep.classical_gap == pytest.approx(0.5)
        assert rep.multiplier == pytest.approx(1.0)
        assert rep.residual == 0.0
        assert rep.verdict is True

    def test_parity_identity_with_scaled_weights(self, t1):
        rep = verify_proposition(t1, wt(2, 2, 0, 0), CD_NONE)
        assert rep.f_egal == 0.0
        assert rep.classical_gap == 0.0
        assert rep.residual == 0.0

    def test_identity_on_synthetic_data(self):
        spec = SyntheticSpec(
            groups={"0": GroupSpec(n=1000, base_rate=0.35), "1": GroupSpec(n=1000, base_rate=0.6)}
        )
        ds = generate_synthetic(spec, seed=7)
        rep = verify_proposition(ds, wt(3, 3, 1, 1), CD_NONE)
        assert rep.residual <= 1e-9

    def test_conjunctive_row_checks_every_stratum(self, t1):
        rep = verify_proposition(t1, wt(3, 2, 1, 0), CD_Y)
        assert {c.stratum for c in rep.per_stratum} == {"y=0", "y=1"}
        assert all(c.residual <= 1e-9 for c in rep.per_stratum)
        assert rep.residual == max(c.residual for c in rep.per_stratum)

    def test_non_conforming_weights_violate_conditions(self, t1):
        with pytest.raises(ConditionViolated) as exc:
            verify_proposition(t1, wt(1, 2, 0, 0), CD_NONE)
        assert "w11 == w10" in str(exc.value)

    def test_undefined_rates_propagate(self):
        # group "b" is never accepted, so precision has no value there
        recs = [
            Record("1", "a", 1, 1),
            Record("2", "a", 0, 0),
            Record("3", "b", 1, 0),
            Record("4", "b", 0, 0),
        ]
        ds = Dataset.build(recs)
        with pytest.raises(UndefinedResult):
            verify_proposition(ds, wt(2, 0, 0.4, 0.9), CD_D1)


class TestRandomizedSuite:
    def test_small_run_verifies_every_row(self):
        summary = randomized_equivalence_suite(trials=5, n=120, seed=2)
        assert summary.ok is True
        assert summary.max_residual <= 1e-9
        assert len(summary.rows) == 8
        assert all(r.verified == 5 and r.skipped == 0 for r in summary.rows)

    def test_deterministic_under_seed(self):
        one = randomized_equivalence_suite(trials=3, n=60, seed=9)
        two = randomized_equivalence_suite(trials=3, n=60, seed=9)
        assert one.to_dict() == two.to_dict()

    def test_rejects_non_positive_trials(self):
        with pytest.raises(ValidationError):
            randomized_equivalence_suite(trials=0, n=50, seed=1)
        with pytest.raises(ValidationError):
            randomized_equivalence_suite(trials=1, n=0, seed=1)

    def test_condition_violations_count_as_skipped(self):
        def violating(_criterion: str, rng: np.random.Generator) -> UtilityWeights:
            # distinct per-group tables on every entry: independence fails
            return UtilityWeights(
                shared=WeightTable(1, 1, 0, 0),
                per_group={
                    "0": WeightTable(1, 1, 0, 0),
                    "1": WeightTable(2, 2, 1, 1),
                },
            )

        summary = randomized_equivalence_suite(
            trials=2, n=40, seed=0, weight_override=violating
        )
        assert all(r.skipped == 2 and r.verified == 0 for r in summary.rows)
        assert summary.ok is False  # nothing verified is not a pass
