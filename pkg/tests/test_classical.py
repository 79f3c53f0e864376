from __future__ import annotations

import random

import pytest

from justdist.classical import (
    ClassicalCriterion,
    CriterionKind,
    classical_gap,
    group_rates,
    standard_criteria,
)
from justdist.data import Dataset, Record
from justdist.errors import InvalidSpec, UndefinedRate

from conftest import t1_records


def crit(kind: CriterionKind, **kwargs) -> ClassicalCriterion:
    return ClassicalCriterion(kind, **kwargs)


class TestGoldenGaps:
    def test_statistical_parity_zero(self, t1):
        rep = classical_gap(t1, crit(CriterionKind.STATISTICAL_PARITY))
        assert rep.overall == 0.0
        assert rep.satisfied is True

    def test_equal_opportunity_half(self, t1):
        rep = classical_gap(t1, crit(CriterionKind.EQUALITY_OF_OPPORTUNITY))
        assert rep.overall == 0.5
        assert rep.gaps == {"y=1": 0.5}
        assert rep.satisfied is False

    def test_predictive_parity_half(self, t1):
        rep = classical_gap(t1, crit(CriterionKind.PREDICTIVE_PARITY))
        assert rep.overall == 0.5
        assert rep.gaps == {"d=1": 0.5}

    def test_fpr_and_for(self, t1):
        assert classical_gap(t1, crit(CriterionKind.FPR_PARITY)).overall == 0.5
        assert classical_gap(t1, crit(CriterionKind.FOR_PARITY)).overall == 0.5

    def test_conjunctive_criteria_take_worst_stratum(self, t1):
        odds = classical_gap(t1, crit(CriterionKind.EQUALIZED_ODDS))
        assert set(odds.gaps) == {"y=0", "y=1"}
        assert odds.overall == 0.5
        suff = classical_gap(t1, crit(CriterionKind.SUFFICIENCY))
        assert set(suff.gaps) == {"d=0", "d=1"}
        assert suff.overall == 0.5

    def test_group_rates_expose_the_raw_conditionals(self, t1):
        rates = group_rates(t1, crit(CriterionKind.EQUALITY_OF_OPPORTUNITY))
        assert rates == {"y=1": {"0": 0.5, "1": 1.0}}


class TestConditionalParity:
    def make_ds(self):
        recs = [
            Record("1", "a", 0, 1, legit={"region": "east"}),
            Record("2", "a", 0, 0, legit={"region": "east"}),
            Record("3", "a", 0, 1, legit={"region": "west"}),
            Record("4", "b", 0, 0, legit={"region": "east"}),
            Record("5", "b", 0, 1, legit={"region": "west"}),
            Record("6", "b", 0, 1, legit={"region": "west"}),
        ]
        return Dataset.build(recs)

    def test_per_value_gaps(self):
        ds = self.make_ds()
        c = crit(CriterionKind.CONDITIONAL_STATISTICAL_PARITY, attr="region")
        rep = classical_gap(ds, c)
        assert rep.gaps["region=east"] == pytest.approx(0.5)
        assert rep.gaps["region=west"] == pytest.approx(0.0)
        assert rep.overall == pytest.approx(0.5)
        assert c.label() == "conditional_statistical_parity[region]"

    def test_value_subset(self):
        ds = self.make_ds()
        c = crit(
            CriterionKind.CONDITIONAL_STATISTICAL_PARITY,
            attr="region",
            values=frozenset({"west"}),
        )
        rep = classical_gap(ds, c)
        assert set(rep.gaps) == {"region=west"}

    def test_unknown_attribute_rejected(self, t1):
        c = crit(CriterionKind.CONDITIONAL_STATISTICAL_PARITY, attr="region")
        with pytest.raises(InvalidSpec):
            classical_gap(t1, c)

    def test_attr_required_at_construction(self):
        with pytest.raises(InvalidSpec):
            crit(CriterionKind.CONDITIONAL_STATISTICAL_PARITY)
        with pytest.raises(InvalidSpec):
            crit(CriterionKind.STATISTICAL_PARITY, attr="region")


class TestUndefinedCells:
    def test_empty_conditioning_cell_is_named(self):
        # group "b" never receives d=1, so its precision is undefined
        recs = [
            Record("1", "a", 1, 1),
            Record("2", "a", 0, 0),
            Record("3", "b", 1, 0),
            Record("4", "b", 0, 0),
        ]
        ds = Dataset.build(recs)
        with pytest.raises(UndefinedRate) as exc:
            classical_gap(ds, crit(CriterionKind.PREDICTIVE_PARITY))
        msg = str(exc.value)
        assert "a=b" in msg and "d=1" in msg

    def test_no_silent_zero_for_missing_outcome_class(self):
        recs = [Record("1", "a", 1, 1), Record("2", "b", 1, 0)]
        ds = Dataset.build(recs)
        with pytest.raises(UndefinedRate):
            classical_gap(ds, crit(CriterionKind.FPR_PARITY))


class TestInvariants:
    def test_shuffle_invariance(self):
        recs = t1_records()
        base = {
            c.label(): classical_gap(Dataset.build(recs), c).overall
            for c in standard_criteria(Dataset.build(recs))
        }
        rng = random.Random(5)
        for _ in range(5):
            rng.shuffle(recs)
            ds = Dataset.build(recs)
            got = {c.label(): classical_gap(ds, c).overall for c in standard_criteria(ds)}
            assert got == base

    def test_everyone_accepted_gives_zero_parity_gap(self):
        recs = [Record(str(i), "a" if i < 3 else "b", i % 2, 1) for i in range(6)]
        ds = Dataset.build(recs)
        assert classical_gap(ds, crit(CriterionKind.STATISTICAL_PARITY)).overall == 0.0

    def test_equalized_odds_dominates_its_parts(self, t1):
        odds = classical_gap(t1, crit(CriterionKind.EQUALIZED_ODDS)).overall
        eop = classical_gap(t1, crit(CriterionKind.EQUALITY_OF_OPPORTUNITY)).overall
        fpr = classical_gap(t1, crit(CriterionKind.FPR_PARITY)).overall
        assert odds >= eop and odds >= fpr

    def test_standard_list_includes_conditional_per_attr(self):
        recs = [
            Record("1", "a", 0, 0, legit={"region": "east", "tier": "x"}),
            Record("2", "b", 1, 1, legit={"region": "west", "tier": "y"}),
        ]
        ds = Dataset.build(recs)
        labels = [c.label() for c in standard_criteria(ds)]
        assert "conditional_statistical_parity[region]" in labels
        assert "conditional_statistical_parity[tier]" in labels
        assert len([l for l in labels if l.startswith("conditional")]) == 2
