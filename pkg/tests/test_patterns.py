from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from justdist.data import ClaimsDifferentiator, Dataset, Record
from justdist.errors import InvalidK, NotDefined, ValidationError
from justdist.patterns import (
    Direction,
    PatternKind,
    PatternSpec,
    egalitarian_metric,
    egalitarian_value,
    evaluate_pattern,
    maximin_metric,
    maximin_value,
    prioritarian_metric,
    prioritarian_value,
    sufficientarian_count,
    sufficientarian_metric,
)
from justdist.utility import utility_profile

from conftest import wt

util = st.floats(min_value=-100, max_value=100, allow_nan=False)
profiles = st.lists(util, min_size=1, max_size=8)


def one_stratum(values: list[float]) -> dict:
    return {None: {str(i): v for i, v in enumerate(values)}}


def groups_of(values: list[float]) -> tuple[str, ...]:
    return tuple(str(i) for i in range(len(values)))


class TestSpec:
    def test_prioritarian_needs_k_above_one(self):
        with pytest.raises(InvalidK):
            PatternSpec(kind=PatternKind.PRIORITARIAN, k=1.0)
        with pytest.raises(InvalidK):
            PatternSpec(kind=PatternKind.PRIORITARIAN, k=0.5)
        PatternSpec(kind=PatternKind.PRIORITARIAN, k=1.0000001)

    def test_sufficientarian_needs_finite_t(self):
        with pytest.raises(ValidationError):
            PatternSpec(kind=PatternKind.SUFFICIENTARIAN, t=float("inf"))
        with pytest.raises(ValidationError):
            PatternSpec(kind=PatternKind.SUFFICIENTARIAN)


class TestEgalitarianValue:
    def test_two_groups(self):
        value, per = egalitarian_value(one_stratum([0.5, 1.5]), ("0", "1"))
        assert value == 1.0
        assert per == {None: 1.0}

    def test_worst_stratum_governs(self):
        by = {0: {"a": 0.2, "b": 0.2}, 1: {"a": 0.5, "b": 1.0}}
        value, per = egalitarian_value(by, ("a", "b"))
        assert value == 0.5
        assert per == {0: 0.0, 1: 0.5}

    def test_more_than_two_groups_uses_max_pairwise(self):
        value, _ = egalitarian_value(one_stratum([-0.3, 0.0, 0.7]), ("0", "1", "2"))
        assert value == pytest.approx(1.0)

    def test_single_group_gap_zero(self):
        value, _ = egalitarian_value(one_stratum([0.7]), ("0",))
        assert value == 0.0

    def test_missing_group_in_stratum(self):
        with pytest.raises(NotDefined) as exc:
            egalitarian_value({1: {"a": 0.5}}, ("a", "b"))
        assert "b" in str(exc.value)

    @given(values=st.lists(util, min_size=2, max_size=6))
    @settings(max_examples=150, deadline=None)
    def test_symmetry_and_zero_iff_equal(self, values):
        v1, _ = egalitarian_value(one_stratum(values), groups_of(values))
        v2, _ = egalitarian_value(one_stratum(list(reversed(values))), groups_of(values))
        assert v1 == v2
        assert v1 >= 0.0
        assert (v1 == 0.0) == (len(set(values)) == 1)

    @given(values=st.lists(util, min_size=2, max_size=6), shift=util)
    @settings(max_examples=150, deadline=None)
    def test_translation_invariance(self, values, shift):
        base, _ = egalitarian_value(one_stratum(values), groups_of(values))
        moved, _ = egalitarian_value(one_stratum([v + shift for v in values]), groups_of(values))
        assert math.isclose(base, moved, rel_tol=1e-9, abs_tol=1e-9)


class TestMaximin:
    def test_min_of_values(self):
        assert maximin_value((0.5, 1.5)) == 0.5
        assert maximin_value((-0.3, 0.0, 0.7)) == -0.3
        assert maximin_value((2.0, 2.0)) == 2.0

    def test_empty_not_defined(self):
        with pytest.raises(NotDefined):
            maximin_value(())

    @given(values=profiles)
    @settings(max_examples=200, deadline=None)
    def test_permutation_invariance(self, values):
        assert maximin_value(tuple(values)) == maximin_value(tuple(sorted(values)))

    @given(values=profiles, bump=st.floats(min_value=0, max_value=10, allow_nan=False), idx=st.integers(min_value=0, max_value=7))
    @settings(max_examples=200, deadline=None)
    def test_monotone_in_single_entry(self, values, bump, idx):
        i = idx % len(values)
        raised = list(values)
        raised[i] = raised[i] + bump
        assert maximin_value(tuple(raised)) >= maximin_value(tuple(values))


class TestPrioritarian:
    def test_direct_formula(self):
        assert prioritarian_value((0.3, 0.5), 2.0) == pytest.approx(1.1)
        assert prioritarian_value((0.5, 1.5), 3.0) == pytest.approx(3.0)

    def test_tie_applies_k_to_exactly_one_entry(self):
        c = 0.4
        assert prioritarian_value((c, c), 5.0) == pytest.approx((5.0 + 1.0) * c)
        assert prioritarian_value((c, c, c), 5.0) == pytest.approx((5.0 + 2.0) * c)

    def test_k_must_exceed_one(self):
        with pytest.raises(InvalidK):
            prioritarian_value((0.1, 0.2), 1.0)

    @given(values=st.lists(util, min_size=1, max_size=6), k=st.floats(min_value=1.01, max_value=50, allow_nan=False))
    @settings(max_examples=200, deadline=None)
    def test_equals_sum_plus_extra_weight_on_min(self, values, k):
        got = prioritarian_value(tuple(values), k)
        want = sum(values) + (k - 1.0) * min(values)
        assert math.isclose(got, want, rel_tol=1e-9, abs_tol=1e-9)


class TestSufficientarian:
    def test_count_and_inclusive_boundary(self):
        assert sufficientarian_count((0.5, 1.5), 1.0) == 1
        assert sufficientarian_count((0.5, 1.5), 0.5) == 2

    def test_below_all_weights_counts_everyone(self):
        assert sufficientarian_count((0.1, 0.9, 0.4), -100.0) == 3

    @given(values=profiles, t1=util, t2=util)
    @settings(max_examples=200, deadline=None)
    def test_non_increasing_in_threshold(self, values, t1, t2):
        lo, hi = min(t1, t2), max(t1, t2)
        assert sufficientarian_count(tuple(values), lo) >= sufficientarian_count(tuple(values), hi)

    @given(values=profiles, t=util, lower=st.floats(min_value=1e-6, max_value=10, allow_nan=False))
    @settings(max_examples=200, deadline=None)
    def test_satisfied_at_t_implies_satisfied_below(self, values, t, lower):
        vals = tuple(values)
        if sufficientarian_count(vals, t) == len(vals):
            assert sufficientarian_count(vals, t - lower) == len(vals)


class TestMetricsOnProfiles:
    def test_egalitarian_metric_golden(self, t1, w2101):
        prof = utility_profile(t1, ClaimsDifferentiator.none(), w2101)
        res = egalitarian_metric(prof)
        assert res.value == 1.0
        assert res.direction is Direction.LOWER_BETTER
        assert res.satisfied is False
        res_loose = egalitarian_metric(prof, tol=1.0)
        assert res_loose.satisfied is True

    def test_egalitarian_zero_satisfied(self, t1):
        prof = utility_profile(t1, ClaimsDifferentiator.none(), wt(1, 1, 0, 0))
        res = egalitarian_metric(prof)
        assert res.value == 0.0
        assert res.satisfied is True

    def test_egalitarian_multi_stratum_takes_worst(self, t1):
        prof = utility_profile(t1, ClaimsDifferentiator.outcome([0, 1]), wt(1, 0, 0, 0))
        res = egalitarian_metric(prof)
        # y=1 stratum compares TPRs (gap 0.5); y=0 compares w10-rates
        assert res.per_stratum["y=1"] == pytest.approx(0.5)
        assert res.value == pytest.approx(0.5)

    def test_ratio_variant(self, t1, w2101):
        prof = utility_profile(t1, ClaimsDifferentiator.none(), w2101)
        res = egalitarian_metric(prof, ratio=True)
        assert res.value == pytest.approx(3.0)
        with pytest.raises(NotDefined):
            egalitarian_metric(
                utility_profile(t1, ClaimsDifferentiator.none(), wt(0, 0, 0, 0)), ratio=True
            )

    def test_maximin_metric(self, t1, w2101):
        prof = utility_profile(t1, ClaimsDifferentiator.none(), w2101)
        res = maximin_metric(prof)
        assert res.value == 0.5
        assert res.satisfied is None
        assert res.direction is Direction.HIGHER_BETTER

    def test_prioritarian_metric(self, t1, w2101):
        prof = utility_profile(t1, ClaimsDifferentiator.none(), w2101)
        assert prioritarian_metric(prof, 3.0).value == pytest.approx(3.0)

    def test_sufficientarian_metric(self, t1, w2101):
        prof = utility_profile(t1, ClaimsDifferentiator.none(), w2101)
        at_one = sufficientarian_metric(prof, 1.0)
        assert at_one.value == 1.0
        assert at_one.satisfied is False
        at_half = sufficientarian_metric(prof, 0.5)
        assert at_half.value == 2.0
        assert at_half.satisfied is True

    def test_dispatcher_routes_parameters(self, t1, w2101):
        prof = utility_profile(t1, ClaimsDifferentiator.none(), w2101)
        spec = PatternSpec(kind=PatternKind.PRIORITARIAN, k=2.0)
        assert evaluate_pattern(prof, spec).value == pytest.approx(2.5)
        spec = PatternSpec(kind=PatternKind.SUFFICIENTARIAN, t=0.5)
        assert evaluate_pattern(prof, spec).value == 2.0

    @given(alpha=st.floats(min_value=0.01, max_value=20, allow_nan=False))
    @settings(max_examples=100, deadline=None)
    def test_scaling_weights_scales_gap(self, alpha):
        ds = Dataset.build(
            [Record("1", "a", 1, 1), Record("2", "a", 0, 0), Record("3", "b", 1, 0), Record("4", "b", 0, 1)]
        )
        base = egalitarian_metric(utility_profile(ds, ClaimsDifferentiator.none(), wt(2, -1, 0, 1)))
        scaled = egalitarian_metric(
            utility_profile(ds, ClaimsDifferentiator.none(), wt(2 * alpha, -alpha, 0, alpha))
        )
        assert math.isclose(scaled.value, alpha * base.value, rel_tol=1e-9, abs_tol=1e-9)
