from __future__ import annotations

import textwrap

import pytest

from justdist.config import RunConfig, load_config
from justdist.data import ClaimsDifferentiator, ClaimsKind
from justdist.errors import InvalidSpec
from justdist.patterns import PatternKind, PatternSpec
from justdist.rules import RuleKind
from justdist.utility import WeightTable

from conftest import wt

MINIMAL_WEIGHTS = """
[weights]
w11 = 1
w10 = 0
w01 = 0
w00 = 0
"""


def cfg(tmp_path, text: str) -> RunConfig:
    path = tmp_path / "run.ini"
    path.write_text(textwrap.dedent(text))
    return load_config(path)


class TestFullConfig:
    FULL = """
    [weights]
    w11 = 2.0
    w10 = -1.0
    w01 = 0.5
    w00 = 0.0
    B.w11 = 3.0
    B.w00 = 1.0

    [claims]
    kind = outcome
    values = 1

    [pattern]
    kind = prioritarian, maximin
    k = 2.5
    tol = 1e-6

    [rulespace]
    kind = group_rates
    grid = 0:1:5
    B.grid = 0.0, 0.25, 1.0
    """

    def test_weights_with_partial_group_override(self, tmp_path):
        rc = cfg(tmp_path, self.FULL)
        assert rc.weights.shared == WeightTable(2.0, -1.0, 0.5, 0.0)
        # override completes missing entries from the shared table
        assert rc.weights.per_group == {"B": WeightTable(3.0, -1.0, 0.5, 1.0)}

    def test_claims(self, tmp_path):
        rc = cfg(tmp_path, self.FULL)
        assert rc.cd == ClaimsDifferentiator.outcome([1])

    def test_patterns_and_tolerance(self, tmp_path):
        rc = cfg(tmp_path, self.FULL)
        assert rc.patterns == (
            PatternSpec(PatternKind.PRIORITARIAN, k=2.5),
            PatternSpec(PatternKind.MAXIMIN),
        )
        assert rc.tol == 1e-6
        assert rc.objective() == rc.patterns[0]

    def test_rulespace(self, tmp_path):
        rc = cfg(tmp_path, self.FULL)
        assert rc.rule_kind is RuleKind.GROUP_RATES
        assert rc.grids == {
            None: (0.0, 0.25, 0.5, 0.75, 1.0),
            "B": (0.0, 0.25, 1.0),
        }
        space = rc.rulespace_for(("A", "B"))
        assert space.grids["A"] == (0.0, 0.25, 0.5, 0.75, 1.0)
        assert space.grids["B"] == (0.0, 0.25, 1.0)


class TestDefaults:
    def test_weights_only(self, tmp_path):
        rc = cfg(tmp_path, MINIMAL_WEIGHTS)
        assert rc.weights == wt(1, 0, 0, 0)
        assert rc.weights.per_group is None
        assert rc.cd.kind is ClaimsKind.NONE
        assert rc.patterns == (
            PatternSpec(PatternKind.EGALITARIAN),
            PatternSpec(PatternKind.MAXIMIN),
        )
        assert rc.tol is None
        assert rc.rule_kind is None
        assert rc.grids is None

    def test_rulespace_for_without_section(self, tmp_path):
        rc = cfg(tmp_path, MINIMAL_WEIGHTS)
        with pytest.raises(InvalidSpec, match="no \\[rulespace\\]"):
            rc.rulespace_for(("a",))

    def test_pattern_section_without_kind_keeps_default(self, tmp_path):
        rc = cfg(tmp_path, MINIMAL_WEIGHTS + "[pattern]\ntol = 0.01\n")
        assert [p.kind for p in rc.patterns] == [
            PatternKind.EGALITARIAN,
            PatternKind.MAXIMIN,
        ]
        assert rc.tol == 0.01


class TestWeightsSection:
    def test_missing_section(self, tmp_path):
        with pytest.raises(InvalidSpec, match="\\[weights\\] section"):
            cfg(tmp_path, "[pattern]\nkind = maximin\n")

    def test_missing_entry(self, tmp_path):
        with pytest.raises(InvalidSpec, match="missing w01"):
            cfg(tmp_path, "[weights]\nw11 = 1\nw10 = 0\nw00 = 0\n")

    def test_unknown_key(self, tmp_path):
        with pytest.raises(InvalidSpec, match="unknown key 'w12'"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "w12 = 1\n")

    def test_unknown_dotted_entry(self, tmp_path):
        with pytest.raises(InvalidSpec, match="unknown key"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "b.w12 = 1\n")

    def test_empty_group_label(self, tmp_path):
        with pytest.raises(InvalidSpec, match="unknown key"):
            cfg(tmp_path, MINIMAL_WEIGHTS + ".w11 = 1\n")

    def test_non_numeric_value(self, tmp_path):
        with pytest.raises(InvalidSpec, match="expected a number"):
            cfg(tmp_path, "[weights]\nw11 = x\nw10 = 0\nw01 = 0\nw00 = 0\n")

    def test_non_finite_value(self, tmp_path):
        with pytest.raises(InvalidSpec, match="finite"):
            cfg(tmp_path, "[weights]\nw11 = inf\nw10 = 0\nw01 = 0\nw00 = 0\n")

    def test_group_labels_are_case_sensitive(self, tmp_path):
        rc = cfg(tmp_path, MINIMAL_WEIGHTS + "Team.w11 = 2\nteam.w11 = 3\n")
        assert rc.weights.per_group["Team"].w11 == 2.0
        assert rc.weights.per_group["team"].w11 == 3.0

    def test_override_groups_sorted(self, tmp_path):
        rc = cfg(tmp_path, MINIMAL_WEIGHTS + "b.w11 = 2\na.w11 = 3\n")
        assert list(rc.weights.per_group) == ["a", "b"]


class TestClaimsSection:
    def test_explicit_none(self, tmp_path):
        rc = cfg(tmp_path, MINIMAL_WEIGHTS + "[claims]\nkind = none\n")
        assert rc.cd == ClaimsDifferentiator.none()

    def test_kind_is_case_insensitive(self, tmp_path):
        rc = cfg(tmp_path, MINIMAL_WEIGHTS + "[claims]\nkind = Decision\nvalues = 0, 1\n")
        assert rc.cd == ClaimsDifferentiator.decision([0, 1])

    def test_legitimate(self, tmp_path):
        rc = cfg(
            tmp_path,
            MINIMAL_WEIGHTS + "[claims]\nkind = legitimate\nattr = region\nvalues = east, west\n",
        )
        assert rc.cd == ClaimsDifferentiator.legitimate("region", ["east", "west"])

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(InvalidSpec, match="kind must be one of"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[claims]\nkind = merit\n")

    def test_outcome_without_values(self, tmp_path):
        with pytest.raises(InvalidSpec, match="needs values"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[claims]\nkind = outcome\n")

    def test_outcome_value_out_of_range(self, tmp_path):
        with pytest.raises(InvalidSpec, match="must be 0 or 1"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[claims]\nkind = outcome\nvalues = 2\n")

    def test_legitimate_without_attr(self, tmp_path):
        with pytest.raises(InvalidSpec, match="attribute name"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[claims]\nkind = legitimate\nvalues = east\n")

    def test_legitimate_without_values(self, tmp_path):
        with pytest.raises(InvalidSpec, match="non-empty value set"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[claims]\nkind = legitimate\nattr = region\n")


class TestPatternSection:
    def test_t_attaches_to_sufficientarian_only(self, tmp_path):
        rc = cfg(
            tmp_path,
            MINIMAL_WEIGHTS + "[pattern]\nkind = sufficientarian, egalitarian\nt = 0.25\nk = 4\n",
        )
        assert rc.patterns[0] == PatternSpec(PatternKind.SUFFICIENTARIAN, t=0.25)
        assert rc.patterns[1] == PatternSpec(PatternKind.EGALITARIAN)

    def test_k_and_t_split_across_kinds(self, tmp_path):
        rc = cfg(
            tmp_path,
            MINIMAL_WEIGHTS + "[pattern]\nkind = prioritarian, sufficientarian\nk = 2\nt = -0.5\n",
        )
        assert rc.patterns == (
            PatternSpec(PatternKind.PRIORITARIAN, k=2.0),
            PatternSpec(PatternKind.SUFFICIENTARIAN, t=-0.5),
        )

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(InvalidSpec, match="unknown kind 'rawlsian'"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[pattern]\nkind = rawlsian\n")

    def test_empty_kind_list(self, tmp_path):
        with pytest.raises(InvalidSpec, match="lists no patterns"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[pattern]\nkind = ,\n")

    def test_bad_tol(self, tmp_path):
        with pytest.raises(InvalidSpec, match="tol"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[pattern]\ntol = soon\n")


class TestRulespaceSection:
    def test_thresholds_with_comma_grid(self, tmp_path):
        rc = cfg(
            tmp_path,
            MINIMAL_WEIGHTS + "[rulespace]\nkind = group_thresholds\ngrid = 0.9, 0.1, 0.5\n",
        )
        assert rc.rule_kind is RuleKind.GROUP_THRESHOLDS
        assert rc.grids == {None: (0.9, 0.1, 0.5)}

    def test_range_grid_single_point(self, tmp_path):
        rc = cfg(tmp_path, MINIMAL_WEIGHTS + "[rulespace]\nkind = group_rates\ngrid = 0.5:0.9:1\n")
        assert rc.grids == {None: (0.5,)}

    def test_missing_kind(self, tmp_path):
        with pytest.raises(InvalidSpec, match="group_rates or group_thresholds"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[rulespace]\ngrid = 0, 1\n")

    def test_missing_grid(self, tmp_path):
        with pytest.raises(InvalidSpec, match="needs a grid"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[rulespace]\nkind = group_rates\n")

    def test_unknown_key(self, tmp_path):
        with pytest.raises(InvalidSpec, match="unknown key 'step'"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[rulespace]\nkind = group_rates\ngrid = 0, 1\nstep = 2\n")

    def test_dotted_key_must_end_in_grid(self, tmp_path):
        with pytest.raises(InvalidSpec, match="unknown key"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[rulespace]\nkind = group_rates\na.step = 2\n")

    def test_range_grid_needs_three_parts(self, tmp_path):
        with pytest.raises(InvalidSpec, match="start:stop:count"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[rulespace]\nkind = group_rates\ngrid = 0:1\n")

    def test_range_grid_count_not_integer(self, tmp_path):
        with pytest.raises(InvalidSpec, match="count must be an integer"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[rulespace]\nkind = group_rates\ngrid = 0:1:x\n")

    def test_range_grid_count_below_one(self, tmp_path):
        with pytest.raises(InvalidSpec, match="count must be >= 1"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[rulespace]\nkind = group_rates\ngrid = 0:1:0\n")

    def test_comma_grid_bad_value(self, tmp_path):
        with pytest.raises(InvalidSpec, match="expected a number"):
            cfg(tmp_path, MINIMAL_WEIGHTS + "[rulespace]\nkind = group_rates\ngrid = 0, abc\n")

    def test_override_only_space_needs_every_group(self, tmp_path):
        rc = cfg(tmp_path, MINIMAL_WEIGHTS + "[rulespace]\nkind = group_rates\na.grid = 0, 1\n")
        space = rc.rulespace_for(("a",))
        assert space.grids == {"a": (0.0, 1.0)}
        with pytest.raises(InvalidSpec, match="no grid for group 'b'"):
            rc.rulespace_for(("a", "b"))


def test_missing_file(tmp_path):
    with pytest.raises(InvalidSpec, match="not found"):
        load_config(tmp_path / "absent.ini")
