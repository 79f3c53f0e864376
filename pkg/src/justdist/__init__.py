"""Group fairness auditing through explicit utility weights.

The toolkit measures how a binary decision system distributes utility
across groups, checks which classical fairness criterion (if any) a
weight setting encodes, verifies that correspondence numerically, and
searches decision-rule grids for pattern-optimal rules.
"""

__version__ = "0.1.0"

from .classical import (
    ClassicalCriterion,
    CriterionKind,
    GapReport,
    classical_gap,
    group_rates,
    standard_criteria,
)
from .data import (
    ClaimsDifferentiator,
    ClaimsKind,
    ColumnSchema,
    Dataset,
    GroupSpec,
    Record,
    RelevantGroupKey,
    SyntheticSpec,
    dataset_hash,
    exact_rate_dataset,
    generate_synthetic,
    load_dataset,
    partition_relevant_groups,
    write_dataset,
)
from .equivalence import (
    EquivalenceReport,
    SuiteSummary,
    WeightConditionFinding,
    classify_weights,
    randomized_equivalence_suite,
    verify_proposition,
)
from .errors import (
    ConditionViolated,
    EmptyRelevantGroup,
    InfeasibleSpace,
    InvalidK,
    InvalidSpec,
    JustdistError,
    MissingColumn,
    MissingScore,
    NonBinaryValue,
    NotDefined,
    ScoreOutOfRange,
    UndefinedRate,
    UndefinedResult,
    UnknownGroup,
    ValidationError,
)
from .patterns import (
    Direction,
    PatternKind,
    PatternResult,
    PatternSpec,
    egalitarian_metric,
    evaluate_pattern,
    maximin_metric,
    prioritarian_metric,
    sufficientarian_metric,
)
from .rules import (
    DecisionRule,
    FrontierPoint,
    OptimizationResult,
    RuleKind,
    RuleSpace,
    check_pattern_criterion,
    evaluate_rule,
    leveling_down_scenario,
    optimize,
    pareto_frontier,
)
from .utility import (
    ProfileEntry,
    UtilityProfile,
    UtilityWeights,
    WeightTable,
    expected_group_utility,
    individual_utility,
    utility_profile,
)

__all__ = [name for name in dir() if not name.startswith("_")]
