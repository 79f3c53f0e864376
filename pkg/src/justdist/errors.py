"""Exception hierarchy for dataset validation, metric computation, and
rule-space search.

Two branches matter to callers: ValidationError covers malformed input
(bad files, bad parameters), UndefinedResult covers computations that have
no defined value on the given data (empty conditioning cells, empty
relevant groups). The HTTP layer maps the former to 400 and the latter
to 422; the CLI exits 1 on either.
"""

from __future__ import annotations


class JustdistError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(JustdistError):
    """Invalid input: malformed file, bad schema, out-of-range parameter."""


class MissingColumn(ValidationError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"required column {column!r} is missing")


class NonBinaryValue(ValidationError):
    def __init__(self, column: str, value: object, row: int | None = None):
        self.column = column
        self.value = value
        self.row = row
        where = f"row {row}, " if row is not None else ""
        super().__init__(f"{where}column {column!r}: expected 0 or 1, got {value!r}")


class ScoreOutOfRange(ValidationError):
    def __init__(self, value: object, row: int | None = None):
        self.value = value
        self.row = row
        where = f"row {row}: " if row is not None else ""
        super().__init__(f"{where}score {value!r} is not a finite number in [0, 1]")


class UnknownGroup(ValidationError):
    def __init__(self, group: object, row: int | None = None):
        self.group = group
        self.row = row
        where = f"row {row}: " if row is not None else ""
        super().__init__(f"{where}group {group!r} is not in the declared group set")


class InvalidSpec(ValidationError):
    """A synthetic-data spec, claims spec, or config value is malformed."""


class MissingScore(ValidationError):
    def __init__(self, record_id: str):
        self.record_id = record_id
        super().__init__(
            f"record {record_id!r} has no score; threshold rules need a score on every record"
        )


class InvalidK(ValidationError):
    def __init__(self, k: object):
        self.k = k
        super().__init__(f"priority factor k must be a finite number > 1, got {k!r}")


class InfeasibleSpace(ValidationError):
    """A rule space has no candidates to search."""


class ConditionViolated(JustdistError):
    """Weight conditions do not match any classical criterion for the
    supplied claims differentiator, so there is nothing to verify."""

    def __init__(self, message: str, conditions: tuple[tuple[str, bool], ...] = ()):
        self.conditions = conditions
        super().__init__(message)


class UndefinedResult(JustdistError):
    """The requested quantity has no defined value on this data."""


class NotDefined(UndefinedResult):
    """A metric was asked for on a profile where it is not defined."""


class EmptyRelevantGroup(UndefinedResult):
    def __init__(self, labels: tuple[str, ...]):
        self.labels = labels
        listing = ", ".join(labels)
        super().__init__(f"empty relevant group(s): {listing}")


class UndefinedRate(UndefinedResult):
    def __init__(self, criterion: str, cell: str):
        self.criterion = criterion
        self.cell = cell
        super().__init__(f"{criterion}: conditioning cell {cell} is empty, rate undefined")
