"""Exception types shared across the package.

The CLI maps these to exit codes: input/format problems exit with 2,
exhausted budgets exit with 3.
"""


class GuessrankError(Exception):
    """Base class for all package errors."""


class CorpusFormatError(GuessrankError):
    """A corpus line could not be parsed; carries the 1-based line number."""

    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class EmptyCorpusError(GuessrankError):
    """The corpus contains no passwords."""


class TrainingError(GuessrankError):
    """A model could not be trained from the given corpus."""


class FileFormatError(GuessrankError):
    """A model or table file is corrupt, truncated, or has a bad version."""


class DrawBudgetError(GuessrankError):
    """Unique-probability sampling made no progress within the draw budget."""


class EnumerationBudgetError(GuessrankError):
    """Enumeration exceeded the configured entry budget."""

    def __init__(self, budget):
        self.budget = budget
        super().__init__(
            f"enumeration exceeded the entry budget of {budget}; "
            "lower the threshold or raise the budget"
        )


class TableMismatchError(GuessrankError):
    """A bin index was built over a different sample table."""


class MissingEstimateError(GuessrankError):
    """An estimate is missing for a password in the ground-truth list."""

    def __init__(self, password):
        self.password = password
        super().__init__(f"no estimate given for password {password!r}")
