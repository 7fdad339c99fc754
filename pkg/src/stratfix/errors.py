"""Exception types shared across the package."""


class StratfixError(Exception):
    """Base class for all errors raised by stratfix."""


class MixedAtomSets(StratfixError):
    """Two interpretations over different atom tuples were combined."""


class LevelOverflow(StratfixError):
    """An operation produced a confidence level above the configured cap.

    Negation strictly increments levels, so hitting the cap means a runaway
    computation (or a cap chosen too low), never a legitimate answer.
    """


class NotAlphaCompatible(StratfixError):
    """A stratified supremum was requested for values that disagree below
    the given stratum."""


class NotALattice(StratfixError):
    """An order table is not a complete lattice (or not even a preorder
    where one is required)."""


class ConditionViolated(StratfixError):
    """A two-order model construction failed its compatibility condition."""

    def __init__(self, message, failed_conditions=(), witness=None):
        super().__init__(message)
        self.failed_conditions = tuple(failed_conditions)
        self.witness = witness


class KappaMismatch(StratfixError):
    """Models with different stratum counts were combined."""


class SupremumUndefined(StratfixError):
    """No element satisfies the stratified-supremum clauses.

    Can only happen on tables that are not actually models; the axiom
    checker reports the same situation as a lub-axiom failure.
    """


class TooLarge(StratfixError):
    """An enumeration guard tripped; the requested space is not enumerable."""


class FunctionSpaceTooLarge(TooLarge):
    """A function-space enumeration exceeded its guard."""


class ArityMismatch(StratfixError):
    """A function does not fit the schema of the requested identity."""


class AxiomPreconditionFailed(StratfixError):
    """A construction needed axioms the source model does not satisfy."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class PreconditionViolated(StratfixError):
    """The inner iteration was started from a point not below its image."""


class InnerNotConverged(StratfixError):
    """The inner chain exhausted its budget or failed its post-assertion.

    Raising the budget or the plateau window is the intended remedy; the
    failure is loud on purpose.
    """


class NotConverged(StratfixError):
    """The outer iteration exceeded its stratum budget."""


class FixpointCheckFailed(StratfixError):
    """A candidate answer failed the mandatory fixed-point re-check.

    This indicates a solver bug and is never returned as a result.
    """


class ProgramSyntaxError(StratfixError):
    """Malformed program text, with 1-based position information."""

    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UsageError(StratfixError):
    """Bad command-line usage; mapped to exit code 64."""
