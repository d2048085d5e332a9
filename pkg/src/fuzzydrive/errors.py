"""Exception hierarchy for the simulator.

Every error raised by this package derives from FuzzyDriveError so callers
can catch broadly; the CLI maps the subclasses to distinct exit codes.
"""


class FuzzyDriveError(Exception):
    """Base class for all package errors."""


class ConfigurationError(FuzzyDriveError):
    """A component was built from values violating its invariants."""


class NumericInputError(FuzzyDriveError):
    """A kinematic computation received a non-finite input."""


class DegenerateRatioError(FuzzyDriveError):
    """The gear-train speed ratio is undefined (denominator vanishes)."""


class StepSizeError(FuzzyDriveError):
    """A time step dt <= 0 was requested."""


class DivergenceError(FuzzyDriveError):
    """Integration produced a non-finite state."""


class InferenceError(FuzzyDriveError):
    """Fuzzy inference could not run (missing input, bad reference)."""


class DefuzzificationError(FuzzyDriveError):
    """Defuzzification received an unusable sampled set."""


class RuleParseError(FuzzyDriveError):
    """A rule-base file failed to parse."""


class ScenarioParseError(FuzzyDriveError):
    """A scenario file failed to parse (syntax level)."""


class ScenarioValidationError(FuzzyDriveError):
    """A scenario parsed but violates a field constraint."""
