"""Exception hierarchy and the diagnostic record shared by the CLI and the API."""

from __future__ import annotations

from dataclasses import dataclass, field


class ArbiterError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ArbiterError):
    """Syntax error in a rule file or policy file, with source position."""

    def __init__(self, message, line=None, column=None, expected=()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {column}" if column is not None else "")
        hint = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message}{where}{hint}")


class DuplicateLabelError(ArbiterError):
    """Two rules in one theory share a label."""

    def __init__(self, label):
        self.label = label
        super().__init__(f"duplicate rule label {label!r}")


class DanglingPreferTargetError(ArbiterError):
    """A prefer head names a rule label that does not exist in the theory."""

    def __init__(self, label, target):
        self.label = label
        self.target = target
        super().__init__(f"rule {label!r} prefers unknown rule {target!r}")


class RangeRestrictionError(ArbiterError):
    """A variable in a head, premise, or comparison is not bound by any body predicate."""

    def __init__(self, label, variable):
        self.label = label
        self.variable = variable
        super().__init__(
            f"rule {label!r}: variable {variable!r} does not occur in any body predicate"
        )


class StratificationError(ArbiterError):
    """Priority levels are inconsistent: prefer targets differ in level, or levels cycle."""


class UnknownReferenceError(ArbiterError):
    """A policy statement or preference refers to an undeclared id."""


class LevelMismatchError(ArbiterError):
    """A policy preference relates two ids that sit at different levels."""


class MissingAdvancedConditionError(ArbiterError):
    """Advanced compilation hit a scenario that is neither refined nor marked propositional."""


class UnboundVariableError(ArbiterError):
    """A variable survived to evaluation time; indicates a validator bug."""


class UnknownOptionError(ArbiterError):
    """A query or abduction target names an option the application does not declare."""


class InconsistentInputsError(ArbiterError):
    """The decision result and the ground rule set passed to the explainer disagree."""


class TooLargeError(ArbiterError):
    """The brute-force oracle was handed more ground rules than its hard cap."""


#: Diagnostic severities, from most to least severe.
SEVERITIES = ("error", "warning", "info")


@dataclass(frozen=True)
class Diagnostic:
    """One finding from static validation; never raised, always collected."""

    severity: str
    code: str
    message: str
    labels: tuple[str, ...] = field(default=())

    def __str__(self):
        where = f" [{', '.join(self.labels)}]" if self.labels else ""
        return f"{self.severity}: {self.code}: {self.message}{where}"
