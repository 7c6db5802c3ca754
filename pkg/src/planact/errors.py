"""Exception types shared across the kernel."""

from __future__ import annotations


class MalformedJson(ValueError):
    """Input text is not syntactically valid JSON."""


class SchemaError(ValueError):
    """Input parsed but does not match the required shape.

    ``path`` points at the offending field, e.g. ``execution_plan.steps[1].tool.name``.
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class NotOngoingError(ValueError):
    """A step outcome targets a step that is not the ongoing one."""


class InvalidStoryboardError(ValueError):
    """Storyboard failed structural validation."""

    def __init__(self, violations):
        super().__init__("; ".join(v.message for v in violations) or "invalid storyboard")
        self.violations = list(violations)


class InvalidDescriptorError(ValueError):
    """Tool descriptor is malformed or references unregistered tools."""


class NoEnvelopeError(ValueError):
    """Message text contains no tool-call envelope."""


class MultipleEnvelopesError(ValueError):
    """Message text contains more than one envelope (one tool per message)."""


class MalformedArgumentsError(ValueError):
    """Envelope arguments body is not a JSON object."""


class UnknownToolError(KeyError):
    """Call names a (server, tool) pair absent from the registry."""


class UnknownSessionError(KeyError):
    """Call references a session that was never opened on the gateway."""


class SchemaViolationError(ValueError):
    """Call arguments do not satisfy the tool's parameter schema."""

    def __init__(self, param: str, message: str):
        super().__init__(f"{param}: {message}")
        self.param = param


class SessionNotTerminalError(RuntimeError):
    """Trace recording requested for a session that is still running."""


class PlanInvalidError(ValueError):
    """Planner policy produced a plan that fails validation."""

    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class ReplanBudgetExhaustedError(RuntimeError):
    """No replan attempts remain for the session."""


class UnresolvableInputError(ValueError):
    """A step input requirement could not be resolved to an artifact or material."""


class EndpointError(RuntimeError):
    """External planner endpoint unreachable or returned a bad response."""


class FixtureError(ValueError):
    """A goal-card fixture failed to load or validate."""

    def __init__(self, card_id: str, message: str):
        super().__init__(f"{card_id}: {message}")
        self.card_id = card_id


class CorruptTraceError(ValueError):
    """A transcript file is unreadable from some line onward."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number
