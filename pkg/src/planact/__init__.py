"""planact: a Plan-Act orchestration kernel with deterministic mock tools,
three-level memory, and a plan-quality benchmark harness."""

from .errors import (
    CorruptTraceError,
    EndpointError,
    FixtureError,
    InvalidDescriptorError,
    InvalidStoryboardError,
    MalformedArgumentsError,
    MalformedJson,
    MultipleEnvelopesError,
    NoEnvelopeError,
    NotOngoingError,
    PlanInvalidError,
    ReplanBudgetExhaustedError,
    SchemaError,
    SchemaViolationError,
    SessionNotTerminalError,
    UnknownToolError,
    UnresolvableInputError,
)
from .plan import (
    Plan,
    Step,
    StepOutcome,
    ToolBinding,
    advance,
    parse_plan,
    serialize_plan,
    tool_sequence,
    validate_plan,
)
from .storyboard import (
    Storyboard,
    parse_storyboard,
    serialize_storyboard,
    shots_to_requests,
    validate_storyboard,
)

__version__ = "0.1.0"
