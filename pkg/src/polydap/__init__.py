"""Polyglot debugger backend.

One DAP endpoint in front, one child debug adapter per language behind.
Cross-language `polyglotEval(language, code)` calls are emulated by pausing
runner programs on strategic breakpoints and shuttling values between the
per-language adapters.
"""

from .agent import AgentPhase, AgentState, DebugAgent, PolyglotCallSite, StopCategory, StopKind
from .config import AgentConfig, RunnerContract, SessionConfig, SessionDefaults
from .coordinator import Coordinator, PolyglotCallFrame, SessionPhase
from .errors import PolydapError
from .server import DapServer
from .values import ValueEnvelope, ValueKind, parse_value, render_value, round_trip
from .wire import Correlator, DapMessage, FrameBuffer, MessageKind, encode_frame

__version__ = "0.1.0"

__all__ = [
    "AgentConfig",
    "AgentPhase",
    "AgentState",
    "Coordinator",
    "Correlator",
    "DapMessage",
    "DapServer",
    "DebugAgent",
    "FrameBuffer",
    "MessageKind",
    "PolydapError",
    "PolyglotCallFrame",
    "PolyglotCallSite",
    "RunnerContract",
    "SessionConfig",
    "SessionDefaults",
    "SessionPhase",
    "StopCategory",
    "StopKind",
    "ValueEnvelope",
    "ValueKind",
    "encode_frame",
    "parse_value",
    "render_value",
    "round_trip",
    "__version__",
]
