"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PolydapError(Exception):
    """Base class for every error raised by this package."""


class EncodingError(PolydapError):
    """A message could not be serialized for the wire."""


class StreamError(PolydapError):
    """The framed byte stream is malformed; the connection is poisoned."""

    def __init__(self, reason: str, offending_prefix: bytes = b"") -> None:
        super().__init__(reason)
        self.offending_prefix = offending_prefix


class ProtocolError(PolydapError):
    """A peer violated request/response correlation or message shape."""


class CapabilityError(PolydapError):
    """A child adapter rejected or lacks a required request."""

    def __init__(self, request_name: str, detail: str = "") -> None:
        message = request_name if not detail else f"{request_name}: {detail}"
        super().__init__(message)
        self.request_name = request_name


class StartupTimeout(PolydapError):
    """A child adapter did not reach its first standby stop in time."""


class AgentDead(PolydapError):
    """The child adapter connection is gone; the agent is unusable."""


class AgentStateError(PolydapError):
    """An agent operation was invoked in a state that forbids it."""


class ClassificationError(PolydapError):
    """A stop could not be classified; the agent is quarantined."""


class InputError(PolydapError):
    """User-supplied input (program path, arguments) is invalid."""


class RegistrationError(PolydapError):
    """A language registration conflicts with an existing one."""


class UnknownLanguage(PolydapError):
    """No registered language claims the given extension or id."""

    def __init__(self, token: str) -> None:
        super().__init__(token)
        self.token = token


class InvalidFrame(PolydapError):
    """A client request referenced an unknown composed frame id."""


class LossyTransfer(PolydapError):
    """An opaque value cannot cross a language boundary."""


class ConfigError(PolydapError):
    """The session configuration document is invalid."""


class ScenarioError(PolydapError):
    """A scripted mock adapter scenario was violated."""
