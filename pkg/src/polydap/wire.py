"""Framing and correlation for DAP messages.

The wire format is `Content-Length: <n>\\r\\n\\r\\n` followed by exactly n
bytes of UTF-8 JSON. Content-Length counts bytes, never characters.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .errors import EncodingError, ProtocolError, StreamError

log = logging.getLogger(__name__)

HEADER_TERMINATOR = b"\r\n\r\n"


class MessageKind(str, Enum):
    REQUEST = "request"
    RESPONSE = "response"
    EVENT = "event"


@dataclass(frozen=True)
class DapMessage:
    """One protocol message: a request, a response, or an event.

    `name` holds the command (requests/responses) or the event name.
    `payload` is the arguments document for requests and the body for
    responses and events. `request_seq`, `success` and `error_text` are
    meaningful for responses only.
    """

    kind: MessageKind
    seq: int
    name: str
    payload: dict[str, Any] = field(default_factory=dict)
    request_seq: int | None = None
    success: bool | None = None
    error_text: str | None = None

    def __post_init__(self) -> None:
        if self.seq <= 0:
            raise ProtocolError(f"seq must be positive, got {self.seq}")
        if not self.name:
            raise ProtocolError("command or event name must be non-empty")
        if self.kind is MessageKind.RESPONSE:
            if self.request_seq is None or self.request_seq <= 0:
                raise ProtocolError("response requires a positive request_seq")
            if self.success is None:
                raise ProtocolError("response requires a success flag")
        else:
            if self.request_seq is not None:
                raise ProtocolError(f"{self.kind.value} must not carry request_seq")
            if self.success is not None or self.error_text is not None:
                raise ProtocolError(f"{self.kind.value} must not carry response fields")

    @classmethod
    def request(cls, seq: int, command: str, arguments: dict[str, Any] | None = None) -> DapMessage:
        return cls(MessageKind.REQUEST, seq, command, arguments or {})

    @classmethod
    def response_to(
        cls,
        request: DapMessage,
        seq: int,
        *,
        success: bool = True,
        body: dict[str, Any] | None = None,
        error_text: str | None = None,
    ) -> DapMessage:
        return cls(
            MessageKind.RESPONSE,
            seq,
            request.name,
            body or {},
            request_seq=request.seq,
            success=success,
            error_text=error_text,
        )

    @classmethod
    def event(cls, seq: int, name: str, body: dict[str, Any] | None = None) -> DapMessage:
        return cls(MessageKind.EVENT, seq, name, body or {})

    def to_wire(self) -> dict[str, Any]:
        """Render the canonical JSON document for this message."""
        doc: dict[str, Any] = {"seq": self.seq, "type": self.kind.value}
        if self.kind is MessageKind.REQUEST:
            doc["command"] = self.name
            doc["arguments"] = self.payload
        elif self.kind is MessageKind.RESPONSE:
            doc["command"] = self.name
            doc["request_seq"] = self.request_seq
            doc["success"] = self.success
            doc["body"] = self.payload
            if self.error_text is not None:
                doc["message"] = self.error_text
        else:
            doc["event"] = self.name
            doc["body"] = self.payload
        return doc

    @classmethod
    def from_wire(cls, doc: dict[str, Any]) -> DapMessage:
        try:
            kind = MessageKind(doc["type"])
            seq = int(doc["seq"])
            if kind is MessageKind.REQUEST:
                return cls(kind, seq, doc["command"], doc.get("arguments") or {})
            if kind is MessageKind.RESPONSE:
                success = bool(doc["success"])
                return cls(
                    kind,
                    seq,
                    doc["command"],
                    doc.get("body") or {},
                    request_seq=int(doc["request_seq"]),
                    success=success,
                    error_text=doc.get("message") if not success else None,
                )
            return cls(kind, seq, doc["event"], doc.get("body") or {})
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed message document: {exc}") from exc


def serialize_document(msg: DapMessage) -> bytes:
    try:
        text = json.dumps(msg.to_wire(), ensure_ascii=False, separators=(",", ":"))
    except (TypeError, ValueError) as exc:
        raise EncodingError(f"payload is not serializable: {exc}") from exc
    return text.encode("utf-8")


def encode_frame(msg: DapMessage) -> bytes:
    """Encode one message as a Content-Length framed byte sequence."""
    body = serialize_document(msg)
    return b"Content-Length: %d\r\n\r\n%s" % (len(body), body)


class FrameBuffer:
    """Incremental frame decoder, stable under arbitrary chunk boundaries.

    Any framing or JSON error poisons the buffer permanently: framing
    desync is unrecoverable without heuristics, so the owning connection
    must be torn down.
    """

    def __init__(self) -> None:
        self._pending = bytearray()
        self._scan_from = 0
        self._body_needed: int | None = None
        self._poison: StreamError | None = None

    @property
    def poisoned(self) -> bool:
        return self._poison is not None

    def feed(self, data: bytes) -> list[DapMessage]:
        """Consume bytes, returning every message they complete, in order."""
        if self._poison is not None:
            raise StreamError(f"stream already poisoned: {self._poison}")
        self._pending += data
        decoded: list[DapMessage] = []
        try:
            while True:
                if self._body_needed is None:
                    end = self._pending.find(HEADER_TERMINATOR, self._scan_from)
                    if end < 0:
                        # Resume the scan just before the tail so a terminator
                        # split across chunks is still found.
                        self._scan_from = max(0, len(self._pending) - len(HEADER_TERMINATOR) + 1)
                        break
                    self._body_needed = self._parse_header(bytes(self._pending[:end]))
                    del self._pending[: end + len(HEADER_TERMINATOR)]
                    self._scan_from = 0
                if len(self._pending) < self._body_needed:
                    break
                body = bytes(self._pending[: self._body_needed])
                del self._pending[: self._body_needed]
                self._body_needed = None
                decoded.append(self._parse_body(body))
        except StreamError as exc:
            self._poison = exc
            raise
        return decoded

    def _parse_header(self, header: bytes) -> int:
        length: int | None = None
        for line in header.split(b"\r\n"):
            if not line:
                continue
            key, sep, value = line.partition(b":")
            if not sep:
                raise StreamError("header line without ':'", header)
            if key.strip().lower() == b"content-length":
                try:
                    length = int(value.strip())
                except ValueError:
                    raise StreamError(f"bad Content-Length value {value!r}", header) from None
                if length < 0:
                    raise StreamError(f"negative Content-Length {length}", header)
            else:
                log.warning("ignoring unexpected header line %r", line)
        if length is None:
            raise StreamError("missing Content-Length header", header)
        return length

    def _parse_body(self, body: bytes) -> DapMessage:
        try:
            doc = json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise StreamError(f"invalid message document: {exc}", body) from exc
        if not isinstance(doc, dict):
            raise StreamError("message document is not an object", body)
        try:
            return DapMessage.from_wire(doc)
        except ProtocolError as exc:
            raise StreamError(str(exc), body) from exc


class Correlator:
    """Tracks outstanding request seqs and matches responses to them."""

    def __init__(self) -> None:
        self._outstanding: set[int] = set()

    @property
    def outstanding(self) -> frozenset[int]:
        return frozenset(self._outstanding)

    def sent(self, seq: int) -> None:
        if seq in self._outstanding:
            raise ProtocolError(f"request seq {seq} already outstanding")
        self._outstanding.add(seq)

    def correlate(self, resp: DapMessage) -> int:
        if resp.kind is not MessageKind.RESPONSE:
            raise ProtocolError(f"cannot correlate a {resp.kind.value}")
        assert resp.request_seq is not None
        if resp.request_seq not in self._outstanding:
            raise ProtocolError(f"response for unknown request_seq {resp.request_seq}")
        self._outstanding.discard(resp.request_seq)
        return resp.request_seq
