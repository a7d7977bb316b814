"""Conversion between adapter value strings and a language-neutral form.

Adapters report every variable as a string in the debuggee language's own
rendering. Crossing a language boundary therefore means: classify the
source string into a neutral envelope, then render the envelope as a
literal expression in the target language. The per-language rules live in
data tables so adding a language never touches this engine.
"""

from __future__ import annotations

import ast
import json
import math
import re
import struct
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .errors import ConfigError, LossyTransfer

# Prefix marking a string as an in-band error value (used when a debuggee
# exception must travel back through a value slot).
ERROR_TAG = "<polyglot-error> "


class ValueKind(str, Enum):
    INT = "int"
    FLOAT = "float"
    BOOL = "bool"
    STR = "str"
    NULL = "null"
    ERROR = "error"
    OPAQUE = "opaque"


@dataclass(frozen=True)
class ValueEnvelope:
    """Language-neutral value crossing a polyglot boundary.

    `lexical` is the canonical neutral rendering; `numeric` carries the
    exact int or binary64 value for numeric kinds. Opaque envelopes keep
    the source string verbatim and are flagged lossy.
    """

    kind: ValueKind
    lexical: str
    numeric: int | float | None = None
    lossy: bool = False

    @classmethod
    def of_int(cls, value: int) -> ValueEnvelope:
        return cls(ValueKind.INT, str(value), value)

    @classmethod
    def of_float(cls, value: float) -> ValueEnvelope:
        return cls(ValueKind.FLOAT, canonical_float(value), value)

    @classmethod
    def of_bool(cls, value: bool) -> ValueEnvelope:
        return cls(ValueKind.BOOL, "true" if value else "false")

    @classmethod
    def of_str(cls, value: str) -> ValueEnvelope:
        return cls(ValueKind.STR, value)

    @classmethod
    def null(cls) -> ValueEnvelope:
        return cls(ValueKind.NULL, "null")

    @classmethod
    def error(cls, text: str) -> ValueEnvelope:
        return cls(ValueKind.ERROR, text)

    @classmethod
    def opaque(cls, lexical: str) -> ValueEnvelope:
        return cls(ValueKind.OPAQUE, lexical, lossy=True)


def canonical_float(value: float) -> str:
    """Shortest decimal string that round-trips the binary64 value."""
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


@dataclass(frozen=True)
class LexicalRule:
    """One classification rule: anchored regex plus a named normalizer."""

    pattern: str
    kind: ValueKind
    normalizer: str


@dataclass(frozen=True)
class ValueTable:
    """Per-language lexical mapping: parse rules plus kind renderers."""

    rules: tuple[LexicalRule, ...]
    renderers: dict[ValueKind, str]

    @classmethod
    def from_data(cls, data: dict) -> ValueTable:
        try:
            rules = tuple(
                LexicalRule(r["pattern"], ValueKind(r["kind"]), r["normalizer"])
                for r in data["rules"]
            )
            renderers = {ValueKind(k): v for k, v in data["renderers"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad value table: {exc}") from exc
        for rule in rules:
            if rule.normalizer not in _NORMALIZERS:
                raise ConfigError(f"unknown normalizer {rule.normalizer!r}")
            re.compile(rule.pattern)
        for kind, name in renderers.items():
            if name not in _RENDERERS:
                raise ConfigError(f"unknown renderer {name!r} for kind {kind.value}")
        return cls(rules, renderers)

    def to_data(self) -> dict:
        return {
            "rules": [
                {"pattern": r.pattern, "kind": r.kind.value, "normalizer": r.normalizer}
                for r in self.rules
            ],
            "renderers": {k.value: v for k, v in self.renderers.items()},
        }


# --- normalizers: adapter string -> envelope (None means "rule does not apply")


def _norm_int(raw: str) -> ValueEnvelope | None:
    try:
        return ValueEnvelope.of_int(int(raw))
    except ValueError:
        return None


def _norm_float(raw: str) -> ValueEnvelope | None:
    try:
        value = float(raw)
    except ValueError:
        return None
    return ValueEnvelope.of_float(value)


def _norm_float_call(raw: str) -> ValueEnvelope | None:
    # Rendered non-finite literals look like float("inf"); real adapters
    # report the bare repr, but both forms must classify identically.
    try:
        return ValueEnvelope.of_float(float(raw[len('float("'):-len('")')]))
    except ValueError:
        return None


def _norm_bool(raw: str) -> ValueEnvelope | None:
    lowered = raw.lower()
    if lowered not in ("true", "false"):
        return None
    return ValueEnvelope.of_bool(lowered == "true")


def _norm_null(raw: str) -> ValueEnvelope | None:
    return ValueEnvelope.null()


def _string_literal(raw: str) -> str | None:
    try:
        value = ast.literal_eval(raw)
    except (SyntaxError, ValueError):
        return None
    return value if isinstance(value, str) else None


def _norm_str_literal(raw: str) -> ValueEnvelope | None:
    value = _string_literal(raw)
    if value is None:
        return None
    if value.startswith(ERROR_TAG):
        return ValueEnvelope.error(value[len(ERROR_TAG):])
    return ValueEnvelope.of_str(value)


def _norm_bare_str(raw: str) -> ValueEnvelope | None:
    if raw.startswith(ERROR_TAG):
        return ValueEnvelope.error(raw[len(ERROR_TAG):])
    return ValueEnvelope.of_str(raw)


_NORMALIZERS: dict[str, Callable[[str], ValueEnvelope | None]] = {
    "int": _norm_int,
    "float": _norm_float,
    "float_call": _norm_float_call,
    "bool": _norm_bool,
    "null": _norm_null,
    "str_literal": _norm_str_literal,
    "bare_str": _norm_bare_str,
}


# --- renderers: envelope -> literal expression in the target language


def _quote(text: str) -> str:
    return json.dumps(text, ensure_ascii=False)


def _render_float_python(env: ValueEnvelope) -> str:
    value = float(env.numeric)  # type: ignore[arg-type]
    if math.isnan(value):
        return 'float("nan")'
    if math.isinf(value):
        return 'float("inf")' if value > 0 else 'float("-inf")'
    return repr(value)


def _render_float_js(env: ValueEnvelope) -> str:
    value = float(env.numeric)  # type: ignore[arg-type]
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    return repr(value)


_RENDERERS: dict[str, Callable[[ValueEnvelope], str]] = {
    "int_decimal": lambda env: str(env.numeric),
    "float_python": _render_float_python,
    "float_js": _render_float_js,
    "bool_python": lambda env: "True" if env.lexical == "true" else "False",
    "bool_js": lambda env: env.lexical,
    "null_python": lambda env: "None",
    "null_js": lambda env: "null",
    "str_quoted": lambda env: _quote(env.lexical),
    "error_tagged": lambda env: _quote(ERROR_TAG + env.lexical),
    "verbatim": lambda env: env.lexical,
}

_INT_PATTERN = r"-?\d+"
_FLOAT_PATTERN = (
    r"[+-]?(?:\d+\.\d*|\.\d+|\d+(?:\.\d*)?[eE][+-]?\d+|inf(?:inity)?|nan|Infinity|NaN)"
)
_QUOTED_PATTERN = r"(?s)(['\"]).*\1"

PYTHON_TABLE = ValueTable(
    rules=(
        LexicalRule(_INT_PATTERN, ValueKind.INT, "int"),
        LexicalRule(_FLOAT_PATTERN, ValueKind.FLOAT, "float"),
        LexicalRule(r'float\("(?:-?inf|nan)"\)', ValueKind.FLOAT, "float_call"),
        LexicalRule(r"True|False", ValueKind.BOOL, "bool"),
        LexicalRule(r"None", ValueKind.NULL, "null"),
        LexicalRule(_QUOTED_PATTERN, ValueKind.STR, "str_literal"),
    ),
    renderers={
        ValueKind.INT: "int_decimal",
        ValueKind.FLOAT: "float_python",
        ValueKind.BOOL: "bool_python",
        ValueKind.NULL: "null_python",
        ValueKind.STR: "str_quoted",
        ValueKind.ERROR: "error_tagged",
        ValueKind.OPAQUE: "verbatim",
    },
)

JAVASCRIPT_TABLE = ValueTable(
    rules=(
        LexicalRule(_INT_PATTERN, ValueKind.INT, "int"),
        LexicalRule(_FLOAT_PATTERN, ValueKind.FLOAT, "float"),
        LexicalRule(r"true|false", ValueKind.BOOL, "bool"),
        LexicalRule(r"null|undefined", ValueKind.NULL, "null"),
        LexicalRule(_QUOTED_PATTERN, ValueKind.STR, "str_literal"),
    ),
    renderers={
        ValueKind.INT: "int_decimal",
        ValueKind.FLOAT: "float_js",
        ValueKind.BOOL: "bool_js",
        ValueKind.NULL: "null_js",
        ValueKind.STR: "str_quoted",
        ValueKind.ERROR: "error_tagged",
        ValueKind.OPAQUE: "verbatim",
    },
)

# Neutral profile for languages without a dedicated table: JSON-shaped.
GENERIC_TABLE = ValueTable(
    rules=(
        LexicalRule(_INT_PATTERN, ValueKind.INT, "int"),
        LexicalRule(_FLOAT_PATTERN, ValueKind.FLOAT, "float"),
        LexicalRule(r"(?i)true|false", ValueKind.BOOL, "bool"),
        LexicalRule(r"(?i)null|none|nil|undefined", ValueKind.NULL, "null"),
        LexicalRule(_QUOTED_PATTERN, ValueKind.STR, "str_literal"),
    ),
    renderers={
        ValueKind.INT: "int_decimal",
        ValueKind.FLOAT: "float_js",
        ValueKind.BOOL: "bool_js",
        ValueKind.NULL: "null_js",
        ValueKind.STR: "str_quoted",
        ValueKind.ERROR: "error_tagged",
        ValueKind.OPAQUE: "verbatim",
    },
)

BUILTIN_PROFILES: dict[str, ValueTable] = {
    "python": PYTHON_TABLE,
    "javascript": JAVASCRIPT_TABLE,
    "generic": GENERIC_TABLE,
}


class ValueConverter:
    """Registry of per-language tables plus the parse/render engine."""

    def __init__(self) -> None:
        self._tables: dict[str, ValueTable] = {}

    def register(self, language_id: str, table: ValueTable) -> None:
        self._tables[language_id] = table

    def table_for(self, language_id: str) -> ValueTable:
        table = self._tables.get(language_id)
        if table is not None:
            return table
        return BUILTIN_PROFILES.get(language_id, GENERIC_TABLE)

    def parse_value(self, language_id: str, raw: str) -> ValueEnvelope:
        """Classify an adapter value string. Total: falls back to Opaque."""
        table = self.table_for(language_id)
        for rule in table.rules:
            if re.fullmatch(rule.pattern, raw):
                envelope = _NORMALIZERS[rule.normalizer](raw)
                if envelope is not None:
                    return envelope
        return ValueEnvelope.opaque(raw)

    def render_value(
        self,
        language_id: str,
        value: ValueEnvelope,
        *,
        source_language: str | None = None,
    ) -> str:
        """Render the envelope as a literal expression in the target language.

        Opaque envelopes only transfer back into the language that produced
        them; anywhere else the transfer would silently corrupt data.
        """
        if value.kind is ValueKind.OPAQUE and source_language is not None and source_language != language_id:
            raise LossyTransfer(
                f"opaque value cannot cross {source_language} -> {language_id}: {value.lexical!r}"
            )
        table = self.table_for(language_id)
        renderer = table.renderers.get(value.kind)
        if renderer is None:
            raise LossyTransfer(f"no renderer for kind {value.kind.value} in {language_id}")
        return _RENDERERS[renderer](value)

    def round_trip(self, language_a: str, language_b: str, value: ValueEnvelope) -> ValueEnvelope:
        """Send a value from language_a into language_b and read it back."""
        rendered = self.render_value(language_b, value, source_language=language_a)
        return self.parse_value(language_b, rendered)


_DEFAULT = ValueConverter()


def parse_value(language_id: str, raw: str) -> ValueEnvelope:
    return _DEFAULT.parse_value(language_id, raw)


def render_value(
    language_id: str, value: ValueEnvelope, *, source_language: str | None = None
) -> str:
    return _DEFAULT.render_value(language_id, value, source_language=source_language)


def round_trip(language_a: str, language_b: str, value: ValueEnvelope) -> ValueEnvelope:
    return _DEFAULT.round_trip(language_a, language_b, value)


def envelopes_equal(a: ValueEnvelope, b: ValueEnvelope) -> bool:
    """Value equality with bit-exact float comparison (NaN equals NaN)."""
    if a.kind is not b.kind:
        return False
    if a.kind is ValueKind.FLOAT:
        return struct.pack("<d", a.numeric) == struct.pack("<d", b.numeric)
    if a.kind is ValueKind.INT:
        return a.numeric == b.numeric
    return a.lexical == b.lexical
