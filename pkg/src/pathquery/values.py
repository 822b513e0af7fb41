"""Value model shared by every other layer.

Nine value types flow through queries: Bool, Int, Double, String, Text,
DateTime, Duration, Id, and Record.  Values are immutable and hashable.
Int and Double equate and order numerically across the two types; all
other cross-type comparisons fall back to a fixed type rank so that
sorting stays total.  Records are mutually unordered and rank last.
"""

from __future__ import annotations

import datetime as _datetime
import math
import re
from dataclasses import dataclass
from typing import Iterable, Union

INT_MIN = -(2 ** 63)
INT_MAX = 2 ** 63 - 1


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True, eq=False)
class Int:
    """64-bit two's-complement integer; construction enforces the range."""

    value: int

    def __post_init__(self) -> None:
        if not INT_MIN <= self.value <= INT_MAX:
            raise ValueError("integer out of 64-bit range: %d" % self.value)

    def __eq__(self, other: object):
        if isinstance(other, (Int, Double)):
            return self.value == other.value
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)


@dataclass(frozen=True, eq=False)
class Double:
    value: float

    def __eq__(self, other: object):
        if isinstance(other, (Int, Double)):
            return self.value == other.value
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)


@dataclass(frozen=True)
class DateTime:
    """A date, a time, or both; missing parts are zeroed.  No subseconds."""

    has_date: bool
    has_time: bool
    year: int = 0
    month: int = 0
    day: int = 0
    hour: int = 0
    minute: int = 0
    second: int = 0
    offset_minutes: int | None = None

    def __post_init__(self) -> None:
        if not (self.has_date or self.has_time):
            raise ValueError("DateTime needs a date part or a time part")
        if self.has_date:
            _datetime.date(self.year, self.month, self.day)  # range check
        elif (self.year, self.month, self.day) != (0, 0, 0):
            raise ValueError("date fields must be zero without a date part")
        if self.has_time:
            if not (0 <= self.hour < 24 and 0 <= self.minute < 60
                    and 0 <= self.second < 60):
                raise ValueError("time fields out of range")
        elif (self.hour, self.minute, self.second) != (0, 0, 0):
            raise ValueError("time fields must be zero without a time part")
        if self.offset_minutes is not None:
            if not self.has_time:
                raise ValueError("a timezone offset requires a time part")
            if abs(self.offset_minutes) > 24 * 60:
                raise ValueError("timezone offset out of range")

    def instant(self) -> int:
        """Seconds on a single axis, normalized by the offset."""
        secs = self.hour * 3600 + self.minute * 60 + self.second
        if self.offset_minutes is not None:
            secs -= self.offset_minutes * 60
        if self.has_date:
            ordinal = _datetime.date(self.year, self.month, self.day).toordinal()
            return ordinal * 86400 + secs
        return secs


@dataclass(frozen=True)
class Duration:
    """Signed duration in whole milliseconds; no year/month/week components."""

    millis: int


@dataclass(frozen=True)
class String:
    value: str


@dataclass(frozen=True)
class Text:
    """A string with a language tag; the tag participates in equality."""

    value: str
    lang: str


@dataclass(frozen=True)
class Id:
    """Opaque entity identifier; never equal to a String of the same text."""

    value: str


@dataclass(frozen=True)
class Record:
    """Ordered fields, each mapping a name to one or more values."""

    fields: tuple[tuple[str, tuple["Value", ...]], ...]

    def __post_init__(self) -> None:
        seen = set()
        for name, vals in self.fields:
            if name in seen:
                raise ValueError("duplicate record field: %s" % name)
            seen.add(name)
            if not vals:
                raise ValueError("record field %s has no values" % name)

    @classmethod
    def of(cls, pairs: Iterable[tuple[str, object]]) -> "Record":
        """Build from (name, values) pairs; a bare value means a singleton."""
        fields = []
        for name, vals in pairs:
            if isinstance(vals, (list, tuple)):
                fields.append((name, tuple(vals)))
            else:
                fields.append((name, (vals,)))
        return cls(tuple(fields))

    def get(self, name: str) -> tuple["Value", ...]:
        for fname, vals in self.fields:
            if fname == name:
                return vals
        return ()


Value = Union[Bool, Int, Double, DateTime, Duration, String, Text, Id, Record]

VALUE_TYPES = (Bool, Int, Double, DateTime, Duration, String, Text, Id, Record)


def equals(a: Value, b: Value) -> bool:
    """Value equality: Int/Double numerically, everything else structurally."""
    return bool(a == b)


def is_truthy(v: Value) -> bool:
    """Every value is truthy except Bool false."""
    return not (isinstance(v, Bool) and not v.value)


_TYPE_RANK = {Bool: 0, Int: 1, Double: 1, DateTime: 2, Duration: 3,
              String: 4, Text: 5, Id: 6, Record: 7}


def _cmp(x, y) -> int:
    return (x > y) - (x < y)


def _compare_numeric(x, y) -> int:
    x_nan = isinstance(x, float) and math.isnan(x)
    y_nan = isinstance(y, float) and math.isnan(y)
    if x_nan or y_nan:
        # NaN sorts above +inf; two NaNs tie so that sorting stays total.
        if x_nan and y_nan:
            return 0
        return 1 if x_nan else -1
    return _cmp(x, y)


def _datetime_key(v: DateTime):
    off = v.offset_minutes
    return (v.has_date, v.has_time, v.instant(), off is not None, off or 0)


def compare(a: Value, b: Value) -> int:
    """Total preorder over values; returns -1, 0, or 1.

    Bool < numeric < DateTime < Duration < String < Text < Id < Record.
    Records are mutually unordered (always 0); sort them by field keys.
    """
    ra = _TYPE_RANK[type(a)]
    rb = _TYPE_RANK[type(b)]
    if ra != rb:
        return -1 if ra < rb else 1
    if ra == 1:
        return _compare_numeric(a.value, b.value)
    if isinstance(a, Bool):
        return _cmp(a.value, b.value)
    if isinstance(a, DateTime):
        return _cmp(_datetime_key(a), _datetime_key(b))
    if isinstance(a, Duration):
        return _cmp(a.millis, b.millis)
    if isinstance(a, (String, Id)):
        return _cmp(a.value, b.value)
    if isinstance(a, Text):
        return _cmp((a.value, a.lang), (b.value, b.lang))
    return 0


# ---------------------------------------------------------------------------
# Literal rendering
# ---------------------------------------------------------------------------

_ESCAPES = {"\\": "\\\\", "'": "\\'", "\n": "\\n", "\t": "\\t", "\r": "\\r"}


def _quote(s: str) -> str:
    return "'" + "".join(_ESCAPES.get(ch, ch) for ch in s) + "'"


def _render_double(x: float) -> str:
    if math.isinf(x):
        return "Double('inf')" if x > 0 else "Double('-inf')"
    if math.isnan(x):
        return "Double('nan')"
    return repr(x)


def datetime_body(v: DateTime) -> str:
    out = ""
    if v.has_date:
        out += "%04d-%02d-%02d" % (v.year, v.month, v.day)
    if v.has_time:
        out += "T%02d:%02d:%02d" % (v.hour, v.minute, v.second)
    if v.offset_minutes is not None:
        if v.offset_minutes == 0:
            out += "Z"
        else:
            sign = "+" if v.offset_minutes > 0 else "-"
            hours, minutes = divmod(abs(v.offset_minutes), 60)
            out += "%s%02d:%02d" % (sign, hours, minutes)
    return out


def duration_body(v: Duration) -> str:
    ms = v.millis
    sign = "-" if ms < 0 else ""
    ms = abs(ms)
    days, ms = divmod(ms, 86_400_000)
    hours, ms = divmod(ms, 3_600_000)
    minutes, ms = divmod(ms, 60_000)
    seconds, ms = divmod(ms, 1000)
    time_part = ""
    if hours:
        time_part += "%dH" % hours
    if minutes:
        time_part += "%dM" % minutes
    if seconds or ms or not (days or hours or minutes):
        sec_text = str(seconds)
        if ms:
            sec_text += ("." + "%03d" % ms).rstrip("0")
        time_part += sec_text + "S"
    out = sign + "P"
    if days:
        out += "%dD" % days
    if time_part:
        out += "T" + time_part
    return out


def render_literal(v: Value, indent: int = 0) -> str:
    """Literal text for a value; records span multiple indented lines."""
    if isinstance(v, Bool):
        return "true" if v.value else "false"
    if isinstance(v, Int):
        return str(v.value)
    if isinstance(v, Double):
        return _render_double(v.value)
    if isinstance(v, String):
        return _quote(v.value)
    if isinstance(v, Text):
        return "Text(%s, %s)" % (_quote(v.value), _quote(v.lang))
    if isinstance(v, DateTime):
        return "DateTime('%s')" % datetime_body(v)
    if isinstance(v, Duration):
        return "Duration('%s')" % duration_body(v)
    if isinstance(v, Id):
        return "Id(%s)" % _quote(v.value)
    if isinstance(v, Record):
        pad = "  " * (indent + 1)
        lines = ["{"]
        for name, vals in v.fields:
            for item in vals:
                lines.append("%s%s: %s" % (pad, name, render_literal(item, indent + 1)))
        lines.append("  " * indent + "}")
        return "\n".join(lines)
    raise TypeError("not a value: %r" % (v,))


# ---------------------------------------------------------------------------
# DateTime / Duration literal bodies
# ---------------------------------------------------------------------------

_DATETIME_RE = re.compile(
    r"^(?:(\d{4})-(\d{2})-(\d{2}))?"
    r"(?:T(\d{2}):(\d{2})(?::(\d{2}))?)?"
    r"(Z|[+-]\d{2}:\d{2})?$"
)

# Fractional seconds admit up to three digits so that any whole-millisecond
# duration has a parseable literal form.
_DURATION_RE = re.compile(
    r"^(-)?P(?:(\d+)D)?(?:T(?:(\d+)H)?(?:(\d+)M)?(?:(\d+)(?:\.(\d{1,3}))?S)?)?$"
)


def parse_datetime_body(s: str) -> DateTime:
    m = _DATETIME_RE.match(s)
    if not m or not s:
        raise ValueError("invalid DateTime literal: %r" % s)
    y, mo, d, h, mi, sec, off = m.groups()
    has_date = y is not None
    has_time = h is not None
    if not has_date and not has_time:
        raise ValueError("invalid DateTime literal: %r" % s)
    if off is not None and not has_time:
        raise ValueError("DateTime offset requires a time part: %r" % s)
    offset = None
    if off == "Z":
        offset = 0
    elif off:
        offset = (int(off[1:3]) * 60 + int(off[4:6])) * (-1 if off[0] == "-" else 1)
    try:
        return DateTime(has_date, has_time, int(y or 0), int(mo or 0), int(d or 0),
                        int(h or 0), int(mi or 0), int(sec or 0), offset)
    except ValueError as exc:
        raise ValueError("invalid DateTime literal %r: %s" % (s, exc)) from None


def parse_duration_body(s: str) -> Duration:
    m = _DURATION_RE.match(s)
    if not m:
        raise ValueError("invalid Duration literal: %r" % s)
    neg, days, hours, minutes, seconds, frac = m.groups()
    if days is None and hours is None and minutes is None and seconds is None:
        raise ValueError("invalid Duration literal: %r" % s)
    ms = (int(days or 0) * 86_400_000 + int(hours or 0) * 3_600_000
          + int(minutes or 0) * 60_000 + int(seconds or 0) * 1000)
    if frac:
        ms += int(frac.ljust(3, "0"))
    return Duration(-ms if neg else ms)


# ---------------------------------------------------------------------------
# JSON encoding (used by the CLI's json output format)
# ---------------------------------------------------------------------------

def to_json_obj(v: Value):
    """Typed JSON encoding that survives a round trip through from_json_obj."""
    if isinstance(v, Bool):
        return {"type": "Bool", "value": v.value}
    if isinstance(v, Int):
        return {"type": "Int", "value": v.value}
    if isinstance(v, Double):
        if math.isinf(v.value) or math.isnan(v.value):
            return {"type": "Double", "value": _special_float_name(v.value)}
        return {"type": "Double", "value": v.value}
    if isinstance(v, String):
        return {"type": "String", "value": v.value}
    if isinstance(v, Text):
        return {"type": "Text", "value": v.value, "lang": v.lang}
    if isinstance(v, DateTime):
        return {"type": "DateTime", "value": datetime_body(v)}
    if isinstance(v, Duration):
        return {"type": "Duration", "value": duration_body(v)}
    if isinstance(v, Id):
        return {"type": "Id", "value": v.value}
    if isinstance(v, Record):
        return {"type": "Record",
                "fields": [[name, [to_json_obj(x) for x in vals]]
                           for name, vals in v.fields]}
    raise TypeError("not a value: %r" % (v,))


def _special_float_name(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return "inf" if x > 0 else "-inf"


def from_json_obj(obj) -> Value:
    kind = obj["type"]
    if kind == "Bool":
        return Bool(obj["value"])
    if kind == "Int":
        return Int(obj["value"])
    if kind == "Double":
        raw = obj["value"]
        return Double(float(raw))
    if kind == "String":
        return String(obj["value"])
    if kind == "Text":
        return Text(obj["value"], obj["lang"])
    if kind == "DateTime":
        return parse_datetime_body(obj["value"])
    if kind == "Duration":
        return parse_duration_body(obj["value"])
    if kind == "Id":
        return Id(obj["value"])
    if kind == "Record":
        return Record(tuple((name, tuple(from_json_obj(x) for x in vals))
                            for name, vals in obj["fields"]))
    raise ValueError("unknown value type tag: %r" % kind)
