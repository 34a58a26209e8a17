"""Canonical data model for points, strokes and recordings.

A recording is what one classification request operates on: an ordered
list of strokes, each stroke an ordered list of timestamped control
points captured from a drawing canvas.  The wire format is a JSON array
of stroke arrays whose points are objects with keys ``x``, ``y`` and
``time`` (canvas pixels, milliseconds).  Unknown point keys are ignored
so exports from other capture tools keep parsing.

Coordinates are stored as float64 even though raw capture devices emit
integers: preprocessing produces fractional values, so one numeric type
serves the whole pipeline.  Millisecond timestamps below 2**53 are
exactly representable in float64, so nothing is lost on ingestion.

All types are immutable after construction and safe to share across
concurrent readers.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    RecordingParseError,
    RecordingStructureError,
    RecordingValueError,
)

__all__ = [
    "Point",
    "Stroke",
    "Recording",
    "SymbolTable",
    "parse_recording",
    "serialize_recording",
    "bounding_box",
]

# Largest integer exactly representable in float64; timestamps and
# coordinates beyond this cannot round-trip.
_MAX_EXACT_INT = 2**53


class Point:
    """A single control point: canvas x/y plus a millisecond timestamp."""

    __slots__ = ("x", "y", "t")

    def __init__(self, x: float, y: float, t: float):
        self.x = float(x)
        self.y = float(y)
        self.t = float(t)

    def __iter__(self) -> Iterator[float]:
        return iter((self.x, self.y, self.t))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Point):
            return NotImplemented
        return (self.x, self.y, self.t) == (other.x, other.y, other.t)

    def __repr__(self) -> str:
        return f"Point(x={self.x!r}, y={self.y!r}, t={self.t!r})"


class Stroke:
    """One pen-down-to-pen-up sequence of control points.

    Points live in an immutable ``(n, 3)`` float64 array with columns
    x, y, t.  ``pen_down`` is only present on strokes produced by the
    whole-recording resampler, which inserts synthetic points between
    the original strokes; it marks which points lie on real ink.
    """

    __slots__ = ("points", "pen_down")

    def __init__(self, points, pen_down=None):
        arr = np.asarray(points, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 3 or arr.shape[0] == 0:
            raise RecordingStructureError(
                f"stroke needs a non-empty (n, 3) point array, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise RecordingValueError("stroke contains non-finite coordinates")
        if np.any(arr[:, 2] < 0):
            raise RecordingValueError("stroke contains negative timestamps")
        arr = arr.copy()
        arr.setflags(write=False)
        self.points = arr
        if pen_down is not None:
            flags = np.asarray(pen_down, dtype=bool)
            if flags.shape != (arr.shape[0],):
                raise RecordingStructureError(
                    "pen_down flags must match the point count"
                )
            flags = flags.copy()
            flags.setflags(write=False)
            self.pen_down = flags
        else:
            self.pen_down = None

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self) -> Iterator[Point]:
        for x, y, t in self.points:
            yield Point(x, y, t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Stroke):
            return NotImplemented
        if not np.array_equal(self.points, other.points):
            return False
        if (self.pen_down is None) != (other.pen_down is None):
            return False
        return self.pen_down is None or np.array_equal(self.pen_down, other.pen_down)

    def __repr__(self) -> str:
        return f"Stroke({len(self)} points)"

    @property
    def xy(self) -> np.ndarray:
        """The (n, 2) x/y view of this stroke."""
        return self.points[:, :2]

    @property
    def times(self) -> np.ndarray:
        return self.points[:, 2]

    def path_length(self) -> float:
        """Summed euclidean length of the consecutive line segments."""
        if len(self) < 2:
            return 0.0
        return float(np.sum(np.hypot(*np.diff(self.xy, axis=0).T)))


class Recording:
    """An ordered, non-empty list of strokes with optional id and label."""

    __slots__ = ("strokes", "id", "label")

    def __init__(self, strokes: Iterable[Stroke], id=None, label=None):
        strokes = tuple(strokes)
        if not strokes:
            raise RecordingStructureError("recording needs at least one stroke")
        for s in strokes:
            if not isinstance(s, Stroke):
                raise RecordingStructureError(
                    f"expected Stroke, got {type(s).__name__}"
                )
        self.strokes = strokes
        self.id = id
        self.label = label

    def __len__(self) -> int:
        return len(self.strokes)

    def __iter__(self) -> Iterator[Stroke]:
        return iter(self.strokes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Recording):
            return NotImplemented
        return self.strokes == other.strokes

    def __repr__(self) -> str:
        return (
            f"Recording(id={self.id!r}, strokes={len(self.strokes)}, "
            f"points={self.point_count()}, label={self.label!r})"
        )

    def point_count(self) -> int:
        return sum(len(s) for s in self.strokes)

    def point_array(self) -> np.ndarray:
        """All points of all strokes concatenated, shape (n, 3)."""
        return np.concatenate([s.points for s in self.strokes], axis=0)

    def replace(self, strokes: Iterable[Stroke]) -> "Recording":
        """A new recording with different strokes but the same id/label."""
        return Recording(strokes, id=self.id, label=self.label)


def _point_value(obj: Mapping, key: str, allow_negative: bool) -> float:
    try:
        value = obj[key]
    except (KeyError, TypeError):
        raise RecordingStructureError(f"point object is missing key {key!r}")
    # bool is an int subclass; reject it explicitly
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RecordingValueError(f"point key {key!r} is not numeric: {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise RecordingValueError(f"point key {key!r} is not finite")
    if not allow_negative and value < 0:
        raise RecordingValueError(f"point key {key!r} must be non-negative")
    return value


def parse_recording(raw_text: str, id=None, label=None) -> Recording:
    """Parse the JSON wire format into a :class:`Recording`.

    The input must be an array of stroke arrays; every point is an
    object with numeric ``x``, ``y`` and ``time``.  Stroke and point
    order are preserved exactly.  An optional boolean ``pen_down`` key
    is honoured (emitted by :func:`serialize_recording` for resampled
    recordings); any other extra keys are ignored.
    """
    try:
        data = json.loads(raw_text)
    except json.JSONDecodeError as exc:
        raise RecordingParseError(f"recording is not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise RecordingStructureError("top level must be an array of strokes")
    if not data:
        raise RecordingStructureError("recording has no strokes")
    strokes = []
    for si, raw_stroke in enumerate(data):
        if not isinstance(raw_stroke, list):
            raise RecordingStructureError(f"stroke {si} is not an array")
        if not raw_stroke:
            raise RecordingStructureError(f"stroke {si} is empty")
        pts = np.empty((len(raw_stroke), 3), dtype=np.float64)
        flags = None
        for pi, raw_point in enumerate(raw_stroke):
            if not isinstance(raw_point, dict):
                raise RecordingStructureError(
                    f"stroke {si} point {pi} is not an object"
                )
            pts[pi, 0] = _point_value(raw_point, "x", allow_negative=True)
            pts[pi, 1] = _point_value(raw_point, "y", allow_negative=True)
            pts[pi, 2] = _point_value(raw_point, "time", allow_negative=False)
            if "pen_down" in raw_point:
                if flags is None:
                    flags = np.ones(len(raw_stroke), dtype=bool)
                flags[pi] = bool(raw_point["pen_down"])
        strokes.append(Stroke(pts, pen_down=flags))
    return Recording(strokes, id=id, label=label)


def _json_number(value: float):
    """Render a float as an int when it is one, for wire-format parity
    with integer capture devices."""
    if float(value).is_integer() and abs(value) <= _MAX_EXACT_INT:
        return int(value)
    return float(value)


def serialize_recording(rec: Recording) -> str:
    """Serialize to the JSON wire format (keys in x, y, time order).

    ``parse_recording(serialize_recording(r))`` is structurally the
    identity: integral coordinates are written as JSON integers and
    fractional ones with full float precision.
    """
    out = []
    for stroke in rec.strokes:
        raw_stroke = []
        for i, (x, y, t) in enumerate(stroke.points):
            obj = {"x": _json_number(x), "y": _json_number(y), "time": _json_number(t)}
            if stroke.pen_down is not None:
                obj["pen_down"] = bool(stroke.pen_down[i])
            raw_stroke.append(obj)
        out.append(raw_stroke)
    return json.dumps(out, separators=(",", ":"))


def bounding_box(rec: Recording) -> tuple[float, float, float, float]:
    """(x_min, y_min, x_max, y_max) over all points of all strokes."""
    pts = rec.point_array()
    return (
        float(pts[:, 0].min()),
        float(pts[:, 1].min()),
        float(pts[:, 0].max()),
        float(pts[:, 1].max()),
    )


class SymbolTable:
    """Bidirectional map between integer symbol ids and command strings."""

    __slots__ = ("_by_id", "_by_command")

    def __init__(self, entries: Mapping[int, str]):
        by_id = {int(k): str(v) for k, v in entries.items()}
        if len(set(by_id.values())) != len(by_id):
            raise RecordingStructureError("symbol commands must be unique")
        self._by_id = by_id
        self._by_command = {v: k for k, v in by_id.items()}

    @classmethod
    def from_commands(cls, commands: Sequence[str]) -> "SymbolTable":
        """Build a table assigning ids 0..n-1 to sorted unique commands."""
        return cls({i: c for i, c in enumerate(sorted(set(commands)))})

    def __len__(self) -> int:
        return len(self._by_id)

    def __contains__(self, symbol_id: int) -> bool:
        return int(symbol_id) in self._by_id

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolTable):
            return NotImplemented
        return self._by_id == other._by_id

    def ids(self) -> list[int]:
        return sorted(self._by_id)

    def commands(self) -> list[str]:
        return [self._by_id[i] for i in self.ids()]

    def command_for(self, symbol_id: int) -> str:
        return self._by_id[int(symbol_id)]

    def id_for(self, command: str) -> int:
        return self._by_command[command]

    def has_command(self, command: str) -> bool:
        return command in self._by_command

    def to_dict(self) -> dict[int, str]:
        return dict(self._by_id)
