"""Cleaning and normalization algorithms for recordings.

Every operation is a pure function ``Recording -> Recording`` and never
mutates its input, so applying them over many recordings is trivially
parallel.  The steps compose into an ordered :class:`PreprocessingQueue`
(duplicates allowed) that is applied left to right; a non-fatal
validator warns when the configured order violates the known step
dependencies (see :func:`check_queue_order`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, ParameterError
from .recording import Recording, Stroke

__all__ = [
    "remove_duplicate_time",
    "remove_dots",
    "dot_reduction",
    "wild_point_filter",
    "stroke_connect",
    "weighted_average_smoothing",
    "dehook",
    "douglas_peucker",
    "scale_and_shift",
    "space_evenly",
    "space_evenly_per_stroke",
    "PreprocessingStep",
    "PreprocessingQueue",
    "apply_queue",
    "check_queue_order",
    "QueueOrderWarning",
    "CubicFallbackWarning",
    "STEP_NAMES",
]


class QueueOrderWarning(UserWarning):
    """The configured step order violates a known dependency."""


class CubicFallbackWarning(UserWarning):
    """Cubic resampling fell back to linear for a degenerate stroke."""


# ---------------------------------------------------------------------------
# point filters


def remove_duplicate_time(rec: Recording) -> Recording:
    """Keep only the first point per timestamp within each stroke.

    A one-point stroke is never touched, so strokes cannot vanish.
    """
    strokes = []
    for stroke in rec.strokes:
        keep = np.ones(len(stroke), dtype=bool)
        seen = set()
        for i, ti in enumerate(stroke.times):
            if ti in seen:
                keep[i] = False
            else:
                seen.add(ti)
        if keep.all():
            strokes.append(stroke)
        else:
            strokes.append(Stroke(stroke.points[keep]))
    return rec.replace(strokes)


def remove_dots(rec: Recording) -> Recording:
    """Drop single-point strokes, unless the recording is dots only."""
    survivors = [s for s in rec.strokes if len(s) > 1]
    if not survivors:
        return rec
    if len(survivors) == len(rec.strokes):
        return rec
    return rec.replace(survivors)


def dot_reduction(rec: Recording, threshold: float) -> Recording:
    """Collapse strokes whose points all lie within ``threshold`` pixels.

    A stroke whose maximum pairwise point distance is below the
    threshold is replaced by one point at the coordinate-wise mean;
    the merged timestamp is the floored mean time.
    """
    if threshold < 0:
        raise ParameterError("dot reduction threshold must be >= 0")
    strokes = []
    for stroke in rec.strokes:
        xy = stroke.xy
        diff = xy[:, None, :] - xy[None, :, :]
        max_distance = math.sqrt(float(np.max(np.sum(diff * diff, axis=-1))))
        if max_distance < threshold:
            mean = stroke.points.mean(axis=0)
            strokes.append(Stroke([[mean[0], mean[1], math.floor(mean[2])]]))
        else:
            strokes.append(stroke)
    return rec.replace(strokes)


def wild_point_filter(rec: Recording, threshold: float) -> Recording:
    """Remove points reached at implausible speed (pixels per ms).

    The speed of a point is the euclidean distance to its surviving
    predecessor divided by the elapsed time; a point is removed when
    that speed exceeds the threshold.  Recomputing against the
    surviving predecessor keeps one wild point from shadowing the
    next.  The first point of a stroke is never removed.  Timestamps
    should be strictly increasing (run remove_duplicate_time first).
    """
    if threshold <= 0:
        raise ParameterError("wild point speed threshold must be > 0")
    strokes = []
    for stroke in rec.strokes:
        pts = stroke.points
        keep = [0]
        for i in range(1, len(pts)):
            px, py, pt = pts[keep[-1]]
            x, y, t = pts[i]
            dt = t - pt
            dist = math.hypot(x - px, y - py)
            if dt <= 0:
                speed = math.inf if dist > 0 else 0.0
            else:
                speed = dist / dt
            if speed <= threshold:
                keep.append(i)
        strokes.append(Stroke(pts[keep]))
    return rec.replace(strokes)


def stroke_connect(rec: Recording, minimum_distance: float) -> Recording:
    """Merge consecutive strokes that were probably split by accident.

    When the gap from the end of one stroke to the start of the next is
    below ``minimum_distance`` pixels the strokes are concatenated.
    Applied left to right, cascading: a merged stroke may merge with
    its successor.  The total point count never changes.
    """
    if minimum_distance < 0:
        raise ParameterError("stroke connect distance must be >= 0")
    merged: list[np.ndarray] = [rec.strokes[0].points]
    for stroke in rec.strokes[1:]:
        last = merged[-1][-1]
        first = stroke.points[0]
        if math.hypot(first[0] - last[0], first[1] - last[1]) < minimum_distance:
            merged[-1] = np.concatenate([merged[-1], stroke.points], axis=0)
        else:
            merged.append(stroke.points)
    if len(merged) == len(rec.strokes):
        return rec
    return rec.replace([Stroke(p) for p in merged])


def weighted_average_smoothing(rec: Recording, theta: Sequence[float]) -> Recording:
    """Smooth interior points with a normalized 3-tap weighted average.

    The weights apply to the previous, current and next point and act
    on x, y and t alike.  Neighbours are read from the original stroke
    (no in-place cascade); first and last point stay fixed, strokes of
    length <= 2 are unchanged.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (3,) or np.any(theta < 0):
        raise ParameterError("smoothing weights must be three values >= 0")
    total = theta.sum()
    if total <= 0:
        raise ParameterError("smoothing weights must not all be zero")
    theta = theta / total
    strokes = []
    for stroke in rec.strokes:
        if len(stroke) <= 2:
            strokes.append(stroke)
            continue
        pts = stroke.points
        out = pts.copy()
        out[1:-1] = theta[0] * pts[:-2] + theta[1] * pts[1:-1] + theta[2] * pts[2:]
        strokes.append(Stroke(out))
    return rec.replace(strokes)


# ---------------------------------------------------------------------------
# dehooking

# The turning angle is measured at the second-to-last point, between
# the last two segments of the stroke.  This definition is a module
# constant so experiments can swap it for another angle measure.
def _turning_angle_degrees(p0, p1, p2) -> float:
    v1x, v1y = p1[0] - p0[0], p1[1] - p0[1]
    v2x, v2y = p2[0] - p1[0], p2[1] - p1[1]
    if (v1x == 0 and v1y == 0) or (v2x == 0 and v2y == 0):
        return 0.0
    cross = v1x * v2y - v1y * v2x
    dot = v1x * v2x + v1y * v2y
    return abs(math.degrees(math.atan2(cross, dot)))


CALCULATE_ANGLE: Callable = _turning_angle_degrees


def _dehook_tail(pts: np.ndarray, angle_threshold: float) -> np.ndarray:
    while pts.shape[0] >= 3:
        angle = CALCULATE_ANGLE(pts[-3], pts[-2], pts[-1])
        if angle < angle_threshold:
            break
        pts = pts[:-1]
    return pts


def dehook(rec: Recording, angle_threshold: float) -> Recording:
    """Strip unintended sharp hooks from both ends of every stroke.

    A trailing point is removed (recursively) while the turning angle
    over the last three points reaches the threshold; the stroke is
    then reversed and treated the same way.  Strokes with fewer than 3
    points are unchanged.  The threshold is in degrees, (0, 360].
    """
    if not 0 < angle_threshold <= 360:
        raise ParameterError("dehook angle threshold must be in (0, 360]")
    strokes = []
    for stroke in rec.strokes:
        if len(stroke) < 3:
            strokes.append(stroke)
            continue
        pts = _dehook_tail(stroke.points, angle_threshold)
        pts = _dehook_tail(pts[::-1], angle_threshold)[::-1]
        strokes.append(Stroke(pts))
    return rec.replace(strokes)


# ---------------------------------------------------------------------------
# Douglas-Peucker simplification


def _point_line_distance(point, start, end) -> float:
    dx = end[0] - start[0]
    dy = end[1] - start[1]
    norm = math.hypot(dx, dy)
    if norm == 0.0:
        # degenerate line: fall back to point-to-point distance
        return math.hypot(point[0] - start[0], point[1] - start[1])
    return abs(dy * point[0] - dx * point[1] + end[0] * start[1] - end[1] * start[0]) / norm


def _dp_collect(pts: np.ndarray, lo: int, hi: int, epsilon: float, keep: set) -> None:
    if hi - lo < 2:
        return
    d_max = -1.0
    i_max = lo
    for i in range(lo + 1, hi):
        d = _point_line_distance(pts[i], pts[lo], pts[hi])
        if d > d_max:
            d_max = d
            i_max = i
    if d_max > epsilon:
        keep.add(i_max)
        _dp_collect(pts, lo, i_max, epsilon, keep)
        _dp_collect(pts, i_max, hi, epsilon, keep)


def douglas_peucker(rec: Recording, epsilon: float) -> Recording:
    """Simplify each stroke to the classic recursive point subset.

    Endpoints are always retained; every removed point lies within
    ``epsilon`` of the line through its bracketing retained points.
    The output is a subsequence of the input stroke.
    """
    if epsilon < 0:
        raise ParameterError("epsilon must be >= 0")
    strokes = []
    for stroke in rec.strokes:
        if len(stroke) <= 2:
            strokes.append(stroke)
            continue
        keep = {0, len(stroke) - 1}
        _dp_collect(stroke.points, 0, len(stroke) - 1, epsilon, keep)
        strokes.append(Stroke(stroke.points[sorted(keep)]))
    return rec.replace(strokes)


# ---------------------------------------------------------------------------
# size normalization


def scale_and_shift(
    rec: Recording,
    variant: str = "i1",
    max_width: float = 1.0,
    max_height: float = 1.0,
) -> Recording:
    """Scale to a unit box preserving aspect ratio, then shift.

    The bounding box is scaled by a single factor so that its larger
    dimension spans ``max_width`` (or ``max_height``); timestamps are
    relativized so the earliest becomes 0.  Variants differ only in the
    shift:

    * ``i1`` - the dimension that fills its target span stays at
      ``[0, span]``, the other is centered around 0.
    * ``i2`` - no centering, result aligned to ``(0, 0)``.
    * ``i3`` - both dimensions centered around ``(0, 0)``.

    A zero-width or zero-height box uses the factor of the other
    dimension; a single point maps to the variant's shift target with
    factor 1.
    """
    variant = variant.lower()
    if variant not in ("i1", "i2", "i3"):
        raise ParameterError(f"unknown scale variant {variant!r}")
    if max_width <= 0 or max_height <= 0:
        raise ParameterError("max_width and max_height must be > 0")
    pts = rec.point_array()
    x_min, y_min = pts[:, 0].min(), pts[:, 1].min()
    width = float(pts[:, 0].max() - x_min)
    height = float(pts[:, 1].max() - y_min)
    t_min = float(pts[:, 2].min())

    factor_x = max_width / width if width > 0 else None
    factor_y = max_height / height if height > 0 else None
    if factor_x is None and factor_y is None:
        factor = 1.0
        x_binding = True
    elif factor_x is None:
        factor = factor_y
        x_binding = False
    elif factor_y is None:
        factor = factor_x
        x_binding = True
    else:
        factor = min(factor_x, factor_y)
        x_binding = factor == factor_x

    span_x = width * factor
    span_y = height * factor
    if variant == "i2":
        shift_x = shift_y = 0.0
    elif variant == "i1":
        shift_x = 0.0 if x_binding else span_x / 2.0
        shift_y = span_y / 2.0 if x_binding else 0.0
    else:  # i3
        shift_x = span_x / 2.0
        shift_y = span_y / 2.0

    strokes = []
    for stroke in rec.strokes:
        out = stroke.points.copy()
        out[:, 0] = (out[:, 0] - x_min) * factor - shift_x
        out[:, 1] = (out[:, 1] - y_min) * factor - shift_y
        out[:, 2] = out[:, 2] - t_min
        strokes.append(Stroke(out, pen_down=stroke.pen_down))
    return rec.replace(strokes)


# ---------------------------------------------------------------------------
# resampling


def space_evenly(rec: Recording, number: int) -> Recording:
    """Resample the whole recording to points equidistant in time.

    Strokes are connected into one polyline over the global time span;
    the output is a single stroke of exactly ``number`` points whose
    pen_down flag is True on original stroke spans and False on the
    interpolated gaps between strokes.  Timestamps must be
    non-decreasing (run remove_duplicate_time first).
    """
    if number < 2:
        raise ParameterError("number must be >= 2")
    pts = rec.point_array()
    t_min = float(pts[:, 2].min())
    t_max = float(pts[:, 2].max())
    if t_max == t_min:
        first = rec.strokes[0].points[0]
        out = np.tile(first, (number, 1))
        return rec.replace([Stroke(out, pen_down=np.ones(number, dtype=bool))])
    times = np.linspace(t_min, t_max, number)
    xs = np.interp(times, pts[:, 2], pts[:, 0])
    ys = np.interp(times, pts[:, 2], pts[:, 1])
    pen = np.zeros(number, dtype=bool)
    for stroke in rec.strokes:
        t = stroke.times
        pen |= (times >= t.min()) & (times <= t.max())
    out = np.column_stack([xs, ys, times])
    return rec.replace([Stroke(out, pen_down=pen)])


def space_evenly_per_stroke(
    rec: Recording, number: int, kind: str = "linear"
) -> Recording:
    """Resample every stroke separately to ``number`` points.

    Output timestamps are spread equidistant from the stroke's first to
    last time; x and y are interpolated independently as functions of
    t.  Strokes with fewer than 4 points pass through unchanged.  With
    ``kind="cubic"`` a stroke whose timestamps are not strictly
    increasing falls back to linear interpolation and a
    :class:`CubicFallbackWarning` is emitted.
    """
    if number < 2:
        raise ParameterError("number must be >= 2")
    kind = kind.lower()
    if kind not in ("linear", "cubic"):
        raise ParameterError(f"unknown interpolation kind {kind!r}")
    strokes = []
    for index, stroke in enumerate(rec.strokes):
        if len(stroke) < 4:
            strokes.append(stroke)
            continue
        t = stroke.times
        if t[-1] == t[0]:
            out = np.tile(stroke.points[0], (number, 1))
            strokes.append(Stroke(out))
            continue
        times = np.linspace(t[0], t[-1], number)
        stroke_kind = kind
        if kind == "cubic" and not np.all(np.diff(t) > 0):
            warnings.warn(
                f"stroke {index}: cubic resampling needs strictly increasing "
                "timestamps, falling back to linear",
                CubicFallbackWarning,
                stacklevel=2,
            )
            stroke_kind = "linear"
        if stroke_kind == "cubic":
            from scipy.interpolate import interp1d

            fx = interp1d(t, stroke.points[:, 0], kind="cubic")
            fy = interp1d(t, stroke.points[:, 1], kind="cubic")
            xs = fx(times)
            ys = fy(times)
        else:
            xs = np.interp(times, t, stroke.points[:, 0])
            ys = np.interp(times, t, stroke.points[:, 1])
        strokes.append(Stroke(np.column_stack([xs, ys, times])))
    return rec.replace(strokes)


# ---------------------------------------------------------------------------
# queue handling

def _check_range(name: str, value, lo, hi, lo_open=False, hi_open=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"parameter {name!r} must be numeric, got {value!r}")
    if value < lo or (lo_open and value == lo):
        raise ConfigError(f"parameter {name!r} out of range: {value!r}")
    if value > hi or (hi_open and value == hi):
        raise ConfigError(f"parameter {name!r} out of range: {value!r}")


def _validate_scale_and_shift(params: dict) -> dict:
    variant = params.get("variant")
    center = bool(params.get("center", False))
    center_other = bool(params.get("center_other", False))
    if variant is None:
        variant = "i3" if (center and center_other) else "i1" if center else "i2"
    variant = str(variant).lower()
    if variant not in ("i1", "i2", "i3"):
        raise ConfigError(f"unknown ScaleAndShift variant {variant!r}")
    max_width = params.get("max_width", 1.0)
    max_height = params.get("max_height", 1.0)
    _check_range("max_width", max_width, 0, math.inf, lo_open=True)
    _check_range("max_height", max_height, 0, math.inf, lo_open=True)
    return {
        "variant": variant,
        "max_width": float(max_width),
        "max_height": float(max_height),
    }


def _validate_smoothing(params: dict) -> dict:
    theta = params.get("theta", [1 / 6, 4 / 6, 1 / 6])
    theta = list(theta)
    if len(theta) != 3:
        raise ConfigError("theta must have exactly three weights")
    for i, w in enumerate(theta):
        _check_range(f"theta[{i}]", w, 0, 1)
    if sum(theta) <= 0:
        raise ConfigError("theta weights must not all be zero")
    return {"theta": [float(w) for w in theta]}


def _validate_resample(params: dict) -> dict:
    number = params.get("number", 20)
    if isinstance(number, bool) or not isinstance(number, int) or number < 2:
        raise ConfigError(f"number must be an integer >= 2, got {number!r}")
    kind = str(params.get("kind", "linear")).lower()
    if kind not in ("linear", "cubic"):
        raise ConfigError(f"unknown interpolation kind {kind!r}")
    return {"number": number, "kind": kind}


def _validate_space_evenly(params: dict) -> dict:
    number = params.get("number", 100)
    if isinstance(number, bool) or not isinstance(number, int) or number < 2:
        raise ConfigError(f"number must be an integer >= 2, got {number!r}")
    return {"number": number}


def _no_params(params: dict) -> dict:
    if params:
        raise ConfigError(f"step takes no parameters, got {sorted(params)}")
    return {}


def _validate_threshold(key: str, lo_open: bool = False):
    def validate(params: dict) -> dict:
        value = params.get(key)
        if value is None:
            raise ConfigError(f"missing required parameter {key!r}")
        _check_range(key, value, 0, math.inf, lo_open=lo_open)
        return {key: float(value)}

    return validate


def _validate_dehook(params: dict) -> dict:
    value = params.get("angle_threshold")
    if value is None:
        raise ConfigError("missing required parameter 'angle_threshold'")
    _check_range("angle_threshold", value, 0, 360, lo_open=True)
    return {"angle_threshold": float(value)}


_STEPS: dict[str, tuple[Callable, Callable[[dict], dict]]] = {
    "RemoveDuplicateTime": (remove_duplicate_time, _no_params),
    "RemoveDots": (remove_dots, _no_params),
    "DotReduction": (dot_reduction, _validate_threshold("threshold")),
    "WildPointFilter": (wild_point_filter, _validate_threshold("threshold", lo_open=True)),
    "StrokeConnect": (stroke_connect, _validate_threshold("minimum_distance")),
    "WeightedAverageSmoothing": (weighted_average_smoothing, _validate_smoothing),
    "Dehook": (dehook, _validate_dehook),
    "DouglasPeucker": (douglas_peucker, _validate_threshold("epsilon")),
    "ScaleAndShift": (scale_and_shift, _validate_scale_and_shift),
    "SpaceEvenly": (space_evenly, _validate_space_evenly),
    "SpaceEvenlyPerStroke": (space_evenly_per_stroke, _validate_resample),
}

STEP_NAMES = tuple(_STEPS)


@dataclass(frozen=True)
class PreprocessingStep:
    """One named, parameterized step of the preprocessing queue."""

    kind: str
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _STEPS:
            raise ConfigError(f"unknown preprocessing step {self.kind!r}")
        _, validate = _STEPS[self.kind]
        object.__setattr__(self, "params", validate(dict(self.params)))

    def apply(self, rec: Recording) -> Recording:
        func, _ = _STEPS[self.kind]
        return func(rec, **self.params)

    def to_config(self):
        if not self.params:
            return {self.kind: None}
        return {self.kind: [{k: v} for k, v in self.params.items()]}


class PreprocessingQueue:
    """Ordered list of steps, applied left to right; duplicates allowed."""

    def __init__(self, steps: Sequence[PreprocessingStep]):
        self.steps = tuple(steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __eq__(self, other):
        if not isinstance(other, PreprocessingQueue):
            return NotImplemented
        return self.steps == other.steps

    def apply(self, rec: Recording, warn_order: bool = True) -> Recording:
        return apply_queue(rec, self, warn_order=warn_order)

    def to_config(self) -> list:
        return [s.to_config() for s in self.steps]


# Steps that may change the bounding box through noise removal: they
# belong before any ScaleAndShift.
_NOISE_STEPS = frozenset(
    ["WildPointFilter", "WeightedAverageSmoothing", "Dehook", "DotReduction", "RemoveDots"]
)
# Steps that change the number of points: they belong before resampling.
_COUNT_CHANGING_STEPS = frozenset(
    [
        "RemoveDuplicateTime",
        "RemoveDots",
        "DotReduction",
        "WildPointFilter",
        "Dehook",
        "DouglasPeucker",
        "StrokeConnect",
    ]
)


def check_queue_order(queue: PreprocessingQueue) -> list[str]:
    """Return order-dependency violations for a queue (empty if fine).

    Checked dependencies: dot reduction before wild point filtering,
    noise reduction before scaling, and point-count-changing steps
    before resampling.
    """
    problems = []
    kinds = [s.kind for s in queue.steps]
    seen_wild = seen_scale = seen_resample = False
    for kind in kinds:
        if kind == "DotReduction" and seen_wild:
            problems.append(
                "DotReduction after WildPointFilter: dot reduction should run "
                "before wild point filtering"
            )
        if kind in _NOISE_STEPS and seen_scale:
            problems.append(
                f"{kind} after ScaleAndShift: noise reduction can change the "
                "bounding box and should run before scaling"
            )
        if kind in _COUNT_CHANGING_STEPS and seen_resample:
            problems.append(
                f"{kind} after resampling: point-count-changing steps should "
                "run before resampling"
            )
        seen_wild = seen_wild or kind == "WildPointFilter"
        seen_scale = seen_scale or kind == "ScaleAndShift"
        seen_resample = seen_resample or kind in ("SpaceEvenly", "SpaceEvenlyPerStroke")
    return problems


def apply_queue(
    rec: Recording, queue: PreprocessingQueue, warn_order: bool = True
) -> Recording:
    """Apply the queue's steps strictly in configured order.

    Order-dependency violations produce a :class:`QueueOrderWarning`
    per problem (non-fatal).  Step parameters were already validated at
    construction, so nothing runs against a malformed queue.
    """
    if warn_order:
        for problem in check_queue_order(queue):
            warnings.warn(problem, QueueOrderWarning, stacklevel=2)
    out = rec
    for step in queue.steps:
        out = step.apply(out)
    return out
