"""Feature catalog, ordered-list composition and standardization.

Each feature declares its output dimension as a pure function of its
parameters, computable without data, so a configured feature list has a
fixed total dimension before any recording is seen.  ``compose``
concatenates the per-feature vectors in configured order and asserts
the declared dimensions.

Strokes are consumed in drawing order and points in temporal order;
features with a ``strokes`` parameter silently ignore strokes beyond
that count and zero-fill missing ones.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np

from ._kernels import count_crossings_kernel, rasterize_polyline_kernel
from .errors import ConfigError, ParameterError
from .recording import Recording, bounding_box

__all__ = [
    "ConstantPointCoordinates",
    "FirstNPoints",
    "StrokeCount",
    "Bitmap",
    "Ink",
    "AspectRatio",
    "Width",
    "Height",
    "Time",
    "CenterOfMass",
    "StrokeCenter",
    "StrokeIntersections",
    "ReCurvature",
    "Direction",
    "Curvature",
    "FEATURE_NAMES",
    "feature_from_config",
    "specs_from_config",
    "specs_to_config",
    "spec_list_hash",
    "total_dimension",
    "compose",
    "point_directions",
    "point_curvatures",
    "Standardization",
    "fit_standardization",
    "apply_standardization",
]


def _stroke_path_length(xy: np.ndarray, pen_down) -> float:
    """Summed segment length; segments with a pen-up endpoint carry no ink."""
    if xy.shape[0] < 2:
        return 0.0
    seg = np.hypot(*np.diff(xy, axis=0).T)
    if pen_down is not None:
        seg = seg[pen_down[:-1] & pen_down[1:]]
    return float(seg.sum())


@dataclass(frozen=True)
class ConstantPointCoordinates:
    """x/y of the first points of the first strokes, zero-filled.

    With ``strokes > 0`` the layout is stroke-major, two values per
    point.  With ``strokes == 0`` the recording is flattened into one
    point sequence and each point contributes x, y and (when
    ``pen_down`` is set) a 0/1 pen flag.
    """

    strokes: int = 4
    points_per_stroke: int = 20
    fill_empty_with: float = 0.0
    pen_down: bool = False

    @property
    def dimension(self) -> int:
        if self.strokes == 0:
            per_point = 3 if self.pen_down else 2
            return per_point * self.points_per_stroke
        return 2 * self.points_per_stroke * self.strokes

    def compute(self, rec: Recording) -> np.ndarray:
        out = np.full(self.dimension, float(self.fill_empty_with))
        if self.strokes == 0:
            pts = rec.point_array()
            flags = np.concatenate(
                [
                    s.pen_down if s.pen_down is not None else np.ones(len(s), bool)
                    for s in rec.strokes
                ]
            )
            per_point = 3 if self.pen_down else 2
            n = min(self.points_per_stroke, pts.shape[0])
            for i in range(n):
                out[per_point * i] = pts[i, 0]
                out[per_point * i + 1] = pts[i, 1]
                if self.pen_down:
                    out[per_point * i + 2] = float(flags[i])
            return out
        per_stroke = 2 * self.points_per_stroke
        for si, stroke in enumerate(rec.strokes[: self.strokes]):
            n = min(self.points_per_stroke, len(stroke))
            block = stroke.xy[:n].ravel()
            out[si * per_stroke : si * per_stroke + 2 * n] = block
        return out


@dataclass(frozen=True)
class FirstNPoints:
    """x/y of the first n points of the flattened recording, zero-filled."""

    n: int = 81
    fill_empty_with: float = 0.0

    @property
    def dimension(self) -> int:
        return 2 * self.n

    def compute(self, rec: Recording) -> np.ndarray:
        out = np.full(self.dimension, float(self.fill_empty_with))
        pts = rec.point_array()
        k = min(self.n, pts.shape[0])
        out[: 2 * k] = pts[:k, :2].ravel()
        return out


@dataclass(frozen=True)
class StrokeCount:
    """Number of strokes."""

    dimension = 1

    def compute(self, rec: Recording) -> np.ndarray:
        return np.array([float(len(rec.strokes))])


@dataclass(frozen=True)
class Ink:
    """Total path length over all strokes (pen-up spans excluded)."""

    dimension = 1

    def compute(self, rec: Recording) -> np.ndarray:
        total = sum(_stroke_path_length(s.xy, s.pen_down) for s in rec.strokes)
        return np.array([total])


@dataclass(frozen=True)
class AspectRatio:
    """(width + 0.01) / (height + 0.01) of the current bounding box.

    The additive constant avoids division by zero for dots and straight
    lines and can be read as a stroke thickness.
    """

    dimension = 1

    def compute(self, rec: Recording) -> np.ndarray:
        x_min, y_min, x_max, y_max = bounding_box(rec)
        return np.array([(x_max - x_min + 0.01) / (y_max - y_min + 0.01)])


@dataclass(frozen=True)
class Width:
    """Current bounding-box width (post-preprocessing, not the raw width)."""

    dimension = 1

    def compute(self, rec: Recording) -> np.ndarray:
        x_min, _, x_max, _ = bounding_box(rec)
        return np.array([x_max - x_min])


@dataclass(frozen=True)
class Height:
    """Current bounding-box height."""

    dimension = 1

    def compute(self, rec: Recording) -> np.ndarray:
        _, y_min, _, y_max = bounding_box(rec)
        return np.array([y_max - y_min])


@dataclass(frozen=True)
class Time:
    """Milliseconds from first to last captured point."""

    dimension = 1

    def compute(self, rec: Recording) -> np.ndarray:
        t = rec.point_array()[:, 2]
        return np.array([float(t.max() - t.min())])


@dataclass(frozen=True)
class CenterOfMass:
    """Arithmetic mean of all point coordinates, (x, y)."""

    dimension = 2

    def compute(self, rec: Recording) -> np.ndarray:
        pts = rec.point_array()
        return np.array([pts[:, 0].mean(), pts[:, 1].mean()])


@dataclass(frozen=True)
class StrokeCenter:
    """Per-stroke coordinate means for the first strokes, zero-filled."""

    strokes: int = 4

    @property
    def dimension(self) -> int:
        return 2 * self.strokes

    def compute(self, rec: Recording) -> np.ndarray:
        out = np.zeros(self.dimension)
        for si, stroke in enumerate(rec.strokes[: self.strokes]):
            out[2 * si] = stroke.xy[:, 0].mean()
            out[2 * si + 1] = stroke.xy[:, 1].mean()
        return out


@dataclass(frozen=True)
class ReCurvature:
    """Per-stroke ratio of bounding height to path length, zero-filled.

    Strokes with zero path length (single points, coincident points)
    and missing strokes contribute 0.
    """

    strokes: int = 4

    @property
    def dimension(self) -> int:
        return self.strokes

    def compute(self, rec: Recording) -> np.ndarray:
        out = np.zeros(self.dimension)
        for si, stroke in enumerate(rec.strokes[: self.strokes]):
            length = _stroke_path_length(stroke.xy, stroke.pen_down)
            if length > 0:
                height = float(stroke.xy[:, 1].max() - stroke.xy[:, 1].min())
                out[si] = height / length
        return out


@dataclass(frozen=True)
class Bitmap:
    """n x n grayscale raster of the strokes over the bounding box.

    Strokes are drawn as polylines with an integer grid-cell traversal;
    a cell is 1.0 when any segment passes through it, 0.0 otherwise (no
    anti-aliasing, deterministic).  Degenerate box dimensions map to
    the grid center.  Row-major output.
    """

    n: int = 16

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("bitmap size must be >= 1")

    @property
    def dimension(self) -> int:
        return self.n * self.n

    def compute(self, rec: Recording) -> np.ndarray:
        x_min, y_min, x_max, y_max = bounding_box(rec)
        width = x_max - x_min
        height = y_max - y_min
        image = np.zeros((self.n, self.n))
        for stroke in rec.strokes:
            xy = stroke.xy
            if width > 0:
                gx = (xy[:, 0] - x_min) / width * self.n
            else:
                gx = np.full(len(stroke), self.n / 2.0)
            if height > 0:
                gy = (xy[:, 1] - y_min) / height * self.n
            else:
                gy = np.full(len(stroke), self.n / 2.0)
            if len(stroke) == 1:
                col = min(int(gx[0]), self.n - 1)
                row = min(int(gy[0]), self.n - 1)
                image[row, col] = 1.0
            else:
                rasterize_polyline_kernel(
                    image, np.ascontiguousarray(gx), np.ascontiguousarray(gy)
                )
        return image.ravel()


@dataclass(frozen=True)
class StrokeIntersections:
    """Segment-crossing counts between the first strokes.

    One entry per unordered stroke pair including the diagonal, row by
    row: (0,0), (0,1), ..., (0,s-1), (1,1), ...  Diagonal entries count
    self-intersections (non-neighbouring segments of the same stroke
    that properly cross); shared endpoints of consecutive segments do
    not count.  Missing strokes contribute 0.
    """

    strokes: int = 4

    @property
    def dimension(self) -> int:
        return self.strokes * (self.strokes + 1) // 2

    def compute(self, rec: Recording) -> np.ndarray:
        out = np.zeros(self.dimension)
        present = [np.ascontiguousarray(s.xy) for s in rec.strokes[: self.strokes]]
        idx = 0
        for i in range(self.strokes):
            for j in range(i, self.strokes):
                if i < len(present) and j < len(present):
                    if i == j:
                        out[idx] = count_crossings_kernel(
                            present[i], present[i], True
                        )
                    else:
                        out[idx] = count_crossings_kernel(
                            present[i], present[j], False
                        )
                idx += 1
        return out


def point_directions(xy: np.ndarray) -> np.ndarray:
    """Writing direction (cos, sin) per point of one stroke.

    The direction at an interior point spans its two neighbours:
    dx = x[i+1] - x[i-1], dy likewise, normalized by the chord length.
    Endpoints and points with coincident neighbours get (0, 0).
    """
    n = xy.shape[0]
    out = np.zeros((n, 2))
    if n < 3:
        return out
    dx = xy[2:, 0] - xy[:-2, 0]
    dy = xy[2:, 1] - xy[:-2, 1]
    ds = np.hypot(dx, dy)
    ok = ds > 0
    out[1:-1, 0] = np.where(ok, dx / np.where(ok, ds, 1.0), 0.0)
    out[1:-1, 1] = np.where(ok, dy / np.where(ok, ds, 1.0), 0.0)
    return out


def point_curvatures(xy: np.ndarray) -> np.ndarray:
    """Turning angle per point of one stroke, in radians.

    The curvature at point i is the direction-angle change between its
    neighbours, composed from the neighbour directions' cosines and
    sines and wrapped to (-pi, pi].  Points without two valid
    neighbouring directions get 0.
    """
    n = xy.shape[0]
    out = np.zeros(n)
    if n < 5:
        return out
    d = point_directions(xy)
    valid = (d[:, 0] != 0) | (d[:, 1] != 0)
    for i in range(2, n - 2):
        if not (valid[i - 1] and valid[i + 1]):
            continue
        cos_prev, sin_prev = d[i - 1]
        cos_next, sin_next = d[i + 1]
        cos_phi = cos_next * cos_prev + sin_next * sin_prev
        sin_phi = sin_next * cos_prev - cos_next * sin_prev
        out[i] = math.atan2(sin_phi, cos_phi)
    return out


@dataclass(frozen=True)
class Direction:
    """Per-point direction (cos, sin), stroke/point truncated like
    ConstantPointCoordinates."""

    strokes: int = 4
    points_per_stroke: int = 20

    @property
    def dimension(self) -> int:
        return 2 * self.points_per_stroke * self.strokes

    def compute(self, rec: Recording) -> np.ndarray:
        out = np.zeros(self.dimension)
        per_stroke = 2 * self.points_per_stroke
        for si, stroke in enumerate(rec.strokes[: self.strokes]):
            d = point_directions(stroke.xy)
            n = min(self.points_per_stroke, len(stroke))
            out[si * per_stroke : si * per_stroke + 2 * n] = d[:n].ravel()
        return out


@dataclass(frozen=True)
class Curvature:
    """Per-point turning angle (radians), stroke/point truncated like
    ConstantPointCoordinates."""

    strokes: int = 4
    points_per_stroke: int = 20

    @property
    def dimension(self) -> int:
        return self.points_per_stroke * self.strokes

    def compute(self, rec: Recording) -> np.ndarray:
        out = np.zeros(self.dimension)
        for si, stroke in enumerate(rec.strokes[: self.strokes]):
            phi = point_curvatures(stroke.xy)
            n = min(self.points_per_stroke, len(stroke))
            out[si * self.points_per_stroke : si * self.points_per_stroke + n] = phi[:n]
        return out


_FEATURES = {
    cls.__name__: cls
    for cls in (
        ConstantPointCoordinates,
        FirstNPoints,
        StrokeCount,
        Bitmap,
        Ink,
        AspectRatio,
        Width,
        Height,
        Time,
        CenterOfMass,
        StrokeCenter,
        StrokeIntersections,
        ReCurvature,
        Direction,
        Curvature,
    )
}

FEATURE_NAMES = tuple(sorted(_FEATURES))


def feature_from_config(name: str, params: dict):
    if name not in _FEATURES:
        raise ConfigError(f"unknown feature {name!r}")
    cls = _FEATURES[name]
    allowed = {f.name for f in fields(cls)}
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"feature {name}: unknown parameters {sorted(unknown)}")
    try:
        return cls(**params)
    except TypeError as exc:
        raise ConfigError(f"feature {name}: {exc}") from exc


def specs_from_config(items: Sequence) -> list:
    """Build a feature list from config entries (name or {name: params})."""
    from .pipeline import parse_step_entry  # shared config idiom

    specs = []
    for item in items:
        name, params = parse_step_entry(item)
        specs.append(feature_from_config(name, params))
    if not specs:
        raise ConfigError("feature list must not be empty")
    return specs


def specs_to_config(specs: Sequence) -> list:
    out = []
    for spec in specs:
        params = {f.name: getattr(spec, f.name) for f in fields(spec)}
        if params:
            out.append({type(spec).__name__: [{k: v} for k, v in params.items()]})
        else:
            out.append({type(spec).__name__: None})
    return out


def spec_list_hash(specs: Sequence) -> str:
    """Deterministic hash of an ordered feature list (cache identity)."""
    payload = json.dumps(specs_to_config(specs), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def total_dimension(specs: Sequence) -> int:
    return sum(spec.dimension for spec in specs)


def compose(rec: Recording, specs: Sequence) -> np.ndarray:
    """Concatenate feature vectors in configured order.

    Every feature's computed size must equal its declared dimension;
    a mismatch is an internal error, not a data error.
    """
    if not specs:
        raise ConfigError("feature list must not be empty")
    parts = []
    for spec in specs:
        vec = spec.compute(rec)
        assert vec.shape == (spec.dimension,), (
            f"{type(spec).__name__} declared {spec.dimension} dims, "
            f"computed {vec.shape}"
        )
        parts.append(vec)
    return np.concatenate(parts)


# ---------------------------------------------------------------------------
# standardization

_MODES = ("none", "mean_only", "standardize")


@dataclass(frozen=True)
class Standardization:
    """Per-dimension shift/scale fitted on the training split only."""

    mean: np.ndarray
    scale: np.ndarray
    mode: str = "standardize"

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Standardization":
        return cls(
            mean=np.asarray(data["mean"], dtype=np.float64),
            scale=np.asarray(data["scale"], dtype=np.float64),
            mode=data["mode"],
        )


def fit_standardization(train: np.ndarray, mode: str = "standardize") -> Standardization:
    """Fit mean and range (max - min) per dimension on training vectors.

    Zero ranges (constant dimensions) are replaced by 1 so application
    never divides by zero.
    """
    if mode not in _MODES:
        raise ParameterError(f"unknown standardization mode {mode!r}")
    train = np.asarray(train, dtype=np.float64)
    if train.ndim != 2 or train.shape[0] == 0:
        raise ParameterError("training matrix must be non-empty and 2-d")
    mean = train.mean(axis=0)
    scale = train.max(axis=0) - train.min(axis=0)
    scale = np.where(scale == 0, 1.0, scale)
    return Standardization(mean=mean, scale=scale, mode=mode)


def apply_standardization(std: Standardization, vectors: np.ndarray) -> np.ndarray:
    """Apply a fitted standardization to one vector or a matrix."""
    vectors = np.asarray(vectors, dtype=np.float64)
    if std.mode == "none":
        return vectors.copy()
    if std.mode == "mean_only":
        return vectors - std.mean
    return (vectors - std.mean) / std.scale
