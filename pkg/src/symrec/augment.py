"""Training-set expansion through label-preserving transformations.

Only transformations that are safe for this symbol domain are offered:
plain copying and small rotations around the center of mass.  Per-point
jitter and anisotropic re-scaling are deliberately not implemented;
they can collapse symbol pairs that differ only in slant or stretch
(a plain arrow versus its diagonal variant, for example).
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import ParameterError
from .recording import Recording, Stroke

__all__ = ["multiply", "rotate", "rotate_recording"]

# symbols that differ only by slant sit ~45 degrees apart; warn well below that
_SAFE_ROTATION_DEGREES = 22.5


def multiply(recs: list[Recording], nr: int) -> list[Recording]:
    """Copy the data ``nr`` times (deep, label-preserving)."""
    if nr < 1:
        raise ParameterError("nr must be >= 1")
    out = []
    for _ in range(nr):
        for rec in recs:
            out.append(Recording([Stroke(s.points, s.pen_down) for s in rec.strokes],
                                 id=rec.id, label=rec.label))
    return out


def rotate_recording(rec: Recording, degrees: float) -> Recording:
    """Rotate all points by ``degrees`` around the center of mass.

    The center of mass is the arithmetic mean of all point coordinates.
    Timestamps are unchanged; pairwise distances are preserved.
    """
    pts = rec.point_array()
    cx = float(pts[:, 0].mean())
    cy = float(pts[:, 1].mean())
    rad = math.radians(degrees)
    cos_a, sin_a = math.cos(rad), math.sin(rad)
    strokes = []
    for stroke in rec.strokes:
        out = stroke.points.copy()
        dx = out[:, 0] - cx
        dy = out[:, 1] - cy
        out[:, 0] = cx + cos_a * dx - sin_a * dy
        out[:, 1] = cy + sin_a * dx + cos_a * dy
        strokes.append(Stroke(out, pen_down=stroke.pen_down))
    return Recording(strokes, id=None, label=rec.label)


def rotation_angles(min_degrees: float, max_degrees: float, num: int) -> list[float]:
    """Angles for the rotated variants: equally spaced over the range,
    endpoints included; a single variant uses the midpoint."""
    if num == 1:
        return [(min_degrees + max_degrees) / 2.0]
    return list(np.linspace(min_degrees, max_degrees, num))


def rotate(
    recs: list[Recording], min: float, max: float, num: int
) -> list[Recording]:
    """Add ``num`` rotated variants of every recording to the data.

    The originals are kept, so the output has ``(num + 1) * len(recs)``
    recordings.  Angles are in degrees; magnitudes at or beyond 22.5
    trigger a warning because symbols that differ only by slant start
    to collide.
    """
    if min > max:
        raise ParameterError("min must be <= max")
    if num < 1:
        raise ParameterError("num must be >= 1")
    if abs(min) >= _SAFE_ROTATION_DEGREES or abs(max) >= _SAFE_ROTATION_DEGREES:
        warnings.warn(
            f"rotation range [{min}, {max}] reaches {_SAFE_ROTATION_DEGREES} "
            "degrees; slant-distinguished symbols may become ambiguous",
            stacklevel=2,
        )
    angles = rotation_angles(min, max, num)
    out = []
    for rec in recs:
        out.append(rec)
        for angle in angles:
            out.append(rotate_recording(rec, angle))
    return out
