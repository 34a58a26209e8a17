"""Synthetic stroke data for tests, demos and pipeline smoke runs.

Five geometrically distinct symbol classes are drawn from noisy
templates in canvas coordinates: a horizontal bar, a vertical bar, a
two-stroke cross, a circle and a rising diagonal.  Each sample gets a
random placement, scale and gaussian point jitter plus plausible
millisecond timestamps, so the full pipeline (preprocessing, features,
training) exercises realistic value ranges without a corpus.
"""

from __future__ import annotations

import numpy as np

from .recording import Recording, Stroke

__all__ = ["SYMBOL_COMMANDS", "make_recording", "make_dataset"]

SYMBOL_COMMANDS = ("-", "|", "+", "\\circ", "/")

_POINTS_PER_STROKE = 12
_BASE_SIZE = 100.0


def _template(command: str) -> list[np.ndarray]:
    """Unit-box polylines (one array per stroke) for a symbol class."""
    t = np.linspace(0.0, 1.0, _POINTS_PER_STROKE)
    if command == "-":
        return [np.column_stack([t, np.full_like(t, 0.5)])]
    if command == "|":
        return [np.column_stack([np.full_like(t, 0.5), t])]
    if command == "+":
        return [
            np.column_stack([t, np.full_like(t, 0.5)]),
            np.column_stack([np.full_like(t, 0.5), t]),
        ]
    if command == "\\circ":
        angle = np.linspace(0.0, 2.0 * np.pi, 16)
        return [np.column_stack([0.5 + 0.5 * np.cos(angle), 0.5 + 0.5 * np.sin(angle)])]
    if command == "/":
        return [np.column_stack([t, 1.0 - t])]
    raise ValueError(f"unknown synthetic symbol {command!r}")


def make_recording(command: str, rng: np.random.Generator, noise: float = 2.5) -> Recording:
    """One noisy sample of a symbol class."""
    scale = _BASE_SIZE * rng.uniform(0.7, 1.3)
    offset = rng.uniform(0.0, 150.0, size=2)
    start_time = float(rng.integers(10**6, 10**9))
    strokes = []
    time = start_time
    for xy in _template(command):
        pts = xy * scale + offset
        pts = pts + rng.normal(0.0, noise, size=pts.shape)
        times = time + np.arange(pts.shape[0]) * 20.0
        time = float(times[-1]) + 150.0  # pen-up gap before the next stroke
        strokes.append(Stroke(np.column_stack([pts, times])))
    return Recording(strokes, label=command)


def make_dataset(
    per_class: int, seed: int = 0, noise: float = 2.5
) -> tuple[list[Recording], list[str]]:
    """``per_class`` samples of every symbol class, with command labels."""
    rng = np.random.default_rng(seed)
    recordings = []
    labels = []
    for command in SYMBOL_COMMANDS:
        for _ in range(per_class):
            recordings.append(make_recording(command, rng, noise=noise))
            labels.append(command)
    return recordings, labels
