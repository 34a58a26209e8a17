"""Greedy time warping distance and nearest-neighbour classification.

The distance greedily aligns two point sequences, always consuming the
cheapest of the three admissible advances, which makes it fast but
suboptimal: it is an upper bound on the dynamic-programming alignment
with the same step set.  Recordings are flattened into one point
sequence in stroke order before matching; only x and y enter the cost.

The template store keeps preprocessed recordings per symbol (capped,
default 50) and classifies a query by its minimal distance to any
template of each symbol.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from ._kernels import gtw_distance_kernel
from .errors import ParameterError, StateError
from .recording import Recording, parse_recording, serialize_recording

__all__ = [
    "flatten_xy",
    "gtw_distance",
    "recording_distance",
    "GtwTemplateStore",
    "rank_outliers",
]

DEFAULT_TEMPLATE_CAP = 50


def flatten_xy(rec: Recording) -> np.ndarray:
    """All points of a recording as one (n, 2) x/y sequence in stroke order."""
    return np.ascontiguousarray(rec.point_array()[:, :2])


def gtw_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Greedy alignment cost between two (n, 2) point sequences.

    Cost per consumed pair is squared euclidean distance.  Always >= 0,
    0 for identical sequences, and never below the optimal
    dynamic-programming alignment with the same steps.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != 2 or b.ndim != 2 or b.shape[1] != 2:
        raise ParameterError("point sequences must have shape (n, 2)")
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ParameterError("point sequences must be non-empty")
    return float(gtw_distance_kernel(a, b))


def recording_distance(a: Recording, b: Recording) -> float:
    return gtw_distance(flatten_xy(a), flatten_xy(b))


class GtwTemplateStore:
    """Per-symbol template recordings for nearest-neighbour classification.

    Immutable after construction; classification is read-only, so
    queries may run concurrently.
    """

    def __init__(self, templates: dict[int, list[Recording]],
                 cap: int = DEFAULT_TEMPLATE_CAP):
        self.cap = int(cap)
        self.templates: dict[int, list[Recording]] = {}
        self._flattened: dict[int, list[np.ndarray]] = {}
        for symbol_id, recs in templates.items():
            kept = list(recs[: self.cap])
            if not kept:
                continue
            self.templates[int(symbol_id)] = kept
            self._flattened[int(symbol_id)] = [flatten_xy(r) for r in kept]

    @classmethod
    def from_labeled(cls, recordings: list[Recording], labels: list[int],
                     cap: int = DEFAULT_TEMPLATE_CAP) -> "GtwTemplateStore":
        by_symbol: dict[int, list[Recording]] = {}
        for rec, label in zip(recordings, labels):
            by_symbol.setdefault(int(label), []).append(rec)
        return cls(by_symbol, cap=cap)

    def __len__(self) -> int:
        return len(self.templates)

    def symbol_ids(self) -> list[int]:
        return sorted(self.templates)

    def classify(self, query: Recording, k: int = 10) -> list[tuple[int, float]]:
        """Top-k symbols by minimal template distance, as (id, probability).

        Symbols are ranked by ascending minimal distance, ties broken by
        ascending symbol id.  Distances turn into pseudo-probabilities
        through a softmax over the negated distances of the k best,
        scaled by their mean; the ranking does not depend on the scale.
        """
        if not self.templates:
            raise StateError("template store is empty")
        query_xy = flatten_xy(query)
        ranked = sorted(
            (min(gtw_distance(query_xy, t) for t in flat), symbol_id)
            for symbol_id, flat in self._flattened.items()
        )
        k = max(1, min(k, len(ranked)))
        best = ranked[:k]
        distances = np.array([d for d, _ in best])
        tau = float(distances.mean())
        if tau <= 0:
            probs = np.full(k, 1.0 / k)
        else:
            scores = -distances / tau
            scores -= scores.max()
            exp = np.exp(scores)
            probs = exp / exp.sum()
        return [(symbol_id, float(p)) for (_, symbol_id), p in zip(best, probs)]

    def save(self, directory) -> None:
        """Persist as one recording-list JSON file per symbol id."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for symbol_id, recs in self.templates.items():
            payload = "[" + ",".join(serialize_recording(r) for r in recs) + "]"
            (directory / f"{symbol_id}.json").write_text(payload)

    @classmethod
    def load(cls, directory, cap: int = DEFAULT_TEMPLATE_CAP) -> "GtwTemplateStore":
        directory = Path(directory)
        templates: dict[int, list[Recording]] = {}
        for name in sorted(os.listdir(directory)):
            if not name.endswith(".json"):
                continue
            stem = name[: -len(".json")]
            if not stem.lstrip("-").isdigit():
                continue
            data = json.loads((directory / name).read_text())
            templates[int(stem)] = [
                parse_recording(json.dumps(stroke_list)) for stroke_list in data
            ]
        return cls(templates, cap=cap)


def rank_outliers(recs: list[Recording]) -> list[tuple[int, float]]:
    """Rank same-symbol recordings by how far they sit from the rest.

    Every ordered pair is evaluated once (n * (n - 1) distance
    evaluations); since the greedy distance is asymmetric, a
    recording's score sums both directions against all others.
    Returns (index, score) pairs ordered descending by score, ties by
    ascending index.
    """
    n = len(recs)
    if n < 2:
        raise ParameterError("outlier ranking needs at least two recordings")
    flat = [flatten_xy(r) for r in recs]
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                d[i, j] = gtw_distance(flat[i], flat[j])
    scores = d.sum(axis=1) + d.sum(axis=0)
    order = sorted(range(n), key=lambda i: (-scores[i], i))
    return [(i, float(scores[i])) for i in order]
