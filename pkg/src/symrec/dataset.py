"""Recording corpus I/O and deterministic dataset splitting.

Raw corpora are JSON-lines files (one recording wire-format array per
line; the 1-based line number is the recording id) with a sidecar label
CSV ``id,symbol_command``.  Splits are stratified per symbol with
largest-remainder rounding and a seeded shuffle, so a (seed, fractions)
pair always produces the same disjoint train/validation/test sets.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ParameterError
from .recording import Recording, SymbolTable, parse_recording, serialize_recording

__all__ = [
    "load_recordings_jsonl",
    "save_recordings_jsonl",
    "load_labels_csv",
    "save_labels_csv",
    "LabeledCorpus",
    "load_corpus",
    "DatasetSplits",
    "split_dataset",
]


def load_recordings_jsonl(path) -> list[Recording]:
    recordings = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            recordings.append(parse_recording(line, id=lineno))
    return recordings


def save_recordings_jsonl(recordings, path) -> None:
    with open(path, "w") as fh:
        for rec in recordings:
            fh.write(serialize_recording(rec))
            fh.write("\n")


def load_labels_csv(path) -> dict[int, str]:
    labels: dict[int, str] = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            if row[0].strip().lower() == "id":
                continue
            if len(row) < 2:
                raise ConfigError(f"label row needs id and symbol_command: {row!r}")
            labels[int(row[0])] = row[1].strip()
    return labels


def save_labels_csv(labels: dict[int, str], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "symbol_command"])
        for rec_id in sorted(labels):
            writer.writerow([rec_id, labels[rec_id]])


@dataclass
class LabeledCorpus:
    """Recordings with labels attached, plus the derived symbol table."""

    recordings: list[Recording]
    symbols: SymbolTable

    def label_ids(self) -> np.ndarray:
        return np.array([self.symbols.id_for(r.label) for r in self.recordings])


def load_corpus(recordings_path, labels_path) -> LabeledCorpus:
    """Load a JSONL corpus and its sidecar labels into one structure.

    Recordings without a label row are dropped with a warning; the
    symbol table assigns ids 0..n-1 to the sorted distinct commands.
    """
    recordings = load_recordings_jsonl(recordings_path)
    labels = load_labels_csv(labels_path)
    labeled = []
    missing = 0
    for rec in recordings:
        if rec.id in labels:
            labeled.append(Recording(rec.strokes, id=rec.id, label=labels[rec.id]))
        else:
            missing += 1
    if missing:
        warnings.warn(f"{missing} recordings have no label and were dropped", stacklevel=2)
    if not labeled:
        raise ConfigError(f"no labeled recordings in {recordings_path}")
    table = SymbolTable.from_commands([r.label for r in labeled])
    return LabeledCorpus(labeled, table)


@dataclass
class DatasetSplits:
    """Disjoint train/validation/test recordings (ids never overlap)."""

    train: list[Recording]
    validation: list[Recording]
    test: list[Recording]

    def __iter__(self):
        return iter((self.train, self.validation, self.test))


def _largest_remainder(n: int, fractions) -> list[int]:
    quotas = [n * f for f in fractions]
    counts = [int(q) for q in quotas]
    remainders = sorted(
        range(len(quotas)), key=lambda i: (quotas[i] - counts[i], -i), reverse=True
    )
    for i in remainders[: n - sum(counts)]:
        counts[i] += 1
    return counts


def split_dataset(
    recordings: list[Recording],
    fractions: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> DatasetSplits:
    """Stratified split, deterministic per seed.

    Every symbol's recordings are shuffled with the seeded generator
    and allocated proportionally with largest-remainder rounding.  A
    symbol with fewer recordings than there are splits goes entirely to
    the training set (with a warning).  Recordings must carry labels.
    """
    if len(fractions) != 3:
        raise ParameterError("fractions must have three entries")
    if any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
        raise ParameterError("fractions must be non-negative and sum to 1")
    by_symbol: dict[str, list[Recording]] = {}
    for rec in recordings:
        if rec.label is None:
            raise ParameterError(f"recording {rec.id!r} has no label")
        by_symbol.setdefault(rec.label, []).append(rec)

    rng = np.random.default_rng(seed)
    train: list[Recording] = []
    validation: list[Recording] = []
    test: list[Recording] = []
    for label in sorted(by_symbol):
        group = by_symbol[label]
        order = rng.permutation(len(group))
        shuffled = [group[i] for i in order]
        if len(group) < 3:
            warnings.warn(
                f"symbol {label!r} has only {len(group)} recordings; "
                "all assigned to the training split",
                stacklevel=2,
            )
            train.extend(shuffled)
            continue
        n_train, n_valid, n_test = _largest_remainder(len(group), fractions)
        train.extend(shuffled[:n_train])
        validation.extend(shuffled[n_train : n_train + n_valid])
        test.extend(shuffled[n_train + n_valid :])
        assert n_train + n_valid + n_test == len(group)
    return DatasetSplits(train, validation, test)
