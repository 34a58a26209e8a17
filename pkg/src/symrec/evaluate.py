"""Error measures for ranked classification results.

``TOP-n`` counts a case as wrong when the reference symbol is absent
from the n most probable hypotheses.  ``MER`` (merged error rate)
relaxes TOP-3 by visual equivalence: some symbol pairs cannot be told
apart in handwriting (summation sign versus capital sigma), so the
top-3 hypotheses are expanded to their equivalence classes before the
reference is looked up.  A default pair list ships with the package;
singletons are assumed for symbols no pair mentions.
"""

from __future__ import annotations

import warnings
from importlib import resources

from .errors import ParameterError
from .recording import SymbolTable

__all__ = [
    "EquivalenceClasses",
    "topn_error",
    "mer_error",
    "load_equivalences",
    "default_equivalences",
]

# one classification case: ranked (symbol id, probability) list + reference id
Case = tuple[list[tuple[int, float]], int]


class EquivalenceClasses:
    """A partition of symbol ids; unmentioned symbols are singletons."""

    def __init__(self, symbol_ids, groups: list[set[int]] | None = None):
        self._class_of: dict[int, frozenset[int]] = {}
        symbol_ids = [int(s) for s in symbol_ids]
        covered = set()
        for group in groups or []:
            group = frozenset(int(g) for g in group)
            overlap = covered & group
            if overlap:
                raise ParameterError(f"symbols in multiple classes: {sorted(overlap)}")
            covered |= group
            for member in group:
                self._class_of[member] = group
        for symbol_id in symbol_ids:
            if symbol_id not in self._class_of:
                self._class_of[symbol_id] = frozenset([symbol_id])

    @classmethod
    def singletons(cls, symbol_ids) -> "EquivalenceClasses":
        return cls(symbol_ids)

    @classmethod
    def from_pairs(cls, pairs, symbol_ids) -> "EquivalenceClasses":
        """Union pairs transitively into classes over the given symbols."""
        parent: dict[int, int] = {int(s): int(s) for s in symbol_ids}

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for a, b in pairs:
            a, b = find(int(a)), find(int(b))
            if a != b:
                parent[b] = a
        groups: dict[int, set[int]] = {}
        for symbol_id in parent:
            groups.setdefault(find(symbol_id), set()).add(symbol_id)
        return cls(parent, [g for g in groups.values() if len(g) > 1])

    def class_of(self, symbol_id: int) -> frozenset[int]:
        return self._class_of.get(int(symbol_id), frozenset([int(symbol_id)]))

    def classes(self) -> list[frozenset[int]]:
        return sorted(set(self._class_of.values()), key=sorted)


def topn_error(results: list[Case], n: int) -> float:
    """Fraction of cases whose reference misses the n best hypotheses."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    if not results:
        raise ParameterError("no results to evaluate")
    wrong = 0
    for ranked, reference in results:
        top = [symbol_id for symbol_id, _ in ranked[:n]]
        if reference not in top:
            wrong += 1
    return wrong / len(results)


def mer_error(results: list[Case], classes: EquivalenceClasses) -> float:
    """TOP-3 error after expanding hypotheses to equivalence classes."""
    if not results:
        raise ParameterError("no results to evaluate")
    wrong = 0
    for ranked, reference in results:
        merged: set[int] = set()
        for symbol_id, _ in ranked[:3]:
            merged |= classes.class_of(symbol_id)
        if reference not in merged:
            wrong += 1
    return wrong / len(results)


def _parse_pair_lines(lines) -> list[tuple[str, str]]:
    pairs = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2 or not all(parts):
            warnings.warn(f"skipping malformed equivalence line: {line!r}", stacklevel=3)
            continue
        pairs.append((parts[0], parts[1]))
    return pairs


def load_equivalences(source, symbols: SymbolTable) -> EquivalenceClasses:
    """Build equivalence classes from a two-column command CSV.

    ``source`` is a path or an iterable of lines.  Pairs naming a
    command missing from the symbol table are skipped with a warning;
    transitive closure merges chained pairs into one class.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source) as fh:
            lines = fh.readlines()
    else:
        lines = list(source)
    id_pairs = []
    for a, b in _parse_pair_lines(lines):
        if not symbols.has_command(a) or not symbols.has_command(b):
            missing = a if not symbols.has_command(a) else b
            warnings.warn(
                f"equivalence pair ({a!r}, {b!r}) skipped: unknown symbol {missing!r}",
                stacklevel=2,
            )
            continue
        id_pairs.append((symbols.id_for(a), symbols.id_for(b)))
    return EquivalenceClasses.from_pairs(id_pairs, symbols.ids())


def default_equivalences(symbols: SymbolTable) -> EquivalenceClasses:
    """The bundled indistinguishable-pairs list, restricted to the table."""
    text = (
        resources.files("symrec").joinpath("data/equivalent_symbols.csv").read_text()
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # most bundled pairs are absent in small tables
        return load_equivalences(text.splitlines(), symbols)
