"""Interaction-tuple bookkeeping: parameter combinations and the uncovered store."""

from __future__ import annotations

import itertools

from .model import SutModel, TestCase, VscaConfig

ParamCombination = tuple[int, ...]


def generate_param_combinations(k: int, t: int) -> list[ParamCombination]:
    """All strictly increasing t-combinations of 0..k-1, in lexicographic order.

    Iterative depth-first walk over an explicit stack of candidate values;
    the stack never holds more than t entries, so large k cannot exhaust the
    call stack. Each pop resumes the prefix written at shallower depths.
    """
    if t < 1 or t > k:
        raise ValueError(f"strength t={t} outside 1..{k}")
    combos: list[ParamCombination] = []
    comb = [0] * t
    stack = [0]
    while stack:
        i = len(stack) - 1
        v = stack.pop()
        while v < k:
            comb[i] = v
            i += 1
            v += 1
            stack.append(v)
            if i == t:
                combos.append(tuple(comb))
                break
    return combos


class TupleStore:
    """Uncovered value tuples keyed by parameter combination.

    Entries whose tuple sets empty out are dropped from the map, so the
    per-candidate scan shrinks as coverage progresses.
    """

    def __init__(self, model: SutModel, entries: dict[ParamCombination, set[tuple[int, ...]]]):
        self.model = model
        self.entries = {key: set(tuples) for key, tuples in entries.items() if tuples}
        self.initial_total = sum(len(s) for s in self.entries.values())
        self._remaining = self.initial_total

    @property
    def remaining_count(self) -> int:
        return self._remaining

    def dump_debug(self) -> str:
        """One line per entry: "i,j,...: t1 t2 ..." with tuples hyphen-joined."""
        lines = []
        for key in sorted(self.entries):
            tuples = " ".join("-".join(map(str, tup)) for tup in sorted(self.entries[key]))
            lines.append(f"{','.join(map(str, key))}: {tuples}")
        return "\n".join(lines)


def build_tuple_store(model: SutModel, config: VscaConfig) -> TupleStore:
    """Every required combination paired with its full product of value tuples.

    The main strength contributes all t-combinations over every parameter;
    each sub-configuration contributes the s-combinations drawn from its own
    index pool. Combinations demanded by more than one source share a key and
    union their tuple sets, so nothing is counted twice.
    """
    entries: dict[ParamCombination, set[tuple[int, ...]]] = {}
    demands = [(tuple(range(model.k)), config.main_strength)]
    demands += [(tuple(sorted(sub.indices)), sub.strength) for sub in config.sub_configs]
    for pool, strength in demands:
        for local in generate_param_combinations(len(pool), strength):
            key = tuple(pool[j] for j in local)
            values = entries.setdefault(key, set())
            values.update(itertools.product(*(range(model.param_levels[i]) for i in key)))
    return TupleStore(model, entries)


def coverage_count(case: TestCase, store: TupleStore) -> int:
    """How many uncovered entries this case's projections hit; read-only."""
    hits = 0
    for key, tuples in store.entries.items():
        if tuple(case[i] for i in key) in tuples:
            hits += 1
    return hits


def remove_covered(case: TestCase, store: TupleStore) -> int:
    """Delete every tuple the case covers and return how many went away.

    Emptied entries are dropped from the map entirely.
    """
    removed = 0
    emptied = []
    for key, tuples in store.entries.items():
        projection = tuple(case[i] for i in key)
        if projection in tuples:
            tuples.discard(projection)
            removed += 1
            if not tuples:
                emptied.append(key)
    for key in emptied:
        del store.entries[key]
    store._remaining -= removed
    return removed
