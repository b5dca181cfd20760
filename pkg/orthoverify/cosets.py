"""
Todd-Coxeter enumeration of the cosets of the trivial subgroup.

HLT strategy: cosets are processed in order of definition, each relator
is scanned and filled from every live coset, and remaining gaps in the
row are then filled with new definitions. Coincidences are processed
with a union-find queue. Rows are dicts because presentations coming
from incidence complexes have thousands of generators.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence

from orthoverify.errors import UsageError
from orthoverify.utils import get_logger

Word = Sequence[int]


class OutcomeKind(Enum):
    TRIVIAL_GROUP = "TrivialGroup"
    FINITE_INDEX = "FiniteIndex"
    EXCEEDED = "Exceeded"


@dataclass(frozen=True)
class EnumerationOutcome:
    kind: OutcomeKind
    index: Optional[int] = None
    cosets_defined: int = 0

    def as_dict(self) -> Dict[str, object]:
        return {
            "kind": self.kind.value,
            "index": self.index,
            "cosets_defined": self.cosets_defined,
        }


class _BudgetReached(Exception):
    pass


def _column(letter: int) -> int:
    # Generator g_i (1-based) has column 2(i-1), its inverse 2(i-1)+1.
    if letter > 0:
        return 2 * (letter - 1)
    return 2 * (-letter - 1) + 1


class CosetTable:
    def __init__(self, generator_count: int, relators: Sequence[Word], budget: int):
        self.columns = 2 * generator_count
        self.relators = [[_column(x) for x in r] for r in relators if r]
        self.budget = budget
        self.rows: List[Dict[int, int]] = [{}]
        self.parent: List[int] = [0]
        self.defined = 1

    def rep(self, k: int) -> int:
        root = k
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[k] != root:
            self.parent[k], k = root, self.parent[k]
        return root

    def live(self, k: int) -> bool:
        return self.parent[k] == k

    def define(self, coset: int, x: int) -> None:
        if self.defined >= self.budget:
            raise _BudgetReached()
        new = len(self.rows)
        self.rows.append({})
        self.parent.append(new)
        self.defined += 1
        self.rows[coset][x] = new
        self.rows[new][x ^ 1] = coset

    def _merge(self, k: int, l: int, queue: List[int]) -> None:
        k, l = self.rep(k), self.rep(l)
        if k == l:
            return
        if k > l:
            k, l = l, k
        self.parent[l] = k
        queue.append(l)

    def coincidence(self, a: int, b: int) -> None:
        queue: List[int] = []
        self._merge(a, b, queue)
        i = 0
        while i < len(queue):
            dead = queue[i]
            i += 1
            for x in sorted(self.rows[dead]):
                target = self.rows[dead].get(x)
                if target is None:
                    continue
                self.rows[target].pop(x ^ 1, None)
                mu = self.rep(dead)
                nu = self.rep(target)
                if x in self.rows[mu]:
                    self._merge(nu, self.rows[mu][x], queue)
                elif (x ^ 1) in self.rows[nu]:
                    self._merge(mu, self.rows[nu][x ^ 1], queue)
                else:
                    self.rows[mu][x] = nu
                    self.rows[nu][x ^ 1] = mu

    def scan_and_fill(self, coset: int, word: List[int]) -> None:
        rows = self.rows
        f, b = coset, coset
        i, j = 0, len(word) - 1
        while True:
            while i <= j and word[i] in rows[f]:
                f = rows[f][word[i]]
                i += 1
            if i > j:
                if f != coset:
                    self.coincidence(f, coset)
                return
            while j >= i and (word[j] ^ 1) in rows[b]:
                b = rows[b][word[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                rows[f][word[i]] = b
                rows[b][word[i] ^ 1] = f
                return
            self.define(f, word[i])

    def run(self) -> None:
        coset = 0
        while coset < len(self.rows):
            if self.live(coset):
                for word in self.relators:
                    if not self.live(coset):
                        break
                    self.scan_and_fill(coset, word)
                for x in range(self.columns):
                    if not self.live(coset):
                        break
                    if x not in self.rows[coset]:
                        self.define(coset, x)
            coset += 1

    def index(self) -> int:
        return sum(1 for k in range(len(self.rows)) if self.live(k))


def coset_enumerate(
    generator_count: int, relators: Sequence[Word], budget: int = 5 * 10**6
) -> EnumerationOutcome:
    """Enumerate the cosets of the trivial subgroup of a finitely presented group.

    Args:
        generator_count: Number of generators g1..gm.
        relators: Words as signed 1-based generator indices.
        budget: Maximum number of cosets ever defined.

    Returns:
        TrivialGroup, FiniteIndex{index} or Exceeded{cosets_defined}.
    """
    if budget < 1:
        raise UsageError(f"Coset budget must be positive, got {budget}")
    logger = get_logger()
    table = CosetTable(generator_count, relators, budget)
    try:
        table.run()
    except _BudgetReached:
        logger.info(f"Coset enumeration stopped after {table.defined} cosets")
        return EnumerationOutcome(OutcomeKind.EXCEEDED, cosets_defined=table.defined)

    index = table.index()
    logger.info(f"Coset enumeration complete: index {index}, {table.defined} defined")
    if index == 1:
        return EnumerationOutcome(OutcomeKind.TRIVIAL_GROUP, 1, table.defined)
    return EnumerationOutcome(OutcomeKind.FINITE_INDEX, index, table.defined)
