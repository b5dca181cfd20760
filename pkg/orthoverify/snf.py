"""
Smith normal form and invariant factors of integer matrices.

Boundary matrices of incidence complexes are large, sparse and mostly
unit entries. ``invariant_factors`` first eliminates unit pivots on a
sparse representation, then finishes the remainder with a dense Smith
normal form. A remainder above the dense limit falls back to ranks over
the rationals and small prime fields computed with sympy.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Set, Tuple

from sympy import GF, QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from orthoverify.utils import get_logger

SparseColumns = Sequence[Dict[int, int]]

FALLBACK_PRIMES = (2, 3, 5, 7, 11, 13)
FALLBACK_CAVEAT = "torsion tested only at primes 2, 3, 5, 7, 11, 13"


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> List[int]:
    """Diagonal of the Smith normal form, d1 | d2 | ..., zeros last.

    Pivots are chosen by least absolute value; all arithmetic is exact.
    """
    a = [list(row) for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    size = min(rows, cols)
    diagonal: List[int] = []

    t = 0
    while t < size:
        pivot = min(
            (
                (abs(a[i][j]), i, j)
                for i in range(t, rows)
                for j in range(t, cols)
                if a[i][j]
            ),
            default=None,
        )
        if pivot is None:
            break
        _, i, j = pivot
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]

        while True:
            p = a[t][t]
            clean = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    quotient = a[i][t] // p
                    a[i] = [x - quotient * y for x, y in zip(a[i], a[t])]
                    clean = clean and not a[i][t]
            for j in range(t + 1, cols):
                if a[t][j]:
                    quotient = a[t][j] // p
                    for i in range(t, rows):
                        a[i][j] -= quotient * a[i][t]
                    clean = clean and not a[t][j]

            if not clean:
                # Bring the smallest remainder in row t or column t to the pivot.
                _, i, j = min(
                    [(abs(a[i][t]), i, t) for i in range(t, rows) if a[i][t]]
                    + [(abs(a[t][j]), t, j) for j in range(t, cols) if a[t][j]]
                )
                a[t], a[i] = a[i], a[t]
                for row in a:
                    row[t], row[j] = row[j], row[t]
                continue

            offender = next(
                (
                    i
                    for i in range(t + 1, rows)
                    for j in range(t + 1, cols)
                    if a[i][j] % p
                ),
                None,
            )
            if offender is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[offender])]

        diagonal.append(abs(a[t][t]))
        t += 1

    return diagonal + [0] * (size - len(diagonal))


@dataclass
class FactorResult:
    """Rank and torsion factors of a sparse integer matrix.

    When ``exact`` is False the torsion list is empty and only the primes
    in ``tested_primes`` were examined; ``torsion_primes`` lists those
    whose rank dropped.
    """

    rank: int
    torsion: List[int]
    exact: bool = True
    unit_pivots: int = 0
    torsion_primes: Tuple[int, ...] = ()
    tested_primes: Tuple[int, ...] = ()
    notes: List[str] = field(default_factory=list)


def _to_rows(
    columns: SparseColumns,
) -> Tuple[Dict[int, Dict[int, int]], Dict[int, Set[int]]]:
    rows: Dict[int, Dict[int, int]] = {}
    cols: Dict[int, Set[int]] = {}
    for c, column in enumerate(columns):
        for r, v in column.items():
            if v:
                rows.setdefault(r, {})[c] = v
                cols.setdefault(c, set()).add(r)
    return rows, cols


def _eliminate_units(
    columns: SparseColumns,
) -> Tuple[int, Dict[int, Dict[int, int]], Dict[int, Set[int]]]:
    rows, cols = _to_rows(columns)

    units = 0
    progress = True
    while progress:
        progress = False
        for c in sorted(cols):
            entries = cols.get(c)
            if not entries:
                continue
            best = min(
                ((len(rows[r]), r) for r in entries if rows[r][c] in (1, -1)),
                default=None,
            )
            if best is None:
                continue
            r = best[1]
            pivot_row = rows[r]
            unit = pivot_row[c]
            for other in sorted(entries - {r}):
                factor = rows[other][c] * unit
                target = rows[other]
                for c2, v in pivot_row.items():
                    value = target.get(c2, 0) - factor * v
                    if value:
                        if c2 not in target:
                            cols[c2].add(other)
                        target[c2] = value
                    elif c2 in target:
                        del target[c2]
                        cols[c2].discard(other)
                if not target:
                    del rows[other]
            for c2 in pivot_row:
                cols[c2].discard(r)
                if not cols[c2]:
                    del cols[c2]
            del rows[r]
            units += 1
            progress = True
    return units, rows, cols


def _domain_matrix(rows: Dict[int, Dict[int, int]], cols: Dict[int, Set[int]]) -> DomainMatrix:
    row_ids = {r: i for i, r in enumerate(sorted(rows))}
    col_ids = {c: j for j, c in enumerate(sorted(cols))}
    rep = {
        row_ids[r]: {col_ids[c]: ZZ(v) for c, v in entries.items()}
        for r, entries in rows.items()
    }
    return DomainMatrix(rep, (len(row_ids), len(col_ids)), ZZ)


def sparse_rank(columns: SparseColumns, prime: int = 0) -> int:
    """Rank over the rationals (prime = 0) or over GF(prime)."""
    rows, cols = _to_rows(columns)
    if not rows:
        return 0
    matrix = _domain_matrix(rows, cols)
    return matrix.convert_to(GF(prime) if prime else QQ).rank()


def invariant_factors(columns: SparseColumns, dense_limit: int = 3000) -> FactorResult:
    """Rank and torsion factors (> 1) of an integer matrix given by sparse columns."""
    logger = get_logger()
    units, rows, cols = _eliminate_units(columns)
    remaining = (len(rows), len(cols))
    logger.debug(f"Eliminated {units} unit pivots; remainder {remaining[0]}x{remaining[1]}")

    if not rows:
        return FactorResult(rank=units, torsion=[], unit_pivots=units)

    if max(remaining) <= dense_limit:
        row_ids = sorted(rows)
        col_ids = sorted(cols)
        dense = [[rows[r].get(c, 0) for c in col_ids] for r in row_ids]
        diagonal = smith_normal_form(dense)
        nonzero = [d for d in diagonal if d]
        return FactorResult(
            rank=units + len(nonzero),
            torsion=[d for d in nonzero if d > 1],
            unit_pivots=units,
        )

    logger.warning(
        f"Remainder {remaining[0]}x{remaining[1]} above dense limit {dense_limit}; "
        f"{FALLBACK_CAVEAT}"
    )
    matrix = _domain_matrix(rows, cols)
    rational = matrix.convert_to(QQ).rank()
    dropped = tuple(
        p for p in FALLBACK_PRIMES if matrix.convert_to(GF(p)).rank() < rational
    )
    return FactorResult(
        rank=units + rational,
        torsion=[],
        exact=False,
        unit_pivots=units,
        torsion_primes=dropped,
        tested_primes=FALLBACK_PRIMES,
        notes=[FALLBACK_CAVEAT],
    )
