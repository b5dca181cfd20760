"""
Brute-force oracles over prime fields.

These never import orthoverify: they recompute the quantities under test
from plain modular arithmetic, so a shared bug cannot hide on both sides.
"""

import itertools
from collections import deque
from typing import Callable, Dict, List, Sequence, Tuple


def nonzero_squares(p: int) -> set:
    return {x * x % p for x in range(1, p)}


def joes_lemma_failures(p: int) -> List[int]:
    """Every admissible c with no (a, b), searched over all ordered triples."""
    squares = nonzero_squares(p)
    good = [a for a in range(1, p) if (a * a + 1) % p in squares]
    failures = []
    for c in range(p):
        if (c * c + 1) % p not in squares:
            continue
        if not any((a * a + b * b - c * c) % p == 0 for a in good for b in good):
            failures.append(c)
    return failures


def projective_points(p: int, m: int) -> List[Tuple[int, ...]]:
    """Normalized representatives: first nonzero coordinate equal to 1."""
    points = []
    for v in itertools.product(range(p), repeat=m):
        first = next((x for x in v if x), None)
        if first == 1:
            points.append(v)
    return points


def norm(p: int, v: Sequence[int]) -> int:
    return sum(x * x for x in v) % p


def point_census(p: int, m: int) -> Dict[str, int]:
    """Isotropic, square and nonsquare points of F_p^m with the standard form."""
    squares = nonzero_squares(p)
    census = {"isotropic": 0, "square": 0, "nonsquare": 0}
    for v in projective_points(p, m):
        n = norm(p, v)
        if n == 0:
            census["isotropic"] += 1
        elif n in squares:
            census["square"] += 1
        else:
            census["nonsquare"] += 1
    return census


def square_pair(p: int, u: Sequence[int], v: Sequence[int]) -> bool:
    """True when span(u, v) is a square-type line."""
    uv = sum(x * y for x, y in zip(u, v))
    det = (norm(p, u) * norm(p, v) - uv * uv) % p
    return det in nonzero_squares(p)


def bfs_diameter(count: int, adjacent: Callable[[int, int], bool]) -> float:
    """Largest BFS distance over all vertex pairs; inf when disconnected."""
    neighbours = [[j for j in range(count) if j != i and adjacent(i, j)] for i in range(count)]
    diameter = 0
    for source in range(count):
        distance = {source: 0}
        queue = deque([source])
        while queue:
            v = queue.popleft()
            for u in neighbours[v]:
                if u not in distance:
                    distance[u] = distance[v] + 1
                    queue.append(u)
        if len(distance) < count:
            return float("inf")
        diameter = max(diameter, max(distance.values()))
    return diameter


def collinearity_diameter(p: int, m: int) -> float:
    """Diameter of the square-point collinearity graph of F_p^m."""
    squares = nonzero_squares(p)
    points = [v for v in projective_points(p, m) if norm(p, v) in squares]
    return bfs_diameter(len(points), lambda i, j: square_pair(p, points[i], points[j]))


# F_9 as Z_3[i] with i^2 = -1; elements are pairs (a, b) meaning a + b i.
F9 = [(a, b) for a in range(3) for b in range(3)]
F9_ZERO, F9_ONE = (0, 0), (1, 0)


def f9_add(x: Tuple[int, int], y: Tuple[int, int]) -> Tuple[int, int]:
    return ((x[0] + y[0]) % 3, (x[1] + y[1]) % 3)


def f9_mul(x: Tuple[int, int], y: Tuple[int, int]) -> Tuple[int, int]:
    return ((x[0] * y[0] - x[1] * y[1]) % 3, (x[0] * y[1] + x[1] * y[0]) % 3)


def f9_dot(u: Sequence[Tuple[int, int]], v: Sequence[Tuple[int, int]]) -> Tuple[int, int]:
    total = F9_ZERO
    for x, y in zip(u, v):
        total = f9_add(total, f9_mul(x, y))
    return total


def f9_collinearity_diameter(m: int) -> float:
    """Diameter of the square-point collinearity graph of F_9^m."""
    squares = {f9_mul(x, x) for x in F9 if x != F9_ZERO}
    points = [
        v
        for v in itertools.product(F9, repeat=m)
        if next((x for x in v if x != F9_ZERO), None) == F9_ONE and f9_dot(v, v) in squares
    ]

    def adjacent(i: int, j: int) -> bool:
        u, v = points[i], points[j]
        uv = f9_dot(u, v)
        minus_uv2 = f9_mul((2, 0), f9_mul(uv, uv))
        return f9_add(f9_mul(f9_dot(u, u), f9_dot(v, v)), minus_uv2) in squares

    return bfs_diameter(len(points), adjacent)
