"""
The geometry of square-type subspaces.

Objects are the proper nondegenerate square-type subspaces of a space U
(the whole ambient space by default), the type of an object is its
dimension and incidence is symmetrized containment. This module builds
the objects, answers incidence queries, forms flags and residues and
analyses the collinearity graph.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx

from orthoverify.config import DEFAULT_CONFIG, VerifierConfig
from orthoverify.errors import (
    BudgetExceededError,
    EmptyFlagError,
    EvenCharacteristicError,
    FlagNotInGeometryError,
    InvalidPrimeError,
    UsageError,
)
from orthoverify.gf import field_of_order
from orthoverify.ortho import (
    SQUARE,
    AmbientSpace,
    Subspace,
    enumerate_subspaces,
    enumerate_subspaces_of,
    intersection,
    pair_class_code,
    perp,
    whole_space,
)
from orthoverify.utils import gaussian_binomial, get_logger, prime_power


@dataclass(frozen=True)
class Flag:
    """A chain of pairwise incident objects, ordered by type."""

    chain: Tuple[Subspace, ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.chain, key=lambda w: w.dim))
        object.__setattr__(self, "chain", ordered)
        dims = [w.dim for w in ordered]
        if len(set(dims)) != len(dims):
            raise FlagNotInGeometryError(f"Flag has repeated types {dims}")
        for lower, upper in zip(ordered, ordered[1:]):
            if not upper.contains(lower):
                raise FlagNotInGeometryError(f"{lower} is not contained in {upper}")

    @property
    def types(self) -> Tuple[int, ...]:
        return tuple(w.dim for w in self.chain)

    def __len__(self) -> int:
        return len(self.chain)

    def __str__(self) -> str:
        return " < ".join(str(w) for w in self.chain)


@dataclass
class Connectivity:
    connected: bool
    diameter: float
    component_count: int

    def as_dict(self) -> Dict[str, object]:
        return {
            "connected": self.connected,
            "diameter": "inf" if math.isinf(self.diameter) else int(self.diameter),
            "component_count": self.component_count,
        }


@dataclass
class TransversalityResult:
    transversal: bool
    maximal_flags: int
    counterexample: Optional[Flag] = None


class Geometry:
    """Square-type proper subspaces of a nondegenerate space, typed by dimension.

    Vertices are numbered globally: by type first, then in the canonical
    subspace order inside each type. Incidence lists are computed on first
    use by enumerating the subspaces of every object.
    """

    def __init__(
        self,
        space: Subspace,
        objects: Dict[int, List[Subspace]],
        provenance: Optional[List[str]] = None,
    ):
        self.space = space
        self.ambient: AmbientSpace = space.ambient
        self.n = space.dim - 1
        self.objects = {t: tuple(objects.get(t, ())) for t in range(1, self.n + 1)}
        self.provenance = list(provenance or [])
        self.vertices: List[Subspace] = [
            w for t in range(1, self.n + 1) for w in self.objects[t]
        ]
        self.index: Dict[Subspace, int] = {w: i for i, w in enumerate(self.vertices)}

    @property
    def q(self) -> int:
        return self.ambient.field.q

    @property
    def types(self) -> Tuple[int, ...]:
        return tuple(range(1, self.n + 1))

    def counts(self) -> Dict[int, int]:
        return {t: len(self.objects[t]) for t in self.types}

    def type_of(self, vertex: int) -> int:
        return self.vertices[vertex].dim

    def vertex(self, w: Subspace) -> int:
        try:
            return self.index[w]
        except KeyError:
            raise FlagNotInGeometryError(f"{w} is not an object of this geometry")

    def __contains__(self, w: Subspace) -> bool:
        return w in self.index

    @cached_property
    def down(self) -> Tuple[Tuple[int, ...], ...]:
        """For each vertex, the vertices properly contained in it."""
        logger = get_logger()
        result: List[Tuple[int, ...]] = []
        for w in self.vertices:
            below = []
            for s in range(1, w.dim):
                for sub in enumerate_subspaces_of(w, s):
                    v = self.index.get(sub)
                    if v is not None:
                        below.append(v)
            result.append(tuple(sorted(below)))
        logger.debug(
            f"Incidence computed for {len(self.vertices)} objects "
            f"({sum(len(b) for b in result)} containments)"
        )
        return tuple(result)

    @cached_property
    def up(self) -> Tuple[Tuple[int, ...], ...]:
        """For each vertex, the vertices properly containing it."""
        above: List[List[int]] = [[] for _ in self.vertices]
        for v, below in enumerate(self.down):
            for u in below:
                above[u].append(v)
        return tuple(tuple(sorted(a)) for a in above)

    def neighbours(self, vertex: int) -> Set[int]:
        return set(self.down[vertex]) | set(self.up[vertex])

    @cached_property
    def incidence_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(len(self.vertices)))
        for v, below in enumerate(self.down):
            graph.add_edges_from((u, v) for u in below)
        return graph

    def chambers(self) -> Iterator[Tuple[int, ...]]:
        """All chambers as vertex tuples ordered by type."""

        def extend(chain: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
            if len(chain) == self.n:
                yield chain
                return
            next_type = len(chain) + 1
            for v in self.up[chain[-1]]:
                if self.type_of(v) == next_type:
                    yield from extend(chain + (v,))

        for v in range(len(self.objects[1]) if self.n else 0):
            yield from extend((v,))

    def flag(self, vertices: Sequence[int]) -> Flag:
        return Flag(tuple(self.vertices[v] for v in vertices))

    def summary(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "q": self.q,
            "counts_per_type": {str(t): c for t, c in self.counts().items()},
        }


def _check_field(q: int, allow_minus_one_nonsquare: bool) -> List[str]:
    provenance = []
    if q % 2 == 0:
        raise EvenCharacteristicError(f"q = {q} is even")
    if prime_power(q) is None:
        raise InvalidPrimeError(f"q = {q} is not a prime power")
    if q % 4 == 3:
        if not allow_minus_one_nonsquare:
            raise UsageError(
                f"q = {q} has -1 a nonsquare; pass allow_minus_one_nonsquare "
                "to build the geometry anyway"
            )
        get_logger().warning(f"Building geometry over F_{q} where -1 is a nonsquare")
        provenance.append("override: -1 is a nonsquare")
    return provenance


def build_geometry(
    n: int,
    q: int,
    allow_minus_one_nonsquare: bool = False,
    config: VerifierConfig = DEFAULT_CONFIG,
) -> Geometry:
    """Build the geometry on F_q^(n+1) with the standard form.

    Args:
        n: Rank of the geometry, at least 2.
        q: Odd prime power.
        allow_minus_one_nonsquare: Permit q = 3 mod 4.
        config: Budgets.

    Returns:
        The geometry with all objects enumerated.

    Raises:
        EvenCharacteristicError: If q is even.
        UsageError: If q = 3 mod 4 without the override, or n < 2.
        BudgetExceededError: If the subspace count exceeds the budget.
    """
    if n < 2:
        raise UsageError(f"Rank n must be at least 2, got {n}")
    provenance = _check_field(q, allow_minus_one_nonsquare)
    f = field_of_order(q, max_order=config.max_field_order)
    ambient = AmbientSpace(f, n + 1)

    total = sum(gaussian_binomial(n + 1, t, q) for t in range(1, n + 1))
    if total > config.max_subspaces:
        raise BudgetExceededError("geometry construction", config.max_subspaces, total)

    logger = get_logger()
    objects = {
        t: enumerate_subspaces(ambient, t, SQUARE, budget=config.max_subspaces)
        for t in range(1, n + 1)
    }
    geometry = Geometry(whole_space(ambient), objects, provenance)
    logger.info(f"Built geometry n={n} q={q}: counts {geometry.counts()}")
    return geometry


def build_geometry_on(
    u: Subspace,
    config: VerifierConfig = DEFAULT_CONFIG,
    provenance: Optional[List[str]] = None,
) -> Geometry:
    """Build the geometry of square-type proper subspaces of a subspace u.

    Classes are taken with respect to the ambient form restricted to u.
    """
    total = sum(gaussian_binomial(u.dim, t, u.ambient.field.q) for t in range(1, u.dim))
    if total > config.max_subspaces:
        raise BudgetExceededError("geometry construction", config.max_subspaces, total)
    objects = {
        t: enumerate_subspaces_of(u, t, SQUARE, budget=config.max_subspaces)
        for t in range(1, u.dim)
    }
    return Geometry(u, objects, provenance or [f"built on {u}"])


def incident(a: Subspace, b: Subspace) -> bool:
    """True iff a = b or one of them contains the other."""
    if a == b:
        return True
    if a.dim < b.dim:
        return b.contains(a)
    if b.dim < a.dim:
        return a.contains(b)
    return False


@dataclass
class ResidueFactor:
    """Objects of a residue over one interval of consecutive types.

    ``lower`` and ``upper`` are the flag members bounding the interval
    (None for the zero space below and the geometry's space above);
    ``comparison`` is the geometry on lower^perp ∩ upper whose type t
    corresponds to type ``offset + t`` of the factor.
    """

    types: Tuple[int, ...]
    objects: Dict[int, Tuple[Subspace, ...]]
    lower: Optional[Subspace]
    upper: Subspace
    comparison: Optional[Geometry] = None

    @property
    def offset(self) -> int:
        return self.lower.dim if self.lower is not None else 0

    def counts(self) -> Dict[int, int]:
        return {t: len(self.objects[t]) for t in self.types}

    def shifted_counts(self) -> Dict[int, int]:
        return {t - self.offset: c for t, c in self.counts().items()}

    def degree_multiset(self) -> Tuple[int, ...]:
        members = [w for t in self.types for w in self.objects[t]]
        return tuple(
            sorted(
                sum(1 for b in members if b is not a and incident(a, b)) for a in members
            )
        )

    def matches_comparison(self) -> bool:
        """Per-type counts and incidence degree multisets agree."""
        if self.comparison is None:
            return False
        if self.shifted_counts() != self.comparison.counts():
            return False
        return self.degree_multiset() == geometry_degree_multiset(self.comparison)


@dataclass
class Residue:
    flag: Flag
    types: Tuple[int, ...]
    vertices: Tuple[int, ...]
    objects: Dict[int, Tuple[Subspace, ...]]
    factors: List[ResidueFactor] = field(default_factory=list)

    def counts(self) -> Dict[int, int]:
        return {t: len(self.objects[t]) for t in self.types}

    @property
    def is_empty(self) -> bool:
        return not self.vertices


def _intervals(types: Sequence[int]) -> List[Tuple[int, ...]]:
    runs: List[List[int]] = []
    for t in types:
        if runs and runs[-1][-1] == t - 1:
            runs[-1].append(t)
        else:
            runs.append([t])
    return [tuple(run) for run in runs]


def residue(
    g: Geometry,
    f: Flag,
    with_comparison: bool = True,
    config: VerifierConfig = DEFAULT_CONFIG,
) -> Residue:
    """Objects incident to every member of a flag, split into interval factors.

    Raises:
        EmptyFlagError: If the flag is empty.
        FlagNotInGeometryError: If a member is not an object of g.
    """
    if not f.chain:
        raise EmptyFlagError("Residue of the empty flag")
    members = [g.vertex(w) for w in f.chain]

    candidates = g.neighbours(members[0])
    for m in members[1:]:
        candidates &= g.neighbours(m)
    flag_types = set(f.types)
    remaining = tuple(t for t in g.types if t not in flag_types)
    vertices = tuple(sorted(v for v in candidates if g.type_of(v) not in flag_types))
    objects = {
        t: tuple(g.vertices[v] for v in vertices if g.type_of(v) == t) for t in remaining
    }

    by_type = {w.dim: w for w in f.chain}
    factors = []
    for interval in _intervals(remaining):
        lower = by_type.get(interval[0] - 1)
        upper = by_type.get(interval[-1] + 1, g.space)
        factor = ResidueFactor(
            types=interval,
            objects={t: objects[t] for t in interval},
            lower=lower,
            upper=upper,
        )
        if with_comparison:
            base = upper if lower is None else intersection(perp(lower), upper)
            factor.comparison = build_geometry_on(
                base, config, provenance=[f"comparison for residue of {f}"]
            )
        factors.append(factor)

    get_logger().debug(f"Residue of {f}: counts {dict((t, len(objects[t])) for t in remaining)}")
    return Residue(f, remaining, vertices, objects, factors)


def geometry_degree_multiset(g: Geometry) -> Tuple[int, ...]:
    return tuple(sorted(len(g.down[v]) + len(g.up[v]) for v in range(len(g.vertices))))


def invariants(g: Geometry) -> Dict[str, object]:
    """Isomorphism invariants: per-type counts and incidence degree multiset."""
    return {"counts": g.counts(), "degrees": geometry_degree_multiset(g)}


@dataclass
class CollinearityGraph:
    """Points of a geometry, adjacent when they span a square-type line."""

    vertices: Tuple[Subspace, ...]
    adjacency: Tuple[Tuple[int, ...], ...]

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(len(self.vertices)))
        for v, nbrs in enumerate(self.adjacency):
            graph.add_edges_from((v, u) for u in nbrs if u > v)
        return graph

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])


def collinearity_graph(g: Geometry) -> CollinearityGraph:
    points = g.objects[1]
    f = g.ambient.field
    adjacency: List[List[int]] = [[] for _ in points]
    # Lines are objects only while they are proper subspaces of the space.
    if g.n >= 2:
        vectors = [w.basis[0] for w in points]
        for i in range(len(points)):
            for j in range(i + 1, len(points)):
                if pair_class_code(f, vectors[i], vectors[j]) == 1:
                    adjacency[i].append(j)
                    adjacency[j].append(i)
    get_logger().debug(
        f"Collinearity graph: {len(points)} points, "
        f"{sum(len(a) for a in adjacency) // 2} edges"
    )
    return CollinearityGraph(points, tuple(tuple(a) for a in adjacency))


def graph_connectivity(graph: nx.Graph) -> Connectivity:
    if graph.number_of_nodes() == 0:
        return Connectivity(False, math.inf, 0)
    components = nx.number_connected_components(graph)
    if components > 1:
        return Connectivity(False, math.inf, components)
    return Connectivity(True, nx.diameter(graph), 1)


def connectivity(graph: CollinearityGraph) -> Connectivity:
    """Exact connectedness, diameter and component count by BFS."""
    result = graph_connectivity(graph.to_networkx())
    get_logger().info(
        f"Collinearity graph connected={result.connected} "
        f"diameter={result.as_dict()['diameter']}"
    )
    return result


def incidence_connectivity(g: Geometry) -> Connectivity:
    return graph_connectivity(g.incidence_graph)


def _maximal_chains(g: Geometry, budget: int) -> Iterator[Tuple[int, ...]]:
    # Cover relations: w covers v when no object lies strictly between them.
    covers_up: List[List[int]] = []
    for v in range(len(g.vertices)):
        above = g.up[v]
        above_set = set(above)
        covers_up.append(
            [u for u in above if not any(m in above_set for m in g.down[u])]
        )
    produced = 0

    def walk(chain: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
        nonlocal produced
        nexts = covers_up[chain[-1]]
        if not nexts:
            produced += 1
            if produced > budget:
                raise BudgetExceededError("maximal flag enumeration", budget, produced)
            yield chain
            return
        for u in nexts:
            yield from walk(chain + (u,))

    for v in range(len(g.vertices)):
        if not g.down[v]:
            yield from walk((v,))


def is_transversal(g: Geometry, config: VerifierConfig = DEFAULT_CONFIG) -> TransversalityResult:
    """Every flag lies in a chamber iff every maximal flag is a chamber."""
    count = 0
    for chain in _maximal_chains(g, config.orbit_budget):
        count += 1
        if len(chain) != g.n:
            flag = g.flag(chain)
            get_logger().warning(f"Maximal flag {flag} is not a chamber")
            return TransversalityResult(False, count, flag)
    return TransversalityResult(True, count)


def _flags_up_to_rank(g: Geometry, max_rank: int) -> Iterator[Tuple[int, ...]]:
    if max_rank < 1:
        return

    def extend(chain: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
        yield chain
        if len(chain) < max_rank:
            for u in g.up[chain[-1]]:
                yield from extend(chain + (u,))

    for v in range(len(g.vertices)):
        yield from extend((v,))


@dataclass
class ResidualConnectivityResult:
    residually_connected: bool
    residues_checked: int
    failures: List[Flag] = field(default_factory=list)


def residual_connectivity(
    g: Geometry, config: VerifierConfig = DEFAULT_CONFIG
) -> ResidualConnectivityResult:
    """Check that the residue of every nonempty flag of corank at least 2 is connected.

    The geometry itself (the empty flag) is covered by incidence_connectivity.
    """
    checked = 0
    failures = []
    graph = g.incidence_graph
    for chain in _flags_up_to_rank(g, g.n - 2):
        checked += 1
        if checked > config.orbit_budget:
            raise BudgetExceededError("residue enumeration", config.orbit_budget, checked)
        res = residue(g, g.flag(chain), with_comparison=False)
        if not graph_connectivity(graph.subgraph(res.vertices)).connected:
            failures.append(res.flag)
    get_logger().info(f"Residual connectivity: {checked} residues, {len(failures)} disconnected")
    return ResidualConnectivityResult(not failures, checked, failures)


@dataclass
class DegreeCheck:
    consistent: bool
    points_checked: int
    mismatches: List[int] = field(default_factory=list)


def collinearity_degree_check(g: Geometry, graph: Optional[CollinearityGraph] = None) -> DegreeCheck:
    """Recount every point degree through the square-type lines on that point."""
    graph = graph or collinearity_graph(g)
    mismatches = []
    for v, point in enumerate(graph.vertices):
        vertex = g.vertex(point)
        through = 0
        if g.n >= 2:
            for line in g.up[vertex]:
                if g.type_of(line) == 2:
                    others = [u for u in g.down[line] if g.type_of(u) == 1]
                    through += len(others) - 1
        if through != graph.degree(v):
            mismatches.append(v)
    return DegreeCheck(not mismatches, len(graph.vertices), mismatches)
