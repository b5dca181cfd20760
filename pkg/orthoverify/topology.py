"""
The incidence 2-complex of a geometry and its first homotopy invariants.

Vertices are the objects, edges the incident pairs and triangles the
chains of three objects. From the complex this module computes H1 over
the integers, a presentation of the fundamental group (spanning tree
collapse), Betti numbers over the rationals, and decides whether a
triangle of points is geometric.
"""

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from orthoverify.config import DEFAULT_CONFIG, VerifierConfig
from orthoverify.errors import (
    BudgetExceededError,
    DisconnectedComplexError,
    NotATriangleError,
)
from orthoverify.geometry import CollinearityGraph, Geometry
from orthoverify.ortho import (
    NONSQUARE,
    SQUARE,
    ClassKind,
    Subspace,
    classify,
    enumerate_subspaces_of,
    join,
    perp,
    points_of,
    radical,
)
from orthoverify.snf import invariant_factors, sparse_rank
from orthoverify.utils import get_logger

Edge = Tuple[int, int]
Triangle = Tuple[int, int, int]


class TwoComplex:
    """Vertices 0..n-1, sorted edges and sorted triangles with boundary maps.

    Cells are oriented by ascending vertex index: d(i, j) = j - i and
    d(i, j, k) = (j, k) - (i, k) + (i, j).
    """

    def __init__(
        self,
        vertex_count: int,
        edges: Iterable[Edge],
        triangles: Iterable[Triangle] = (),
        labels: Optional[Sequence[object]] = None,
    ):
        self.vertex_count = vertex_count
        self.edges: List[Edge] = sorted({tuple(sorted(e)) for e in edges})
        self.triangles: List[Triangle] = sorted({tuple(sorted(t)) for t in triangles})
        self.labels = labels
        self.edge_index: Dict[Edge, int] = {e: i for i, e in enumerate(self.edges)}
        for i, j, k in self.triangles:
            for pair in ((i, j), (j, k), (i, k)):
                if pair not in self.edge_index:
                    raise ValueError(f"Triangle {(i, j, k)} is missing edge {pair}")

    @classmethod
    def from_triangles(
        cls, triangles: Iterable[Sequence[int]], extra_edges: Iterable[Edge] = ()
    ) -> "TwoComplex":
        """Complex generated by triangles, labels renumbered 0..n-1 in sorted order."""
        triangles = [tuple(t) for t in triangles]
        extra_edges = [tuple(e) for e in extra_edges]
        labels = sorted({v for cell in triangles + extra_edges for v in cell})
        relabel = {v: i for i, v in enumerate(labels)}
        triangles = [tuple(sorted(relabel[v] for v in t)) for t in triangles]
        edges = {(t[a], t[b]) for t in triangles for a, b in ((0, 1), (1, 2), (0, 2))}
        edges |= {tuple(sorted(relabel[v] for v in e)) for e in extra_edges}
        return cls(len(labels), edges, triangles, labels=labels)

    @cached_property
    def boundary1(self) -> List[Dict[int, int]]:
        return [{i: -1, j: 1} for i, j in self.edges]

    @cached_property
    def boundary2(self) -> List[Dict[int, int]]:
        index = self.edge_index
        return [
            {index[(j, k)]: 1, index[(i, k)]: -1, index[(i, j)]: 1}
            for i, j, k in self.triangles
        ]

    @cached_property
    def skeleton(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from(self.edges)
        return graph

    def component_count(self) -> int:
        return nx.number_connected_components(self.skeleton)

    def euler_characteristic(self) -> int:
        return self.vertex_count - len(self.edges) + len(self.triangles)

    def cell_counts(self) -> Dict[str, int]:
        return {
            "vertices": self.vertex_count,
            "edges": len(self.edges),
            "triangles": len(self.triangles),
        }


def boundary_composition_vanishes(c: TwoComplex) -> bool:
    """Check d1 o d2 = 0 column by column."""
    for column in c.boundary2:
        total: Dict[int, int] = {}
        for e, sign in column.items():
            for v, s in c.boundary1[e].items():
                total[v] = total.get(v, 0) + sign * s
        if any(total.values()):
            return False
    return True


def tetrahedron_boundary() -> TwoComplex:
    return TwoComplex.from_triangles([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


def seven_vertex_torus() -> TwoComplex:
    """Minimal triangulation of the torus: {i, i+1, i+3} and {i, i+2, i+3} mod 7."""
    triangles = []
    for i in range(7):
        triangles.append((i, (i + 1) % 7, (i + 3) % 7))
        triangles.append((i, (i + 2) % 7, (i + 3) % 7))
    return TwoComplex.from_triangles(triangles)


def six_vertex_projective_plane() -> TwoComplex:
    """Minimal triangulation of the real projective plane on vertices 1..6."""
    return TwoComplex.from_triangles(
        [
            (1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 6, 2),
            (2, 3, 5), (3, 4, 6), (4, 5, 2), (5, 6, 3), (6, 2, 4),
        ]
    )


def incidence_complex(g: Geometry, config: VerifierConfig = DEFAULT_CONFIG) -> TwoComplex:
    """Flag complex of the incidence graph: chains of length 2 and 3.

    Raises:
        BudgetExceededError: If the triangle count exceeds the cell budget.
    """
    logger = get_logger()
    triangle_count = sum(len(g.down[m]) * len(g.up[m]) for m in range(len(g.vertices)))
    if triangle_count > config.max_cells:
        raise BudgetExceededError("incidence complex", config.max_cells, triangle_count)

    edges = [(u, v) for v in range(len(g.vertices)) for u in g.down[v]]
    triangles = [
        (u, m, v)
        for v in range(len(g.vertices))
        for m in g.down[v]
        for u in g.down[m]
    ]
    complex_ = TwoComplex(len(g.vertices), edges, triangles, labels=g.vertices)
    logger.info(f"Incidence complex: {complex_.cell_counts()}")
    return complex_


@dataclass(frozen=True)
class AbelianInvariants:
    """Z^free_rank + Z/t1 + ... with t1 | t2 | ...

    ``exact`` is False when torsion was only tested at a few primes; the
    notes then name them and ``torsion_primes`` lists the primes found.
    """

    free_rank: int
    torsion: Tuple[int, ...] = ()
    exact: bool = True
    torsion_primes: Tuple[int, ...] = ()
    notes: Tuple[str, ...] = ()

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion and not self.torsion_primes

    def as_dict(self) -> Dict[str, object]:
        return {
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "exact": self.exact,
            "torsion_primes": list(self.torsion_primes),
        }

    def __str__(self) -> str:
        parts = [f"Z^{self.free_rank}"] if self.free_rank else []
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


def homology_h1(c: TwoComplex, config: VerifierConfig = DEFAULT_CONFIG) -> AbelianInvariants:
    """H1 = ker d1 / im d2 over the integers.

    ker d1 is a direct summand of the edge lattice, so the torsion of H1 is
    the torsion of the cokernel of d2.
    """
    logger = get_logger()
    cells = len(c.edges) + len(c.triangles)
    if cells > config.max_cells:
        raise BudgetExceededError("homology", config.max_cells, cells)

    rank1 = c.vertex_count - c.component_count()
    factors = invariant_factors(c.boundary2, dense_limit=config.snf_dense_limit)
    free_rank = len(c.edges) - rank1 - factors.rank
    result = AbelianInvariants(
        free_rank=free_rank,
        torsion=tuple(factors.torsion),
        exact=factors.exact,
        torsion_primes=factors.torsion_primes,
        notes=tuple(factors.notes),
    )
    logger.info(f"H1 = {result}")
    return result


@dataclass(frozen=True)
class BettiNumbers:
    b0: int
    b1: int
    b2: int

    def euler_characteristic(self) -> int:
        return self.b0 - self.b1 + self.b2


def betti_numbers(c: TwoComplex) -> BettiNumbers:
    """Betti numbers over the rationals from sympy ranks of the boundary maps."""
    rank1 = sparse_rank(c.boundary1)
    rank2 = sparse_rank(c.boundary2)
    return BettiNumbers(
        b0=c.vertex_count - rank1,
        b1=len(c.edges) - rank1 - rank2,
        b2=len(c.triangles) - rank2,
    )


@dataclass(frozen=True)
class GroupPresentation:
    """Generators g1..gm and relators as signed generator indices."""

    generator_count: int
    relators: Tuple[Tuple[int, ...], ...]
    base: int = 0
    generator_edges: Tuple[Edge, ...] = ()
    disconnected: bool = False

    def to_text(self) -> str:
        """Generators line, then one relator per line (Gi is the inverse of gi)."""
        lines = ["generators: " + ",".join(f"g{i}" for i in range(1, self.generator_count + 1))]
        for relator in self.relators:
            lines.append(" ".join(f"g{x}" if x > 0 else f"G{-x}" for x in relator))
        return "\n".join(lines) + "\n"


def free_reduce(word: Iterable[int]) -> Tuple[int, ...]:
    stack: List[int] = []
    for letter in word:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def parse_presentation(text: str) -> GroupPresentation:
    """Inverse of GroupPresentation.to_text."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    header = lines[0].split(":", 1)[1].strip()
    count = len(header.split(",")) if header else 0
    relators = []
    for line in lines[1:]:
        relators.append(
            tuple(int(tok[1:]) if tok[0] == "g" else -int(tok[1:]) for tok in line.split())
        )
    return GroupPresentation(count, tuple(relators))


def simplify_presentation(p: GroupPresentation) -> GroupPresentation:
    """Eliminate generators that a relator of length one or two defines.

    A relator g (or g^-1) makes g trivial; a relator g^s h makes g equal
    to h^-s. Substitution repeats until no such relator is left; the
    surviving generators are renumbered in ascending order.
    """
    image: Dict[int, int] = {}

    def resolve(letter: int) -> int:
        # Signed letter in terms of surviving generators, 0 for the identity.
        start = abs(letter)
        sign = 1 if letter > 0 else -1
        g = start
        while g in image:
            target = image[g]
            if target == 0:
                sign = 0
                break
            if target < 0:
                sign = -sign
            g = abs(target)
        result = sign * g
        if start in image:
            image[start] = result if letter > 0 else -result
        return result

    def rewrite(word: Sequence[int]) -> Tuple[int, ...]:
        return free_reduce(x for x in (resolve(y) for y in word) if x)

    changed = True
    while changed:
        changed = False
        for relator in p.relators:
            word = rewrite(relator)
            if len(word) == 1:
                image[abs(word[0])] = 0
                changed = True
            elif len(word) == 2 and abs(word[0]) != abs(word[1]):
                a, b = word
                image[abs(a)] = -b if a > 0 else b
                changed = True

    survivors = [g for g in range(1, p.generator_count + 1) if g not in image]
    renumber = {g: i + 1 for i, g in enumerate(survivors)}
    relators = []
    seen = set()
    for relator in p.relators:
        word = tuple(
            renumber[x] if x > 0 else -renumber[-x] for x in rewrite(relator)
        )
        if word and word not in seen:
            seen.add(word)
            relators.append(word)
    edges = p.generator_edges
    return GroupPresentation(
        len(survivors),
        tuple(relators),
        p.base,
        tuple(edges[g - 1] for g in survivors) if edges else (),
        p.disconnected,
    )


def pi1_presentation(c: TwoComplex, base: int = 0, strict: bool = False) -> GroupPresentation:
    """Presentation of the fundamental group at a base vertex.

    The BFS spanning tree visits neighbours in ascending order; every
    non-tree edge of the base component is a generator and every triangle
    contributes its boundary word i -> j -> k -> i, freely reduced.

    Raises:
        DisconnectedComplexError: If strict and the complex is disconnected.
    """
    logger = get_logger()
    graph = c.skeleton
    component = nx.node_connected_component(graph, base)
    disconnected = len(component) < c.vertex_count
    if disconnected:
        if strict:
            raise DisconnectedComplexError(
                f"Complex has {c.component_count()} components"
            )
        logger.warning(
            f"Complex is disconnected; presenting the component of vertex {base}"
        )

    tree = {tuple(sorted(e)) for e in nx.bfs_edges(graph, base, sort_neighbors=sorted)}
    generator_edges = tuple(
        e for e in c.edges if e[0] in component and e not in tree
    )
    generator_of = {e: i + 1 for i, e in enumerate(generator_edges)}

    def letter(i: int, j: int) -> Tuple[int, ...]:
        if i < j:
            g = generator_of.get((i, j))
            return (g,) if g else ()
        g = generator_of.get((j, i))
        return (-g,) if g else ()

    relators = []
    for i, j, k in c.triangles:
        if i not in component:
            continue
        word = free_reduce(letter(i, j) + letter(j, k) + letter(k, i))
        if word:
            relators.append(word)

    logger.info(
        f"pi1 presentation: {len(generator_edges)} generators, {len(relators)} relators"
    )
    return GroupPresentation(
        len(generator_edges), tuple(relators), base, generator_edges, disconnected
    )


def pi1_presentations(c: TwoComplex) -> List[GroupPresentation]:
    """One presentation per connected component, based at its least vertex."""
    return [
        pi1_presentation(c, base=min(component))
        for component in sorted(nx.connected_components(c.skeleton), key=min)
    ]


def abelianization(p: GroupPresentation) -> AbelianInvariants:
    """Smith normal form of the relator exponent-sum matrix."""
    columns = []
    for relator in p.relators:
        column: Dict[int, int] = {}
        for x in relator:
            g = abs(x) - 1
            column[g] = column.get(g, 0) + (1 if x > 0 else -1)
        columns.append(column)
    factors = invariant_factors(columns)
    return AbelianInvariants(
        free_rank=p.generator_count - factors.rank,
        torsion=tuple(factors.torsion),
        exact=factors.exact,
        torsion_primes=factors.torsion_primes,
        notes=tuple(factors.notes),
    )


@dataclass
class TriangleVerdict:
    geometric: bool
    witness: Optional[Subspace] = None
    span_class: str = ""


def triangle_geometric(g: Geometry, a: Subspace, b: Subspace, c: Subspace) -> TriangleVerdict:
    """Decide whether some object is incident to the points a, b, c and their lines.

    The witness is the common line for a collinear triple, the span when it
    is itself an object, and otherwise the first object of higher type
    containing the span.

    Raises:
        NotATriangleError: If the points are not distinct, pairwise collinear
            points of g.
    """
    points = (a, b, c)
    if len(set(points)) != 3 or any(p.dim != 1 or p not in g for p in points):
        raise NotATriangleError("Expected three distinct points of the geometry")
    for x, y in ((a, b), (b, c), (a, c)):
        line = join(x, y)
        if line.dim != 2 or line not in g:
            raise NotATriangleError(f"{x} and {y} do not span a line of the geometry")

    span = join(a, b, c)
    span_class = str(classify(span))
    if span.dim == 2 or span in g:
        return TriangleVerdict(True, span, span_class)
    for t in range(span.dim + 1, g.n + 1):
        for candidate in g.objects[t]:
            if candidate.contains(span):
                return TriangleVerdict(True, candidate, span_class)
    return TriangleVerdict(False, None, span_class)


def embed_in_square_object(g: Geometry, w: Subspace) -> Optional[Subspace]:
    """Construct an object of g containing a 3-space w that contains a line of g.

    A nonsquare w is extended by a nonsquare point of its perp; a w with a
    one-dimensional radical r is extended by a point y of L^perp with
    (r, y) != 0, where L is a square-type line of w. Returns None when no
    such object exists in g.
    """
    f = g.ambient.field
    cls = classify(w)
    if cls == SQUARE:
        return w if w in g else None

    if cls == NONSQUARE:
        complement = perp(w)
        if complement is None:
            return None
        for x in points_of(complement):
            if f.is_nonsquare(g.ambient.norm(x.basis[0])):
                candidate = join(w, x)
                if candidate in g:
                    return candidate
        return None

    if cls.kind is ClassKind.DEGENERATE and cls.radical_dim == 1:
        r = radical(w).basis[0]
        square_line = next(
            (
                line
                for line in enumerate_subspaces_of(w, 2)
                if line in g and not line.contains_vector(r)
            ),
            None,
        )
        if square_line is None:
            return None
        for y in points_of(perp(square_line)):
            if g.ambient.form(r, y.basis[0]):
                candidate = join(w, y)
                if candidate in g:
                    return candidate
    return None


def sample_collinear_triples(
    g: Geometry, graph: CollinearityGraph, count: int, seed: int = 0
) -> List[Tuple[Subspace, Subspace, Subspace]]:
    """Random pairwise-collinear triples of distinct points, reproducible from the seed."""
    rng = random.Random(seed)
    adjacency = [set(nbrs) for nbrs in graph.adjacency]
    candidates = [v for v in range(len(graph.vertices)) if adjacency[v]]
    triples = []
    attempts = 0
    while len(triples) < count and candidates and attempts < 100 * count:
        attempts += 1
        a = rng.choice(candidates)
        b = rng.choice(sorted(adjacency[a]))
        common = sorted(adjacency[a] & adjacency[b])
        if not common:
            continue
        c = rng.choice(common)
        triples.append((graph.vertices[a], graph.vertices[b], graph.vertices[c]))
    return triples


@dataclass
class TriangleSurvey:
    sampled: int
    geometric: int
    failures: List[Tuple[Subspace, Subspace, Subspace]] = field(default_factory=list)

    @property
    def all_geometric(self) -> bool:
        return self.sampled > 0 and self.geometric == self.sampled


def survey_triangles(
    g: Geometry, graph: CollinearityGraph, count: int, seed: int = 0
) -> TriangleSurvey:
    """Run triangle_geometric on sampled pairwise-collinear triples."""
    triples = sample_collinear_triples(g, graph, count, seed)
    failures = [t for t in triples if not triangle_geometric(g, *t).geometric]
    get_logger().info(
        f"Triangle survey: {len(triples) - len(failures)}/{len(triples)} geometric"
    )
    return TriangleSurvey(len(triples), len(triples) - len(failures), failures)
