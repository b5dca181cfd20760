"""
Isometries of the standard form: reflections, orbits and Witt extension.

An isometry acts on column vectors, x -> M x. Flag transitivity is decided
by letting the reflections in all nonisotropic points permute the objects
of a geometry and closing one chamber under those permutations.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from orthoverify.config import DEFAULT_CONFIG, VerifierConfig
from orthoverify.errors import (
    BudgetExceededError,
    ClassMismatchError,
    DegenerateInputError,
    DimensionMismatchError,
    InternalError,
    IsotropicVectorError,
)
from orthoverify.geometry import Flag, Geometry
from orthoverify.linalg import (
    Matrix,
    Vector,
    det,
    identity,
    inverse,
    mat_vec,
    matmul,
    scale,
    transpose,
)
from orthoverify.ortho import (
    AmbientSpace,
    Subspace,
    classify,
    orthogonal_basis,
    perp,
    points_of,
    span,
)
from orthoverify.utils import get_logger


@dataclass(frozen=True)
class IsometryMatrix:
    """Square matrix over F_q preserving the standard form; determinant cached."""

    ambient: AmbientSpace = field(compare=False, repr=False)
    matrix: Matrix
    determinant: int = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "determinant", det(self.ambient.field, self.matrix))

    @classmethod
    def identity(cls, ambient: AmbientSpace) -> "IsometryMatrix":
        return cls(ambient, identity(ambient.dim))

    @property
    def is_rotation(self) -> bool:
        return self.determinant == 1

    def apply(self, v: Sequence[int]) -> Vector:
        return mat_vec(self.ambient.field, self.matrix, v)

    def image(self, w: Subspace) -> Subspace:
        return span(self.ambient, [self.apply(row) for row in w.basis])

    def compose(self, other: "IsometryMatrix") -> "IsometryMatrix":
        """self after other."""
        return IsometryMatrix(self.ambient, matmul(self.ambient.field, self.matrix, other.matrix))

    def is_isometry(self) -> bool:
        f = self.ambient.field
        return matmul(f, transpose(self.matrix), self.matrix) == identity(self.ambient.dim)

    def to_rows(self) -> List[List[int]]:
        return [list(row) for row in self.matrix]


def reflection(ambient: AmbientSpace, v: Sequence[int]) -> IsometryMatrix:
    """r_v(x) = x - 2 (x, v) / (v, v) v.

    Raises:
        IsotropicVectorError: If (v, v) = 0.
    """
    f = ambient.field
    norm = ambient.norm(v)
    if not norm:
        raise IsotropicVectorError(f"Cannot reflect in isotropic vector {tuple(v)}")
    c = f.div(f.add(1, 1), norm)
    rows = []
    for i in range(ambient.dim):
        ci = f.mul(c, v[i])
        rows.append(
            tuple(
                f.sub(1 if i == j else 0, f.mul(ci, v[j])) for j in range(ambient.dim)
            )
        )
    return IsometryMatrix(ambient, tuple(rows))


def reflection_pool(space: Subspace) -> List[IsometryMatrix]:
    """Reflections in every nonisotropic point of a space, in canonical order."""
    ambient = space.ambient
    return [
        reflection(ambient, p.basis[0])
        for p in points_of(space)
        if ambient.norm(p.basis[0])
    ]


def flag_image(m: IsometryMatrix, f: Flag) -> Flag:
    return Flag(tuple(m.image(w) for w in f.chain))


def orbit(
    seed: Flag,
    generators: Sequence[IsometryMatrix],
    budget: int = DEFAULT_CONFIG.orbit_budget,
) -> Set[Flag]:
    """Closure of a flag under the generators, by breadth-first search.

    Raises:
        BudgetExceededError: If the orbit grows beyond the budget.
    """
    seen = {seed}
    queue = deque([seed])
    while queue:
        current = queue.popleft()
        for m in generators:
            image = flag_image(m, current)
            if image not in seen:
                seen.add(image)
                if len(seen) > budget:
                    raise BudgetExceededError("orbit", budget, len(seen))
                queue.append(image)
    return seen


def object_permutations(
    g: Geometry, generators: Iterable[IsometryMatrix]
) -> List[Tuple[int, ...]]:
    """The permutation of g's vertices induced by each generator."""
    perms = []
    for m in generators:
        images = []
        for w in g.vertices:
            v = g.index.get(m.image(w))
            if v is None:
                raise InternalError(f"Isometry maps object {w} outside the geometry")
            images.append(v)
        perms.append(tuple(images))
    return perms


def _permutation_orbit(
    seed: Tuple[int, ...], perms: Sequence[Tuple[int, ...]], budget: int
) -> Set[Tuple[int, ...]]:
    seen = {seed}
    queue = deque([seed])
    while queue:
        current = queue.popleft()
        for perm in perms:
            image = tuple(perm[v] for v in current)
            if image not in seen:
                seen.add(image)
                if len(seen) > budget:
                    raise BudgetExceededError("orbit", budget, len(seen))
                queue.append(image)
    return seen


@dataclass
class TransitivityResult:
    transitive: bool
    chamber_count: int
    orbit_sizes: Dict[str, int]
    so_chamber_orbit: Optional[int] = None
    generator_count: int = 0
    type_transitive: Dict[str, bool] = field(default_factory=dict)


def verify_flag_transitivity(
    g: Geometry,
    config: VerifierConfig = DEFAULT_CONFIG,
    seed_chamber: Optional[Tuple[int, ...]] = None,
    with_rotations: bool = True,
) -> TransitivityResult:
    """Compare the chamber orbit of the reflection group with the chamber set.

    Besides the full orthogonal group the chamber orbit under the rotation
    subgroup, generated by the products r_0 r_i, is reported.
    """
    logger = get_logger()
    chambers = set()
    for chamber in g.chambers():
        chambers.add(chamber)
        if len(chambers) > config.orbit_budget:
            raise BudgetExceededError("chamber enumeration", config.orbit_budget, len(chambers))
    logger.info(f"{len(chambers)} chambers in geometry n={g.n} q={g.q}")

    generators = reflection_pool(g.space)
    perms = object_permutations(g, generators)

    orbit_sizes: Dict[str, int] = {}
    type_transitive: Dict[str, bool] = {}
    for t in g.types:
        if not g.objects[t]:
            orbit_sizes[str(t)] = 0
            type_transitive[str(t)] = True
            continue
        first = g.index[g.objects[t][0]]
        size = len(_permutation_orbit((first,), perms, config.orbit_budget))
        orbit_sizes[str(t)] = size
        type_transitive[str(t)] = size == len(g.objects[t])

    if not chambers:
        return TransitivityResult(True, 0, {**orbit_sizes, "chamber": 0}, 0, len(generators), type_transitive)

    seed = seed_chamber if seed_chamber is not None else min(chambers)
    chamber_orbit = _permutation_orbit(seed, perms, config.orbit_budget)
    orbit_sizes["chamber"] = len(chamber_orbit)

    so_size = None
    if with_rotations and perms:
        first = perms[0]
        rotations = [tuple(first[perm[v]] for v in range(len(perm))) for perm in perms[1:]]
        so_size = len(_permutation_orbit(seed, rotations, config.orbit_budget))

    transitive = len(chamber_orbit) == len(chambers)
    logger.info(
        f"Chamber orbit {len(chamber_orbit)} of {len(chambers)} "
        f"({len(generators)} reflections); rotation orbit {so_size}"
    )
    return TransitivityResult(
        transitive, len(chambers), orbit_sizes, so_size, len(generators), type_transitive
    )


def _sum_of_two_squares(ambient: AmbientSpace, target: int) -> Tuple[int, int]:
    f = ambient.field
    for x in f.elements():
        rest = f.sub(target, f.mul(x, x))
        root = f.sqrt(rest)
        if root is not None:
            return x, root
    raise InternalError(f"{target} is not a sum of two squares in F_{f.q}")


def _normalize(ambient: AmbientSpace, vectors: Sequence[Vector]) -> List[Vector]:
    """Rescale an orthogonal basis to norms 1, followed by at most one norm g."""
    f = ambient.field
    g = f.least_nonsquare()
    ones: List[Vector] = []
    gs: List[Vector] = []
    for v in vectors:
        norm = ambient.norm(v)
        if f.is_square(norm):
            ones.append(scale(f, f.inv(f.sqrt(norm)), v))
        else:
            gs.append(scale(f, f.inv(f.sqrt(f.div(norm, g))), v))
    if len(gs) >= 2:
        # x^2 + y^2 = 1/g turns two g-norm vectors into two orthogonal unit vectors.
        x, y = _sum_of_two_squares(ambient, f.inv(g))
        while len(gs) >= 2:
            a, b = gs.pop(), gs.pop()
            ones.append(tuple(f.add(f.mul(x, s), f.mul(y, t)) for s, t in zip(a, b)))
            ones.append(tuple(f.sub(f.mul(x, t), f.mul(y, s)) for s, t in zip(a, b)))
    return ones + gs


def _frame(w: Subspace) -> List[Vector]:
    frame = _normalize(w.ambient, orthogonal_basis(w))
    complement = perp(w)
    if complement is not None:
        frame += _normalize(w.ambient, orthogonal_basis(complement))
    return frame


def find_isometry(w1: Subspace, w2: Subspace) -> IsometryMatrix:
    """An isometry of the ambient space mapping w1 onto w2 (Witt extension).

    Raises:
        DimensionMismatchError: If the dimensions differ.
        DegenerateInputError: If either subspace is degenerate.
        ClassMismatchError: If the classes differ.
    """
    if w1.dim != w2.dim:
        raise DimensionMismatchError(f"dim {w1.dim} != dim {w2.dim}")
    c1, c2 = classify(w1), classify(w2)
    if not (c1.is_nondegenerate and c2.is_nondegenerate):
        raise DegenerateInputError(f"Witt extension needs nondegenerate subspaces ({c1}, {c2})")
    if c1 != c2:
        raise ClassMismatchError(f"{c1} subspace cannot map onto {c2} subspace")

    f = w1.ambient.field
    source = _frame(w1)
    target = _frame(w2)
    matrix = matmul(f, transpose(target), inverse(f, transpose(source)))
    result = IsometryMatrix(w1.ambient, matrix)
    if not result.is_isometry() or result.image(w1) != w2:
        raise InternalError(f"Witt extension failed for {w1} -> {w2}")
    return result
