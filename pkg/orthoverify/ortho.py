"""
Vectors, subspaces and the orthonormal symmetric bilinear form.

The ambient space is F_q^m with the standard form (u, v) = sum(u_i v_i),
i.e. identity Gram matrix. Subspaces are stored by their reduced row
echelon basis, which makes equality and hashing bit-exact.
"""

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from orthoverify.errors import (
    BudgetExceededError,
    DegenerateSubspaceError,
    EmptyInputError,
)
from orthoverify.gf import FieldDescriptor
from orthoverify.linalg import (
    Matrix,
    Vector,
    combine,
    det,
    identity,
    nullspace,
    rank,
    reduce_vector,
    rref,
    scale,
)
from orthoverify.utils import gaussian_binomial, get_logger

DEFAULT_SUBSPACE_BUDGET = 10**7


@dataclass(frozen=True)
class AmbientSpace:
    """F_q^dim with identity Gram matrix (dim = n + 1)."""

    field: FieldDescriptor
    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"Ambient dimension must be at least 2, got {self.dim}")

    @property
    def gram(self) -> Matrix:
        return identity(self.dim)

    def form(self, u: Sequence[int], v: Sequence[int]) -> int:
        return self.field.dot(u, v)

    def norm(self, v: Sequence[int]) -> int:
        return self.field.dot(v, v)

    def unit(self, i: int) -> Vector:
        return tuple(1 if j == i else 0 for j in range(self.dim))


class ClassKind(Enum):
    SQUARE = "Square"
    NONSQUARE = "Nonsquare"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class SubspaceClass:
    """Square, Nonsquare, or Degenerate with the dimension of its radical."""

    kind: ClassKind
    radical_dim: int = 0

    @property
    def is_nondegenerate(self) -> bool:
        return self.kind is not ClassKind.DEGENERATE

    def __str__(self) -> str:
        if self.kind is ClassKind.DEGENERATE:
            return f"Degenerate{{radical_dim:{self.radical_dim}}}"
        return self.kind.value


SQUARE = SubspaceClass(ClassKind.SQUARE)
NONSQUARE = SubspaceClass(ClassKind.NONSQUARE)


def degenerate(radical_dim: int) -> SubspaceClass:
    return SubspaceClass(ClassKind.DEGENERATE, radical_dim)


@dataclass(frozen=True)
class Subspace:
    """A nonzero subspace given by its canonical RREF basis.

    Equality and hashing use the basis only, so subspaces of one ambient
    space can be used directly as dictionary keys.
    """

    ambient: AmbientSpace = field(compare=False, repr=False)
    basis: Matrix
    pivots: Tuple[int, ...] = field(compare=False, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains_vector(self, v: Sequence[int]) -> bool:
        return not any(reduce_vector(self.ambient.field, self.basis, self.pivots, v))

    def contains(self, other: "Subspace") -> bool:
        if other.dim > self.dim:
            return False
        return all(self.contains_vector(row) for row in other.basis)

    def sort_key(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        """Canonical enumeration order: pivots, then entries by element order."""
        position = self.ambient.field.position
        return self.pivots, tuple(position(x) for row in self.basis for x in row)

    def to_text(self) -> str:
        return ";".join(",".join(str(x) for x in row) for row in self.basis)

    def __str__(self) -> str:
        return f"<{self.to_text()}>"


SubspaceFilter = Union[SubspaceClass, ClassKind, None]


def span(ambient: AmbientSpace, vectors: Sequence[Sequence[int]]) -> Optional[Subspace]:
    """Canonical subspace spanned by the vectors; None for the zero subspace."""
    basis, pivots = rref(ambient.field, vectors)
    if not basis:
        return None
    return Subspace(ambient, basis, pivots)


def whole_space(ambient: AmbientSpace) -> Subspace:
    return Subspace(ambient, identity(ambient.dim), tuple(range(ambient.dim)))


def join(*subspaces: Optional[Subspace]) -> Optional[Subspace]:
    """Sum of subspaces (None entries are the zero subspace)."""
    present = [s for s in subspaces if s is not None]
    if not present:
        return None
    return span(present[0].ambient, [row for s in present for row in s.basis])


def gram_matrix(ambient: AmbientSpace, vectors: Sequence[Sequence[int]]) -> Matrix:
    """Symmetric matrix of pairwise form values.

    Raises:
        EmptyInputError: If no vectors are given.
    """
    if not vectors:
        raise EmptyInputError("Gram matrix of an empty sequence")
    f = ambient.field
    size = len(vectors)
    rows = [[0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            value = f.dot(vectors[i], vectors[j])
            rows[i][j] = value
            rows[j][i] = value
    return tuple(tuple(row) for row in rows)


def classify_vectors(ambient: AmbientSpace, vectors: Sequence[Sequence[int]]) -> SubspaceClass:
    """Class of the span of linearly independent vectors."""
    gram = gram_matrix(ambient, vectors)
    d = det(ambient.field, gram)
    if d:
        return SQUARE if ambient.field.is_square(d) else NONSQUARE
    return degenerate(len(vectors) - rank(ambient.field, gram))


def classify(w: Subspace) -> SubspaceClass:
    """Square, Nonsquare or Degenerate{radical_dim} from the canonical basis."""
    return classify_vectors(w.ambient, w.basis)


def pair_class_code(field: FieldDescriptor, u: Sequence[int], v: Sequence[int]) -> int:
    """Square-table code of det Gram(u, v): 0 degenerate, 1 square, 2 nonsquare."""
    a = field.dot(u, u)
    b = field.dot(u, v)
    c = field.dot(v, v)
    return field.classify(field.sub(field.mul(a, c), field.mul(b, b)))


def radical(w: Subspace) -> Optional[Subspace]:
    """Kernel of the restricted form; None when the subspace is nondegenerate."""
    f = w.ambient.field
    gram = gram_matrix(w.ambient, w.basis)
    kernel = nullspace(f, gram, w.dim)
    if not kernel:
        return None
    return span(w.ambient, [combine(f, x, w.basis) for x in kernel])


def perp(w: Subspace) -> Optional[Subspace]:
    """Orthogonal complement; None when w is the whole space."""
    kernel = nullspace(w.ambient.field, w.basis, w.ambient.dim)
    if not kernel:
        return None
    return span(w.ambient, kernel)


def intersection(a: Optional[Subspace], b: Optional[Subspace]) -> Optional[Subspace]:
    """a ∩ b computed as the perp of perp(a) + perp(b)."""
    if a is None or b is None:
        return None
    ambient = a.ambient
    complement = join(perp(a), perp(b))
    if complement is None:
        return whole_space(ambient)
    return perp(complement)


def orthogonal_basis(w: Subspace) -> List[Vector]:
    """Pairwise orthogonal, nonisotropic basis of a nondegenerate subspace.

    Raises:
        DegenerateSubspaceError: If w is degenerate.
    """
    if not classify(w).is_nondegenerate:
        raise DegenerateSubspaceError(f"{w} is degenerate")
    f = w.ambient.field
    remaining = [tuple(row) for row in w.basis]
    result: List[Vector] = []
    while remaining:
        index = next((i for i, v in enumerate(remaining) if f.dot(v, v)), None)
        if index is None:
            # Totally isotropic so far: u + v has norm 2(u, v) for a non-orthogonal pair.
            pair = next(
                (
                    (i, j)
                    for i, j in itertools.combinations(range(len(remaining)), 2)
                    if f.dot(remaining[i], remaining[j])
                ),
                None,
            )
            if pair is None:
                raise DegenerateSubspaceError(f"{w} is degenerate")
            i, j = pair
            remaining[i] = tuple(f.add(x, y) for x, y in zip(remaining[i], remaining[j]))
            index = i
        v = remaining.pop(index)
        result.append(v)
        inv_norm = f.inv(f.dot(v, v))
        remaining = [
            tuple(
                f.sub(x, y)
                for x, y in zip(u, scale(f, f.mul(f.dot(u, v), inv_norm), v))
            )
            for u in remaining
        ]
    return result


def _matches(cls: SubspaceClass, wanted: SubspaceFilter) -> bool:
    if wanted is None:
        return True
    if isinstance(wanted, ClassKind):
        return cls.kind is wanted
    return cls == wanted


def iter_rref(field: FieldDescriptor, m: int, d: int) -> Iterator[Tuple[Matrix, Tuple[int, ...]]]:
    """All d x m RREF matrices in canonical order.

    Pivot sets come in lexicographic order; within one pivot set the free
    entries run row-major through the field's element order.
    """
    elements = field.elements()
    for pivots in itertools.combinations(range(m), d):
        pivot_set = set(pivots)
        free = [
            (i, j)
            for i, pc in enumerate(pivots)
            for j in range(pc + 1, m)
            if j not in pivot_set
        ]
        template = [[0] * m for _ in range(d)]
        for i, pc in enumerate(pivots):
            template[i][pc] = 1
        for values in itertools.product(elements, repeat=len(free)):
            for (i, j), x in zip(free, values):
                template[i][j] = x
            yield tuple(tuple(row) for row in template), pivots


def enumerate_subspaces(
    ambient: AmbientSpace,
    d: int,
    filter: SubspaceFilter = None,
    budget: int = DEFAULT_SUBSPACE_BUDGET,
) -> List[Subspace]:
    """All d-dimensional subspaces in canonical RREF order, optionally filtered.

    Raises:
        BudgetExceededError: If the Gaussian binomial count exceeds the budget.
    """
    if not 1 <= d <= ambient.dim:
        raise ValueError(f"Subspace dimension {d} outside 1..{ambient.dim}")
    count = gaussian_binomial(ambient.dim, d, ambient.field.q)
    if count > budget:
        raise BudgetExceededError("subspace enumeration", budget, count)
    get_logger().debug(f"Enumerating {count} subspaces of dim {d} in F_{ambient.field.q}^{ambient.dim}")

    result = []
    for basis, pivots in iter_rref(ambient.field, ambient.dim, d):
        w = Subspace(ambient, basis, pivots)
        if filter is None or _matches(classify(w), filter):
            result.append(w)
    return result


def enumerate_subspaces_of(
    u: Subspace,
    d: int,
    filter: SubspaceFilter = None,
    budget: int = DEFAULT_SUBSPACE_BUDGET,
) -> List[Subspace]:
    """All d-dimensional subspaces of u, classified by the ambient form.

    The result is sorted in the ambient canonical order.
    """
    if not 1 <= d <= u.dim:
        raise ValueError(f"Subspace dimension {d} outside 1..{u.dim}")
    f = u.ambient.field
    count = gaussian_binomial(u.dim, d, f.q)
    if count > budget:
        raise BudgetExceededError("subspace enumeration", budget, count)

    result = []
    for coords, _ in iter_rref(f, u.dim, d):
        w = span(u.ambient, [combine(f, row, u.basis) for row in coords])
        if filter is None or _matches(classify(w), filter):
            result.append(w)
    result.sort(key=Subspace.sort_key)
    return result


def points_of(u: Subspace) -> List[Subspace]:
    """Projective points of u in canonical order."""
    return enumerate_subspaces_of(u, 1)
