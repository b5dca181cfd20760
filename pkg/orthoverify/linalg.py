"""
Dense linear algebra over a finite field.

Vectors are tuples of packed field elements, matrices are tuples of row
tuples. Eliminations run on ``galois`` arrays of the field; the scalar
helpers at the bottom stay on the field's lookup tables because they sit
inside the enumeration loops.
"""

from typing import List, Sequence, Tuple

import numpy as np

from orthoverify.errors import DegenerateInputError
from orthoverify.gf import FieldDescriptor

Vector = Tuple[int, ...]
Matrix = Tuple[Vector, ...]


def _array(field: FieldDescriptor, rows: Sequence[Sequence[int]]):
    return field.GF([list(row) for row in rows])


def _matrix(array) -> Matrix:
    return tuple(tuple(row) for row in np.asarray(array).tolist())


def rref(field: FieldDescriptor, rows: Sequence[Sequence[int]]) -> Tuple[Matrix, Tuple[int, ...]]:
    """Reduced row echelon form with zero rows removed.

    Returns:
        The nonzero RREF rows and the strictly increasing pivot columns.
    """
    if not rows:
        return (), ()
    reduced: List[Vector] = []
    pivots: List[int] = []
    for row in _matrix(_array(field, rows).row_reduce()):
        lead = next((col for col, x in enumerate(row) if x), None)
        if lead is None:
            break
        reduced.append(row)
        pivots.append(lead)
    return tuple(reduced), tuple(pivots)


def rank(field: FieldDescriptor, rows: Sequence[Sequence[int]]) -> int:
    if not rows:
        return 0
    return int(np.linalg.matrix_rank(_array(field, rows)))


def det(field: FieldDescriptor, matrix: Sequence[Sequence[int]]) -> int:
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    if n == 2:
        return field.sub(
            field.mul(matrix[0][0], matrix[1][1]), field.mul(matrix[0][1], matrix[1][0])
        )
    return int(np.linalg.det(_array(field, matrix)))


def nullspace(field: FieldDescriptor, matrix: Sequence[Sequence[int]], width: int) -> Matrix:
    """Basis of {x : M x = 0} for a matrix with ``width`` columns, in RREF."""
    if not matrix:
        return identity(width)
    return _matrix(_array(field, matrix).null_space())


def reduce_vector(field: FieldDescriptor, basis: Matrix, pivots: Sequence[int], v: Sequence[int]) -> Vector:
    """Remainder of v after eliminating against an RREF basis."""
    rem = list(v)
    for row, pc in zip(basis, pivots):
        if rem[pc]:
            factor = rem[pc]
            rem = [field.sub(x, field.mul(factor, y)) for x, y in zip(rem, row)]
    return tuple(rem)


def transpose(matrix: Sequence[Sequence[int]]) -> Matrix:
    return tuple(zip(*matrix))


def matmul(field: FieldDescriptor, a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    return _matrix(_array(field, a) @ _array(field, b))


def mat_vec(field: FieldDescriptor, matrix: Sequence[Sequence[int]], v: Sequence[int]) -> Vector:
    return tuple(field.dot(row, v) for row in matrix)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def inverse(field: FieldDescriptor, matrix: Sequence[Sequence[int]]) -> Matrix:
    """Inverse of a square matrix.

    Raises:
        DegenerateInputError: If the matrix is singular.
    """
    array = _array(field, matrix)
    if int(np.linalg.matrix_rank(array)) < len(matrix):
        raise DegenerateInputError("Matrix is singular")
    return _matrix(np.linalg.inv(array))


def combine(field: FieldDescriptor, coefficients: Sequence[int], vectors: Sequence[Sequence[int]]) -> Vector:
    """Linear combination sum(c_i v_i)."""
    width = len(vectors[0])
    total = [0] * width
    for c, v in zip(coefficients, vectors):
        if c:
            for j, x in enumerate(v):
                if x:
                    total[j] = field.add(total[j], field.mul(c, x))
    return tuple(total)


def scale(field: FieldDescriptor, c: int, v: Sequence[int]) -> Vector:
    return tuple(field.mul(c, x) for x in v)
