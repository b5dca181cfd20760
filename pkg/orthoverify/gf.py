"""
Exact arithmetic in finite fields F_q, q = p^k with p an odd prime.

Fields are built with ``galois`` over the lexicographically least monic
irreducible modulus. Elements are handled as packed integers
``sum(c_i * p**i)`` of their coefficient sequence, which is also the
integer representation ``galois`` uses. Prime fields use plain modular
arithmetic; extension fields read exponent, logarithm and Zech-logarithm
tables computed once per field from the ``galois`` field class, so scalar
operations are table lookups.
"""

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Type

import galois
import numpy as np

from orthoverify.errors import (
    BudgetExceededError,
    DivisionByZeroError,
    FieldMismatchError,
    InternalError,
    InvalidPrimeError,
)
from orthoverify.utils import get_logger, is_prime, prime_power

DEFAULT_MAX_ORDER = 2**20


class QuadraticClass(Enum):
    """Quadratic class of a field element."""

    ZERO = "Zero"
    SQUARE = "Square"
    NONSQUARE = "Nonsquare"


# Codes stored in the square table.
_ZERO, _SQUARE, _NONSQUARE = 0, 1, 2
_CLASS_BY_CODE = {
    _ZERO: QuadraticClass.ZERO,
    _SQUARE: QuadraticClass.SQUARE,
    _NONSQUARE: QuadraticClass.NONSQUARE,
}


def _as_ints(array: np.ndarray) -> list:
    return np.asarray(array).tolist()


def _poly(coeffs: Sequence[int], p: int) -> galois.Poly:
    """Polynomial over Z_p from coefficients listed low degree first."""
    return galois.Poly(list(reversed(coeffs)), field=galois.GF(p))


def least_irreducible(p: int, k: int) -> Tuple[int, ...]:
    """Lexicographically least monic irreducible of degree k over Z_p.

    Coefficient sequences are compared low degree first, which is not the
    order of ``galois.irreducible_polys``.
    """
    for low in itertools.product(range(p), repeat=k):
        candidate = tuple(low) + (1,)
        if k == 1 or _poly(candidate, p).is_irreducible():
            return candidate
    raise InternalError(f"No irreducible polynomial of degree {k} over Z_{p}")


class FieldDescriptor:
    """The field F_{p^k} together with its lookup tables.

    ``GF`` is the underlying ``galois`` field class; linear algebra works on
    its arrays. Instances are immutable after construction; obtain them
    through :func:`make_field` so that equal parameters share one object.
    """

    def __init__(self, p: int, k: int, modulus: Tuple[int, ...]):
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = modulus
        self._order = self.q - 1
        if k == 1:
            self.GF: Type[galois.FieldArray] = galois.GF(p)
        else:
            self.GF = galois.GF(self.q, irreducible_poly=_poly(modulus, p))

        # Canonical element order: coefficient tuples, low degree first.
        self._elements = tuple(
            self.pack(digits) for digits in itertools.product(range(p), repeat=k)
        )
        self._position = [0] * self.q
        for index, value in enumerate(self._elements):
            self._position[value] = index

        self._exp: List[int] = []
        self._log: List[int] = []
        self._zech: List[int] = []
        self._neg: List[int] = []
        if k > 1:
            self._build_tables()

        self._square_table = self._build_square_table()
        self._roots: Dict[int, int] = {}
        squares = _as_ints(self.GF(list(self._elements)) ** 2)
        for x, x_squared in zip(self._elements, squares):
            self._roots.setdefault(x_squared, x)

        # Euler criterion: (-1)^((q-1)/2) = 1.
        minus_one = self.GF(p - 1)
        self.minus_one_is_square = bool(minus_one ** (self._order // 2) == 1)
        if self.minus_one_is_square != (self.q % 4 == 1):
            raise InternalError(f"Euler criterion on -1 fails in F_{self.q}")

    # -- encoding ---------------------------------------------------------

    def pack(self, coeffs: Sequence[int]) -> int:
        value = 0
        for c in reversed(coeffs):
            value = value * self.p + c % self.p
        return value

    def coeffs(self, value: int) -> Tuple[int, ...]:
        digits = []
        for _ in range(self.k):
            value, c = divmod(value, self.p)
            digits.append(c)
        return tuple(digits)

    def elements(self) -> Tuple[int, ...]:
        """All elements in canonical order (coefficient tuples, low first)."""
        return self._elements

    def nonzero_elements(self) -> Tuple[int, ...]:
        return self._elements[1:]

    def position(self, value: int) -> int:
        """Index of an element in the canonical order."""
        return self._position[value]

    def from_int(self, n: int) -> int:
        """Image of an integer under Z -> F_q."""
        return n % self.p

    # -- tables -----------------------------------------------------------

    def _build_tables(self) -> None:
        logger = get_logger()
        powers = self.GF.primitive_element ** np.arange(self._order)
        self._exp = _as_ints(powers)
        self._log = [0] * self.q
        for n, value in enumerate(self._exp):
            self._log[value] = n

        self._neg = _as_ints(-self.GF.elements)
        self._zech = [
            -1 if total == 0 else self._log[total]
            for total in _as_ints(powers + self.GF(1))
        ]
        logger.debug(f"Built log/Zech tables for F_{self.q}")

    def _build_square_table(self) -> bytearray:
        flags = _as_ints(self.GF.elements.is_square())
        table = bytearray(_SQUARE if flag else _NONSQUARE for flag in flags)
        table[0] = _ZERO
        return table

    # -- arithmetic on packed integers ------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        if a == 0:
            return b
        if b == 0:
            return a
        la = self._log[a]
        z = self._zech[(self._log[b] - la) % self._order]
        if z < 0:
            return 0
        return self._exp[(la + z) % self._order]

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % self._order]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZeroError(f"0 has no inverse in F_{self.q}")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(-self._log[a]) % self._order]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def power(self, a: int, e: int) -> int:
        if self.k == 1:
            return pow(a, e, self.p) if e >= 0 else pow(self.inv(a), -e, self.p)
        if a == 0:
            if e <= 0:
                raise DivisionByZeroError("0 cannot be raised to a nonpositive power")
            return 0
        return self._exp[(self._log[a] * e) % self._order]

    def dot(self, u: Sequence[int], v: Sequence[int]) -> int:
        """Standard form sum(u_i v_i)."""
        if self.k == 1:
            return sum(x * y for x, y in zip(u, v)) % self.p
        total = 0
        for x, y in zip(u, v):
            if x and y:
                total = self.add(total, self.mul(x, y))
        return total

    # -- quadratic classes ------------------------------------------------

    def classify(self, a: int) -> int:
        """Square-table code of a: 0 zero, 1 square, 2 nonsquare."""
        return self._square_table[a]

    def is_square(self, a: int) -> bool:
        """True for nonzero squares only."""
        return self._square_table[a] == _SQUARE

    def is_nonsquare(self, a: int) -> bool:
        return self._square_table[a] == _NONSQUARE

    def sqrt(self, a: int) -> Optional[int]:
        """Least square root in canonical order, or None for nonsquares."""
        return self._roots.get(a)

    def least_nonsquare(self) -> int:
        for value in self._elements:
            if self._square_table[value] == _NONSQUARE:
                return value
        raise InternalError(f"F_{self.q} has no nonsquare")

    # -- identity ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldDescriptor):
            return NotImplemented
        return (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))

    def __str__(self) -> str:
        return f"{self.p}^{self.k}"

    def __repr__(self) -> str:
        return f"FieldDescriptor(p={self.p}, k={self.k}, modulus={self.modulus})"

    def element(self, value: int) -> "FqElement":
        return FqElement(self, value)


@dataclass(frozen=True)
class FqElement:
    """A field element with operator support.

    Prints as its packed integer, so the class of t in F_9 prints as 3.
    """

    field: FieldDescriptor
    value: int

    @property
    def coeffs(self) -> Tuple[int, ...]:
        return self.field.coeffs(self.value)

    def _check(self, other: "FqElement") -> None:
        if self.field != other.field:
            raise FieldMismatchError(f"Cannot combine F_{self.field} and F_{other.field}")

    def __add__(self, other: "FqElement") -> "FqElement":
        return field_arith(self, other, "add")

    def __sub__(self, other: "FqElement") -> "FqElement":
        return field_arith(self, other, "sub")

    def __mul__(self, other: "FqElement") -> "FqElement":
        return field_arith(self, other, "mul")

    def __truediv__(self, other: "FqElement") -> "FqElement":
        return field_arith(self, other, "div")

    def __neg__(self) -> "FqElement":
        return FqElement(self.field, self.field.neg(self.value))

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return str(self.value)


@lru_cache(maxsize=None)
def _cached_field(p: int, k: int) -> FieldDescriptor:
    logger = get_logger()
    modulus = least_irreducible(p, k)
    logger.debug(f"F_{p}^{k}: modulus {modulus}")
    return FieldDescriptor(p, k, modulus)


def make_field(p: int, k: int = 1, max_order: int = DEFAULT_MAX_ORDER) -> FieldDescriptor:
    """Build the field F_{p^k}.

    Args:
        p: Odd prime characteristic.
        k: Extension degree.
        max_order: Largest admissible field order.

    Returns:
        The (shared, immutable) FieldDescriptor.

    Raises:
        InvalidPrimeError: If p is even or not prime, or k < 1.
        BudgetExceededError: If p**k is above max_order.
    """
    if p % 2 == 0 or not is_prime(p):
        raise InvalidPrimeError(f"Characteristic must be an odd prime, got {p}")
    if k < 1:
        raise InvalidPrimeError(f"Extension degree must be positive, got {k}")
    if p**k > max_order:
        raise BudgetExceededError("field order", max_order, p**k)
    return _cached_field(p, k)


def field_of_order(q: int, max_order: int = DEFAULT_MAX_ORDER) -> FieldDescriptor:
    """Build F_q from its order."""
    split = prime_power(q)
    if split is None:
        raise InvalidPrimeError(f"{q} is not a prime power")
    return make_field(split[0], split[1], max_order)


def field_arith(a: FqElement, b: FqElement, op: str) -> FqElement:
    """Exact arithmetic on two elements of one field.

    Args:
        a: Left operand.
        b: Right operand.
        op: One of "add", "sub", "mul", "div".

    Raises:
        FieldMismatchError: If the operands live in different fields.
        DivisionByZeroError: On division by zero.
    """
    a._check(b)
    field = a.field
    if op == "add":
        value = field.add(a.value, b.value)
    elif op == "sub":
        value = field.sub(a.value, b.value)
    elif op == "mul":
        value = field.mul(a.value, b.value)
    elif op == "div":
        value = field.div(a.value, b.value)
    else:
        raise ValueError(f"Unknown field operation: {op}")
    return FqElement(field, value)


def quadratic_class(a: FqElement) -> QuadraticClass:
    """Zero, Square (a^((q-1)/2) = 1) or Nonsquare."""
    return _CLASS_BY_CODE[a.field.classify(a.value)]


def square_root(a: FqElement) -> Optional[FqElement]:
    """Least square root of a in canonical order, None for nonsquares."""
    root = a.field.sqrt(a.value)
    return None if root is None else FqElement(a.field, root)
