"""
Tests for finite field arithmetic.
"""

import pytest

from orthoverify.errors import (
    BudgetExceededError,
    DivisionByZeroError,
    FieldMismatchError,
    InvalidPrimeError,
)
from orthoverify.gf import (
    QuadraticClass,
    field_arith,
    field_of_order,
    least_irreducible,
    make_field,
    quadratic_class,
    square_root,
)

ORDERS = [(3, 1), (5, 1), (13, 1), (3, 2), (5, 2), (3, 3), (7, 2), (11, 2)]


class TestMakeField:
    """Test field construction."""

    def test_prime_field(self):
        """Test F_5 has -1 a square."""
        f = make_field(5)
        assert f.q == 5
        assert f.minus_one_is_square

    def test_extension_field(self):
        """Test F_9 has -1 a square."""
        f = make_field(3, 2)
        assert f.q == 9
        assert f.minus_one_is_square

    def test_three_mod_four(self):
        """Test F_7 has -1 a nonsquare."""
        assert not make_field(7).minus_one_is_square

    def test_least_modulus_of_f9(self):
        """Test the modulus of F_9 is t^2 + 1."""
        assert make_field(3, 2).modulus == (1, 0, 1)

    def test_least_modulus_of_f25(self):
        """Test t^2 + 1 splits over Z_5, so t^2 + t + 1 is chosen."""
        assert least_irreducible(5, 2) == (1, 1, 1)

    def test_deterministic(self):
        """Test two constructions share one modulus."""
        assert make_field(3, 3).modulus == make_field(3, 3).modulus
        assert make_field(3, 3) is make_field(3, 3)

    @pytest.mark.parametrize("p", [2, 4, 9, 15, 1])
    def test_bad_characteristic(self, p):
        """Test even or composite characteristics are rejected."""
        with pytest.raises(InvalidPrimeError):
            make_field(p)

    def test_order_budget(self):
        """Test field orders above the bound are rejected."""
        with pytest.raises(BudgetExceededError):
            make_field(3, 13, max_order=1000)

    def test_field_of_order(self):
        """Test fields built from their order."""
        assert field_of_order(25) is make_field(5, 2)
        with pytest.raises(InvalidPrimeError):
            field_of_order(15)

    def test_str(self):
        """Test fields print as p^k."""
        assert str(make_field(3, 2)) == "3^2"


class TestArithmetic:
    """Test exact arithmetic."""

    def test_t_squared_in_f9(self):
        """Test t * t = 2 in F_9 (t packs to 3)."""
        f = make_field(3, 2)
        assert f.mul(3, 3) == 2
        assert str(f.element(3)) == "3"

    def test_prime_field_operations(self):
        """Test 3 + 4 = 2 in F_5 and 1 / 2 = 7 in F_13."""
        f5, f13 = make_field(5), make_field(13)
        assert field_arith(f5.element(3), f5.element(4), "add").value == 2
        assert (f13.element(1) / f13.element(2)).value == 7

    def test_division_by_zero(self):
        """Test dividing by zero raises."""
        f = make_field(3, 2)
        with pytest.raises(DivisionByZeroError):
            f.inv(0)
        with pytest.raises(DivisionByZeroError):
            f.element(1) / f.element(0)

    def test_field_mismatch(self):
        """Test elements of different fields cannot be combined."""
        with pytest.raises(FieldMismatchError):
            make_field(5).element(1) + make_field(13).element(1)

    @pytest.mark.parametrize("p,k", [(3, 2), (5, 2)])
    def test_distributive(self, p, k):
        """Test a(b + c) = ab + ac exhaustively in small extension fields."""
        f = make_field(p, k)
        for a in f.elements():
            for b in f.elements():
                for c in f.elements():
                    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))

    @pytest.mark.parametrize("p,k", ORDERS)
    def test_inverses(self, p, k):
        """Test a * a^-1 = 1 and a - a = 0."""
        f = make_field(p, k)
        for a in f.nonzero_elements():
            assert f.mul(a, f.inv(a)) == 1
            assert f.sub(a, a) == 0

    @pytest.mark.parametrize("p,k", [(3, 2), (5, 2), (3, 3)])
    def test_tables_agree_with_field_class(self, p, k):
        """Test table arithmetic matches the galois field class on every pair."""
        f = make_field(p, k)
        for a in f.elements():
            for b in f.elements():
                assert f.add(a, b) == int(f.GF(a) + f.GF(b))
                assert f.mul(a, b) == int(f.GF(a) * f.GF(b))

    def test_pack_round_trip(self):
        """Test coefficient packing is base p, low degree first."""
        f = make_field(3, 2)
        assert f.pack((0, 1)) == 3
        assert f.coeffs(5) == (2, 1)


class TestQuadraticClass:
    """Test quadratic classes and square roots."""

    def test_examples_in_f13(self):
        """Test 4 is a square, 2 a nonsquare and 0 zero in F_13."""
        f = make_field(13)
        assert quadratic_class(f.element(4)) is QuadraticClass.SQUARE
        assert quadratic_class(f.element(2)) is QuadraticClass.NONSQUARE
        assert quadratic_class(f.element(0)) is QuadraticClass.ZERO

    def test_square_root_is_least(self):
        """Test the root of 12 in F_13 is 5, not 8."""
        f = make_field(13)
        assert square_root(f.element(12)).value == 5
        assert square_root(f.element(2)) is None
        assert square_root(f.element(0)).value == 0

    @pytest.mark.parametrize("p,k", ORDERS)
    def test_half_are_squares(self, p, k):
        """Test exactly (q - 1)/2 nonzero squares and nonsquares."""
        f = make_field(p, k)
        squares = sum(1 for a in f.elements() if f.is_square(a))
        nonsquares = sum(1 for a in f.elements() if f.is_nonsquare(a))
        assert squares == nonsquares == (f.q - 1) // 2

    @pytest.mark.parametrize("p,k", ORDERS)
    def test_roots_square_back(self, p, k):
        """Test sqrt(a)^2 = a whenever a root exists."""
        f = make_field(p, k)
        for a in f.elements():
            root = f.sqrt(a)
            if root is not None:
                assert f.mul(root, root) == a

    @pytest.mark.parametrize("p,k", [(5, 1), (13, 1), (3, 2), (5, 2)])
    def test_product_classes(self, p, k):
        """Test square * nonsquare is a nonsquare and nonsquare^2 a square."""
        f = make_field(p, k)
        for a in f.nonzero_elements():
            for b in f.nonzero_elements():
                same = f.is_square(a) == f.is_square(b)
                assert f.is_square(f.mul(a, b)) == same

    @pytest.mark.parametrize("p,k", ORDERS)
    def test_euler_criterion(self, p, k):
        """Test a is a square iff a^((q-1)/2) = 1."""
        f = make_field(p, k)
        for a in f.nonzero_elements():
            assert f.is_square(a) == (f.power(a, (f.q - 1) // 2) == 1)

    def test_least_nonsquare(self):
        """Test the least nonsquare of F_13 is 2."""
        assert make_field(13).least_nonsquare() == 2
