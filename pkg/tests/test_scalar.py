from fractions import Fraction

import mpmath
import pytest
from hypothesis import given

from locuslab.errors import ScalarParseError, TowerMismatchError
from locuslab.scalar import FieldTower, adjoin_sqrt, embed_complex, format_scalar, parse_scalar

from .strategies import scalars


def sqrt_in(tower, d):
    return adjoin_sqrt(tower, d)[1]


class TestArithmetic:
    def test_rational_sum(self):
        tower = FieldTower()
        assert tower.scalar(Fraction(1, 2)) + tower.scalar(Fraction(1, 3)) == Fraction(5, 6)

    def test_radical_cancels(self):
        tower, r2 = adjoin_sqrt(FieldTower(), 2)
        assert not (r2 + (-r2))

    def test_conjugate_pair(self):
        tower = FieldTower()
        assert tower.scalar(1, 1) + tower.scalar(1, -1) == 2

    def test_defining_relations(self):
        tower, r2 = adjoin_sqrt(FieldTower(), 2)
        i = tower.i()
        assert i * i == -1
        assert r2 * r2 == 2

    def test_difference_of_squares(self):
        tower, r3 = adjoin_sqrt(FieldTower(), 3)
        assert (r3 + 1) * (1 - r3) == -2

    def test_inverses(self):
        tower, r5 = adjoin_sqrt(FieldTower(), 5)
        assert tower.scalar(1, 1).inv() == tower.scalar(Fraction(1, 2), Fraction(-1, 2))
        assert r5.inv() == r5 / 5
        assert tower.scalar(2).inv() == Fraction(1, 2)

    def test_norm(self):
        tower, r2 = adjoin_sqrt(FieldTower(), 2)
        tower, r3 = adjoin_sqrt(tower, 3)
        assert (r2 + 1).norm() == -1
        assert (r2 + r3).norm() == 1
        assert FieldTower().scalar(1, 1).norm() == FieldTower().scalar(1, 1)
        assert tower.scalar(1, 1).norm() == -4
        assert (r2 * r3 + 2).norm() == 4

    @given(scalars())
    def test_norm_is_gaussian(self, a):
        assert set(a.norm().coeffs) <= {0}

    def test_inverse_of_zero(self):
        with pytest.raises(ZeroDivisionError):
            FieldTower().zero().inv()

    @given(scalars(), scalars(), scalars())
    def test_distributive(self, a, b, c):
        assert a * (b + c) == a * b + a * c

    @given(scalars(), scalars())
    def test_commutative(self, a, b):
        assert a * b == b * a
        assert a + b == b + a

    @given(scalars(), scalars(), scalars())
    def test_associative(self, a, b, c):
        assert (a * b) * c == a * (b * c)

    @given(scalars(nonzero=True))
    def test_multiplicative_inverse(self, a):
        assert (a * a.inv()).is_one()

    @given(scalars(), scalars(nonzero=True))
    def test_division_round_trip(self, a, b):
        assert (a / b) * b == a

    @given(scalars())
    def test_equal_scalars_hash_alike(self, a):
        copy = a + 0
        assert copy == a
        assert hash(copy) == hash(a)


class TestAdjoinSqrt:
    def test_perfect_square(self):
        tower = FieldTower()
        extended, root = adjoin_sqrt(tower, 4)
        assert extended == tower
        assert root == 2

    def test_square_extraction(self):
        tower = FieldTower([2])
        extended, root = adjoin_sqrt(tower, 8)
        assert extended == tower
        assert root == sqrt_in(tower, 2) * 2

    def test_multiplicative_dependence(self):
        tower = FieldTower([2, 3])
        extended, root = adjoin_sqrt(tower, 6)
        assert extended == tower
        assert root == sqrt_in(tower, 2) * sqrt_in(tower, 3)

    def test_negative_radicand_uses_i(self):
        tower, root = adjoin_sqrt(FieldTower(), -2)
        assert root * root == -2
        assert tower.radicands == (2,)

    def test_rational_radicand(self):
        tower, root = adjoin_sqrt(FieldTower(), Fraction(1, 2))
        assert root * root == Fraction(1, 2)

    def test_dependent_radicands_rejected(self):
        with pytest.raises(ValueError):
            FieldTower([2, 3, 6])

    def test_incompatible_towers(self):
        _, r2 = adjoin_sqrt(FieldTower(), 2)
        _, r3 = adjoin_sqrt(FieldTower(), 3)
        with pytest.raises(TowerMismatchError):
            r2 + r3

    def test_lift_to_larger_tower(self):
        _, r2 = adjoin_sqrt(FieldTower(), 2)
        big = FieldTower([2, 3])
        assert r2.lift(big) == sqrt_in(big, 2)
        assert r2 == sqrt_in(big, 2)


class TestEmbedding:
    def test_rational(self):
        assert embed_complex(FieldTower().scalar(Fraction(1, 2))) == mpmath.mpc(0.5, 0)

    def test_i(self):
        assert embed_complex(FieldTower().i()) == mpmath.mpc(0, 1)

    def test_sqrt2(self):
        _, r2 = adjoin_sqrt(FieldTower(), 2)
        with mpmath.workprec(256):
            value = embed_complex(r2, 256)
            assert abs(value - mpmath.sqrt(2)) < mpmath.mpf(2) ** -250

    def test_precision_floor(self):
        with pytest.raises(ValueError):
            embed_complex(FieldTower().one(), 16)


class TestLiterals:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("1/2 + 3/4*i", "1/2 + 3/4*i"),
            ("-2*r3", "-2*r3"),
            ("r2*r3", "r6"),
            ("(1 + r2)**2", "3 + 2*r2"),
            ("0", "0"),
        ],
    )
    def test_round_trip_printing(self, text, expected):
        _, value = parse_scalar(text)
        assert format_scalar(value) == expected

    @pytest.mark.parametrize("text", ["", "1 +", "x", "r", "2(3)", "i2", "sqrt(2)"])
    def test_malformed(self, text):
        with pytest.raises(ScalarParseError):
            parse_scalar(text)

    def test_parse_extends_tower(self):
        tower, value = parse_scalar("r5", FieldTower([2]))
        assert tower.radicands == (2, 5)
        assert value * value == 5
