import pytest

from locuslab.errors import ConfigurationError
from locuslab.families import (
    FAMILIES,
    create_family,
    deformed_power_sum,
    family_names,
    make_coxeter,
    make_deformed_An,
    make_deformed_Cn,
)
from locuslab.scalar import FieldTower, adjoin_sqrt
from locuslab.symbolic import MultiPoly, Space


def printed(config):
    return [h.printed_normal() for h in config.hyperplanes]


def multiplicities(config):
    return [h.multiplicity for h in config.hyperplanes]


class TestCoxeter:
    def test_a2(self):
        config = make_coxeter("A", 2, 1)
        assert config.dimension == 3
        assert printed(config) == [("1", "-1", "0"), ("1", "0", "-1"), ("0", "1", "-1")]

    def test_dihedral_two_is_perpendicular_pair(self):
        config = make_coxeter("I2", 2, (2, 3))
        assert len(config) == 2
        assert config.gram_matrix()[0][1] == 0
        assert multiplicities(config) == [2, 3]

    def test_dihedral_three(self):
        config = make_coxeter("I2", 3, 2)
        assert len(config) == 3
        assert multiplicities(config) == [2, 2, 2]
        assert all(h.norm2() == 1 for h in config.hyperplanes)

    def test_dihedral_five_is_embedded(self):
        config = make_coxeter("I2", 5, 1)
        assert config.dimension == 3
        assert len(config) == 5
        assert all(h.norm2() == 1 for h in config.hyperplanes)

    def test_unsupported_dihedral(self):
        with pytest.raises(ConfigurationError):
            make_coxeter("I2", 7, 1)

    @pytest.mark.parametrize("family,rank,count", [("B", 2, 4), ("C", 3, 9), ("D", 3, 6), ("A", 3, 6)])
    def test_root_counts(self, family, rank, count):
        assert len(make_coxeter(family, rank, 1)) == count

    def test_orbit_count_mismatch(self):
        with pytest.raises(ConfigurationError):
            make_coxeter("B", 2, (1, 2, 3))

    def test_unknown_family(self):
        with pytest.raises(ConfigurationError):
            make_coxeter("E", 8)


class TestDeformed:
    def test_a2_with_m_one_is_a2(self):
        config = make_deformed_An(2, 1)
        assert printed(config) == [("1", "-1", "0"), ("1", "0", "-1"), ("0", "1", "-1")]

    def test_a2_with_m_two(self):
        config = make_deformed_An(2, 2)
        assert config.dimension == 3
        assert printed(config) == [("1", "-1", "0"), ("1", "0", "-r2"), ("0", "1", "-r2")]
        assert multiplicities(config) == [2, 1, 1]

    def test_negative_parameter(self):
        config = make_deformed_An(2, -2)
        assert multiplicities(config) == [1, 1, 1]
        assert printed(config)[1] == ("1", "0", "-i*r2")

    def test_degenerate_parameter(self):
        with pytest.raises(ConfigurationError):
            make_deformed_An(2, -1)

    def test_c2_classical(self):
        config = make_deformed_Cn(1, 1, 1)
        assert len(config) == 4
        assert multiplicities(config) == [1, 1, 1, 1]

    def test_c2_with_k_three(self):
        config = make_deformed_Cn(1, 1, 0)
        assert printed(config) == [("2", "0"), ("1", "r3"), ("1", "-r3")]
        assert multiplicities(config) == [1, 1, 1]

    def test_non_integral_k_rejected(self):
        with pytest.raises(ConfigurationError, match="integral"):
            make_deformed_Cn(2, 2, 1)

    def test_power_sum(self):
        space = Space.phase(3)
        tower = FieldTower()
        expected = MultiPoly.constant(space, tower, 0)
        for v in space.k_vars:
            expected = expected + MultiPoly.variable(space, tower, v) ** 3
        assert deformed_power_sum(2, 1, 3, space) == expected

    def test_power_sum_weight(self):
        space = Space.phase(3)
        p3 = deformed_power_sum(2, 2, 3, space)
        _, root = adjoin_sqrt(FieldTower(), 2)
        assert p3.coefficient((0, 0, 0, 0, 0, 3)) == root


class TestRegistry:
    def test_names(self):
        assert family_names() == sorted(FAMILIES)
        assert "deformed-a" in family_names()

    def test_create(self):
        family = create_family("coxeter-a", n=2, m=2)
        assert multiplicities(family.build()) == [2, 2, 2]
        assert family.describe() == {"family": "coxeter-a", "n": 2, "m": 2}

    def test_unknown(self):
        with pytest.raises(ConfigurationError, match="Unsupported generator"):
            create_family("coxeter-e")

    def test_odd_dihedral_single_orbit(self):
        with pytest.raises(ConfigurationError):
            create_family("coxeter-i2", p=3, m1=1, m2=2).build()

    def test_adler_moser_points(self):
        config = create_family("adler-moser-points", m=2, tau=1).build()
        assert config.dimension == 1
        assert len(config) == 3
        assert not config.is_linear
