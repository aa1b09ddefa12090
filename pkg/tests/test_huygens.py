import pytest

from locuslab.baker import berest_psi
from locuslab.configuration import Configuration
from locuslab.errors import ConfigurationError
from locuslab.families import make_coxeter
from locuslab.huygens import (
    HadamardChain,
    affine_hadamard_via_projectivisation,
    bi_homogeneity_check,
    certify_chain,
    chain_space,
    chain_symmetry_check,
    diagonal_regularity_check,
    hadamard_from_psi,
    huygens_certificate,
    verify_hadamard_chain,
)
from locuslab.onedim import adler_moser_tau, pole_configuration
from locuslab.scalar import FieldTower
from locuslab.symbolic import LinearForm, MultiPoly, RationalFn

TOWER = FieldTower()


def point(offset=0):
    return Configuration.build(1, [([1], offset, 1)])


def chain_forms(offset=0):
    space = chain_space(1)
    x, xi = (MultiPoly.variable(space, TOWER, v) for v in (0, 1))
    return space, LinearForm.from_poly(x + offset), LinearForm.from_poly(xi + offset)


class TestLinearChain:
    def test_one_point(self):
        chain = hadamard_from_psi(berest_psi(point()))
        space, x, xi = chain_forms()
        assert chain.M == 1
        assert chain.space.names == ("x1", "xi1")
        assert chain.coefficients[0] == 1
        assert chain.coefficients[1] == RationalFn.inverse_power(x, 1, -1).divide_by(xi)

    def test_one_point_properties(self):
        chain = hadamard_from_psi(berest_psi(point()))
        assert verify_hadamard_chain(chain).passed
        assert chain_symmetry_check(chain).passed
        assert bi_homogeneity_check(chain).passed
        assert diagonal_regularity_check(chain, seed=4).passed

    def test_certificate(self):
        certificate = huygens_certificate(point())
        assert certificate.minimal_N == 5
        assert certificate.terminates
        assert certificate.chain_verified
        assert list(certificate.to_dict()) == ["M", "minimal_N", "terminates", "chain_verified", "coefficients"]

    def test_broken_chain_fails(self):
        chain = hadamard_from_psi(berest_psi(point()))
        chain.coefficients[1] = chain.coefficients[1] * 2
        report = verify_hadamard_chain(chain)
        assert not report.passed
        assert {c.detail["nu"] for c in report.checks if not c.passed} >= {1}

    def test_rows_per_step(self):
        report = verify_hadamard_chain(hadamard_from_psi(berest_psi(point())))
        assert [(c.name, c.detail["nu"]) for c in report.checks] == [
            ("transport", 1), ("hadamard", 1), ("transport", 2), ("hadamard", 2),
        ]

    def test_truncated_chain_not_certified(self):
        chain = hadamard_from_psi(berest_psi(point()))
        certificate = certify_chain(HadamardChain(chain.potential, chain.coefficients[:1]))
        assert not certificate.terminates
        assert not certificate.chain_verified
        assert certificate.to_dict()["terminates"] is False

    def test_affine_psi_rejected(self):
        with pytest.raises(ConfigurationError):
            hadamard_from_psi(berest_psi(point(1)))

    @pytest.mark.slow
    def test_a2(self):
        certificate = huygens_certificate(make_coxeter("A", 2, 1), "probabilistic", seed=2)
        assert certificate.chain.M == 3
        assert certificate.minimal_N == 9
        assert certificate.chain_verified
        assert bi_homogeneity_check(certificate.chain).passed


class TestAffineChain:
    def test_shifted_point(self):
        chain = affine_hadamard_via_projectivisation(point(1))
        _, x, xi = chain_forms(1)
        assert not chain.linear
        assert chain.M == 1
        assert chain.coefficients[1] == RationalFn.inverse_power(x, 1, -1).divide_by(xi)
        assert verify_hadamard_chain(chain).passed

    def test_transport_checked_on_projectivised_chain(self):
        chain = affine_hadamard_via_projectivisation(point(1))
        assert chain.lifted.linear
        assert chain.lifted.M == chain.M
        report = verify_hadamard_chain(chain)
        assert report.passed
        assert [c.detail for c in report.checks if c.name == "transport"] == [
            {"nu": 1, "chain": "projectivised"}, {"nu": 2, "chain": "projectivised"},
        ]
        assert [c.detail for c in report.checks if c.name == "hadamard"] == [{"nu": 1}, {"nu": 2}]

    def test_certificate(self):
        certificate = huygens_certificate(point(1))
        assert certificate.terminates
        assert certificate.chain_verified
        assert certificate.minimal_N == 5

    def test_properties_need_linear_chain(self):
        chain = affine_hadamard_via_projectivisation(point(1))
        with pytest.raises(ConfigurationError):
            bi_homogeneity_check(chain)
        with pytest.raises(ConfigurationError):
            chain_symmetry_check(chain)

    @pytest.mark.slow
    def test_adler_moser_points(self):
        certificate = huygens_certificate(pole_configuration(adler_moser_tau(2, 1)), "probabilistic", seed=8)
        assert certificate.chain.M == 3
        assert certificate.minimal_N == 9
        assert certificate.chain_verified
