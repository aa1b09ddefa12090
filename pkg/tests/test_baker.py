from math import factorial

import pytest

from locuslab.baker import (
    SchrodingerOp,
    asymptotic_check,
    berest_psi,
    degree_ledger_check,
    dual_operator_check,
    is_quasi_invariant,
    operator_from_ad_formula,
    potential_from_config,
    trivial_monodromy_check,
    verify_ba_axioms,
    verify_bispectral,
    verify_commutativity,
    verify_eigen,
    verify_operator_eigen,
    verify_symmetry,
)
from locuslab.configuration import Configuration
from locuslab.errors import ConfigurationError, MonodromyError, NonTerminating
from locuslab.families import make_coxeter, make_deformed_An
from locuslab.scalar import FieldTower
from locuslab.symbolic import K_BLOCK, LinearForm, MultiPoly, RationalFn

TOWER = FieldTower()


def point():
    return Configuration.build(1, [([1], 0, 1)])


def two_parallel_points():
    return Configuration.build(1, [([1], 0, 1), ([1], -1, 1)])


def power_sum(space, degree):
    total = MultiPoly.constant(space, TOWER, 0)
    for v in space.k_vars:
        total = total + MultiPoly.variable(space, TOWER, v) ** degree
    return total


class TestOnePoint:
    @pytest.fixture
    def psi(self):
        return berest_psi(point())

    def test_prefactor(self, psi):
        space = psi.space
        x, k = (LinearForm.from_poly(MultiPoly.variable(space, TOWER, v)) for v in (0, 1))
        expected = RationalFn.constant(space, TOWER, 1) - RationalFn.inverse_power(x, 1).divide_by(k)
        assert psi.M == 1
        assert psi.prefactor == expected
        assert psi.A == MultiPoly.variable(space, TOWER, 1)

    def test_properties(self, psi):
        op = potential_from_config(point())
        assert verify_eigen(psi, op)
        assert verify_symmetry(psi)
        assert verify_bispectral(psi)
        assert verify_ba_axioms(psi).passed
        assert asymptotic_check(psi).passed
        assert degree_ledger_check(psi).passed

    def test_probabilistic_mode(self, psi):
        assert verify_eigen(psi, potential_from_config(point()), "probabilistic", seed=3)

    def test_document(self, psi):
        doc = psi.to_document()
        assert doc["M"] == 1
        assert doc["config"]["dimension"] == 1


class TestTermination:
    def test_parallel_points_do_not_terminate(self):
        with pytest.raises(NonTerminating) as excinfo:
            berest_psi(two_parallel_points())
        assert excinfo.value.steps == 2
        assert excinfo.value.phi

    def test_perturbed_a2(self):
        with pytest.raises(NonTerminating):
            berest_psi(make_coxeter("A", 2, 1).replaced(0, [1, "1/2", "-3/2"]))

    def test_affine_point_terminates(self):
        psi = berest_psi(Configuration.build(1, [([1], 1, 1)]))
        assert psi.M == 1
        with pytest.raises(ConfigurationError):
            verify_symmetry(psi)


def leading_k_component(psi):
    return max(psi.phi.homogeneous_components(K_BLOCK), key=lambda item: item[0])


@pytest.mark.slow
class TestCoxeterPsi:
    @pytest.fixture(scope="class")
    def a2(self):
        return berest_psi(make_coxeter("A", 2, 1))

    @pytest.fixture(scope="class")
    def deformed_a2(self):
        return berest_psi(make_deformed_An(2, 2))

    def test_a2(self, a2):
        assert a2.M == 3
        assert verify_eigen(a2, potential_from_config(a2.config))
        assert verify_symmetry(a2)
        assert verify_bispectral(a2)
        assert verify_ba_axioms(a2).passed
        assert asymptotic_check(a2).passed
        assert degree_ledger_check(a2).passed

    def test_a2_leading_term(self, a2):
        degree, top = leading_k_component(a2)
        assert degree == 3
        assert top == a2.A.scale((-2) ** 3 * factorial(3))

    def test_deformed_a2(self, deformed_a2):
        assert deformed_a2.M == 4
        assert verify_eigen(deformed_a2, potential_from_config(deformed_a2.config))
        assert asymptotic_check(deformed_a2).passed

    def test_deformed_a2_axioms(self, deformed_a2):
        report = verify_ba_axioms(deformed_a2)
        assert report.passed
        # multiplicity 2 on e1 - e2 gives orders 1 and 3 there
        assert [c.detail["order"] for c in report.checks if c.detail["hyperplane"] == 0] == [1, 3]

    def test_deformed_a2_symmetric_and_bispectral(self, deformed_a2):
        assert verify_symmetry(deformed_a2)
        assert verify_bispectral(deformed_a2)

    def test_deformed_a2_leading_term(self, deformed_a2):
        degree, top = leading_k_component(deformed_a2)
        assert degree == 4
        assert top == deformed_a2.A.scale((-2) ** 4 * factorial(4))
        assert degree_ledger_check(deformed_a2).passed


class TestQuasiInvariants:
    def test_a2(self):
        config = make_coxeter("A", 2, 1)
        space = config.phase_space()
        assert is_quasi_invariant(power_sum(space, 2), config)
        assert is_quasi_invariant(power_sum(space, 3), config)
        assert not is_quasi_invariant(MultiPoly.variable(space, TOWER, space.k_vars[0]), config)

    def test_affine_rejected(self):
        config = two_parallel_points()
        with pytest.raises(ConfigurationError):
            is_quasi_invariant(power_sum(config.phase_space(), 2), config)


class TestCommutingOperators:
    def test_free_laplacian(self):
        config = point()
        space = config.phase_space()
        free = SchrodingerOp(config, RationalFn.constant(space, TOWER, 0))
        operator = operator_from_ad_formula(free, power_sum(space, 2))
        assert list(operator.terms) == [(2,)]
        assert operator.terms[(2,)] == 1

    def test_one_point_energy(self):
        config = point()
        op = potential_from_config(config)
        psi = berest_psi(config)
        f = power_sum(config.phase_space(), 2)
        operator = operator_from_ad_formula(op, f)
        assert operator.order == 2
        assert verify_operator_eigen(psi, operator, f)
        assert verify_commutativity(operator, op)
        assert dual_operator_check(psi, op, f)

    def test_non_homogeneous_rejected(self):
        config = point()
        space = config.phase_space()
        f = power_sum(space, 2) + MultiPoly.variable(space, TOWER, 1)
        with pytest.raises(ValueError):
            operator_from_ad_formula(potential_from_config(config), f)

    @pytest.mark.slow
    def test_a2_cubic(self):
        config = make_coxeter("A", 2, 1)
        op = potential_from_config(config)
        psi = berest_psi(config)
        f = power_sum(config.phase_space(), 3)
        operator = operator_from_ad_formula(op, f)
        assert operator.order == 3
        assert verify_operator_eigen(psi, operator, f, mode="probabilistic", seed=9)
        assert verify_commutativity(operator, op)


class TestMonodromy:
    def test_a2(self):
        op = potential_from_config(make_coxeter("A", 2, 1))
        reports = [trivial_monodromy_check(op, index) for index in range(3)]
        assert all(r.passed and r.m == 1 for r in reports)

    def test_hyperplane_given_by_form(self):
        op = potential_from_config(make_coxeter("A", 2, 1))
        x = [MultiPoly.variable(op.space, TOWER, v) for v in op.space.x_vars]
        report = trivial_monodromy_check(op, LinearForm.from_poly((x[1] - x[2]).scale(2)))
        assert report.hyperplane == 2
        assert report.passed and report.m == 1
        with pytest.raises(ConfigurationError):
            trivial_monodromy_check(op, LinearForm.from_poly(x[0]))

    def test_deformed_multiplicity(self):
        op = potential_from_config(make_deformed_An(2, 2))
        assert trivial_monodromy_check(op, 0).m == 2

    def test_parallel_points(self):
        op = potential_from_config(two_parallel_points())
        report = trivial_monodromy_check(op, 0)
        assert not report.passed
        assert report.to_dict()["failing_orders"] == [1]

    def test_bad_leading_coefficient(self):
        config = point()
        space = config.phase_space()
        potential = RationalFn.inverse_power(config.form(0, space), 2, 3)
        with pytest.raises(MonodromyError):
            trivial_monodromy_check(SchrodingerOp(config, potential), 0)


def test_report_render():
    report = verify_ba_axioms(berest_psi(point()))
    text = report.render()
    assert text.startswith("Verdict: PASS")
    assert "axiom: ok" in text
