import pytest

from locuslab.baker import berest_psi
from locuslab.configuration import Configuration, isotropic_projectivisation, orthogonal_union
from locuslab.errors import ConfigurationError, NonTerminating
from locuslab.families import make_coxeter, make_deformed_An, make_deformed_Cn
from locuslab.locus import (
    LocusReport,
    large_multiplicity_coxeter_check,
    locus_residual,
    structure_check_affine,
    verify_affine_locus,
    verify_linear_locus,
    verify_locus,
    verify_via_2d_decomposition,
)
from locuslab.onedim import adler_moser_tau, pole_configuration
from locuslab.scalar import FieldTower, parse_scalar


def two_parallel_points():
    return Configuration.build(1, [([1], 0, 1), ([1], -1, 1)])


def perturbed_a2():
    return make_coxeter("A", 2, 1).replaced(0, [1, "1/2", "-3/2"])


def three_lines_instance():
    tower, a = parse_scalar("2*i")
    tower, b = parse_scalar("i + r2", tower)
    return Configuration.build(2, [([1, a], 0, 1), ([1, b], 0, 1), ([0, 1], 0, 1)], tower)


def adler_moser_points():
    return pole_configuration(adler_moser_tau(2, 1))


def family(build, name, slow=False):
    return pytest.param(build, id=name, marks=[pytest.mark.slow] if slow else [])


LOCUS_FAMILY = [
    family(lambda: make_coxeter("A", 2, 1), "A2"),
    family(lambda: make_coxeter("A", 2, 2), "A2-m2"),
    family(lambda: make_coxeter("A", 2, 3), "A2-m3", slow=True),
    family(lambda: make_coxeter("A", 3, 1), "A3"),
    family(lambda: make_coxeter("I2", 2, 1), "I2(2)"),
    family(lambda: make_coxeter("I2", 3, 1), "I2(3)"),
    family(lambda: make_coxeter("I2", 4, (1, 2)), "I2(4)"),
    family(lambda: make_coxeter("I2", 5, 1), "I2(5)"),
    family(lambda: make_coxeter("I2", 6, 1), "I2(6)"),
    family(lambda: make_coxeter("B", 2, (1, 1)), "B2-11"),
    family(lambda: make_coxeter("B", 2, (1, 2)), "B2-12"),
    family(lambda: make_coxeter("B", 2, (2, 1)), "B2-21"),
    family(lambda: make_coxeter("B", 2, (2, 2)), "B2-22"),
    family(lambda: make_deformed_An(2, 1), "A2(1)"),
    family(lambda: make_deformed_An(2, 2), "A2(2)"),
    family(lambda: make_deformed_An(2, 3), "A2(3)"),
    family(lambda: make_deformed_An(2, 4), "A2(4)", slow=True),
    family(lambda: make_deformed_An(3, 2), "A3(2)", slow=True),
    family(lambda: make_deformed_Cn(1, 1, 0), "C2(1,0)"),
    family(lambda: make_deformed_Cn(1, 0, 1), "C2(0,1)"),
    family(lambda: make_deformed_Cn(1, 2, 1), "C2(2,1)"),
    family(lambda: make_deformed_Cn(1, 1, 1), "C2(1,1)"),
    family(three_lines_instance, "three-lines"),
]

NON_LOCUS = [
    family(perturbed_a2, "perturbed-A2"),
    family(two_parallel_points, "parallel-points"),
]


class TestLinearLocus:
    @pytest.mark.parametrize("build", LOCUS_FAMILY)
    def test_family_passes(self, build):
        report = verify_linear_locus(build())
        assert report.passed, report.render()

    def test_single_hyperplane(self):
        report = verify_linear_locus(Configuration.build(2, [([1, 1], 0, 4)]))
        assert report.passed
        assert [item.j for item in report.items] == [1, 2, 3, 4]

    def test_perturbed_a2_fails_at_first_equation(self):
        report = verify_linear_locus(perturbed_a2())
        assert not report.passed
        failing = {(item.hyperplane, item.j) for item in report.failures()}
        assert (0, 1) in failing
        assert all(item.residual != "0" for item in report.failures())

    def test_affine_input_rejected(self):
        with pytest.raises(ConfigurationError):
            verify_linear_locus(two_parallel_points())

    def test_residual_is_a_function(self):
        residual = locus_residual(perturbed_a2(), 0, 1)
        assert not residual.is_zero()
        assert residual.space.names == ("t1", "t2")

    def test_probabilistic_mode_agrees(self):
        assert verify_linear_locus(make_deformed_An(2, 2), "probabilistic", seed=11).passed
        assert not verify_linear_locus(perturbed_a2(), "probabilistic", seed=11).passed

    def test_parallel_jobs(self):
        serial = verify_linear_locus(make_coxeter("A", 2, 2))
        parallel = verify_linear_locus(make_coxeter("A", 2, 2), jobs=2)
        assert [i.to_dict() for i in serial.items] == [i.to_dict() for i in parallel.items]


class TestAffineLocus:
    def test_adler_moser_points(self):
        assert verify_affine_locus(adler_moser_points()).passed

    def test_two_parallel_points_fail(self):
        report = verify_affine_locus(two_parallel_points())
        assert not report.passed
        assert {item.hyperplane for item in report.failures()} == {0, 1}

    def test_orthogonal_union_passes(self):
        points = adler_moser_points()
        assert verify_affine_locus(orthogonal_union(points, points)).passed

    def test_projectivisation_is_linear_locus(self):
        assert verify_linear_locus(isotropic_projectivisation(adler_moser_points())).passed

    def test_dispatch(self):
        assert verify_locus(adler_moser_points()).passed
        assert verify_locus(make_coxeter("A", 2, 1)).passed


class TestInvariance:
    @pytest.mark.parametrize("build", [lambda: make_coxeter("A", 2, 1), lambda: make_deformed_Cn(1, 1, 0)])
    def test_permutation_and_rescaling(self, build):
        config = build()
        assert verify_linear_locus(config.permuted(list(reversed(range(len(config)))))).passed
        assert verify_linear_locus(config.rescaled(0, 3)).passed

    def test_rotation_of_a2(self):
        tower, half_root = parse_scalar("1/2*r2")
        rotation = [[half_root, -half_root, 0], [half_root, half_root, 0], [0, 0, 1]]
        assert verify_linear_locus(make_coxeter("A", 2, 1).transformed(rotation)).passed

    def test_rotation_of_c2(self):
        _, half = parse_scalar("1/2")
        _, root = parse_scalar("1/2*r3")
        rotation = [[half, -root], [root, half]]
        assert verify_linear_locus(make_deformed_Cn(1, 1, 0).transformed(rotation)).passed

    def test_negative_control_stays_negative(self):
        assert not verify_linear_locus(perturbed_a2().permuted([2, 1, 0])).passed


class TestPlaneDecomposition:
    @pytest.mark.parametrize("build", LOCUS_FAMILY + NON_LOCUS[:1])
    def test_agrees_with_direct_check(self, build):
        config = build()
        assert verify_via_2d_decomposition(config).passed == verify_linear_locus(config).passed

    def test_a3_examines_seven_planes(self):
        report = verify_via_2d_decomposition(make_coxeter("A", 3, 1))
        assert report.passed
        assert report.planes_examined == 7


@pytest.mark.slow
class TestTerminationMatchesLocus:
    @pytest.mark.parametrize("build", LOCUS_FAMILY + NON_LOCUS)
    def test_psi_terminates_exactly_on_locus(self, build):
        config = build()
        try:
            berest_psi(config)
            terminates = True
        except NonTerminating:
            terminates = False
        assert terminates == verify_locus(config).passed
        assert terminates == (build not in (perturbed_a2, two_parallel_points))


class TestLargeMultiplicity:
    def test_deformed_a2(self):
        check = large_multiplicity_coxeter_check(make_deformed_An(2, 2))
        assert check.large == [0]
        assert check.passed

    def test_all_large(self):
        check = large_multiplicity_coxeter_check(make_coxeter("A", 2, 2))
        assert check.large == [0, 1, 2]
        assert check.passed

    def test_vacuous(self):
        check = large_multiplicity_coxeter_check(three_lines_instance())
        assert check.large == []
        assert check.to_dict() == {"pass": True, "large": [], "counterexamples": []}


class TestStructureCheck:
    def test_shifted_a2_single_flat(self):
        report = structure_check_affine(make_coxeter("A", 2, 1).translated([1, 0, 0]))
        assert report.passed
        assert [members for members, _ in report.flats] == [(0, 1, 2)]
        assert report.parallel_classes == []

    def test_orthogonal_union_of_points(self):
        points = adler_moser_points()
        report = structure_check_affine(orthogonal_union(points, points))
        assert report.passed
        assert len(report.flats) == 9
        assert all(len(members) == 2 for members, _ in report.flats)
        assert sorted(members for members, _ in report.parallel_classes) == [(0, 1, 2), (3, 4, 5)]

    def test_parallel_class_failure_is_remapped(self):
        config = Configuration.build(2, [([1, 0], 0, 1), ([1, 0], -1, 1), ([0, 1], 0, 1)])
        report = structure_check_affine(config)
        assert not report.passed
        (members, sub), = report.parallel_classes
        assert members == (0, 1)
        assert {item.hyperplane for item in sub.failures()} == {0, 1}


class TestReport:
    def test_dict_and_back(self):
        report = verify_linear_locus(perturbed_a2())
        doc = report.to_dict()
        assert doc["pass"] is False
        assert list(doc["items"][0]) == ["hyperplane", "j", "residual", "mode"]
        assert LocusReport.from_dict(doc).passed is False

    def test_render(self):
        text = verify_affine_locus(two_parallel_points()).render()
        assert text.startswith("Locus verdict: FAIL")
        assert "residual:" in text


def test_tower_of_three_lines_instance():
    assert three_lines_instance().tower == FieldTower([2])
