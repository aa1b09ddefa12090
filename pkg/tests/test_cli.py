import json

import pytest

from locuslab.cli import EXIT_FAILED, EXIT_INPUT, EXIT_OK, run

POINT = {"dimension": 1, "hyperplanes": [{"normal": ["1"], "offset": "0", "multiplicity": 1}]}
TWO_POINTS = {
    "dimension": 1,
    "hyperplanes": [
        {"normal": ["1"], "offset": "0", "multiplicity": 1},
        {"normal": ["1"], "offset": "-1", "multiplicity": 1},
    ],
}


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("LOCUSLAB_SEED", "LOCUSLAB_MODE", "LOCUSLAB_JOBS", "LOCUSLAB_PRECISION", "LOCUSLAB_DEBUG"):
        monkeypatch.delenv(name, raising=False)


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(path)


def output(capsys):
    return json.loads(capsys.readouterr().out)


class TestVerify:
    def test_generated_family_passes(self, tmp_path, capsys):
        target = str(tmp_path / "a2.json")
        assert run(["generate", "coxeter-a", "--n", "2", "--m", "1", "--out", target]) == EXIT_OK
        assert run(["verify", "--in", target]) == EXIT_OK
        doc = output(capsys)
        assert doc["pass"] is True
        assert list(doc["items"][0]) == ["hyperplane", "j", "mode", "residual"]

    def test_parallel_points_fail(self, tmp_path, capsys):
        assert run(["verify", "--in", write(tmp_path, "two.json", TWO_POINTS)]) == EXIT_FAILED
        assert output(capsys)["pass"] is False

    def test_probabilistic_records_seed(self, tmp_path, capsys):
        assert run(["verify", "--in", write(tmp_path, "p.json", POINT), "--mode", "probabilistic",
                    "--seed", "17"]) == EXIT_OK
        assert output(capsys)["seed"] == 17

    def test_environment_seed_wins(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("LOCUSLAB_SEED", "99")
        run(["verify", "--in", write(tmp_path, "p.json", POINT), "--mode", "probabilistic", "--seed", "17"])
        assert output(capsys)["seed"] == 99

    def test_missing_input(self, capsys):
        assert run(["verify"]) == EXIT_INPUT
        assert "--in FILE is required" in capsys.readouterr().err

    def test_malformed_literal(self, tmp_path):
        doc = {"dimension": 1, "hyperplanes": [{"normal": ["2(3)"]}]}
        assert run(["verify", "--in", write(tmp_path, "bad.json", doc)]) == EXIT_INPUT

    def test_structure_method(self, tmp_path, capsys):
        assert run(["verify", "--in", write(tmp_path, "two.json", TWO_POINTS), "--method", "structure"]) == EXIT_FAILED
        assert output(capsys)["pass"] is False


def plane(normal, multiplicity=1):
    return {"multiplicity": multiplicity, "normal": normal, "offset": "0"}


def golden(dimension, tower, planes):
    return json.dumps({"dimension": dimension, "hyperplanes": planes, "tower": tower}, indent=2) + "\n"


class TestGenerate:
    @pytest.mark.parametrize("argv,expected", [
        (["coxeter-a", "--n", "2"],
         golden(3, [], [plane(["0", "1", "-1"]), plane(["1", "-1", "0"]), plane(["1", "0", "-1"])])),
        (["coxeter-b", "--n", "2"],
         golden(2, [], [plane(["0", "1"]), plane(["1", "-1"]), plane(["1", "0"]), plane(["1", "1"])])),
        (["deformed-a", "--n", "2", "--m", "2"],
         golden(3, [2], [plane(["0", "1", "-r2"]), plane(["1", "-1", "0"], 2), plane(["1", "0", "-r2"])])),
    ])
    def test_golden_documents(self, tmp_path, argv, expected):
        target = tmp_path / "out.json"
        assert run(["generate", *argv, "--out", str(target)]) == EXIT_OK
        assert target.read_text(encoding="utf-8") == expected

    @pytest.mark.parametrize("argv", [
        ["coxeter-d", "--n", "4"],
        ["coxeter-i2", "--p", "4"],
        ["coxeter-c", "--n", "3", "--m1", "1", "--m2", "2"],
        ["deformed-c", "--n", "1", "--m", "1", "--l", "0"],
    ])
    def test_hyperplanes_in_printed_normal_order(self, tmp_path, argv):
        target = tmp_path / "out.json"
        assert run(["generate", *argv, "--out", str(target)]) == EXIT_OK
        text = target.read_text(encoding="utf-8")
        planes = json.loads(text)["hyperplanes"]
        keys = [(tuple(h["normal"]), h["offset"]) for h in planes]
        assert keys == sorted(keys)
        assert run(["generate", *argv, "--out", str(target)]) == EXIT_OK
        assert target.read_text(encoding="utf-8") == text


class TestPsi:
    def test_point(self, tmp_path, capsys):
        source = write(tmp_path, "p.json", POINT)
        assert run(["psi", "--in", source, "--check", "symmetry,eigen,axioms,asymptotics"]) == EXIT_OK
        doc = output(capsys)
        assert doc["terminates"] is True
        assert doc["M"] == 1
        assert [c["check"] for c in doc["checks"]] == ["symmetry", "eigen", "axiom", "asymptotics"]

    def test_non_terminating(self, tmp_path, capsys):
        assert run(["psi", "--in", write(tmp_path, "two.json", TWO_POINTS)]) == EXIT_FAILED
        doc = output(capsys)
        assert doc["terminates"] is False
        assert doc["phi"]

    def test_unknown_check(self, tmp_path):
        assert run(["psi", "--in", write(tmp_path, "p.json", POINT), "--check", "nonsense"]) == EXIT_INPUT


class TestIntegralsAndHadamard:
    def test_energy_operator(self, tmp_path, capsys):
        assert run(["integrals", "--in", write(tmp_path, "p.json", POINT), "--f", "k1**2", "--dual"]) == EXIT_OK
        assert output(capsys)["pass"] is True

    def test_x_variables_rejected(self, tmp_path):
        assert run(["integrals", "--in", write(tmp_path, "p.json", POINT), "--f", "x1**2"]) == EXIT_INPUT

    def test_hadamard(self, tmp_path, capsys):
        assert run(["hadamard", "--in", write(tmp_path, "p.json", POINT), "--properties"]) == EXIT_OK
        doc = output(capsys)
        assert doc["minimal_N"] == 5
        assert [p["check"] for p in doc["properties"]] == ["chain_symmetry", "bi_homogeneity", "diagonal_regularity"]


class TestOnedim:
    def test_adler_moser(self, capsys):
        assert run(["onedim", "adler-moser", "--m", "2", "--tau", "1"]) == EXIT_OK
        assert output(capsys)["constants"] == ["-1/3"]

    def test_xi(self, capsys):
        assert run(["onedim", "xi", "--m", "2", "--xi", "0,-1/3"]) == EXIT_OK
        assert output(capsys)["schrodinger"] is True

    def test_trigonometric(self, capsys):
        assert run(["onedim", "berest-lutsenko", "--k", "2", "--precision", "128"]) == EXIT_OK
        doc = output(capsys)
        assert doc["pass"] is True
        assert doc["multiplicities"] == [1, 1]

    def test_bad_frequencies(self):
        assert run(["onedim", "berest-lutsenko", "--k", "2,1"]) == EXIT_INPUT


def test_report_renders_saved_output(tmp_path, capsys):
    saved = str(tmp_path / "report.json")
    assert run(["verify", "--in", write(tmp_path, "two.json", TWO_POINTS), "--out", saved]) == EXIT_FAILED
    assert run(["report", "--in", saved]) == EXIT_FAILED
    assert capsys.readouterr().out.startswith("Locus verdict: FAIL")
