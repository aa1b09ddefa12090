import json

import pytest

from locuslab.server import LocusLabServer
from locuslab.settings import Settings

POINT = json.dumps({"dimension": 1, "hyperplanes": [{"normal": ["1"], "offset": "0", "multiplicity": 1}]})
TWO_POINTS = json.dumps({
    "dimension": 1,
    "hyperplanes": [
        {"normal": ["1"], "offset": "0", "multiplicity": 1},
        {"normal": ["1"], "offset": "-1", "multiplicity": 1},
    ],
})


@pytest.fixture
def server():
    return LocusLabServer(Settings())


def test_generate_then_verify(server):
    document = server._generate_configuration("coxeter-a", {"n": 2, "m": 1})
    assert json.loads(document)["dimension"] == 3
    assert server._verify_locus(document).startswith("Locus verdict: PASS")


def test_verify_failure(server):
    assert server._verify_locus(TWO_POINTS, "probabilistic").startswith("Locus verdict: FAIL")


def test_build_psi(server):
    text = server._build_psi(POINT)
    assert text.splitlines()[0] == "M = 1"
    assert "symmetry: ok" in text


def test_build_psi_non_locus(server):
    assert server._build_psi(TWO_POINTS).startswith("Not a locus configuration")


def test_hadamard(server):
    assert json.loads(server._hadamard_certificate(POINT))["minimal_N"] == 5


def test_adler_moser(server):
    assert json.loads(server._adler_moser(2, tau="1"))["constants"] == ["-1/3"]


def test_generated_hyperplanes_sorted(server):
    planes = json.loads(server._generate_configuration("coxeter-a", {"n": 2}))["hyperplanes"]
    assert [h["normal"] for h in planes] == [["0", "1", "-1"], ["1", "-1", "0"], ["1", "0", "-1"]]
