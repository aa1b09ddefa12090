#!/usr/bin/env python3
"""
Acceptance Suite Runner
Runs the locus family suite, negative controls and the psi / Hadamard /
one-dimensional checks, reporting pass/fail with timings
"""

import argparse
import sys
import time
from typing import Callable, List, Tuple

import mpmath

from locuslab.baker import berest_psi, potential_from_config, verify_eigen, verify_symmetry
from locuslab.configuration import Configuration, isotropic_projectivisation
from locuslab.errors import NonTerminating
from locuslab.families import make_coxeter, make_deformed_An, make_deformed_Cn
from locuslab.huygens import affine_hadamard_via_projectivisation, huygens_certificate, verify_hadamard_chain
from locuslab.locus import verify_affine_locus, verify_linear_locus, verify_via_2d_decomposition
from locuslab.onedim import adler_moser_tau, ba_from_xi, berest_lutsenko, pole_configuration, verify_planar_lines
from locuslab.settings import Settings, configure_logging


def family_suite() -> List[Tuple[str, Configuration]]:
    suite = [(f"A2 m={m}", make_coxeter("A", 2, m)) for m in (1, 2, 3)]
    suite.append(("A3 m=1", make_coxeter("A", 3, 1)))
    for p in range(2, 7):
        suite.append((f"I2({p})", make_coxeter("I2", p, 1)))
    for m1 in (1, 2):
        for m2 in (1, 2):
            suite.append((f"B2 ({m1},{m2})", make_coxeter("B", 2, (m1, m2))))
    suite += [(f"A2({m})", make_deformed_An(2, m)) for m in (1, 2, 3, 4)]
    suite.append(("A3(2)", make_deformed_An(3, 2)))
    suite += [(f"C2({m},{l})", make_deformed_Cn(1, m, l)) for m, l in ((1, 0), (0, 1), (2, 1), (1, 1))]
    return suite


def negative_suite() -> List[Tuple[str, Configuration]]:
    return [
        ("A2 with (1, 1/2)", make_coxeter("A", 2, 1).replaced(0, [1, "1/2", "-3/2"])),
        ("two parallel points", Configuration.build(1, [([1], 0, 1), ([1], -1, 1)])),
    ]


class AcceptanceRunner:
    """Run acceptance checks and collect verdicts"""

    def __init__(self, settings: Settings):
        self.settings = settings
        self.results: List[Tuple[str, bool, float]] = []

    def check(self, name: str, fn: Callable[[], bool]) -> bool:
        start = time.perf_counter()
        try:
            passed = bool(fn())
        except Exception as e:
            print(f"  ❌ {name}: {type(e).__name__}: {e}")
            passed = False
        elapsed = time.perf_counter() - start
        self.results.append((name, passed, elapsed))
        print(f"  {'✅' if passed else '❌'} {name} ({elapsed:.2f}s)")
        return passed

    def run_locus(self) -> None:
        print("\n📐 Locus family suite...")
        mode, seed = self.settings.mode, self.settings.seed
        for name, config in family_suite():
            self.check(name, lambda c=config: verify_linear_locus(c, mode, self.settings.jobs, seed).passed)
        print("\n🚫 Negative controls...")
        for name, config in negative_suite():
            self.check(name, lambda c=config: not verify_locus_any(c, mode, seed))
        print("\n🧩 Plane decomposition agrees with direct verification...")
        for name, config in family_suite() + negative_suite():
            if not config.is_linear:
                continue
            self.check(
                name,
                lambda c=config: verify_via_2d_decomposition(c, mode, 1, seed).passed
                == verify_linear_locus(c, mode, 1, seed).passed,
            )

    def run_psi(self) -> None:
        print("\n🌊 Baker-Akhiezer functions...")
        point = Configuration.build(1, [([1], 0, 1)])
        self.check("1D point: M=1", lambda: berest_psi(point).M == 1)
        for name, config in (("A2 m=1", make_coxeter("A", 2, 1)), ("A2(2)", make_deformed_An(2, 2))):
            def properties(c=config):
                psi = berest_psi(c)
                return verify_eigen(psi, potential_from_config(c)) and verify_symmetry(psi)
            self.check(f"{name}: eigen and symmetry", properties)
        self.check("parallel points do not terminate", lambda: _raises_non_terminating(negative_suite()[1][1]))

    def run_hadamard(self) -> None:
        print("\n📡 Hadamard chains...")
        for name, config, expected in (
            ("1D point", Configuration.build(1, [([1], 0, 1)]), 5),
            ("A2 m=1", make_coxeter("A", 2, 1), 9),
        ):
            def certificate(c=config, n=expected):
                cert = huygens_certificate(c, self.settings.mode, self.settings.seed)
                return cert.chain_verified and cert.minimal_N == n
            self.check(f"{name}: minimal N={expected}", certificate)

        points = pole_configuration(adler_moser_tau(2, 1))
        self.check("Adler-Moser tau=1: affine locus", lambda: verify_affine_locus(points).passed)
        self.check(
            "Adler-Moser tau=1: projectivisation",
            lambda: verify_linear_locus(isotropic_projectivisation(points)).passed,
        )
        self.check(
            "Adler-Moser tau=1: affine chain",
            lambda: verify_hadamard_chain(affine_hadamard_via_projectivisation(points)).passed,
        )

    def run_onedim(self) -> None:
        print("\n〰️  One-dimensional constructions...")
        self.check("xi m=1 solves Schrodinger", lambda: ba_from_xi(1, ["3"]).solves_schrodinger)
        self.check(
            "xi (0,0) matches Adler-Moser tau=0",
            lambda: ba_from_xi(2, [0, 0]).potential == adler_moser_tau(2, 0).potential,
        )

        def trig():
            data, lines = berest_lutsenko([2], [0], self.settings.precision)
            with mpmath.workprec(self.settings.precision):
                expected = [mpmath.pi / 4, 3 * mpmath.pi / 4]
                close = all(abs(a - b) < mpmath.mpf(10) ** -30 for a, b in zip(sorted(lines.angles, key=lambda phi: phi.real), expected))
            return close and verify_planar_lines(lines).passed
        self.check("trigonometric Wronskian k=2", trig)

    def summary(self) -> bool:
        failed = [name for name, passed, _ in self.results if not passed]
        total = sum(elapsed for _, _, elapsed in self.results)
        print("\n" + "=" * 60)
        print(f"{len(self.results) - len(failed)}/{len(self.results)} checks passed in {total:.1f}s")
        for name in failed:
            print(f"  ❌ {name}")
        return not failed


def verify_locus_any(config: Configuration, mode: str, seed: int) -> bool:
    if config.is_linear:
        return verify_linear_locus(config, mode, 1, seed).passed
    return verify_affine_locus(config, mode, 1, seed).passed


def _raises_non_terminating(config: Configuration) -> bool:
    try:
        berest_psi(config)
    except NonTerminating:
        return True
    return False


def main():
    parser = argparse.ArgumentParser(description="Run the locuslab acceptance suite")
    parser.add_argument(
        "--only",
        choices=["locus", "psi", "hadamard", "onedim"],
        action="append",
        help="Restrict to some sections (repeatable)",
    )
    args = parser.parse_args()

    settings = Settings.from_env()
    configure_logging(settings)
    runner = AcceptanceRunner(settings)
    sections = {
        "locus": runner.run_locus,
        "psi": runner.run_psi,
        "hadamard": runner.run_hadamard,
        "onedim": runner.run_onedim,
    }
    for name in args.only or list(sections):
        sections[name]()
    sys.exit(0 if runner.summary() else 1)


if __name__ == "__main__":
    main()
