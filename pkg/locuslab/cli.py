"""Command-line front end: exit 0 on success, 1 on a failed verification, 2 on bad input"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from . import __version__
from .baker import (
    Check,
    PropertyReport,
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
from .configuration import Configuration, dumps, isotropic_projectivisation, load
from .errors import LocusLabError, NonTerminating
from .families import create_family, family_names
from .huygens import bi_homogeneity_check, chain_symmetry_check, diagonal_regularity_check, huygens_certificate
from .locus import (
    LocusReport,
    large_multiplicity_coxeter_check,
    structure_check_affine,
    verify_locus,
    verify_via_2d_decomposition,
)
from .onedim import adler_moser, adler_moser_tau, ba_from_xi, berest_lutsenko, verify_planar_lines
from .settings import MODES, Settings, configure_logging
from .symbolic import parse_polynomial

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

PSI_CHECKS = ("symmetry", "eigen", "axioms", "bispectral", "monodromy", "asymptotics", "ledger")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _json(doc: Dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)


def _require_input(args: argparse.Namespace) -> Configuration:
    if not args.input:
        raise ValueError("--in FILE is required")
    return load(args.input)


# -- commands --------------------------------------------------------------


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    config = _require_input(args)
    if args.method == "coxeter":
        check = large_multiplicity_coxeter_check(config, count_self=not args.exclude_beta)
        _emit(_json(check.to_dict()), args.out)
        return EXIT_OK if check.passed else EXIT_FAILED
    if args.method == "structure":
        structure = structure_check_affine(config, args.mode, args.seed)
        _emit(_json(structure.to_dict()), args.out)
        return EXIT_OK if structure.passed else EXIT_FAILED
    if args.method == "planes":
        report = verify_via_2d_decomposition(config, args.mode, args.jobs, args.seed)
    else:
        report = verify_locus(config, args.mode, args.jobs, args.seed)
    doc = report.to_dict()
    if args.mode == "probabilistic":
        doc["seed"] = args.seed
    _emit(_json(doc), args.out)
    return EXIT_OK if report.passed else EXIT_FAILED


def _family_params(args: argparse.Namespace) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    for key in ("n", "m", "m1", "m2", "p", "l", "tau"):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    if args.constants:
        params["constants"] = [c.strip() for c in args.constants.split(",") if c.strip()]
    return params


def cmd_generate(args: argparse.Namespace, settings: Settings) -> int:
    if args.name == "projectivise":
        config = isotropic_projectivisation(_require_input(args))
    else:
        family = create_family(args.name, **_family_params(args))
        logger.info(f"Generating {family.describe()}")
        config = family.build()
    _emit(dumps(config.sorted()), args.out)
    return EXIT_OK


def cmd_psi(args: argparse.Namespace, settings: Settings) -> int:
    config = _require_input(args)
    wanted = [c.strip() for c in (args.check or "").split(",") if c.strip()]
    unknown = [c for c in wanted if c not in PSI_CHECKS]
    if unknown:
        raise ValueError(f"Unknown checks {unknown}; choose from {', '.join(PSI_CHECKS)}")
    try:
        psi = berest_psi(config)
    except NonTerminating as e:
        doc = {"terminates": False, "error": str(e), "phi": e.phi.format() if e.phi is not None else None}
        _emit(_json(doc), args.out)
        return EXIT_FAILED

    op = potential_from_config(config)
    report = PropertyReport()
    for name in wanted:
        if name == "symmetry":
            report.add(Check("symmetry", verify_symmetry(psi, args.mode, args.seed)))
        elif name == "eigen":
            report.add(Check("eigen", verify_eigen(psi, op, args.mode, args.seed)))
        elif name == "axioms":
            report.checks.extend(verify_ba_axioms(psi, args.mode, args.seed).checks)
        elif name == "bispectral":
            report.add(Check("bispectral", verify_bispectral(psi, args.mode, args.seed)))
        elif name == "monodromy":
            for index in range(len(config)):
                outcome = trivial_monodromy_check(op, index, args.mode, args.seed)
                report.add(Check("monodromy", outcome.passed, {"hyperplane": index, "m": outcome.m}))
        elif name == "asymptotics":
            report.add(asymptotic_check(psi))
        elif name == "ledger":
            report.add(degree_ledger_check(psi))
    doc = {**psi.to_document(), "terminates": True, **report.to_dict()}
    _emit(_json(doc), args.out)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_integrals(args: argparse.Namespace, settings: Settings) -> int:
    config = _require_input(args)
    if not args.f:
        raise ValueError("--f POLYNOMIAL is required")
    space = config.phase_space()
    _, f = parse_polynomial(args.f, space, config.tower)
    if any(v in space.x_vars for v in f.variables()):
        raise ValueError("--f must be a polynomial in k1..kn")
    report = PropertyReport()
    quasi = is_quasi_invariant(f, config)
    report.add(Check("quasi_invariant", quasi))
    if not quasi:
        _emit(_json(report.to_dict()), args.out)
        return EXIT_FAILED
    op = potential_from_config(config)
    psi = berest_psi(config)
    operator = operator_from_ad_formula(op, f)
    report.add(Check("eigenvalue", verify_operator_eigen(psi, operator, f, mode=args.mode, seed=args.seed),
                     {"order": operator.order}))
    report.add(Check("commutes", verify_commutativity(operator, op)))
    if args.dual:
        report.add(Check("dual", dual_operator_check(psi, op, f, args.mode, args.seed)))
    doc = {"f": f.format(), "operator": operator.format(), **report.to_dict()}
    _emit(_json(doc), args.out)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_hadamard(args: argparse.Namespace, settings: Settings) -> int:
    config = _require_input(args)
    certificate = huygens_certificate(config, args.mode, args.seed)
    doc = certificate.to_dict()
    passed = certificate.terminates and certificate.chain_verified
    if config.is_linear and args.properties:
        extra = PropertyReport([
            chain_symmetry_check(certificate.chain),
            bi_homogeneity_check(certificate.chain),
            diagonal_regularity_check(certificate.chain, args.seed),
        ])
        doc["properties"] = extra.to_dict()["checks"]
        passed = passed and extra.passed
    _emit(_json(doc), args.out)
    return EXIT_OK if passed else EXIT_FAILED


def cmd_onedim(args: argparse.Namespace, settings: Settings) -> int:
    if args.kind == "adler-moser":
        if args.tau is not None:
            data = adler_moser_tau(args.m, args.tau)
        else:
            constants = [c.strip() for c in (args.constants or "").split(",") if c.strip()]
            data = adler_moser(args.m, constants)
        _emit(_json(data.to_dict()), args.out)
        return EXIT_OK
    if args.kind == "xi":
        xi = [c.strip() for c in (args.xi or "").split(",") if c.strip()]
        result = ba_from_xi(args.m, xi)
        _emit(_json(result.to_dict()), args.out)
        return EXIT_OK if result.solves_schrodinger else EXIT_FAILED
    ks = [int(k) for k in (args.k or "").split(",") if k.strip()]
    thetas = [t.strip() for t in (args.theta or "").split(",") if t.strip()] or ["0"] * len(ks)
    data, lines = berest_lutsenko(ks, thetas, args.precision)
    report = verify_planar_lines(lines)
    doc = {**data.to_dict(), **lines.to_dict(), "pass": report.passed}
    _emit(_json(doc), args.out)
    return EXIT_OK if report.passed else EXIT_FAILED


def _render(doc: Dict[str, Any]) -> str:
    if "items" in doc:
        return LocusReport.from_dict(doc).render()
    if "checks" in doc:
        checks = [Check(c["check"], c["pass"], {k: v for k, v in c.items() if k not in ("check", "pass")})
                  for c in doc["checks"]]
        return PropertyReport(checks).render()
    if "minimal_N" in doc:
        lines = [
            f"M = {doc['M']}, minimal odd N = {doc['minimal_N']}",
            f"terminates: {doc['terminates']}, chain verified: {doc['chain_verified']}",
        ]
        lines += [f"U_{nu} = {u}" for nu, u in enumerate(doc.get("coefficients", []))]
        return "\n".join(lines)
    return "\n".join(f"{key}: {value}" for key, value in doc.items())


def cmd_report(args: argparse.Namespace, settings: Settings) -> int:
    if not args.input:
        raise ValueError("--in FILE is required")
    with open(args.input, encoding="utf-8") as handle:
        doc = json.load(handle)
    _emit(_render(doc), args.out)
    return EXIT_OK if doc.get("pass", True) else EXIT_FAILED


COMMANDS = {
    "verify": cmd_verify,
    "generate": cmd_generate,
    "psi": cmd_psi,
    "integrals": cmd_integrals,
    "hadamard": cmd_hadamard,
    "onedim": cmd_onedim,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", help="Configuration or report file")
    common.add_argument("--out", help="Write output here instead of stdout")
    common.add_argument("--mode", choices=MODES, help="Zero-test backend")
    common.add_argument("--jobs", type=int, help="Worker processes for per-hyperplane checks")
    common.add_argument("--precision", type=int, help="Working precision in bits for numeric steps")
    common.add_argument("--seed", type=int, help="Seed for randomized steps (LOCUSLAB_SEED wins)")

    parser = argparse.ArgumentParser(prog="locuslab", description="Locus configurations and their BA functions")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", parents=[common], help="Check the locus equations")
    verify.add_argument("--method", choices=("direct", "planes", "structure", "coxeter"), default="direct")
    verify.add_argument("--exclude-beta", action="store_true",
                        help="coxeter method: do not count beta among the normals of its planes")

    generate = sub.add_parser("generate", parents=[common], help="Emit a configuration document")
    generate.add_argument("name", choices=family_names() + ["projectivise"])
    for key in ("n", "m", "m1", "m2", "p", "l"):
        generate.add_argument(f"--{key}", type=int)
    generate.add_argument("--tau", help="Scalar literal for adler-moser-points")
    generate.add_argument("--constants", help="Comma-separated scalar literals c_2,...,c_m")

    psi = sub.add_parser("psi", parents=[common], help="Build psi by Berest's formula and check it")
    psi.add_argument("--check", default="", help=f"Comma-separated subset of {','.join(PSI_CHECKS)}")

    integrals = sub.add_parser("integrals", parents=[common], help="Commuting operator from a quasi-invariant")
    integrals.add_argument("--f", help="Polynomial in k1..kn, e.g. 'k1**3 + k2**3'")
    integrals.add_argument("--dual", action="store_true", help="Also check the k-side operator")

    hadamard = sub.add_parser("hadamard", parents=[common], help="Hadamard chain and Huygens certificate")
    hadamard.add_argument("--properties", action="store_true", help="Also check symmetry and homogeneity")

    onedim = sub.add_parser("onedim", parents=[common], help="One-dimensional constructions")
    onedim.add_argument("kind", choices=("adler-moser", "xi", "berest-lutsenko"))
    onedim.add_argument("--m", type=int, default=1)
    onedim.add_argument("--tau")
    onedim.add_argument("--constants")
    onedim.add_argument("--xi", help="Comma-separated scalar literals xi_1,...,xi_m")
    onedim.add_argument("--k", help="Comma-separated frequencies k_1 < ... < k_M")
    onedim.add_argument("--theta", help="Comma-separated phases")

    sub.add_parser("report", parents=[common], help="Render a saved JSON report as text")
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    settings = Settings.from_env()
    configure_logging(settings)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.mode = args.mode or settings.mode
    args.jobs = args.jobs or settings.jobs
    args.precision = args.precision or settings.precision
    args.seed = settings.resolve_seed(args.seed)
    try:
        return COMMANDS[args.command](args, settings)
    except (LocusLabError, ValueError, OSError, json.JSONDecodeError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
