"""
Hadamard coefficients from BA functions.

For a linear locus configuration psi(xi, x) = (U_0 + U_1 + ... + U_M) e^(xi, x)
with U_nu the part of the prefactor of degree -nu in xi.  The chain satisfies

    sum (x_i - xi_i) dU_nu/dx_i + nu U_nu = -1/2 L[U_{nu-1}],   U_{M+1} = 0,

so the wave equation with this potential is huygensian in odd N >= 2M + 3.
Affine configurations go through the isotropic projectivisation in C^(n+2)
and the restriction x_{n+1} + i x_{n+2} = xi_{n+1} + i xi_{n+2} = 1.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from .baker import BAFunction, Check, PropertyReport, berest_psi, potential_from_config
from .configuration import Configuration, isotropic_projectivisation
from .errors import ConfigurationError, DegenerateFormError
from .scalar import FieldTower
from .symbolic import K_BLOCK, X_BLOCK, MultiPoly, RationalFn, Space, is_zero

logger = logging.getLogger(__name__)


def chain_space(n: int) -> Space:
    return Space.phase(n, k="xi")


@dataclass
class HadamardChain:
    potential: RationalFn
    coefficients: List[RationalFn]
    linear: bool = True
    lifted: Optional["HadamardChain"] = None

    @property
    def M(self) -> int:
        return len(self.coefficients) - 1

    @property
    def space(self) -> Space:
        return self.potential.space

    def to_dict(self) -> Dict[str, Any]:
        return {"M": self.M, "coefficients": [u.format() for u in self.coefficients]}


@dataclass
class HuygensCertificate:
    chain: HadamardChain
    terminates: bool
    report: PropertyReport = field(default_factory=PropertyReport)

    @property
    def minimal_N(self) -> int:
        return 2 * self.chain.M + 3

    @property
    def chain_verified(self) -> bool:
        return self.report.passed

    def to_dict(self) -> Dict[str, Any]:
        return {
            "M": self.chain.M,
            "minimal_N": self.minimal_N,
            "terminates": self.terminates,
            "chain_verified": self.chain_verified,
            "coefficients": [u.format() for u in self.chain.coefficients],
        }


def _rename(f: RationalFn, target: Space) -> RationalFn:
    return f.permute(list(range(target.nvars)), target)


def hadamard_from_psi(psi: BAFunction) -> HadamardChain:
    """Split the prefactor into xi-homogeneous parts of degree 0, -1, ..., -M"""
    if not psi.config.is_linear:
        raise ConfigurationError("hadamard_from_psi needs a linear configuration")
    target = chain_space(psi.config.dimension)
    components = dict(psi.prefactor.homogeneous_components(K_BLOCK))
    stray = [d for d in components if d > 0 or d < -psi.M]
    if stray:
        raise ValueError(f"Prefactor has xi-degrees {stray} outside 0..-{psi.M}")
    zero = RationalFn.constant(psi.space, psi.config.tower, 0)
    coefficients = [_rename(components.get(-nu, zero), target) for nu in range(psi.M + 1)]
    if not (coefficients[0] - 1).is_zero():
        raise ValueError(f"U_0 = {coefficients[0].format()}, expected 1")
    potential = potential_from_config(psi.config, target).potential
    return HadamardChain(potential, coefficients, linear=True)


def _schrodinger(f: RationalFn, potential: RationalFn) -> RationalFn:
    """L[f] = -Laplacian_x f + u f"""
    return potential * f - f.laplacian(f.space.x_vars)


def _xi_derivative(f: RationalFn) -> RationalFn:
    """(xi, grad_x) f"""
    space = f.space
    total = RationalFn.constant(space, f.tower, 0)
    for x, xi in zip(space.x_vars, space.k_vars):
        derivative = f.diff(x)
        if derivative:
            total = total + derivative * MultiPoly.variable(space, f.tower, xi)
    return total


def _radial_derivative(f: RationalFn) -> RationalFn:
    """sum (x_i - xi_i) df/dx_i"""
    space = f.space
    total = RationalFn.constant(space, f.tower, 0)
    for x, xi in zip(space.x_vars, space.k_vars):
        derivative = f.diff(x)
        if derivative:
            shift = MultiPoly.variable(space, f.tower, x) - MultiPoly.variable(space, f.tower, xi)
            total = total + derivative * shift
    return total


def _steps(chain: HadamardChain) -> List[Tuple[int, RationalFn, RationalFn]]:
    zero = RationalFn.constant(chain.space, chain.potential.tower, 0)
    padded = chain.coefficients + [zero]
    return [(nu, padded[nu], padded[nu - 1]) for nu in range(1, len(padded))]


def _transport_check(nu: int, current: RationalFn, applied: RationalFn, mode: str, seed: int) -> Check:
    transport = applied - _xi_derivative(current) * 2
    return Check("transport", is_zero(transport, mode, seed).zero, {"nu": nu})


def verify_hadamard_chain(chain: HadamardChain, mode: str = "exact", seed: int = 0) -> PropertyReport:
    """
    Hadamard recursion for nu = 1..M+1 (with U_{M+1} = 0), and the transport
    identity -2 (xi, grad_x) U_nu + L[U_{nu-1}] = 0.  The transport identity
    needs U_nu homogeneous of degree -nu in x, so an affine chain has it
    checked on the projectivised chain it was restricted from.
    """
    report = PropertyReport()
    for nu, current, previous in _steps(chain):
        applied = _schrodinger(previous, chain.potential)
        if chain.linear:
            report.add(_transport_check(nu, current, applied, mode, seed))
        recursion = _radial_derivative(current) + current * nu + applied * Fraction(1, 2)
        report.add(Check("hadamard", is_zero(recursion, mode, seed).zero, {"nu": nu}))
    if not chain.linear and chain.lifted is not None:
        lifted = chain.lifted
        for nu, current, previous in _steps(lifted):
            check = _transport_check(nu, current, _schrodinger(previous, lifted.potential), mode, seed)
            check.detail["chain"] = "projectivised"
            report.add(check)
    return report


def chain_symmetry_check(chain: HadamardChain) -> Check:
    """U_nu(x, xi) = U_nu(xi, x)"""
    if not chain.linear:
        raise ConfigurationError("Chain symmetry holds for linear configurations only")
    passed = all((u.swap_blocks() - u).is_zero() for u in chain.coefficients)
    return Check("chain_symmetry", passed)


def bi_homogeneity_check(chain: HadamardChain) -> Check:
    """U_nu is homogeneous of degree -nu in x and, separately, in xi"""
    if not chain.linear:
        raise ConfigurationError("Bi-homogeneity holds for linear configurations only")
    failing = []
    for nu, u in enumerate(chain.coefficients):
        if not u:
            continue
        for block in (X_BLOCK, K_BLOCK):
            degrees = [d for d, _ in u.homogeneous_components(block)]
            if degrees != [-nu]:
                failing.append(nu)
                break
    return Check("bi_homogeneity", not failing, {"failing": failing} if failing else {})


def diagonal_regularity_check(chain: HadamardChain, seed: int = 0, attempts: int = 20) -> Check:
    """Along x = xi0 + t v for random rational xi0, v, no U_nu has a pole at t = 0"""
    space = chain.space
    tower = chain.potential.tower
    line = Space.plain(["t"])
    t = MultiPoly.variable(line, tower, 0)
    rng = random.Random(seed)
    failing: List[int] = []
    for nu, u in enumerate(chain.coefficients):
        if not u:
            continue
        for _ in range(attempts):
            base = [rng.randint(-50, 50) for _ in space.k_vars]
            direction = [rng.randint(-50, 50) for _ in space.k_vars]
            images: List[Optional[MultiPoly]] = [None] * space.nvars
            for x, xi, b, v in zip(space.x_vars, space.k_vars, base, direction):
                images[x] = MultiPoly.constant(line, tower, b) + t.scale(v)
                images[xi] = MultiPoly.constant(line, tower, b)
            try:
                restricted = u.substitute(images, line)
            except (DegenerateFormError, ZeroDivisionError):
                continue
            if any(not form.offset for form in restricted.den):
                failing.append(nu)
            break
        else:
            logger.warning(f"No admissible diagonal line found for U_{nu}")
            failing.append(nu)
    return Check("diagonal_regularity", not failing, {"failing": failing} if failing else {})


def _projective_slice(source: Space, target: Space, n: int, free: bool) -> List[MultiPoly]:
    """
    Images of the C^(n+2) phase variables: x_{n+2} = -i + i x_{n+1} (same for
    xi), with x_{n+1} kept when `free` and set to 0 otherwise.
    """
    tower = FieldTower()
    i = tower.i()
    images: List[MultiPoly] = []
    for block_source, block_target in ((source.x_vars, target.x_vars), (source.k_vars, target.k_vars)):
        for position in range(len(block_source)):
            if position < n:
                images.append(MultiPoly.variable(target, tower, block_target[position]))
            elif position == n:
                images.append(
                    MultiPoly.variable(target, tower, block_target[n]) if free
                    else MultiPoly.constant(target, tower, 0)
                )
            else:
                images.append(MultiPoly.constant(target, tower, -i) + images[-1].scale(i))
    return images


def affine_hadamard_via_projectivisation(config: Configuration) -> HadamardChain:
    """
    Chain of the projectivised linear configuration, restricted to
    x_{n+1} + i x_{n+2} = xi_{n+1} + i xi_{n+2} = 1; the restricted
    coefficients must not depend on x_{n+1}, xi_{n+1} individually.
    """
    n = config.dimension
    big = hadamard_from_psi(berest_psi(isotropic_projectivisation(config)))
    source = big.space
    on_slice = _projective_slice(source, source, n, free=True)
    for nu, u in enumerate(big.coefficients):
        restricted = u.substitute(on_slice, source)
        for var in (source.x_vars[n], source.k_vars[n]):
            if restricted.diff(var):
                raise ValueError(
                    f"Restricted U_{nu} depends on {source.names[var]} individually; projective restriction failed"
                )

    target = chain_space(n)
    images = _projective_slice(source, target, n, free=False)
    coefficients = [u.substitute(images, target) for u in big.coefficients]
    potential = potential_from_config(config, target).potential
    logger.info(f"Affine Hadamard chain of length {len(coefficients)} via C^{n + 2}")
    return HadamardChain(potential, coefficients, linear=config.is_linear, lifted=big)


def certify_chain(chain: HadamardChain, mode: str = "exact", seed: int = 0) -> HuygensCertificate:
    """The chain terminates when the nu = M+1 recursion row, L[U_M] = 0, holds"""
    report = verify_hadamard_chain(chain, mode, seed)
    last = [c for c in report.checks if c.name == "hadamard" and c.detail["nu"] == chain.M + 1]
    terminates = bool(last) and all(c.passed for c in last)
    if not terminates:
        logger.warning(f"Hadamard chain of length {len(chain.coefficients)} does not terminate")
    return HuygensCertificate(chain, terminates=terminates, report=report)


def huygens_certificate(config: Configuration, mode: str = "exact", seed: int = 0) -> HuygensCertificate:
    """Chain, termination and the smallest odd N >= 2M + 3"""
    if config.is_linear:
        chain = hadamard_from_psi(berest_psi(config))
    else:
        chain = affine_hadamard_via_projectivisation(config)
    certificate = certify_chain(chain, mode, seed)
    logger.info(f"Huygens certificate: M = {chain.M}, minimal N = {certificate.minimal_N}")
    return certificate
