"""
Baker-Akhiezer functions of locus configurations.

psi(k, x) = P(k, x) / A(k) * e^(k, x) is built by iterating
phi_{i+1} = (L + k^2) phi_i from phi_0 = prod ((a,x)+c)^m e^(k,x); after M steps
the prefactor is divided by (-2)^M M! A(k), and phi_{M+1} must vanish.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, isqrt
from typing import Any, Dict, List, Optional, Tuple, Union

from . import linalg
from .configuration import Configuration
from .errors import ConfigurationError, MonodromyError, NonTerminating
from .operators import DiffOp, ad_power, ad_scale
from .scalar import format_scalar
from .symbolic import (
    K_BLOCK,
    X_BLOCK,
    LinearForm,
    MultiPoly,
    RationalFn,
    Space,
    is_zero,
    laurent_normal_expansion,
    restrict_to_hyperplane,
    schrodinger_shift,
)

logger = logging.getLogger(__name__)


@dataclass
class Check:
    """One verified property: a name, its verdict, and printable details"""

    name: str
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"check": self.name, "pass": self.passed, **self.detail}


@dataclass
class PropertyReport:
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def to_dict(self) -> Dict[str, Any]:
        return {"pass": self.passed, "checks": [c.to_dict() for c in self.checks]}

    def render(self) -> str:
        lines = [f"Verdict: {'PASS' if self.passed else 'FAIL'}", "-" * 60]
        for c in self.checks:
            extras = ", ".join(f"{k}={v}" for k, v in c.detail.items())
            lines.append(f"{c.name}: {'ok' if c.passed else 'FAIL'}" + (f" ({extras})" if extras else ""))
        return "\n".join(lines)


@dataclass
class SchrodingerOp:
    """-Laplacian + u on the x-block of a phase space"""

    config: Configuration
    potential: RationalFn

    @property
    def space(self) -> Space:
        return self.potential.space

    @property
    def dimension(self) -> int:
        return self.config.dimension

    def as_operator(self) -> DiffOp:
        return DiffOp.schrodinger(self.potential, X_BLOCK)

    def dual(self) -> "SchrodingerOp":
        """Same potential shape in the k-block"""
        return SchrodingerOp(self.config, self.potential.swap_blocks())


def potential_from_config(config: Configuration, space: Optional[Space] = None) -> SchrodingerOp:
    """u = sum m(m+1)(a,a) / ((a,x)+c)^2"""
    space = space or config.phase_space()
    u = RationalFn.constant(space, config.tower, 0)
    for form, h in zip(config.forms(space), config.hyperplanes):
        u = u + RationalFn.inverse_power(form, 2, h.norm2() * (h.multiplicity * (h.multiplicity + 1)))
    return SchrodingerOp(config, u)


@dataclass
class DegreeStep:
    step: int
    k_degree: int
    x_degree: int


@dataclass
class BAFunction:
    config: Configuration
    M: int
    A: MultiPoly
    prefactor: RationalFn
    ledger: List[DegreeStep] = field(default_factory=list)
    phi: Optional[RationalFn] = None

    @property
    def space(self) -> Space:
        return self.prefactor.space

    def to_document(self) -> Dict[str, Any]:
        return {"config": self.config.to_document(), "M": self.M, "prefactor": self.prefactor.format()}


def _top_component(f: RationalFn, block: str) -> Tuple[int, RationalFn]:
    components = f.homogeneous_components(block)
    return max(components, key=lambda item: item[0])


def berest_psi(config: Configuration, space: Optional[Space] = None) -> BAFunction:
    """
    Raises NonTerminating with phi_{M+1} attached when the iteration does not
    stop, i.e. when the configuration is not a locus configuration.
    """
    op = potential_from_config(config, space)
    space = op.space
    total = config.total_multiplicity
    phi = RationalFn.constant(space, config.tower, 1)
    for form, h in zip(config.forms(space), config.hyperplanes):
        phi = phi * form.as_poly() ** h.multiplicity

    ledger: List[DegreeStep] = []
    for step in range(1, total + 1):
        phi = schrodinger_shift(phi, op.potential)
        if config.is_linear and phi:
            k_degree, top = _top_component(phi, K_BLOCK)
            x_degree = _top_component(top, X_BLOCK)[0]
            ledger.append(DegreeStep(step, k_degree, x_degree))
        logger.debug(f"Berest step {step}/{total}")
    overshoot = schrodinger_shift(phi, op.potential)
    if overshoot:
        logger.warning(f"Berest iteration did not terminate after {total} steps")
        raise NonTerminating(
            f"(L + k^2)^{total + 1} does not annihilate the seed; not a locus configuration",
            phi=overshoot,
            steps=total,
        )
    A = config.spectral_polynomial(space)
    scale = (-2) ** total * factorial(total)
    # divide by scale * prod (a,k)^m
    den: Dict[LinearForm, int] = {}
    for form, h in zip(config.forms(space, K_BLOCK, with_offset=False), config.hyperplanes):
        den[form] = den.get(form, 0) + h.multiplicity
    prefactor = RationalFn.make(phi.num.scale(Fraction(1, scale)), _merge_den(phi.den, den))
    logger.info(f"Berest formula terminated after M = {total} steps")
    return BAFunction(config, total, A, prefactor, ledger, phi)


def _merge_den(first: Dict[LinearForm, int], second: Dict[LinearForm, int]) -> Dict[LinearForm, int]:
    merged = dict(first)
    for form, power in second.items():
        merged[form] = merged.get(form, 0) + power
    return merged


def degree_ledger_check(psi: BAFunction) -> Check:
    """
    Top k-component of phi_i has k-degree i and x-degree M - i, and at i = M it
    equals (-2)^M M! A(k).
    """
    if not psi.config.is_linear:
        raise ConfigurationError("The degree ledger applies to linear configurations")
    steps_ok = all(s.k_degree == s.step and s.x_degree == psi.M - s.step for s in psi.ledger)
    scale = (-2) ** psi.M * factorial(psi.M)
    if psi.phi is not None:
        top_degree, top = _top_component(psi.phi, K_BLOCK)
        leading_ok = top_degree == psi.M and (top - psi.A.scale(scale)).is_zero()
    else:
        top_degree, top = _top_component(psi.prefactor, K_BLOCK)
        leading_ok = top_degree == 0 and (top - 1).is_zero()
    return Check("degree_ledger", steps_ok and leading_ok, {"steps": len(psi.ledger)})


def asymptotic_check(psi: BAFunction) -> Check:
    """
    k-degree 0 part of the prefactor is 1 and the k-degree -1 part is
    -sum m(m+1)(a,a) / (2 ((a,x)+c)(a,k)).
    """
    space = psi.space
    components = dict(psi.prefactor.homogeneous_components(K_BLOCK))
    zero = RationalFn.constant(space, psi.config.tower, 0)
    leading = components.get(0, zero)
    expected = zero
    for h, x_form, k_form in zip(
        psi.config.hyperplanes,
        psi.config.forms(space),
        psi.config.forms(space, K_BLOCK, with_offset=False),
    ):
        weight = h.norm2() * Fraction(-h.multiplicity * (h.multiplicity + 1), 2)
        expected = expected + RationalFn.inverse_power(x_form, 1, weight).divide_by(k_form)
    first = components.get(-1, zero)
    passed = (leading - 1).is_zero() and (first - expected).is_zero()
    return Check("asymptotics", passed, {"k^-1": first.format()})


# -- axioms -------------------------------------------------------------------


def _spectral_form(space: Space, normal, block: str = K_BLOCK) -> LinearForm:
    return LinearForm.on_block(space, block, normal, None)


def _directional(f: RationalFn, normal, block: str) -> RationalFn:
    variables = f.space.block(block)
    total = RationalFn.constant(f.space, f.tower, 0)
    for var, c in zip(variables, normal):
        if c:
            total = total + f.diff(var) * c
    return total


def _axiom_step(f: RationalFn, normal, x_poly: MultiPoly) -> RationalFn:
    return _directional(f, normal, K_BLOCK) + f * x_poly


def verify_ba_axioms(psi: BAFunction, mode: str = "exact", seed: int = 0) -> PropertyReport:
    """
    For every hyperplane a and s = 1..m: the (2s-1)-th derivative along a in k
    of psi (a,k)^m vanishes on (a,k) = 0.  On the prefactor F the derivative
    acts as F -> d_a F + (a,x) F.
    """
    if not psi.config.is_linear:
        raise ConfigurationError("BA axioms are stated for linear configurations")
    report = PropertyReport()
    space = psi.space
    for index, h in enumerate(psi.config.hyperplanes):
        k_form = _spectral_form(space, h.normal)
        x_poly = LinearForm.on_block(space, X_BLOCK, h.normal, None).as_poly()
        current = psi.prefactor * k_form.as_poly() ** h.multiplicity
        current = _axiom_step(current, h.normal, x_poly)
        for s in range(1, h.multiplicity + 1):
            if s > 1:
                current = _axiom_step(_axiom_step(current, h.normal, x_poly), h.normal, x_poly)
            outcome = is_zero(restrict_to_hyperplane(current, k_form), mode, seed)
            report.add(Check("axiom", outcome.zero, {"hyperplane": index, "order": 2 * s - 1}))
    return report


def verify_eigen(psi: BAFunction, op: SchrodingerOp, mode: str = "exact", seed: int = 0) -> bool:
    """(L + k^2) psi = 0"""
    residual = schrodinger_shift(psi.prefactor, op.potential, X_BLOCK, K_BLOCK)
    return is_zero(residual, mode, seed).zero


def verify_symmetry(psi: BAFunction, mode: str = "exact", seed: int = 0) -> bool:
    """psi(k, x) = psi(x, k)"""
    if not psi.config.is_linear:
        raise ConfigurationError("psi is symmetric only for linear configurations")
    return is_zero(psi.prefactor.swap_blocks() - psi.prefactor, mode, seed).zero


def verify_bispectral(psi: BAFunction, mode: str = "exact", seed: int = 0) -> bool:
    """(-Laplacian_k + u(k)) psi = -x^2 psi"""
    if not psi.config.is_linear:
        raise ConfigurationError("The bispectral check needs a linear configuration")
    dual = potential_from_config(psi.config, psi.space).dual()
    residual = schrodinger_shift(psi.prefactor, dual.potential, K_BLOCK, X_BLOCK)
    return is_zero(residual, mode, seed).zero


# -- quasi-invariants and commuting operators ----------------------------------


def is_quasi_invariant(f: MultiPoly, config: Configuration) -> bool:
    """Odd derivatives of f along a, up to order 2m-1, vanish on (a,k) = 0"""
    if not config.is_linear:
        raise ConfigurationError("Quasi-invariance is defined for linear configurations")
    g0 = RationalFn.from_poly(f)
    for h in config.hyperplanes:
        k_form = _spectral_form(f.space, h.normal)
        current = _directional(g0, h.normal, K_BLOCK)
        for s in range(1, h.multiplicity + 1):
            if s > 1:
                current = _directional(_directional(current, h.normal, K_BLOCK), h.normal, K_BLOCK)
            if current and restrict_to_hyperplane(current, k_form):
                return False
    return True


def _homogeneous_degree(f: MultiPoly) -> int:
    degrees = {sum(e) for e in f.terms}
    if len(degrees) != 1:
        raise ValueError(f"{f.format()} must be homogeneous")
    return degrees.pop()


def operator_from_ad_formula(op: SchrodingerOp, f: MultiPoly, dual: bool = False) -> DiffOp:
    """
    L_f = c_N (ad L)^N [f(x)], c_N = (-1)^N / (2^N N!), for homogeneous f(k)
    of degree N; then L_f psi = f(k) psi.  With dual the roles of x and k are
    exchanged: the operator acts in k and L_f psi = f(x) psi.
    """
    degree = _homogeneous_degree(f)
    if dual:
        base = op.dual().as_operator()
        base = DiffOp(base.space, base.tower, base.terms, K_BLOCK)
        multiplier = DiffOp.multiplication(RationalFn.from_poly(f), K_BLOCK)
    else:
        base = op.as_operator()
        swapped = f.permute(f.space.swap_permutation())
        multiplier = DiffOp.multiplication(RationalFn.from_poly(swapped), X_BLOCK)
    result = ad_power(base, multiplier, degree).scale(ad_scale(degree))
    logger.info(f"Operator from ad-formula: order {result.order}, {len(result.terms)} coefficients")
    return result


def verify_operator_eigen(psi: BAFunction, operator: DiffOp, f: MultiPoly, dual: bool = False,
                          mode: str = "exact", seed: int = 0) -> bool:
    """L_f psi = f(k) psi (or f(x) psi for a dual operator)"""
    eigenvalue = f.permute(f.space.swap_permutation()) if dual else f
    applied = operator.apply_exponential(psi.prefactor)
    return is_zero(applied - psi.prefactor * eigenvalue, mode, seed).zero


def dual_operator_check(psi: BAFunction, op: SchrodingerOp, f: MultiPoly, mode: str = "exact",
                        seed: int = 0) -> bool:
    if not psi.config.is_linear:
        raise ConfigurationError("The dual operator needs a linear configuration")
    operator = operator_from_ad_formula(op, f, dual=True)
    return verify_operator_eigen(psi, operator, f, dual=True, mode=mode, seed=seed)


def verify_commutativity(operator: DiffOp, op: SchrodingerOp) -> bool:
    """[L_f, L] = 0 as an operator identity"""
    return operator.commutator(op.as_operator()).is_zero()


# -- trivial monodromy ------------------------------------------------------------


@dataclass
class MonodromyReport:
    hyperplane: int
    m: int
    vanishing: Dict[int, bool]

    @property
    def passed(self) -> bool:
        return all(self.vanishing.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hyperplane": self.hyperplane,
            "m": self.m,
            "pass": self.passed,
            "failing_orders": [s for s, ok in self.vanishing.items() if not ok],
        }


def _hyperplane_index(op: SchrodingerOp, form: LinearForm) -> int:
    target = list(form.coeffs) + [form.offset]
    for index, candidate in enumerate(op.config.forms(op.space)):
        if linalg.proportional(target, list(candidate.coeffs) + [candidate.offset]):
            return index
    raise ConfigurationError(f"{form} is not a hyperplane of the configuration")


def trivial_monodromy_check(op: SchrodingerOp, hyperplane: Union[int, LinearForm], mode: str = "exact",
                            seed: int = 0) -> MonodromyReport:
    """
    Expand u = sum c_s h^s along a hyperplane, given by index or by its linear
    form h; c_-2 = m(m+1)(a,a) fixes m, then c_-1, c_1, ..., c_{2m-1} must
    vanish on the hyperplane.
    """
    index = _hyperplane_index(op, hyperplane) if isinstance(hyperplane, LinearForm) else hyperplane
    h = op.config.form(index, op.space)
    normal = op.config.hyperplanes[index].normal
    order, head = laurent_normal_expansion(op.potential, h, 0)
    if order != 2:
        raise MonodromyError(f"u has a pole of order {order} on hyperplane {index}, expected 2")
    leading = head[0]
    if not leading.is_polynomial() or not leading.num.is_constant():
        raise MonodromyError(f"c_-2 on hyperplane {index} is not constant: {leading.format()}")
    ratio = leading.num.constant_term() * linalg.dot(normal, normal).inv()
    value = ratio.rational()
    if value is None or value.denominator != 1 or value < 2:
        raise MonodromyError(f"c_-2/(a,a) = {format_scalar(ratio)} is not of the form m(m+1)")
    m = (isqrt(4 * int(value) + 1) - 1) // 2
    if m < 1 or m * (m + 1) != value:
        raise MonodromyError(f"c_-2/(a,a) = {value} is not of the form m(m+1)")

    _, series = laurent_normal_expansion(op.potential, h, 2 * m + 1)
    vanishing: Dict[int, bool] = {}
    for s in range(-1, 2 * m, 2):
        coefficient = series[s + 2]
        vanishing[s] = (not coefficient) or is_zero(coefficient, mode, seed).zero
    report = MonodromyReport(index, m, vanishing)
    if not report.passed:
        logger.warning(f"Nontrivial monodromy at hyperplane {index}: {report.to_dict()['failing_orders']}")
    return report
