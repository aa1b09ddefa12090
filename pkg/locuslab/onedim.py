"""
One-dimensional theory.

* Adler-Moser potentials: chi_1 = z, chi_j = (double integral of chi_{j-1}) + c_j,
  W = Wronskian(chi_1..chi_m), u = -2 (log W)''.  With this gauge the constants
  are c_2..c_m; for m = 2, W = z^3/3 - c_2, so tau = -3 c_2 gives W ~ z^3 + tau.
* Rational BA functions psi = (1 + sum a_i lambda^-i) e^(lambda z) cut out by
  m linear conditions with parameters xi_1..xi_m.
* Planar potentials -2/r^2 d^2/dphi^2 log W[cos(k_j phi + theta_j)], computed
  numerically with mpmath.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial, isqrt
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import mpmath
import sympy

from .configuration import Configuration
from .errors import ConfigurationError, DegenerateSystemError, RepresentabilityError, RootClusteringError
from .locus import LocusItem, LocusReport, verify_affine_locus
from .scalar import FieldTower, TowerScalar, format_scalar, parse_scalar, scalar_from_sympy
from .symbolic import MultiPoly, PolyFraction, RationalFn, Space

logger = logging.getLogger(__name__)

Z = 0
ScalarInput = Union[int, Fraction, str, TowerScalar]


def line_space() -> Space:
    return Space.plain(["z"])


def _scalar(value: ScalarInput, tower: FieldTower) -> Tuple[FieldTower, TowerScalar]:
    if isinstance(value, str):
        return parse_scalar(value, tower)
    if isinstance(value, TowerScalar):
        merged = tower.merge(value.tower)
        return merged, value.lift(merged)
    return tower, tower.scalar(value)


def _double_integral(poly: MultiPoly) -> MultiPoly:
    terms = {(e + 2,): c * Fraction(1, (e + 1) * (e + 2)) for (e,), c in poly.terms.items()}
    return MultiPoly(poly.space, poly.tower, terms)


def _nth_derivative(poly: MultiPoly, order: int) -> MultiPoly:
    for _ in range(order):
        poly = poly.diff(Z)
    return poly


def _poly_det(matrix: List[List[MultiPoly]]) -> MultiPoly:
    """Cofactor expansion; the matrices here are at most m x m with small m"""
    size = len(matrix)
    if size == 1:
        return matrix[0][0]
    total = matrix[0][0].zero()
    for col in range(size):
        entry = matrix[0][col]
        if entry.is_zero():
            continue
        minor = [row[:col] + row[col + 1:] for row in matrix[1:]]
        cofactor = entry * _poly_det(minor)
        total = total + cofactor if col % 2 == 0 else total - cofactor
    return total


def wronskian(functions: Sequence[MultiPoly]) -> MultiPoly:
    size = len(functions)
    return _poly_det([[_nth_derivative(f, r) for f in functions] for r in range(size)])


def log_second_derivative_potential(w: MultiPoly) -> PolyFraction:
    """u = -2 (log W)'' = -2 (W'' W - W'^2) / W^2"""
    d1 = w.diff(Z)
    return PolyFraction((w.diff(Z).diff(Z) * w - d1 * d1).scale(-2), w * w)


# -- Adler-Moser ----------------------------------------------------------------


@dataclass
class AdlerMoserData:
    m: int
    constants: List[TowerScalar]
    chain: List[MultiPoly]
    wronskian: MultiPoly
    potential: PolyFraction

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "constants": [format_scalar(c) for c in self.constants],
            "chain": [chi.format() for chi in self.chain],
            "wronskian": self.wronskian.format(),
            "potential": self.potential.format(),
        }


def adler_moser(m: int, constants: Sequence[ScalarInput] = ()) -> AdlerMoserData:
    """Chain, Wronskian and potential at level m; missing constants c_j default to 0"""
    if m < 1:
        raise ValueError("Adler-Moser level must be at least 1")
    if len(constants) > m - 1:
        raise ValueError(f"Level {m} takes at most {m - 1} constants (c_2..c_{m})")
    space = line_space()
    tower = FieldTower()
    values: List[TowerScalar] = []
    for c in list(constants) + [0] * (m - 1 - len(constants)):
        tower, value = _scalar(c, tower)
        values.append(value)
    values = [v.lift(tower) for v in values]

    chain = [MultiPoly.variable(space, tower, Z)]
    for c in values:
        chain.append(_double_integral(chain[-1]) + MultiPoly.constant(space, tower, c))
    w = wronskian(chain)
    expected = m * (m + 1) // 2
    if w.degree() != expected:
        raise DegenerateSystemError(f"Wronskian has degree {w.degree()}, expected {expected}")
    logger.debug(f"Adler-Moser level {m}: W = {w.format()}")
    return AdlerMoserData(m, values, chain, w, log_second_derivative_potential(w))


def adler_moser_tau(m: int, tau: ScalarInput) -> AdlerMoserData:
    """Level m with c_2 = -tau/3 and the remaining constants zero; at m = 2, W ~ z^3 + tau"""
    if m < 2:
        raise ValueError("The tau parametrization needs m >= 2")
    _, value = _scalar(tau, FieldTower())
    return adler_moser(m, [value * Fraction(-1, 3)])


def triangular_root(mu: int) -> Optional[int]:
    """m with m(m+1)/2 = mu, or None"""
    m = (isqrt(8 * mu + 1) - 1) // 2
    return m if m * (m + 1) // 2 == mu else None


def wronskian_roots(w: MultiPoly) -> List[Tuple[TowerScalar, int]]:
    """Exact roots of a univariate polynomial with their multiplicities"""
    z = sympy.Symbol("z")
    expr = sum((c.to_sympy() * z ** e for (e,), c in w.terms.items()), sympy.Integer(0))
    found = sympy.roots(sympy.Poly(expr, z))
    if sum(found.values()) != w.degree():
        raise RepresentabilityError(f"Could not find all roots of {w.format()} in radicals")
    tower = w.tower
    roots: List[Tuple[TowerScalar, int]] = []
    for root, mu in found.items():
        tower, value = scalar_from_sympy(sympy.simplify(root), tower)
        roots.append((value, mu))
    return [(value.lift(tower), mu) for value, mu in roots]


def pole_configuration(data: AdlerMoserData) -> Configuration:
    """Points z = p for the roots p of W; a root of order m(m+1)/2 has multiplicity m"""
    entries = []
    for root, mu in wronskian_roots(data.wronskian):
        m = triangular_root(mu)
        if m is None:
            raise ConfigurationError(f"Root {format_scalar(root)} has non-triangular order {mu}")
        entries.append(([root.tower.one()], -root, m))
    return Configuration.build(1, entries)


def rational_potential(data: AdlerMoserData) -> RationalFn:
    """u with its denominator split into linear factors (needs representable roots)"""
    return data.potential.to_rational(
        [(root, 2 * mu) for root, mu in wronskian_roots(data.wronskian)]
    )


def verify_1d_locus(points: Sequence[ScalarInput], multiplicities: Sequence[int],
                    mode: str = "exact", seed: int = 0) -> LocusReport:
    """Locus equations for a point configuration on the line"""
    if len(points) != len(multiplicities):
        raise ValueError("Need one multiplicity per point")
    tower = FieldTower()
    values = []
    for p in points:
        tower, value = _scalar(p, tower)
        values.append(value)
    entries = [([tower.one()], -v.lift(tower), m) for v, m in zip(values, multiplicities)]
    return verify_affine_locus(Configuration.build(1, entries, tower), mode, seed=seed)


# -- rational BA functions from the xi conditions -----------------------------------


@dataclass
class XiData:
    m: int
    xi: List[TowerScalar]
    coefficients: List[PolyFraction]
    potential: PolyFraction
    residuals: List[PolyFraction] = field(default_factory=list)

    @property
    def solves_schrodinger(self) -> bool:
        return all(r.is_zero() for r in self.residuals)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "xi": [format_scalar(x) for x in self.xi],
            "coefficients": [a.format() for a in self.coefficients],
            "potential": self.potential.format(),
            "schrodinger": self.solves_schrodinger,
        }


def _psi_coefficient_row(s: int, m: int, space: Space, tower: FieldTower) -> Tuple[MultiPoly, List[MultiPoly]]:
    """psi_s = sum_i a_i z^(s+i)/(s+i)!: the a_0 = 1 part and the factors of a_1..a_m"""
    z = MultiPoly.variable(space, tower, Z)

    def monomial(power: int) -> MultiPoly:
        if power < 0:
            return MultiPoly.constant(space, tower, 0)
        return (z ** power).scale(Fraction(1, factorial(power)))

    return monomial(s), [monomial(s + i) for i in range(1, m + 1)]


def ba_from_xi(m: int, xi: Sequence[ScalarInput]) -> XiData:
    """
    Impose psi_{m-1-2r} + sum_{s=1}^{m-r} xi_s psi_{m-2s-2r} = 0 for r = 0..m-1
    on the Laurent coefficients of psi at lambda = 0 and solve for a_1..a_m.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if len(xi) != m:
        raise ValueError(f"Need {m} xi parameters, got {len(xi)}")
    space = line_space()
    tower = FieldTower()
    values = []
    for x in xi:
        tower, value = _scalar(x, tower)
        values.append(value)
    values = [v.lift(tower) for v in values]

    matrix: List[List[MultiPoly]] = []
    rhs: List[MultiPoly] = []
    for r in range(m):
        free, row = _psi_coefficient_row(m - 1 - 2 * r, m, space, tower)
        for s in range(1, m - r + 1):
            extra_free, extra_row = _psi_coefficient_row(m - 2 * s - 2 * r, m, space, tower)
            free = free + extra_free.scale(values[s - 1])
            row = [a + b.scale(values[s - 1]) for a, b in zip(row, extra_row)]
        matrix.append(row)
        rhs.append(-free)

    det = _poly_det(matrix)
    if det.is_zero():
        raise DegenerateSystemError(f"Conditions for xi = {[format_scalar(v) for v in values]} are degenerate")
    coefficients = []
    for i in range(m):
        replaced = [row[:i] + [b] + row[i + 1:] for row, b in zip(matrix, rhs)]
        coefficients.append(PolyFraction(_poly_det(replaced), det))
    potential = coefficients[0].diff() * 2

    # -a_i'' - 2 a_{i+1}' + u a_i = 0 for i = 1..m, with a_{m+1} = 0
    residuals = []
    for i in range(m):
        a = coefficients[i]
        residual = a.diff().diff() * -1 + potential * a
        if i + 1 < m:
            residual = residual - coefficients[i + 1].diff() * 2
        residuals.append(residual)
    data = XiData(m, values, coefficients, potential, residuals)
    if not data.solves_schrodinger:
        logger.warning(f"psi built from xi = {data.to_dict()['xi']} does not solve the Schrodinger equation")
    return data


# -- trigonometric Wronskians ---------------------------------------------------------


def clustering_radius(precision: int) -> mpmath.mpf:
    return mpmath.mpf(2) ** (-(precision // 4))


def residual_bound(precision: int) -> mpmath.mpf:
    """10^(2 - d) with d the decimal digits carried at this precision"""
    return mpmath.mpf(10) ** (2 - int(precision * mpmath.log10(2)))


@dataclass
class PlanarLines:
    """Lines through the origin at angles phi_j with multiplicities; normals (-sin phi, cos phi)"""

    angles: List[mpmath.mpc]
    multiplicities: List[int]
    precision: int

    def normals(self) -> List[Tuple[mpmath.mpc, mpmath.mpc]]:
        with mpmath.workprec(self.precision):
            return [(-mpmath.sin(phi), mpmath.cos(phi)) for phi in self.angles]

    def locus_residuals(self) -> List[Tuple[int, int, mpmath.mpf]]:
        """|sum_b m_b(m_b+1) cos^(2j-1)(d) / sin^(2j+1)(d)|, d = phi_a - phi_b, on each line"""
        out = []
        with mpmath.workprec(self.precision):
            for a, (phi, m) in enumerate(zip(self.angles, self.multiplicities)):
                for j in range(1, m + 1):
                    total = mpmath.mpc(0)
                    for b, (other, mb) in enumerate(zip(self.angles, self.multiplicities)):
                        if b != a:
                            d = phi - other
                            total += mb * (mb + 1) * mpmath.cos(d) ** (2 * j - 1) / mpmath.sin(d) ** (2 * j + 1)
                    out.append((a, j, abs(total)))
        return out

    def circle_locus_residuals(self) -> List[Tuple[int, int, mpmath.mpf]]:
        """
        Odd derivatives (order 2s-1, s <= m_i) at phi_i of the circle potential
        sum_j m_j(m_j+1)/sin^2(phi - phi_j) with its own singular term removed.
        """
        out = []
        with mpmath.workprec(self.precision):
            for i, (phi, m) in enumerate(zip(self.angles, self.multiplicities)):
                others = [(p, mj) for j, (p, mj) in enumerate(zip(self.angles, self.multiplicities)) if j != i]

                def regular(t, others=others):
                    return sum((mj * (mj + 1) / mpmath.sin(t - p) ** 2 for p, mj in others), mpmath.mpc(0))

                for s in range(1, m + 1):
                    out.append((i, s, abs(mpmath.diff(regular, phi, 2 * s - 1))))
        return out

    def to_dict(self) -> Dict[str, Any]:
        digits = max(15, int(self.precision * 0.30103) - 5)
        return {
            "angles": [mpmath.nstr(mpmath.re(phi), digits) for phi in self.angles],
            "multiplicities": list(self.multiplicities),
            "locus_residuals": [
                {"line": a, "j": j, "magnitude": mpmath.nstr(r, 5)} for a, j, r in self.locus_residuals()
            ],
        }


@dataclass
class TrigWronskianData:
    """
    W(phi) = e^(-i K phi) P(e^(2 i phi)) with K = sum k_j; `coefficients`
    maps each frequency S to the coefficient of e^(i S phi).
    """

    ks: List[int]
    thetas: List[mpmath.mpc]
    coefficients: Dict[int, mpmath.mpc]
    roots: List[mpmath.mpc]
    multiplicities: List[int]
    precision: int

    def trig_table(self) -> List[Tuple[int, mpmath.mpc, mpmath.mpc]]:
        """(S, a_S, b_S) with W = sum a_S cos(S phi) + b_S sin(S phi)"""
        table = []
        for s in sorted({abs(f) for f in self.coefficients}):
            plus = self.coefficients.get(s, mpmath.mpc(0))
            minus = self.coefficients.get(-s, mpmath.mpc(0)) if s else mpmath.mpc(0)
            table.append((s, plus + minus, 1j * (plus - minus)))
        return table

    def evaluate(self, phi) -> mpmath.mpc:
        with mpmath.workprec(self.precision):
            return sum((c * mpmath.expj(s * phi) for s, c in self.coefficients.items()), mpmath.mpc(0))

    def to_dict(self) -> Dict[str, Any]:
        digits = max(15, int(self.precision * 0.30103) - 5)
        return {
            "k": list(self.ks),
            "theta": [mpmath.nstr(t, digits) for t in self.thetas],
            "table": [
                {"frequency": s, "cos": mpmath.nstr(a, digits), "sin": mpmath.nstr(b, digits)}
                for s, a, b in self.trig_table()
            ],
            "roots": [mpmath.nstr(mpmath.re(r), digits) for r in self.roots],
            "root_orders": [m * (m + 1) // 2 for m in self.multiplicities],
        }


def _vandermonde(nodes: Sequence[int]) -> complex:
    """prod_{j<l} (x_l - x_j) for x = i * nodes"""
    value = 1
    for j in range(len(nodes)):
        for l in range(j + 1, len(nodes)):
            value *= complex(0, nodes[l] - nodes[j])
    return value


def _exponential_coefficients(ks: Sequence[int], thetas: Sequence[mpmath.mpc]) -> Dict[int, mpmath.mpc]:
    """
    Expand each cos into exponentials; by multilinearity W is a sum over sign
    choices eps of 2^-M e^(i sum eps (k phi + theta)) Vandermonde(i eps k).
    """
    coefficients: Dict[int, mpmath.mpc] = {}
    scale = mpmath.mpf(2) ** (-len(ks))
    for signs in product((1, -1), repeat=len(ks)):
        nodes = [e * k for e, k in zip(signs, ks)]
        weight = _vandermonde(nodes)
        if not weight:
            continue
        phase = mpmath.expj(sum((e * t for e, t in zip(signs, thetas)), mpmath.mpc(0)))
        frequency = sum(nodes)
        coefficients[frequency] = coefficients.get(frequency, mpmath.mpc(0)) + scale * mpmath.mpc(weight) * phase
    return coefficients


def _companion_roots(coeffs: List[mpmath.mpc]) -> List[mpmath.mpc]:
    """Roots of sum coeffs[p] w^p (coeffs[-1] != 0) as companion-matrix eigenvalues"""
    degree = len(coeffs) - 1
    if degree == 0:
        return []
    lead = coeffs[-1]
    companion = mpmath.zeros(degree, degree)
    for r in range(1, degree):
        companion[r, r - 1] = 1
    for r in range(degree):
        companion[r, degree - 1] = -coeffs[r] / lead
    eigenvalues, _ = mpmath.eig(companion)
    return list(eigenvalues)


def _refine(coeffs: List[mpmath.mpc], guess: mpmath.mpc, order: int, precision: int) -> mpmath.mpc:
    """Newton on the (order-1)-th derivative, where a root of order `order` is simple"""
    poly = list(reversed(coeffs))
    for _ in range(order - 1):
        poly = [c * (len(poly) - 1 - p) for p, c in enumerate(poly[:-1])]
    tolerance = mpmath.mpf(2) ** (-precision)
    w = guess
    for _ in range(60):
        value, slope = mpmath.polyval(poly, w, derivative=True)
        if not slope:
            break
        step = value / slope
        w -= step
        if abs(step) <= tolerance * max(1, abs(w)):
            break
    return w


def _cluster(roots: List[mpmath.mpc], radius: mpmath.mpf) -> List[List[mpmath.mpc]]:
    clusters: List[List[mpmath.mpc]] = []
    for w in roots:
        near = [c for c in clusters if abs(w - c[0]) <= radius]
        if len(near) > 1:
            raise RootClusteringError(
                f"Root {mpmath.nstr(w, 10)} lies within {mpmath.nstr(radius, 3)} of two clusters; "
                "increase --precision"
            )
        if near:
            near[0].append(w)
        else:
            clusters.append([w])
    return clusters


def berest_lutsenko(ks: Sequence[int], thetas: Sequence[Any], precision: int = 256) -> Tuple[TrigWronskianData, PlanarLines]:
    """
    Roots phi_j (mod pi) of W[cos(k_j phi + theta_j)] with their orders, which
    must be triangular m(m+1)/2, and the lines at those angles with multiplicity m.
    """
    ks = [int(k) for k in ks]
    if not ks or ks[0] <= 0 or any(a >= b for a, b in zip(ks, ks[1:])):
        raise ValueError(f"Frequencies must satisfy 0 < k_1 < ... < k_M, got {ks}")
    if len(thetas) != len(ks):
        raise ValueError("Need one phase per frequency")
    radius = clustering_radius(precision)
    with mpmath.workprec(precision):
        phases = [mpmath.mpc(t) for t in thetas]
        coefficients = _exponential_coefficients(ks, phases)
        total = sum(ks)
        # P(w): coefficient of w^((S + K)/2)
        poly = [mpmath.mpc(0)] * (total + 1)
        for frequency, c in coefficients.items():
            poly[(frequency + total) // 2] += c
        scale = max(abs(c) for c in poly)
        negligible = scale * mpmath.mpf(2) ** (-(precision // 2))
        while poly and abs(poly[-1]) <= negligible:
            poly.pop()
        while poly and abs(poly[0]) <= negligible:
            poly.pop(0)
        if not poly:
            raise DegenerateSystemError(f"Wronskian of cos(k phi + theta) vanishes for k = {ks}")

        with mpmath.workprec(2 * precision):
            raw = _companion_roots([mpmath.mpc(c) for c in poly])
        clusters = _cluster(raw, radius)

        angles: List[mpmath.mpc] = []
        multiplicities: List[int] = []
        for members in clusters:
            order = len(members)
            m = triangular_root(order)
            if m is None:
                raise RootClusteringError(
                    f"Root cluster of size {order} is not a triangular number; increase --precision"
                )
            center = sum(members, mpmath.mpc(0)) / order
            w = _refine(poly, center, order, precision)
            phi = mpmath.log(w) / 2j
            phi = mpmath.mpc(mpmath.re(phi) % mpmath.pi, mpmath.im(phi))
            angles.append(phi)
            multiplicities.append(m)
        ordering = sorted(range(len(angles)), key=lambda p: mpmath.re(angles[p]))
        angles = [angles[p] for p in ordering]
        multiplicities = [multiplicities[p] for p in ordering]

    logger.info(f"Trigonometric Wronskian for k = {ks}: {len(angles)} lines, multiplicities {multiplicities}")
    data = TrigWronskianData(ks, phases, coefficients, angles, multiplicities, precision)
    return data, PlanarLines(angles, multiplicities, precision)


def verify_planar_lines(lines: PlanarLines) -> LocusReport:
    """Numeric locus report for lines from berest_lutsenko"""
    bound = residual_bound(lines.precision)
    items = [
        LocusItem(a, j, mpmath.nstr(r, 5), "numeric", r < bound)
        for a, j, r in lines.locus_residuals()
    ]
    return LocusReport(items)
