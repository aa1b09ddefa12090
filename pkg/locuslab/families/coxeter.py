"""Mirror configurations of the Coxeter groups A_n, B_n, C_n, D_n and I_2(p)"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..configuration import Configuration
from ..errors import ConfigurationError
from ..scalar import FieldTower, TowerScalar, parse_scalar
from .base import ConfigurationFamily

logger = logging.getLogger(__name__)

Multiplicities = Union[int, Sequence[int]]

# cos(pi/p) and, when it lies in a quadratic tower, sin(pi/p)
DIHEDRAL_ANGLES: Dict[int, Tuple[str, Optional[str]]] = {
    1: ("-1", "0"),
    2: ("0", "1"),
    3: ("1/2", "1/2*r3"),
    4: ("1/2*r2", "1/2*r2"),
    5: ("1/4 + 1/4*r5", None),
    6: ("1/2*r3", "1/2"),
    12: ("1/4*r2 + 1/4*r6", "-1/4*r2 + 1/4*r6"),
}


def _orbit_multiplicities(multiplicities: Multiplicities, orbits: int, family: str) -> List[int]:
    values = [multiplicities] if isinstance(multiplicities, int) else list(multiplicities)
    if len(values) == 1:
        values = values * orbits
    if len(values) != orbits:
        raise ConfigurationError(
            f"{family} has {orbits} mirror orbit(s); got {len(values)} multiplicities"
        )
    return values


def _unit(n: int, i: int, value: int = 1) -> List[int]:
    v = [0] * n
    v[i] = value
    return v


def _root_pairs(n: int, signs: Sequence[int]) -> List[List[int]]:
    vectors = []
    for i in range(n):
        for j in range(i + 1, n):
            for sign in signs:
                v = [0] * n
                v[i], v[j] = 1, -sign
                vectors.append(v)
    return vectors


def coxeter_a(rank: int, multiplicities: Multiplicities = 1) -> Configuration:
    """A_n in the sum-zero hyperplane of C^(n+1), normals e_i - e_j"""
    if rank < 1:
        raise ConfigurationError("A_n needs rank >= 1")
    (m,) = _orbit_multiplicities(multiplicities, 1, "A_n")
    entries = [(v, 0, m) for v in _root_pairs(rank + 1, (1,))]
    return Configuration.build(rank + 1, entries)


def coxeter_b(rank: int, multiplicities: Multiplicities = 1) -> Configuration:
    """B_n: e_i +- e_j (first multiplicity) and e_i (second)"""
    if rank < 2:
        raise ConfigurationError("B_n needs rank >= 2")
    long_m, short_m = _orbit_multiplicities(multiplicities, 2, "B_n")
    entries = [(v, 0, long_m) for v in _root_pairs(rank, (1, -1))]
    entries += [(_unit(rank, i), 0, short_m) for i in range(rank)]
    return Configuration.build(rank, entries)


def coxeter_c(rank: int, multiplicities: Multiplicities = 1) -> Configuration:
    """C_n: e_i +- e_j (first multiplicity) and 2e_i (second)"""
    if rank < 2:
        raise ConfigurationError("C_n needs rank >= 2")
    short_m, long_m = _orbit_multiplicities(multiplicities, 2, "C_n")
    entries = [(v, 0, short_m) for v in _root_pairs(rank, (1, -1))]
    entries += [(_unit(rank, i, 2), 0, long_m) for i in range(rank)]
    return Configuration.build(rank, entries)


def coxeter_d(rank: int, multiplicities: Multiplicities = 1) -> Configuration:
    """D_n: e_i +- e_j"""
    if rank < 2:
        raise ConfigurationError("D_n needs rank >= 2")
    orbits = 2 if rank == 2 else 1
    values = _orbit_multiplicities(multiplicities, orbits, "D_n")
    entries = []
    for v in _root_pairs(rank, (1, -1)):
        # D_2 = A_1 x A_1: e1 - e2 and e1 + e2 are separate orbits
        m = values[0] if rank > 2 or v[1] == -1 else values[-1]
        entries.append((v, 0, m))
    return Configuration.build(rank, entries)


def _dihedral_trig(p: int) -> Tuple[FieldTower, TowerScalar, Optional[TowerScalar]]:
    if p not in DIHEDRAL_ANGLES:
        raise ConfigurationError(
            f"I_2({p}) needs cos(pi/{p}) in a quadratic tower; supported p: {sorted(DIHEDRAL_ANGLES)}"
        )
    cos_text, sin_text = DIHEDRAL_ANGLES[p]
    tower, cos = parse_scalar(cos_text)
    sin = None
    if sin_text is not None:
        tower, sin = parse_scalar(sin_text, tower)
    return tower, cos.lift(tower), sin


def coxeter_i2(p: int, multiplicities: Multiplicities = 1) -> Configuration:
    """
    The p lines through the origin at angles pi*j/p.  When sin(pi/p) is not in a
    quadratic tower (p = 5) the plane is embedded isometrically in C^3 through
    a vector g with (g, g) = sin(pi/p)**2.
    """
    orbits = 2 if p % 2 == 0 else 1
    values = _orbit_multiplicities(multiplicities, orbits, f"I_2({p})")
    tower, cos, sin = _dihedral_trig(p)
    one, zero = tower.one(), tower.zero()
    # Chebyshev recurrences: cos(j t) = T_j(c), sin(j t) = sin(t) U_{j-1}(c)
    t_prev, t_cur = one, cos
    u_prev, u_cur = zero, one
    cosines, sine_factors = [one], [zero]
    for _ in range(1, p):
        cosines.append(t_cur)
        sine_factors.append(u_cur)
        t_prev, t_cur = t_cur, cos * t_cur * 2 - t_prev
        u_prev, u_cur = u_cur, cos * u_cur * 2 - u_prev
    entries = []
    for j in range(p):
        m = values[j % orbits]
        if sin is not None:
            normal = [-(sin * sine_factors[j]), cosines[j]]
        else:
            s2 = one - cos * cos
            g = [(s2 + 1) / 2, tower.i() * (s2 - 1) / 2]
            normal = [-(g[0] * sine_factors[j]), -(g[1] * sine_factors[j]), cosines[j]]
        entries.append((normal, 0, m))
    dimension = 2 if sin is not None else 3
    logger.debug(f"I_2({p}) built in C^{dimension}")
    return Configuration.build(dimension, entries, tower)


_BUILDERS = {"A": coxeter_a, "B": coxeter_b, "C": coxeter_c, "D": coxeter_d, "I2": coxeter_i2}


def make_coxeter(family: str, rank: int, multiplicities: Multiplicities = 1) -> Configuration:
    """Standard mirror configuration; for I2 the rank argument is p"""
    builder = _BUILDERS.get(family.upper().replace("₂", "2").replace("_", ""))
    if builder is None:
        raise ConfigurationError(f"Unsupported Coxeter family: {family}")
    return builder(rank, multiplicities)


class CoxeterA(ConfigurationFamily):
    name = "coxeter-a"

    def build(self) -> Configuration:
        return coxeter_a(int(self.params["n"]), self.params.get("m", 1))


class CoxeterB(ConfigurationFamily):
    name = "coxeter-b"

    def build(self) -> Configuration:
        return coxeter_b(int(self.params["n"]), (self.params.get("m1", 1), self.params.get("m2", 1)))


class CoxeterC(ConfigurationFamily):
    name = "coxeter-c"

    def build(self) -> Configuration:
        return coxeter_c(int(self.params["n"]), (self.params.get("m1", 1), self.params.get("m2", 1)))


class CoxeterD(ConfigurationFamily):
    name = "coxeter-d"

    def build(self) -> Configuration:
        return coxeter_d(int(self.params["n"]), self.params.get("m", 1))


class CoxeterI2(ConfigurationFamily):
    name = "coxeter-i2"

    def build(self) -> Configuration:
        p = int(self.params["p"])
        m1 = self.params.get("m1", 1)
        m2 = self.params.get("m2", m1)
        if p % 2 and m1 != m2:
            raise ConfigurationError(f"I_2({p}) has one mirror orbit; m1 and m2 must agree")
        return coxeter_i2(p, (m1, m2) if p % 2 == 0 else m1)
