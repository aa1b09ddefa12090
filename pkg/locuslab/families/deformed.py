"""The deformed root systems A_n(m) and C_{n+1}(m, l)"""

import logging
from fractions import Fraction

from ..configuration import Configuration
from ..errors import ConfigurationError
from ..scalar import FieldTower, adjoin_sqrt
from ..symbolic import MultiPoly, Space
from .base import ConfigurationFamily

logger = logging.getLogger(__name__)


def make_deformed_An(n: int, m: int) -> Configuration:
    """
    e_i - e_j (i < j <= n) with multiplicity m and e_i - sqrt(m) e_{n+1} with
    multiplicity 1, in C^(n+1).  Negative m gives multiplicity -1-m.
    """
    if n < 1:
        raise ConfigurationError("A_n(m) needs n >= 1")
    if m in (0, -1):
        raise ConfigurationError(f"A_n(m) is degenerate for m = {m}")
    tower, root = adjoin_sqrt(FieldTower(), m)
    size = n + 1
    entries = []
    for i in range(n):
        for j in range(i + 1, n):
            v = [0] * size
            v[i], v[j] = 1, -1
            entries.append((v, 0, m))
    for i in range(n):
        leg = [tower.zero()] * size
        leg[i] = tower.one()
        leg[n] = -root
        entries.append((leg, 0, 1))
    return Configuration.build(size, entries, tower)


def deformed_c_parameter(n: int, m: int, l: int) -> Fraction:
    k = Fraction(2 * m + 1, 2 * l + 1)
    if n >= 2 and k.denominator != 1:
        raise ConfigurationError(f"C_{n + 1}({m},{l}) needs k = (2m+1)/(2l+1) integral, got {k}")
    return k


def make_deformed_Cn(n: int, m: int, l: int) -> Configuration:
    """
    C_{n+1}(m, l) in C^(n+1): e_i +- e_j (mult k), 2e_i (mult m),
    2 sqrt(k) e_{n+1} (mult l), e_i +- sqrt(k) e_{n+1} (mult 1) with
    k = (2m+1)/(2l+1).  Zero multiplicities are dropped.
    """
    if n < 1:
        raise ConfigurationError("C_{n+1}(m,l) needs n >= 1")
    k = deformed_c_parameter(n, m, l)
    tower, root = adjoin_sqrt(FieldTower(), k)
    size = n + 1
    zero, one = tower.zero(), tower.one()
    entries = []
    for i in range(n):
        for j in range(i + 1, n):
            for sign in (1, -1):
                v = [zero] * size
                v[i], v[j] = one, one * sign
                entries.append((v, zero, int(k)))
    for i in range(n):
        v = [zero] * size
        v[i] = one * 2
        entries.append((v, zero, m))
    last = [zero] * size
    last[n] = root * 2
    entries.append((last, zero, l))
    for i in range(n):
        for sign in (1, -1):
            v = [zero] * size
            v[i], v[n] = one, root * sign
            entries.append((v, zero, 1))
    logger.debug(f"C_{n + 1}({m},{l}) with k = {k}")
    return Configuration.build(size, entries, tower)


def deformed_power_sum(n: int, m: int, s: int, space: Space) -> MultiPoly:
    """p_s = k_1^s + ... + k_n^s + m^((s-2)/2) k_{n+1}^s, quasi-invariant for A_n(m)"""
    tower, root = adjoin_sqrt(FieldTower(), m)
    k_vars = space.k_vars
    if len(k_vars) != n + 1:
        raise ValueError(f"Space needs {n + 1} k-variables")
    total = MultiPoly.constant(space, tower, 0)
    for v in k_vars[:n]:
        total = total + MultiPoly.variable(space, tower, v) ** s
    weight = root ** (s - 2)
    return total + (MultiPoly.variable(space, tower, k_vars[n]) ** s).scale(weight)


class DeformedA(ConfigurationFamily):
    name = "deformed-a"

    def build(self) -> Configuration:
        return make_deformed_An(int(self.params["n"]), int(self.params["m"]))


class DeformedC(ConfigurationFamily):
    name = "deformed-c"

    def build(self) -> Configuration:
        return make_deformed_Cn(int(self.params["n"]), int(self.params["m"]), int(self.params["l"]))
