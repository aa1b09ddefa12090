"""Differential operators as coefficient tables: multi-index -> RationalFn"""

import logging
from fractions import Fraction
from math import comb, factorial
from typing import Dict, Iterator, List, Optional, Tuple

from .scalar import FieldTower
from .symbolic import K_BLOCK, X_BLOCK, MultiPoly, RationalFn, Space

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]


def _below(index: MultiIndex) -> Iterator[MultiIndex]:
    """All c <= index componentwise"""
    if not index:
        yield ()
        return
    for head in range(index[0] + 1):
        for rest in _below(index[1:]):
            yield (head,) + rest


def _binomial(a: MultiIndex, c: MultiIndex) -> int:
    result = 1
    for x, y in zip(a, c):
        result *= comb(x, y)
    return result


class DiffOp:
    """sum_a coefficient_a(x) * d^a, with d ranging over one variable block"""

    def __init__(self, space: Space, tower: FieldTower, terms: Optional[Dict[MultiIndex, RationalFn]] = None,
                 block: str = X_BLOCK):
        self.space = space
        self.tower = tower
        self.block = block
        self.terms = {a: c for a, c in (terms or {}).items() if c}

    @property
    def variables(self) -> Tuple[int, ...]:
        return self.space.block(self.block)

    def _zero_index(self) -> MultiIndex:
        return (0,) * len(self.variables)

    @classmethod
    def multiplication(cls, f: RationalFn, block: str = X_BLOCK) -> "DiffOp":
        op = cls(f.space, f.tower, block=block)
        op.terms = {op._zero_index(): f} if f else {}
        return op

    @classmethod
    def schrodinger(cls, potential: RationalFn, block: str = X_BLOCK) -> "DiffOp":
        """-Laplacian + u over the given block"""
        op = cls.multiplication(potential, block)
        size = len(op.variables)
        for p in range(size):
            index = tuple(2 if q == p else 0 for q in range(size))
            op.terms[index] = RationalFn.constant(potential.space, potential.tower, -1)
        return op

    @property
    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def _like(self, terms: Dict[MultiIndex, RationalFn]) -> "DiffOp":
        return DiffOp(self.space, self.tower, terms, self.block)

    def _derivative(self, f: RationalFn, index: MultiIndex, cache: Dict) -> RationalFn:
        key = (id(f), index)
        if key in cache:
            return cache[key][1]
        result = f
        for var, power in zip(self.variables, index):
            for _ in range(power):
                result = result.diff(var)
        cache[key] = (f, result)
        return result

    # -- algebra ----------------------------------------------------------

    def __add__(self, other: "DiffOp") -> "DiffOp":
        terms = dict(self.terms)
        for a, c in other.terms.items():
            terms[a] = terms[a] + c if a in terms else c
        return self._like(terms)

    def __neg__(self) -> "DiffOp":
        return self._like({a: -c for a, c in self.terms.items()})

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def scale(self, value) -> "DiffOp":
        return self._like({a: c * value for a, c in self.terms.items()})

    def compose(self, other: "DiffOp") -> "DiffOp":
        """(A o B) = sum A_a C(a, c) d^c(B_b) d^(a - c + b)  (Leibniz)"""
        cache: Dict = {}
        terms: Dict[MultiIndex, RationalFn] = {}
        for a, left in self.terms.items():
            for c in _below(a):
                weight = _binomial(a, c)
                rest = tuple(x - y for x, y in zip(a, c))
                for b, right in other.terms.items():
                    piece = self._derivative(right, c, cache)
                    if not piece:
                        continue
                    index = tuple(x + y for x, y in zip(rest, b))
                    term = left * piece * weight
                    terms[index] = terms[index] + term if index in terms else term
        return self._like(terms)

    def commutator(self, other: "DiffOp") -> "DiffOp":
        return self.compose(other) - other.compose(self)

    # -- application ------------------------------------------------------

    def apply(self, f: RationalFn) -> RationalFn:
        cache: Dict = {}
        total = RationalFn.constant(f.space, f.tower, 0)
        for a, coefficient in self.terms.items():
            total = total + coefficient * self._derivative(f, a, cache)
        return total

    def apply_exponential(self, prefactor: RationalFn, spectral_block: Optional[str] = None) -> RationalFn:
        """
        Prefactor of self[P e^(s, y)] where y is this operator's block and s the
        spectral block: d^a (P e) = e * sum_c C(a, c) s^(a - c) d^c P.
        """
        spectral_block = spectral_block or (K_BLOCK if self.block == X_BLOCK else X_BLOCK)
        spectral = [MultiPoly.variable(self.space, self.tower, s) for s in self.space.block(spectral_block)]
        cache: Dict = {}
        total = RationalFn.constant(prefactor.space, prefactor.tower, 0)
        for a, coefficient in self.terms.items():
            for c in _below(a):
                piece = self._derivative(prefactor, c, cache)
                if not piece:
                    continue
                weight = MultiPoly.constant(self.space, self.tower, _binomial(a, c))
                for s, x, y in zip(spectral, a, c):
                    if x > y:
                        weight = weight * s ** (x - y)
                total = total + coefficient * piece * weight
        return total

    # -- printing ---------------------------------------------------------

    def format(self) -> str:
        names = [self.space.names[v] for v in self.variables]
        parts: List[str] = []
        for a in sorted(self.terms, key=lambda a: (-sum(a), a)):
            d = "*".join(
                f"d{name}" if p == 1 else f"d{name}**{p}" for name, p in zip(names, a) if p
            )
            coefficient = self.terms[a].format()
            parts.append(f"({coefficient})*{d}" if d else f"({coefficient})")
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"DiffOp(order={self.order}, terms={len(self.terms)})"


def ad_power(base: DiffOp, target: DiffOp, times: int) -> DiffOp:
    """(ad base)^times [target]"""
    for step in range(times):
        target = base.commutator(target)
        logger.debug(f"ad step {step + 1}: order {target.order}, {len(target.terms)} terms")
    return target


def ad_scale(degree: int) -> Fraction:
    """c_N = (-1)^N / (2^N N!)"""
    return Fraction((-1) ** degree, 2 ** degree * factorial(degree))
