"""
Sparse polynomials over TowerScalar, linear forms, and rational functions
whose denominators are products of powers of linear forms.

Variables live in a Space: an ordered tuple of names split into an x-block and
a k-block (the k-block doubles as the xi-block of Hadamard coefficients).
"""

import logging
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import sympy
from sympy.parsing.sympy_parser import parse_expr

from .errors import DegenerateFormError, ScalarParseError, TowerMismatchError
from .scalar import FieldTower, TowerScalar, format_scalar, scalar_from_sympy

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
Coefficient = Union[int, Fraction, TowerScalar]

X_BLOCK = "x"
K_BLOCK = "k"


@dataclass(frozen=True)
class Space:
    """Variable names plus the positions of the x-block and k-block"""

    names: Tuple[str, ...]
    x_vars: Tuple[int, ...]
    k_vars: Tuple[int, ...] = ()

    @classmethod
    def phase(cls, n: int, x: str = "x", k: str = "k") -> "Space":
        names = tuple(f"{x}{j + 1}" for j in range(n)) + tuple(f"{k}{j + 1}" for j in range(n))
        return cls(names, tuple(range(n)), tuple(range(n, 2 * n)))

    @classmethod
    def plain(cls, names: Sequence[str]) -> "Space":
        return cls(tuple(names), tuple(range(len(names))), ())

    @property
    def nvars(self) -> int:
        return len(self.names)

    def block(self, which: str) -> Tuple[int, ...]:
        if which == X_BLOCK:
            return self.x_vars
        if which == K_BLOCK:
            return self.k_vars
        raise ValueError(f"Unknown variable block {which!r}")

    def block_of(self, var: int) -> Optional[str]:
        if var in self.x_vars:
            return X_BLOCK
        if var in self.k_vars:
            return K_BLOCK
        return None

    def swap_permutation(self) -> List[int]:
        """Image index of every variable under x <-> k"""
        if len(self.x_vars) != len(self.k_vars):
            raise ValueError("Block swap needs blocks of equal size")
        perm = list(range(self.nvars))
        for a, b in zip(self.x_vars, self.k_vars):
            perm[a], perm[b] = b, a
        return perm

    def restricted(self, block: str, pivot: int, extra: Optional[str] = None) -> Tuple["Space", List[Optional[int]]]:
        """
        Space with `pivot` removed and the rest of its block renamed t1, t2, ...
        Returns the new space and the new index of every old variable (None for the pivot).
        An `extra` variable name, when given, is appended at the end.
        """
        members = self.block(block)
        names: List[str] = []
        index: List[Optional[int]] = []
        t = 0
        for v, name in enumerate(self.names):
            if v == pivot:
                index.append(None)
                continue
            if v in members:
                t += 1
                name = f"t{t}"
            index.append(len(names))
            names.append(name)

        def remap(block_vars: Tuple[int, ...]) -> Tuple[int, ...]:
            return tuple(index[v] for v in block_vars if index[v] is not None)

        x_vars, k_vars = remap(self.x_vars), remap(self.k_vars)
        if extra is not None:
            names.append(extra)
        return Space(tuple(names), x_vars, k_vars), index


def _join_tower(a: FieldTower, b: FieldTower) -> FieldTower:
    if a is b or a == b or a.contains(b):
        return a
    if b.contains(a):
        return b
    raise TowerMismatchError(f"Incompatible towers {a} and {b}")


def _as_scalar(value: Coefficient, tower: FieldTower) -> TowerScalar:
    if isinstance(value, TowerScalar):
        return value
    return tower.scalar(value)


def _coefficient_string(c: TowerScalar) -> str:
    text = format_scalar(c)
    if " " in text:
        return f"({text})"
    return text


class MultiPoly:
    """Sparse polynomial: exponent vector -> nonzero TowerScalar"""

    __slots__ = ("space", "tower", "terms")

    def __init__(self, space: Space, tower: FieldTower, terms: Optional[Dict[Exponent, TowerScalar]] = None):
        self.space = space
        self.tower = tower
        self.terms: Dict[Exponent, TowerScalar] = terms if terms is not None else {}

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, space: Space, tower: FieldTower, value: Coefficient) -> "MultiPoly":
        scalar = _as_scalar(value, tower)
        if not scalar:
            return cls(space, tower, {})
        return cls(space, _join_tower(tower, scalar.tower), {(0,) * space.nvars: scalar})

    @classmethod
    def variable(cls, space: Space, tower: FieldTower, var: int) -> "MultiPoly":
        exponent = [0] * space.nvars
        exponent[var] = 1
        return cls(space, tower, {tuple(exponent): tower.one()})

    def zero(self) -> "MultiPoly":
        return MultiPoly(self.space, self.tower, {})

    def one(self) -> "MultiPoly":
        return MultiPoly.constant(self.space, self.tower, 1)

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> TowerScalar:
        return self.terms.get((0,) * self.space.nvars, self.tower.zero())

    def degree(self, block: Optional[str] = None) -> int:
        if not self.terms:
            return -1
        if block is None:
            return max(sum(e) for e in self.terms)
        members = self.space.block(block)
        return max(sum(e[v] for v in members) for e in self.terms)

    def degree_in(self, var: int) -> int:
        return max((e[var] for e in self.terms), default=-1)

    def variables(self) -> List[int]:
        used = set()
        for e in self.terms:
            used.update(v for v, power in enumerate(e) if power)
        return sorted(used)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "MultiPoly") -> FieldTower:
        if other.space != self.space:
            raise ValueError(f"Incompatible variable spaces {self.space.names} and {other.space.names}")
        return _join_tower(self.tower, other.tower)

    def _lift_other(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.constant(self.space, self.tower, other)

    def __add__(self, other) -> "MultiPoly":
        other = self._lift_other(other)
        tower = self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            current = terms.get(e)
            if current is None:
                terms[e] = c
            else:
                total = current + c
                if total:
                    terms[e] = total
                else:
                    del terms[e]
        return MultiPoly(self.space, tower, terms)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.space, self.tower, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._lift_other(other))

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def scale(self, value: Coefficient) -> "MultiPoly":
        scalar = _as_scalar(value, self.tower)
        if not scalar:
            return self.zero()
        tower = _join_tower(self.tower, scalar.tower)
        return MultiPoly(self.space, tower, {e: c * scalar for e, c in self.terms.items()})

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        tower = self._check(other)
        if not self.terms or not other.terms:
            return MultiPoly(self.space, tower, {})
        acc: Dict[Exponent, TowerScalar] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                product = ca * cb
                current = acc.get(e)
                acc[e] = product if current is None else current + product
        return MultiPoly(self.space, tower, {e: c for e, c in acc.items() if c})

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "MultiPoly":
        result = self.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            if isinstance(other, (int, Fraction, TowerScalar)):
                return (self - other).is_zero()
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # mutable-looking container; compare by value only

    def diff(self, var: int) -> "MultiPoly":
        terms: Dict[Exponent, TowerScalar] = {}
        for e, c in self.terms.items():
            power = e[var]
            if power:
                lowered = list(e)
                lowered[var] -= 1
                terms[tuple(lowered)] = c * power
        return MultiPoly(self.space, self.tower, terms)

    # -- structure --------------------------------------------------------

    def split_by_var(self, var: int) -> Dict[int, "MultiPoly"]:
        """Coefficients in powers of one variable (the variable itself removed)"""
        parts: Dict[int, Dict[Exponent, TowerScalar]] = {}
        for e, c in self.terms.items():
            reduced = list(e)
            power = reduced[var]
            reduced[var] = 0
            parts.setdefault(power, {})[tuple(reduced)] = c
        return {power: MultiPoly(self.space, self.tower, terms) for power, terms in parts.items()}

    def shift_var(self, var: int, power: int) -> "MultiPoly":
        """Multiply by var**power"""
        terms = {}
        for e, c in self.terms.items():
            raised = list(e)
            raised[var] += power
            terms[tuple(raised)] = c
        return MultiPoly(self.space, self.tower, terms)

    def homogeneous_components(self, block: str) -> List[Tuple[int, "MultiPoly"]]:
        members = self.space.block(block)
        parts: Dict[int, Dict[Exponent, TowerScalar]] = {}
        for e, c in self.terms.items():
            parts.setdefault(sum(e[v] for v in members), {})[e] = c
        return [(d, MultiPoly(self.space, self.tower, parts[d])) for d in sorted(parts)]

    def substitute(self, images: Sequence["MultiPoly"], target: Space) -> "MultiPoly":
        """Compose: variable v -> images[v] (polynomials over `target`)"""
        tower = self.tower
        for image in images:
            tower = _join_tower(tower, image.tower)
        powers: Dict[Tuple[int, int], MultiPoly] = {}

        def power_of(v: int, p: int) -> MultiPoly:
            key = (v, p)
            if key not in powers:
                powers[key] = images[v] if p == 1 else power_of(v, p - 1) * images[v]
            return powers[key]

        result = MultiPoly(target, tower, {})
        for e, c in self.terms.items():
            term = MultiPoly.constant(target, tower, c)
            for v, p in enumerate(e):
                if p:
                    term = term * power_of(v, p)
            result = result + term
        return result

    def permute(self, perm: Sequence[int], target: Optional[Space] = None) -> "MultiPoly":
        """Rename variable v to perm[v]"""
        target = target or self.space
        terms = {}
        for e, c in self.terms.items():
            moved = [0] * target.nvars
            for v, p in enumerate(e):
                if p:
                    moved[perm[v]] = p
            terms[tuple(moved)] = c
        return MultiPoly(target, self.tower, terms)

    def evaluate(self, point: Sequence[Coefficient]) -> TowerScalar:
        total = self.tower.zero()
        for e, c in self.terms.items():
            term = c
            for v, p in enumerate(e):
                if p:
                    term = term * (_as_scalar(point[v], self.tower) ** p)
            total = total + term
        return total

    def coefficient(self, exponent: Exponent) -> TowerScalar:
        return self.terms.get(tuple(exponent), self.tower.zero())

    # -- printing ---------------------------------------------------------

    def format(self) -> str:
        if not self.terms:
            return "0"
        order = sorted(self.terms, key=lambda e: (-sum(e), tuple(-p for p in e)))
        pieces = []
        for e in order:
            c = self.terms[e]
            monomial = "*".join(
                self.space.names[v] if p == 1 else f"{self.space.names[v]}**{p}"
                for v, p in enumerate(e) if p
            )
            if not monomial:
                pieces.append(format_scalar(c) if " " not in format_scalar(c) else f"({format_scalar(c)})")
            elif c.is_one():
                pieces.append(monomial)
            elif (-c).is_one():
                pieces.append(f"-{monomial}")
            else:
                pieces.append(f"{_coefficient_string(c)}*{monomial}")
        text = pieces[0]
        for piece in pieces[1:]:
            text += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
        return text

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"MultiPoly({self.format()!r})"


def divide_by_form(num: MultiPoly, form: "LinearForm") -> Optional[MultiPoly]:
    """Exact quotient num / form when it exists, else None (form normalized: pivot coefficient 1)"""
    pivot = form.pivot
    if num.degree_in(pivot) < 1:
        return None if num else num
    rest = MultiPoly(num.space, num.tower, {})
    for v, c in enumerate(form.coeffs):
        if v != pivot and c:
            rest = rest + MultiPoly.variable(num.space, num.tower, v).scale(c)
    if form.offset:
        rest = rest + form.offset
    # form = x_p + rest, so divide by (x_p - s) with s = -rest
    s = -rest
    parts = num.split_by_var(pivot)
    top = max(parts)
    quotient_parts: Dict[int, MultiPoly] = {}
    carry = parts[top]
    for e in range(top, 0, -1):
        quotient_parts[e - 1] = carry
        lower = parts.get(e - 1)
        carry = carry * s if lower is None else lower + carry * s
    if carry:
        return None
    quotient = MultiPoly(num.space, _join_tower(num.tower, s.tower), {})
    for e, part in quotient_parts.items():
        quotient = quotient + part.shift_var(pivot, e)
    return quotient


class LinearForm:
    """Affine form sum_v coeffs[v]*var_v + offset over a Space"""

    __slots__ = ("space", "coeffs", "offset", "_hash")

    def __init__(self, space: Space, coeffs: Sequence[TowerScalar], offset: TowerScalar):
        if len(coeffs) != space.nvars:
            raise ValueError(f"Linear form needs {space.nvars} coefficients, got {len(coeffs)}")
        self.space = space
        self.coeffs = tuple(coeffs)
        self.offset = offset
        self._hash: Optional[int] = None

    @classmethod
    def on_block(cls, space: Space, block: str, normal: Sequence[TowerScalar],
                 offset: Optional[TowerScalar] = None) -> "LinearForm":
        members = space.block(block)
        if len(normal) != len(members):
            raise ValueError(f"Normal of length {len(normal)} does not fit block of size {len(members)}")
        tower = normal[0].tower if normal else FieldTower()
        for c in normal:
            tower = _join_tower(tower, c.tower)
        coeffs = [tower.zero()] * space.nvars
        for v, c in zip(members, normal):
            coeffs[v] = c
        return cls(space, coeffs, offset if offset is not None else tower.zero())

    @classmethod
    def from_poly(cls, poly: MultiPoly) -> "LinearForm":
        if poly.degree() > 1:
            raise ValueError(f"Not an affine polynomial: {poly}")
        coeffs = [poly.tower.zero()] * poly.space.nvars
        for e, c in poly.terms.items():
            if any(e):
                coeffs[e.index(1)] = c
        return cls(poly.space, coeffs, poly.constant_term())

    @property
    def tower(self) -> FieldTower:
        tower = self.offset.tower
        for c in self.coeffs:
            tower = _join_tower(tower, c.tower)
        return tower

    def is_constant(self) -> bool:
        return not any(self.coeffs)

    @property
    def pivot(self) -> int:
        """Largest index with a nonzero coefficient"""
        for v in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[v]:
                return v
        raise DegenerateFormError("Constant form has no pivot")

    @property
    def block(self) -> Optional[str]:
        blocks = {self.space.block_of(v) for v, c in enumerate(self.coeffs) if c}
        return blocks.pop() if len(blocks) == 1 else None

    def normal(self, block: Optional[str] = None) -> Tuple[TowerScalar, ...]:
        block = block or self.block
        return tuple(self.coeffs[v] for v in self.space.block(block))

    def normalized(self) -> Tuple["LinearForm", TowerScalar]:
        """(form / lead, lead) with lead the pivot coefficient"""
        lead = self.coeffs[self.pivot]
        if lead.is_one():
            return self, lead
        inverse = lead.inv()
        return LinearForm(self.space, [c * inverse for c in self.coeffs], self.offset * inverse), lead

    def as_poly(self) -> MultiPoly:
        tower = self.tower
        poly = MultiPoly.constant(self.space, tower, self.offset)
        for v, c in enumerate(self.coeffs):
            if c:
                poly = poly + MultiPoly.variable(self.space, tower, v).scale(c)
        return poly

    def evaluate(self, point: Sequence[Coefficient]) -> TowerScalar:
        total = self.offset
        for v, c in enumerate(self.coeffs):
            if c:
                total = total + c * point[v]
        return total

    def self_pairing(self, block: Optional[str] = None) -> TowerScalar:
        """(alpha, alpha) for the normal restricted to one block"""
        total = self.tower.zero()
        for c in self.normal(block):
            total = total + c * c
        return total

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearForm):
            return NotImplemented
        return self.space == other.space and self.coeffs == other.coeffs and self.offset == other.offset

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.space.names, self.coeffs, self.offset))
        return self._hash

    def format(self) -> str:
        return self.as_poly().format()

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"LinearForm({self.format()!r})"


Denominator = Dict[LinearForm, int]


class RationalFn:
    """numerator / prod(form**power); forms normalized and pairwise distinct, representation reduced"""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: Optional[Denominator] = None):
        self.num = num
        self.den: Denominator = den or {}

    @classmethod
    def make(cls, num: MultiPoly, den: Optional[Dict[LinearForm, int]] = None) -> "RationalFn":
        """Normalize denominator forms, fold constants, cancel common linear factors"""
        clean: Denominator = {}
        for form, power in (den or {}).items():
            if power == 0:
                continue
            if form.is_constant():
                if not form.offset:
                    raise ZeroDivisionError("Denominator form vanishes identically")
                num = num.scale(form.offset.inv() ** power)
                continue
            normalized, lead = form.normalized()
            if not lead.is_one():
                num = num.scale(lead.inv() ** power)
            clean[normalized] = clean.get(normalized, 0) + power
        return cls(num, clean).reduced()

    @classmethod
    def from_poly(cls, poly: MultiPoly) -> "RationalFn":
        return cls(poly, {})

    @classmethod
    def constant(cls, space: Space, tower: FieldTower, value: Coefficient) -> "RationalFn":
        return cls(MultiPoly.constant(space, tower, value), {})

    @classmethod
    def inverse_power(cls, form: LinearForm, power: int, coefficient: Coefficient = 1) -> "RationalFn":
        """coefficient / form**power"""
        num = MultiPoly.constant(form.space, form.tower, coefficient)
        return cls.make(num, {form: power})

    @property
    def space(self) -> Space:
        return self.num.space

    @property
    def tower(self) -> FieldTower:
        return self.num.tower

    def reduced(self) -> "RationalFn":
        if not self.num:
            return RationalFn(self.num, {})
        num = self.num
        den = {}
        for form, power in self.den.items():
            while power:
                quotient = divide_by_form(num, form)
                if quotient is None:
                    break
                num, power = quotient, power - 1
            if power:
                den[form] = power
        return RationalFn(num, den)

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_polynomial(self) -> bool:
        return not self.den

    def denominator_poly(self) -> MultiPoly:
        result = self.num.one()
        for form, power in self.den.items():
            result = result * form.as_poly() ** power
        return result

    # -- arithmetic -------------------------------------------------------

    def _lift(self, other) -> "RationalFn":
        if isinstance(other, RationalFn):
            return other
        if isinstance(other, MultiPoly):
            return RationalFn(other, {})
        return RationalFn.constant(self.space, self.tower, other)

    def __add__(self, other) -> "RationalFn":
        other = self._lift(other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return RationalFn(self.num + other.num, dict(self.den)).reduced()
        common: Denominator = dict(self.den)
        for form, power in other.den.items():
            common[form] = max(common.get(form, 0), power)
        left, right = self.num, other.num
        for form, power in common.items():
            missing_left = power - self.den.get(form, 0)
            missing_right = power - other.den.get(form, 0)
            if missing_left:
                left = left * form.as_poly() ** missing_left
            if missing_right:
                right = right * form.as_poly() ** missing_right
        return RationalFn(left + right, common).reduced()

    __radd__ = __add__

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, dict(self.den))

    def __sub__(self, other) -> "RationalFn":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "RationalFn":
        return (-self) + other

    def __mul__(self, other) -> "RationalFn":
        if isinstance(other, (int, Fraction, TowerScalar)):
            return RationalFn(self.num.scale(other), dict(self.den) if other else {})
        other = self._lift(other)
        den = dict(self.den)
        for form, power in other.den.items():
            den[form] = den.get(form, 0) + power
        return RationalFn(self.num * other.num, den).reduced()

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFn":
        if isinstance(other, (int, Fraction, TowerScalar)):
            scalar = _as_scalar(other, self.tower)
            return RationalFn(self.num.scale(scalar.inv()), dict(self.den))
        if isinstance(other, LinearForm):
            return self.divide_by(other, 1)
        raise TypeError("RationalFn only divides by scalars and linear forms")

    def divide_by(self, form: LinearForm, power: int = 1) -> "RationalFn":
        den = dict(self.den)
        den[form] = den.get(form, 0) + power
        return RationalFn.make(self.num, den)

    def __pow__(self, exponent: int) -> "RationalFn":
        result = RationalFn(self.num.one(), {})
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (RationalFn, MultiPoly, int, Fraction, TowerScalar)):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def diff(self, var: int) -> "RationalFn":
        """Quotient rule against the product of linear forms"""
        moving = [(form, power) for form, power in self.den.items() if form.coeffs[var]]
        if not moving:
            return RationalFn(self.num.diff(var), dict(self.den)).reduced()
        product = self.num.one()
        for form, _ in moving:
            product = product * form.as_poly()
        num = self.num.diff(var) * product
        for form, power in moving:
            others = self.num.one()
            for other_form, _ in moving:
                if other_form is not form:
                    others = others * other_form.as_poly()
            num = num - self.num * others.scale(form.coeffs[var] * power)
        den = dict(self.den)
        for form, power in moving:
            den[form] = power + 1
        return RationalFn(num, den).reduced()

    def laplacian(self, block_vars: Iterable[int]) -> "RationalFn":
        total = RationalFn(self.num.zero(), {})
        for v in block_vars:
            total = total + self.diff(v).diff(v)
        return total

    # -- variable changes -------------------------------------------------

    def substitute(self, images: Sequence[MultiPoly], target: Space) -> "RationalFn":
        """Affine change of variables; denominator forms must map to affine forms"""
        num = self.num.substitute(images, target)
        den: Dict[LinearForm, int] = {}
        for form, power in self.den.items():
            image = LinearForm.from_poly(form.as_poly().substitute(images, target))
            if image.is_constant() and not image.offset:
                raise DegenerateFormError(f"Denominator form {form} vanishes identically after substitution")
            den[image] = den.get(image, 0) + power
        return RationalFn.make(num, den)

    def permute(self, perm: Sequence[int], target: Optional[Space] = None) -> "RationalFn":
        target = target or self.space
        num = self.num.permute(perm, target)
        den: Dict[LinearForm, int] = {}
        for form, power in self.den.items():
            coeffs = [form.tower.zero()] * target.nvars
            for v, c in enumerate(form.coeffs):
                if c:
                    coeffs[perm[v]] = c
            den[LinearForm(target, coeffs, form.offset)] = power
        return RationalFn.make(num, den)

    def swap_blocks(self) -> "RationalFn":
        return self.permute(self.space.swap_permutation())

    def evaluate(self, point: Sequence[Coefficient]) -> TowerScalar:
        value = self.num.evaluate(point)
        for form, power in self.den.items():
            denominator = form.evaluate(point)
            if not denominator:
                raise ZeroDivisionError(f"Pole of {form} at evaluation point")
            value = value * denominator.inv() ** power
        return value

    def homogeneous_components(self, block: str) -> List[Tuple[int, "RationalFn"]]:
        """Split by degree in one block; denominator forms must be homogeneous in that block or free of it"""
        members = set(self.space.block(block))
        den_degree = 0
        for form, power in self.den.items():
            touched = {v for v, c in enumerate(form.coeffs) if c}
            if touched & members:
                if not touched <= members or form.offset:
                    raise ValueError(f"Form {form} is not homogeneous in the {block}-block")
                den_degree += power
        return [
            (degree - den_degree, RationalFn(part, dict(self.den)).reduced())
            for degree, part in self.num.homogeneous_components(block)
        ]

    # -- printing ---------------------------------------------------------

    def format(self) -> str:
        if not self.den:
            return self.num.format()
        factors = sorted(
            (f"({form.format()})" if power == 1 else f"({form.format()})**{power}")
            for form, power in self.den.items()
        )
        return f"({self.num.format()})/({'*'.join(factors)})"

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"RationalFn({self.format()!r})"


# -- quasipolynomials --------------------------------------------------------


@dataclass
class QuasiPoly:
    """prefactor * exp(sum_i spectral_i * position_i); only the prefactor is stored"""

    prefactor: RationalFn

    @property
    def space(self) -> Space:
        return self.prefactor.space


def schrodinger_shift(
    prefactor: RationalFn,
    potential: RationalFn,
    diff_block: str = X_BLOCK,
    spectral_block: str = K_BLOCK,
) -> RationalFn:
    """
    Prefactor of (-Delta + u + s^2)[P e^(s, y)] where y is diff_block and s is
    spectral_block: -Delta_y P - 2 (s, grad_y P) + u P.
    """
    space = prefactor.space
    diff_vars = space.block(diff_block)
    spectral_vars = space.block(spectral_block)
    result = potential * prefactor - prefactor.laplacian(diff_vars)
    for y, s in zip(diff_vars, spectral_vars):
        derivative = prefactor.diff(y)
        if derivative:
            result = result - derivative * MultiPoly.variable(space, prefactor.tower, s).scale(2)
    return result


def apply_L_plus_k2(phi: QuasiPoly, u: RationalFn) -> QuasiPoly:
    """(-Delta_x + u + k^2)[P e^(k,x)] as a quasipolynomial"""
    if any(v in u.space.k_vars for v in u.num.variables()):
        raise ValueError("Potential must depend on the x-block only")
    return QuasiPoly(schrodinger_shift(phi.prefactor, u, X_BLOCK, K_BLOCK))


# -- restriction and Laurent expansion ---------------------------------------


@dataclass
class HyperplaneChart:
    """Affine parametrization x = x0 + sum_j t_j b_j of a hyperplane, plus the normal direction"""

    source: Space
    target: Space
    images: List[MultiPoly]
    pivot: int
    normal_images: Optional[List[MultiPoly]] = None


def hyperplane_chart(h: LinearForm, tower: FieldTower, normal_variable: bool = False) -> HyperplaneChart:
    """
    Parameters replace the non-pivot coordinates of h's block; the pivot
    coordinate solves h = 0.  With normal_variable a final coordinate lam is
    added so that h(x) = lam.
    """
    block = h.block
    if block is None:
        raise DegenerateFormError(f"Hyperplane {h} must involve exactly one variable block")
    pairing = h.self_pairing(block)
    if not pairing:
        raise DegenerateFormError(f"Hyperplane {h} is isotropic")
    tower = _join_tower(tower, h.tower)
    pivot = h.pivot
    target, index = h.space.restricted(block, pivot, extra="lam" if normal_variable else None)
    lam = target.nvars - 1
    images: List[MultiPoly] = []
    for v in range(h.space.nvars):
        if v == pivot:
            continue
        images.append(MultiPoly.variable(target, tower, index[v]))
    # pivot coordinate: -(offset + sum_{v != pivot} h_v t_v) / h_pivot
    lead_inverse = h.coeffs[pivot].inv()
    solved = MultiPoly.constant(target, tower, -h.offset * lead_inverse)
    for v, c in enumerate(h.coeffs):
        if v != pivot and c:
            solved = solved - MultiPoly.variable(target, tower, index[v]).scale(c * lead_inverse)
    images.insert(pivot, solved)
    if normal_variable:
        step = pairing.inv()
        lam_poly = MultiPoly.variable(target, tower, lam)
        images = [
            image + lam_poly.scale(h.coeffs[v] * step) if h.coeffs[v] else image
            for v, image in enumerate(images)
        ]
    return HyperplaneChart(h.space, target, images, pivot)


def restrict_to_hyperplane(f: RationalFn, h: LinearForm) -> RationalFn:
    """f on the hyperplane h = 0 in the parameters t1..t_{n-1} of h's block"""
    chart = hyperplane_chart(h, f.tower)
    try:
        return f.substitute(chart.images, chart.target)
    except DegenerateFormError as e:
        raise DegenerateFormError(f"Cannot restrict to {h}: {e}") from e


def laurent_normal_expansion(f: RationalFn, h: LinearForm, depth: int) -> Tuple[int, List[RationalFn]]:
    """
    Coefficients c_s of f = sum_s c_s * h(x)**s along the hyperplane h = 0,
    for s = -order .. -order + depth; returns (order, [c_-order, ...]).
    """
    chart = hyperplane_chart(h, f.tower, normal_variable=True)
    target = chart.target
    lam = target.nvars - 1
    base, _ = f.space.restricted(h.block, h.pivot)

    def project(poly: MultiPoly) -> RationalFn:
        terms = {e[:-1]: c for e, c in poly.terms.items()}
        return RationalFn(MultiPoly(base, poly.tower, terms), {})

    num = f.num.substitute(chart.images, target)
    order = 0
    lead = f.tower.one()
    regular: List[Tuple[LinearForm, TowerScalar, int]] = []
    for form, power in f.den.items():
        image = LinearForm.from_poly(form.as_poly().substitute(chart.images, target))
        slope = image.coeffs[lam]
        rest_coeffs = list(image.coeffs[:-1])
        if not any(rest_coeffs) and not image.offset:
            order += power
            lead = lead * slope.inv() ** power
            continue
        regular.append((LinearForm(base, rest_coeffs, image.offset), slope, power))

    num_parts = num.split_by_var(lam)
    series: List[RationalFn] = [
        project(num_parts[s]) * lead if s in num_parts else RationalFn(MultiPoly(base, num.tower, {}), {})
        for s in range(depth + 1)
    ]
    for rest, slope, power in regular:
        factor: List[RationalFn] = []
        for s in range(depth + 1):
            if s and not slope:
                factor.append(RationalFn(MultiPoly(base, num.tower, {}), {}))
                continue
            coefficient = (-1) ** s * comb(power + s - 1, s)
            factor.append(RationalFn.inverse_power(rest, power + s, slope ** s * coefficient))
        series = [
            sum((series[a] * factor[s - a] for a in range(s + 1) if series[a] and factor[s - a]),
                RationalFn(MultiPoly(base, num.tower, {}), {}))
            for s in range(depth + 1)
        ]
    return order, series


# -- zero testing -------------------------------------------------------------


@dataclass
class ZeroTest:
    """Outcome of a zero test; probabilistic outcomes carry their sample points"""

    zero: bool
    mode: str
    trials: int = 0
    sample_size: int = 0
    points: List[List[str]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.zero


def is_zero(f: Union[RationalFn, MultiPoly], mode: str = "exact", seed: int = 0, trials: int = 3) -> ZeroTest:
    """Exact: reduced numerator is the zero polynomial.  Probabilistic: random evaluation of the numerator."""
    num = f.num if isinstance(f, RationalFn) else f
    if mode == "exact":
        return ZeroTest(num.is_zero(), mode)
    if mode != "probabilistic":
        raise ValueError(f"Unknown zero-test mode {mode!r}")
    if num.is_zero():
        return ZeroTest(True, mode, trials)
    degree = max(num.degree(), 0)
    # Schwartz-Zippel: failure probability per trial <= degree / sample_size
    sample_size = 100 * (degree + 1)
    rng = random.Random(seed)
    points: List[List[str]] = []
    for _ in range(trials):
        point = [num.tower.scalar(rng.randint(-sample_size // 2, sample_size // 2)) for _ in range(num.space.nvars)]
        points.append([format_scalar(p) for p in point])
        if num.evaluate(point):
            return ZeroTest(False, mode, len(points), sample_size, points)
    return ZeroTest(True, mode, trials, sample_size, points)


# -- parsing ------------------------------------------------------------------


def parse_polynomial(text: str, space: Space, tower: FieldTower) -> Tuple[FieldTower, MultiPoly]:
    """Parse e.g. 'k1**3 + r2*k2**3' over the names of `space`"""
    symbols = sympy.symbols(space.names)
    local = {name: symbol for name, symbol in zip(space.names, symbols)}
    local["I"] = sympy.I
    source = re.sub(r"\bi\b", "I", text)
    source = re.sub(r"\br(\d+)\b", r"sqrt(\1)", source)
    try:
        expr = parse_expr(source, local_dict=local, evaluate=True)
        poly = sympy.Poly(sympy.expand(expr), *symbols)
    except (SyntaxError, TypeError, sympy.PolynomialError) as e:
        raise ScalarParseError(f"Malformed polynomial {text!r}: {e}") from e
    coefficients = []
    for monomial, coefficient in poly.terms():
        tower, scalar = scalar_from_sympy(coefficient, tower)
        coefficients.append((tuple(monomial), scalar))
    terms = {e: tower.scalar(c) for e, c in coefficients if c}
    return tower, MultiPoly(space, tower, terms)


# -- univariate fractions -----------------------------------------------------


class PolyFraction:
    """numerator / denominator with arbitrary polynomial denominator (one-dimensional potentials)"""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: Optional[MultiPoly] = None):
        if den is not None and den.is_zero():
            raise ZeroDivisionError("Zero denominator")
        self.num = num
        self.den = den if den is not None else num.one()

    def _lift(self, other) -> "PolyFraction":
        if isinstance(other, PolyFraction):
            return other
        if isinstance(other, MultiPoly):
            return PolyFraction(other)
        return PolyFraction(MultiPoly.constant(self.num.space, self.num.tower, other))

    def __add__(self, other) -> "PolyFraction":
        other = self._lift(other)
        if self.den == other.den:
            return PolyFraction(self.num + other.num, self.den)
        return PolyFraction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "PolyFraction":
        return PolyFraction(-self.num, self.den)

    def __sub__(self, other) -> "PolyFraction":
        return self + (-self._lift(other))

    def __mul__(self, other) -> "PolyFraction":
        other = self._lift(other)
        return PolyFraction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PolyFraction":
        other = self._lift(other)
        return PolyFraction(self.num * other.den, self.den * other.num)

    def diff(self, var: int = 0) -> "PolyFraction":
        return PolyFraction(
            self.num.diff(var) * self.den - self.num * self.den.diff(var),
            self.den * self.den,
        )

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other) -> bool:
        other = self._lift(other)
        return (self.num * other.den - other.num * self.den).is_zero()

    __hash__ = None

    def to_rational(self, roots: Sequence[Tuple[TowerScalar, int]], var: int = 0) -> RationalFn:
        """Rewrite over linear denominators when den = lead * prod (var - root)**mult"""
        space = self.num.space
        den_forms: Dict[LinearForm, int] = {}
        product = self.num.one()
        for root, mult in roots:
            coeffs = [self.num.tower.zero()] * space.nvars
            coeffs[var] = self.num.tower.one()
            form = LinearForm(space, coeffs, -root)
            den_forms[form] = den_forms.get(form, 0) + mult
            product = product * form.as_poly() ** mult
        lead_den = max(self.den.terms, key=sum)
        lead_product = max(product.terms, key=sum)
        ratio = self.den.terms[lead_den] / product.terms[lead_product]
        if not (self.den - product.scale(ratio)).is_zero():
            raise ValueError("Roots do not factor the denominator")
        return RationalFn.make(self.num.scale(ratio.inv()), den_forms)

    def format(self) -> str:
        if self.den.is_constant():
            return self.num.scale(self.den.constant_term().inv()).format()
        return f"({self.num.format()})/({self.den.format()})"

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"PolyFraction({self.format()!r})"
