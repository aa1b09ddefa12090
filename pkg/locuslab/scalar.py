"""
Exact arithmetic in multi-quadratic towers Q(i)[sqrt(d_1), ..., sqrt(d_r)].

A TowerScalar stores, for every subset S of the tower's radicands (encoded as a
bit mask), a Gaussian rational coefficient; the value is
sum_S coeff_S * prod_{j in S} sqrt(d_j).  Radicands are positive square-free
integers; square roots of negative integers become i * sqrt(|d|).
"""

import logging
import re
from fractions import Fraction
from functools import reduce
from tokenize import TokenError
from typing import Dict, Iterable, List, Optional, Tuple, Union

import mpmath
import sympy
from sympy.parsing.sympy_parser import parse_expr

from .errors import RepresentabilityError, ScalarParseError, TowerMismatchError

logger = logging.getLogger(__name__)

Gaussian = Tuple[Fraction, Fraction]
Number = Union[int, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _square_free_split(n: int) -> Tuple[int, int]:
    """Write n > 0 as root**2 * free with free square-free; returns (root, free)"""
    root, free = 1, 1
    for prime, power in sympy.factorint(n).items():
        root *= prime ** (power // 2)
        if power % 2:
            free *= prime
    return root, free


def _prime_support(n: int) -> Tuple[int, ...]:
    return tuple(sorted(sympy.factorint(n)))


class FieldTower:
    """Ordered list of independent positive square-free radicands; i is always present"""

    __slots__ = ("radicands", "_index", "_square_factor")

    def __init__(self, radicands: Iterable[int] = ()):
        rads = tuple(sorted(int(d) for d in radicands))
        if len(set(rads)) != len(rads):
            raise ValueError(f"Repeated radicand in {rads}")
        for d in rads:
            if d <= 1 or _square_free_split(d)[0] != 1:
                raise ValueError(f"Radicand {d} must be a square-free integer > 1")
        if _dependent_subset(rads) is not None:
            raise ValueError(f"Radicands {rads} are multiplicatively dependent modulo squares")
        self.radicands = rads
        self._index = {d: j for j, d in enumerate(rads)}
        self._square_factor: Dict[int, int] = {}

    def __repr__(self) -> str:
        return f"FieldTower({list(self.radicands)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldTower) and self.radicands == other.radicands

    def __hash__(self) -> int:
        return hash(("FieldTower", self.radicands))

    def __len__(self) -> int:
        return len(self.radicands)

    def contains(self, other: "FieldTower") -> bool:
        return set(other.radicands) <= set(self.radicands)

    def square_factor(self, mask: int) -> int:
        """Product of the radicands selected by mask"""
        cached = self._square_factor.get(mask)
        if cached is None:
            cached = 1
            for j, d in enumerate(self.radicands):
                if mask >> j & 1:
                    cached *= d
            self._square_factor[mask] = cached
        return cached

    def mask_radicands(self, mask: int) -> Tuple[int, ...]:
        return tuple(d for j, d in enumerate(self.radicands) if mask >> j & 1)

    def scalar(self, value: Union[Number, "TowerScalar"], imag: Number = 0) -> "TowerScalar":
        if isinstance(value, TowerScalar):
            return value.lift(self)
        return TowerScalar.from_gaussian(self, Fraction(value), Fraction(imag))

    def zero(self) -> "TowerScalar":
        return TowerScalar(self, {})

    def one(self) -> "TowerScalar":
        return TowerScalar(self, {0: (_ONE, _ZERO)})

    def i(self) -> "TowerScalar":
        return TowerScalar(self, {0: (_ZERO, _ONE)})

    def merge(self, other: "FieldTower") -> "FieldTower":
        tower = self
        for d in other.radicands:
            tower, _ = adjoin_sqrt(tower, d)
        return tower


def _dependent_subset(rads: Tuple[int, ...], target: int = 1) -> Optional[int]:
    """
    Mask of a subset of rads whose product equals target modulo squares, or None.
    With target=1 a non-empty subset is searched (dependence test).
    """
    primes: List[int] = sorted({p for d in rads for p in _prime_support(d)} | set(_prime_support(target)))
    bit = {p: k for k, p in enumerate(primes)}

    def vector(n: int) -> int:
        return reduce(lambda acc, p: acc | (1 << bit[p]), _prime_support(n), 0)

    # GF(2) elimination keeping track of which radicands were combined
    basis: Dict[int, Tuple[int, int]] = {}
    for j, d in enumerate(rads):
        vec, combo = vector(d), 1 << j
        while vec:
            lead = vec.bit_length() - 1
            if lead not in basis:
                basis[lead] = (vec, combo)
                break
            bvec, bcombo = basis[lead]
            vec, combo = vec ^ bvec, combo ^ bcombo
        else:
            if target == 1:
                return combo
    if target == 1:
        return None
    vec, combo = vector(target), 0
    while vec:
        lead = vec.bit_length() - 1
        if lead not in basis:
            return None
        bvec, bcombo = basis[lead]
        vec, combo = vec ^ bvec, combo ^ bcombo
    return combo


def adjoin_sqrt(tower: FieldTower, d: Union[int, Fraction]) -> Tuple[FieldTower, "TowerScalar"]:
    """Return a tower containing sqrt(d) and the scalar representing it"""
    d = Fraction(d)
    if d == 0:
        raise ValueError("Cannot adjoin sqrt(0)")
    # sqrt(p/q) = sqrt(p*q)/q
    n = abs(d.numerator * d.denominator)
    scale = Fraction(1, d.denominator)
    root, free = _square_free_split(n)
    scale *= root
    imag = d < 0
    if free == 1:
        mask, new_tower = 0, tower
    else:
        combo = _dependent_subset(tower.radicands, free)
        if combo is None:
            new_tower = FieldTower(tower.radicands + (free,))
            mask = 1 << new_tower._index[free]
        else:
            # prod of selected radicands = free * t**2
            product = tower.square_factor(combo)
            t_root, _ = _square_free_split(product // free)
            new_tower, mask = tower, combo
            scale /= t_root
    coeff = (_ZERO, scale) if imag else (scale, _ZERO)
    if new_tower is not tower:
        logger.debug(f"Extended tower {tower.radicands} by sqrt({free})")
    return new_tower, TowerScalar(new_tower, {mask: coeff})


class TowerScalar:
    """Immutable exact element of a FieldTower"""

    __slots__ = ("tower", "coeffs", "_hash")

    def __init__(self, tower: FieldTower, coeffs: Dict[int, Gaussian]):
        self.tower = tower
        self.coeffs = coeffs
        self._hash: Optional[int] = None

    @classmethod
    def from_gaussian(cls, tower: FieldTower, re_part: Fraction, im_part: Fraction = _ZERO) -> "TowerScalar":
        if re_part == 0 and im_part == 0:
            return cls(tower, {})
        return cls(tower, {0: (Fraction(re_part), Fraction(im_part))})

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_gaussian(self) -> bool:
        return all(mask == 0 for mask in self.coeffs)

    def rational(self) -> Optional[Fraction]:
        """The value as a Fraction when it is rational, else None"""
        if not self.coeffs:
            return _ZERO
        if self.is_gaussian() and self.coeffs[0][1] == 0:
            return self.coeffs[0][0]
        return None

    def is_one(self) -> bool:
        return self.coeffs == {0: (_ONE, _ZERO)}

    # -- tower handling ---------------------------------------------------

    def lift(self, tower: FieldTower) -> "TowerScalar":
        """Re-express in a tower in which every radicand of ours is representable"""
        if tower == self.tower:
            return self if tower is self.tower else TowerScalar(tower, self.coeffs)
        if tower.contains(self.tower):
            remap = [1 << tower._index[d] for d in self.tower.radicands]
            coeffs = {}
            for mask, value in self.coeffs.items():
                new_mask = 0
                for j, bit in enumerate(remap):
                    if mask >> j & 1:
                        new_mask |= bit
                coeffs[new_mask] = value
            return TowerScalar(tower, coeffs)
        images = []
        for d in self.tower.radicands:
            extended, root = adjoin_sqrt(tower, d)
            if extended != tower:
                raise TowerMismatchError(f"sqrt({d}) is not in {tower}")
            images.append(root)
        total = tower.zero()
        for mask, (re_part, im_part) in self.coeffs.items():
            term = TowerScalar.from_gaussian(tower, re_part, im_part)
            for j, root in enumerate(images):
                if mask >> j & 1:
                    term = term * root
            total = total + term
        return total

    def _coerce(self, other) -> Tuple["TowerScalar", "TowerScalar"]:
        if isinstance(other, TowerScalar):
            if other.tower is self.tower or other.tower == self.tower:
                return self, other
            if self.tower.contains(other.tower):
                return self, other.lift(self.tower)
            if other.tower.contains(self.tower):
                return self.lift(other.tower), other
            raise TowerMismatchError(f"Incompatible towers {self.tower} and {other.tower}")
        if isinstance(other, (int, Fraction)):
            return self, TowerScalar.from_gaussian(self.tower, Fraction(other))
        raise TypeError(f"Cannot combine TowerScalar with {type(other).__name__}")

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other) -> "TowerScalar":
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not b.coeffs:
            return a
        if not a.coeffs:
            return b
        coeffs = dict(a.coeffs)
        for mask, (br, bi) in b.coeffs.items():
            current = coeffs.get(mask)
            if current is None:
                coeffs[mask] = (br, bi)
                continue
            re_part, im_part = current[0] + br, current[1] + bi
            if re_part == 0 and im_part == 0:
                del coeffs[mask]
            else:
                coeffs[mask] = (re_part, im_part)
        return TowerScalar(a.tower, coeffs)

    __radd__ = __add__

    def __neg__(self) -> "TowerScalar":
        return TowerScalar(self.tower, {m: (-r, -i) for m, (r, i) in self.coeffs.items()})

    def __sub__(self, other) -> "TowerScalar":
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other) -> "TowerScalar":
        return (-self) + other

    def __mul__(self, other) -> "TowerScalar":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return TowerScalar(self.tower, {})
            q = Fraction(other)
            return TowerScalar(self.tower, {m: (r * q, i * q) for m, (r, i) in self.coeffs.items()})
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not a.coeffs or not b.coeffs:
            return TowerScalar(a.tower, {})
        tower = a.tower
        acc: Dict[int, List[Fraction]] = {}
        for ma, (ar, ai) in a.coeffs.items():
            for mb, (br, bi) in b.coeffs.items():
                common = ma & mb
                factor = tower.square_factor(common) if common else 1
                re_part = (ar * br - ai * bi) * factor
                im_part = (ar * bi + ai * br) * factor
                slot = acc.setdefault(ma ^ mb, [_ZERO, _ZERO])
                slot[0] += re_part
                slot[1] += im_part
        return TowerScalar(tower, {m: (r, i) for m, (r, i) in acc.items() if r or i})

    __rmul__ = __mul__

    def conjugate_i(self) -> "TowerScalar":
        """Image under i -> -i (radicals fixed)"""
        return TowerScalar(self.tower, {m: (r, -i) for m, (r, i) in self.coeffs.items()})

    def conjugate_radical(self, j: int) -> "TowerScalar":
        """Image under sqrt(d_j) -> -sqrt(d_j)"""
        bit = 1 << j
        return TowerScalar(
            self.tower,
            {m: ((-r, -i) if m & bit else (r, i)) for m, (r, i) in self.coeffs.items()},
        )

    def _norm_and_cofactor(self) -> Tuple["TowerScalar", "TowerScalar"]:
        cofactor = self.tower.one()
        norm = self
        for j in range(len(self.tower)):
            conj = norm.conjugate_radical(j)
            cofactor = cofactor * conj
            norm = norm * conj
        return norm, cofactor

    def norm(self) -> "TowerScalar":
        """Product over all sign changes of the radicals; lies in Q(i)"""
        return self._norm_and_cofactor()[0]

    def inv(self) -> "TowerScalar":
        if not self.coeffs:
            raise ZeroDivisionError("Inverse of zero in field tower")
        norm, numerator = self._norm_and_cofactor()
        re_part, im_part = norm.coeffs[0]
        modulus = re_part * re_part + im_part * im_part
        return numerator * TowerScalar.from_gaussian(self.tower, re_part / modulus, -im_part / modulus)

    def __truediv__(self, other) -> "TowerScalar":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("Division by zero scalar")
            return self * (Fraction(1) / Fraction(other))
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        return a * b.inv()

    def __rtruediv__(self, other) -> "TowerScalar":
        return self.inv() * other

    def __pow__(self, exponent: int) -> "TowerScalar":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inv() ** (-exponent)
        result = self.tower.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    # -- comparison / hashing --------------------------------------------

    def _canonical_items(self) -> Tuple:
        return tuple(
            sorted((self.tower.mask_radicands(m), r, i) for m, (r, i) in self.coeffs.items())
        )

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.rational() == Fraction(other)
        if not isinstance(other, TowerScalar):
            return NotImplemented
        try:
            a, b = self._coerce(other)
        except TowerMismatchError:
            return False
        return a.coeffs == b.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            q = self.rational()
            self._hash = hash(q) if q is not None else hash(self._canonical_items())
        return self._hash

    def sort_key(self) -> str:
        return format_scalar(self)

    def __repr__(self) -> str:
        return f"TowerScalar({format_scalar(self)!r})"

    def __str__(self) -> str:
        return format_scalar(self)

    # -- numerics ---------------------------------------------------------

    def to_sympy(self) -> sympy.Expr:
        total = sympy.Integer(0)
        for mask, (re_part, im_part) in self.coeffs.items():
            radical = sympy.Integer(1)
            for d in self.tower.mask_radicands(mask):
                radical *= sympy.sqrt(d)
            total += (sympy.Rational(re_part.numerator, re_part.denominator)
                      + sympy.I * sympy.Rational(im_part.numerator, im_part.denominator)) * radical
        return total


def embed_complex(a: TowerScalar, precision: int = 53) -> mpmath.mpc:
    """Numeric image of a at the given binary precision"""
    if precision < 53:
        raise ValueError("precision must be at least 53 bits")
    with mpmath.workprec(precision + 16):
        total = mpmath.mpc(0)
        for mask, (re_part, im_part) in a.coeffs.items():
            radical = mpmath.mpf(1)
            for d in a.tower.mask_radicands(mask):
                radical *= mpmath.sqrt(d)
            value = mpmath.mpc(
                mpmath.mpf(re_part.numerator) / re_part.denominator,
                mpmath.mpf(im_part.numerator) / im_part.denominator,
            )
            total += value * radical
    with mpmath.workprec(precision):
        return +total


# -- literal grammar -------------------------------------------------------

_LITERAL_CHARS = re.compile(r"^[\s0-9+\-*/().ir]*$")
_BAD_TOKEN = re.compile(r"r(?!\d)|[0-9)]\s*\(|i\s*\d")


def _term_string(q: Fraction, tokens: List[str]) -> str:
    if not tokens:
        return str(q)
    body = "*".join(tokens)
    if q == 1:
        return body
    if q == -1:
        return f"-{body}"
    return f"{q}*{body}"


def format_scalar(a: TowerScalar) -> str:
    """Canonical printing: terms ordered by radical subset, real part before imaginary part"""
    if not a.coeffs:
        return "0"
    order = sorted(a.coeffs, key=lambda m: (bin(m).count("1"), a.tower.mask_radicands(m)))
    parts: List[str] = []
    for mask in order:
        radicals = [f"r{d}" for d in a.tower.mask_radicands(mask)]
        re_part, im_part = a.coeffs[mask]
        if re_part:
            parts.append(_term_string(re_part, radicals))
        if im_part:
            parts.append(_term_string(im_part, ["i"] + radicals))
    text = parts[0]
    for part in parts[1:]:
        text += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return text


def _collect_radicands(expr: sympy.Expr) -> List[Fraction]:
    found = []
    for power in expr.atoms(sympy.Pow):
        if power.exp in (sympy.Rational(1, 2), sympy.Rational(-1, 2)):
            if not power.base.is_Rational:
                raise RepresentabilityError(f"Nested radical {power} is outside a quadratic tower")
            found.append(Fraction(int(power.base.p), int(power.base.q)))
    return found


def scalar_from_sympy(expr: sympy.Expr, tower: FieldTower) -> Tuple[FieldTower, TowerScalar]:
    """Convert a sympy number built from rationals, I and square roots of rationals"""
    expr = sympy.sympify(expr)
    for d in _collect_radicands(expr):
        tower, _ = adjoin_sqrt(tower, d)

    def convert(node: sympy.Expr) -> TowerScalar:
        if node.is_Rational:
            return tower.scalar(Fraction(int(node.p), int(node.q)))
        if node is sympy.I:
            return tower.i()
        if node.is_Add:
            return reduce(lambda acc, arg: acc + convert(arg), node.args, tower.zero())
        if node.is_Mul:
            return reduce(lambda acc, arg: acc * convert(arg), node.args, tower.one())
        if node.is_Pow:
            if node.exp.is_Integer:
                return convert(node.base) ** int(node.exp)
            if node.exp in (sympy.Rational(1, 2), sympy.Rational(-1, 2)) and node.base.is_Rational:
                _, root = adjoin_sqrt(tower, Fraction(int(node.base.p), int(node.base.q)))
                return root if node.exp > 0 else root.inv()
        raise RepresentabilityError(f"Cannot represent {node} in a quadratic tower")

    return tower, convert(expr)


def parse_scalar(text: str, tower: Optional[FieldTower] = None) -> Tuple[FieldTower, TowerScalar]:
    """Parse a scalar literal such as '1/2 + 3/4*i - 2*r3'; the tower is extended as needed"""
    tower = tower or FieldTower()
    if not isinstance(text, str):
        if isinstance(text, int):
            return tower, tower.scalar(text)
        raise ScalarParseError(f"Scalar literal must be a string, got {type(text).__name__}")
    if not text.strip() or not _LITERAL_CHARS.match(text) or _BAD_TOKEN.search(text):
        raise ScalarParseError(f"Malformed scalar literal {text!r}")
    source = re.sub(r"\bi\b", "I", text)
    source = re.sub(r"r(\d+)", r"sqrt(\1)", source)
    try:
        expr = parse_expr(source, evaluate=True)
    except (SyntaxError, TypeError, TokenError) as e:
        raise ScalarParseError(f"Malformed scalar literal {text!r}: {e}") from e
    if expr.free_symbols:
        raise ScalarParseError(f"Unknown symbols {sorted(map(str, expr.free_symbols))} in {text!r}")
    try:
        return scalar_from_sympy(expr, tower)
    except RepresentabilityError as e:
        raise ScalarParseError(str(e)) from e
