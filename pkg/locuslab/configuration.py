"""
Hyperplane configurations: validation, JSON documents, and the geometric
constructions (orthogonal union, isotropic projectivisation and reduction,
two-dimensional decomposition).
"""

import json
import logging
import random
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from . import linalg
from .errors import ConfigurationError, RepresentabilityError, ScalarParseError
from .scalar import FieldTower, TowerScalar, adjoin_sqrt, format_scalar, parse_scalar
from .symbolic import K_BLOCK, X_BLOCK, LinearForm, MultiPoly, RationalFn, Space

logger = logging.getLogger(__name__)

ScalarLike = Union[int, TowerScalar]
DEFAULT_REDUCTION_SEED = 5


@dataclass(frozen=True)
class Hyperplane:
    """(normal, x) + offset = 0 with a positive multiplicity"""

    normal: Tuple[TowerScalar, ...]
    offset: TowerScalar
    multiplicity: int

    def norm2(self) -> TowerScalar:
        return linalg.dot(self.normal, self.normal)

    def augmented(self) -> List[TowerScalar]:
        return list(self.normal) + [self.offset]

    def printed_normal(self) -> Tuple[str, ...]:
        return tuple(format_scalar(c) for c in self.normal)

    def lifted(self, tower: FieldTower) -> "Hyperplane":
        return Hyperplane(tuple(c.lift(tower) for c in self.normal), self.offset.lift(tower), self.multiplicity)


@dataclass(frozen=True)
class Configuration:
    """Finite list of non-isotropic hyperplanes in C^n with multiplicities"""

    dimension: int
    tower: FieldTower
    hyperplanes: Tuple[Hyperplane, ...]

    @classmethod
    def build(
        cls,
        dimension: int,
        entries: Iterable[Tuple[Sequence[ScalarLike], ScalarLike, int]],
        tower: Optional[FieldTower] = None,
    ) -> "Configuration":
        """
        Validate and normalize (normal, offset, multiplicity) triples.  Negative
        multiplicities m become -1-m; zero multiplicities are dropped;
        proportional hyperplanes are merged when their multiplicities agree.
        """
        tower = tower or FieldTower()
        raw = []
        for normal, offset, multiplicity in entries:
            normal = list(normal)
            for c in normal + [offset]:
                if isinstance(c, TowerScalar):
                    tower = tower.merge(c.tower)
            raw.append((normal, offset, int(multiplicity)))

        hyperplanes: List[Hyperplane] = []
        for position, (normal, offset, multiplicity) in enumerate(raw):
            if len(normal) != dimension:
                raise ConfigurationError(
                    f"Hyperplane {position} has a normal of length {len(normal)}, expected {dimension}"
                )
            if multiplicity < 0:
                multiplicity = -1 - multiplicity
            if multiplicity == 0:
                logger.debug(f"Dropping hyperplane {position} with zero multiplicity")
                continue
            plane = Hyperplane(tuple(tower.scalar(c) for c in normal), tower.scalar(offset), multiplicity)
            if not any(plane.normal):
                raise ConfigurationError(f"Hyperplane {position} has a zero normal")
            if not plane.norm2():
                raise ConfigurationError(f"Hyperplane {position} has an isotropic normal: (a,a) = 0")
            duplicate = next(
                (j for j, other in enumerate(hyperplanes)
                 if linalg.proportional(plane.augmented(), other.augmented())),
                None,
            )
            if duplicate is not None:
                if hyperplanes[duplicate].multiplicity != plane.multiplicity:
                    raise ConfigurationError(
                        f"Hyperplane {position} repeats hyperplane {duplicate} with a different multiplicity"
                    )
                logger.debug(f"Merging hyperplane {position} into {duplicate}")
                continue
            hyperplanes.append(plane)
        return cls(dimension, tower, tuple(hyperplanes))

    # -- derived data -----------------------------------------------------

    @property
    def is_linear(self) -> bool:
        return all(not h.offset for h in self.hyperplanes)

    @property
    def total_multiplicity(self) -> int:
        return sum(h.multiplicity for h in self.hyperplanes)

    def __len__(self) -> int:
        return len(self.hyperplanes)

    def normals(self) -> List[Tuple[TowerScalar, ...]]:
        return [h.normal for h in self.hyperplanes]

    def phase_space(self) -> Space:
        return Space.phase(self.dimension)

    def form(self, index: int, space: Space, block: str = X_BLOCK, with_offset: bool = True) -> LinearForm:
        h = self.hyperplanes[index]
        return LinearForm.on_block(space, block, h.normal, h.offset if with_offset else None)

    def forms(self, space: Space, block: str = X_BLOCK, with_offset: bool = True) -> List[LinearForm]:
        return [self.form(j, space, block, with_offset) for j in range(len(self))]

    def gram_matrix(self) -> List[List[TowerScalar]]:
        return [[linalg.dot(a.normal, b.normal) for b in self.hyperplanes] for a in self.hyperplanes]

    def spectral_polynomial(self, space: Space) -> MultiPoly:
        """A(k) = prod (alpha, k)**m_alpha"""
        result = MultiPoly.constant(space, self.tower, 1)
        for form, h in zip(self.forms(space, K_BLOCK, with_offset=False), self.hyperplanes):
            result = result * form.as_poly() ** h.multiplicity
        return result

    def potential(self, space: Space) -> RationalFn:
        """u(x) = sum m(m+1)(a,a) / ((a,x)+c)**2"""
        total = RationalFn.constant(space, self.tower, 0)
        for form, h in zip(self.forms(space, X_BLOCK), self.hyperplanes):
            weight = h.norm2() * (h.multiplicity * (h.multiplicity + 1))
            total = total + RationalFn.inverse_power(form, 2, weight)
        return total

    # -- transformations --------------------------------------------------

    def sorted(self) -> "Configuration":
        """Hyperplanes in lexicographic order of printed normals (then offsets)"""
        order = sorted(self.hyperplanes, key=lambda h: (h.printed_normal(), format_scalar(h.offset)))
        return Configuration(self.dimension, self.tower, tuple(order))

    def permuted(self, order: Sequence[int]) -> "Configuration":
        return Configuration(self.dimension, self.tower, tuple(self.hyperplanes[j] for j in order))

    def rescaled(self, index: int, factor: ScalarLike) -> "Configuration":
        planes = list(self.hyperplanes)
        h = planes[index]
        planes[index] = Hyperplane(tuple(c * factor for c in h.normal), h.offset * factor, h.multiplicity)
        return Configuration.build(self.dimension, [(p.normal, p.offset, p.multiplicity) for p in planes],
                                   self.tower)

    def transformed(self, matrix: Sequence[Sequence[ScalarLike]]) -> "Configuration":
        """Image under x -> Q x for orthogonal Q (normals map to Q alpha)"""
        entries = []
        for h in self.hyperplanes:
            normal = [linalg.dot([self.tower.scalar(q) if not isinstance(q, TowerScalar) else q for q in row],
                                 h.normal) for row in matrix]
            entries.append((normal, h.offset, h.multiplicity))
        return Configuration.build(self.dimension, entries, self.tower)

    def translated(self, vector: Sequence[ScalarLike]) -> "Configuration":
        """Image under x -> x + v"""
        entries = []
        for h in self.hyperplanes:
            shift = linalg.dot(h.normal, [self.tower.scalar(v) if not isinstance(v, TowerScalar) else v
                                          for v in vector])
            entries.append((h.normal, h.offset - shift, h.multiplicity))
        return Configuration.build(self.dimension, entries, self.tower)

    def replaced(self, index: int, normal: Sequence[ScalarLike], offset: ScalarLike = 0) -> "Configuration":
        entries = [(h.normal, h.offset, h.multiplicity) for h in self.hyperplanes]
        entries[index] = (list(normal), offset, entries[index][2])
        return Configuration.build(self.dimension, entries, self.tower)

    # -- documents --------------------------------------------------------

    def to_document(self) -> Dict[str, Any]:
        return {
            "dimension": self.dimension,
            "tower": list(self.tower.radicands),
            "hyperplanes": [
                {
                    "normal": list(h.printed_normal()),
                    "offset": format_scalar(h.offset),
                    "multiplicity": h.multiplicity,
                }
                for h in self.hyperplanes
            ],
        }

    @classmethod
    def from_document(cls, doc: Dict[str, Any]) -> "Configuration":
        try:
            dimension = int(doc["dimension"])
            tower = FieldTower(doc.get("tower", []))
            entries = []
            for h in doc["hyperplanes"]:
                normal = []
                for literal in h["normal"]:
                    tower, value = parse_scalar(literal, tower)
                    normal.append(value)
                tower, offset = parse_scalar(h.get("offset", "0"), tower)
                entries.append((normal, offset, int(h.get("multiplicity", 1))))
        except (KeyError, TypeError) as e:
            raise ConfigurationError(f"Malformed configuration document: missing or invalid {e}") from e
        return cls.build(dimension, entries, tower)


def dumps(config: Configuration) -> str:
    return json.dumps(config.to_document(), indent=2, sort_keys=True) + "\n"


def _position(text: str, needle: str) -> Tuple[Optional[int], Optional[int]]:
    offset = text.find(needle)
    if offset < 0:
        return None, None
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def loads(text: str) -> Configuration:
    """Parse a configuration document; literal errors carry line/column"""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Invalid JSON: {e.msg} (line {e.lineno}, column {e.colno})") from e
    try:
        return Configuration.from_document(doc)
    except ScalarParseError as e:
        literal = str(e).split("'")[1] if "'" in str(e) else ""
        line, column = _position(text, f'"{literal}"') if literal else (None, None)
        raise ScalarParseError(str(e), line, column) from e


def load(path: str) -> Configuration:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


# -- constructions -------------------------------------------------------------


def orthogonal_union(first: Configuration, second: Configuration, direct_sum: bool = True) -> Configuration:
    """
    Union of configurations with mutually orthogonal normal spans.  With
    direct_sum the ambient space is C^(n1+n2); otherwise both must live in the
    same C^n and orthogonality is checked.
    """
    tower = first.tower.merge(second.tower)
    if direct_sum:
        dimension = first.dimension + second.dimension
        zero = tower.zero()
        entries = [(list(h.normal) + [zero] * second.dimension, h.offset, h.multiplicity)
                   for h in first.hyperplanes]
        entries += [([zero] * first.dimension + list(h.normal), h.offset, h.multiplicity)
                    for h in second.hyperplanes]
        return Configuration.build(dimension, entries, tower)
    if first.dimension != second.dimension:
        raise ConfigurationError("Configurations live in spaces of different dimension")
    for a in first.hyperplanes:
        for b in second.hyperplanes:
            if linalg.dot(a.normal, b.normal):
                raise ConfigurationError("Normal spans are not orthogonal")
    entries = [(h.normal, h.offset, h.multiplicity) for h in first.hyperplanes + second.hyperplanes]
    return Configuration.build(first.dimension, entries, tower)


def isotropic_projectivisation(config: Configuration) -> Configuration:
    """(a, x) + c = 0 in C^n  ->  (a, x) + c (x_{n+1} + i x_{n+2}) = 0 in C^(n+2)"""
    tower = config.tower
    i = tower.i()
    entries = [(list(h.normal) + [h.offset, i * h.offset], tower.zero(), h.multiplicity)
               for h in config.hyperplanes]
    return Configuration.build(config.dimension + 2, entries, tower)


@dataclass
class Reduction:
    """Result of an isotropic reduction"""

    configuration: Configuration
    basis: List[List[TowerScalar]]
    shift: List[TowerScalar]
    kernel_dimension: int
    fallback: bool = False


def _orthonormalize(vectors: List[List[TowerScalar]], tower: FieldTower) -> Tuple[FieldTower, List[List[TowerScalar]]]:
    """Gram-Schmidt for the bilinear form, then scale to unit length (needs rational norms)"""
    pending = [list(v) for v in vectors]
    orthogonal: List[List[TowerScalar]] = []
    while pending:
        v = pending.pop(0)
        for w in orthogonal:
            coefficient = linalg.dot(v, w) / linalg.dot(w, w)
            v = [a - coefficient * b for a, b in zip(v, w)]
        if not linalg.dot(v, v):
            partner = next((p for p in pending if linalg.dot([a + b for a, b in zip(v, p)],
                                                             [a + b for a, b in zip(v, p)])), None)
            if partner is None:
                raise ConfigurationError("Induced form on the complement is degenerate")
            v = [a + b for a, b in zip(v, partner)]
            for w in orthogonal:
                coefficient = linalg.dot(v, w) / linalg.dot(w, w)
                v = [a - coefficient * b for a, b in zip(v, w)]
        orthogonal.append(v)
    unit = []
    for v in orthogonal:
        q = linalg.dot(v, v).rational()
        if q is None:
            raise RepresentabilityError("Complement basis norm is not rational; cannot normalize in a quadratic tower")
        tower, root = adjoin_sqrt(tower, q)
        inverse = root.inv()
        unit.append([c.lift(tower) * inverse for c in v])
    return tower, unit


def _hermitian(a: Sequence[TowerScalar], b: Sequence[TowerScalar]) -> TowerScalar:
    return linalg.dot(a, [c.conjugate_i() for c in b])


def isotropic_reduction(
    config: Configuration,
    shift: Optional[Sequence[ScalarLike]] = None,
    seed: int = DEFAULT_REDUCTION_SEED,
    attempts: int = 100,
) -> Reduction:
    """
    Intersect a degenerate linear configuration with a + L, where
    V + V^perp = K (+) L, K the kernel of the form on the normal span V.
    L is the Hermitian complement of K in V + V^perp; when the form on it is
    degenerate a basis completion from V + V^perp is used and flagged.
    """
    if not config.is_linear:
        raise ConfigurationError("Isotropic reduction needs a linear configuration")
    tower = config.tower
    zero = tower.zero()
    n = config.dimension
    span, _ = linalg.rref(config.normals())
    gram = [[linalg.dot(a, b) for b in span] for a in span]
    kernel = []
    for coefficients in linalg.nullspace(gram, len(span), zero):
        kernel.append([sum((c * row[j] for c, row in zip(coefficients, span)), zero) for j in range(n)])
    if not kernel:
        raise ConfigurationError("Form on the normal span is non-degenerate; nothing to reduce")
    perp = linalg.nullspace(span, n, zero)
    whole, _ = linalg.rref(span + perp)

    pairing = [[_hermitian(w, kappa) for w in whole] for kappa in kernel]
    complement = []
    for coefficients in linalg.nullspace(pairing, len(whole), zero):
        complement.append([sum((c * w[j] for c, w in zip(coefficients, whole)), zero) for j in range(n)])
    fallback = False
    try:
        tower, basis = _orthonormalize(complement, tower)
    except ConfigurationError:
        logger.warning("Hermitian complement is degenerate; falling back to basis completion")
        fallback = True
        tower, basis = _orthonormalize(linalg.extend_basis(kernel, whole), tower)

    planes = [h.lifted(tower) for h in config.hyperplanes]
    normals = [[linalg.dot(h.normal, b) for b in basis] for h in planes]
    for j, normal in enumerate(normals):
        if not any(normal):
            raise ConfigurationError(f"Hyperplane {j} is parallel to the reduction subspace")

    def attempt(vector: List[TowerScalar]) -> Optional[Configuration]:
        entries = [(normal, linalg.dot(h.normal, vector), h.multiplicity) for normal, h in zip(normals, planes)]
        try:
            reduced = Configuration.build(len(basis), entries, tower)
        except ConfigurationError as e:
            logger.debug(f"Reduction shift rejected: {e}")
            return None
        # merged hyperplanes mean two of them collided on a + L
        return reduced if len(reduced) == len(planes) else None

    if shift is not None:
        vector = [v.lift(tower) if isinstance(v, TowerScalar) else tower.scalar(v) for v in shift]
        reduced = attempt(vector)
        if reduced is None:
            raise ConfigurationError("Supplied shift is not generic: hyperplanes collide on a + L")
        return Reduction(reduced, basis, vector, len(kernel), fallback)

    rng = random.Random(seed)
    for _ in range(attempts):
        vector = [tower.scalar(rng.randint(-5, 5)) for _ in range(n)]
        reduced = attempt(vector)
        if reduced is not None:
            logger.info(f"Isotropic reduction to dimension {len(basis)} (kernel dimension {len(kernel)})")
            return Reduction(reduced, basis, vector, len(kernel), fallback)
    raise ConfigurationError(f"No generic shift found in {attempts} attempts")


@dataclass
class Plane:
    """A 2D subspace spanned by normals and the configuration indices it contains"""

    basis: Tuple[Tuple[TowerScalar, ...], ...]
    indices: Tuple[int, ...]


@dataclass
class PlaneDecomposition:
    planes: List[Plane] = field(default_factory=list)

    def containing(self, index: int) -> List[Plane]:
        return [p for p in self.planes if index in p.indices]

    def __len__(self) -> int:
        return len(self.planes)


def two_dim_decomposition(config: Configuration) -> PlaneDecomposition:
    """Group normals by the 2D subspaces spanned by pairs"""
    if not config.is_linear:
        raise ConfigurationError("Two-dimensional decomposition needs a linear configuration")
    normals = config.normals()
    if len(normals) == 1:
        return PlaneDecomposition([Plane((normals[0],), (0,))])
    decomposition = PlaneDecomposition()
    for a in range(len(normals)):
        for b in range(a + 1, len(normals)):
            if any(a in p.indices and b in p.indices for p in decomposition.planes):
                continue
            basis = (normals[a], normals[b])
            members = tuple(j for j, v in enumerate(normals) if linalg.in_span(basis, v))
            decomposition.planes.append(Plane(basis, members))
    logger.debug(f"Two-dimensional decomposition: {len(decomposition)} planes")
    return decomposition
