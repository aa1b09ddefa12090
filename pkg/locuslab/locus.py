"""
Locus equations: for every hyperplane alpha and j = 1..m_alpha,

    sum_{beta != alpha} m_b(m_b+1)(b,b)(a,b)^(2j-1) / ((b,x)+c_b)^(2j+1) = 0

identically on (a,x)+c_a = 0.  Also the plane-by-plane, large-multiplicity
and affine structure checks.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import linalg
from .configuration import Configuration, PlaneDecomposition, two_dim_decomposition
from .errors import ConfigurationError
from .symbolic import RationalFn, Space, is_zero, restrict_to_hyperplane

logger = logging.getLogger(__name__)


@dataclass
class LocusItem:
    hyperplane: int
    j: int
    residual: str
    mode: str
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"hyperplane": self.hyperplane, "j": self.j, "residual": self.residual, "mode": self.mode}


@dataclass
class LocusReport:
    items: List[LocusItem] = field(default_factory=list)
    planes_examined: Optional[int] = None

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    def failures(self) -> List[LocusItem]:
        return [item for item in self.items if not item.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {"pass": self.passed, "items": [item.to_dict() for item in self.items]}

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "LocusReport":
        items = [
            LocusItem(int(i["hyperplane"]), int(i["j"]), str(i["residual"]), str(i["mode"]), i["residual"] == "0")
            for i in doc.get("items", [])
        ]
        return cls(items)

    def render(self) -> str:
        lines = [f"Locus verdict: {'PASS' if self.passed else 'FAIL'}", "-" * 60]
        for item in self.items:
            status = "ok" if item.passed else "FAIL"
            lines.append(f"hyperplane {item.hyperplane} | j={item.j} | {item.mode} | {status}")
            if not item.passed:
                lines.append(f"    residual: {item.residual}")
        if self.planes_examined is not None:
            lines.append(f"planes examined: {self.planes_examined}")
        return "\n".join(lines)


def locus_residual(config: Configuration, alpha: int, j: int,
                   members: Optional[Sequence[int]] = None) -> RationalFn:
    """Left side of the j-th locus equation at hyperplane alpha, restricted to it"""
    space = Space.plain([f"x{v + 1}" for v in range(config.dimension)])
    forms = config.forms(space)
    target = config.hyperplanes[alpha]
    h = forms[alpha]
    total: Optional[RationalFn] = None
    for b in (members if members is not None else range(len(config))):
        if b == alpha:
            continue
        beta = config.hyperplanes[b]
        pairing = linalg.dot(target.normal, beta.normal)
        if not pairing:
            continue
        weight = beta.norm2() * pairing ** (2 * j - 1) * (beta.multiplicity * (beta.multiplicity + 1))
        term = restrict_to_hyperplane(RationalFn.inverse_power(forms[b], 2 * j + 1, weight), h)
        total = term if total is None else total + term
    if total is None:
        return restrict_to_hyperplane(RationalFn.constant(space, config.tower, 0), h)
    return total


def _check_item(args: Tuple[Configuration, int, int, Optional[Tuple[int, ...]], str, int]) -> LocusItem:
    config, alpha, j, members, mode, seed = args
    residual = locus_residual(config, alpha, j, members)
    outcome = is_zero(residual, mode, seed)
    logger.debug(f"hyperplane {alpha}, j={j}: {'zero' if outcome.zero else 'nonzero'}")
    return LocusItem(alpha, j, "0" if outcome.zero else residual.format(), mode, outcome.zero)


def _run(tasks: List[Tuple], jobs: int) -> List[LocusItem]:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_check_item, tasks))
    return [_check_item(task) for task in tasks]


def _tasks(config: Configuration, mode: str, seed: int,
           members: Optional[Tuple[int, ...]] = None) -> List[Tuple]:
    indices = members if members is not None else range(len(config))
    return [
        (config, alpha, j, members, mode, seed)
        for alpha in indices
        for j in range(1, config.hyperplanes[alpha].multiplicity + 1)
    ]


def _check_non_isotropic(config: Configuration) -> None:
    for index, h in enumerate(config.hyperplanes):
        if not h.norm2():
            raise ConfigurationError(f"Hyperplane {index} is isotropic")


def verify_affine_locus(config: Configuration, mode: str = "exact", jobs: int = 1, seed: int = 0) -> LocusReport:
    _check_non_isotropic(config)
    logger.info(f"Checking locus equations for {len(config)} hyperplanes in C^{config.dimension} ({mode})")
    report = LocusReport(_run(_tasks(config, mode, seed), jobs))
    logger.info(f"Locus verdict: {'pass' if report.passed else 'fail'}")
    return report


def verify_linear_locus(config: Configuration, mode: str = "exact", jobs: int = 1, seed: int = 0) -> LocusReport:
    if not config.is_linear:
        raise ConfigurationError("verify_linear_locus needs a linear configuration (all offsets zero)")
    return verify_affine_locus(config, mode, jobs, seed)


def verify_locus(config: Configuration, mode: str = "exact", jobs: int = 1, seed: int = 0) -> LocusReport:
    """Linear or affine check depending on the offsets"""
    if config.is_linear:
        return verify_linear_locus(config, mode, jobs, seed)
    return verify_affine_locus(config, mode, jobs, seed)


def verify_via_2d_decomposition(config: Configuration, mode: str = "exact", jobs: int = 1,
                                seed: int = 0) -> LocusReport:
    """Locus equations summed only over each two-dimensional subsystem"""
    decomposition = two_dim_decomposition(config)
    tasks: List[Tuple] = []
    for plane in decomposition.planes:
        if len(plane.indices) < 2:
            continue
        tasks.extend(_tasks(config, mode, seed, plane.indices))
    report = LocusReport(_run(tasks, jobs), planes_examined=len(decomposition))
    logger.info(f"Plane-by-plane verdict over {len(decomposition)} planes: {'pass' if report.passed else 'fail'}")
    return report


@dataclass
class CoxeterCheck:
    """Hyperplanes of large multiplicity and any reflection that fails to permute the configuration"""

    large: List[int]
    counterexamples: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pass": self.passed,
            "large": self.large,
            "counterexamples": [{"reflection": b, "hyperplane": a} for b, a in self.counterexamples],
        }


def large_multiplicity_indices(config: Configuration, decomposition: PlaneDecomposition,
                               count_self: bool = True) -> List[int]:
    """
    beta is large when every 2D plane through it holds at most m_beta + 1
    distinct normals (beta itself counted unless count_self is False).
    """
    large = []
    for index, h in enumerate(config.hyperplanes):
        limit = h.multiplicity + 1
        counts = [len(p.indices) - (0 if count_self else 1) for p in decomposition.containing(index)]
        if all(count <= limit for count in counts):
            large.append(index)
    return large


def large_multiplicity_coxeter_check(config: Configuration, count_self: bool = True) -> CoxeterCheck:
    decomposition = two_dim_decomposition(config)
    large = large_multiplicity_indices(config, decomposition, count_self)
    check = CoxeterCheck(large)
    for b in large:
        beta = config.hyperplanes[b]
        scale = beta.norm2().inv() * 2
        for a, alpha in enumerate(config.hyperplanes):
            factor = linalg.dot(alpha.normal, beta.normal) * scale
            image = [x - factor * y for x, y in zip(alpha.normal, beta.normal)]
            if not any(
                linalg.proportional(image, gamma.normal) and gamma.multiplicity == alpha.multiplicity
                for gamma in config.hyperplanes
            ):
                check.counterexamples.append((b, a))
    if check.counterexamples:
        logger.warning(f"Reflections failing to preserve the configuration: {check.counterexamples}")
    return check


@dataclass
class StructureReport:
    """Per-flat linear checks and per-parallel-class one-dimensional checks"""

    flats: List[Tuple[Tuple[int, ...], LocusReport]] = field(default_factory=list)
    parallel_classes: List[Tuple[Tuple[int, ...], LocusReport]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for _, r in self.flats) and all(r.passed for _, r in self.parallel_classes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pass": self.passed,
            "flats": [{"hyperplanes": list(m), "pass": r.passed} for m, r in self.flats],
            "parallel_classes": [{"hyperplanes": list(m), "pass": r.passed} for m, r in self.parallel_classes],
        }


def _remap(report: LocusReport, members: Sequence[int]) -> LocusReport:
    for item in report.items:
        item.hyperplane = members[item.hyperplane]
    return report


def structure_check_affine(config: Configuration, mode: str = "exact", seed: int = 0) -> StructureReport:
    """
    (1) For every codimension-2 intersection flat (a point when n = 2), the
    hyperplanes through it, translated to the origin, form a linear locus.
    (2) Every class of parallel hyperplanes forms a one-dimensional affine locus.
    """
    planes = config.hyperplanes
    report = StructureReport()
    seen = set()
    for a in range(len(planes)):
        for b in range(a + 1, len(planes)):
            if linalg.proportional(planes[a].normal, planes[b].normal):
                continue
            basis = (planes[a].augmented(), planes[b].augmented())
            members = tuple(j for j, h in enumerate(planes) if linalg.in_span(basis, h.augmented()))
            if members in seen:
                continue
            seen.add(members)
            sub = Configuration.build(
                config.dimension,
                [(planes[j].normal, 0, planes[j].multiplicity) for j in members],
                config.tower,
            )
            report.flats.append((members, _remap(verify_linear_locus(sub, mode, seed=seed), members)))

    classes: List[List[int]] = []
    for j, h in enumerate(planes):
        home = next((c for c in classes if linalg.proportional(planes[c[0]].normal, h.normal)), None)
        if home is None:
            classes.append([j])
        else:
            home.append(j)
    for members in classes:
        if len(members) < 2:
            continue
        reference = planes[members[0]].normal
        pivot = next(v for v, c in enumerate(reference) if c)
        entries = []
        for j in members:
            ratio = planes[j].normal[pivot] / reference[pivot]
            entries.append(([config.tower.one()], planes[j].offset / ratio, planes[j].multiplicity))
        line = Configuration.build(1, entries, config.tower)
        report.parallel_classes.append((tuple(members), _remap(verify_affine_locus(line, mode, seed=seed), members)))
    logger.info(f"Structure check: {len(report.flats)} flats, {len(report.parallel_classes)} parallel classes")
    return report
