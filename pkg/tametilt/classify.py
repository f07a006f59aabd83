"""
Tilting Classification

Large tilting modules up to equivalence are the pairs (Y, lambda) of a branch
module and a subset of the tube index family. This module builds the
descriptor of a pair, splits it into torsion and torsion-free parts, dualizes
it to a cotilting descriptor and evaluates the structural predicates.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Tuple

from .branch import (
    BranchModule,
    check_branch_module,
    complete_to_branch,
    enumerate_branch_modules,
    exceptional_violation,
    reg_comp_factor_set,
)
from .errors import TametiltError
from .localize import QuasiSimpleSet, localization_tilting, segment_corays
from .registry import REST_TUBE, LambdaSet, TubeRegistry, validate_lambda
from .tube import QuasiSimple, RegPoint, Tube, sort_points, top

logger = logging.getLogger(__name__)


class LabelKind(Enum):
    """Shape of the torsion-free part"""
    LUKAS = "lukas"
    PROJGEN = "projgen"


class StructureCase(Enum):
    """How a tube meets the resolving subcategory"""
    BRANCH = "i"     # some modules, no complete ray
    RAYS = "ii"      # some complete rays
    EMPTY = "iii"    # nothing from the tube


def _qs_keys(qs_set: Iterable[QuasiSimple]) -> List[str]:
    return [qs.key for qs in sorted(qs_set, key=lambda q: q.sort_key)]


@dataclass(frozen=True)
class TorsionFreeLabel:
    """Lukas module over R_U, or a projective generator over R_V"""
    kind: LabelKind
    locset: QuasiSimpleSet

    def to_json(self, reg: Optional[TubeRegistry] = None) -> Dict[str, Any]:
        return {"kind": self.kind.value, "locset": self.locset.to_json(reg)}


@dataclass(frozen=True)
class TubeTorsion:
    tube: Tube
    finite: FrozenSet[RegPoint] = frozenset()
    pruefer: FrozenSet[QuasiSimple] = frozenset()

    @property
    def class_count(self) -> int:
        return len(self.finite) + len(self.pruefer)

    def to_json(self) -> Dict[str, Any]:
        return {"finite": [str(p) for p in sort_points(self.finite)], "pruefer": _qs_keys(self.pruefer)}


@dataclass(frozen=True)
class TiltingDescriptor:
    """Canonical data of the large tilting module T_(Y, lambda)"""
    registry: TubeRegistry
    branch: BranchModule
    lam: LambdaSet
    torsion: Tuple[TubeTorsion, ...]
    label: TorsionFreeLabel
    u_set: QuasiSimpleSet
    v_set: QuasiSimpleSet
    r_set: QuasiSimpleSet

    @property
    def pair(self) -> Tuple[BranchModule, LambdaSet]:
        return (self.branch, self.lam)

    def tube_torsion(self, tube_id: str) -> TubeTorsion:
        for part in self.torsion:
            if part.tube.id == tube_id:
                return part
        raise TametiltError(f"Unknown tube '{tube_id}'", check="classify.unknown_tube")

    @property
    def torsion_summands(self) -> List[RegPoint]:
        """Finite summands followed by Prüfer points, canonically ordered"""
        finite = [p for part in self.torsion for p in part.finite]
        pruefer = [RegPoint.pruefer(qs) for part in self.torsion for qs in part.pruefer]
        return sort_points(finite) + sort_points(pruefer)

    def to_json(self) -> Dict[str, Any]:
        return {
            "branch": self.branch.to_json(),
            "lambda": self.lam.to_json(),
            "torsion": {part.tube.id: part.to_json() for part in self.torsion if part.class_count},
            "tf_label": self.label.to_json(self.registry),
            "sets": {
                "U": self.u_set.to_json(self.registry),
                "V": self.v_set.to_json(self.registry),
                "R": self.r_set.to_json(self.registry),
            },
            "flags": {
                "noetherian_over_endo": self.lam.is_empty,
                "sigma_pure_injective": self.lam == self.registry.everything(),
            },
        }


def _check_pair(y: BranchModule, lam: LambdaSet, reg: TubeRegistry) -> None:
    check_branch_module(y.summands)
    validate_lambda(reg, lam)
    ranks = reg.ranks
    for p in y.summands:
        if ranks.get(p.tube or "") != p.rank:
            raise TametiltError(f"{p} does not belong to a registry tube", check="pair.unknown_tube", witness=[str(p)])


def descriptor_from_pair(y: BranchModule, lam: LambdaSet, reg: TubeRegistry) -> TiltingDescriptor:
    """Descriptor of T_(Y, lambda) with its sets U, V and R"""
    _check_pair(y, lam, reg)
    u_set: set = set()
    v_set: set = set()
    r_set: set = set()
    torsion = []
    for tube in reg.tubes():
        part = y.in_tube(tube.id)
        if lam.contains(tube.id):
            shifted = reg_comp_factor_set(part, shifted=True)
            rays = frozenset(qs for qs in tube.quasi_simples() if qs not in shifted)
            u_set |= shifted
            v_set |= set(tube.quasi_simples())
            r_set |= rays
        else:
            factors = reg_comp_factor_set(part)
            rays = frozenset()
            u_set |= factors
            v_set |= factors
        torsion.append(TubeTorsion(tube, frozenset(part), rays))

    u = QuasiSimpleSet(frozenset(u_set))
    v = QuasiSimpleSet(frozenset(v_set))
    label = TorsionFreeLabel(LabelKind.LUKAS, u) if lam.is_empty else TorsionFreeLabel(LabelKind.PROJGEN, v)
    return TiltingDescriptor(reg, y, lam, tuple(torsion), label, u, v, QuasiSimpleSet(frozenset(r_set)))


def lukas(reg: TubeRegistry) -> TiltingDescriptor:
    """The Lukas tilting module, (0, {})"""
    return descriptor_from_pair(BranchModule(), LambdaSet(), reg)


def reiten_ringel(reg: TubeRegistry) -> TiltingDescriptor:
    """All Prüfer modules plus the generic module, (0, every tube)"""
    return descriptor_from_pair(BranchModule(), reg.everything(), reg)


def ray_descriptor(reg: TubeRegistry, qs: QuasiSimple) -> TiltingDescriptor:
    """S + S[2] + ... + S[r-1] + S[inf] + R_t with the tube of S in lambda"""
    y = BranchModule(frozenset(RegPoint.finite(qs, m) for m in range(1, qs.rank)))
    lam = LambdaSet(frozenset({qs.tube} - {REST_TUBE}), qs.tube == REST_TUBE)
    return descriptor_from_pair(y, lam, reg)


def enumerate_lambdas(reg: TubeRegistry) -> List[LambdaSet]:
    """Every LambdaSet over the registry, named subsets first without the rest"""
    ids = reg.tube_ids
    rest_options = [False, True] if reg.rest else [False]
    return [
        LambdaSet(frozenset(chosen), rest)
        for rest in rest_options
        for size in range(len(ids) + 1)
        for chosen in itertools.combinations(ids, size)
    ]


def enumerate_descriptors(reg: TubeRegistry) -> List[TiltingDescriptor]:
    """Every large tilting class over the registry, one descriptor each"""
    return [
        descriptor_from_pair(y, lam, reg)
        for y in enumerate_branch_modules(reg)
        for lam in enumerate_lambdas(reg)
    ]


def equivalent(d1: TiltingDescriptor, d2: TiltingDescriptor) -> bool:
    if d1.registry != d2.registry:
        raise TametiltError("Descriptors come from different registries", check="classify.registry_mismatch")
    return d1.pair == d2.pair


@dataclass(frozen=True)
class TubeReport:
    """One tube of the torsion part, tagged with its structure case"""
    tube: Tube
    case: StructureCase
    finite: FrozenSet[RegPoint]
    pruefer: FrozenSet[QuasiSimple]
    adics_in_class: FrozenSet[QuasiSimple]

    @property
    def class_count(self) -> int:
        return len(self.finite) + len(self.pruefer)

    def to_json(self) -> Dict[str, Any]:
        return {
            "case": self.case.value,
            "finite": [str(p) for p in sort_points(self.finite)],
            "pruefer": _qs_keys(self.pruefer),
            "adics_in_class": _qs_keys(self.adics_in_class),
            "classes": self.class_count,
        }


@dataclass(frozen=True)
class Decomposition:
    tubes: Tuple[TubeReport, ...]
    torsion_free: TorsionFreeLabel
    registry: TubeRegistry

    def tube(self, tube_id: str) -> TubeReport:
        for report in self.tubes:
            if report.tube.id == tube_id:
                return report
        raise TametiltError(f"Unknown tube '{tube_id}'", check="classify.unknown_tube")

    def to_json(self) -> Dict[str, Any]:
        return {
            "tubes": {report.tube.id: report.to_json() for report in self.tubes},
            "torsion_free": self.torsion_free.to_json(self.registry),
        }


def _adics_off(tube: Tube, part: Iterable[RegPoint]) -> FrozenSet[QuasiSimple]:
    """Quasi-simples S with tau_inv(S) no composition factor of part"""
    factors = reg_comp_factor_set(list(part))
    return frozenset(qs for qs in tube.quasi_simples() if qs.tau_inv() not in factors)


def decompose(d: TiltingDescriptor) -> Decomposition:
    """Per-tube torsion summands with their case, plus the torsion-free label"""
    reports = []
    for part in d.torsion:
        if d.lam.contains(part.tube.id):
            case = StructureCase.RAYS
            adics: FrozenSet[QuasiSimple] = frozenset()
        elif part.finite:
            case = StructureCase.BRANCH
            adics = _adics_off(part.tube, part.finite)
        else:
            case = StructureCase.EMPTY
            adics = frozenset(part.tube.quasi_simples())
        reports.append(TubeReport(part.tube, case, part.finite, part.pruefer, adics))
    return Decomposition(tuple(reports), d.label, d.registry)


@dataclass(frozen=True)
class LukasForm:
    """Equivalent shape: Prüfers at R, plus Y, plus the Lukas module over R_V'"""
    pruefer: QuasiSimpleSet
    branch: BranchModule
    lukas_over: QuasiSimpleSet

    def to_json(self, reg: Optional[TubeRegistry] = None) -> Dict[str, Any]:
        return {
            "pruefer": self.pruefer.to_json(reg),
            "branch": self.branch.to_json(),
            "lukas_over": self.lukas_over.to_json(reg),
        }


def lukas_form(d: TiltingDescriptor) -> LukasForm:
    members = set(reg_comp_factor_set(d.branch))
    for tube in d.registry.tubes():
        if d.lam.contains(tube.id):
            members |= set(tube.quasi_simples())
    return LukasForm(d.r_set, d.branch, QuasiSimpleSet(frozenset(members)))


@dataclass(frozen=True)
class DualTube:
    """One tube of the cotilting dual; finite points use left-module coordinates"""
    tube: Tube
    finite: FrozenSet[RegPoint]
    adics: FrozenSet[QuasiSimple]
    pruefers: FrozenSet[QuasiSimple]

    @property
    def class_count(self) -> int:
        return len(self.finite) + len(self.adics) + len(self.pruefers)

    def to_json(self) -> Dict[str, Any]:
        return {
            "finite": [str(p) for p in sort_points(self.finite)],
            "adic": _qs_keys(self.adics),
            "pruefer": _qs_keys(self.pruefers),
        }


@dataclass(frozen=True)
class CotiltingDescriptor:
    registry: TubeRegistry
    tubes: Tuple[DualTube, ...]
    has_generic: bool = True

    def tube(self, tube_id: str) -> DualTube:
        for dual in self.tubes:
            if dual.tube.id == tube_id:
                return dual
        raise TametiltError(f"Unknown tube '{tube_id}'", check="classify.unknown_tube")

    def to_json(self) -> Dict[str, Any]:
        return {
            "tubes": {dual.tube.id: dual.to_json() for dual in self.tubes},
            "generic": self.has_generic,
        }


def dual_point(p: RegPoint) -> RegPoint:
    """Left-module coordinates of D(S[m]): indexed by the top, same length"""
    return RegPoint.finite(top(p), p.length or 0)


def cotilting_dual(d: TiltingDescriptor) -> CotiltingDescriptor:
    """Dual cotilting module: finite duals, adics for Prüfers, Prüfers where adics were"""
    tubes = []
    for part in d.torsion:
        finite = frozenset(dual_point(p) for p in part.finite)
        if d.lam.contains(part.tube.id):
            pruefers: FrozenSet[QuasiSimple] = frozenset()
        else:
            pruefers = _adics_off(part.tube, part.finite)
        tubes.append(DualTube(part.tube, finite, part.pruefer, pruefers))
    return CotiltingDescriptor(d.registry, tuple(tubes))


@dataclass(frozen=True)
class PredicateReport:
    noetherian_over_endo: bool
    sigma_pure_injective: bool
    localization_form: Optional[QuasiSimpleSet]

    def to_json(self, reg: Optional[TubeRegistry] = None) -> Dict[str, Any]:
        return {
            "noetherian_over_endo": self.noetherian_over_endo,
            "sigma_pure_injective": self.sigma_pure_injective,
            "localization_form": None if self.localization_form is None else self.localization_form.to_json(reg),
            "realizable": "n/a",
        }


def _segment_set_for(tube: Tube, part: List[RegPoint]) -> Optional[FrozenSet[QuasiSimple]]:
    """The proper subset of the tube's clique whose segment corays are exactly part"""
    target = set(part)
    for size in range(tube.rank):
        for chosen in itertools.combinations(tube.quasi_simples(), size):
            u = QuasiSimpleSet(frozenset(chosen))
            if set(segment_corays(u, tube)) == target:
                return frozenset(chosen)
    return None


def localization_form(d: TiltingDescriptor) -> Optional[QuasiSimpleSet]:
    """A set U with R_U + R_U/R equivalent to d, found by per-tube search"""
    if d.lam.is_empty:
        return None
    members: set = set()
    for tube in d.registry.tubes():
        part = d.branch.in_tube(tube.id)
        if d.lam.contains(tube.id):
            if part:
                return None
            members |= set(tube.quasi_simples())
        elif not tube.is_homogeneous:
            chosen = _segment_set_for(tube, part)
            if chosen is None:
                return None
            members |= chosen
    u = QuasiSimpleSet(frozenset(members))
    candidate = localization_tilting(u, d.registry)
    if isinstance(candidate, TiltingDescriptor) and equivalent(candidate, d):
        return u
    return None


def predicates(d: TiltingDescriptor) -> PredicateReport:
    return PredicateReport(
        noetherian_over_endo=d.lam.is_empty,
        sigma_pure_injective=d.lam == d.registry.everything(),
        localization_form=localization_form(d),
    )


def summand_realizability(
    delta: Iterable[QuasiSimple], z: Iterable[RegPoint], reg: TubeRegistry
) -> Optional[Tuple[BranchModule, LambdaSet]]:
    """A pair whose tilting module has z and the Prüfers at delta as summands, if any"""
    delta = frozenset(delta)
    z = frozenset(z)
    error = exceptional_violation(z)
    if error is not None:
        raise error
    if delta & reg_comp_factor_set(z, shifted=True):
        return None
    y = complete_to_branch(z)[0]
    tube_ids = {qs.tube for qs in delta}
    lam = LambdaSet(frozenset(tube_ids - {REST_TUBE}), REST_TUBE in tube_ids)
    validate_lambda(reg, lam)
    return y, lam
