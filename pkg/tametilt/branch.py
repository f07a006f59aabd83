"""
Branch Modules

Recognition and enumeration of branch modules: multiplicity-free exceptional
sets of finite points in non-homogeneous tubes where every summand S[m] has
exactly m summands inside its wing.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Tuple

from .errors import TametiltError, witness_text
from .registry import TubeRegistry
from .tube import (
    QuasiSimple,
    RegPoint,
    Tube,
    comp_factor_set,
    ext_dim,
    in_wing,
    sort_points,
    tau_inv,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BranchModule:
    """A branch module, stored as its set of indecomposable summands"""
    summands: FrozenSet[RegPoint] = frozenset()

    @classmethod
    def of(cls, *points: RegPoint) -> "BranchModule":
        return cls(frozenset(points))

    @property
    def sorted_summands(self) -> List[RegPoint]:
        return sort_points(self.summands)

    @property
    def is_empty(self) -> bool:
        return not self.summands

    @property
    def tube_ids(self) -> FrozenSet[str]:
        return frozenset(p.tube for p in self.summands if p.tube)

    def in_tube(self, tube_id: str) -> List[RegPoint]:
        return sort_points(p for p in self.summands if p.tube == tube_id)

    def __len__(self) -> int:
        return len(self.summands)

    def to_json(self) -> List[str]:
        return [str(p) for p in self.sorted_summands]


def canonical_key(points: Iterable[RegPoint]) -> Tuple[int, List[Tuple[str, int, int]]]:
    """Order sets by size, then by their sorted (tube, index, length) keys"""
    keys = sorted(p.sort_key for p in points)
    return (len(keys), keys)


def _exceptional_pair(x: RegPoint, y: RegPoint) -> bool:
    return ext_dim(x, y).is_zero and ext_dim(y, x).is_zero


def exceptional_violation(points: Iterable[RegPoint]) -> Optional[TametiltError]:
    """The first reason `points` fails to be a regular exceptional set, if any"""
    points = sort_points(points)
    for p in points:
        if not p.is_finite:
            return TametiltError(f"{p} is not a finite point", check="branch.finite", witness=[str(p)])
        if p.rank < 2:
            return TametiltError(
                f"{p} lies in a homogeneous tube", check="branch.homogeneous", witness=[str(p)]
            )
        if (p.length or 0) >= p.rank:
            return TametiltError(
                f"{p} has length {p.length} not below rank {p.rank}",
                check="branch.length",
                witness=[str(p)],
            )
    for x, y in itertools.product(points, repeat=2):
        if not ext_dim(x, y).is_zero:
            return TametiltError(
                f"Ext({x}, {y}) does not vanish",
                check="branch.not_exceptional",
                witness=witness_text(x, y),
            )
    return None


def branch_violation(points: Iterable[RegPoint]) -> Optional[TametiltError]:
    """Diagnostics variant of is_branch_module: which clause fails, with a witness"""
    points = sort_points(points)
    error = exceptional_violation(points)
    if error is not None:
        return error
    for vertex in points:
        inside = sum(1 for p in points if in_wing(p, vertex))
        if inside != vertex.length:
            return TametiltError(
                f"Wing of {vertex} holds {inside} summands, expected {vertex.length}",
                check="branch.condition_b",
                witness=[str(vertex)],
            )
    return None


def is_branch_module(points: Iterable[RegPoint]) -> bool:
    return branch_violation(points) is None


def check_branch_module(points: Iterable[RegPoint]) -> BranchModule:
    """Return the points as a BranchModule or raise the violated clause"""
    points = frozenset(points)
    error = branch_violation(points)
    if error is not None:
        raise error
    return BranchModule(points)


@lru_cache(maxsize=None)
def exceptional_sets(tube: Tube) -> Tuple[FrozenSet[RegPoint], ...]:
    """All exceptional subsets of a tube, found by backtracking in canonical point order"""
    if tube.is_homogeneous:
        return (frozenset(),)
    candidates = tube.exceptional_points()
    found: List[FrozenSet[RegPoint]] = []

    def extend(start: int, chosen: List[RegPoint]) -> None:
        found.append(frozenset(chosen))
        if len(chosen) == tube.rank - 1:
            return
        for k in range(start, len(candidates)):
            p = candidates[k]
            if all(_exceptional_pair(p, q) for q in chosen):
                chosen.append(p)
                extend(k + 1, chosen)
                chosen.pop()

    extend(0, [])
    logger.debug("Tube %s (rank %d): %d exceptional sets", tube.id, tube.rank, len(found))
    return tuple(found)


@lru_cache(maxsize=None)
def tube_branch_modules(tube: Tube) -> Tuple[FrozenSet[RegPoint], ...]:
    """Per-tube branch modules in canonical order, the empty one first"""
    modules = [s for s in exceptional_sets(tube) if branch_violation(s) is None]
    modules.sort(key=canonical_key)
    logger.debug("Tube %s (rank %d): %d branch modules", tube.id, tube.rank, len(modules))
    return tuple(modules)


def _combine(per_tube: List[Iterable[FrozenSet[RegPoint]]]) -> List[BranchModule]:
    modules = [
        BranchModule(frozenset().union(*parts)) for parts in itertools.product(*per_tube)
    ]
    modules.sort(key=lambda y: canonical_key(y.summands))
    return modules


def enumerate_branch_modules(reg: TubeRegistry) -> List[BranchModule]:
    """Complete irredundant list of branch modules over the registry"""
    modules = _combine([tube_branch_modules(t) for t in reg.nonhomogeneous_tubes()])
    logger.debug("Registry %s: %d branch modules", reg.name, len(modules))
    return modules


def vertices(y: BranchModule) -> Dict[str, List[RegPoint]]:
    """Per tube, the summands not lying in the wing of another summand"""
    result: Dict[str, List[RegPoint]] = {}
    for tube_id in sorted(y.tube_ids):
        summands = y.in_tube(tube_id)
        result[tube_id] = [
            x for x in summands if not any(v != x and in_wing(x, v) for v in summands)
        ]
    return result


def reg_comp_factor_set(y: Any, shifted: bool = False) -> FrozenSet[QuasiSimple]:
    """Regular composition factors of y, or of tau_inv(y) when shifted"""
    points: Iterable[RegPoint] = y.summands if isinstance(y, BranchModule) else y
    if shifted:
        points = [tau_inv(p) for p in points]
    return comp_factor_set(points)


def complete_to_branch(z: Iterable[RegPoint]) -> List[BranchModule]:
    """Branch modules containing z with the same set of quasi-simple composition factors"""
    z = frozenset(z)
    error = exceptional_violation(z)
    if error is not None:
        raise error
    factors = comp_factor_set(z)
    per_tube = []
    for tube_id in sorted({p.tube for p in z if p.tube}):
        rank = next(p.rank for p in z if p.tube == tube_id)
        part = frozenset(p for p in z if p.tube == tube_id)
        part_factors = frozenset(qs for qs in factors if qs.tube == tube_id)
        per_tube.append([
            y for y in tube_branch_modules(Tube(tube_id, rank))
            if part <= y and comp_factor_set(y) == part_factors
        ])
    return _combine(per_tube)
