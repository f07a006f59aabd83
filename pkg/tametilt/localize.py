"""
Universal Localization

How tubes, quasi-simples and Prüfer points transform when a set of
quasi-simples is inverted, and the tilting modules R_U + R_U/R it produces.
"""

import logging
import re
from collections import Counter
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from .branch import BranchModule
from .errors import PointError, TametiltError
from .registry import REST_TUBE, LambdaSet, MultiplicityMap, TubeRegistry
from .tube import QuasiSimple, RegPoint, Tube

if TYPE_CHECKING:
    from .classify import TiltingDescriptor

logger = logging.getLogger(__name__)

CLIQUE_PATTERN = re.compile(r"^clique:(?P<tube>.+)$")


@dataclass(frozen=True)
class QuasiSimpleSet:
    """A set of quasi-simples; the homogeneous rest is the member '*:1'"""
    members: FrozenSet[QuasiSimple] = frozenset()

    @classmethod
    def of(cls, *members: QuasiSimple) -> "QuasiSimpleSet":
        return cls(frozenset(members))

    @classmethod
    def parse(cls, items: Iterable[str], reg: TubeRegistry) -> "QuasiSimpleSet":
        """Parse qs keys, 'clique:<tube-id>' and '*' for the homogeneous rest"""
        members = set()
        for item in items:
            item = str(item).strip()
            match = CLIQUE_PATTERN.match(item)
            if item == REST_TUBE or (match and match.group("tube") == REST_TUBE):
                members.add(reg.tube(REST_TUBE).qs(1))
            elif match:
                members.update(reg.tube(match.group("tube")).quasi_simples())
            else:
                members.add(reg.parse_qs(item))
        return cls(frozenset(members))

    @property
    def includes_rest(self) -> bool:
        return any(qs.tube == REST_TUBE for qs in self.members)

    def in_tube(self, tube_id: str) -> FrozenSet[QuasiSimple]:
        return frozenset(qs for qs in self.members if qs.tube == tube_id)

    def full_cliques(self, reg: TubeRegistry) -> List[str]:
        """Tube ids whose whole clique lies in the set"""
        return [t.id for t in reg.tubes() if len(self.in_tube(t.id)) == t.rank]

    def has_full_clique(self, reg: TubeRegistry) -> bool:
        return bool(self.full_cliques(reg))

    def union(self, other: "QuasiSimpleSet") -> "QuasiSimpleSet":
        return QuasiSimpleSet(self.members | other.members)

    def __len__(self) -> int:
        return len(self.members)

    def to_json(self, reg: Optional[TubeRegistry] = None) -> List[str]:
        full = set(self.full_cliques(reg)) if reg is not None else set()
        items = [f"clique:{t}" for t in sorted(full)]
        items += [qs.key for qs in sorted(self.members, key=lambda q: q.sort_key) if qs.tube not in full]
        return items


def check_qs_set(u: QuasiSimpleSet, reg: TubeRegistry) -> QuasiSimpleSet:
    ranks = reg.ranks
    for qs in u.members:
        if ranks.get(qs.tube) != qs.rank:
            raise TametiltError(f"{qs} is not a quasi-simple of the registry", check="localize.unknown_tube", witness=[qs.key])
    return u


def tensor_qs(s: QuasiSimple, y: QuasiSimpleSet) -> Optional[RegPoint]:
    """s tensored with R_y: None when it vanishes, otherwise s[m]"""
    if s in y.members:
        return None
    run = 0
    step = s.tau_inv()
    while step in y.members and run < s.rank:
        run += 1
        step = step.tau_inv()
    return RegPoint.finite(s, 1 + run)


def segments(u: QuasiSimpleSet, tube: Tube) -> List[List[QuasiSimple]]:
    """Maximal tau_inv-consecutive runs of u inside a tube that u does not fill"""
    inside = u.in_tube(tube.id)
    if len(inside) == tube.rank:
        raise TametiltError(f"{tube.id} is a full clique, not a union of segments", check="localize.segment")
    runs = []
    for start in sorted(inside, key=lambda q: q.index):
        if start.tau() in inside:
            continue
        run = [start]
        while run[-1].tau_inv() in inside:
            run.append(run[-1].tau_inv())
        runs.append(run)
    return runs


def segment_corays(u: QuasiSimpleSet, tube: Tube) -> List[RegPoint]:
    """Coray modules U_1[m], U_2[m-1], ..., U_m[1] of each segment U_1, ..., U_m"""
    return [
        RegPoint.finite(qs, len(run) - k)
        for run in segments(u, tube)
        for k, qs in enumerate(run)
    ]


@dataclass(frozen=True)
class LocalizedTube:
    """A tube after localization: survivors renumbered 1.. from the smallest index"""
    id: str
    old_rank: int
    new_rank: int
    qs_map: Tuple[Tuple[int, int], ...] = ()

    @property
    def removed(self) -> bool:
        return self.new_rank == 0

    def image(self, index: int) -> Optional[int]:
        return dict(self.qs_map).get(index)

    def to_json(self) -> Dict[str, Any]:
        return {
            "old_rank": self.old_rank,
            "new_rank": self.new_rank,
            "removed": self.removed,
            "qs_map": {str(old): new for old, new in self.qs_map},
        }


@dataclass(frozen=True)
class LocalizedRegistry:
    base: TubeRegistry
    at: QuasiSimpleSet
    tubes: Tuple[LocalizedTube, ...]
    order_flag: bool

    def tube(self, tube_id: str) -> LocalizedTube:
        for t in self.tubes:
            if t.id == tube_id:
                return t
        raise TametiltError(f"Unknown tube '{tube_id}'", check="localize.unknown_tube")

    def image(self, qs: QuasiSimple) -> Optional[QuasiSimple]:
        """Coordinates of qs tensored with R_at, or None when it vanishes"""
        localized = self.tube(qs.tube)
        new_index = localized.image(qs.index)
        if new_index is None:
            return None
        return QuasiSimple(qs.tube, new_index, localized.new_rank)

    def image_set(self, v: QuasiSimpleSet) -> QuasiSimpleSet:
        images = (self.image(qs) for qs in v.members)
        return QuasiSimpleSet(frozenset(qs for qs in images if qs is not None))

    def qs_map(self) -> Dict[str, Dict[int, int]]:
        return {t.id: dict(t.qs_map) for t in self.tubes if not t.removed}

    def registry(self) -> TubeRegistry:
        """The localized configuration as a registry; rank-1 survivors become homogeneous"""
        nonhomogeneous = tuple((t.id, t.new_rank) for t in self.tubes if t.new_rank >= 2)
        homogeneous = frozenset(t.id for t in self.tubes if t.new_rank == 1 and t.id != REST_TUBE)
        rest = any(t.id == REST_TUBE and not t.removed for t in self.tubes)
        alpha = {}
        for key, value in self.base.alpha.values:
            image = self.image(self.base.parse_qs(key))
            if image is not None:
                alpha[image.key] = value
        return TubeRegistry(
            nonhomogeneous,
            homogeneous,
            rest,
            MultiplicityMap.from_dict(alpha, self.base.alpha.alpha_generic),
            name=f"{self.base.name}/localized",
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            "at": self.at.to_json(self.base),
            "order": self.order_flag,
            "tubes": {t.id: t.to_json() for t in self.tubes},
            "registry": self.registry().to_json(),
        }


def localize_registry(reg: TubeRegistry, u: QuasiSimpleSet) -> LocalizedRegistry:
    """Delete u from the tube mouths; full cliques remove their tube and make R_u an order"""
    check_qs_set(u, reg)
    full = set(u.full_cliques(reg))
    tubes = []
    for tube in reg.tubes():
        if tube.id in full:
            tubes.append(LocalizedTube(tube.id, tube.rank, 0))
            continue
        inside = {qs.index for qs in u.in_tube(tube.id)}
        survivors = [i for i in range(1, tube.rank + 1) if i not in inside]
        qs_map = tuple((old, new) for new, old in enumerate(survivors, start=1))
        tubes.append(LocalizedTube(tube.id, tube.rank, len(survivors), qs_map))
    logger.debug("Localized %s at %d quasi-simples (full cliques: %s)", reg.name, len(u), sorted(full))
    return LocalizedRegistry(reg, u, tuple(tubes), bool(full))


def quotient_decomposition(
    u: QuasiSimpleSet, alpha: MultiplicityMap, reg: TubeRegistry
) -> "Counter[RegPoint]":
    """R_u/R as a multiset: Prüfers for full cliques, coray modules for segments"""
    check_qs_set(u, reg)
    full = set(u.full_cliques(reg))
    parts: "Counter[RegPoint]" = Counter()
    for tube in reg.tubes():
        if tube.id in full:
            for qs in tube.quasi_simples():
                parts[RegPoint.pruefer(qs)] += alpha.of(qs)
        elif u.in_tube(tube.id):
            for point in segment_corays(u, tube):
                parts[point] += alpha.of(point.qs)  # type: ignore[arg-type]
    return parts


@dataclass(frozen=True)
class FiniteDimensional:
    """R_u is finite dimensional, so R_u + R_u/R is not a large tilting module"""
    at: QuasiSimpleSet

    def to_json(self, reg: Optional[TubeRegistry] = None) -> Dict[str, Any]:
        return {"kind": "finite_dimensional", "at": self.at.to_json(reg)}


def localization_tilting(
    u: QuasiSimpleSet, reg: TubeRegistry
) -> Union["TiltingDescriptor", FiniteDimensional]:
    """Descriptor of R_u + R_u/R, large exactly when u contains a full clique"""
    from .classify import descriptor_from_pair

    check_qs_set(u, reg)
    full = set(u.full_cliques(reg))
    if not full:
        return FiniteDimensional(u)
    y = [
        p
        for tube in reg.tubes()
        if tube.id not in full and u.in_tube(tube.id)
        for p in segment_corays(u, tube)
    ]
    lam = LambdaSet(frozenset(full - {REST_TUBE}), REST_TUBE in full)
    return descriptor_from_pair(BranchModule(frozenset(y)), lam, reg)


@dataclass(frozen=True)
class UniversalRing:
    """R localized at every quasi-simple: alpha x alpha matrices over End(G)"""
    alpha_generic: int

    def to_json(self) -> Dict[str, Any]:
        return {
            "kind": "simple_artinian",
            "matrix_size": self.alpha_generic,
            "over": "End(G)",
            "unique_indecomposable": "G",
            "as_module": f"G^{self.alpha_generic}",
        }


def universal_ring(reg: TubeRegistry) -> UniversalRing:
    return UniversalRing(reg.alpha.alpha_generic)


def parse_qs_set(items: Any, reg: TubeRegistry) -> QuasiSimpleSet:
    if isinstance(items, str):
        items = [part for part in items.split(",") if part.strip()]
    if not isinstance(items, list):
        raise PointError("Quasi-simple set must be a list of keys", check="point.syntax")
    return check_qs_set(QuasiSimpleSet.parse(items, reg), reg)
