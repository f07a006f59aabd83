"""
Resolving Filters

Per-tube encoding of the regular part of a resolving subcategory: a set of
full rays plus a finite region of points off those rays. From a filter we
read off the finite, Prüfer and adic points of the tilting class, and we
move between filters and (branch module, lambda) pairs.
"""

import itertools
import logging
import re
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .branch import BranchModule, check_branch_module, reg_comp_factor_set
from .errors import FilterError, witness_text
from .registry import REST_TUBE, LambdaSet, TubeRegistry, validate_lambda
from .tube import (
    QuasiSimple,
    RegPoint,
    Tube,
    comp_factor_set,
    in_wing,
    middle_terms,
    sort_points,
    submodules,
)

logger = logging.getLogger(__name__)

REGION_PATTERN = re.compile(r"^(?P<index>\d+)\[(?P<length>\d+)\]$")


@dataclass(frozen=True)
class TubeFilter:
    """Filter on one tube: indices of full rays plus the finite region off them"""
    tube: Tube
    rays: FrozenSet[int] = frozenset()
    region: FrozenSet[RegPoint] = frozenset()

    def contains(self, p: RegPoint) -> bool:
        if not p.is_finite or p.tube != self.tube.id:
            return False
        return p.index in self.rays or p in self.region

    @property
    def ray_qs(self) -> List[QuasiSimple]:
        return [self.tube.qs(i) for i in sorted(self.rays)]

    @property
    def is_empty(self) -> bool:
        return not self.rays and not self.region

    @property
    def is_whole_tube(self) -> bool:
        return len(self.rays) == self.tube.rank

    def height(self, index: int) -> int:
        """Longest region point with socle U_index (0 when none)"""
        return max((p.length or 0 for p in self.region if p.index == index), default=0)

    def members(self, max_length: int) -> List[RegPoint]:
        """Region plus ray points up to max_length"""
        ray_points = [self.tube.point(i, n) for i in sorted(self.rays) for n in range(1, max_length + 1)]
        return sort_points(self.region) + ray_points

    def to_json(self) -> Dict[str, Any]:
        return {
            "rays": sorted(self.rays),
            "region": [f"{p.index}[{p.length}]" for p in sort_points(self.region)],
        }


@dataclass(frozen=True)
class ResolvingFilter:
    """One TubeFilter per registry tube, the rest token included"""
    registry: TubeRegistry
    tubes: Tuple[TubeFilter, ...]

    @classmethod
    def from_tubes(cls, reg: TubeRegistry, filters: Mapping[str, TubeFilter]) -> "ResolvingFilter":
        unknown = sorted(set(filters) - set(reg.ranks))
        if unknown:
            raise FilterError(f"Filter names unknown tube(s): {', '.join(unknown)}", check="filter.unknown_tube")
        return cls(reg, tuple(filters.get(t.id, TubeFilter(t)) for t in reg.tubes()))

    @classmethod
    def empty(cls, reg: TubeRegistry) -> "ResolvingFilter":
        return cls.from_tubes(reg, {})

    def tube_filter(self, tube_id: str) -> TubeFilter:
        for tf in self.tubes:
            if tf.tube.id == tube_id:
                return tf
        raise FilterError(f"Unknown tube '{tube_id}'", check="filter.unknown_tube")

    def to_json(self) -> Dict[str, Any]:
        return {tf.tube.id: tf.to_json() for tf in self.tubes if not tf.is_empty}


@dataclass(frozen=True)
class TubeProfile:
    """Add T restricted to one tube"""
    tube: Tube
    finite_summands: FrozenSet[RegPoint] = frozenset()
    pruefer_summands: FrozenSet[QuasiSimple] = frozenset()
    adics_in_class: FrozenSet[QuasiSimple] = frozenset()

    @property
    def class_count(self) -> int:
        """Distinct indecomposable summand classes (finite and Prüfer)"""
        return len(self.finite_summands) + len(self.pruefer_summands)

    def to_json(self) -> Dict[str, Any]:
        return {
            "finite": [str(p) for p in sort_points(self.finite_summands)],
            "pruefer": [qs.key for qs in sorted(self.pruefer_summands, key=lambda q: q.sort_key)],
            "adics": [qs.key for qs in sorted(self.adics_in_class, key=lambda q: q.sort_key)],
        }


@dataclass(frozen=True)
class AddTProfile:
    tubes: Tuple[TubeProfile, ...]

    def tube(self, tube_id: str) -> TubeProfile:
        for profile in self.tubes:
            if profile.tube.id == tube_id:
                return profile
        raise FilterError(f"Unknown tube '{tube_id}'", check="filter.unknown_tube")

    @property
    def finite_summands(self) -> FrozenSet[RegPoint]:
        return frozenset(p for profile in self.tubes for p in profile.finite_summands)

    def to_json(self) -> Dict[str, Any]:
        return {profile.tube.id: profile.to_json() for profile in self.tubes}


def tube_filter_violation(tf: TubeFilter) -> Optional[FilterError]:
    """The first closure or normal-form violation of a tube filter, with witnesses"""
    tube = tf.tube
    r = tube.rank
    bad_rays = sorted(i for i in tf.rays if not 1 <= i <= r)
    if bad_rays:
        return FilterError(f"Ray indices {bad_rays} out of range for tube '{tube.id}'", check="filter.ray_index")

    for p in sort_points(tf.region):
        if not p.is_finite or p.tube != tube.id or p.rank != r:
            return FilterError(f"{p} is not a finite point of tube '{tube.id}'", check="filter.normal_form", witness=[str(p)])
        if tube.is_homogeneous:
            return FilterError(
                f"Homogeneous tube '{tube.id}' only carries its full ray, got {p}",
                check="filter.normal_form",
                witness=[str(p)],
            )
        if p.index in tf.rays:
            return FilterError(f"{p} lies on an included ray", check="filter.normal_form", witness=[str(p)])
        if (p.length or 0) >= 2 * r:
            return FilterError(f"{p} is longer than the normal form allows", check="filter.normal_form", witness=[str(p)])
        if (p.length or 0) >= r:
            return FilterError(
                f"{p} has length >= rank {r}, so its full ray must be in the filter",
                check="filter.closure",
                witness=[str(p)],
            )
        for sub in submodules(p):
            if not tf.contains(sub):
                return FilterError(
                    f"Filter contains {p} but not its submodule {sub}",
                    check="filter.submodule",
                    witness=witness_text(p, sub),
                )

    members = tf.members(2 * r)
    for x, y in itertools.product(members, repeat=2):
        for term in middle_terms(x, y):
            for summand in term:
                if not tf.contains(summand):
                    return FilterError(
                        f"Extension of {x} by {y} has summand {summand} outside the filter",
                        check="filter.extension",
                        witness=witness_text(x, y, summand),
                    )
    return None


def validate_filter(f: ResolvingFilter) -> ResolvingFilter:
    """Return f if every tube filter is submodule- and extension-closed"""
    for tf in f.tubes:
        error = tube_filter_violation(tf)
        if error is not None:
            raise error
    return f


def closure(tube: Tube, points: Iterable[RegPoint] = (), rays: Iterable[int] = ()) -> TubeFilter:
    """Smallest valid filter containing the points and the rays"""
    rays = set(rays)
    points = list(points)
    if tube.is_homogeneous:
        return TubeFilter(tube, frozenset({1}) if points or rays else frozenset())

    r = tube.rank
    region: set = set()
    pending = points
    rounds = 0
    while pending:
        rounds += 1
        for p in pending:
            for q in [p] + submodules(p):
                if (q.length or 0) >= r:
                    rays.add(q.index)
                elif q.index not in rays:
                    region.add(q)
        region = {q for q in region if q.index not in rays}
        current = TubeFilter(tube, frozenset(rays), frozenset(region))
        pending = []
        for x, y in itertools.product(current.members(2 * r), repeat=2):
            for term in middle_terms(x, y):
                pending.extend(s for s in term if not current.contains(s))
    logger.debug("Closure in tube %s settled after %d rounds", tube.id, rounds)
    return TubeFilter(tube, frozenset(rays), frozenset(region))


def _wing_summands(tf: TubeFilter, qs: QuasiSimple, m: int) -> List[RegPoint]:
    """Summands of Add T inside wing(qs[m]) for a vertex qs[m] of the filter"""
    if m == 0:
        return []
    split = next(
        (k for k in range(1, m) if tf.contains(RegPoint.finite(qs.shift(k), m - k))),
        m,
    )
    return (
        [RegPoint.finite(qs, m)]
        + _wing_summands(tf, qs.shift(split), m - split)
        + _wing_summands(tf, qs, split - 1)
    )


def _ray_gap(tf: TubeFilter, index: int) -> int:
    """Distance from a full ray to the next full ray in the tau_inv direction"""
    r = tf.tube.rank
    return next(d for d in range(1, r + 1) if (index + d - 1) % r + 1 in tf.rays)


def tube_addt(tf: TubeFilter) -> TubeProfile:
    """Add T inside one tube, read off the filter"""
    tube = tf.tube
    if tube.is_homogeneous:
        qs = tube.qs(1)
        if tf.rays:
            return TubeProfile(tube, pruefer_summands=frozenset({qs}))
        return TubeProfile(tube, adics_in_class=frozenset({qs}))

    if tf.rays:
        finite: List[RegPoint] = []
        for index in sorted(tf.rays):
            gap = _ray_gap(tf, index)
            if gap >= 2:
                finite.extend(_wing_summands(tf, tube.qs(index), gap - 1))
        return TubeProfile(tube, frozenset(finite), frozenset(tf.ray_qs))

    maximal = [
        tube.point(i, tf.height(i)) for i in range(1, tube.rank + 1) if tf.height(i) > 0
    ]
    tops = [v for v in maximal if not any(w != v and in_wing(v, w) for w in maximal)]
    finite = [p for v in tops for p in _wing_summands(tf, v.qs, v.length or 0)]  # type: ignore[arg-type]
    factors = comp_factor_set(tf.region)
    adics = frozenset(qs for qs in tube.quasi_simples() if qs.tau_inv() not in factors)
    return TubeProfile(tube, frozenset(finite), adics_in_class=adics)


def addt_from_filter(f: ResolvingFilter) -> AddTProfile:
    """Finite, Prüfer and adic points of the tilting class for a valid filter"""
    validate_filter(f)
    return AddTProfile(tuple(tube_addt(tf) for tf in f.tubes))


def pair_from_resolving(f: ResolvingFilter) -> Tuple[BranchModule, LambdaSet]:
    """The (Y, lambda) pair of a valid filter"""
    profile = addt_from_filter(f)
    with_rays = {tf.tube.id for tf in f.tubes if tf.rays}
    lam = LambdaSet(frozenset(with_rays - {REST_TUBE}), REST_TUBE in with_rays)
    return BranchModule(profile.finite_summands), lam


def _check_points_in_registry(points: Iterable[RegPoint], reg: TubeRegistry) -> None:
    ranks = reg.ranks
    for p in points:
        if p.tube not in ranks or ranks[p.tube] != p.rank:
            raise FilterError(f"{p} does not belong to a registry tube", check="pair.unknown_tube", witness=[str(p)])


def resolving_from_pair(y: BranchModule, lam: LambdaSet, reg: TubeRegistry) -> ResolvingFilter:
    """Filter of a pair: the closure of Y, plus rays off the factors of tau_inv(Y) on lambda-tubes"""
    check_branch_module(y.summands)
    validate_lambda(reg, lam)
    _check_points_in_registry(y.summands, reg)

    filters: Dict[str, TubeFilter] = {}
    for tube in reg.tubes():
        part = y.in_tube(tube.id)
        rays: List[int] = []
        if lam.contains(tube.id):
            shifted = reg_comp_factor_set(part, shifted=True)
            rays = [qs.index for qs in tube.quasi_simples() if qs not in shifted]
        filters[tube.id] = closure(tube, part, rays)
    return validate_filter(ResolvingFilter.from_tubes(reg, filters))


def tube_union_filter(reg: TubeRegistry, tube_ids: Iterable[str], rest: bool = False) -> ResolvingFilter:
    """Filter containing the listed tubes completely and nothing else"""
    chosen = set(tube_ids) | ({REST_TUBE} if rest else set())
    filters = {
        tube.id: TubeFilter(tube, frozenset(range(1, tube.rank + 1)))
        for tube in reg.tubes()
        if tube.id in chosen
    }
    return validate_filter(ResolvingFilter.from_tubes(reg, filters))


def enumerate_tube_filters(tube: Tube) -> List[TubeFilter]:
    """Every valid filter on a tube: a ray set plus a region height per remaining index"""
    if tube.is_homogeneous:
        return [TubeFilter(tube), TubeFilter(tube, frozenset({1}))]

    r = tube.rank
    found = []
    for size in range(r + 1):
        for rays in itertools.combinations(range(1, r + 1), size):
            free = [i for i in range(1, r + 1) if i not in rays]
            for heights in itertools.product(range(r), repeat=len(free)):
                region = frozenset(
                    tube.point(i, k) for i, h in zip(free, heights) for k in range(1, h + 1)
                )
                candidate = TubeFilter(tube, frozenset(rays), region)
                if tube_filter_violation(candidate) is None:
                    found.append(candidate)
    logger.debug("Tube %s (rank %d): %d valid filters", tube.id, r, len(found))
    return found


def parse_filter(data: Mapping[str, Any], reg: TubeRegistry) -> ResolvingFilter:
    """Parse {tube-id: {"rays": [index], "region": ["i[l]", ...]}} and validate it"""
    if not isinstance(data, Mapping):
        raise FilterError("Filter must be a JSON object keyed by tube id", check="filter.syntax")
    filters: Dict[str, TubeFilter] = {}
    for tube_id, entry in data.items():
        tube = reg.tube(tube_id)
        if not isinstance(entry, Mapping):
            raise FilterError(f"Filter entry for '{tube_id}' must be an object", check="filter.syntax")
        for key in ("rays", "region"):
            if not isinstance(entry.get(key, []), list):
                raise FilterError(f"'{key}' of '{tube_id}' must be a list", check="filter.syntax")
        region = []
        for text in entry.get("region", []):
            match = REGION_PATTERN.match(str(text).strip())
            if not match:
                raise FilterError(f"Invalid region point '{text}'. Expected 'i[l]'", check="filter.syntax")
            index, length = int(match.group("index")), int(match.group("length"))
            if not 1 <= index <= tube.rank or length < 1:
                raise FilterError(f"Region point '{text}' out of range for tube '{tube_id}'", check="filter.syntax")
            region.append(tube.point(index, length))
        for i in entry.get("rays", []):
            if not isinstance(i, int) or isinstance(i, bool):
                raise FilterError(f"Ray '{i}' of '{tube_id}' must be an integer index", check="filter.syntax")
        rays = frozenset(entry.get("rays", []))
        filters[tube_id] = TubeFilter(tube, rays, frozenset(region))
    return validate_filter(ResolvingFilter.from_tubes(reg, filters))
