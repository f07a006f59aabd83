"""
Oracles

Brute-force re-derivations of the closed forms used elsewhere in the package,
and a verification suite that runs every invariant exhaustively over small
tube ranks. Failures are recorded as data with a witness, never raised.
"""

import itertools
import json
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from .branch import (
    BranchModule,
    enumerate_branch_modules,
    exceptional_sets,
    is_branch_module,
    tube_branch_modules,
    vertices,
)
from .classify import (
    LabelKind,
    TiltingDescriptor,
    cotilting_dual,
    descriptor_from_pair,
    enumerate_descriptors,
    enumerate_lambdas,
    equivalent,
    predicates,
    summand_realizability,
)
from .errors import TametiltError
from .localize import (
    QuasiSimpleSet,
    localization_tilting,
    localize_registry,
    quotient_decomposition,
    segments,
    tensor_qs,
)
from .registry import REST_TUBE, MultiplicityMap, TubeRegistry
from .resolving import (
    TubeFilter,
    TubeProfile,
    enumerate_tube_filters,
    pair_from_resolving,
    resolving_from_pair,
    tube_addt,
    tube_union_filter,
)
from .tube import (
    HomResult,
    QuasiSimple,
    RegPoint,
    Tube,
    ext_dim,
    hom_dim,
    in_wing,
    middle_terms,
    tau,
    tau_inv,
    top,
    wing,
    wing_quasi_simples,
)

logger = logging.getLogger(__name__)

MAX_RANK = 6
HomFunction = Callable[[RegPoint, RegPoint], HomResult]


@dataclass(frozen=True)
class OracleBounds:
    """Limits of the exhaustive runs"""
    rank_max: int = 4
    length_factor: int = 3
    realizability_rank_max: int = 3
    sweep: bool = True  # also check a synthetic tube for each rank the registry lacks

    def __post_init__(self) -> None:
        if not 1 <= self.rank_max <= MAX_RANK:
            raise TametiltError(
                f"rank_max must lie in 1..{MAX_RANK}, got {self.rank_max}", check="oracle.bounds"
            )


@dataclass
class CheckRecord:
    check: str
    params: Dict[str, Any]
    passed: bool
    witness: Any = None

    def to_json(self) -> Dict[str, Any]:
        doc = {"check": self.check, "params": self.params, "passed": self.passed}
        if not self.passed:
            doc["witness"] = self.witness
        return doc


@dataclass
class OracleReport:
    records: List[CheckRecord] = field(default_factory=list)

    @property
    def failures(self) -> List[CheckRecord]:
        return [record for record in self.records if not record.passed]

    @property
    def totals(self) -> Dict[str, int]:
        failed = len(self.failures)
        return {"checks": len(self.records), "passed": len(self.records) - failed, "failed": failed}

    @property
    def instances(self) -> int:
        return sum(record.params.get("instances", 0) for record in self.records)

    def to_json_lines(self) -> List[str]:
        lines = [json.dumps(record.to_json(), sort_keys=True) for record in self.records]
        lines.append(json.dumps({"totals": self.totals, "instances": self.instances}, sort_keys=True))
        return lines


def brute_hom(x: RegPoint, y: RegPoint) -> int:
    """Count factorizations x ->> quotient = submodule >-> y by listing both sides"""
    for p in (x, y):
        if not p.is_finite:
            raise TametiltError(f"brute_hom needs finite points, got {p}", check="oracle.finite_only")
        if (p.length or 0) > 3 * p.rank:
            raise TametiltError(
                f"{p} exceeds the oracle length bound 3*rank", check="oracle.length_bound", witness=[str(p)]
            )
    if x.tube != y.tube:
        return 0
    r = x.rank
    quotients = [((x.index + s - 1) % r + 1, (x.length or 0) - s) for s in range(x.length or 0)]
    subs = [(y.index, k) for k in range(1, (y.length or 0) + 1)]
    return sum(1 for q in quotients for s in subs if q == s)


def brute_addt(tf: TubeFilter) -> TubeProfile:
    """Add T inside the tube straight from the definition: members of f Ext-orthogonal to f"""
    tube = tf.tube
    if tube.rank > MAX_RANK:
        raise TametiltError(f"brute_addt supports ranks up to {MAX_RANK}", check="oracle.rank_bound")
    members = tf.members(2 * tube.rank)
    finite = frozenset(
        x for x in tube.exceptional_points()
        if tf.contains(x) and all(ext_dim(a, x).is_zero for a in members)
    )
    adics = frozenset(
        qs for qs in tube.quasi_simples()
        if all(ext_dim(a, RegPoint.adic(qs)).is_zero for a in members)
    )
    return TubeProfile(tube, finite, frozenset(tf.ray_qs), adics)


@lru_cache(maxsize=None)
def branch_count_oracle(m: int) -> int:
    """Branch modules under a fixed wing vertex of size m, by splitting off the vertex"""
    if m == 0:
        return 1
    return sum(branch_count_oracle(m - i) * branch_count_oracle(i - 1) for i in range(1, m + 1))


def brute_realizability(delta: FrozenSet[QuasiSimple], z: FrozenSet[RegPoint], reg: TubeRegistry) -> bool:
    """Search every pair for one whose descriptor has z in Y and delta among its Prüfers"""
    tube_ids = {qs.tube for qs in delta}
    for y in enumerate_branch_modules(reg):
        if not z <= y.summands:
            continue
        for lam in enumerate_lambdas(reg):
            if not all(lam.contains(t) for t in tube_ids):
                continue
            if delta <= descriptor_from_pair(y, lam, reg).r_set.members:
                return True
    return False


class _Recorder:
    """Collects one record per (check, params), keeping the first failing witness"""

    def __init__(self, report: OracleReport):
        self.report = report

    def run(self, check: str, params: Dict[str, Any], cases: Iterable[Tuple[bool, Any]]) -> None:
        instances = 0
        witness = None
        for ok, case_witness in cases:
            instances += 1
            if not ok and witness is None:
                witness = case_witness
        params = dict(params, instances=instances)
        record = CheckRecord(check, params, witness is None, witness)
        if not record.passed:
            logger.debug("Check %s failed for %s: %s", check, params, witness)
        self.report.records.append(record)


def _texts(*points: Any) -> List[str]:
    return [str(p) for p in points]


def _hom_cases(tube: Tube, bound: int, hom_fn: HomFunction) -> Iterable[Tuple[bool, Any]]:
    points = tube.points(bound)
    for x, y in itertools.product(points, repeat=2):
        yield hom_fn(x, y).value == brute_hom(x, y), _texts(x, y)


def _anchor_cases(tube: Tube, bound: int, hom_fn: HomFunction) -> Iterable[Tuple[bool, Any]]:
    for qs in tube.quasi_simples():
        for n in range(1, bound + 1):
            result = hom_fn(RegPoint.finite(qs, 1), RegPoint.finite(qs, n))
            yield result == HomResult.dim(1), _texts(qs, n)


def _ext_cases(tube: Tube, bound: int, hom_fn: HomFunction) -> Iterable[Tuple[bool, Any]]:
    points = tube.points(bound)
    for x, y in itertools.product(points, repeat=2):
        reduced = hom_fn(y, tau(x))
        yield (
            ext_dim(x, y) == reduced and reduced.value == brute_hom(y, tau(x)),
            _texts(x, y),
        )


def _tau_cases(tube: Tube, bound: int) -> Iterable[Tuple[bool, Any]]:
    for p in tube.points(bound):
        yield tau_inv(tau(p)) == p, _texts(p)
    for qs in tube.quasi_simples():
        for p in (RegPoint.pruefer(qs), RegPoint.adic(qs)):
            yield tau_inv(tau(p)) == p and tau(tau_inv(p)) == p, _texts(p)


def _middle_term_cases(tube: Tube) -> Iterable[Tuple[bool, Any]]:
    points = tube.points(2 * tube.rank)
    for x, y in itertools.product(points, repeat=2):
        yield len(middle_terms(x, y)) == ext_dim(x, y).value, _texts(x, y)


def _filter_bound_cases(filters: List[TubeFilter]) -> Iterable[Tuple[bool, Any]]:
    for tf in filters:
        profile = tube_addt(tf)
        r = tf.tube.rank
        finite = sorted(profile.finite_summands, key=lambda p: p.sort_key)
        ok = len(finite) <= max(r - 1, 0)
        if tf.rays:
            ok = ok and profile.class_count == r
        tops = [v for v in finite if not any(w != v and in_wing(v, w) for w in finite)]
        wings = [wing(v) for v in tops]
        ok = ok and all(a.isdisjoint(b) for a, b in itertools.combinations(wings, 2))
        covered = frozenset().union(*(wing_quasi_simples(v) for v in tops)) if tops else frozenset()
        ok = ok and (r == 1 or len(covered) < r)
        yield ok, tf.to_json()


def _addt_cases(filters: List[TubeFilter]) -> Iterable[Tuple[bool, Any]]:
    for tf in filters:
        fast, slow = tube_addt(tf), brute_addt(tf)
        yield fast == slow, {"filter": tf.to_json(), "closed_form": fast.to_json(), "oracle": slow.to_json()}


def _old_exclusion_cases(filters: List[TubeFilter]) -> Iterable[Tuple[bool, Any]]:
    for tf in filters:
        for p in tube_addt(tf).finite_summands:
            m = p.length or 0
            blocked = [RegPoint.finite(p.qs.shift(k), m - k + 1) for k in range(1, m + 1)]  # type: ignore[union-attr]
            yield not any(tf.contains(b) for b in blocked), {"filter": tf.to_json(), "summand": str(p)}


def _single_tube_registry(tube: Tube) -> TubeRegistry:
    if tube.is_homogeneous:
        return TubeRegistry(homogeneous_named=frozenset({tube.id}), rest=True, name=f"single-{tube.id}")
    return TubeRegistry(((tube.id, tube.rank),), rest=True, name=f"single-{tube.id}")


def _pair_cases(reg: TubeRegistry) -> Iterable[Tuple[bool, Any]]:
    for y in enumerate_branch_modules(reg):
        for lam in enumerate_lambdas(reg):
            f = resolving_from_pair(y, lam, reg)
            yield pair_from_resolving(f) == (y, lam), {"branch": y.to_json(), "lambda": lam.to_json()}


def _descriptor_torsion_cases(reg: TubeRegistry) -> Iterable[Tuple[bool, Any]]:
    for d in enumerate_descriptors(reg):
        f = resolving_from_pair(d.branch, d.lam, reg)
        ok = True
        for part, tf in zip(d.torsion, f.tubes):
            profile = tube_addt(tf)
            ok = ok and part.finite == profile.finite_summands and part.pruefer == profile.pruefer_summands
            ok = ok and (bool(part.pruefer) == d.lam.contains(part.tube.id))
        ok = ok and ((d.label.kind == LabelKind.LUKAS) == d.lam.is_empty)
        yield ok, {"branch": d.branch.to_json(), "lambda": d.lam.to_json()}


def _structure_cases(reg: TubeRegistry) -> Iterable[Tuple[bool, Any]]:
    for d in enumerate_descriptors(reg):
        ok = True
        for part in d.torsion:
            r = part.tube.rank
            if d.lam.contains(part.tube.id):
                ok = ok and part.class_count == r
            elif part.finite:
                factors = frozenset(qs for p in part.finite for qs in wing_quasi_simples(p))
                ok = ok and part.class_count == len(factors) < r
        yield ok, {"branch": d.branch.to_json(), "lambda": d.lam.to_json()}


def _injectivity_cases(reg: TubeRegistry) -> Iterable[Tuple[bool, Any]]:
    descriptors = enumerate_descriptors(reg)
    for d1, d2 in itertools.combinations(descriptors, 2):
        yield not equivalent(d1, d2), {"first": d1.branch.to_json(), "second": d2.branch.to_json()}


def _branch_complete_cases(tube: Tube) -> Iterable[Tuple[bool, Any]]:
    points = tube.exceptional_points()
    brute = {
        frozenset(chosen)
        for size in range(tube.rank)
        for chosen in itertools.combinations(points, size)
        if is_branch_module(chosen)
    }
    enumerated = set(tube_branch_modules(tube))
    yield brute == enumerated, {
        "missing": sorted(_texts(*p) for p in brute - enumerated),
        "extra": sorted(_texts(*p) for p in enumerated - brute),
    }


def _branch_vertex_cases(tube: Tube) -> Iterable[Tuple[bool, Any]]:
    for summands in tube_branch_modules(tube):
        y = BranchModule(summands)
        tops = vertices(y).get(tube.id, [])
        wings = [wing(v) for v in tops]
        ok = all(a.isdisjoint(b) for a, b in itertools.combinations(wings, 2))
        ok = ok and all(any(in_wing(p, v) for v in tops) for p in summands)
        covered = frozenset().union(*(wing_quasi_simples(v) for v in tops)) if tops else frozenset()
        ok = ok and len(summands) == len(covered) <= tube.rank - 1
        for x, x2 in itertools.combinations(summands, 2):
            wx, wx2 = wing(x), wing(x2)
            ok = ok and (wx <= wx2 or wx2 <= wx or wx.isdisjoint(wx2))
        yield ok, y.to_json()


def _catalan_cases(tube: Tube) -> Iterable[Tuple[bool, Any]]:
    for m in range(1, min(tube.rank - 1, 4) + 1):
        vertex = tube.point(1, m)
        count = sum(1 for s in tube_branch_modules(tube) if vertices(BranchModule(s)).get(tube.id) == [vertex])
        yield count == branch_count_oracle(m), {"vertex": str(vertex), "count": count}


def _cotilting_cases(reg: TubeRegistry) -> Iterable[Tuple[bool, Any]]:
    for d in enumerate_descriptors(reg):
        dual = cotilting_dual(d)
        ok = dual.has_generic and all(t.class_count == t.tube.rank for t in dual.tubes)
        yield ok, {"branch": d.branch.to_json(), "lambda": d.lam.to_json()}


def _predicate_cases(reg: TubeRegistry) -> Iterable[Tuple[bool, Any]]:
    everything = reg.everything()
    for d in enumerate_descriptors(reg):
        report = predicates(d)
        ok = report.noetherian_over_endo == d.lam.is_empty
        ok = ok and report.sigma_pure_injective == (d.lam == everything)
        ok = ok and not (report.noetherian_over_endo and report.sigma_pure_injective and not everything.is_empty)
        if d.lam.is_empty:
            ok = ok and report.localization_form is None
        if report.localization_form is not None:
            candidate = localization_tilting(report.localization_form, reg)
            ok = ok and isinstance(candidate, TiltingDescriptor) and equivalent(candidate, d)
        yield ok, {"branch": d.branch.to_json(), "lambda": d.lam.to_json()}


def _realizability_cases(reg: TubeRegistry, tube: Tube) -> Iterable[Tuple[bool, Any]]:
    clique = tube.quasi_simples()
    for z in exceptional_sets(tube):
        for size in range(len(clique) + 1):
            for delta in itertools.combinations(clique, size):
                delta_set = frozenset(delta)
                witness = summand_realizability(delta_set, z, reg)
                ok = (witness is not None) == brute_realizability(delta_set, z, reg)
                if witness is not None:
                    y, lam = witness
                    ok = ok and z <= y.summands and delta_set <= descriptor_from_pair(y, lam, reg).r_set.members
                yield ok, {"z": _texts(*sorted(z, key=lambda p: p.sort_key)), "delta": _texts(*delta)}


def _clique_free_sets(tube: Tube) -> Iterable[QuasiSimpleSet]:
    clique = tube.quasi_simples()
    for size in range(tube.rank):
        for chosen in itertools.combinations(clique, size):
            yield QuasiSimpleSet(frozenset(chosen))


def _localize_rank_cases(reg: TubeRegistry, tube: Tube) -> Iterable[Tuple[bool, Any]]:
    for u in _clique_free_sets(tube):
        localized = localize_registry(reg, u)
        total_before = sum(t.rank for t in reg.tubes())
        total_after = sum(t.new_rank for t in localized.tubes)
        ok = localized.tube(tube.id).new_rank == tube.rank - len(u) and total_after == total_before - len(u)
        ok = ok and not localized.order_flag
        yield ok, u.to_json()


def _localize_cycle_cases(reg: TubeRegistry, tube: Tube) -> Iterable[Tuple[bool, Any]]:
    for u in _clique_free_sets(tube):
        localized = localize_registry(reg, u)
        new_rank = localized.tube(tube.id).new_rank
        survivors = [qs for qs in tube.quasi_simples() if qs not in u.members]
        images = [localized.image(qs) for qs in survivors]
        ok = sorted(img.index for img in images if img is not None) == list(range(1, new_rank + 1))
        for qs in survivors:
            nxt = qs.tau_inv()
            while nxt in u.members:
                nxt = nxt.tau_inv()
            here, there = localized.image(qs), localized.image(nxt)
            ok = ok and here is not None and there is not None and here.tau_inv() == there
            gap = (nxt.index - qs.index) % tube.rank or tube.rank
            tensored = tensor_qs(qs, u)
            ok = ok and tensored is not None and tensored.length == gap
        if survivors:
            start = localized.image(survivors[0])
            walk, period = start, 0
            while True:
                walk = walk.tau_inv()  # type: ignore[union-attr]
                period += 1
                if walk == start:
                    break
            ok = ok and period == new_rank
        yield ok, u.to_json()


def _registry_shape(reg: TubeRegistry) -> Dict[str, Any]:
    doc = reg.to_json()
    doc.pop("name")
    return doc


def _localize_compose_cases(reg: TubeRegistry, tube: Tube) -> Iterable[Tuple[bool, Any]]:
    clique = tube.quasi_simples()
    for labels in itertools.product((0, 1, 2), repeat=len(clique)):
        u = QuasiSimpleSet(frozenset(qs for qs, k in zip(clique, labels) if k == 1))
        v = QuasiSimpleSet(frozenset(qs for qs, k in zip(clique, labels) if k == 2))
        if u.has_full_clique(reg):
            continue
        first = localize_registry(reg, u)
        second = localize_registry(first.registry(), first.image_set(v))
        direct = localize_registry(reg, u.union(v))
        composed = {
            t: {old: second.qs_map()[t][new] for old, new in mapping.items() if new in second.qs_map().get(t, {})}
            for t, mapping in first.qs_map().items()
            if t in second.qs_map()
        }
        ok = _registry_shape(second.registry()) == _registry_shape(direct.registry())
        ok = ok and composed == direct.qs_map() and second.order_flag == direct.order_flag
        yield ok, {"u": u.to_json(), "v": v.to_json()}


def _quotient_cases(reg: TubeRegistry, tube: Tube) -> Iterable[Tuple[bool, Any]]:
    fixtures = {
        "ones": MultiplicityMap(),
        "mixed": MultiplicityMap.from_dict({qs.key: qs.index for qs in tube.quasi_simples()}),
    }
    for name, alpha in fixtures.items():
        for u in _clique_free_sets(tube):
            parts = quotient_decomposition(u, alpha, reg)
            expected: Dict[RegPoint, int] = {}
            for run in segments(u, tube):
                for k, qs in enumerate(run):
                    expected[RegPoint.finite(qs, len(run) - k)] = alpha.of(qs)
            ok = dict(parts) == expected and is_branch_module(parts)
            for run in segments(u, tube):
                corays = [RegPoint.finite(qs, len(run) - k) for k, qs in enumerate(run)]
                ok = ok and all(top(p) == run[-1] for p in corays)
            yield ok, {"alpha": name, "u": u.to_json()}
        full = QuasiSimpleSet(frozenset(tube.quasi_simples()))
        parts = quotient_decomposition(full, alpha, reg)
        expected = {RegPoint.pruefer(qs): alpha.of(qs) for qs in tube.quasi_simples()}
        yield dict(parts) == expected, {"alpha": name, "u": full.to_json(reg)}


def _union_cases(reg: TubeRegistry) -> Iterable[Tuple[bool, Any]]:
    ids = [t.id for t in reg.tubes()]
    for size in range(1, len(ids) + 1):
        for chosen in itertools.combinations(ids, size):
            named = [t for t in chosen if t != REST_TUBE]
            f = tube_union_filter(reg, named, rest=REST_TUBE in chosen)
            cliques = QuasiSimpleSet(frozenset(qs for t in chosen for qs in reg.tube(t).quasi_simples()))
            candidate = localization_tilting(cliques, reg)
            ok = isinstance(candidate, TiltingDescriptor) and pair_from_resolving(f) == candidate.pair
            yield ok, list(chosen)


def _kronecker_cases(reg: TubeRegistry) -> Iterable[Tuple[bool, Any]]:
    descriptors = enumerate_descriptors(reg)
    named_only = [d for d in descriptors if not d.lam.include_rest]
    distinct = {d.pair for d in descriptors}
    lukas_like = [d for d in descriptors if d.lam.is_empty]
    ok = len(distinct) == len(descriptors) == 2 ** (len(reg.tube_ids) + int(reg.rest))
    ok = ok and len(named_only) == 2 ** len(reg.tube_ids)
    ok = ok and len(lukas_like) == 1 and lukas_like[0].label.kind == LabelKind.LUKAS
    yield ok, {"descriptors": len(descriptors)}


def verify_suite(
    reg: TubeRegistry,
    bounds: Optional[OracleBounds] = None,
    hom_fn: HomFunction = hom_dim,
) -> OracleReport:
    """Run every invariant exhaustively on the registry's tubes within bounds"""
    bounds = bounds or OracleBounds()
    report = OracleReport()
    record = _Recorder(report)

    tubes = [t for t in reg.nonhomogeneous_tubes() if t.rank <= bounds.rank_max]
    covered = {t.rank for t in tubes}
    if bounds.sweep:
        tubes += [Tube(f"t{r}", r) for r in range(2, bounds.rank_max + 1) if r not in covered]
    tubes.append(Tube("h", 1))
    logger.info("Verifying %s over tubes %s", reg.name, [(t.id, t.rank) for t in tubes])

    for tube in tubes:
        params = {"tube": tube.id, "rank": tube.rank}
        bound = bounds.length_factor * tube.rank
        single = _single_tube_registry(tube)

        record.run("hom.oracle", params, _hom_cases(tube, bound, hom_fn))
        record.run("hom.anchor", params, _anchor_cases(tube, bound, hom_fn))
        record.run("ext.ar", params, _ext_cases(tube, bound, hom_fn))
        record.run("tau.inverse", params, _tau_cases(tube, bound))
        record.run("ext.middle_terms", params, _middle_term_cases(tube))

        filters = enumerate_tube_filters(tube)
        record.run("filter.bounds", params, _filter_bound_cases(filters))
        record.run("addt.oracle", params, _addt_cases(filters))
        record.run("old.exclusion", params, _old_exclusion_cases(filters))

        record.run("pair.roundtrip", params, _pair_cases(single))
        record.run("descriptor.torsion", params, _descriptor_torsion_cases(single))
        record.run("structure.count", params, _structure_cases(single))
        record.run("classify.injective", params, _injectivity_cases(single))
        record.run("cotilting.rank", params, _cotilting_cases(single))
        record.run("predicates", params, _predicate_cases(single))
        record.run("put.union", params, _union_cases(single))

        if not tube.is_homogeneous:
            if tube.rank <= min(bounds.rank_max, 5):
                record.run("branch.complete", params, _branch_complete_cases(tube))
            record.run("branch.vertices", params, _branch_vertex_cases(tube))
            record.run("branch.catalan", params, _catalan_cases(tube))
            if tube.rank <= bounds.realizability_rank_max:
                record.run("realizability", params, _realizability_cases(single, tube))

        record.run("localize.rank", params, _localize_rank_cases(single, tube))
        record.run("localize.cycle", params, _localize_cycle_cases(single, tube))
        record.run("localize.compose", params, _localize_compose_cases(single, tube))
        record.run("quotient.segment", params, _quotient_cases(single, tube))

    if not reg.nonhomogeneous:
        record.run("kronecker.count", {"registry": reg.name}, _kronecker_cases(reg))

    logger.info("Verification of %s finished: %s", reg.name, report.totals)
    return report
