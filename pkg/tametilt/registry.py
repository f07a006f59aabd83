"""
Tube Registry

Combinatorial configuration of a tame hereditary algebra: the non-homogeneous
tubes with their ranks, named homogeneous tubes, a flag for the remaining
homogeneous family, and multiplicity data.
"""

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import RegistryError
from .tube import QuasiSimple, RegPoint, Tube, parse_point, parse_qs

logger = logging.getLogger(__name__)

PRESET_DIR = Path(__file__).parent / "presets"
REST_TUBE = "*"
MAX_NONHOMOGENEOUS = 3
SCHEMA = "tametilt/1"


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


@dataclass(frozen=True)
class MultiplicityMap:
    """alpha_U per quasi-simple key (default 1) and alpha for the generic module"""
    values: Tuple[Tuple[str, int], ...] = ()
    alpha_generic: int = 1

    def __post_init__(self) -> None:
        for key, value in self.values:
            if value < 1:
                raise RegistryError(f"alpha[{key}] must be >= 1, got {value}", check="registry.alpha")
        if self.alpha_generic < 1:
            raise RegistryError(
                f"alpha_generic must be >= 1, got {self.alpha_generic}", check="registry.alpha"
            )
        object.__setattr__(self, "values", tuple(sorted(self.values)))

    @classmethod
    def from_dict(cls, alpha: Mapping[str, int], alpha_generic: int = 1) -> "MultiplicityMap":
        if not isinstance(alpha, Mapping):
            raise RegistryError("Alpha must map quasi-simple keys to integers", check="registry.syntax")
        for key, value in list(alpha.items()) + [("alpha_generic", alpha_generic)]:
            if not _is_int(value):
                raise RegistryError(f"alpha[{key}] must be an integer, got {value!r}", check="registry.syntax")
        return cls(tuple((str(k), int(v)) for k, v in alpha.items()), int(alpha_generic))

    def of(self, qs: QuasiSimple) -> int:
        return dict(self.values).get(qs.key, 1)

    def to_json(self) -> Dict[str, int]:
        return dict(self.values)


@dataclass(frozen=True)
class LambdaSet:
    """A subset of the tube index family: named tubes plus the unnamed rest"""
    named: FrozenSet[str] = frozenset()
    include_rest: bool = False

    @classmethod
    def of(cls, *tube_ids: str, rest: bool = False) -> "LambdaSet":
        return cls(frozenset(tube_ids), rest)

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "LambdaSet":
        if not isinstance(data, Mapping):
            raise RegistryError("Lambda must be an object with 'named' and 'rest'", check="lambda.syntax")
        named = data.get("named", [])
        if not isinstance(named, list) or not all(isinstance(t, str) for t in named):
            raise RegistryError("Lambda 'named' must be a list of tube ids", check="lambda.syntax")
        rest = data.get("rest", False)
        if not isinstance(rest, bool):
            raise RegistryError(f"Lambda 'rest' must be true or false, got {rest!r}", check="lambda.syntax")
        return cls(frozenset(named), rest)

    def contains(self, tube_id: str) -> bool:
        if tube_id == REST_TUBE:
            return self.include_rest
        return tube_id in self.named

    @property
    def is_empty(self) -> bool:
        return not self.named and not self.include_rest

    def to_json(self) -> Dict[str, Any]:
        return {"named": sorted(self.named), "rest": self.include_rest}


@dataclass(frozen=True)
class TubeRegistry:
    """The tubes of a tame hereditary algebra"""
    nonhomogeneous: Tuple[Tuple[str, int], ...] = ()
    homogeneous_named: FrozenSet[str] = frozenset()
    rest: bool = False
    alpha: MultiplicityMap = field(default_factory=MultiplicityMap)
    name: str = "custom"

    def __post_init__(self) -> None:
        object.__setattr__(self, "nonhomogeneous", tuple((str(t), int(r)) for t, r in self.nonhomogeneous))
        object.__setattr__(self, "homogeneous_named", frozenset(self.homogeneous_named))
        self._validate()

    def _validate(self) -> None:
        if len(self.nonhomogeneous) > MAX_NONHOMOGENEOUS:
            raise RegistryError(
                f"A tame hereditary algebra has at most {MAX_NONHOMOGENEOUS} non-homogeneous tubes, "
                f"got {len(self.nonhomogeneous)}",
                check="registry.tube_count",
            )
        ids = [t for t, _ in self.nonhomogeneous] + sorted(self.homogeneous_named, key=str)
        if len(set(ids)) != len(ids):
            raise RegistryError(f"Tube ids must be distinct: {ids}", check="registry.duplicate_id")
        for tube_id in ids:
            if not isinstance(tube_id, str) or not tube_id or tube_id == REST_TUBE or ":" in tube_id or "[" in tube_id:
                raise RegistryError(f"Invalid tube id '{tube_id}'", check="registry.tube_id")
        for tube_id, rank in self.nonhomogeneous:
            if rank < 2:
                raise RegistryError(
                    f"Non-homogeneous tube '{tube_id}' needs rank >= 2, got {rank}",
                    check="registry.rank",
                )
        ranks = self.ranks
        for key, _ in self.alpha.values:
            parse_qs(key, ranks)

    @property
    def ranks(self) -> Dict[str, int]:
        """Tube id -> rank, the rest token included when present"""
        ranks = dict(self.nonhomogeneous)
        ranks.update({tube_id: 1 for tube_id in self.homogeneous_named})
        if self.rest:
            ranks[REST_TUBE] = 1
        return ranks

    @property
    def tube_ids(self) -> List[str]:
        """Named tube ids, non-homogeneous first"""
        return [t for t, _ in self.nonhomogeneous] + sorted(self.homogeneous_named)

    def nonhomogeneous_tubes(self) -> List[Tube]:
        return [Tube(t, r) for t, r in self.nonhomogeneous]

    def tubes(self, include_rest: bool = True) -> List[Tube]:
        """Every tube, the rest token last"""
        tubes = self.nonhomogeneous_tubes() + [Tube(t, 1) for t in sorted(self.homogeneous_named)]
        if include_rest and self.rest:
            tubes.append(Tube(REST_TUBE, 1))
        return tubes

    def tube(self, tube_id: str) -> Tube:
        ranks = self.ranks
        if tube_id not in ranks:
            raise RegistryError(f"Unknown tube '{tube_id}'", check="registry.unknown_tube")
        return Tube(tube_id, ranks[tube_id])

    def quasi_simples(self, include_rest: bool = True) -> List[QuasiSimple]:
        return [qs for tube in self.tubes(include_rest) for qs in tube.quasi_simples()]

    def everything(self) -> LambdaSet:
        """The whole index family as a LambdaSet"""
        return LambdaSet(frozenset(self.tube_ids), self.rest)

    def with_homogeneous(self, *tube_ids: str) -> "TubeRegistry":
        """Register further named homogeneous tubes"""
        return replace(self, homogeneous_named=self.homogeneous_named | frozenset(tube_ids))

    def with_alpha(self, alpha: MultiplicityMap) -> "TubeRegistry":
        return replace(self, alpha=alpha)

    def parse_qs(self, text: str) -> QuasiSimple:
        return parse_qs(text, self.ranks)

    def parse_point(self, text: str) -> RegPoint:
        return parse_point(text, self.ranks)

    def to_json(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "tubes": [{"id": t, "rank": r} for t, r in self.nonhomogeneous],
            "homogeneous_named": sorted(self.homogeneous_named),
            "rest": self.rest,
            "alpha": self.alpha.to_json(),
            "alpha_generic": self.alpha.alpha_generic,
        }


class RegistryParser:
    """Parser for registry JSON documents"""

    def __init__(self) -> None:
        self._known_fields = {
            "name", "description", "tubes", "homogeneous_named", "rest", "alpha", "alpha_generic"
        }

    def parse_file(self, file_path: str) -> TubeRegistry:
        """Parse a registry JSON file"""
        with open(file_path, "r", encoding="utf-8") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise RegistryError(f"Registry file '{file_path}' is not valid JSON: {e}", check="registry.syntax")
        return self.parse_json(data)

    def parse_json(self, data: Dict[str, Any]) -> TubeRegistry:
        """Parse registry JSON data"""
        self._validate_registry_format(data)
        tubes = tuple((entry["id"], entry["rank"]) for entry in data["tubes"])
        alpha = MultiplicityMap.from_dict(data.get("alpha", {}), data.get("alpha_generic", 1))
        registry = TubeRegistry(
            nonhomogeneous=tubes,
            homogeneous_named=frozenset(data.get("homogeneous_named", [])),
            rest=data.get("rest", False),
            alpha=alpha,
            name=data.get("name", "custom"),
        )
        logger.debug("Parsed registry %s with ranks %s", registry.name, registry.ranks)
        return registry

    def _validate_registry_format(self, data: Dict[str, Any]) -> None:
        """Validate that the registry data is in expected format"""
        if not isinstance(data, dict):
            raise RegistryError("Registry data must be a JSON object", check="registry.syntax")

        unknown = set(data) - self._known_fields
        if unknown:
            raise RegistryError(
                f"Unknown registry fields: {', '.join(sorted(unknown))}. "
                f"Supported fields: {', '.join(sorted(self._known_fields))}",
                check="registry.syntax",
            )

        if "tubes" not in data or not isinstance(data["tubes"], list):
            raise RegistryError("Registry data missing 'tubes' list", check="registry.syntax")

        for entry in data["tubes"]:
            if not isinstance(entry, dict) or not isinstance(entry.get("id"), str):
                raise RegistryError(f"Tube entry needs a string 'id': {entry}", check="registry.syntax")
            if not isinstance(entry.get("rank"), int) or isinstance(entry.get("rank"), bool):
                raise RegistryError(f"Tube entry needs an integer 'rank': {entry}", check="registry.syntax")

        named = data.get("homogeneous_named", [])
        if not isinstance(named, list) or not all(isinstance(t, str) for t in named):
            raise RegistryError("'homogeneous_named' must be a list of tube ids", check="registry.syntax")
        if not isinstance(data.get("rest", False), bool):
            raise RegistryError("'rest' must be true or false", check="registry.syntax")
        if not isinstance(data.get("name", "custom"), str):
            raise RegistryError("'name' must be a string", check="registry.syntax")
        if not isinstance(data.get("alpha", {}), dict):
            raise RegistryError("'alpha' must map quasi-simple keys to integers", check="registry.syntax")


def kronecker() -> TubeRegistry:
    """Only homogeneous tubes"""
    return TubeRegistry(rest=True, name="kronecker")


def list_presets() -> Dict[str, TubeRegistry]:
    """Bundled presets by name"""
    presets = {"kronecker": kronecker()}
    parser = RegistryParser()
    for path in sorted(PRESET_DIR.glob("*.json")):
        registry = parser.parse_file(str(path))
        presets[registry.name] = registry
    return presets


def preset(
    name: str,
    tubes: Optional[Sequence[Tuple[str, int]]] = None,
    rest: bool = True,
    homogeneous: Iterable[str] = (),
) -> TubeRegistry:
    """Load a named preset, or build a custom registry from explicit ranks"""
    if name == "custom":
        if tubes is None:
            raise RegistryError("Preset 'custom' needs an explicit tube list", check="registry.custom")
        return TubeRegistry(tuple(tubes), frozenset(homogeneous), rest, name="custom")

    presets = list_presets()
    if name not in presets:
        raise RegistryError(
            f"Unknown preset '{name}'. Available presets: {', '.join(sorted(presets))}, custom",
            check="registry.unknown_preset",
        )
    registry = presets[name]
    homogeneous = tuple(homogeneous)
    return registry.with_homogeneous(*homogeneous) if homogeneous else registry


def validate_lambda(reg: TubeRegistry, lam: LambdaSet) -> LambdaSet:
    """Check that lam names only registered tubes and uses the rest flag legally"""
    unknown = sorted(set(lam.named) - set(reg.tube_ids))
    if unknown:
        raise RegistryError(
            f"Unknown tube(s) in lambda: {', '.join(unknown)}",
            check="lambda.unknown_tube",
            witness=unknown,
        )
    if lam.include_rest and not reg.rest:
        raise RegistryError(
            "Lambda includes the homogeneous rest but the registry has none",
            check="lambda.rest",
        )
    return lam
