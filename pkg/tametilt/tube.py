"""
Tube Calculus

Coordinates on a single stable tube: quasi-simples at the mouth, finite
points S[m] on rays, Prüfer and adic limits, the generic point, and the
Hom/Ext dimension counts between them.

Indices are 1-based and taken mod the tube rank. tau_inv(U_i) = U_{i+1} and
U_i[l] has socle U_i, top U_{i+l-1}.
"""

import logging
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .errors import PointError, TametiltError

logger = logging.getLogger(__name__)

INFINITE_LENGTH_TOKENS = ("inf", "∞")
POINT_PATTERN = re.compile(r"^(?P<tube>[^:\[\]]+):(?P<index>-?\d+)\[(?P<length>-?\w+|∞|-∞)\]$")
QS_PATTERN = re.compile(r"^(?P<tube>[^:\[\]]+):(?P<index>-?\d+)$")


class PointKind(Enum):
    """Kinds of indecomposable points a tube carries"""
    FINITE = "finite"
    PRUEFER = "pruefer"
    ADIC = "adic"
    GENERIC = "generic"


class HomKind(Enum):
    """How much a Hom/Ext answer tells"""
    DIM = "dim"
    NONZERO = "nonzero"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class QuasiSimple:
    """A quasi-simple at the mouth of a tube"""
    tube: str
    index: int
    rank: int

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise PointError(f"Tube rank must be positive, got {self.rank}", check="tube.rank")
        object.__setattr__(self, "index", (self.index - 1) % self.rank + 1)

    @property
    def key(self) -> str:
        return f"{self.tube}:{self.index}"

    @property
    def sort_key(self) -> Tuple[str, int]:
        return (self.tube, self.index)

    def shift(self, steps: int) -> "QuasiSimple":
        """Move `steps` places in the tau_inv direction"""
        return QuasiSimple(self.tube, self.index + steps, self.rank)

    def tau(self) -> "QuasiSimple":
        return self.shift(-1)

    def tau_inv(self) -> "QuasiSimple":
        return self.shift(1)

    def __str__(self) -> str:
        return self.key


@dataclass(frozen=True)
class RegPoint:
    """A point of the tube geometry: S[m], S[inf], S[-inf] or G"""
    kind: PointKind
    qs: Optional[QuasiSimple] = None
    length: Optional[int] = None

    @classmethod
    def finite(cls, qs: QuasiSimple, length: int) -> "RegPoint":
        if length < 1:
            raise PointError(f"Finite point needs length >= 1, got {length}", check="tube.length")
        return cls(PointKind.FINITE, qs, length)

    @classmethod
    def pruefer(cls, qs: QuasiSimple) -> "RegPoint":
        return cls(PointKind.PRUEFER, qs)

    @classmethod
    def adic(cls, qs: QuasiSimple) -> "RegPoint":
        return cls(PointKind.ADIC, qs)

    @classmethod
    def generic(cls) -> "RegPoint":
        return cls(PointKind.GENERIC)

    @property
    def is_finite(self) -> bool:
        return self.kind == PointKind.FINITE

    @property
    def is_pruefer(self) -> bool:
        return self.kind == PointKind.PRUEFER

    @property
    def is_adic(self) -> bool:
        return self.kind == PointKind.ADIC

    @property
    def is_generic(self) -> bool:
        return self.kind == PointKind.GENERIC

    @property
    def tube(self) -> Optional[str]:
        return self.qs.tube if self.qs else None

    @property
    def rank(self) -> int:
        return self.qs.rank if self.qs else 0

    @property
    def index(self) -> int:
        return self.qs.index if self.qs else 0

    @property
    def sort_key(self) -> Tuple[str, int, int]:
        """Canonical order: tube id, mouth index, length (limits last)"""
        if self.qs is None:
            return ("", 0, 0)
        order = {PointKind.FINITE: 0, PointKind.PRUEFER: 1, PointKind.ADIC: 2}[self.kind]
        return (self.qs.tube, self.qs.index, (self.length or 0) + order * 10**6)

    def __str__(self) -> str:
        if self.kind == PointKind.GENERIC:
            return "G"
        if self.kind == PointKind.PRUEFER:
            return f"{self.qs}[inf]"
        if self.kind == PointKind.ADIC:
            return f"{self.qs}[-inf]"
        return f"{self.qs}[{self.length}]"


@dataclass(frozen=True)
class HomResult:
    """Dimension over the common endomorphism division ring, or a nonvanishing flag"""
    kind: HomKind
    value: int = 0
    nonzero: bool = False

    @classmethod
    def dim(cls, value: int) -> "HomResult":
        return cls(HomKind.DIM, value=value, nonzero=value > 0)

    @classmethod
    def nonzero_only(cls, nonzero: bool) -> "HomResult":
        return cls(HomKind.NONZERO, nonzero=nonzero)

    @classmethod
    def unsupported(cls) -> "HomResult":
        return cls(HomKind.UNSUPPORTED)

    @property
    def is_supported(self) -> bool:
        return self.kind != HomKind.UNSUPPORTED

    @property
    def is_zero(self) -> bool:
        if self.kind == HomKind.UNSUPPORTED:
            raise TametiltError("Vanishing is undecided for an unsupported pair", check="tube.unsupported")
        return not self.nonzero

    def to_json(self) -> Dict[str, Any]:
        if self.kind == HomKind.DIM:
            return {"kind": "dim", "value": self.value}
        if self.kind == HomKind.NONZERO:
            return {"kind": "nonzero", "value": self.nonzero}
        return {"kind": "unsupported"}


@dataclass(frozen=True)
class Tube:
    """A tube of the registry: id plus rank"""
    id: str
    rank: int

    @property
    def is_homogeneous(self) -> bool:
        return self.rank == 1

    def qs(self, index: int) -> QuasiSimple:
        return QuasiSimple(self.id, index, self.rank)

    def quasi_simples(self) -> List[QuasiSimple]:
        return [self.qs(i) for i in range(1, self.rank + 1)]

    def point(self, index: int, length: int) -> RegPoint:
        return RegPoint.finite(self.qs(index), length)

    def points(self, max_length: int) -> List[RegPoint]:
        """All finite points of length <= max_length, canonically ordered"""
        return [
            self.point(i, length)
            for i in range(1, self.rank + 1)
            for length in range(1, max_length + 1)
        ]

    def exceptional_points(self) -> List[RegPoint]:
        return self.points(self.rank - 1)


def _require_finite(p: RegPoint, operation: str) -> QuasiSimple:
    if not p.is_finite or p.qs is None or p.length is None:
        raise TametiltError(f"{operation} needs a finite point, got {p}", check="tube.finite_only")
    return p.qs


def tau(p: RegPoint) -> RegPoint:
    """Auslander-Reiten translate; keeps length, shifts the mouth index by -1"""
    if p.is_generic or p.qs is None:
        raise TametiltError("The generic point has no translate here", check="tube.unsupported")
    return RegPoint(p.kind, p.qs.tau(), p.length)


def tau_inv(p: RegPoint) -> RegPoint:
    if p.is_generic or p.qs is None:
        raise TametiltError("The generic point has no translate here", check="tube.unsupported")
    return RegPoint(p.kind, p.qs.tau_inv(), p.length)


def socle(p: RegPoint) -> QuasiSimple:
    return _require_finite(p, "socle")


def top(p: RegPoint) -> QuasiSimple:
    qs = _require_finite(p, "top")
    return qs.shift(p.length - 1)  # type: ignore[operator]


def comp_factors(p: RegPoint) -> List[QuasiSimple]:
    """Regular composition factors from socle to top, with repetitions"""
    qs = _require_finite(p, "comp_factors")
    return [qs.shift(k) for k in range(p.length)]  # type: ignore[arg-type]


def comp_factor_set(points: Iterable[RegPoint]) -> FrozenSet[QuasiSimple]:
    return frozenset(qs for p in points for qs in comp_factors(p))


def submodules(p: RegPoint) -> List[RegPoint]:
    """Proper regular submodules along the ray of p"""
    qs = _require_finite(p, "submodules")
    return [RegPoint.finite(qs, k) for k in range(1, p.length)]  # type: ignore[arg-type]


def wing(p: RegPoint) -> FrozenSet[RegPoint]:
    """The wing under a vertex of length below the rank"""
    qs = _require_finite(p, "wing")
    m = p.length or 0
    if m >= qs.rank:
        raise TametiltError(
            f"Wing of {p} is undefined: length {m} is not below rank {qs.rank}",
            check="tube.wing_length",
            witness=[str(p)],
        )
    return frozenset(
        RegPoint.finite(qs.shift(j - 1), k)
        for j in range(1, m + 1)
        for k in range(1, m - j + 2)
    )


def in_wing(x: RegPoint, vertex: RegPoint) -> bool:
    """Membership test for wing(vertex) without building the set"""
    if not (x.is_finite and vertex.is_finite) or x.tube != vertex.tube:
        return False
    r = vertex.rank
    m = vertex.length or 0
    if m >= r:
        return False
    d = (x.index - vertex.index) % r
    return d <= m - 1 and d + (x.length or 0) <= m


def wing_quasi_simples(p: RegPoint) -> FrozenSet[QuasiSimple]:
    """The m quasi-simples at the mouth of wing(p)"""
    return frozenset(comp_factors(p))


@lru_cache(maxsize=None)
def _residue_count(lo: int, hi: int, residue: int, r: int) -> int:
    """Count s in [lo, hi] with s = residue mod r"""
    if hi < lo:
        return 0
    first = lo + (residue - lo) % r
    return 0 if first > hi else (hi - first) // r + 1


def hom_dim(x: RegPoint, y: RegPoint) -> HomResult:
    """Hom dimension between regular points of the tube calculus"""
    if x.is_generic or y.is_generic:
        return HomResult.unsupported()

    if x.is_finite and y.is_finite:
        if x.tube != y.tube:
            return HomResult.dim(0)
        lx, ly = x.length or 0, y.length or 0
        return HomResult.dim(
            _residue_count(max(0, lx - ly), lx - 1, y.index - x.index, x.rank)
        )

    if x.is_finite and y.is_pruefer:
        if x.tube != y.tube:
            return HomResult.dim(0)
        return HomResult.dim(_residue_count(0, (x.length or 0) - 1, y.index - x.index, x.rank))

    if x.is_pruefer and y.is_finite:
        return HomResult.dim(0)

    if x.is_adic and y.is_finite:
        if x.tube != y.tube:
            return HomResult.nonzero_only(False)
        return HomResult.nonzero_only(x.qs in set(comp_factors(y)))

    return HomResult.unsupported()


def ext_dim(x: RegPoint, y: RegPoint) -> HomResult:
    """Ext^1(x, y) through the Auslander-Reiten formula Ext(x, y) = D Hom(y, tau x)"""
    if x.is_generic or y.is_generic:
        return HomResult.unsupported()
    if x.is_pruefer and y.is_adic:
        return HomResult.nonzero_only(x.tube == y.tube)
    return hom_dim(y, tau(x))


@lru_cache(maxsize=None)
def middle_terms(x: RegPoint, y: RegPoint) -> Tuple[Tuple[RegPoint, ...], ...]:
    """
    Middle terms of the elementary extensions 0 -> y -> E -> x -> 0.

    One term per lift i' of x's index with j < i' <= j+m and i'+l-1 >= j+m,
    namely U_j[i'+l-j] + U_i'[j+m-i']; the number of terms is ext_dim(x, y).
    """
    if not (x.is_finite and y.is_finite) or x.tube != y.tube or x.qs is None or y.qs is None:
        return ()
    r = x.rank
    i, l = x.index, x.length or 0
    j, m = y.index, y.length or 0
    terms: List[Tuple[RegPoint, ...]] = []
    lift = j + 1 + (i - (j + 1)) % r
    while lift <= j + m:
        if lift + l - 1 >= j + m:
            summands = [RegPoint.finite(y.qs, lift + l - j)]
            if j + m - lift > 0:
                summands.append(RegPoint.finite(x.qs, j + m - lift))
            terms.append(tuple(summands))
        lift += r
    return tuple(terms)


def sort_points(points: Iterable[RegPoint]) -> List[RegPoint]:
    return sorted(points, key=lambda p: p.sort_key)


def parse_qs(text: str, ranks: Mapping[str, int]) -> QuasiSimple:
    """Parse a quasi-simple key such as 'a:2'"""
    match = QS_PATTERN.match(text.strip())
    if not match:
        raise PointError(f"Invalid quasi-simple key '{text}'. Expected '<tube-id>:<index>'", check="point.syntax")
    tube_id = match.group("tube")
    if tube_id not in ranks:
        raise PointError(f"Unknown tube '{tube_id}' in '{text}'", check="point.unknown_tube")
    index = int(match.group("index"))
    rank = ranks[tube_id]
    if not 1 <= index <= rank:
        raise PointError(
            f"Index {index} out of range 1..{rank} for tube '{tube_id}'", check="point.index_range"
        )
    return QuasiSimple(tube_id, index, rank)


def parse_point(text: str, ranks: Mapping[str, int]) -> RegPoint:
    """Parse the text form 'a:2[3]', 'a:2[inf]', 'a:2[-inf]' or 'G'"""
    text = text.strip()
    if text == "G":
        return RegPoint.generic()
    match = POINT_PATTERN.match(text)
    if not match:
        raise PointError(
            f"Invalid point '{text}'. Expected 'tube:index[length]', 'tube:index[inf]', "
            "'tube:index[-inf]' or 'G'",
            check="point.syntax",
        )
    qs = parse_qs(f"{match.group('tube')}:{match.group('index')}", ranks)
    length = match.group("length")
    if length in INFINITE_LENGTH_TOKENS:
        return RegPoint.pruefer(qs)
    if length.startswith("-") and length[1:] in INFINITE_LENGTH_TOKENS:
        return RegPoint.adic(qs)
    if not length.isdigit():
        raise PointError(f"Invalid length '{length}' in '{text}'", check="point.syntax")
    return RegPoint.finite(qs, int(length))
