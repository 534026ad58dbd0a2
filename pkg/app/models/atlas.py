import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple

from app.exceptions import UnknownCurve
from app.models.mapping_class import GeneratorWord
from app.models.words import Curve, Groupoid, Letter, SurfaceSig

STANDARD_ATLAS = "standard"

_FAMILY_PATTERN = re.compile(r"^(a|b|d)(\d+)$")


class CurveFamily(str, Enum):
    """Familias de curvas estándar"""
    MERIDIAN = "a"
    LONGITUDE = "b_i"
    CENTRAL = "b"
    BOUNDARY = "d"
    OTHER = "other"


def family_of(name: str) -> Tuple[CurveFamily, int]:
    """Familia e índice de un nombre estándar (a3 → MERIDIAN, 3)"""
    if name == "b":
        return CurveFamily.CENTRAL, 0
    match = _FAMILY_PATTERN.match(name)
    if not match:
        return CurveFamily.OTHER, 0
    prefix, index = match.group(1), int(match.group(2))
    family = {
        "a": CurveFamily.MERIDIAN,
        "b": CurveFamily.LONGITUDE,
        "d": CurveFamily.BOUNDARY,
    }[prefix]
    return family, index


@dataclass(frozen=True)
class CrossingToken:
    """Cruce de un camino generador con la curva: signo, offset del lazo insertado"""
    sign: int
    offset: int
    conjugated: bool = False

    def format(self) -> str:
        symbol = "+" if self.sign > 0 else "-"
        return f"{symbol}{self.offset}{'*' if self.conjugated else ''}"


@dataclass(frozen=True)
class CurveEntry:
    """Curva del atlas con su palabra y sus datos de cruce"""
    name: str
    word: Tuple[Letter, ...]
    crossings: Tuple[Tuple[Letter, Tuple[CrossingToken, ...]], ...] = ()

    def tokens_for(self, letter: Letter) -> Tuple[CrossingToken, ...]:
        for generator, tokens in self.crossings:
            if generator == letter:
                return tokens
        return ()

    def with_tokens(self, letter: Letter, tokens: Tuple[CrossingToken, ...]) -> "CurveEntry":
        rows = [(g, t) for g, t in self.crossings if g != letter]
        if tokens:
            rows.append((letter, tokens))
        return replace(self, crossings=tuple(sorted(rows)))


@dataclass(frozen=True)
class DerivedEntry:
    """Curva definida como imagen de otra curva del atlas"""
    name: str
    base: str
    conj: GeneratorWord = GeneratorWord()


class CurveAtlas:
    """Curvas con nombre de Σ_1^k y los datos necesarios para sus twists"""

    def __init__(
        self,
        surface: SurfaceSig,
        entries: List[CurveEntry],
        derived: Optional[List[DerivedEntry]] = None,
        name: str = STANDARD_ATLAS,
        extends_standard: bool = False,
    ):
        self.surface = surface
        self.groupoid = Groupoid(surface)
        self.name = name
        self.extends_standard = extends_standard
        self._entries: Dict[str, CurveEntry] = {}
        for entry in entries:
            self._entries[entry.name] = entry
        self._derived: Dict[str, DerivedEntry] = {}
        for item in derived or []:
            self._derived[item.name] = item

    @property
    def holes(self) -> int:
        return self.surface.holes

    @property
    def entries(self) -> List[CurveEntry]:
        return list(self._entries.values())

    @property
    def derived(self) -> List[DerivedEntry]:
        return list(self._derived.values())

    def names(self) -> List[str]:
        return list(self._entries) + list(self._derived)

    def standard_names(self) -> List[str]:
        return list(self._entries)

    def __contains__(self, name: object) -> bool:
        return name in self._entries or name in self._derived

    def __iter__(self) -> Iterator[str]:
        return iter(self.names())

    def is_derived(self, name: str) -> bool:
        return name in self._derived

    def entry(self, name: str) -> CurveEntry:
        if name not in self._entries:
            raise UnknownCurve("curve not in atlas", curve=name, atlas=self.name)
        return self._entries[name]

    def derived_entry(self, name: str) -> DerivedEntry:
        if name not in self._derived:
            raise UnknownCurve("curve not in atlas", curve=name, atlas=self.name)
        return self._derived[name]

    def require(self, name: str) -> None:
        if name not in self:
            raise UnknownCurve("curve not in atlas", curve=name, atlas=self.name)

    def base_curve(self, name: str) -> Curve:
        """Curva canónica de una entrada estándar"""
        return self.groupoid.curve(self.entry(name).word)

    def with_entry(self, entry: CurveEntry) -> "CurveAtlas":
        """Copia con una entrada reemplazada (sin volver a validar)"""
        entries = [entry if e.name == entry.name else e for e in self.entries]
        return CurveAtlas(
            self.surface, entries, self.derived, self.name, self.extends_standard
        )

    def with_derived(self, derived: List[DerivedEntry], name: str) -> "CurveAtlas":
        return CurveAtlas(self.surface, self.entries, derived, name, True)

    def __repr__(self) -> str:
        return (
            f"CurveAtlas(name={self.name!r}, surface={self.surface}, "
            f"curves={len(self._entries)}, derived={len(self._derived)})"
        )
