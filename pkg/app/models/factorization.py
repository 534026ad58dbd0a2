from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterator, Optional, Set, Tuple

from app.exceptions import InvalidDictionary
from app.models.atlas import STANDARD_ATLAS
from app.models.mapping_class import GeneratorWord
from app.models.words import SurfaceSig


@dataclass(frozen=True)
class TwistFactor:
    """Twist positivo con procedencia: curva base del atlas y conjugador"""
    base: str
    conj: GeneratorWord = GeneratorWord()

    @property
    def label(self) -> str:
        if self.conj.is_empty:
            return self.base
        return f"_{{{self.conj.format()}}}({self.base})"

    def format(self) -> str:
        return f"factor base={self.base} conj={self.conj.format()}"


@dataclass(frozen=True)
class Factorization:
    """Producto ordenado de factores; el de la izquierda se aplica al final"""
    surface: SurfaceSig
    factors: Tuple[TwistFactor, ...]
    target: Tuple[int, ...]
    atlas: str = STANDARD_ATLAS

    def __post_init__(self) -> None:
        object.__setattr__(self, "target", tuple(sorted(self.target)))

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self) -> Iterator[TwistFactor]:
        return iter(self.factors)

    @property
    def is_full_target(self) -> bool:
        return self.target == tuple(range(1, self.surface.holes + 1))

    def with_factors(self, factors: Tuple[TwistFactor, ...]) -> "Factorization":
        return replace(self, factors=tuple(factors))

    @property
    def labels(self) -> str:
        return " ".join(factor.label for factor in self.factors)


class StepKind(str, Enum):
    """Tipos de pasos de un guion"""
    LEFT = "L"
    RIGHT = "R"
    CONJ = "CONJ"
    ROT = "ROT"
    RELABEL = "RELABEL"
    CAP = "CAP"


@dataclass(frozen=True)
class MoveStep:
    kind: StepKind
    index: Optional[int] = None
    word: Optional[GeneratorWord] = None
    symmetry: Optional[str] = None

    def format(self) -> str:
        if self.kind in (StepKind.LEFT, StepKind.RIGHT, StepKind.ROT):
            return f"{self.kind.value} {self.index}"
        if self.kind == StepKind.CONJ:
            word = self.word if self.word is not None else GeneratorWord()
            return f"CONJ {word.format()}"
        if self.kind == StepKind.RELABEL:
            return f"RELABEL {self.symmetry}"
        return f"CAP {self.index} {self.symmetry}"


@dataclass(frozen=True)
class MoveScript:
    """Secuencia reproducible de movimientos"""
    steps: Tuple[MoveStep, ...] = ()
    name: str = ""

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[MoveStep]:
        return iter(self.steps)

    def kinds_used(self) -> Set[StepKind]:
        return {step.kind for step in self.steps}


@dataclass(frozen=True)
class RelabelMap:
    """Diccionario entre nombres de atlas inducido por una simetría o un tapado"""
    name: str
    source: SurfaceSig
    target: SurfaceSig
    mapping: Tuple[Tuple[str, Optional[str]], ...]
    _table: Dict[str, Optional[str]] = field(
        init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self) -> None:
        object.__setattr__(self, "_table", dict(self.mapping))

    @property
    def as_dict(self) -> Dict[str, Optional[str]]:
        return dict(self._table)

    def image(self, name: str) -> Optional[str]:
        """Imagen de un nombre; None significa IDENTITY"""
        table = self._table
        if name not in table:
            raise InvalidDictionary(
                "name not covered by dictionary", curve=name, dictionary=self.name
            )
        return table[name]
