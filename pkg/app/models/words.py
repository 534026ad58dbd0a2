from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Sequence, Tuple

from app.exceptions import (
    CompositionMismatch,
    IndexOutOfRange,
    InvariantViolation,
    NotALoop,
    ParseError,
)

# Una letra es ±(índice + 1) sobre los generadores libres; el signo es la orientación
Letter = int


class PathKind(str, Enum):
    """Tipos de caminos generadores"""
    HANDLE_ALPHA = "alpha"
    HANDLE_BETA = "beta"
    BOUNDARY = "boundary"
    CONNECTOR = "connector"


@dataclass(frozen=True)
class SurfaceSig:
    """Firma Σ_g^k de la superficie"""
    genus: int
    holes: int

    def __post_init__(self) -> None:
        if self.holes < 1:
            raise InvariantViolation("holes", f"k must be >= 1, got {self.holes}")
        if self.genus < 0:
            raise InvariantViolation("genus", f"genus must be >= 0, got {self.genus}")

    @property
    def loop_rank(self) -> int:
        return 2 * self.genus + self.holes - 1

    def __str__(self) -> str:
        return f"Σ_{self.genus}^{self.holes}"


@dataclass(frozen=True)
class GeneratorPath:
    """Camino generador entre puntos base"""
    name: str
    source: int
    target: int
    kind: PathKind
    derived: bool = False


@dataclass(frozen=True)
class GroupoidWord:
    """Palabra reducida del grupoide; las letras se guardan en orden de recorrido"""
    source: int
    target: int
    letters: Tuple[Letter, ...] = ()

    @property
    def is_loop(self) -> bool:
        return self.source == self.target

    @property
    def is_empty(self) -> bool:
        return not self.letters

    def __len__(self) -> int:
        return len(self.letters)


@dataclass(frozen=True)
class Curve:
    """Curva cerrada representada por su forma canónica"""
    rep: GroupoidWord
    oriented: bool = False

    @property
    def key(self) -> Tuple[Letter, ...]:
        return self.rep.letters

    @property
    def is_trivial(self) -> bool:
        return self.rep.is_empty


def free_reduce(letters: Sequence[Letter]) -> Tuple[Letter, ...]:
    """Reducción libre con una pila"""
    stack: List[Letter] = []
    for letter in letters:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def invert_letters(letters: Sequence[Letter]) -> Tuple[Letter, ...]:
    return tuple(-letter for letter in reversed(letters))


def cyclic_reduce(letters: Sequence[Letter]) -> Tuple[Letter, ...]:
    """Reducción cíclica de una palabra ya reducida"""
    start, end = 0, len(letters)
    while end - start >= 2 and letters[start] == -letters[end - 1]:
        start += 1
        end -= 1
    return tuple(letters[start:end])


def least_rotation(letters: Tuple[Letter, ...]) -> Tuple[Letter, ...]:
    if not letters:
        return letters
    return min(letters[i:] + letters[:i] for i in range(len(letters)))


class Groupoid:
    """Grupoide fundamental libre de Σ_g^k con un punto base en cada borde"""

    def __init__(self, surface: SurfaceSig):
        self.surface = surface
        self.paths: List[GeneratorPath] = self._build_paths()
        self._index: Dict[str, int] = {
            path.name: position + 1 for position, path in enumerate(self.paths)
        }
        self.derived_boundary = GeneratorPath(
            name="e1", source=1, target=1, kind=PathKind.BOUNDARY, derived=True
        )
        self._e1 = self._build_e1()

    def _build_paths(self) -> List[GeneratorPath]:
        genus, holes = self.surface.genus, self.surface.holes
        paths: List[GeneratorPath] = []
        for handle in range(1, genus + 1):
            suffix = "" if genus == 1 else str(handle)
            paths.append(GeneratorPath(f"alpha{suffix}", 1, 1, PathKind.HANDLE_ALPHA))
            paths.append(GeneratorPath(f"beta{suffix}", 1, 1, PathKind.HANDLE_BETA))
        for hole in range(2, holes + 1):
            paths.append(GeneratorPath(f"e{hole}", hole, hole, PathKind.BOUNDARY))
        for hole in range(2, holes + 1):
            paths.append(GeneratorPath(f"h{hole}", 1, hole, PathKind.CONNECTOR))
        return paths

    def _build_e1(self) -> GroupoidWord:
        # e1 = (h_j ē_j h̄_j)_{j=2..k} · Π (α β̄ ᾱ β)
        raw: List[Letter] = []
        for hole in range(2, self.surface.holes + 1):
            h, e = self.letter(f"h{hole}"), self.letter(f"e{hole}")
            raw.extend([h, -e, -h])
        for path in self.paths:
            if path.kind == PathKind.HANDLE_ALPHA:
                alpha = self._index[path.name]
                beta = alpha + 1
                raw.extend([alpha, -beta, -alpha, beta])
        return self.reduce(raw, basepoint=1)

    # -- generadores -------------------------------------------------------

    def generating_set(self) -> List[GeneratorPath]:
        """Conjunto generador completo (e1 marcado como derivado)"""
        handles = [p for p in self.paths if p.kind in (PathKind.HANDLE_ALPHA, PathKind.HANDLE_BETA)]
        boundaries = [p for p in self.paths if p.kind == PathKind.BOUNDARY]
        connectors = [p for p in self.paths if p.kind == PathKind.CONNECTOR]
        return handles + [self.derived_boundary] + boundaries + connectors

    @property
    def free_letters(self) -> List[Letter]:
        return list(range(1, len(self.paths) + 1))

    def letter(self, name: str) -> Letter:
        inverse = name.startswith("~")
        bare = name[1:] if inverse else name
        if bare not in self._index:
            raise ParseError(f"unknown generator '{bare}'", generator=bare)
        value = self._index[bare]
        return -value if inverse else value

    def path_of(self, letter: Letter) -> GeneratorPath:
        position = abs(letter) - 1
        if not 0 <= position < len(self.paths):
            raise IndexOutOfRange("letter out of range", letter=letter)
        return self.paths[position]

    def name_of(self, letter: Letter) -> str:
        name = self.path_of(letter).name
        return name if letter > 0 else f"~{name}"

    def source_of(self, letter: Letter) -> int:
        path = self.path_of(letter)
        return path.source if letter > 0 else path.target

    def target_of(self, letter: Letter) -> int:
        path = self.path_of(letter)
        return path.target if letter > 0 else path.source

    # -- palabras ----------------------------------------------------------

    def identity(self, basepoint: int = 1) -> GroupoidWord:
        self._check_basepoint(basepoint)
        return GroupoidWord(basepoint, basepoint, ())

    def check_composable(self, raw: Sequence[Letter]) -> None:
        for position in range(len(raw) - 1):
            if self.target_of(raw[position]) != self.source_of(raw[position + 1]):
                raise CompositionMismatch(
                    "letters are not composable",
                    position=position,
                    left=self.name_of(raw[position]),
                    right=self.name_of(raw[position + 1]),
                )

    def reduce(self, raw: Sequence[Letter], basepoint: int = 1) -> GroupoidWord:
        """Palabra reducida única; idempotente"""
        self.check_composable(raw)
        if not raw:
            return self.identity(basepoint)
        source, target = self.source_of(raw[0]), self.target_of(raw[-1])
        letters = free_reduce(raw)
        return GroupoidWord(source, target, letters)

    def compose(self, u: GroupoidWord, v: GroupoidWord) -> GroupoidWord:
        """u ∘ v: primero v, luego u"""
        if v.target != u.source:
            raise CompositionMismatch(
                "target(v) != source(u)", source_u=u.source, target_v=v.target
            )
        return GroupoidWord(v.source, u.target, free_reduce(v.letters + u.letters))

    def inverse(self, word: GroupoidWord) -> GroupoidWord:
        return GroupoidWord(word.target, word.source, invert_letters(word.letters))

    def generator_word(self, letter: Letter) -> GroupoidWord:
        return GroupoidWord(self.source_of(letter), self.target_of(letter), (letter,))

    def boundary_word(self, hole: int) -> GroupoidWord:
        """Lazo del borde i llevado al punto base 1 por h_i (e1 tal cual)"""
        self._check_basepoint(hole)
        if hole == 1:
            return self._e1
        h, e = self.letter(f"h{hole}"), self.letter(f"e{hole}")
        return GroupoidWord(1, 1, (h, e, -h))

    def _check_basepoint(self, point: int) -> None:
        if not 1 <= point <= self.surface.holes:
            raise IndexOutOfRange(
                "boundary index out of range", index=point, holes=self.surface.holes
            )

    # -- texto -------------------------------------------------------------

    def parse_letters(self, text: str) -> Tuple[Letter, ...]:
        """Lee letras separadas por puntos; e1 se expande a su palabra"""
        text = text.strip()
        if not text or text == "-":
            return ()
        raw: List[Letter] = []
        for token in text.split("."):
            token = token.strip()
            if token in ("e1", "~e1"):
                word = self._e1.letters
                raw.extend(word if token == "e1" else invert_letters(word))
            else:
                raw.append(self.letter(token))
        return tuple(raw)

    def format_letters(self, letters: Sequence[Letter]) -> str:
        if not letters:
            return "-"
        return ".".join(self.name_of(letter) for letter in letters)

    # -- curvas ------------------------------------------------------------

    def canonicalize(self, word: GroupoidWord) -> Curve:
        """Forma canónica: reducción cíclica, rotación mínima e inversión"""
        if not word.is_loop:
            raise NotALoop(
                "curve representative is not a loop",
                source=word.source,
                target=word.target,
            )
        letters = cyclic_reduce(free_reduce(word.letters))
        if not letters:
            return Curve(self.identity(1))
        best = min(least_rotation(letters), least_rotation(invert_letters(letters)))
        point = self.source_of(best[0])
        return Curve(GroupoidWord(point, point, best))

    def curve(self, raw: Sequence[Letter]) -> Curve:
        return self.canonicalize(self.reduce(raw))
