from dataclasses import dataclass
from typing import Iterable, Tuple

from app.exceptions import IndexOutOfRange, StrandMismatch


@dataclass(frozen=True)
class BraidWord:
    """Palabra en los generadores de Artin σ_1..σ_{d−1} (con signo)"""
    strands: int
    letters: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        for letter in self.letters:
            if letter == 0 or abs(letter) >= self.strands:
                raise IndexOutOfRange(
                    "braid generator out of range", letter=letter, strands=self.strands
                )

    @classmethod
    def of(cls, strands: int, letters: Iterable[int]) -> "BraidWord":
        return cls(strands, tuple(letters))

    def _check(self, other: "BraidWord") -> None:
        if other.strands != self.strands:
            raise StrandMismatch(
                "braids have different strand counts",
                left=self.strands,
                right=other.strands,
            )

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        self._check(other)
        return BraidWord(self.strands, self.letters + other.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(-letter for letter in reversed(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    def format(self) -> str:
        return " ".join(str(letter) for letter in self.letters)


@dataclass(frozen=True)
class ArcRef:
    """Arco estándar i (entre los pinchazos i, i+1) transportado por una trenza"""
    carrier: BraidWord
    index: int

    def __post_init__(self) -> None:
        if not 1 <= self.index < self.carrier.strands:
            raise IndexOutOfRange(
                "arc index out of range", index=self.index, strands=self.carrier.strands
            )

    @property
    def strands(self) -> int:
        return self.carrier.strands

    def moved_by(self, braid: BraidWord) -> "ArcRef":
        """Imagen del arco por una trenza"""
        return ArcRef(braid * self.carrier, self.index)


@dataclass(frozen=True)
class MonodromyRep:
    """Representación de monodromía: una transposición por punto de ramificación"""
    degree: int
    transpositions: Tuple[Tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.transpositions)
