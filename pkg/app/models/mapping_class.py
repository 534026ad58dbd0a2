from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Tuple

from app.exceptions import InvariantViolation, ParseError, SurfaceMismatch
from app.models.words import Groupoid, GroupoidWord, Letter, free_reduce, invert_letters


@dataclass(frozen=True)
class TwistGen:
    """Potencia de un twist de Dehn sobre una curva del atlas"""
    name: str
    power: int = 1

    def inverse(self) -> "TwistGen":
        return TwistGen(self.name, -self.power)


@dataclass(frozen=True)
class GeneratorWord:
    """Palabra en twists; el factor de la izquierda se aplica al final"""
    letters: Tuple[TwistGen, ...] = ()

    @classmethod
    def of(cls, gens: Iterable[TwistGen]) -> "GeneratorWord":
        stack: List[TwistGen] = []
        for gen in gens:
            if gen.power == 0:
                continue
            if stack and stack[-1].name == gen.name:
                merged = stack[-1].power + gen.power
                stack.pop()
                if merged:
                    stack.append(TwistGen(gen.name, merged))
            else:
                stack.append(gen)
        return cls(tuple(stack))

    @classmethod
    def single(cls, name: str, power: int = 1) -> "GeneratorWord":
        return cls.of([TwistGen(name, power)])

    @classmethod
    def parse(cls, text: str) -> "GeneratorWord":
        """Lee `a1.~b.b2`; `-` o vacío es la palabra vacía"""
        text = text.strip()
        if not text or text == "-":
            return cls()
        gens: List[TwistGen] = []
        for token in text.split("."):
            token = token.strip()
            power = 1
            if token.startswith("~"):
                power, token = -1, token[1:]
            if not token:
                raise ParseError("empty twist letter", text=text)
            gens.append(TwistGen(token, power))
        return cls.of(gens)

    def format(self) -> str:
        if not self.letters:
            return "-"
        parts: List[str] = []
        for gen in self.letters:
            symbol = gen.name if gen.power > 0 else f"~{gen.name}"
            parts.extend([symbol] * abs(gen.power))
        return ".".join(parts)

    def inverse(self) -> "GeneratorWord":
        return GeneratorWord(tuple(gen.inverse() for gen in reversed(self.letters)))

    def __mul__(self, other: "GeneratorWord") -> "GeneratorWord":
        return GeneratorWord.of(self.letters + other.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[TwistGen]:
        return iter(self.letters)

    @property
    def is_empty(self) -> bool:
        return not self.letters

    def names(self) -> List[str]:
        return [gen.name for gen in self.letters]

    def map_names(self, fn: Callable[[str], Optional[str]]) -> "GeneratorWord":
        """Reetiqueta letra a letra; las imágenes None se eliminan"""
        gens: List[TwistGen] = []
        for gen in self.letters:
            image = fn(gen.name)
            if image is not None:
                gens.append(TwistGen(image, gen.power))
        return GeneratorWord.of(gens)

    def drop_last(self) -> "GeneratorWord":
        return GeneratorWord(self.letters[:-1])


class MappingClass:
    """Clase de mapeo como automorfismo del grupoide (imágenes e imágenes inversas)"""

    __slots__ = ("groupoid", "images", "inverse_images", "_hash")

    def __init__(
        self,
        groupoid: Groupoid,
        images: Dict[Letter, GroupoidWord],
        inverse_images: Dict[Letter, GroupoidWord],
        check: bool = False,
    ):
        self.groupoid = groupoid
        letters = groupoid.free_letters
        self.images: Tuple[GroupoidWord, ...] = tuple(images[letter] for letter in letters)
        self.inverse_images: Tuple[GroupoidWord, ...] = tuple(
            inverse_images[letter] for letter in letters
        )
        self._hash: Optional[int] = None
        if check:
            self.verify_inverse()

    @classmethod
    def identity(cls, groupoid: Groupoid) -> "MappingClass":
        words = {letter: groupoid.generator_word(letter) for letter in groupoid.free_letters}
        return cls(groupoid, words, dict(words))

    # -- acción --------------------------------------------------------------

    def _substitute(self, table: Tuple[GroupoidWord, ...], word: GroupoidWord) -> GroupoidWord:
        raw: List[Letter] = []
        for letter in word.letters:
            image = table[abs(letter) - 1].letters
            raw.extend(image if letter > 0 else invert_letters(image))
        return GroupoidWord(word.source, word.target, free_reduce(raw))

    def apply(self, word: GroupoidWord) -> GroupoidWord:
        return self._substitute(self.images, word)

    def apply_inverse(self, word: GroupoidWord) -> GroupoidWord:
        return self._substitute(self.inverse_images, word)

    def image(self, letter: Letter) -> GroupoidWord:
        word = self.images[abs(letter) - 1]
        return word if letter > 0 else self.groupoid.inverse(word)

    # -- grupo -----------------------------------------------------------------

    def _check_surface(self, other: "MappingClass") -> None:
        if other.groupoid.surface != self.groupoid.surface:
            raise SurfaceMismatch(
                "mapping classes live on different surfaces",
                left=str(self.groupoid.surface),
                right=str(other.groupoid.surface),
            )

    def compose(self, other: "MappingClass") -> "MappingClass":
        """self ∘ other: primero other"""
        self._check_surface(other)
        letters = self.groupoid.free_letters
        images = {letter: self.apply(other.images[letter - 1]) for letter in letters}
        inverse_images = {
            letter: other.apply_inverse(self.inverse_images[letter - 1]) for letter in letters
        }
        return MappingClass(self.groupoid, images, inverse_images)

    def __matmul__(self, other: "MappingClass") -> "MappingClass":
        return self.compose(other)

    def inverse(self) -> "MappingClass":
        letters = self.groupoid.free_letters
        return MappingClass(
            self.groupoid,
            {letter: self.inverse_images[letter - 1] for letter in letters},
            {letter: self.images[letter - 1] for letter in letters},
        )

    def power(self, exponent: int) -> "MappingClass":
        result = MappingClass.identity(self.groupoid)
        step = self if exponent >= 0 else self.inverse()
        for _ in range(abs(exponent)):
            result = result.compose(step)
        return result

    def conjugate_by(self, other: "MappingClass") -> "MappingClass":
        """other ∘ self ∘ other⁻¹"""
        return other.compose(self).compose(other.inverse())

    def equals(self, other: "MappingClass") -> bool:
        self._check_surface(other)
        return self.images == other.images

    @property
    def is_identity(self) -> bool:
        return all(
            word.letters == (letter,)
            for letter, word in zip(self.groupoid.free_letters, self.images)
        )

    def verify_inverse(self) -> None:
        """Comprueba que las imágenes inversas dan un inverso a ambos lados"""
        for letter in self.groupoid.free_letters:
            generator = self.groupoid.generator_word(letter)
            if self.apply(self.apply_inverse(generator)) != generator:
                raise InvariantViolation(
                    "automorphism",
                    "f ∘ f⁻¹ differs from identity",
                    generator=self.groupoid.name_of(letter),
                )
            if self.apply_inverse(self.apply(generator)) != generator:
                raise InvariantViolation(
                    "automorphism",
                    "f⁻¹ ∘ f differs from identity",
                    generator=self.groupoid.name_of(letter),
                )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MappingClass):
            return NotImplemented
        return (
            other.groupoid.surface == self.groupoid.surface
            and self.images == other.images
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.groupoid.surface, self.images))
        return self._hash

    def __repr__(self) -> str:
        parts = [
            f"{self.groupoid.name_of(letter)}->{self.groupoid.format_letters(word.letters)}"
            for letter, word in zip(self.groupoid.free_letters, self.images)
        ]
        return f"MappingClass({', '.join(parts)})"
