import random
import time
from enum import Enum
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from app.config import settings
from app.exceptions import (
    InvariantViolation,
    SurfaceMismatch,
    TorusRelationsError,
    UnknownCurve,
)
from app.models.atlas import CurveAtlas, CurveEntry, CurveFamily, family_of
from app.models.factorization import TwistFactor
from app.models.mapping_class import GeneratorWord, MappingClass, TwistGen
from app.models.words import (
    Curve,
    Groupoid,
    GroupoidWord,
    Letter,
    PathKind,
    invert_letters,
)
from app.schemas.report import CheckStatus, Report

logger = structlog.get_logger()


class PairRelation(str, Enum):
    """Relación entre los twists de dos curvas"""
    COMMUTE = "commute"
    BRAID = "braid"
    NONE = "none"


def expected_relation(first: str, second: str) -> Optional[PairRelation]:
    """Relación esperada entre dos curvas estándar según sus familias"""
    families = {family_of(first)[0], family_of(second)[0]}
    if CurveFamily.OTHER in families:
        return None
    if CurveFamily.BOUNDARY in families:
        return PairRelation.COMMUTE
    if families == {CurveFamily.MERIDIAN}:
        return PairRelation.COMMUTE
    if families == {CurveFamily.CENTRAL, CurveFamily.LONGITUDE}:
        return PairRelation.COMMUTE
    if CurveFamily.MERIDIAN in families:
        return PairRelation.BRAID
    return None


class HomologyOracle:
    """Abelianización del grupoide en la base ([A], [B], [e_1], ..., [e_{k-1}])"""

    def __init__(self, groupoid: Groupoid):
        self.groupoid = groupoid
        holes = groupoid.surface.holes
        self.rank = 2 * groupoid.surface.genus + holes - 1
        self.form = np.zeros((self.rank, self.rank), dtype=np.int64)
        self._letter_vectors: Dict[int, np.ndarray] = {}
        handle = 0
        for path in groupoid.paths:
            vector = np.zeros(self.rank, dtype=np.int64)
            if path.kind == PathKind.HANDLE_ALPHA:
                vector[handle] = 1
            elif path.kind == PathKind.HANDLE_BETA:
                vector[handle + 1] = 1
                self.form[handle, handle + 1] = 1
                self.form[handle + 1, handle] = -1
                handle += 2
            elif path.kind == PathKind.BOUNDARY:
                hole = int(path.name[1:])
                offset = 2 * groupoid.surface.genus
                if hole < holes:
                    vector[offset + hole - 1] = 1
                else:
                    vector[offset:] = -1
            self._letter_vectors[groupoid.letter(path.name)] = vector

    def basis_loops(self) -> List[GroupoidWord]:
        """Lazos en el punto base 1 que representan la base"""
        loops = [
            self.groupoid.generator_word(self.groupoid.letter(path.name))
            for path in self.groupoid.paths
            if path.kind in (PathKind.HANDLE_ALPHA, PathKind.HANDLE_BETA)
        ]
        for hole in range(1, self.groupoid.surface.holes):
            loops.append(self.groupoid.boundary_word(hole))
        return loops

    def class_of(self, letters: Sequence[Letter]) -> np.ndarray:
        total = np.zeros(self.rank, dtype=np.int64)
        for letter in letters:
            vector = self._letter_vectors[abs(letter)]
            total += vector if letter > 0 else -vector
        return total

    def pairing(self, x: np.ndarray, y: np.ndarray) -> int:
        return int(x @ self.form @ y)

    def matrix(self, mapping_class: MappingClass) -> np.ndarray:
        """Matriz en homología; columnas = imágenes de la base"""
        columns = [
            self.class_of(mapping_class.apply(loop).letters)
            for loop in self.basis_loops()
        ]
        return np.stack(columns, axis=1)

    def transvection(self, vector: np.ndarray) -> np.ndarray:
        """x ↦ x + ⟨x, c⟩ c"""
        return np.eye(self.rank, dtype=np.int64) + np.outer(vector, self.form @ vector)


class MappingClassService:
    """Servicio de clases de mapeo sobre un atlas de curvas"""

    def __init__(self, atlas: CurveAtlas):
        self.atlas = atlas
        self.groupoid = atlas.groupoid
        self.homology = HomologyOracle(self.groupoid)
        self._twists: Dict[Tuple[str, int], MappingClass] = {}
        self._realized: Dict[GeneratorWord, MappingClass] = {}
        self._curves: Dict[str, Curve] = {}
        self._factor_twists: Dict[TwistFactor, MappingClass] = {}
        self._factor_curves: Dict[TwistFactor, Curve] = {}
        self._pairs: Dict[Tuple[str, str], PairRelation] = {}
        self._targets: Dict[Tuple[int, ...], MappingClass] = {}
        self._identity = MappingClass.identity(self.groupoid)

    @property
    def identity(self) -> MappingClass:
        return self._identity

    # -- twists ------------------------------------------------------------

    def _twist_images(self, entry: CurveEntry, sign: int) -> Dict[Letter, GroupoidWord]:
        images: Dict[Letter, GroupoidWord] = {}
        word = entry.word
        for letter in self.groupoid.free_letters:
            raw: List[Letter] = []
            for token in entry.tokens_for(letter):
                loop = word[token.offset:] + word[:token.offset]
                if sign * token.sign < 0:
                    loop = invert_letters(loop)
                if token.conjugated:
                    loop = (letter,) + loop + (-letter,)
                raw.extend(loop)
            raw.append(letter)
            images[letter] = self.groupoid.reduce(raw)
        return images

    def _standard_twist(self, name: str) -> MappingClass:
        entry = self.atlas.entry(name)
        return MappingClass(
            self.groupoid,
            self._twist_images(entry, 1),
            self._twist_images(entry, -1),
            check=True,
        )

    def twist(self, name: str, power: int = 1) -> MappingClass:
        """Twist de Dehn a la derecha sobre una curva del atlas, a la potencia dada"""
        key = (name, power)
        if key in self._twists:
            return self._twists[key]
        self.atlas.require(name)
        if power == 0:
            result = self._identity
        elif power == 1:
            if self.atlas.is_derived(name):
                derived = self.atlas.derived_entry(name)
                conj = self.realize(derived.conj)
                result = self.twist(derived.base).conjugate_by(conj)
            else:
                result = self._standard_twist(name)
        elif power == -1:
            result = self.twist(name, 1).inverse()
        else:
            unit = self.twist(name, 1 if power > 0 else -1)
            result = unit.power(abs(power))
        self._twists[key] = result
        return result

    def realize(self, word: GeneratorWord) -> MappingClass:
        """Composición de los twists de la palabra (el de la izquierda al final)"""
        if word in self._realized:
            return self._realized[word]
        result = self._identity
        for gen in word.letters:
            result = result.compose(self.twist(gen.name, gen.power))
        self._realized[word] = result
        return result

    def twist_product(self, names: Sequence[str]) -> MappingClass:
        return self.realize(GeneratorWord.of(TwistGen(name) for name in names))

    def factor_twist(self, factor: TwistFactor) -> MappingClass:
        """Twist positivo a lo largo de apply(realize(conj), base)"""
        if factor not in self._factor_twists:
            base = self.twist(factor.base)
            if not factor.conj.is_empty:
                base = base.conjugate_by(self.realize(factor.conj))
            self._factor_twists[factor] = base
        return self._factor_twists[factor]

    def multi_twist(self, target: Tuple[int, ...]) -> MappingClass:
        """Producto de los twists de borde del objetivo"""
        if target not in self._targets:
            names = [f"d{index}" for index in target]
            self._targets[target] = self.twist_product(names)
        return self._targets[target]

    # -- curvas --------------------------------------------------------------

    def curve_of(self, name: str) -> Curve:
        if name not in self._curves:
            self.atlas.require(name)
            if self.atlas.is_derived(name):
                derived = self.atlas.derived_entry(name)
                conj = self.realize(derived.conj)
                curve = self.apply_to_curve(conj, self.curve_of(derived.base))
            else:
                curve = self.atlas.base_curve(name)
            self._curves[name] = curve
        return self._curves[name]

    def factor_curve(self, factor: TwistFactor) -> Curve:
        if factor not in self._factor_curves:
            curve = self.curve_of(factor.base)
            if not factor.conj.is_empty:
                curve = self.apply_to_curve(self.realize(factor.conj), curve)
            self._factor_curves[factor] = curve
        return self._factor_curves[factor]

    def apply_to_curve(self, mapping_class: MappingClass, curve: Curve) -> Curve:
        """Imagen canónica de una curva"""
        if mapping_class.groupoid.surface != self.groupoid.surface:
            raise SurfaceMismatch(
                "mapping class and curve live on different surfaces",
                left=str(mapping_class.groupoid.surface),
                right=str(self.groupoid.surface),
            )
        return self.groupoid.canonicalize(mapping_class.apply(curve.rep))

    def name_for_curve(self, curve: Curve) -> Optional[str]:
        """Nombre del atlas cuya curva coincide (los estándar primero)"""
        for name in self.atlas.names():
            if self.curve_of(name).key == curve.key:
                return name
        return None

    # -- homología -------------------------------------------------------------

    def homology_matrix(self, mapping_class: MappingClass) -> np.ndarray:
        return self.homology.matrix(mapping_class)

    def curve_class(self, name: str) -> np.ndarray:
        return self.homology.class_of(self.curve_of(name).key)

    def transvection(self, name: str) -> np.ndarray:
        return self.homology.transvection(self.curve_class(name))

    # -- relaciones entre pares ---------------------------------------------------

    def pair_relation(self, first: str, second: str) -> PairRelation:
        """Relación por curvas: conmutan si t_x(y) = y, trenza si t_x t_y(x) = y"""
        key = (first, second) if first <= second else (second, first)
        if key not in self._pairs:
            x, y = self.curve_of(first), self.curve_of(second)
            pair = self.twist_product([first, second])
            if self.apply_to_curve(self.twist(first), y).key == y.key:
                relation = PairRelation.COMMUTE
            elif self.apply_to_curve(pair, x).key == y.key:
                relation = PairRelation.BRAID
            else:
                relation = PairRelation.NONE
            self._pairs[key] = relation
        return self._pairs[key]

    def commute(self, first: str, second: str) -> bool:
        forward = self.twist_product([first, second])
        return forward.equals(self.twist_product([second, first]))

    def braid(self, first: str, second: str) -> bool:
        return self.twist_product([first, second, first]).equals(
            self.twist_product([second, first, second])
        )

    # -- validación del modelo ------------------------------------------------------

    def _check(
        self, report: Report, name: str, check: Callable[[], bool], witness: str
    ) -> None:
        try:
            report.record(
                name, bool(check()), detail="relation does not hold", witness=witness
            )
        except TorusRelationsError as e:
            logger.error("Model check raised", check=name, error=str(e))
            report.add(name, CheckStatus.FAIL, detail=str(e), witness=witness)

    def _free_abelian_vectors(self) -> List[Tuple[int, ...]]:
        holes = self.atlas.holes
        vectors = set()
        for i in range(holes):
            for value in (1, 2, -1, -2):
                vector = [0] * holes
                vector[i] = value
                vectors.add(tuple(vector))
        for i, j in combinations(range(holes), 2):
            for vi in (1, -1):
                for vj in (1, -1):
                    vector = [0] * holes
                    vector[i], vector[j] = vi, vj
                    vectors.add(tuple(vector))
        rng = random.Random(settings.random_seed)
        limit = settings.free_abelian_max_length
        for _ in range(settings.free_abelian_samples):
            vector = [0] * holes
            for _ in range(rng.randint(1, limit)):
                vector[rng.randrange(holes)] += rng.choice((1, -1))
            if any(vector):
                vectors.add(tuple(vector))
        return sorted(vectors)

    def _boundary_word(self, vector: Tuple[int, ...]) -> GeneratorWord:
        return GeneratorWord.of(
            TwistGen(f"d{index + 1}", power)
            for index, power in enumerate(vector)
            if power
        )

    def validate_model(self) -> Report:
        """Suite de validación del atlas; nunca aborta a mitad de camino"""
        start = time.perf_counter()
        logger.info(
            "Model validation started", atlas=self.atlas.name, holes=self.atlas.holes
        )
        report = Report(title=f"model {self.atlas.name} {self.groupoid.surface}")
        names = self.atlas.standard_names()

        for first, second in combinations(names, 2):
            relation = expected_relation(first, second)
            pair = f"{first},{second}"
            if relation == PairRelation.COMMUTE:
                self._check(
                    report,
                    f"commute:{pair}",
                    lambda: self.commute(first, second),
                    f"{first}.{second}.~{first}.~{second}",
                )
            elif relation == PairRelation.BRAID:
                self._check(
                    report,
                    f"braid:{pair}",
                    lambda: self.braid(first, second),
                    f"{first}.{second}.{first}.~{second}.~{first}.~{second}",
                )

        for vector in self._free_abelian_vectors():
            word = self._boundary_word(vector)
            self._check(
                report,
                f"free-abelian:{','.join(str(v) for v in vector)}",
                lambda: not self.realize(word).is_identity,
                word.format(),
            )
        report.notes.append(
            "free-abelian check on boundary twists is a bounded sample, not a proof"
        )

        for name in self.atlas.names():
            self._check(
                report,
                f"homology:{name}",
                lambda: np.array_equal(
                    self.homology_matrix(self.twist(name)), self.transvection(name)
                ),
                name,
            )

        if self.atlas.holes == 1 and {"a1", "b", "d1"} <= set(names):
            self._check(
                report,
                "chain:(a1.b)^6=d1",
                lambda: self.twist_product(["a1", "b"] * 6).equals(self.twist("d1")),
                "(a1.b)^6.~d1",
            )
        report.notes.append(
            "handedness is fixed by the cut-system orientation; "
            "the mirror convention is not tested"
        )

        logger.info(
            "Model validation completed",
            atlas=self.atlas.name,
            passed=report.passed,
            failed=report.failed,
            elapsed=round(time.perf_counter() - start, 3),
        )
        return report

    def check_atlas_homology(self) -> None:
        """Suma de signos de cruce de α y β igual al producto de intersección"""
        for entry in self.atlas.entries:
            curve_class = self.homology.class_of(entry.word)
            for path in self.groupoid.paths:
                if path.kind not in (PathKind.HANDLE_ALPHA, PathKind.HANDLE_BETA):
                    continue
                letter = self.groupoid.letter(path.name)
                total = sum(token.sign for token in entry.tokens_for(letter))
                letter_class = self.homology.class_of((letter,))
                expected = self.homology.pairing(letter_class, curve_class)
                if total != expected:
                    raise InvariantViolation(
                        "homology",
                        f"crossings of {path.name} with {entry.name} sum to {total}, "
                        f"expected {expected}",
                        curve=entry.name,
                    )

    def require_curve(self, name: str) -> None:
        if name not in self.atlas:
            raise UnknownCurve("curve not in atlas", curve=name, atlas=self.atlas.name)
