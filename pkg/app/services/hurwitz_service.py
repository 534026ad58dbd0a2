import time
from collections import deque
from typing import Callable, Deque, List, Optional, Tuple

import structlog

from app.config import settings
from app.exceptions import (
    BudgetExhausted,
    IndexOutOfRange,
    InvalidDictionary,
    InvariantViolation,
    StepFailure,
    SurfaceMismatch,
    TorusRelationsError,
)
from app.models.atlas import STANDARD_ATLAS
from app.models.factorization import (
    Factorization,
    MoveScript,
    MoveStep,
    RelabelMap,
    StepKind,
    TwistFactor,
)
from app.models.mapping_class import GeneratorWord, MappingClass
from app.models.words import Letter
from app.services.atlas_service import AtlasService
from app.services.mcg_service import MappingClassService
from app.services.symmetry_service import SymmetryService

logger = structlog.get_logger()

StepObserver = Callable[[int, MoveStep, Factorization], None]
StateKey = Tuple[Tuple[Letter, ...], ...]


class HurwitzService:
    """Servicio de factorizaciones: producto, movimientos de Hurwitz, guiones y búsqueda"""

    def __init__(
        self,
        atlas_service: AtlasService,
        symmetry_service: Optional[SymmetryService] = None,
    ):
        self.atlas_service = atlas_service
        self.symmetry_service = symmetry_service or SymmetryService(atlas_service)

    def mcg(self, factorization: Factorization) -> MappingClassService:
        return self.atlas_service.mapping_classes(
            factorization.atlas, factorization.surface.holes
        )

    # -- producto y relación ----------------------------------------------------

    def product(self, factorization: Factorization) -> MappingClass:
        """Composición en orden funcional: el factor de la derecha se aplica primero"""
        mcg = self.mcg(factorization)
        result = mcg.identity
        for factor in factorization.factors:
            result = result.compose(mcg.factor_twist(factor))
        return result

    def target_twist(self, factorization: Factorization) -> MappingClass:
        return self.mcg(factorization).multi_twist(factorization.target)

    def is_relation(self, factorization: Factorization) -> bool:
        try:
            return self.product(factorization).equals(self.target_twist(factorization))
        except TorusRelationsError as e:
            logger.warning("Relation check failed", error=str(e))
            return False

    def factor_word(self, factor: TwistFactor) -> GeneratorWord:
        """Palabra en twists que realiza el factor: conj · base · conj⁻¹"""
        return factor.conj * GeneratorWord.single(factor.base) * factor.conj.inverse()

    # -- normalización de factores -------------------------------------------------

    def normalize_factor(self, mcg: MappingClassService, factor: TwistFactor) -> TwistFactor:
        """Poda el conjugador por la derecha y renombra si la curva está en el atlas"""
        conj = factor.conj
        base_curve = mcg.curve_of(factor.base)
        while not conj.is_empty:
            last = conj.letters[-1]
            image = mcg.apply_to_curve(mcg.twist(last.name, last.power), base_curve)
            if image.key != base_curve.key:
                break
            conj = conj.drop_last()
        if conj.is_empty:
            return TwistFactor(factor.base)
        name = mcg.name_for_curve(mcg.factor_curve(TwistFactor(factor.base, conj)))
        if name is not None:
            return TwistFactor(name)
        return TwistFactor(factor.base, conj)

    def simplify(self, factorization: Factorization) -> Factorization:
        mcg = self.mcg(factorization)
        return factorization.with_factors(
            tuple(self.normalize_factor(mcg, factor) for factor in factorization.factors)
        )

    # -- movimientos ------------------------------------------------------------------

    def hurwitz_move(
        self, factorization: Factorization, position: int, direction: StepKind
    ) -> Factorization:
        """Movimiento sobre el par (i, i+1), posiciones desde 1"""
        if not 1 <= position < len(factorization):
            raise IndexOutOfRange(
                "hurwitz move position out of range",
                position=position,
                length=len(factorization),
            )
        mcg = self.mcg(factorization)
        factors = list(factorization.factors)
        x, y = factors[position - 1], factors[position]
        if direction == StepKind.LEFT:
            moved = TwistFactor(y.base, self.factor_word(x) * y.conj)
            pair = [self.normalize_factor(mcg, moved), x]
        elif direction == StepKind.RIGHT:
            moved = TwistFactor(x.base, self.factor_word(y).inverse() * x.conj)
            pair = [y, self.normalize_factor(mcg, moved)]
        else:
            raise InvariantViolation("move direction", f"{direction} is not L or R")
        factors[position - 1:position + 1] = pair
        return factorization.with_factors(tuple(factors))

    def global_conjugate(self, factorization: Factorization, word: GeneratorWord) -> Factorization:
        """Conjuga todos los factores por la misma palabra"""
        if word.is_empty:
            return factorization
        mcg = self.mcg(factorization)
        for name in word.names():
            mcg.require_curve(name)
        return factorization.with_factors(
            tuple(
                self.normalize_factor(mcg, TwistFactor(factor.base, word * factor.conj))
                for factor in factorization.factors
            )
        )

    def cyclic_rotate(self, factorization: Factorization, shift: int) -> Factorization:
        """Mueve los primeros `shift` factores al final"""
        if not factorization.is_full_target:
            raise InvariantViolation(
                "central target", "cyclic rotation needs the full boundary multi-twist"
            )
        if not factorization.factors:
            return factorization
        shift %= len(factorization)
        factors = factorization.factors
        return factorization.with_factors(factors[shift:] + factors[:shift])

    def _map_factors(
        self, factorization: Factorization, relabel: RelabelMap
    ) -> List[TwistFactor]:
        if factorization.atlas != STANDARD_ATLAS:
            raise InvalidDictionary(
                "dictionaries act on the standard atlas only",
                dictionary=relabel.name,
                atlas=factorization.atlas,
            )
        factors: List[TwistFactor] = []
        for factor in factorization.factors:
            image = relabel.image(factor.base)
            if image is None:
                continue
            factors.append(TwistFactor(image, factor.conj.map_names(relabel.image)))
        return factors

    def relabel(self, factorization: Factorization, relabel: RelabelMap) -> Factorization:
        """Aplica un diccionario de simetría a todos los factores"""
        if relabel.source != factorization.surface or relabel.target != factorization.surface:
            raise SurfaceMismatch(
                "dictionary does not act on this surface",
                dictionary=relabel.name,
                surface=str(factorization.surface),
            )
        self.symmetry_service.require_valid(relabel)
        mapped = factorization.with_factors(tuple(self._map_factors(factorization, relabel)))
        return self.simplify(mapped)

    def cap(self, factorization: Factorization, hole: int, relabel: RelabelMap) -> Factorization:
        """Tapa el borde j con un disco y reetiqueta con el diccionario dado"""
        if hole not in factorization.target:
            raise IndexOutOfRange(
                "capped boundary is not in the target", hole=hole, target=factorization.target
            )
        if relabel.source != factorization.surface or relabel.image(f"d{hole}") is not None:
            raise InvalidDictionary(
                "dictionary does not cap this boundary", dictionary=relabel.name, hole=hole
            )
        self.symmetry_service.require_valid(relabel)
        factors = self._map_factors(factorization, relabel)
        capped = Factorization(
            relabel.target,
            tuple(factors),
            tuple(range(1, relabel.target.holes + 1)),
            STANDARD_ATLAS,
        )
        logger.debug(
            "Boundary capped",
            hole=hole,
            dictionary=relabel.name,
            before=len(factorization),
            after=len(capped),
        )
        return self.simplify(capped)

    # -- guiones ----------------------------------------------------------------------

    def apply_step(self, factorization: Factorization, step: MoveStep) -> Factorization:
        if step.kind in (StepKind.LEFT, StepKind.RIGHT):
            return self.hurwitz_move(factorization, step.index or 0, step.kind)
        if step.kind == StepKind.ROT:
            return self.cyclic_rotate(factorization, step.index or 0)
        if step.kind == StepKind.CONJ:
            return self.global_conjugate(factorization, step.word or GeneratorWord())
        if step.kind == StepKind.RELABEL:
            return self.relabel(factorization, self.symmetry_service.get(step.symmetry or ""))
        relabel = self.symmetry_service.get(step.symmetry or "")
        return self.cap(factorization, step.index or 0, relabel)

    def replay(
        self,
        factorization: Factorization,
        script: MoveScript,
        check_every_step: Optional[bool] = None,
        observer: Optional[StepObserver] = None,
    ) -> Factorization:
        """Reproduce un guion comprobando la relación tras cada paso"""
        check = settings.check_every_step if check_every_step is None else check_every_step
        start = time.perf_counter()
        logger.info("Script replay started", script=script.name, steps=len(script))
        if check and not self.is_relation(factorization):
            raise StepFailure(0, "input is not a relation", script=script.name)
        current = factorization
        for index, step in enumerate(script.steps, start=1):
            try:
                current = self.apply_step(current, step)
            except StepFailure:
                raise
            except TorusRelationsError as e:
                logger.error(
                    "Script step failed", script=script.name, step=index, error=str(e)
                )
                raise StepFailure(index, str(e), step=step.format(), script=script.name)
            if check and not self.is_relation(current):
                logger.error("Product deviates after step", script=script.name, step=index)
                raise StepFailure(
                    index,
                    "product deviates from the target multi-twist",
                    step=step.format(),
                    script=script.name,
                )
            if observer is not None:
                observer(index, step, current)
        logger.info(
            "Script replayed",
            script=script.name,
            steps=len(script),
            kinds=sorted(kind.value for kind in script.kinds_used()),
            elapsed=round(time.perf_counter() - start, 3),
        )
        return current

    # -- igualdad y búsqueda ----------------------------------------------------------

    def factor_keys(self, factorization: Factorization) -> StateKey:
        mcg = self.mcg(factorization)
        return tuple(mcg.factor_curve(factor).key for factor in factorization.factors)

    def factorwise_equal(self, first: Factorization, second: Factorization) -> bool:
        """Misma superficie, mismo largo y factores con curvas iguales"""
        if first.surface != second.surface or len(first) != len(second):
            return False
        if first.target != second.target:
            return False
        return self.factor_keys(first) == self.factor_keys(second)

    @staticmethod
    def _canonical_key(keys: StateKey) -> StateKey:
        if not keys:
            return keys
        return min(keys[shift:] + keys[:shift] for shift in range(len(keys)))

    @staticmethod
    def _rotation_to(keys: StateKey, goal: StateKey) -> Optional[int]:
        for shift in range(len(keys)):
            if keys[shift:] + keys[:shift] == goal:
                return shift
        return None

    def search_equivalence(
        self,
        first: Factorization,
        second: Factorization,
        budget: Optional[int] = None,
    ) -> MoveScript:
        """BFS acotada sobre movimientos L/R con rotación cíclica implícita"""
        budget = settings.search_budget if budget is None else budget
        if first.surface != second.surface:
            raise SurfaceMismatch(
                "factorizations live on different surfaces",
                left=str(first.surface),
                right=str(second.surface),
            )
        if len(first) != len(second) or first.target != second.target:
            raise InvariantViolation(
                "search input", "factorizations differ in length or target"
            )
        start = time.perf_counter()
        logger.info("Equivalence search started", length=len(first), budget=budget)
        rotate = first.is_full_target
        goal = self.factor_keys(second)

        def finish(path: List[MoveStep], keys: StateKey) -> Optional[MoveScript]:
            shift = self._rotation_to(keys, goal) if rotate else (0 if keys == goal else None)
            if shift is None:
                return None
            steps = list(path)
            if shift:
                steps.append(MoveStep(StepKind.ROT, index=shift))
            logger.info(
                "Equivalence found",
                steps=len(steps),
                elapsed=round(time.perf_counter() - start, 3),
            )
            return MoveScript(tuple(steps), "search")

        keys = self.factor_keys(first)
        found = finish([], keys)
        if found is not None:
            return found

        visited = {self._canonical_key(keys) if rotate else keys}
        queue: Deque[Tuple[Factorization, List[MoveStep]]] = deque([(first, [])])
        explored = 0
        while queue:
            if explored >= budget:
                break
            state, path = queue.popleft()
            explored += 1
            for position in range(1, len(state)):
                for direction in (StepKind.LEFT, StepKind.RIGHT):
                    child = self.hurwitz_move(state, position, direction)
                    child_path = path + [MoveStep(direction, index=position)]
                    child_keys = self.factor_keys(child)
                    found = finish(child_path, child_keys)
                    if found is not None:
                        return found
                    canonical = self._canonical_key(child_keys) if rotate else child_keys
                    if canonical not in visited:
                        visited.add(canonical)
                        queue.append((child, child_path))

        logger.warning("Equivalence search exhausted", explored=explored, budget=budget)
        raise BudgetExhausted(explored, budget)
