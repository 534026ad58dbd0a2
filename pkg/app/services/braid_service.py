from typing import Dict, List, Optional, Tuple

import networkx as nx
import structlog
from sympy.combinatorics import Permutation

from app.exceptions import InvalidArc, NotTransposition, StrandMismatch
from app.models.braid import ArcRef, BraidWord, MonodromyRep
from app.models.words import free_reduce, invert_letters
from app.schemas.braid import CoverInvariants

logger = structlog.get_logger()

# Automorfismo del grupo libre F_d: imagen de cada x_i como palabra con signo
FreeImages = Tuple[Tuple[int, ...], ...]

# Modelo local de un 2-punto: pinchazos 1, 1′, 2, 2′ en posiciones 1..4
TWO_POINT_CLUSTERS = ({1, 2}, {3, 4})
TWO_POINT_BETA_INDEX = 2
TWO_POINT_TEMPLATE = ArcRef(BraidWord(4), TWO_POINT_BETA_INDEX)


def _substitute(images: FreeImages, word: Tuple[int, ...]) -> Tuple[int, ...]:
    raw: List[int] = []
    for letter in word:
        image = images[abs(letter) - 1]
        raw.extend(image if letter > 0 else invert_letters(image))
    return free_reduce(raw)


class BraidService:
    """Cálculo de trenzas de Artin, reglas de regeneración y cubrimientos ramificados"""

    def __init__(self) -> None:
        self._generators: Dict[Tuple[int, int], FreeImages] = {}

    # -- acción de Artin ---------------------------------------------------------

    def _identity(self, strands: int) -> FreeImages:
        return tuple((i,) for i in range(1, strands + 1))

    def _generator_action(self, strands: int, letter: int) -> FreeImages:
        key = (strands, letter)
        if key not in self._generators:
            images = [list(image) for image in self._identity(strands)]
            i = abs(letter)
            if letter > 0:
                images[i - 1] = [i, i + 1, -i]
                images[i] = [i]
            else:
                images[i - 1] = [i + 1]
                images[i] = [-(i + 1), i, i + 1]
            self._generators[key] = tuple(tuple(image) for image in images)
        return self._generators[key]

    def artin_action(self, braid: BraidWord) -> FreeImages:
        """Acción sobre F_d; action(w1 w2) = action(w1) ∘ action(w2)"""
        images = self._identity(braid.strands)
        for letter in reversed(braid.letters):
            generator = self._generator_action(braid.strands, letter)
            images = tuple(_substitute(generator, image) for image in images)
        return images

    def braid_equals(self, first: BraidWord, second: BraidWord) -> bool:
        if first.strands != second.strands:
            raise StrandMismatch(
                "braids have different strand counts",
                left=first.strands,
                right=second.strands,
            )
        return self.artin_action(first) == self.artin_action(second)

    def permutation(self, braid: BraidWord) -> Permutation:
        """Permutación de los pinchazos inducida por la trenza (índices desde 0)"""
        result = Permutation(braid.strands - 1)
        for letter in braid.letters:
            i = abs(letter)
            result = Permutation([[i - 1, i]], size=braid.strands) * result
        return result

    # -- arcos --------------------------------------------------------------------

    def half_twist(self, arc: ArcRef) -> BraidWord:
        """carrier ∘ σ_i ∘ carrier⁻¹"""
        twist = BraidWord(arc.strands, (arc.index,))
        return arc.carrier * twist * arc.carrier.inverse()

    def arc_equals(self, first: ArcRef, second: ArcRef) -> bool:
        return self.braid_equals(self.half_twist(first), self.half_twist(second))

    def endpoints(self, arc: ArcRef) -> Tuple[int, int]:
        """Pinchazos (desde 1) que une el arco"""
        permutation = self.permutation(arc.carrier)
        ends = sorted((permutation(arc.index - 1) + 1, permutation(arc.index) + 1))
        return ends[0], ends[1]

    def inverse_half_twists(self, arcs: List[ArcRef], beta: ArcRef) -> ArcRef:
        """τ_{γ_1}^{-1} ··· τ_{γ_n}^{-1}(β)"""
        carrier = BraidWord(beta.strands)
        for arc in arcs:
            if arc.strands != beta.strands:
                raise StrandMismatch(
                    "arcs live on different punctured disks",
                    left=arc.strands,
                    right=beta.strands,
                )
            carrier = carrier * self.half_twist(arc).inverse()
        return beta.moved_by(carrier)

    # -- reglas de regeneración ---------------------------------------------------

    def regenerate_six_point(
        self,
        beta: ArcRef,
        gammas: Tuple[ArcRef, ArcRef, ArcRef, ArcRef],
        first: ArcRef,
        last: ArcRef,
    ) -> Tuple[ArcRef, ...]:
        """Seis arcos alrededor de un 6-punto de tipo M; β_1 y β_6 vienen como datos"""
        for arc in (first, last):
            if arc.strands != beta.strands:
                raise StrandMismatch(
                    "arcs live on different punctured disks",
                    left=arc.strands,
                    right=beta.strands,
                )
        gamma1, gamma2, gamma3, gamma4 = gammas
        beta3 = self.inverse_half_twists([gamma3, gamma4], beta)
        beta4 = self.inverse_half_twists([gamma1, gamma2], beta)
        beta5 = self.inverse_half_twists([gamma1, gamma2, gamma3, gamma4], beta)
        return (first, beta, beta3, beta4, beta5, last)

    def regenerate_two_point(
        self, beta: ArcRef, template: Optional[ArcRef] = None
    ) -> ArcRef:
        """Un punto de ramificación alrededor de un 2-punto"""
        template = template or TWO_POINT_TEMPLATE
        if beta.strands < 4 or template.strands != 4:
            raise InvalidArc(
                "two-point model needs four punctures",
                strands=beta.strands,
                template=template.strands,
            )
        if beta.index != TWO_POINT_BETA_INDEX:
            raise InvalidArc(
                "beta must be the standard two-point arc moved by a braid",
                index=beta.index,
                expected=TWO_POINT_BETA_INDEX,
            )
        self._check_clusters(self.endpoints(beta))
        self._check_clusters(self.endpoints(template))
        # g·β ↦ g·β′ con β′ la plantilla en el modelo local
        carrier = BraidWord(beta.strands, beta.carrier.letters + template.carrier.letters)
        result = ArcRef(carrier, template.index)
        self._check_clusters(self.endpoints(result))
        return result

    def _check_clusters(self, ends: Tuple[int, int]) -> None:
        left, right = TWO_POINT_CLUSTERS
        first, second = ends
        if not ((first in left and second in right) or (second in left and first in right)):
            raise InvalidArc(
                "arc does not join one puncture of each doubled pair", endpoints=ends
            )

    # -- cubrimientos -------------------------------------------------------------

    def cover_invariants(self, rep: MonodromyRep) -> CoverInvariants:
        """Conexión, característica de Euler y género por Riemann–Hurwitz"""
        graph = nx.Graph()
        graph.add_nodes_from(range(1, rep.degree + 1))
        total = Permutation(rep.degree - 1)
        for position, (i, j) in enumerate(rep.transpositions, start=1):
            if i == j or not (1 <= i <= rep.degree and 1 <= j <= rep.degree):
                raise NotTransposition(
                    "entry is not a transposition", position=position, entry=(i, j)
                )
            graph.add_edge(i, j)
            total = total * Permutation([[i - 1, j - 1]], size=rep.degree)
        euler = 2 * rep.degree - len(rep)
        invariants = CoverInvariants(
            degree=rep.degree,
            branch_points=len(rep),
            connected=nx.is_connected(graph),
            euler_characteristic=euler,
            genus=(2 - euler) // 2,
            boundary_count=total.cycles,
            total_is_identity=total.is_Identity,
        )
        logger.debug("Cover invariants computed", **invariants.model_dump())
        return invariants
