"""Modelo de cortes del toro con k agujeros.

El toro se corta a lo largo de un arco vertical V y uno horizontal H (ambos con
extremos en el borde 1) y de arcos ε_j del borde 1 al borde j. El resultado es un
polígono cuyo borde es un círculo que contiene los dos lados de cada arco. Una
curva estándar se describe por sus cruces ordenados con los arcos; cruces
consecutivos son cuerdas del polígono. Cada cuerda atravesada por un camino
generador inserta un lazo: la palabra de la curva leída a partir del cruce
siguiente, con el signo del lado desde el que se atraviesa.
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

from app.exceptions import InvariantViolation
from app.models.atlas import CrossingToken, CurveAtlas, CurveEntry
from app.models.words import Groupoid, Letter, SurfaceSig, invert_letters

# Lado de entrada y de salida de un cruce positivo
_POSITIVE_SIDES = {"V": ("W", "E"), "H": ("R", "L"), "eps": ("L", "R")}
_FORWARD_SIDES = ("E", "L")

# Parámetros de los caminos generadores sobre V y H
_BETA_PARAM = 0.5
_ALPHA_PARAM = 0.06


@dataclass(frozen=True)
class ArcCrossing:
    """Cruce de una curva con un arco de corte"""
    arc: str
    param: float
    sign: int

    @property
    def family(self) -> str:
        return "eps" if self.arc.startswith("eps") else self.arc


@dataclass(frozen=True)
class Chord:
    start: float
    end: float
    offset: int


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    conjugated: bool


def _v(param: float, sign: int = 1) -> ArcCrossing:
    return ArcCrossing("V", param, sign)


def _h(param: float, sign: int = 1) -> ArcCrossing:
    return ArcCrossing("H", param, sign)


def _eps(hole: int, param: float, sign: int = 1) -> ArcCrossing:
    return ArcCrossing(f"eps{hole}", param, sign)


class CutSystem:
    """Polígono de corte de Σ_1^k y construcción de los datos de cruce"""

    def __init__(self, holes: int):
        self.holes = holes
        self.surface = SurfaceSig(genus=1, holes=holes)
        self.groupoid = Groupoid(self.surface)
        self.sides: List[Tuple[str, str]] = [("V", "E"), ("H", "L"), ("V", "W"), ("H", "R")]
        for hole in range(holes, 1, -1):
            self.sides.extend([(f"eps{hole}", "L"), (f"eps{hole}", "R")])
        self.length = float(len(self.sides) + 1)

    # -- coordenadas sobre el círculo del borde del polígono ---------------------

    def coordinate(self, arc: str, side: str, param: float) -> float:
        index = self.sides.index((arc, side))
        offset = param if side in _FORWARD_SIDES else 1.0 - param
        return index + 1.0 + offset

    def basepoint(self, hole: int) -> float:
        if hole == 1:
            return 0.5
        return self.sides.index((f"eps{hole}", "L")) + 2.0

    def _ccw(self, start: float, end: float) -> float:
        return (end - start) % self.length

    def _inside(self, point: float, start: float, end: float) -> bool:
        """point en el intervalo abierto antihorario (start, end)"""
        distance = self._ccw(start, point)
        return 0.0 < distance < self._ccw(start, end)

    def _interleave(self, first: Tuple[float, float], second: Tuple[float, float]) -> bool:
        return self._inside(second[0], *first) != self._inside(second[1], *first)

    # -- letras duales y caminos -----------------------------------------------

    def dual_letters(self, crossing: ArcCrossing) -> Tuple[Letter, ...]:
        letter = self.groupoid.letter
        if crossing.arc == "V":
            letters: Tuple[Letter, ...] = (letter("beta"),)
        elif crossing.arc == "H":
            letters = (letter("alpha"),)
        else:
            hole = crossing.arc[3:]
            h, e = letter(f"h{hole}"), letter(f"e{hole}")
            letters = (h, e, -h)
        if crossing.sign > 0:
            return letters
        return invert_letters(letters)

    def segments(self, generator: str) -> List[Segment]:
        """Tramos del camino generador dentro del polígono"""
        p1 = self.basepoint(1)
        if generator == "beta":
            return [
                Segment(p1, self.coordinate("V", "W", _BETA_PARAM), False),
                Segment(self.coordinate("V", "E", _BETA_PARAM), p1, True),
            ]
        if generator == "alpha":
            return [
                Segment(p1, self.coordinate("H", "R", _ALPHA_PARAM), False),
                Segment(self.coordinate("H", "L", _ALPHA_PARAM), p1, True),
            ]
        if generator.startswith("h"):
            return [Segment(p1, self.basepoint(int(generator[1:])), False)]
        return []

    def _endpoints(self, crossing: ArcCrossing) -> Tuple[float, float]:
        """Punto de llegada y punto de salida del cruce"""
        arc_from, arc_to = _POSITIVE_SIDES[crossing.family]
        if crossing.sign < 0:
            arc_from, arc_to = arc_to, arc_from
        return (
            self.coordinate(crossing.arc, arc_from, crossing.param),
            self.coordinate(crossing.arc, arc_to, crossing.param),
        )

    # -- curvas ------------------------------------------------------------------

    def curve_entry(self, name: str, crossings: List[ArcCrossing]) -> CurveEntry:
        """Palabra y datos de cruce de una curva dada por sus cruces con los arcos"""
        letters: List[Letter] = []
        offsets: List[int] = []
        for crossing in crossings:
            offsets.append(len(letters))
            letters.extend(self.dual_letters(crossing))

        points = [self._endpoints(crossing) for crossing in crossings]
        count = len(crossings)
        chords = [
            Chord(points[m][1], points[(m + 1) % count][0], offsets[(m + 1) % count])
            for m in range(count)
        ]
        for i in range(count):
            for j in range(i + 1, count):
                first = (chords[i].start, chords[i].end)
                if self._interleave(first, (chords[j].start, chords[j].end)):
                    raise InvariantViolation(
                        "simple curve", f"chords {i} and {j} of {name} interleave"
                    )

        rows: List[Tuple[Letter, Tuple[CrossingToken, ...]]] = []
        for path in self.groupoid.paths:
            tokens: List[CrossingToken] = []
            for segment in self.segments(path.name):
                tokens.extend(self._segment_tokens(segment, chords))
            if tokens:
                rows.append((self.groupoid.letter(path.name), tuple(tokens)))
        return CurveEntry(name=name, word=tuple(letters), crossings=tuple(rows))

    def _segment_tokens(self, segment: Segment, chords: List[Chord]) -> List[CrossingToken]:
        hits: List[Tuple[float, CrossingToken]] = []
        span = (segment.start, segment.end)
        for chord in chords:
            if not self._interleave(span, (chord.start, chord.end)):
                continue
            near = chord.start if self._inside(chord.start, *span) else chord.end
            sign = 1 if self._inside(segment.start, chord.start, chord.end) else -1
            token = CrossingToken(sign, chord.offset, segment.conjugated)
            hits.append((self._ccw(segment.start, near), token))
        hits.sort(key=lambda hit: hit[0])
        return [token for _, token in hits]

    # -- curvas estándar -----------------------------------------------------------

    def _meridian_param(self, index: int) -> float:
        k = self.holes
        if index == 1:
            return 0.1 + 0.8 * (1.0 - 1.0 / (2 * k))
        return 0.1 + 0.8 * (2 * index - 3) / (2 * k)

    def standard_crossings(self) -> Dict[str, List[ArcCrossing]]:
        """Cruces de a_i, b, b_i y δ_i con los arcos de corte"""
        k = self.holes
        curves: Dict[str, List[ArcCrossing]] = {}
        for i in range(1, k + 1):
            crossings = [
                _eps(j, 0.1 + 0.8 * (i - 1) / j, -1) for j in range(max(i, 2), k + 1)
            ] if i >= 2 else []
            crossings.append(_h(self._meridian_param(i)))
            curves[f"a{i}"] = crossings
        curves["b"] = [_v(0.25)]
        if k >= 2:
            curves["b1"] = [_h(0.97), _v(0.95), _h(0.03, -1)] + [
                _eps(j, 0.03) for j in range(k, 1, -1)
            ]
            for j in range(2, k + 1):
                curves[f"b{j}"] = [_v(0.24), _eps(j, 0.97, -1)]
        curves["d1"] = [_eps(j, 0.01, -1) for j in range(2, k + 1)] + [
            _h(0.01),
            _v(0.98, -1),
            _h(0.99, -1),
            _v(0.02),
        ]
        for j in range(2, k + 1):
            curves[f"d{j}"] = [_eps(j, 0.99)]
        return curves

    def build_atlas(self) -> CurveAtlas:
        entries = [
            self.curve_entry(name, crossings)
            for name, crossings in self.standard_crossings().items()
        ]
        return CurveAtlas(self.surface, entries)
