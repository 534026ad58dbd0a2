from itertools import combinations
from typing import Dict, List, Optional, Tuple

import structlog

from app.exceptions import InvalidDictionary, TorusRelationsError, UnknownSymmetry
from app.models.atlas import STANDARD_ATLAS, CurveFamily, family_of
from app.models.factorization import RelabelMap
from app.models.words import SurfaceSig
from app.schemas.report import CheckStatus, Report
from app.services.atlas_service import AtlasService
from app.services.mcg_service import expected_relation

logger = structlog.get_logger()


def _cyclic(index: int, modulus: int) -> int:
    """Índice en 1..modulus"""
    return (index - 1) % modulus + 1


class SymmetryService:
    """Diccionarios de reetiquetado: identidad, rotaciones y tapados"""

    def __init__(self, atlas_service: AtlasService):
        self.atlas_service = atlas_service
        self._maps: Dict[str, RelabelMap] = {}
        self._validated: Dict[str, Report] = {}

    def get(self, name: str) -> RelabelMap:
        """Diccionario por nombre: `identity:k`, `rot:k:s` o `cap:k:j`"""
        if name not in self._maps:
            self._maps[name] = self._build(name)
        return self._maps[name]

    def _build(self, name: str) -> RelabelMap:
        parts = name.split(":")
        try:
            numbers = [int(part) for part in parts[1:]]
        except ValueError:
            raise UnknownSymmetry("unknown symmetry", symmetry=name)
        if parts[0] == "identity" and len(numbers) == 1:
            return self.identity(numbers[0])
        if parts[0] == "rot" and len(numbers) == 2:
            return self.rotation(*numbers)
        if parts[0] == "cap" and len(numbers) == 2:
            return self.cap_map(*numbers)
        raise UnknownSymmetry("unknown symmetry", symmetry=name)

    def _names(self, holes: int) -> List[str]:
        if holes < 1:
            raise UnknownSymmetry("surface must have at least one hole", holes=holes)
        return self.atlas_service.standard_atlas(holes).standard_names()

    def identity(self, holes: int) -> RelabelMap:
        surface = SurfaceSig(1, holes)
        mapping = tuple((name, name) for name in self._names(holes))
        return RelabelMap(f"identity:{holes}", surface, surface, mapping)

    def rotation(self, holes: int, shift: int) -> RelabelMap:
        """Traslación del toro que lleva el agujero i al i+s"""
        mapping: List[Tuple[str, Optional[str]]] = []
        for name in self._names(holes):
            family, index = family_of(name)
            if family == CurveFamily.CENTRAL:
                mapping.append((name, name))
            else:
                mapping.append((name, f"{family.value[0]}{_cyclic(index + shift, holes)}"))
        surface = SurfaceSig(1, holes)
        return RelabelMap(f"rot:{holes}:{shift}", surface, surface, tuple(mapping))

    def cap_map(self, holes: int, hole: int) -> RelabelMap:
        """Diccionario posterior al tapado del borde j de Σ_1^k"""
        if holes < 2 or not 1 <= hole <= holes:
            raise UnknownSymmetry("invalid cap dictionary", holes=holes, hole=hole)
        remaining = holes - 1

        def phi(index: int) -> int:
            return index if index < hole else index - 1

        def psi(index: int) -> int:
            return _cyclic(index if index <= hole else index - 1, remaining)

        mapping: List[Tuple[str, Optional[str]]] = []
        for name in self._names(holes):
            family, index = family_of(name)
            if family == CurveFamily.CENTRAL:
                image: Optional[str] = "b"
            elif family == CurveFamily.MERIDIAN:
                image = f"a{psi(index)}"
            elif family == CurveFamily.BOUNDARY:
                image = None if index == hole else f"d{phi(index)}"
            elif index == hole or remaining == 1:
                image = "b"
            else:
                image = f"b{phi(index)}"
            mapping.append((name, image))
        return RelabelMap(
            f"cap:{holes}:{hole}",
            SurfaceSig(1, holes),
            SurfaceSig(1, remaining),
            tuple(mapping),
        )

    # -- validación ------------------------------------------------------------

    def validate(self, relabel: RelabelMap) -> Report:
        """Los pares que conmutan o trenzan deben seguir haciéndolo"""
        if relabel.name in self._validated:
            return self._validated[relabel.name]
        report = Report(title=f"dictionary {relabel.name}")
        source = self.atlas_service.mapping_classes(STANDARD_ATLAS, relabel.source.holes)
        target = self.atlas_service.mapping_classes(STANDARD_ATLAS, relabel.target.holes)
        table = relabel.as_dict
        for name, image in table.items():
            if image is not None and image not in target.atlas:
                report.add(
                    f"image:{name}", CheckStatus.FAIL, detail=f"{image} not in target atlas"
                )
        for first, second in combinations(table, 2):
            expected = expected_relation(first, second)
            image_first, image_second = table[first], table[second]
            if expected is None or image_first is None or image_second is None:
                continue
            if image_first not in target.atlas or image_second not in target.atlas:
                continue
            check = f"pair:{first},{second}"
            try:
                relation = source.pair_relation(first, second)
                if image_first == image_second:
                    report.record(check, True)
                    continue
                image_relation = target.pair_relation(image_first, image_second)
                report.record(
                    check,
                    relation == image_relation,
                    detail=f"{relation.value} maps to {image_relation.value}",
                    witness=f"{image_first},{image_second}",
                )
            except TorusRelationsError as e:
                logger.error("Dictionary check raised", check=check, error=str(e))
                report.add(check, CheckStatus.FAIL, detail=str(e))
        self._validated[relabel.name] = report
        logger.debug(
            "Dictionary validated",
            dictionary=relabel.name,
            passed=report.passed,
            failed=report.failed,
        )
        return report

    def require_valid(self, relabel: RelabelMap) -> None:
        report = self.validate(relabel)
        if not report.ok:
            first = report.failures()[0]
            raise InvalidDictionary(
                "dictionary does not preserve pair relations",
                dictionary=relabel.name,
                check=first.name,
                detail=first.detail,
            )
