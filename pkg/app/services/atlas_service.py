from pathlib import Path
from typing import Dict, Optional, Set, Tuple

import structlog

from app.config import settings
from app.exceptions import (
    CompositionMismatch,
    InvariantViolation,
    ParseError,
    SurfaceMismatch,
    UnknownName,
)
from app.models.atlas import STANDARD_ATLAS, CurveAtlas
from app.models.cut_system import CutSystem
from app.services.mcg_service import MappingClassService
from app.utils.file_formats import AtlasDocument, format_atlas, parse_atlas

logger = structlog.get_logger()


class AtlasService:
    """Servicio para cargar, guardar y validar atlas de curvas"""

    def __init__(self, data_dir: Optional[Path] = None):
        self.data_dir = Path(data_dir) if data_dir else settings.data_dir
        self._standard: Dict[int, CurveAtlas] = {}
        self._named: Dict[Tuple[str, int], CurveAtlas] = {}
        self._mapping_classes: Dict[Tuple[str, int], MappingClassService] = {}

    # -- atlas estándar ---------------------------------------------------------

    def standard_atlas(self, holes: int) -> CurveAtlas:
        """Atlas estándar de Σ_1^k calculado con el sistema de cortes"""
        if holes not in self._standard:
            atlas = CutSystem(holes).build_atlas()
            self.validate_atlas(atlas)
            self._standard[holes] = atlas
            logger.debug("Standard atlas built", holes=holes, curves=len(atlas.entries))
        return self._standard[holes]

    # -- lectura y escritura ---------------------------------------------------------

    def load_atlas(self, text: str, name: Optional[str] = None) -> CurveAtlas:
        """Leer un atlas y verificar todos sus invariantes"""
        document = parse_atlas(text, name)
        atlas = self._resolve(document)
        self.validate_atlas(atlas)
        logger.info(
            "Atlas loaded",
            atlas=atlas.name,
            holes=atlas.holes,
            curves=len(atlas.entries),
            derived=len(atlas.derived),
        )
        return atlas

    def load_atlas_file(self, path: Path) -> CurveAtlas:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            logger.error("Error reading atlas file", path=str(path), error=str(e))
            raise ParseError(f"cannot read atlas file: {e}", path=str(path))
        return self.load_atlas(text, Path(path).stem)

    def save_atlas(self, atlas: CurveAtlas, include_standard: bool = True) -> str:
        return format_atlas(atlas, include_standard=include_standard)

    def _resolve(self, document: AtlasDocument) -> CurveAtlas:
        if document.surface.genus != 1 and document.extends_standard:
            raise InvariantViolation(
                "standard atlas", "only genus 1 has a standard atlas", atlas=document.name
            )
        if not document.extends_standard:
            return CurveAtlas(
                document.surface,
                document.entries,
                document.derived,
                name=document.name,
            )
        standard = self.standard_atlas(document.surface.holes)
        entries = {entry.name: entry for entry in standard.entries}
        for entry in document.entries:
            entries[entry.name] = entry
        return CurveAtlas(
            document.surface,
            list(entries.values()),
            document.derived,
            name=document.name,
            extends_standard=True,
        )

    def get_atlas(self, name: str, holes: int) -> CurveAtlas:
        """Atlas por nombre: `standard` o un archivo del catálogo"""
        if name == STANDARD_ATLAS:
            return self.standard_atlas(holes)
        key = (name, holes)
        if key not in self._named:
            path = self.data_dir / "atlases" / f"{name}.atlas"
            if not path.exists():
                raise UnknownName("atlas not found", atlas=name, path=str(path))
            atlas = self.load_atlas_file(path)
            if atlas.holes != holes:
                raise SurfaceMismatch(
                    "atlas surface does not match", atlas=name, holes=atlas.holes, expected=holes
                )
            self._named[key] = atlas
        return self._named[key]

    def has_atlas(self, name: str) -> bool:
        return name == STANDARD_ATLAS or (self.data_dir / "atlases" / f"{name}.atlas").exists()

    def mapping_classes(self, name: str, holes: int) -> MappingClassService:
        """Servicio de clases de mapeo (en caché) para un atlas"""
        key = (name, holes)
        if key not in self._mapping_classes:
            self._mapping_classes[key] = MappingClassService(self.get_atlas(name, holes))
        return self._mapping_classes[key]

    def mapping_classes_for(self, atlas: CurveAtlas) -> MappingClassService:
        if atlas.name == STANDARD_ATLAS and atlas is self._standard.get(atlas.holes):
            return self.mapping_classes(STANDARD_ATLAS, atlas.holes)
        return MappingClassService(atlas)

    # -- validación --------------------------------------------------------------------

    def validate_atlas(self, atlas: CurveAtlas) -> None:
        """Invariantes del atlas; lanza InvariantViolation con el invariante fallido"""
        groupoid = atlas.groupoid
        for entry in atlas.entries:
            if not entry.word:
                raise InvariantViolation("curve word", "empty word", curve=entry.name)
            try:
                groupoid.check_composable(entry.word + entry.word[:1])
            except CompositionMismatch as e:
                raise InvariantViolation("closed curve", str(e), curve=entry.name)
            for letter, tokens in entry.crossings:
                path = groupoid.path_of(letter)
                for token in tokens:
                    if not 0 <= token.offset < len(entry.word):
                        raise InvariantViolation(
                            "crossing offset", "offset out of range", curve=entry.name
                        )
                    if groupoid.source_of(entry.word[token.offset]) != 1:
                        raise InvariantViolation(
                            "crossing offset",
                            "inserted loop does not start at basepoint 1",
                            curve=entry.name,
                            path=path.name,
                        )
                if path.name.startswith("e") and sum(t.sign for t in tokens) != 0:
                    raise InvariantViolation(
                        "boundary crossings",
                        f"{entry.name} crosses {path.name} algebraically",
                        curve=entry.name,
                    )

        for hole in range(1, atlas.holes + 1):
            name = f"d{hole}"
            if name not in atlas or atlas.is_derived(name):
                continue
            expected = groupoid.canonicalize(groupoid.boundary_word(hole))
            if atlas.base_curve(name).key != expected.key:
                raise InvariantViolation(
                    "boundary word", f"{name} differs from boundary_word({hole})", curve=name
                )

        self._validate_derived(atlas)
        MappingClassService(atlas).check_atlas_homology()

    def _validate_derived(self, atlas: CurveAtlas) -> None:
        known: Set[str] = set(atlas.standard_names())
        for item in atlas.derived:
            for reference in [item.base] + item.conj.names():
                if reference not in known:
                    raise InvariantViolation(
                        "derived curve",
                        f"{item.name} refers to unknown or later curve {reference}",
                        curve=item.name,
                    )
            known.add(item.name)
