from pydantic import BaseModel, Field, field_validator, model_validator
from typing import List, Optional, Tuple


class RelationSpec(BaseModel):
    """Schema para una relación del catálogo"""
    name: str = Field(..., description="Nombre de la relación (N_9, S_8, ...)")
    file: str = Field(..., description="Archivo de factorización relativo al catálogo")
    citation: str = Field(..., description="Etiqueta de procedencia")
    table_row: bool = Field(False, description="Fila de la clasificación de pencils")
    base_points: Optional[int] = Field(None, description="Número de puntos base")

    @field_validator("base_points")
    @classmethod
    def validate_base_points(cls, v):
        if v is not None and v < 1:
            raise ValueError("base_points must be positive")
        return v


class DerivationSpec(BaseModel):
    """Schema para un guion que lleva una relación a otra"""
    name: str = Field(..., description="Nombre del guion")
    source: str = Field(..., description="Relación de partida")
    script: str = Field(..., description="Archivo del guion")
    expect: str = Field(..., description="Relación esperada al final")
    citation: Optional[str] = Field(None, description="Etiqueta de procedencia")


class CaseSpec(DerivationSpec):
    """Schema para un caso de tapado"""
    capped: int = Field(..., ge=1, description="Borde tapado de la relación de partida")


class TheoremSpec(DerivationSpec):
    """Schema para un certificado de equivalencia con una relación conocida"""


class EquivalenceSpec(DerivationSpec):
    """Schema para una forma alternativa de una relación"""


class OptionalDatasetSpec(BaseModel):
    """Schema para datos opcionales que pueden no estar presentes"""
    name: str = Field(..., description="Nombre del conjunto de datos")
    source_file: str = Field(..., description="Factorización de partida")
    script: str = Field(..., description="Archivo del guion")
    expect: str = Field(..., description="Relación esperada al final")
    atlas: str = Field(..., description="Atlas requerido")


class BraidDataSpec(BaseModel):
    """Schema para los datos de trenzas y monodromía"""
    monodromy: str = Field(..., description="Archivo de monodromía")
    regeneration: str = Field(..., description="Datos de las reglas de regeneración")


class Manifest(BaseModel):
    """Schema para el manifiesto del catálogo"""
    relations: List[RelationSpec] = Field(default_factory=list)
    cases: List[CaseSpec] = Field(default_factory=list)
    theorems: List[TheoremSpec] = Field(default_factory=list)
    equivalences: List[EquivalenceSpec] = Field(default_factory=list)
    optional: List[OptionalDatasetSpec] = Field(default_factory=list)
    braid: Optional[BraidDataSpec] = None

    @model_validator(mode="after")
    def validate_references(self):
        names = [spec.name for spec in self.relations]
        derivations = [*self.cases, *self.theorems, *self.equivalences]
        all_names = names + [spec.name for spec in derivations] + [
            spec.name for spec in self.optional
        ]
        if len(set(all_names)) != len(all_names):
            raise ValueError("catalog names must be unique")
        known = set(names)
        for spec in derivations:
            for reference in (spec.source, spec.expect):
                if reference not in known:
                    raise ValueError(f"{spec.name} refers to unknown relation {reference}")
        for item in self.optional:
            if item.expect not in known:
                raise ValueError(f"{item.name} refers to unknown relation {item.expect}")
        return self


class ArcSpec(BaseModel):
    """Schema para un arco transportado por una trenza"""
    carrier: List[int] = Field(default_factory=list, description="Trenza portadora")
    index: int = Field(..., ge=1, description="Arco estándar i (pinchazos i, i+1)")


class SixPointSpec(BaseModel):
    """Schema para los datos locales de un 6-punto de tipo M"""
    strands: int = Field(..., ge=2)
    beta: ArcSpec
    gammas: List[ArcSpec] = Field(..., min_length=4, max_length=4)
    first: ArcSpec
    last: ArcSpec


class TwoPointSpec(BaseModel):
    """Schema para los datos locales de un 2-punto"""
    strands: int = Field(4, ge=4)
    beta: ArcSpec
    template: ArcSpec
    expected_endpoints: Tuple[int, int]


class RegenerationData(BaseModel):
    """Schema para los datos de las reglas de regeneración"""
    six_point: SixPointSpec
    two_point: TwoPointSpec
