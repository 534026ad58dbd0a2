from .words import Curve, GeneratorPath, Groupoid, GroupoidWord, PathKind, SurfaceSig
from .mapping_class import GeneratorWord, MappingClass, TwistGen
from .atlas import CrossingToken, CurveAtlas, CurveEntry, CurveFamily, DerivedEntry
from .factorization import (
    Factorization,
    MoveScript,
    MoveStep,
    RelabelMap,
    StepKind,
    TwistFactor,
)
from .braid import ArcRef, BraidWord, MonodromyRep

__all__ = [
    "Curve",
    "GeneratorPath",
    "Groupoid",
    "GroupoidWord",
    "PathKind",
    "SurfaceSig",
    "GeneratorWord",
    "MappingClass",
    "TwistGen",
    "CrossingToken",
    "CurveAtlas",
    "CurveEntry",
    "CurveFamily",
    "DerivedEntry",
    "Factorization",
    "MoveScript",
    "MoveStep",
    "RelabelMap",
    "StepKind",
    "TwistFactor",
    "ArcRef",
    "BraidWord",
    "MonodromyRep",
]
