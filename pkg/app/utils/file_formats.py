"""Lectura y escritura de los formatos de texto por líneas.

Formatos: atlas, factorización, guion de movimientos y monodromía. Todas las
lecturas ignoran líneas en blanco y comentarios que empiezan con `#`.
"""

import re
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import structlog

from app.exceptions import ParseError, TorusRelationsError
from app.models.atlas import (
    STANDARD_ATLAS,
    CrossingToken,
    CurveAtlas,
    CurveEntry,
    DerivedEntry,
)
from app.models.braid import MonodromyRep
from app.models.factorization import (
    Factorization,
    MoveScript,
    MoveStep,
    StepKind,
    TwistFactor,
)
from app.models.mapping_class import GeneratorWord
from app.models.words import Groupoid, Letter, SurfaceSig

logger = structlog.get_logger()

_TOKEN_PATTERN = re.compile(r"^([+-])(\d+)(\*?)$")
_TRANSPOSITION_PATTERN = re.compile(r"^\(\s*(\d+)\s*,?\s*(\d+)\s*\)$")
_TARGET_PATTERN = re.compile(r"^(?:∂|d)(\d+)$")


@dataclass
class AtlasDocument:
    """Contenido de un archivo de atlas antes de resolver `extends standard`"""
    surface: SurfaceSig
    name: str
    extends_standard: bool = False
    entries: List[CurveEntry] = field(default_factory=list)
    derived: List[DerivedEntry] = field(default_factory=list)


def _content_lines(text: str) -> Iterator[Tuple[int, str]]:
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line_no, line


def _key_values(parts: List[str], line_no: int) -> Dict[str, str]:
    values: Dict[str, str] = {}
    for part in parts:
        if "=" not in part:
            raise ParseError(f"expected key=value, got '{part}'", line_no=line_no)
        key, value = part.split("=", 1)
        values[key] = value
    return values


def _require(values: Dict[str, str], key: str, line_no: int) -> str:
    if key not in values:
        raise ParseError(f"missing field '{key}'", line_no=line_no)
    return values[key]


def _parse_surface(parts: List[str], line_no: int) -> SurfaceSig:
    values = _key_values(parts[1:], line_no)
    try:
        genus = int(_require(values, "genus", line_no))
        holes = int(_require(values, "holes", line_no))
    except ValueError as e:
        raise ParseError(f"invalid surface header: {e}", line_no=line_no)
    return SurfaceSig(genus=genus, holes=holes)


def format_surface(surface: SurfaceSig) -> str:
    return f"surface genus={surface.genus} holes={surface.holes}"


# -- atlas -------------------------------------------------------------------


def _parse_tokens(text: str, line_no: int) -> Tuple[CrossingToken, ...]:
    tokens: List[CrossingToken] = []
    for item in text.split(","):
        match = _TOKEN_PATTERN.match(item.strip())
        if not match:
            raise ParseError(f"invalid crossing token '{item}'", line_no=line_no)
        sign = 1 if match.group(1) == "+" else -1
        tokens.append(CrossingToken(sign, int(match.group(2)), bool(match.group(3))))
    return tuple(tokens)


def _parse_crossings(
    groupoid: Groupoid, text: str, line_no: int
) -> Tuple[Tuple[Letter, Tuple[CrossingToken, ...]], ...]:
    if text.strip() in ("", "-"):
        return ()
    rows: Dict[Letter, Tuple[CrossingToken, ...]] = {}
    for chunk in text.split(";"):
        if ":" not in chunk:
            raise ParseError(f"invalid crossing group '{chunk}'", line_no=line_no)
        path, tokens = chunk.split(":", 1)
        try:
            letter = groupoid.letter(path.strip())
        except ParseError as e:
            raise ParseError(e.message, line_no=line_no)
        if letter < 0 or letter in rows:
            raise ParseError(f"invalid crossing path '{path}'", line_no=line_no)
        rows[letter] = _parse_tokens(tokens, line_no)
    return tuple(sorted(rows.items()))


def parse_atlas(text: str, name: Optional[str] = None) -> AtlasDocument:
    """Leer un archivo de atlas"""
    surface: Optional[SurfaceSig] = None
    groupoid: Optional[Groupoid] = None
    document_name = name or STANDARD_ATLAS
    extends = False
    entries: List[CurveEntry] = []
    derived: List[DerivedEntry] = []
    seen: set = set()

    for line_no, line in _content_lines(text):
        parts = line.split()
        keyword = parts[0]
        if keyword == "surface":
            if surface is not None:
                raise ParseError("duplicate surface header", line_no=line_no)
            surface = _parse_surface(parts, line_no)
            groupoid = Groupoid(surface)
            continue
        if keyword == "name" and len(parts) == 2:
            document_name = parts[1]
            continue
        if groupoid is None:
            raise ParseError("surface header must come first", line_no=line_no)
        if keyword == "extends":
            if parts[1:] != [STANDARD_ATLAS]:
                raise ParseError("only 'extends standard' is supported", line_no=line_no)
            extends = True
            continue
        if keyword not in ("curve", "derived") or len(parts) < 2:
            raise ParseError(f"unknown line '{line}'", line_no=line_no)
        curve_name = parts[1]
        if curve_name in seen:
            raise ParseError(f"duplicate curve name '{curve_name}'", line_no=line_no)
        seen.add(curve_name)
        values = _key_values(parts[2:], line_no)
        try:
            if keyword == "curve":
                word = groupoid.parse_letters(_require(values, "word", line_no))
                crossings = _parse_crossings(
                    groupoid, values.get("crossings", "-"), line_no
                )
                entries.append(CurveEntry(curve_name, word, crossings))
            else:
                derived.append(
                    DerivedEntry(
                        curve_name,
                        _require(values, "base", line_no),
                        GeneratorWord.parse(values.get("conj", "-")),
                    )
                )
        except ParseError:
            raise
        except TorusRelationsError as e:
            raise ParseError(str(e), line_no=line_no)

    if surface is None:
        raise ParseError("missing surface header")
    logger.debug(
        "Atlas parsed",
        atlas=document_name,
        curves=len(entries),
        derived=len(derived),
    )
    return AtlasDocument(surface, document_name, extends, entries, derived)


def format_atlas(atlas: CurveAtlas, include_standard: bool = True) -> str:
    """Escribir un atlas en su forma normalizada"""
    groupoid = atlas.groupoid
    lines = [format_surface(atlas.surface)]
    if atlas.name != STANDARD_ATLAS:
        lines.append(f"name {atlas.name}")
    if atlas.extends_standard and not include_standard:
        lines.append(f"extends {STANDARD_ATLAS}")
    if include_standard or not atlas.extends_standard:
        for entry in atlas.entries:
            rows = [
                f"{groupoid.path_of(letter).name}:"
                + ",".join(token.format() for token in tokens)
                for letter, tokens in entry.crossings
            ]
            crossings = ";".join(rows) if rows else "-"
            lines.append(
                f"curve {entry.name} word={groupoid.format_letters(entry.word)} "
                f"crossings={crossings}"
            )
    for item in atlas.derived:
        lines.append(f"derived {item.name} base={item.base} conj={item.conj.format()}")
    return "\n".join(lines) + "\n"


# -- factorizaciones -----------------------------------------------------------


def parse_target(text: str, holes: int, line_no: Optional[int] = None) -> Tuple[int, ...]:
    """`∂k`/`dk`, lista de índices o `none`"""
    text = text.strip()
    if text == "none":
        return ()
    match = _TARGET_PATTERN.match(text)
    if match:
        count = int(match.group(1))
        if count != holes:
            raise ParseError(
                "target multi-twist does not match surface", line_no=line_no, holes=holes
            )
        return tuple(range(1, holes + 1))
    try:
        indices = tuple(int(part) for part in text.split())
    except ValueError:
        raise ParseError(f"invalid target '{text}'", line_no=line_no)
    for index in indices:
        if not 1 <= index <= holes:
            raise ParseError("target index out of range", line_no=line_no, index=index)
    return indices


def format_target(factorization: Factorization) -> str:
    if not factorization.target:
        return "none"
    if factorization.is_full_target:
        return f"∂{factorization.surface.holes}"
    return " ".join(str(index) for index in factorization.target)


def parse_factorization(text: str) -> Factorization:
    """Leer un archivo de factorización (factor de la izquierda primero)"""
    surface: Optional[SurfaceSig] = None
    atlas = STANDARD_ATLAS
    target: Optional[Tuple[int, ...]] = None
    factors: List[TwistFactor] = []

    for line_no, line in _content_lines(text):
        parts = line.split()
        keyword = parts[0]
        if keyword == "surface":
            surface = _parse_surface(parts, line_no)
        elif surface is None:
            raise ParseError("surface header must come first", line_no=line_no)
        elif keyword == "atlas" and len(parts) == 2:
            atlas = parts[1]
        elif keyword == "target":
            target = parse_target(" ".join(parts[1:]), surface.holes, line_no)
        elif keyword == "factor":
            values = _key_values(parts[1:], line_no)
            try:
                conj = GeneratorWord.parse(values.get("conj", "-"))
            except ParseError as e:
                raise ParseError(e.message, line_no=line_no)
            factors.append(TwistFactor(_require(values, "base", line_no), conj))
        else:
            raise ParseError(f"unknown line '{line}'", line_no=line_no)

    if surface is None:
        raise ParseError("missing surface header")
    if target is None:
        target = tuple(range(1, surface.holes + 1))
    return Factorization(surface, tuple(factors), target, atlas)


def format_factorization(factorization: Factorization) -> str:
    lines = [format_surface(factorization.surface)]
    if factorization.atlas != STANDARD_ATLAS:
        lines.append(f"atlas {factorization.atlas}")
    lines.append(f"target {format_target(factorization)}")
    lines.extend(factor.format() for factor in factorization.factors)
    return "\n".join(lines) + "\n"


# -- guiones -------------------------------------------------------------------


def _parse_int(text: str, line_no: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"expected an integer, got '{text}'", line_no=line_no)


def parse_step(line: str, line_no: int = 0) -> MoveStep:
    parts = line.split()
    try:
        kind = StepKind(parts[0].upper())
    except ValueError:
        raise ParseError(f"unknown step '{parts[0]}'", line_no=line_no)
    if kind in (StepKind.LEFT, StepKind.RIGHT, StepKind.ROT):
        if len(parts) != 2:
            raise ParseError(f"{kind.value} takes one index", line_no=line_no)
        return MoveStep(kind, index=_parse_int(parts[1], line_no))
    if kind == StepKind.CONJ:
        return MoveStep(kind, word=GeneratorWord.parse(" ".join(parts[1:])))
    if kind == StepKind.RELABEL:
        if len(parts) != 2:
            raise ParseError("RELABEL takes a dictionary name", line_no=line_no)
        return MoveStep(kind, symmetry=parts[1])
    if len(parts) != 3:
        raise ParseError("CAP takes an index and a dictionary name", line_no=line_no)
    return MoveStep(kind, index=_parse_int(parts[1], line_no), symmetry=parts[2])


def parse_script(text: str, name: str = "") -> MoveScript:
    """Un paso por línea; también se aceptan pasos separados por `;`"""
    steps: List[MoveStep] = []
    for line_no, line in _content_lines(text):
        for chunk in line.split(";"):
            if chunk.strip():
                steps.append(parse_step(chunk.strip(), line_no))
    return MoveScript(tuple(steps), name)


def format_script(script: MoveScript) -> str:
    lines = [f"# {script.name}"] if script.name else []
    lines.extend(step.format() for step in script.steps)
    return "\n".join(lines) + "\n"


# -- monodromía ------------------------------------------------------------------


def parse_monodromy(text: str) -> MonodromyRep:
    """Primera línea `n <grado>`, luego una transposición `(i j)` por línea"""
    degree: Optional[int] = None
    entries: List[Tuple[int, int]] = []
    for line_no, line in _content_lines(text):
        if degree is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "n":
                raise ParseError("expected 'n <degree>' header", line_no=line_no)
            degree = _parse_int(parts[1], line_no)
            continue
        match = _TRANSPOSITION_PATTERN.match(line)
        if not match:
            raise ParseError(f"invalid transposition '{line}'", line_no=line_no)
        entries.append((int(match.group(1)), int(match.group(2))))
    if degree is None:
        raise ParseError("missing degree header")
    return MonodromyRep(degree, tuple(entries))


def format_monodromy(rep: MonodromyRep) -> str:
    lines = [f"n {rep.degree}"]
    lines.extend(f"({i} {j})" for i, j in rep.transpositions)
    return "\n".join(lines) + "\n"
