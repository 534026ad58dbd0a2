from dataclasses import replace

import pytest

from app.exceptions import (
    InvariantViolation,
    ParseError,
    SurfaceMismatch,
    UnknownCurve,
    UnknownName,
)
from app.models.atlas import CurveFamily, family_of
from app.models.cut_system import CutSystem

pytestmark = pytest.mark.unit


def flip_handle_crossings(atlas, curve, path="alpha"):
    """Atlas con los signos de cruce de un camino invertidos en una curva"""
    letter = atlas.groupoid.letter(path)
    entry = atlas.entry(curve)
    tokens = tuple(
        replace(token, sign=-token.sign) for token in entry.tokens_for(letter)
    )
    return atlas.with_entry(entry.with_tokens(letter, tokens))


def test_family_of():
    assert family_of("a3") == (CurveFamily.MERIDIAN, 3)
    assert family_of("b") == (CurveFamily.CENTRAL, 0)
    assert family_of("b2") == (CurveFamily.LONGITUDE, 2)
    assert family_of("d1") == (CurveFamily.BOUNDARY, 1)
    assert family_of("sigma") == (CurveFamily.OTHER, 0)


def test_standard_names(atlas1, atlas3):
    assert set(atlas1.names()) == {"a1", "b", "d1"}
    expected = {"b"} | {f"{prefix}{i}" for prefix in "abd" for i in range(1, 4)}
    assert set(atlas3.names()) == expected
    assert "b2" in atlas3
    assert "b4" not in atlas3
    with pytest.raises(UnknownCurve):
        atlas3.entry("b4")


def test_curve_words_are_loops(atlas3):
    groupoid = atlas3.groupoid
    for entry in atlas3.entries:
        word = groupoid.reduce(entry.word)
        assert word.is_loop
        assert word.source == 1


def test_boundary_curves_match_boundary_words(atlas3):
    groupoid = atlas3.groupoid
    for hole in range(1, 4):
        curve = atlas3.base_curve(f"d{hole}")
        assert curve.key == groupoid.canonicalize(groupoid.boundary_word(hole)).key


def test_cut_system_builds_nine_holes(atlas9):
    assert atlas9.holes == 9
    assert len(atlas9.entries) == 9 + 1 + 9 + 9


def test_cut_system_is_deterministic():
    first = CutSystem(4).build_atlas()
    second = CutSystem(4).build_atlas()
    assert [entry.crossings for entry in first.entries] == [
        entry.crossings for entry in second.entries
    ]


def test_save_load_round_trip(atlas_service, atlas3):
    text = atlas_service.save_atlas(atlas3)
    loaded = atlas_service.load_atlas(text)
    assert loaded.names() == atlas3.names()
    for entry in atlas3.entries:
        assert loaded.entry(entry.name) == entry


def test_extends_standard(atlas_service):
    text = (
        "surface genus=1 holes=2\nname extra\n"
        "extends standard\nderived c base=b conj=a1\n"
    )
    atlas = atlas_service.load_atlas(text)
    assert atlas.name == "extra"
    assert atlas.extends_standard
    assert "a2" in atlas
    assert atlas.is_derived("c")
    mcg = atlas_service.mapping_classes_for(atlas)
    twist = mcg.twist("c")
    assert twist.equals(mcg.twist("b").conjugate_by(mcg.twist("a1")))


def test_unknown_derived_base(atlas_service):
    text = "surface genus=1 holes=2\nextends standard\nderived c base=zeta conj=-\n"
    with pytest.raises(InvariantViolation):
        atlas_service.load_atlas(text)


def test_flipped_crossings_are_rejected(atlas_service, atlas1):
    corrupted = flip_handle_crossings(atlas1, "b")
    with pytest.raises(InvariantViolation):
        atlas_service.validate_atlas(corrupted)


def test_parse_errors_carry_line_numbers(atlas_service):
    with pytest.raises(ParseError) as excinfo:
        atlas_service.load_atlas(
            "surface genus=1 holes=2\ncurve x word=alpha crossings=beta:+x\n"
        )
    assert excinfo.value.line_no == 2
    with pytest.raises(ParseError):
        atlas_service.load_atlas("curve x word=alpha\n")


def test_catalog_atlases(atlas_service):
    ko9 = atlas_service.get_atlas("ko9", 9)
    assert ko9.extends_standard
    assert ko9.derived
    with pytest.raises(SurfaceMismatch):
        atlas_service.get_atlas("ko9", 8)
    with pytest.raises(UnknownName):
        atlas_service.get_atlas("missing", 3)
    assert atlas_service.has_atlas("tanaka8")
    assert not atlas_service.has_atlas("fn_figure")
