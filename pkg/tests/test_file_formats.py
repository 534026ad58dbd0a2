import pytest

from app.exceptions import ParseError
from app.models.factorization import StepKind, TwistFactor
from app.models.mapping_class import GeneratorWord
from app.utils.file_formats import (
    format_factorization,
    format_monodromy,
    format_script,
    parse_factorization,
    parse_monodromy,
    parse_script,
    parse_step,
    parse_target,
)

pytestmark = pytest.mark.unit

FACTORIZATION = """
# comentario
surface genus=1 holes=3
atlas ko9_like
target 1 3
factor base=a1 conj=-
factor base=b conj=a1.~b2   # conjugado
"""


def test_parse_factorization():
    factorization = parse_factorization(FACTORIZATION)
    assert factorization.surface.holes == 3
    assert factorization.atlas == "ko9_like"
    assert factorization.target == (1, 3)
    assert not factorization.is_full_target
    assert factorization.factors[1] == TwistFactor("b", GeneratorWord.parse("a1.~b2"))
    assert factorization.labels == "a1 _{a1.~b2}(b)"


def test_factorization_round_trip():
    factorization = parse_factorization(FACTORIZATION)
    assert parse_factorization(format_factorization(factorization)) == factorization


def test_default_target_is_full():
    factorization = parse_factorization("surface genus=1 holes=2\nfactor base=a1\n")
    assert factorization.target == (1, 2)
    assert factorization.is_full_target
    assert "target ∂2" in format_factorization(factorization)


@pytest.mark.parametrize(
    "text,expected",
    [("∂3", (1, 2, 3)), ("d3", (1, 2, 3)), ("none", ()), ("2", (2,)), ("1 3", (1, 3))],
)
def test_parse_target(text, expected):
    assert parse_target(text, 3) == expected


@pytest.mark.parametrize("text", ["∂4", "4", "x"])
def test_parse_target_errors(text):
    with pytest.raises(ParseError):
        parse_target(text, 3)


@pytest.mark.parametrize(
    "text,line_no",
    [
        ("factor base=a1\n", 1),
        ("surface genus=1 holes=2\nfactor conj=a1\n", 2),
        ("surface genus=1 holes=2\n\nwhatever\n", 3),
        ("surface genus=one holes=2\n", 1),
    ],
)
def test_factorization_errors(text, line_no):
    with pytest.raises(ParseError) as excinfo:
        parse_factorization(text)
    assert excinfo.value.line_no == line_no


def test_parse_script():
    script = parse_script(
        "# prueba\nL 1; R 2\nROT 3\nCONJ a1.~b\nRELABEL rot:3:1\nCAP 2 cap:3:2\n"
    )
    kinds = [step.kind for step in script.steps]
    assert kinds == [
        StepKind.LEFT,
        StepKind.RIGHT,
        StepKind.ROT,
        StepKind.CONJ,
        StepKind.RELABEL,
        StepKind.CAP,
    ]
    assert script.steps[3].word == GeneratorWord.parse("a1.~b")
    assert script.steps[5].index == 2
    assert script.steps[5].symmetry == "cap:3:2"
    assert parse_script(format_script(script)).steps == script.steps


def test_empty_script():
    assert len(parse_script("# nada\n\n")) == 0


@pytest.mark.parametrize("line", ["X 1", "L", "L one", "RELABEL", "CAP 2"])
def test_step_errors(line):
    with pytest.raises(ParseError):
        parse_step(line, 4)


def test_monodromy():
    rep = parse_monodromy("n 3\n(1 2)\n(2, 3)\n")
    assert rep.degree == 3
    assert rep.transpositions == ((1, 2), (2, 3))
    assert parse_monodromy(format_monodromy(rep)) == rep


def test_monodromy_errors():
    with pytest.raises(ParseError):
        parse_monodromy("(1 2)\n")
    with pytest.raises(ParseError) as excinfo:
        parse_monodromy("n 3\n(1 2\n")
    assert excinfo.value.line_no == 2
