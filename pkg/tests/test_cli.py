import json

import pytest

from app.main import (
    EXIT_CHECK_FAILED,
    EXIT_INCONCLUSIVE,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    main,
)
from app.services.atlas_service import AtlasService
from app.utils.file_formats import format_atlas, parse_factorization
from tests.test_atlas import flip_handle_crossings

pytestmark = pytest.mark.integration


@pytest.fixture
def cli(data_dir):
    def run(*args):
        return main(["--catalog-dir", str(data_dir), *args])

    return run


def test_verify_entry(cli, capsys):
    assert cli("verify", "--entry", "N_1") == EXIT_OK
    out = capsys.readouterr().out
    assert "PASS relation:N_1" in out
    assert "PASS table:N_1" in out
    assert "0 failed" in out


def test_verify_entry_json(cli, capsys):
    assert cli("--format", "json", "verify", "--entry", "N_2") == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["title"] == "entry N_2"
    assert {check["status"] for check in report["checks"]} == {"PASS"}


def test_verify_unknown_entry(cli):
    assert cli("verify", "--entry", "N_42") == EXIT_INPUT_ERROR


def test_verify_corrupted_atlas(cli, tmp_path, capsys):
    atlas = AtlasService().standard_atlas(1)
    path = tmp_path / "corrupted.atlas"
    path.write_text(format_atlas(flip_handle_crossings(atlas, "b")), encoding="utf-8")
    assert cli("verify", "--atlas", str(path)) == EXIT_INPUT_ERROR
    assert "invariant" in capsys.readouterr().err


def test_atlas_write_and_validate(cli, tmp_path):
    path = tmp_path / "standard2.atlas"
    assert cli("atlas", "--holes", "2", "--output", str(path)) == EXIT_OK
    assert path.read_text(encoding="utf-8").startswith("surface genus=1 holes=2")
    assert cli("atlas", "--validate", str(path)) == EXIT_OK
    assert cli("verify", "--atlas", str(path)) == EXIT_OK


def test_replay_with_expect(cli, data_dir, capsys):
    script = data_dir / "scripts" / "N1.from_N2.cap1.script"
    code = cli("replay", "--input", "N_2", "--script", str(script), "--expect", "N_1")
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "PASS step:0" in out
    assert "PASS expect:N_1" in out


def test_replay_catalog_script_by_name(cli):
    assert cli("replay", "--input", "N_2", "--script", "N1.from_N2.cap2") == EXIT_OK


def test_replay_mismatch(cli, data_dir):
    script = data_dir / "scripts" / "N1.from_N2.cap1.script"
    code = cli("replay", "--input", "N_2", "--script", str(script), "--expect", "N_2")
    assert code == EXIT_CHECK_FAILED


def test_replay_out_of_range(cli, tmp_path, capsys):
    script = tmp_path / "bad.script"
    script.write_text("L 1\nR 99\n", encoding="utf-8")
    assert cli("replay", "--input", "N_3", "--script", str(script)) == EXIT_CHECK_FAILED
    assert "FAIL step:2" in capsys.readouterr().out


def test_search_identical(cli, capsys):
    assert cli("search", "--a", "N_3", "--b", "N_3", "--budget", "10") == EXIT_OK
    assert capsys.readouterr().out.strip() == "# search"


def test_search_unknown_input(cli):
    code = cli("search", "--a", "N_3", "--b", "N_42", "--budget", "0")
    assert code == EXIT_INPUT_ERROR


def test_search_inconclusive(cli, tmp_path, data_dir):
    moved = tmp_path / "moved.fact"
    text = (data_dir / "relations" / "N3.fact").read_text(encoding="utf-8")
    lines = text.splitlines()
    factors = [line for line in lines if line.startswith("factor")]
    header = [line for line in lines if not line.startswith("factor")]
    factors[3], factors[4] = factors[4], factors[3]
    moved.write_text("\n".join(header + factors) + "\n", encoding="utf-8")
    code = cli("search", "--a", "N_3", "--b", str(moved), "--budget", "0")
    assert code == EXIT_INCONCLUSIVE


def test_cap(cli, tmp_path):
    output = tmp_path / "capped.fact"
    code = cli("cap", "--input", "N_2", "--hole", "2", "--output", str(output))
    assert code == EXIT_OK
    capped = parse_factorization(output.read_text(encoding="utf-8"))
    assert capped.surface.holes == 1
    assert len(capped) == 12


def test_cap_out_of_range(cli):
    assert cli("cap", "--input", "N_9", "--hole", "10") == EXIT_CHECK_FAILED


def test_cap_invalid_dictionary(cli):
    code = cli("cap", "--input", "N_2", "--hole", "1", "--dict", "cap:2:2")
    assert code == EXIT_CHECK_FAILED


def test_lemmas(cli, capsys):
    assert cli("lemmas", "--min-holes", "3", "--max-holes", "3") == EXIT_OK
    assert "lemmas k=3..3" in capsys.readouterr().out


@pytest.mark.slow
def test_verify_all(cli, capsys):
    assert cli("verify", "--all") == EXIT_OK
    out = capsys.readouterr().out
    assert "SKIPPED optional:fn.simplify" in out
    assert "catalog:" in out
