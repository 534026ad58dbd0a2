import pytest

from app.exceptions import UnknownName
from app.schemas.catalog import Manifest
from app.schemas.report import CheckStatus
from app.services.atlas_service import AtlasService
from app.services.catalog_service import CaseScript, CatalogService, RelationEntry
from tests.test_atlas import flip_handle_crossings


@pytest.mark.unit
def test_manifest_contents(catalog):
    manifest = catalog.manifest
    assert len(manifest.relations) == 16
    assert sum(1 for spec in manifest.relations if spec.table_row) == 10
    assert len(manifest.cases) == 52
    assert {spec.name for spec in manifest.theorems} == {"KO9.to_N9", "T8.to_S8"}
    assert {spec.name for spec in manifest.optional} == {"fn.simplify", "fs.simplify"}


@pytest.mark.unit
def test_manifest_rejects_unknown_reference():
    with pytest.raises(ValueError):
        Manifest.model_validate(
            {
                "relations": [{"name": "N_1", "file": "x.fact", "citation": "c"}],
                "cases": [
                    {
                        "name": "case",
                        "source": "N_2",
                        "script": "s.script",
                        "expect": "N_1",
                        "capped": 1,
                    }
                ],
            }
        )


@pytest.mark.unit
def test_manifest_rejects_duplicates():
    relation = {"name": "N_1", "file": "x.fact", "citation": "c"}
    with pytest.raises(ValueError):
        Manifest.model_validate({"relations": [relation, relation]})


@pytest.mark.unit
def test_get_entries(catalog):
    entry = catalog.get("N_9")
    assert isinstance(entry, RelationEntry)
    assert entry.table_row
    assert len(entry.factorization) == 12
    assert entry.factorization.surface.holes == entry.base_points == 9

    case = catalog.get("N8.from_N9.cap9")
    assert isinstance(case, CaseScript)
    assert case.kind == "case"
    assert case.capped == 9
    assert case.source == "N_9"
    assert case.expect == "N_8"
    assert len(case.script) > 0

    with pytest.raises(UnknownName):
        catalog.get("N_10")


@pytest.mark.unit
def test_table_rows_have_twelve_factors(catalog):
    for spec in catalog.manifest.relations:
        if spec.table_row:
            factorization = catalog.relation(spec.name).factorization
            assert len(factorization) == 12
            assert factorization.surface.holes == spec.base_points


@pytest.mark.unit
def test_resolve_factorization(catalog, data_dir, tmp_path):
    by_name = catalog.resolve_factorization("N_2")
    by_path = catalog.resolve_factorization(str(data_dir / "relations" / "N2.fact"))
    assert by_name == by_path
    with pytest.raises(UnknownName):
        catalog.resolve_factorization(str(tmp_path / "missing.fact"))


@pytest.mark.unit
@pytest.mark.parametrize("name", ["N_1", "N_2", "N1.from_N2.cap1", "N1.from_N2.cap2"])
def test_verify_small_entries(catalog, name):
    report = catalog.verify_entry(name)
    assert report.ok, report.render_text()
    assert report.passed >= 1


@pytest.mark.unit
def test_verify_optional_is_skipped(catalog):
    report = catalog.verify_entry("fn.simplify")
    assert report.skipped == 1
    assert report.ok


@pytest.mark.unit
def test_lemmas_small(catalog):
    report = catalog.verify_lemmas(3, 4)
    assert report.ok, report.render_text()
    assert report.find("lemma2:k=3:a1,b").status == CheckStatus.PASS
    assert report.find("lemma3:k=4:b a4 b4->a4 b4 a1").status == CheckStatus.PASS


@pytest.mark.slow
def test_lemmas_full_range(catalog):
    report = catalog.verify_lemmas()
    assert report.ok, report.render_text()


@pytest.mark.slow
@pytest.mark.integration
def test_verify_all(catalog):
    report = catalog.verify_all()
    assert report.ok, report.render_text()
    skipped = {
        check.name
        for check in report.checks
        if check.status == CheckStatus.SKIPPED
    }
    assert {"optional:fn.simplify", "optional:fs.simplify"} <= skipped
    assert report.find("braid:cover").status == CheckStatus.PASS
    assert report.find("braid:six-point").status == CheckStatus.PASS
    assert report.find("braid:two-point").status == CheckStatus.PASS
    assert report.find("theorem:KO9.to_N9").status == CheckStatus.PASS


@pytest.mark.slow
@pytest.mark.integration
def test_parallel_report_order(catalog):
    sequential = catalog.verify_all(parallel=False)
    parallel = catalog.verify_all(parallel=True)
    assert [check.name for check in sequential.checks] == [
        check.name for check in parallel.checks
    ]
    assert [check.status for check in sequential.checks] == [
        check.status for check in parallel.checks
    ]


@pytest.mark.slow
@pytest.mark.integration
def test_corrupted_longitude_breaks_n8(data_dir):
    atlas_service = AtlasService(data_dir)
    atlas = atlas_service.standard_atlas(8)
    atlas_service._standard[8] = flip_handle_crossings(atlas, "b1")
    catalog = CatalogService(atlas_service=atlas_service, data_dir=data_dir)
    report = catalog.verify_entry("N_8")
    assert not report.ok
    assert report.find("relation:N_8").status == CheckStatus.FAIL
