import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Callable, Dict, List, Optional, Union

import structlog
from pydantic import ValidationError

from app.config import settings
from app.exceptions import ParseError, StepFailure, TorusRelationsError, UnknownName
from app.models.atlas import STANDARD_ATLAS
from app.models.braid import ArcRef, BraidWord
from app.models.factorization import Factorization, MoveScript, TwistFactor
from app.models.words import SurfaceSig
from app.schemas.catalog import (
    ArcSpec,
    DerivationSpec,
    Manifest,
    OptionalDatasetSpec,
    RegenerationData,
    RelationSpec,
)
from app.schemas.report import CheckResult, CheckStatus, Report
from app.services.atlas_service import AtlasService
from app.services.braid_service import BraidService
from app.services.hurwitz_service import HurwitzService
from app.utils.file_formats import parse_factorization, parse_monodromy, parse_script

logger = structlog.get_logger()

CheckTask = Callable[[], List[CheckResult]]
LEMMA_SCRIPT = "R 1; R 2"


@dataclass(frozen=True)
class RelationEntry:
    """Relación del catálogo con su procedencia"""
    name: str
    factorization: Factorization
    citation: str
    table_row: bool = False
    base_points: Optional[int] = None


@dataclass(frozen=True)
class CaseScript:
    """Guion del catálogo: relación de partida, movimientos y relación esperada"""
    name: str
    kind: str
    source: str
    expect: str
    script: MoveScript
    capped: Optional[int] = None
    citation: Optional[str] = None


def _result(name: str, status: CheckStatus, detail: Optional[str] = None,
            witness: Optional[str] = None) -> CheckResult:
    return CheckResult(name=name, status=status, detail=detail, witness=witness)


class CatalogService:
    """Servicio del catálogo de relaciones y guiones con verificación por lotes"""

    def __init__(
        self,
        atlas_service: Optional[AtlasService] = None,
        hurwitz_service: Optional[HurwitzService] = None,
        braid_service: Optional[BraidService] = None,
        data_dir: Optional[Path] = None,
    ):
        self.data_dir = Path(data_dir) if data_dir else settings.data_dir
        self.atlas_service = atlas_service or AtlasService(self.data_dir)
        self.hurwitz_service = hurwitz_service or HurwitzService(self.atlas_service)
        self.braid_service = braid_service or BraidService()
        self._manifest: Optional[Manifest] = None
        self._relations: Dict[str, RelationEntry] = {}

    # -- manifiesto y archivos -----------------------------------------------------

    @property
    def manifest(self) -> Manifest:
        if self._manifest is None:
            path = self.data_dir / "manifest.json"
            try:
                self._manifest = Manifest.model_validate_json(path.read_text(encoding="utf-8"))
            except OSError as e:
                logger.error("Error reading manifest", path=str(path), error=str(e))
                raise ParseError(f"cannot read manifest: {e}", path=str(path))
            except ValidationError as e:
                logger.error("Invalid manifest", path=str(path), error=str(e))
                raise ParseError(f"invalid manifest: {e}", path=str(path))
        return self._manifest

    def _read(self, relative: str) -> str:
        path = self.data_dir / relative
        try:
            return path.read_text(encoding="utf-8")
        except OSError as e:
            raise ParseError(f"cannot read catalog file: {e}", path=str(path))

    def load_factorization(self, path: Union[str, Path]) -> Factorization:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ParseError(f"cannot read factorization file: {e}", path=str(path))
        return parse_factorization(text)

    def load_script(self, path: Union[str, Path]) -> MoveScript:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ParseError(f"cannot read script file: {e}", path=str(path))
        return parse_script(text, Path(path).stem)

    def resolve_factorization(self, reference: str) -> Factorization:
        """Ruta a un archivo o nombre de una relación del catálogo"""
        if Path(reference).exists():
            return self.load_factorization(reference)
        return self.relation(reference).factorization

    def resolve_script(self, reference: str) -> MoveScript:
        if Path(reference).exists():
            return self.load_script(reference)
        entry = self.get(reference)
        if isinstance(entry, CaseScript):
            return entry.script
        raise UnknownName("not a script", name=reference)

    # -- consulta ---------------------------------------------------------------------

    def names(self) -> List[str]:
        manifest = self.manifest
        derivations = [*manifest.cases, *manifest.theorems, *manifest.equivalences]
        return [spec.name for spec in manifest.relations] + [spec.name for spec in derivations]

    def _relation_spec(self, name: str) -> Optional[RelationSpec]:
        for spec in self.manifest.relations:
            if spec.name == name:
                return spec
        return None

    def relation(self, name: str) -> RelationEntry:
        if name not in self._relations:
            spec = self._relation_spec(name)
            if spec is None:
                raise UnknownName("unknown relation", name=name)
            factorization = parse_factorization(self._read(spec.file))
            self._relations[name] = RelationEntry(
                spec.name, factorization, spec.citation, spec.table_row, spec.base_points
            )
        return self._relations[name]

    def _derivations(self) -> List[tuple]:
        manifest = self.manifest
        return (
            [("case", spec) for spec in manifest.cases]
            + [("theorem", spec) for spec in manifest.theorems]
            + [("equivalence", spec) for spec in manifest.equivalences]
        )

    def _case_script(self, kind: str, spec: DerivationSpec) -> CaseScript:
        return CaseScript(
            name=spec.name,
            kind=kind,
            source=spec.source,
            expect=spec.expect,
            script=parse_script(self._read(spec.script), spec.name),
            capped=getattr(spec, "capped", None),
            citation=spec.citation,
        )

    def get(self, name: str) -> Union[RelationEntry, CaseScript]:
        """Entrada inmutable del catálogo"""
        if self._relation_spec(name) is not None:
            return self.relation(name)
        for kind, spec in self._derivations():
            if spec.name == name:
                return self._case_script(kind, spec)
        raise UnknownName("unknown catalog entry", name=name)

    # -- comprobaciones -------------------------------------------------------------

    def _atlas_available(self, factorization: Factorization) -> bool:
        return self.atlas_service.has_atlas(factorization.atlas)

    def _check_relation(self, spec: RelationSpec) -> List[CheckResult]:
        name = f"relation:{spec.name}"
        try:
            entry = self.relation(spec.name)
        except TorusRelationsError as e:
            return [_result(name, CheckStatus.FAIL, str(e))]
        factorization = entry.factorization
        if not self._atlas_available(factorization):
            return [_result(name, CheckStatus.SKIPPED, f"atlas {factorization.atlas} absent")]
        results = [
            _result(name, CheckStatus.PASS)
            if self.hurwitz_service.is_relation(factorization)
            else _result(
                name,
                CheckStatus.FAIL,
                "product differs from the target multi-twist",
                factorization.labels,
            )
        ]
        if spec.table_row:
            ok = len(factorization) == 12 and factorization.surface.holes == spec.base_points
            results.append(
                _result(f"table:{spec.name}", CheckStatus.PASS)
                if ok
                else _result(
                    f"table:{spec.name}",
                    CheckStatus.FAIL,
                    f"{len(factorization)} factors on {factorization.surface}",
                )
            )
        return results

    def replay_to(
        self,
        name: str,
        source: Factorization,
        script: MoveScript,
        expected: Factorization,
    ) -> CheckResult:
        """Reproduce el guion y compara el final factor a factor"""
        try:
            final = self.hurwitz_service.replay(source, script)
        except StepFailure as e:
            logger.error("Catalog script failed", script=name, error=str(e))
            return _result(name, CheckStatus.FAIL, str(e))
        except TorusRelationsError as e:
            logger.error("Catalog script raised", script=name, error=str(e))
            return _result(name, CheckStatus.FAIL, str(e))
        if self.hurwitz_service.factorwise_equal(final, expected):
            return _result(name, CheckStatus.PASS)
        return _result(
            name, CheckStatus.FAIL, "endpoint differs from the expected relation", final.labels
        )

    def _check_derivation(self, kind: str, spec: DerivationSpec) -> List[CheckResult]:
        name = f"{kind}:{spec.name}"
        try:
            case = self._case_script(kind, spec)
            source = self.relation(case.source).factorization
            expected = self.relation(case.expect).factorization
        except TorusRelationsError as e:
            return [_result(name, CheckStatus.FAIL, str(e))]
        for factorization in (source, expected):
            if not self._atlas_available(factorization):
                return [
                    _result(name, CheckStatus.SKIPPED, f"atlas {factorization.atlas} absent")
                ]
        return [self.replay_to(name, source, case.script, expected)]

    def _check_optional(self, spec: OptionalDatasetSpec) -> List[CheckResult]:
        name = f"optional:{spec.name}"
        files = [self.data_dir / spec.source_file, self.data_dir / spec.script]
        if not all(path.exists() for path in files) or not self.atlas_service.has_atlas(spec.atlas):
            return [_result(name, CheckStatus.SKIPPED, "optional dataset absent")]
        try:
            source = parse_factorization(self._read(spec.source_file))
            script = parse_script(self._read(spec.script), spec.name)
            expected = self.relation(spec.expect).factorization
        except TorusRelationsError as e:
            return [_result(name, CheckStatus.FAIL, str(e))]
        return [self.replay_to(name, source, script, expected)]

    def _arc(self, strands: int, spec: ArcSpec) -> ArcRef:
        return ArcRef(BraidWord(strands, tuple(spec.carrier)), spec.index)

    def _check_braid(self) -> List[CheckResult]:
        data = self.manifest.braid
        if data is None:
            return [_result("braid", CheckStatus.SKIPPED, "no braid data")]
        braids = self.braid_service
        results: List[CheckResult] = []
        try:
            cover = braids.cover_invariants(parse_monodromy(self._read(data.monodromy)))
            ok = (
                cover.connected
                and cover.euler_characteristic == 0
                and cover.genus == 1
                and cover.total_is_identity
            )
            results.append(
                _result("braid:cover", CheckStatus.PASS if ok else CheckStatus.FAIL,
                        None if ok else cover.model_dump_json())
            )

            sigma = BraidWord.of
            relations_ok = braids.braid_equals(sigma(4, [1, 2, 1]), sigma(4, [2, 1, 2])) and (
                braids.braid_equals(sigma(4, [1, 3]), sigma(4, [3, 1]))
            )
            results.append(
                _result("braid:relations", CheckStatus.PASS if relations_ok else CheckStatus.FAIL)
            )

            regeneration = RegenerationData.model_validate_json(self._read(data.regeneration))
            six = regeneration.six_point
            beta = self._arc(six.strands, six.beta)
            gammas = tuple(self._arc(six.strands, gamma) for gamma in six.gammas)
            arcs = braids.regenerate_six_point(
                beta,
                (gammas[0], gammas[1], gammas[2], gammas[3]),
                self._arc(six.strands, six.first),
                self._arc(six.strands, six.last),
            )
            via_third = braids.inverse_half_twists([gammas[0], gammas[1]], arcs[2])
            via_fourth = braids.inverse_half_twists([gammas[2], gammas[3]], arcs[3])
            six_ok = (
                braids.arc_equals(arcs[1], beta)
                and braids.arc_equals(arcs[4], via_third)
                and braids.arc_equals(arcs[4], via_fourth)
            )
            results.append(
                _result("braid:six-point", CheckStatus.PASS if six_ok else CheckStatus.FAIL)
            )

            two = regeneration.two_point
            output = braids.regenerate_two_point(
                self._arc(two.strands, two.beta), self._arc(4, two.template)
            )
            two_ok = braids.endpoints(output) == tuple(two.expected_endpoints)
            results.append(
                _result("braid:two-point", CheckStatus.PASS if two_ok else CheckStatus.FAIL)
            )
        except (TorusRelationsError, ValidationError) as e:
            logger.error("Braid checks raised", error=str(e))
            results.append(_result("braid", CheckStatus.FAIL, str(e)))
        return results

    # -- verificación por lotes --------------------------------------------------------

    def _run(self, report: Report, tasks: List[CheckTask], parallel: bool) -> None:
        if parallel and len(tasks) > 1:
            with ThreadPoolExecutor() as executor:
                outcomes = list(executor.map(lambda task: task(), tasks))
        else:
            outcomes = [task() for task in tasks]
        for results in outcomes:
            report.checks.extend(results)

    def verify_all(self, parallel: Optional[bool] = None) -> Report:
        """Relaciones, casos, teoremas, formas alternativas, datos opcionales y trenzas"""
        parallel = settings.parallel_verify if parallel is None else parallel
        start = time.perf_counter()
        logger.info("Catalog verification started", parallel=parallel)
        manifest = self.manifest
        report = Report(title="catalog")
        tasks: List[CheckTask] = []
        for relation in manifest.relations:
            tasks.append(lambda spec=relation: self._check_relation(spec))
        for kind, derivation in self._derivations():
            tasks.append(lambda k=kind, spec=derivation: self._check_derivation(k, spec))
        for dataset in manifest.optional:
            tasks.append(lambda spec=dataset: self._check_optional(spec))
        tasks.append(self._check_braid)
        self._run(report, tasks, parallel)
        logger.info(
            "Catalog verification completed",
            passed=report.passed,
            failed=report.failed,
            skipped=report.skipped,
            elapsed=round(time.perf_counter() - start, 3),
        )
        return report

    def verify_entry(self, name: str) -> Report:
        """Verificación de una sola entrada"""
        report = Report(title=f"entry {name}")
        spec = self._relation_spec(name)
        if spec is not None:
            report.checks.extend(self._check_relation(spec))
            return report
        for kind, derivation in self._derivations():
            if derivation.name == name:
                report.checks.extend(self._check_derivation(kind, derivation))
                return report
        for dataset in self.manifest.optional:
            if dataset.name == name:
                report.checks.extend(self._check_optional(dataset))
                return report
        raise UnknownName("unknown catalog entry", name=name)

    # -- lema de técnicas comunes -------------------------------------------------------

    def _lemma_checks(self, holes: int) -> List[CheckResult]:
        mcg = self.atlas_service.mapping_classes(STANDARD_ATLAS, holes)
        hurwitz = self.hurwitz_service
        prefix = f"k={holes}"
        results: List[CheckResult] = []

        def record(name: str, check: Callable[[], bool]) -> None:
            try:
                ok = check()
                results.append(_result(name, CheckStatus.PASS if ok else CheckStatus.FAIL))
            except TorusRelationsError as e:
                results.append(_result(name, CheckStatus.FAIL, str(e)))

        longitudes = [f"b{i}" for i in range(1, holes + 1)] if holes >= 2 else []
        for name in longitudes:
            record(f"lemma1:{prefix}:b,{name}", lambda n=name: mcg.commute("b", n))
        for i, j in combinations(range(1, holes + 1), 2):
            record(f"lemma1:{prefix}:a{i},a{j}", lambda x=i, y=j: mcg.commute(f"a{x}", f"a{y}"))
        for i in range(1, holes + 1):
            record(f"lemma2:{prefix}:a{i},b", lambda x=i: mcg.braid(f"a{x}", "b"))

        if holes >= 2:
            script = parse_script(LEMMA_SCRIPT, "lemma3")
            surface = SurfaceSig(1, holes)
            for i in range(1, holes + 1):
                following = i % holes + 1
                forms = [
                    ("b", f"a{i}", f"b{i}"),
                    (f"a{i}", f"b{i}", f"a{following}"),
                    (f"b{i}", f"a{following}", "b"),
                    (f"a{following}", "b", f"a{i}"),
                ]
                for position, form in enumerate(forms):
                    nxt = forms[(position + 1) % len(forms)]
                    source = Factorization(surface, tuple(TwistFactor(n) for n in form), ())
                    target = Factorization(surface, tuple(TwistFactor(n) for n in nxt), ())

                    def certify(src=source, dst=target) -> bool:
                        final = hurwitz.replay(src, script, check_every_step=False)
                        return hurwitz.factorwise_equal(final, dst) and hurwitz.product(
                            final
                        ).equals(hurwitz.product(src))

                    record(f"lemma3:{prefix}:{' '.join(form)}->{' '.join(nxt)}", certify)
        return results

    def verify_lemmas(
        self, min_holes: Optional[int] = None, max_holes: Optional[int] = None
    ) -> Report:
        """Identidades del lema de técnicas comunes en Σ_1^k"""
        low = settings.lemma_min_holes if min_holes is None else min_holes
        high = settings.lemma_max_holes if max_holes is None else max_holes
        start = time.perf_counter()
        logger.info("Lemma suite started", min_holes=low, max_holes=high)
        report = Report(title=f"lemmas k={low}..{high}")
        tasks: List[CheckTask] = [
            lambda k=holes: self._lemma_checks(k) for holes in range(low, high + 1)
        ]
        self._run(report, tasks, settings.parallel_verify)
        logger.info(
            "Lemma suite completed",
            passed=report.passed,
            failed=report.failed,
            elapsed=round(time.perf_counter() - start, 3),
        )
        return report
