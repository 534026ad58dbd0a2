from pydantic import BaseModel, Field
from typing import List, Optional
from enum import Enum


class CheckStatus(str, Enum):
    """Resultado de una comprobación"""
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED = "SKIPPED"


class ReportFormat(str, Enum):
    """Formatos de salida de los reportes"""
    TEXT = "text"
    JSON = "json"


class CheckResult(BaseModel):
    """Schema para una comprobación individual"""
    name: str = Field(..., description="Nombre de la comprobación")
    status: CheckStatus = Field(..., description="Estado de la comprobación")
    detail: Optional[str] = Field(None, description="Detalle o motivo del fallo")
    witness: Optional[str] = Field(None, description="Palabra testigo del fallo")

    def render(self) -> str:
        parts = [self.status.value, self.name]
        if self.witness:
            parts.append(f"[{self.witness}]")
        if self.detail and self.status != CheckStatus.PASS:
            parts.append(f"- {self.detail}")
        return " ".join(parts)


class Report(BaseModel):
    """Schema para un reporte de verificación"""
    title: str = Field(..., description="Título del reporte")
    checks: List[CheckResult] = Field(default_factory=list, description="Comprobaciones")
    notes: List[str] = Field(default_factory=list, description="Notas del reporte")

    def add(
        self,
        name: str,
        status: CheckStatus,
        detail: Optional[str] = None,
        witness: Optional[str] = None,
    ) -> CheckResult:
        check = CheckResult(name=name, status=status, detail=detail, witness=witness)
        self.checks.append(check)
        return check

    def record(self, name: str, ok: bool, detail: Optional[str] = None,
               witness: Optional[str] = None) -> CheckResult:
        """Agregar PASS o FAIL según `ok`"""
        status = CheckStatus.PASS if ok else CheckStatus.FAIL
        return self.add(name, status, None if ok else detail, None if ok else witness)

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)
        self.notes.extend(other.notes)

    def _count(self, status: CheckStatus) -> int:
        return sum(1 for check in self.checks if check.status == status)

    @property
    def passed(self) -> int:
        return self._count(CheckStatus.PASS)

    @property
    def failed(self) -> int:
        return self._count(CheckStatus.FAIL)

    @property
    def skipped(self) -> int:
        return self._count(CheckStatus.SKIPPED)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if check.status == CheckStatus.FAIL]

    def find(self, name: str) -> Optional[CheckResult]:
        for check in self.checks:
            if check.name == name:
                return check
        return None

    def summary(self) -> str:
        return (
            f"{self.title}: {self.passed} passed, {self.failed} failed, "
            f"{self.skipped} skipped"
        )

    def render_text(self) -> str:
        lines = [check.render() for check in self.checks]
        lines.extend(f"# {note}" for note in self.notes)
        lines.append(self.summary())
        return "\n".join(lines)

    def render(self, output_format: ReportFormat = ReportFormat.TEXT) -> str:
        if output_format == ReportFormat.JSON:
            return self.model_dump_json(indent=2)
        return self.render_text()
