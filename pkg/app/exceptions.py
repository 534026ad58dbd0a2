from typing import Any, Dict, Optional


class TorusRelationsError(Exception):
    """Error base del motor de verificación"""

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = context

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{key}={value}" for key, value in self.context.items())
        return f"{self.message} ({details})"


class CompositionMismatch(TorusRelationsError):
    """Letras consecutivas que no se pueden componer en el grupoide"""


class NotALoop(TorusRelationsError):
    """Se esperaba un lazo (origen = destino)"""


class IndexOutOfRange(TorusRelationsError):
    """Índice de agujero, posición o paso fuera de rango"""


class ParseError(TorusRelationsError):
    """Archivo de datos mal formado"""

    def __init__(self, message: str, line_no: Optional[int] = None, **context: Any):
        super().__init__(message, line_no=line_no, **context)
        self.line_no = line_no


class InvariantViolation(TorusRelationsError):
    """Un invariante declarado no se cumple"""

    def __init__(self, invariant: str, detail: str, **context: Any):
        super().__init__(f"invariant '{invariant}' violated: {detail}", **context)
        self.invariant = invariant
        self.detail = detail


class UnknownCurve(TorusRelationsError):
    """Nombre de curva ausente del atlas"""


class SurfaceMismatch(TorusRelationsError):
    """Operandos definidos sobre superficies distintas"""


class InvalidDictionary(TorusRelationsError):
    """Diccionario de reetiquetado que no respeta las relaciones del atlas"""


class UnknownSymmetry(TorusRelationsError):
    """Nombre de simetría desconocido"""


class StepFailure(TorusRelationsError):
    """Falla de un paso al reproducir un guion de movimientos"""

    def __init__(self, step_index: int, reason: str, **context: Any):
        super().__init__(f"step {step_index} failed: {reason}", **context)
        self.step_index = step_index
        self.reason = reason


class BudgetExhausted(TorusRelationsError):
    """Búsqueda acotada sin resultado (no concluyente)"""

    def __init__(self, explored: int, budget: int):
        super().__init__("search budget exhausted", explored=explored, budget=budget)
        self.explored = explored
        self.budget = budget


class UnknownName(TorusRelationsError):
    """Entrada inexistente en el catálogo"""


class StrandMismatch(TorusRelationsError):
    """Trenzas con distinto número de hebras"""


class InvalidArc(TorusRelationsError):
    """Arco que no une los grupos de pinchazos esperados"""


class NotTransposition(TorusRelationsError):
    """Entrada de monodromía que no es una transposición"""
