from pydantic import BaseModel, Field


class CoverInvariants(BaseModel):
    """Schema para los invariantes de un cubrimiento ramificado simple de la esfera"""
    degree: int = Field(..., description="Número de hojas")
    branch_points: int = Field(..., description="Número de puntos de ramificación")
    connected: bool = Field(..., description="Las transposiciones actúan transitivamente")
    euler_characteristic: int = Field(..., description="χ = 2n − puntos de ramificación")
    genus: int = Field(..., description="Género (2 − χ)/2 del cubrimiento")
    boundary_count: int = Field(..., description="Ciclos del producto total (heurística)")
    total_is_identity: bool = Field(..., description="El producto ordenado es la identidad")
