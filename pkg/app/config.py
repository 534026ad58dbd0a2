from pydantic_settings import BaseSettings
from typing import Optional
from pathlib import Path

PACKAGE_DATA_DIR = Path(__file__).parent / "data"


class Settings(BaseSettings):
    # Catálogo
    catalog_dir: Optional[str] = None

    # Logging
    log_level: str = "WARNING"
    log_format: str = "console"

    # Búsqueda de equivalencias
    search_budget: int = 10000

    # Verificación
    parallel_verify: bool = False
    check_every_step: bool = True
    free_abelian_max_length: int = 8
    free_abelian_samples: int = 64
    random_seed: int = 20240
    lemma_min_holes: int = 3
    lemma_max_holes: int = 9

    class Config:
        env_file = ".env"
        case_sensitive = False
        extra = "ignore"

    @property
    def data_dir(self) -> Path:
        """Directorio efectivo del catálogo"""
        if self.catalog_dir:
            return Path(self.catalog_dir)
        return PACKAGE_DATA_DIR


# Global settings instance
settings = Settings()
