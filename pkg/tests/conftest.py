import random
from pathlib import Path

import pytest

from app.config import PACKAGE_DATA_DIR
from app.services.atlas_service import AtlasService
from app.services.braid_service import BraidService
from app.services.catalog_service import CatalogService
from app.services.hurwitz_service import HurwitzService
from app.services.symmetry_service import SymmetryService


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return PACKAGE_DATA_DIR


@pytest.fixture(scope="session")
def atlas_service(data_dir):
    return AtlasService(data_dir)


@pytest.fixture(scope="session")
def symmetry_service(atlas_service):
    return SymmetryService(atlas_service)


@pytest.fixture(scope="session")
def hurwitz_service(atlas_service, symmetry_service):
    return HurwitzService(atlas_service, symmetry_service)


@pytest.fixture(scope="session")
def braid_service():
    return BraidService()


@pytest.fixture(scope="session")
def catalog(data_dir, atlas_service, hurwitz_service, braid_service):
    return CatalogService(atlas_service, hurwitz_service, braid_service, data_dir)


@pytest.fixture(scope="session")
def atlas1(atlas_service):
    return atlas_service.standard_atlas(1)


@pytest.fixture(scope="session")
def atlas2(atlas_service):
    return atlas_service.standard_atlas(2)


@pytest.fixture(scope="session")
def atlas3(atlas_service):
    return atlas_service.standard_atlas(3)


@pytest.fixture(scope="session")
def atlas9(atlas_service):
    return atlas_service.standard_atlas(9)


@pytest.fixture(scope="session")
def mcg1(atlas_service, atlas1):
    return atlas_service.mapping_classes("standard", 1)


@pytest.fixture(scope="session")
def mcg2(atlas_service, atlas2):
    return atlas_service.mapping_classes("standard", 2)


@pytest.fixture(scope="session")
def mcg3(atlas_service, atlas3):
    return atlas_service.mapping_classes("standard", 3)


@pytest.fixture
def rng():
    """Generador con semilla fija para las pruebas de propiedades"""
    return random.Random(20240)
