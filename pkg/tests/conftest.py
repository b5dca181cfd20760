"""
Pytest fixtures for testing orthoverify.

Provides temporary directories, small fields and desk-scale geometries
shared across test modules.
"""

import tempfile
from pathlib import Path
from typing import Generator

import pytest

from orthoverify.geometry import Geometry, build_geometry
from orthoverify.gf import FieldDescriptor, make_field
from orthoverify.ortho import AmbientSpace


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmp:
        yield Path(tmp)


@pytest.fixture(scope="session")
def f5() -> FieldDescriptor:
    return make_field(5)


@pytest.fixture(scope="session")
def f9() -> FieldDescriptor:
    return make_field(3, 2)


@pytest.fixture(scope="session")
def f13() -> FieldDescriptor:
    return make_field(13)


@pytest.fixture(scope="session")
def v5_3(f5) -> AmbientSpace:
    """F_5^3 with the standard form."""
    return AmbientSpace(f5, 3)


@pytest.fixture(scope="session")
def v5_4(f5) -> AmbientSpace:
    return AmbientSpace(f5, 4)


@pytest.fixture(scope="session")
def v13_4(f13) -> AmbientSpace:
    return AmbientSpace(f13, 4)


@pytest.fixture(scope="session")
def geometry_2_5() -> Geometry:
    return build_geometry(2, 5)


@pytest.fixture(scope="session")
def geometry_3_5() -> Geometry:
    return build_geometry(3, 5)


@pytest.fixture
def config_file(temp_dir) -> Path:
    """An orthoverify.ini with small budgets."""
    path = temp_dir / "orthoverify.ini"
    path.write_text(
        "[orthoverify]\n"
        "max_cosets = 1_000\n"
        "sample_size = 25\n"
        "seed = 7\n"
    )
    return path
