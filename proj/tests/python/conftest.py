import os
import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def fixture_dir() -> pathlib.Path:
    return pathlib.Path(os.environ.get("SDCC_FIXTURE_DIR", ROOT / "tests" / "fixtures"))


@pytest.fixture(scope="session")
def cli() -> str:
    path = os.environ.get("SDCC_CLI")
    if not path or not pathlib.Path(path).exists():
        pytest.skip("SDCC_CLI does not point at a built sdcc executable")
    return path
