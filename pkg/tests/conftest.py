import pathlib

import pytest

SCENARIO_DIR = pathlib.Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture
def scenario_dir() -> pathlib.Path:
    return SCENARIO_DIR
