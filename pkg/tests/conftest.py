import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parents[1]
FIXTURE_DIR = REPO / "fixtures"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

FIXTURE_FILES = ["base.cds", "algs.alg", "tables.tbl", "tasters.alg"]


@pytest.fixture(scope="session")
def fx():
    from cdslab import fixtures

    return fixtures()


@pytest.fixture()
def workspace():
    from cdslab.parser import Workspace, parse_definitions

    ws = Workspace()
    for name in FIXTURE_FILES:
        result = parse_definitions((FIXTURE_DIR / name).read_text(), ws)
        assert not result.errors, [str(e) for e in result.errors]
    return ws


def python_exe() -> str:
    return sys.executable
