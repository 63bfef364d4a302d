import json
import sys
import pathlib

import pytest

from gqkit import numberlab

FROZEN = json.loads((pathlib.Path(__file__).parent / "oracle" / "frozen.json").read_text())


@pytest.fixture(scope="session")
def frozen():
    return FROZEN


@pytest.fixture(scope="session")
def golden():
    return numberlab.golden_ratio(40)


@pytest.fixture(scope="session")
def liouville6():
    return numberlab.build_liouville_number(6)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
