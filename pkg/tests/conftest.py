import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# acceptance outcomes, printed after the run
CRITERIA = {}


def record(number, status, detail=""):
    CRITERIA[number] = (status, detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        status, detail = CRITERIA[k]
        terminalreporter.write_line(f"criterion {k}: {status}  {detail}".rstrip())


@pytest.fixture
def tmp_edges(tmp_path):
    def make(text, name="g.txt"):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p
    return make
