from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from standin import migraine_standin  # noqa: E402

from hybridaug.tabular import Dataset, write_csv  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def standin() -> Dataset:
    return migraine_standin(seed=0)


@pytest.fixture(scope="session")
def standin_csv(tmp_path_factory, standin) -> Path:
    path = tmp_path_factory.mktemp("data") / "standin.csv"
    write_csv(standin, path)
    return path


@pytest.fixture(scope="session")
def small_standin() -> Dataset:
    """Three-class, 60-row version for fast harness tests."""
    return migraine_standin(seed=1, counts={"A": 30, "B": 18, "C": 12})

