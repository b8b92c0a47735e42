from __future__ import annotations

from pathlib import Path

import pytest

from wcgpot import GameInstance

GOLDEN = Path(__file__).parent / "golden"

_acceptance_lines: list[str] = []


def record_acceptance(line: str) -> None:
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


def two_links(weights=(1, 1), degree=1) -> GameInstance:
    """Every player picks one of two identical resources."""
    return GameInstance.build(weights, [(1, degree), (1, degree)], [[[0], [1]] for _ in weights])


@pytest.fixture
def links():
    return two_links()


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN
