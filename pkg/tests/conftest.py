import ast
import json
from fractions import Fraction
from pathlib import Path

import pytest

FROZEN_PATH = Path(__file__).with_name("frozen_values.json")


@pytest.fixture(scope="session")
def frozen():
    return json.loads(FROZEN_PATH.read_text())


def shape_key(text: str) -> tuple:
    """Frozen keys are Python tuple reprs such as ``"(2, 1)"``."""
    return tuple(ast.literal_eval(text))


def frac(text: str) -> Fraction:
    return Fraction(text)


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
