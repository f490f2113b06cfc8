"""Shared fixtures and the acceptance summary printed at the end of a run."""

from __future__ import annotations

import random

import pytest

from ghom.samples import example, example_names, valid_examples

_ACCEPTANCE: dict[str, tuple[str, bool]] = {}


@pytest.fixture(scope="session")
def docs():
    """Every bundled example that validates, keyed by name."""
    return {d.name: d for d in valid_examples()}


@pytest.fixture(scope="session")
def all_names():
    return example_names()


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def octa():
    return example("octahedron_antipodal")


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or report.failed:
        key = report.nodeid.split("::")[-1]
        number = key.split("_")[2]
        title = " ".join(key.split("_")[3:])
        prev = _ACCEPTANCE.get(number, (title, True))[1]
        _ACCEPTANCE[number] = (title, prev and report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE, key=int):
        title, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {int(number):2d}: {title}")
