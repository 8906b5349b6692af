"""Prints one PASS/FAIL line per acceptance criterion after the run."""

import re

TITLES = {
    1: "taxonomy chain",
    2: "canonical classifications",
    3: "lambda certification",
    4: "power identity",
    5: "modulus theorem",
    6: "product theorems",
    7: "bound theorems",
    8: "Fuglede-Putnam intertwinings",
    9: "normaloid lemma",
    10: "restriction lemma",
    11: "engine cross-validation",
    12: "CLI contract",
}

_outcomes = {}


def pytest_runtest_logreport(report):
    match = re.search(r"test_acceptance\.py::test_c(\d+)_", report.nodeid)
    if not match:
        return
    number = int(match.group(1))
    if report.failed:
        _outcomes[number] = "FAIL"
    elif report.when == "call":
        _outcomes.setdefault(number, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        terminalreporter.write_line(f"{_outcomes[number]}  criterion {number:>2}: {TITLES[number]}")
