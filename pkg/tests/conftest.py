"""Shared fixtures: the canonical low-rank 3-forms and the acceptance summary printer."""
from __future__ import annotations

import pytest

from formlab.exterior import monomial_form

# canonical representatives of the rank 3, 5 and the two rank-6 orbits
CANONICAL = {
    "rank3": [(1, 2, 3)],
    "rank5": [(1, 2, 3), (1, 4, 5)],
    "rank6_split": [(1, 2, 3), (4, 5, 6)],
    "rank6_degenerate": [(1, 2, 3), (3, 4, 5), (2, 5, 6)],
}
CANONICAL_MIN_DIM = {"rank3": 3, "rank5": 5, "rank6_split": 6, "rank6_degenerate": 6}


def canonical(name: str, n: int, field):
    return monomial_form(n, field, *CANONICAL[name])


def embedded_canonicals(field, n_max: int = 6):
    """(label, form) for every canonical representative on K^n, n up to n_max."""
    out = []
    for name, n0 in CANONICAL_MIN_DIM.items():
        for n in range(n0, n_max + 1):
            out.append((f"{name}/n={n}", canonical(name, n, field)))
    return out


_CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record the outcome of an acceptance criterion: ``criterion(number, passed, detail)``."""

    def record(number: int, passed: bool, detail: str):
        _CRITERIA[number] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
