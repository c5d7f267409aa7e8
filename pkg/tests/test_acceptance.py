"""One test per reference criterion; detail lines are echoed in the terminal summary."""

import pytest

from singlerail import acceptance

REPORT: list[str] = []


@pytest.mark.parametrize("check", acceptance.CHECKS, ids=lambda f: f.__name__.removeprefix("check_"))
def test_criterion(check):
    results = check()
    lines = [c.line() for c in results]
    REPORT.extend(lines)
    print("\n".join(lines))
    failed = [line for c, line in zip(results, lines) if not c.passed]
    assert not failed, "\n".join(failed)


def test_resolution_convention_report():
    line = acceptance.resolution_report()
    REPORT.append(line)
    print(line)
