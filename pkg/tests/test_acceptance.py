"""One PASS/FAIL line per acceptance criterion, plus the CLI exit code."""
import pytest

from switchthermo import acceptance
from switchthermo.cli import main


@pytest.mark.parametrize("criterion", acceptance.CRITERIA, ids=lambda c: f"{c.number:02d}-{c.name.replace(' ', '-')}")
def test_criterion(criterion, capsys):
    outcome = acceptance.evaluate(criterion)
    with capsys.disabled():
        print("\n" + outcome.line())
    assert outcome.passed, outcome.line()


def test_every_criterion_listed():
    assert [c.number for c in acceptance.CRITERIA] == list(range(1, 11))


def test_verify_command_exit_code(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 10 and "10/10 criteria passed" in out
