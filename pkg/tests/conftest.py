"""Shared fixtures plus the acceptance-gate summary plugin.

Tests marked ``@pytest.mark.acceptance("C1", "...")`` report into a
per-criterion table printed at the end of the session, one PASS/FAIL/SKIP
line per criterion.
"""

from __future__ import annotations

import pytest

from clueguard.corpus import Example, Label, LabeledDataset, Split


@pytest.fixture
def fixture_corpus() -> LabeledDataset:
    """Four-document corpus with hand-computable statistics.

    chi2("deaths") = 2.0, chi2 of every other term = 1.0; vocabulary at
    min_df=1 has 7 terms.
    """
    return LabeledDataset(
        split=Split.TRAIN,
        examples=(
            Example(id="i1", text="deaths reported", label=Label.INFORMATIVE),
            Example(id="i2", text="deaths rising", label=Label.INFORMATIVE),
            Example(id="u1", text="stay home", label=Label.UNINFORMATIVE),
            Example(id="u2", text="good vibes", label=Label.UNINFORMATIVE),
        ),
    )


_acceptance_results: dict[str, list[tuple[str, str]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    criterion = str(marker.args[0])
    description = str(marker.args[1]) if len(marker.args) > 1 else ""
    if report.when == "call" or (report.when == "setup" and report.skipped):
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        _acceptance_results.setdefault(criterion, []).append((status, description))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_acceptance_results):
        entries = _acceptance_results[criterion]
        statuses = {status for status, _ in entries}
        overall = (
            "FAIL" if "FAIL" in statuses
            else "SKIP" if statuses == {"SKIP"}
            else "PASS"
        )
        description = next((d for _, d in entries if d), "")
        terminalreporter.write_line(f"{overall}  {criterion}: {description}")
