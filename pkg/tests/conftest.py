"""Collects acceptance-criterion outcomes and prints one PASS/FAIL line per criterion."""

import pytest

_CRITERIA: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or (rep.when != "call" and not rep.failed):
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "details": []})
    entry["ok"] &= rep.passed
    entry["details"] += [value for key, value in item.user_properties if key == "detail"]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        detail = "; ".join(dict.fromkeys(entry["details"]))
        status = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(f"{status}  {number:2d}. {entry['title']}" + (f"  [{detail}]" if detail else ""))
