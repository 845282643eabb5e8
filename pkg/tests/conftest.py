import os
import sys

from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    props = dict(report.user_properties)
    crit = props.get("criterion")
    if crit is None:
        return
    entry = _ACCEPTANCE.setdefault(crit, {"ok": True, "details": []})
    entry["ok"] = entry["ok"] and report.passed
    if "detail" in props:
        entry["details"].append(props["detail"])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")

    def order(name):
        return int(name.split()[0][2:])

    for crit in sorted(_ACCEPTANCE, key=order):
        e = _ACCEPTANCE[crit]
        line = f"{'PASS' if e['ok'] else 'FAIL'}  {crit}"
        if e["details"]:
            line += "  [" + "; ".join(e["details"]) + "]"
        tr.write_line(line)
