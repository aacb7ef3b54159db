from __future__ import annotations

import os

import pytest

os.environ.setdefault("PLISSKIT_THREADS", str(os.cpu_count() or 1))

CRITERIA = {
    1: "cat-map exponents within 1e-6 of log((3+sqrt5)/2), < 1 s",
    2: "scheduler gate at t = 19/20 and side condition on 1000 draws, < 1 s",
    3: "fast Pliss times equal the O(n^2) oracle on 1000 sequences, < 5 s",
    4: "Pliss density bound on 1000 admissible sequences, < 5 s",
    5: "cat-map cp-scan: every mu = 1.0 above the 0.8222 bound, < 30 s",
    6: "perturbed cat (eps 0.05) cp-scan: hypothesis ok, mu_delta >= 0.8022, mu_cp > 0, < 2 min",
    7: "angle bound on x in Delta_1 with f(x) in Delta_3: zero violations",
    8: "property suites (prefix closure, clusters, mu_cp, determinism, log-sums), < 1 min",
}
BUDGET_8 = 60.0

_results: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    entry = _results.setdefault(n, {"ok": True, "seconds": 0.0, "tests": 0})
    entry["seconds"] += rep.duration
    if rep.when == "call":
        entry["tests"] += 1
    if rep.failed or (rep.when == "call" and rep.skipped):
        entry["ok"] = False


def _criterion_ok(n) -> bool:
    entry = _results.get(n)
    if entry is None or entry["tests"] == 0:
        return False
    if n == 8 and entry["seconds"] >= BUDGET_8:
        return False
    return entry["ok"]


def pytest_sessionfinish(session, exitstatus):
    if 8 in _results and _results[8]["seconds"] >= BUDGET_8 and session.exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, text in CRITERIA.items():
        entry = _results.get(n)
        if entry is None:
            tr.write_line(f"criterion {n}: NOT RUN  {text}")
            continue
        status = "PASS" if _criterion_ok(n) else "FAIL"
        tr.write_line(f"criterion {n}: {status}  {text}  ({entry['seconds']:.2f} s)")
