import pytest

# criterion number -> list of (ok, detail) collected by tests/test_acceptance.py
ACCEPTANCE = {}


def record(criterion: int, ok: bool, detail: str = "") -> None:
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())


@pytest.hookimpl(trylast=True)
def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        rows = ACCEPTANCE[k]
        ok = all(r[0] for r in rows)
        bad = [d for good, d in rows if not good]
        tr.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}" + (f"  ({'; '.join(bad)})" if bad else ""))
