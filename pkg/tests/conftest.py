import pytest

#: one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def record():
    def put(num: int, ok: bool, detail: str):
        # a criterion split over several tests passes only if every part does
        prev_ok, prev = ACCEPTANCE.get(num, (True, ""))
        ACCEPTANCE[num] = (prev_ok and ok, f"{prev}; {detail}" if prev else detail)
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return put
