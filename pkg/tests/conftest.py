import time
from contextlib import contextmanager

# criterion number -> (title, passed, seconds, limit)
ACCEPTANCE: dict = {}


@contextmanager
def criterion(number: int, title: str, limit: float | None):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        if limit is not None and elapsed >= limit:
            ok = False
        ACCEPTANCE[number] = (title, ok, elapsed, limit)
    assert limit is None or elapsed < limit, f"criterion {number} took {elapsed:.2f} s (limit {limit} s)"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, secs, limit = ACCEPTANCE[n]
        bound = f" < {limit:g} s" if limit is not None else ""
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}  ({secs:.2f} s{bound})")
