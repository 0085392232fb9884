import time
from contextlib import contextmanager

RESULTS: dict[int, tuple[str, str, float, float, str]] = {}


@contextmanager
def criterion(num: int, title: str, bound: float):
    """Time a block, record PASS/FAIL, and fail if it overruns ``bound`` seconds."""
    t0 = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        RESULTS[num] = ("FAIL", title, time.perf_counter() - t0, bound, type(exc).__name__)
        raise
    dt = time.perf_counter() - t0
    status = "PASS" if dt <= bound else "FAIL"
    RESULTS[num] = (status, title, dt, bound, "" if status == "PASS" else "over time bound")
    assert dt <= bound, f"criterion {num} took {dt:.1f}s, bound {bound}s"


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        status, title, dt, bound, note = RESULTS[num]
        line = f"{status} criterion {num}: {title} ({dt:.1f}s / {bound:.0f}s)"
        terminalreporter.write_line(line + (f" [{note}]" if note else ""))
