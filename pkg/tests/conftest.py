import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

import pytest

from maxload import ProblemSpec, a_sequence, io

FIXTURES = Path(__file__).parent / "fixtures"

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed or (report.when == "call" and report.skipped)
    if report.when == "setup" and report.skipped:
        _criteria.setdefault(number, [title, "SKIP", 0.0])
        return
    entry = _criteria.setdefault(number, [title, "PASS", 0.0])
    if report.when == "call":
        entry[2] += report.duration
    if failed:
        entry[1] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status, seconds = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2}: {status}  ({seconds:7.2f} s)  {title}")


def shipped_recurrence(n, r):
    ref = resources.files("maxload") / "data" / f"rec_{n}_{r}.json"
    with resources.as_file(ref) as path:
        return io.load_recurrence(path)[1]


@pytest.fixture(scope="session")
def shipped():
    """Loader for the recurrences bundled with the package."""
    return shipped_recurrence


@pytest.fixture(scope="session")
def seq_2_1():
    return a_sequence(ProblemSpec(2, 1), 60)


@pytest.fixture(scope="session")
def seq_3_1():
    return a_sequence(ProblemSpec(3, 1), 150)


@pytest.fixture(scope="session")
def op_2_1():
    from maxload import RecurrenceOperator

    # (T-1) A(T) - A(T-1) - (T-1) A(T-2) = 0
    return RecurrenceOperator([[-1, 1], [-1], [1, -1]], 2, [Fraction(1, 2), Fraction(1, 2)])


@pytest.fixture(scope="session")
def reference_3_1():
    return io.load_recurrence(FIXTURES / "reference_3_1.json")[1]


_evaluations = {}
evaluation_seconds = {}


def ladders_for(n):
    """Named doubling ladders up to 2**20 used by the constant checks."""
    from maxload import ladder
    from maxload.cli import residue_ladder

    base = residue_ladder(n)
    return {
        "residue": base,
        "residue+1": ladder(base[0] + 1, 2**20),
        "pow2": ladder(2**10, 2**20),
        "pow2+1": ladder(2**10 + 1, 2**20),
    }


@pytest.fixture(scope="session")
def evaluated():
    """Float values of A(n, r; T) on every ladder of :func:`ladders_for`, computed once per case."""
    from maxload import PrecisionPolicy, extend_float

    def get(n, r):
        if (n, r) not in _evaluations:
            samples = set().union(*ladders_for(n).values())
            op = shipped_recurrence(n, r)
            started = time.perf_counter()
            _evaluations[(n, r)] = extend_float(op, 2**20, PrecisionPolicy(256), sample_at=samples)
            evaluation_seconds[(n, r)] = time.perf_counter() - started
        return _evaluations[(n, r)]

    return get
