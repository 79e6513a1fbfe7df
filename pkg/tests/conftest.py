import contextlib
import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from rzsteiner import (generate_fig3, generate_path, generate_skutella, generate_star,
                       generate_triangle, metric_closure, parse_stp)

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def star3():
    return generate_star(3)


@pytest.fixture
def star3_closed():
    return metric_closure(generate_star(3))


@pytest.fixture
def path2():
    return generate_path()


@pytest.fixture
def triangle():
    return generate_triangle()


@pytest.fixture
def fig3():
    return parse_stp((DATA / "fig3.stp").read_text())


@pytest.fixture(scope="session")
def skutella():
    return generate_skutella()


@pytest.fixture(scope="session")
def skutella_catalog():
    from rzsteiner import build_catalog
    return build_catalog(metric_closure(generate_skutella()), 5)


# ------------------------------------------------------------------ acceptance reporting

def pytest_configure(config):
    config.acceptance_lines = {}


@pytest.fixture
def criterion(request):
    """Context manager recording one PASS/FAIL line per acceptance criterion.

    ``with criterion(n, title) as note:`` runs the body; strings passed to
    ``note`` are appended to the line.  Failures are recorded and re-raised.
    """
    lines = request.config.acceptance_lines

    @contextlib.contextmanager
    def run(number, title):
        notes = []
        try:
            yield notes.append
        except BaseException as exc:
            detail = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
            lines[number] = f"criterion {number:2d}: FAIL  {title}  [{detail[:120]}]"
            print(lines[number])
            raise
        lines[number] = f"criterion {number:2d}: PASS  {title}" + "".join(f"  [{n}]" for n in notes)
        print(lines[number])
    return run


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "acceptance_lines", {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
