from __future__ import annotations

import functools
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

import f2mu
from f2mu.pipeline import Options, Pipeline, PipelineResult

FIXTURES = Path(f2mu.__file__).parent / "fixtures"

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")

POSITIVE = [
    "single_rule",
    "alternating",
    "fib_string",
    "dummy_eliminated",
    "one_rule",
    "srs_alr",
    "srs_aalr",
    "srs_zlr",
    "counter_growth",
    "guarded_counter",
    "mu_loop",
]


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.f2mu"


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")


@functools.lru_cache(maxsize=None)
def loaded(name: str, run_commands: bool = True) -> tuple[Pipeline, PipelineResult]:
    p = Pipeline(Options(run_commands=run_commands))
    r = p.run(fixture_text(name))
    return p, r


@pytest.fixture(params=POSITIVE)
def positive_fixture(request: pytest.FixtureRequest) -> tuple[str, Pipeline, PipelineResult]:
    p, r = loaded(request.param, False)
    return request.param, p, r


# acceptance criterion number -> (passed, title)
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter: pytest.TerminalReporter) -> None:
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} {title}")
