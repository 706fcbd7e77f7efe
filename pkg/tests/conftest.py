import math

import pytest
from hypothesis import strategies as st

from ctxprob import ModelSpec


def m0() -> ModelSpec:
    """Reference model: p_1^a = 0.5, c|a_1 = 0.9, c|a_2 = 0.5, cbar|a_1 = 0.8, chat|a_2 = 0.2."""
    return ModelSpec.from_probabilities(0.5, 0.9, 0.5, 0.8, 0.2)


@pytest.fixture
def model_m0() -> ModelSpec:
    return m0()


def prob(**kw):
    return st.floats(min_value=0.0, max_value=1.0, allow_nan=False, **kw)


interior = st.floats(min_value=1e-3, max_value=1 - 1e-3, allow_nan=False)


@st.composite
def models(draw, p_a=interior):
    return ModelSpec.from_probabilities(
        draw(p_a),
        draw(prob()),
        draw(prob()),
        draw(prob()),
        draw(prob()),
        cbar_given_a2=draw(prob()),
        chat_given_a1=draw(prob()),
    )


def four_sigma(p: float, n: float) -> float:
    return 4.0 * math.sqrt(p * (1.0 - p) / n)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when == "call" and "test_acceptance.py::test_criterion_" in rep.nodeid:
                k = int(rep.nodeid.split("test_criterion_")[1].split("_")[0])
                lines.append((k, "PASS" if outcome == "passed" else "FAIL", rep.nodeid.split("::")[1]))
    if lines:
        terminalreporter.section("acceptance criteria")
        for k, status, name in sorted(lines):
            terminalreporter.write_line(f"criterion {k:2d}: {status}  {name}")
