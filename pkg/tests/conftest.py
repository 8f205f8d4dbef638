from fractions import Fraction as F

import pytest

from barterdr.model import UNIT, make_instance
from barterdr.rounding import RoundingState, ScriptedDecider
from barterdr.vbm import build_vbm

_acceptance: dict[str, tuple[str, str]] = {}


def three_agent_instance(weights=UNIT):
    """Three agents over items a (value 100), b, c, d (value 1)."""
    return make_instance(
        {"a": 100, "b": 1, "c": 1, "d": 1},
        {
            "1": (["a", "b"], ["c", "d"]),
            "2": (["c"], ["a", "d"]),
            "3": (["d"], ["b", "c"]),
        },
        weights=weights,
    )


def balanced_point(graph):
    x = [F(0)] * len(graph.edges)
    x[graph.edge_index("1", "2", "a")] = F(1, 200)
    x[graph.edge_index("2", "3", "c")] = F(1)
    x[graph.edge_index("3", "1", "d")] = F(1, 2)
    x[graph.edge_index("3", "2", "d")] = F(1, 2)
    return x


@pytest.fixture
def three_agent():
    return three_agent_instance()


@pytest.fixture
def balanced_state():
    g = build_vbm(three_agent_instance())
    return RoundingState(g, balanced_point(g), ScriptedDecider())


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if "test_acceptance.py" in item.nodeid and rep.when == "call":
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        if hasattr(item, "callspec"):
            doc += f" [{item.callspec.id}]"
        _acceptance[item.name] = (doc, "PASS" if rep.passed else "FAIL")
    elif "test_acceptance.py" in item.nodeid and rep.when == "setup" and rep.failed:
        _acceptance[item.name] = (item.name, "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in _acceptance:
        doc, status = _acceptance[name]
        terminalreporter.write_line(f"{status}  {doc}")
