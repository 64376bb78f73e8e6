import os

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from pexider.convex import IntervalBox, VPolytope2

settings.register_profile("default", max_examples=60, deadline=None)
settings.register_profile("thorough", max_examples=3000, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

coord = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


@st.composite
def boxes(draw, d=None):
    d = draw(st.sampled_from([1, 2])) if d is None else d
    a = np.array(draw(st.lists(coord, min_size=d, max_size=d)))
    b = np.array(draw(st.lists(coord, min_size=d, max_size=d)))
    return IntervalBox(np.minimum(a, b), np.maximum(a, b))


@st.composite
def polygons(draw):
    pts = draw(st.lists(st.tuples(coord, coord), min_size=1, max_size=7))
    return VPolytope2(np.array(pts))


def exact_sets(d):
    return boxes(d) if d == 1 else st.one_of(boxes(2), polygons())


@st.composite
def same_dim_sets(draw, k=2):
    d = draw(st.sampled_from([1, 2]))
    return tuple(draw(exact_sets(d)) for _ in range(k))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# acceptance reporting: one PASS/FAIL line per criterion, printed after the run

ACCEPTANCE_LINES: dict[int, str] = {}
_OUTCOME = pytest.StashKey()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        item.stash[_OUTCOME] = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture
def criterion(request):
    """Collects named measurements; the verdict line is written at teardown."""
    marker = request.node.get_closest_marker("acceptance")
    number, title = marker.args
    info: dict = {}
    yield info
    rep = request.node.stash.get(_OUTCOME, None)
    ok = rep is not None and rep.passed
    detail = ", ".join(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}" for k, v in info.items())
    line = f"[{number}] {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES[number] = line
    print(line)
