from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cka.corpus import load_fixture
from cka.graph import OMEGA, Bundle, Graph

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def fx():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_fixture(name)
        return cache[name]

    return get


@st.composite
def graphs(draw, max_vertices=6, max_mult=2, allow_omega=True, acyclic=False):
    """Small graphs drawn bundle by bundle, so failures shrink to few edges."""
    n = draw(st.integers(1, max_vertices))
    names = [f"v{i}" for i in range(n)]
    pairs = [(i, j) for i in range(n) for j in range(n) if not acyclic or i < j]
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=min(len(pairs), 3 * n), unique=True)) if pairs else []
    bundles = []
    for k, (i, j) in enumerate(chosen):
        mult = draw(st.integers(1, max_mult))
        if allow_omega and draw(st.integers(0, 9)) == 0:
            mult = OMEGA
        bundles.append(Bundle(f"e{k}", names[i], names[j], mult))
    return Graph("h", tuple(names), tuple(bundles))


# results of the acceptance criteria, printed in the terminal summary
ACCEPTANCE: dict[int, tuple[str, bool]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
