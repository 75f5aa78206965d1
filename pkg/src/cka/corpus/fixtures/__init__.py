"""Named example graphs shipped as ``.gph`` files."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ...graph import Graph, parse_graph

FIXTURES = ("loop", "o2", "ab", "ex12", "ex33", "o2sink", "exitcycle")


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
    return Path(str(resources.files(__name__).joinpath(f"{name}.gph")))


def load_fixture(name: str) -> Graph:
    return parse_graph(fixture_path(name).read_text(encoding="utf-8"))
