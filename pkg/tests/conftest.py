from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from quadrank import data
from quadrank.graph import Argument, DebateGraph, Relation, RelationKind, build_graph
from quadrank.ingest import parse_node_xml


def make_graph(
    n: int,
    relations: list[tuple[int, int, str]],
    name: str = "test",
    weights: dict[int, float] | None = None,
    text_prefix: str = "claim number",
) -> DebateGraph:
    """Compact builder: make_graph(3, [(2, 1, "attack"), (3, 1, "support")])."""
    args = [Argument(i, f"{text_prefix} {i}", chronological_index=i - 1) for i in range(1, n + 1)]
    rels = [Relation(s, t, RelationKind(k)) for s, t, k in relations]
    return build_graph(args, rels, base_weights=weights, name=name)


@pytest.fixture(scope="session")
def sobriety() -> DebateGraph:
    return parse_node_xml(data.fixture_path("sobrietytest"))[0]


@pytest.fixture(scope="session")
def twelve_angry_men() -> list[DebateGraph]:
    return parse_node_xml(data.fixture_path("twelve_angry_men"))


@pytest.fixture(scope="session")
def debatepedia() -> list[DebateGraph]:
    return parse_node_xml(data.fixture_path("debatepedia"))


@pytest.fixture()
def chain3() -> DebateGraph:
    """Tie-free three-node attack chain: scores 0.375, 0.25, 0.5."""
    return make_graph(3, [(2, 1, "attack"), (3, 2, "attack")], name="chain3")
