"""Acyclic bipolar debate graphs.

A debate is a set of arguments joined by directed ATTACK/SUPPORT relations.
A relation's source acts on its target (source attacks or supports target).
Graphs are immutable once built; build_graph validates everything up front so
downstream code never has to re-check.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    CycleDetected,
    DanglingEndpoint,
    DuplicateId,
    DuplicateRelation,
    SelfRelation,
    UnknownArgument,
    WeightOutOfRange,
)

#: Arguments are identified by positive integers, unique within one graph.
ArgumentId = int

#: Base weight used when no explicit weight map is given.
DEFAULT_BASE_WEIGHT = 0.5


class RelationKind(Enum):
    ATTACK = "attack"
    SUPPORT = "support"


@dataclass(frozen=True)
class Argument:
    """One argument: id, verbatim text, and its position in debate chronology."""

    id: ArgumentId
    text: str
    chronological_index: int

    def __post_init__(self):
        if not isinstance(self.id, int) or isinstance(self.id, bool) or self.id < 1:
            raise ValueError(f"argument id must be a positive integer, got {self.id!r}")
        if not self.text.strip():
            raise ValueError(f"argument {self.id} has empty text")
        if self.chronological_index < 0:
            raise ValueError(
                f"argument {self.id} has negative chronological index"
            )


@dataclass(frozen=True)
class Relation:
    """Directed edge: source attacks or supports target."""

    source: ArgumentId
    target: ArgumentId
    kind: RelationKind

    def __post_init__(self):
        if self.source == self.target:
            raise SelfRelation(f"argument {self.source} cannot relate to itself")

    def sort_key(self) -> tuple[int, int, str]:
        return (self.source, self.target, self.kind.value)


@dataclass(frozen=True)
class DebateGraph:
    """An immutable, validated debate graph.

    arguments are stored in chronological order, relations in a canonical
    sorted order, and base_weights is total (every argument has a weight in
    [0, 1]). Construct through build_graph, which enforces all of that.
    """

    name: str
    arguments: tuple[Argument, ...]
    relations: tuple[Relation, ...]
    base_weights: Mapping[ArgumentId, float]

    @cached_property
    def by_id(self) -> dict[ArgumentId, Argument]:
        return {a.id: a for a in self.arguments}

    @cached_property
    def argument_ids(self) -> frozenset[ArgumentId]:
        return frozenset(a.id for a in self.arguments)

    @cached_property
    def chronological_ids(self) -> tuple[ArgumentId, ...]:
        return tuple(a.id for a in self.arguments)

    @cached_property
    def attackers_by_target(self) -> dict[ArgumentId, frozenset[ArgumentId]]:
        return self._incoming(RelationKind.ATTACK)

    @cached_property
    def supporters_by_target(self) -> dict[ArgumentId, frozenset[ArgumentId]]:
        return self._incoming(RelationKind.SUPPORT)

    def _incoming(self, kind: RelationKind) -> dict[ArgumentId, frozenset[ArgumentId]]:
        acc: dict[ArgumentId, set[ArgumentId]] = {a.id: set() for a in self.arguments}
        for rel in self.relations:
            if rel.kind is kind:
                acc[rel.target].add(rel.source)
        return {a: frozenset(s) for a, s in acc.items()}

    def __len__(self) -> int:
        return len(self.arguments)


def build_graph(
    arguments: Iterable[Argument],
    relations: Iterable[Relation] = (),
    base_weights: Mapping[ArgumentId, float] | None = None,
    name: str = "debate",
) -> DebateGraph:
    """Validate and assemble a DebateGraph.

    base_weights=None assigns the default 0.5 everywhere; a partial map is
    filled up with the default. Raises DuplicateId, DanglingEndpoint,
    DuplicateRelation, UnknownArgument, WeightOutOfRange, or CycleDetected.
    """
    args = tuple(arguments)
    rels = tuple(relations)

    seen_ids: set[ArgumentId] = set()
    seen_chrono: set[int] = set()
    for a in args:
        if a.id in seen_ids:
            raise DuplicateId(f"argument id {a.id} occurs more than once")
        seen_ids.add(a.id)
        if a.chronological_index in seen_chrono:
            raise ValueError(
                f"chronological index {a.chronological_index} occurs more than once"
            )
        seen_chrono.add(a.chronological_index)

    seen_pairs: dict[tuple[ArgumentId, ArgumentId], RelationKind] = {}
    for r in rels:
        for endpoint in (r.source, r.target):
            if endpoint not in seen_ids:
                raise DanglingEndpoint(
                    f"relation {r.source}->{r.target} references unknown argument {endpoint}"
                )
        previous = seen_pairs.get((r.source, r.target))
        if previous is not None:
            what = "duplicate" if previous is r.kind else "conflicting"
            raise DuplicateRelation(
                f"{what} relation between {r.source} and {r.target}"
            )
        seen_pairs[(r.source, r.target)] = r.kind

    weights: dict[ArgumentId, float] = {a.id: DEFAULT_BASE_WEIGHT for a in args}
    if base_weights is not None:
        for aid, w in base_weights.items():
            if aid not in seen_ids:
                raise UnknownArgument(f"weight given for unknown argument {aid}")
            if not (0.0 <= w <= 1.0):
                raise WeightOutOfRange(
                    f"weight {w!r} for argument {aid} is outside [0, 1]"
                )
            weights[aid] = float(w)

    _check_acyclic(seen_ids, rels)

    ordered_args = tuple(sorted(args, key=lambda a: a.chronological_index))
    ordered_rels = tuple(sorted(rels, key=Relation.sort_key))
    return DebateGraph(
        name=name,
        arguments=ordered_args,
        relations=ordered_rels,
        base_weights=weights,
    )


def _check_acyclic(ids: set[ArgumentId], relations: tuple[Relation, ...]) -> None:
    outgoing: dict[ArgumentId, list[ArgumentId]] = {a: [] for a in ids}
    indegree: dict[ArgumentId, int] = {a: 0 for a in ids}
    for r in relations:
        outgoing[r.source].append(r.target)
        indegree[r.target] += 1

    ready = [a for a in ids if indegree[a] == 0]
    visited = 0
    while ready:
        node = ready.pop()
        visited += 1
        for nxt in outgoing[node]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                ready.append(nxt)
    if visited == len(ids):
        return

    # Walk the leftover subgraph until a node repeats, then report that loop.
    stuck = sorted(a for a in ids if indegree[a] > 0)
    path: list[ArgumentId] = [stuck[0]]
    positions = {stuck[0]: 0}
    while True:
        nxt = min(t for t in outgoing[path[-1]] if indegree[t] > 0)
        if nxt in positions:
            cycle = path[positions[nxt]:] + [nxt]
            raise CycleDetected(cycle)
        positions[nxt] = len(path)
        path.append(nxt)


def attackers(graph: DebateGraph, argument: ArgumentId) -> set[ArgumentId]:
    """Sources of ATTACK relations targeting the given argument."""
    try:
        return set(graph.attackers_by_target[argument])
    except KeyError:
        raise UnknownArgument(f"no argument {argument} in graph {graph.name!r}") from None


def supporters(graph: DebateGraph, argument: ArgumentId) -> set[ArgumentId]:
    """Sources of SUPPORT relations targeting the given argument."""
    try:
        return set(graph.supporters_by_target[argument])
    except KeyError:
        raise UnknownArgument(f"no argument {argument} in graph {graph.name!r}") from None


def topological_order(graph: DebateGraph) -> list[ArgumentId]:
    """Deterministic topological order placing every relation's source before
    its target (children first, the order score evaluation needs).

    Ties are broken by ascending argument id, so the result is reproducible.
    """
    indegree = {a: 0 for a in graph.argument_ids}
    outgoing: dict[ArgumentId, list[ArgumentId]] = {a: [] for a in graph.argument_ids}
    for r in graph.relations:
        outgoing[r.source].append(r.target)
        indegree[r.target] += 1

    heap = [a for a in graph.argument_ids if indegree[a] == 0]
    heapq.heapify(heap)
    order: list[ArgumentId] = []
    while heap:
        node = heapq.heappop(heap)
        order.append(node)
        for nxt in outgoing[node]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                heapq.heappush(heap, nxt)
    return order


def pair_count(graphs: Iterable[DebateGraph]) -> int:
    """Total number of unordered within-graph argument pairs, sum of C(n, 2)."""
    return sum(len(g) * (len(g) - 1) // 2 for g in graphs)
