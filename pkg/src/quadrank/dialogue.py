"""Flattening graphs into dialogue transcripts and sampling alternative
presentation orders.

A dialogue renders each argument as "Argument <id>: <text>", one line per
argument, and deliberately carries no relation or weight information: the
reader only sees who said what, in some order.

Presentation orders other than chronology are sampled uniformly-ish from the
claim-first topological orders of the graph: a reply may only appear after
the argument it attacks or supports (relation target precedes source).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import NotAPermutation
from .graph import ArgumentId, DebateGraph

#: rejection-sampling budget per requested order before giving up
RETRY_FACTOR = 100


@dataclass(frozen=True)
class Dialogue:
    """One rendered transcript of a debate."""

    graph_name: str
    lines: tuple[tuple[ArgumentId, str], ...]
    ordering_label: str

    @property
    def text(self) -> str:
        """The transcript as written to file: one line per argument plus a
        trailing newline."""
        return "\n".join(line for _, line in self.lines) + "\n"


@dataclass(frozen=True)
class OrderSample:
    """Distinct presentation orders drawn for one graph."""

    graph_name: str
    orders: tuple[tuple[ArgumentId, ...], ...]
    seed: int
    requested: int
    not_enough_orders: bool


def render_line(argument_id: ArgumentId, text: str) -> str:
    return f"Argument {argument_id}: {text}"


def flatten(
    graph: DebateGraph,
    order: list[ArgumentId] | tuple[ArgumentId, ...],
    label: str | None = None,
) -> Dialogue:
    """Render the graph's arguments in the given order.

    order must be a permutation of the graph's argument ids. When label is
    omitted it is inferred: "chronological" if the order matches debate
    chronology, "custom" otherwise.
    """
    order = tuple(order)
    if sorted(order) != sorted(graph.argument_ids):
        raise NotAPermutation(
            f"order is not a permutation of the arguments of {graph.name!r}"
        )
    if label is None:
        label = "chronological" if order == graph.chronological_ids else "custom"
    lines = tuple((aid, render_line(aid, graph.by_id[aid].text)) for aid in order)
    return Dialogue(graph_name=graph.name, lines=lines, ordering_label=label)


def _precedence(graph: DebateGraph, claim_first: bool) -> dict[ArgumentId, set[ArgumentId]]:
    """Map each argument to the set of arguments that must precede it."""
    before: dict[ArgumentId, set[ArgumentId]] = {a: set() for a in graph.argument_ids}
    for r in graph.relations:
        if claim_first:
            before[r.source].add(r.target)   # the claim precedes the reply
        else:
            before[r.target].add(r.source)
    return before


def _count_orders(
    before: dict[ArgumentId, set[ArgumentId]], cap: int
) -> tuple[int, list[tuple[ArgumentId, ...]]]:
    """Enumerate linear extensions depth-first, stopping once cap are found.

    Any prefix of valid choices extends to a full order (the remainder is
    still acyclic), so the walk does O(found * n) work, never more.
    """
    found: list[tuple[ArgumentId, ...]] = []
    placed: list[ArgumentId] = []
    done: set[ArgumentId] = set()
    ids = sorted(before)

    def walk() -> bool:
        if len(placed) == len(ids):
            found.append(tuple(placed))
            return len(found) >= cap
        for aid in ids:
            if aid not in done and before[aid] <= done:
                placed.append(aid)
                done.add(aid)
                stop = walk()
                done.discard(aid)
                placed.pop()
                if stop:
                    return True
        return False

    walk()
    return len(found), found


def _random_order(
    before: dict[ArgumentId, set[ArgumentId]], rng: random.Random
) -> tuple[ArgumentId, ...]:
    """One random linear extension: repeatedly pick uniformly among the
    arguments whose prerequisites are all placed."""
    remaining = {aid: set(prereq) for aid, prereq in before.items()}
    order: list[ArgumentId] = []
    while remaining:
        ready = sorted(aid for aid, prereq in remaining.items() if not prereq)
        choice = ready[rng.randrange(len(ready))]
        order.append(choice)
        del remaining[choice]
        for prereq in remaining.values():
            prereq.discard(choice)
    return tuple(order)


def sample_topological_orders(
    graph: DebateGraph,
    k: int,
    seed: int,
    claim_first: bool = True,
) -> OrderSample:
    """Draw k distinct valid presentation orders with a seeded generator.

    By default every relation's target precedes its source (replies follow
    the claims they answer); claim_first=False inverts the constraint. When
    the graph admits fewer than k distinct orders, all of them are returned
    and not_enough_orders is set. Identical (graph, k, seed) calls return
    identical samples.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    before = _precedence(graph, claim_first)
    available, exhaustive = _count_orders(before, k)
    if available < k:
        return OrderSample(
            graph_name=graph.name,
            orders=tuple(exhaustive),
            seed=seed,
            requested=k,
            not_enough_orders=True,
        )

    rng = random.Random(seed)
    distinct: list[tuple[ArgumentId, ...]] = []
    seen: set[tuple[ArgumentId, ...]] = set()
    for _ in range(RETRY_FACTOR * k):
        order = _random_order(before, rng)
        if order not in seen:
            seen.add(order)
            distinct.append(order)
            if len(distinct) == k:
                break
    return OrderSample(
        graph_name=graph.name,
        orders=tuple(distinct),
        seed=seed,
        requested=k,
        not_enough_orders=len(distinct) < k,
    )
