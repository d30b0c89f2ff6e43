"""Rank correlations, edge-reconstruction scores, and quartile analyses.

Correlations are tie-aware: rankings are converted to fractional ranks
(members of a tie group share the average of the positions the group spans),
Spearman's rho is the Pearson correlation of the two rank vectors, and
Kendall's tau uses the tau-b tie correction

    tau_b = (C - D) / sqrt((P - T_gold) * (P - T_pred))

with P the number of argument pairs, C/D the concordant/discordant pairs and
T_* the pairs tied on either side. Degenerate inputs (fewer than two
arguments, or a constant rank vector) have no defined correlation and are
reported as None, the undefined marker that aggregation excludes and counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

from .errors import AllUndefined, MismatchedArgumentSets
from .graph import ArgumentId, DebateGraph, Relation, RelationKind
from .semantics import Ranking


def rank_vector(ranking: Ranking) -> dict[ArgumentId, float]:
    """Fractional ranks, best rank 1; tied arguments share their group's
    average position, so the ranks always sum to n(n+1)/2."""
    ranks: dict[ArgumentId, float] = {}
    position = 1
    for group in ranking.tie_groups:
        shared = position + (len(group) - 1) / 2.0
        for aid in group:
            ranks[aid] = shared
        position += len(group)
    return ranks


def _paired_ranks(
    gold: Ranking, predicted: Ranking
) -> tuple[list[float], list[float]]:
    if set(gold.ordered_ids) != set(predicted.ordered_ids):
        raise MismatchedArgumentSets(
            "gold and predicted rankings cover different argument sets"
        )
    g, p = rank_vector(gold), rank_vector(predicted)
    ids = sorted(g)
    return [g[a] for a in ids], [p[a] for a in ids]


def spearman_rho(gold: Ranking, predicted: Ranking) -> float | None:
    """Tie-aware Spearman correlation; None when undefined."""
    g, p = _paired_ranks(gold, predicted)
    n = len(g)
    if n < 2:
        return None
    mean_g, mean_p = sum(g) / n, sum(p) / n
    dev_g = [x - mean_g for x in g]
    dev_p = [x - mean_p for x in p]
    var_g = sum(d * d for d in dev_g)
    var_p = sum(d * d for d in dev_p)
    if var_g == 0.0 or var_p == 0.0:
        return None
    cov = sum(a * b for a, b in zip(dev_g, dev_p))
    return cov / math.sqrt(var_g * var_p)


def kendall_tau(gold: Ranking, predicted: Ranking) -> float | None:
    """Kendall's tau-b; None when undefined."""
    g, p = _paired_ranks(gold, predicted)
    n = len(g)
    if n < 2:
        return None
    concordant = discordant = tied_gold = tied_pred = 0
    for i in range(n):
        for j in range(i + 1, n):
            dg = g[i] - g[j]
            dp = p[i] - p[j]
            if dg == 0:
                tied_gold += 1
            if dp == 0:
                tied_pred += 1
            if dg == 0 or dp == 0:
                continue
            if (dg > 0) == (dp > 0):
                concordant += 1
            else:
                discordant += 1
    pairs = n * (n - 1) // 2
    denominator = math.sqrt((pairs - tied_gold) * (pairs - tied_pred))
    if denominator == 0.0:
        return None
    return (concordant - discordant) / denominator


# ---------------------------------------------------------------------------
# edge reconstruction


@dataclass(frozen=True)
class EdgeSet:
    """A set of signed directed edges, compared by exact (source, target,
    kind) identity."""

    edges: frozenset[Relation]

    @classmethod
    def from_graph(cls, graph: DebateGraph) -> "EdgeSet":
        return cls(frozenset(graph.relations))

    @classmethod
    def from_tuples(
        cls, triples: Iterable[tuple[ArgumentId, ArgumentId, RelationKind | str]]
    ) -> "EdgeSet":
        edges = set()
        for source, target, kind in triples:
            if isinstance(kind, str):
                kind = RelationKind(kind)
            edges.add(Relation(source, target, kind))
        return cls(frozenset(edges))

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class PrfScore:
    precision: float
    recall: float
    f1: float


def edge_prf(gold: EdgeSet, predicted: EdgeSet) -> PrfScore:
    """Precision/recall/F1 with exact edge identity; empty sets yield zero
    scores by convention."""
    true_positives = len(gold.edges & predicted.edges)
    precision = true_positives / len(predicted.edges) if predicted.edges else 0.0
    recall = true_positives / len(gold.edges) if gold.edges else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return PrfScore(precision, recall, f1)


# ---------------------------------------------------------------------------
# aggregation


@dataclass(frozen=True)
class MacroRecord:
    """Mean per metric over defined entries, with exclusion accounting."""

    means: Mapping[str, float | None]
    excluded: Mapping[str, int]
    record_count: int


def macro_average(records: Sequence[Mapping[str, float | None]]) -> MacroRecord:
    """Average each metric over the records where it is defined.

    Undefined markers (None) are excluded from the mean and counted per
    metric. Raises AllUndefined when there is nothing defined to average at
    all.
    """
    keys: list[str] = []
    for record in records:
        for key in record:
            if key not in keys:
                keys.append(key)
    means: dict[str, float | None] = {}
    excluded: dict[str, int] = {}
    any_defined = False
    for key in keys:
        values = [r[key] for r in records if key in r]
        defined = [v for v in values if v is not None]
        excluded[key] = len(values) - len(defined)
        means[key] = sum(defined) / len(defined) if defined else None
        any_defined = any_defined or bool(defined)
    if not any_defined:
        raise AllUndefined("no defined metric values to aggregate")
    return MacroRecord(means=means, excluded=excluded, record_count=len(records))


# ---------------------------------------------------------------------------
# quartile analyses


class QuartileKey(Enum):
    LENGTH_TOKENS = "length"
    POSITION = "position"


@dataclass(frozen=True)
class QuartileBuckets:
    key: QuartileKey
    buckets: tuple[tuple[ArgumentId, ...], ...]

    @property
    def labels(self) -> tuple[str, ...]:
        prefix = "LQ" if self.key is QuartileKey.LENGTH_TOKENS else "PQ"
        return tuple(f"{prefix}{i}" for i in range(1, len(self.buckets) + 1))


def whitespace_tokens(text: str) -> int:
    return len(text.split())


def quartile_split(
    graph: DebateGraph,
    key: QuartileKey,
    tokenizer: Callable[[str], int] = whitespace_tokens,
) -> QuartileBuckets:
    """Partition a graph's arguments into four buckets by text length in
    tokens (LQ1 = shortest) or by chronological position (PQ1 = earliest).

    Keys tie-break by ascending id. Bucket sizes differ by at most one; the
    n mod 4 extra arguments go to the earliest buckets, so 5 arguments split
    (2, 1, 1, 1).
    """
    if not graph.arguments:
        raise ValueError(f"graph {graph.name!r} has no arguments to bucket")
    if key is QuartileKey.LENGTH_TOKENS:
        sort_key = lambda a: (tokenizer(a.text), a.id)
    else:
        sort_key = lambda a: (a.chronological_index, a.id)
    ordered = [a.id for a in sorted(graph.arguments, key=sort_key)]

    n = len(ordered)
    base, extra = divmod(n, 4)
    buckets: list[tuple[ArgumentId, ...]] = []
    start = 0
    for i in range(4):
        size = base + (1 if i < extra else 0)
        buckets.append(tuple(ordered[start : start + size]))
        start += size
    return QuartileBuckets(key=key, buckets=tuple(buckets))


def restrict_ranking(ranking: Ranking, keep: Iterable[ArgumentId]) -> Ranking:
    """The ranking induced on a subset: groups intersected with the subset,
    empty groups dropped, relative order preserved."""
    keep = set(keep)
    groups = [
        tuple(a for a in group if a in keep)
        for group in ranking.tie_groups
    ]
    return Ranking.from_groups([g for g in groups if g])


@dataclass(frozen=True)
class BucketCorrelation:
    label: str
    size: int
    rho: float | None
    tau: float | None


def quartile_correlations(
    gold: Ranking, predicted: Ranking, buckets: QuartileBuckets
) -> tuple[BucketCorrelation, ...]:
    """Per-bucket correlations: both rankings restricted to the bucket's
    arguments, ranks recomputed within the restriction. Degenerate buckets
    (size < 2 or constant ranks) carry None markers."""
    results = []
    for label, members in zip(buckets.labels, buckets.buckets):
        sub_gold = restrict_ranking(gold, members)
        sub_pred = restrict_ranking(predicted, members)
        results.append(
            BucketCorrelation(
                label=label,
                size=len(members),
                rho=spearman_rho(sub_gold, sub_pred),
                tau=kendall_tau(sub_gold, sub_pred),
            )
        )
    return tuple(results)
