"""QuAD acceptability semantics.

Each argument a starts from its base weight theta(a) and is adjusted by the
strengths of its direct attackers Att(a) and supporters Sup(a):

    v_att(a) = theta(a) * prod(1 - s for s in attacker strengths)
    v_sup(a) = 1 - (1 - theta(a)) * prod(1 - s for s in supporter strengths)

    sigma(a) = theta(a)                    if Att(a) and Sup(a) are both empty
             = v_att(a)                    if only attackers are present
             = v_sup(a)                    if only supporters are present
             = (v_att(a) + v_sup(a)) / 2   otherwise

Graphs are acyclic, so one pass in topological order (children before
parents) computes every score exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import OutOfRangeInput
from .graph import ArgumentId, DebateGraph, topological_order


@dataclass(frozen=True)
class ScoreMap:
    """Acceptability degree per argument of one graph."""

    graph_name: str
    scores: Mapping[ArgumentId, float]


@dataclass(frozen=True)
class Ranking:
    """Arguments ordered strongest first.

    ordered_ids breaks ties by ascending id; tie_groups keeps the tie
    structure (one tuple per maximal group of equally ranked arguments, ids
    ascending within a group) so tie-aware metrics can recover exact ranks.
    """

    ordered_ids: tuple[ArgumentId, ...]
    tie_groups: tuple[tuple[ArgumentId, ...], ...]

    def __post_init__(self):
        flattened = [a for group in self.tie_groups for a in group]
        if tuple(flattened) != self.ordered_ids:
            raise ValueError("tie_groups do not flatten to ordered_ids")
        if len(set(flattened)) != len(flattened):
            raise ValueError("ranking contains duplicate argument ids")
        for group in self.tie_groups:
            if not group or list(group) != sorted(group):
                raise ValueError("tie group members must be ascending and nonempty")

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable[ArgumentId]]) -> "Ranking":
        tidy = tuple(tuple(sorted(g)) for g in groups)
        return cls(tuple(a for g in tidy for a in g), tidy)

    @classmethod
    def from_ordered_ids(cls, ids: Iterable[ArgumentId]) -> "Ranking":
        """A strict ranking: every argument is its own tie group."""
        ids = tuple(ids)
        return cls(ids, tuple((a,) for a in ids))

    def __len__(self) -> int:
        return len(self.ordered_ids)


def _check_unit(label: str, value: float) -> float:
    if not (0.0 <= value <= 1.0):
        raise OutOfRangeInput(f"{label} {value!r} is outside [0, 1]")
    return value


def aggregate_attack(theta: float, attacker_scores: Iterable[float]) -> float:
    """Attack-only adjusted strength: theta shrunk by every attacker."""
    _check_unit("base weight", theta)
    product = 1.0
    for s in attacker_scores:
        _check_unit("attacker score", s)
        product *= 1.0 - s
    return theta * product


def aggregate_support(theta: float, supporter_scores: Iterable[float]) -> float:
    """Support-only adjusted strength: theta pushed toward 1 by every supporter."""
    _check_unit("base weight", theta)
    product = 1.0
    for s in supporter_scores:
        _check_unit("supporter score", s)
        product *= 1.0 - s
    return 1.0 - (1.0 - theta) * product


def acceptability(graph: DebateGraph) -> ScoreMap:
    """Compute every argument's acceptability degree in one topological pass."""
    scores: dict[ArgumentId, float] = {}
    for aid in topological_order(graph):
        theta = graph.base_weights[aid]
        att = graph.attackers_by_target[aid]
        sup = graph.supporters_by_target[aid]
        if not att and not sup:
            sigma = theta
        elif att and not sup:
            sigma = aggregate_attack(theta, (scores[b] for b in sorted(att)))
        elif sup and not att:
            sigma = aggregate_support(theta, (scores[c] for c in sorted(sup)))
        else:
            v_att = aggregate_attack(theta, (scores[b] for b in sorted(att)))
            v_sup = aggregate_support(theta, (scores[c] for c in sorted(sup)))
            sigma = (v_att + v_sup) / 2.0
        scores[aid] = sigma
    return ScoreMap(graph_name=graph.name, scores=scores)


def gold_ranking(scores: ScoreMap) -> Ranking:
    """Rank arguments by descending score; exact score equality forms a tie
    group and ties are broken by ascending id in the flat order."""
    if any(math.isnan(v) for v in scores.scores.values()):
        raise OutOfRangeInput("scores contain NaN")
    by_score: dict[float, list[ArgumentId]] = {}
    for aid, value in scores.scores.items():
        by_score.setdefault(value, []).append(aid)
    groups = [
        tuple(sorted(members))
        for value, members in sorted(by_score.items(), key=lambda kv: -kv[0])
    ]
    return Ranking.from_groups(groups)
