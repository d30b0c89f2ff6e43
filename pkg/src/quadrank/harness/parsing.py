"""Canonical renderings of rankings and adjacency lists, and the lenient
parsers that read them back out of model output.

The canonical ranking line is

    Ranking: Argument 3 > Argument 2 = Argument 4 > Argument 5

with ">" separating strictly ordered groups and "=" joining arguments judged
equally strong. The parser also accepts commas and numbered lines as strict
separators, so common model phrasings parse without being canonical.

The canonical adjacency list has one line per argument that is acted on; the
key names the target and each tuple names a source and the relation kind:

    'Argument 1': [('Argument 2', 'support'), ('Argument 3', 'attack')]
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import (
    EmptyAfterRejection,
    MissingAdjacency,
    MissingRanking,
    NotAPermutation,
    UnknownArgumentId,
)
from ..graph import ArgumentId, Relation, RelationKind
from ..metrics import EdgeSet
from ..semantics import Ranking

_RANKING_MARKER = re.compile(r"ranking[^:\n]{0,60}:", re.IGNORECASE)
_ARGUMENT_REF = re.compile(r"argument\s*#?\s*(\d+)", re.IGNORECASE)

_ADJACENCY_ENTRY = re.compile(
    r"['\"]argument\s*(\d+)['\"]\s*:\s*\[([^\]]*)\]", re.IGNORECASE
)
_ADJACENCY_TUPLE = re.compile(
    r"\(\s*['\"]argument\s*(\d+)['\"]\s*,\s*['\"]([a-z]+)['\"]\s*\)", re.IGNORECASE
)

_KIND_WORDS = {
    "attack": RelationKind.ATTACK,
    "attacks": RelationKind.ATTACK,
    "support": RelationKind.SUPPORT,
    "supports": RelationKind.SUPPORT,
}


def render_ranking(ranking: Ranking) -> str:
    """One canonical ranking line, strongest group first."""
    groups = [
        " = ".join(f"Argument {aid}" for aid in group)
        for group in ranking.tie_groups
    ]
    return "Ranking: " + " > ".join(groups)


def parse_ranking(response: str, expected_ids: set[ArgumentId]) -> Ranking:
    """Extract the ranking from model output.

    The text after the last "ranking:" marker is scanned for Argument
    references (the whole response when no marker is present). Consecutive
    references joined by "=" form a tie group; ">", ",", and numbered lines
    separate groups. The extracted ids must be exactly a permutation of
    expected_ids.
    """
    block = response
    last_marker = None
    for match in _RANKING_MARKER.finditer(response):
        last_marker = match
    if last_marker is not None:
        block = response[last_marker.end():]

    refs = list(_ARGUMENT_REF.finditer(block))
    if not refs:
        raise MissingRanking("no ranked Argument references found in response")

    groups: list[list[ArgumentId]] = [[int(refs[0].group(1))]]
    for previous, current in zip(refs, refs[1:]):
        separator = block[previous.end() : current.start()]
        if "=" in separator:
            groups[-1].append(int(current.group(1)))
        else:
            groups.append([int(current.group(1))])

    extracted = [aid for group in groups for aid in group]
    unknown = sorted(set(extracted) - set(expected_ids))
    if unknown:
        raise UnknownArgumentId(f"ranking names unknown argument ids {unknown}")
    if len(set(extracted)) != len(extracted) or set(extracted) != set(expected_ids):
        raise NotAPermutation(
            "ranking is not a permutation of the debate's argument ids "
            f"(got {len(extracted)} references over {len(set(extracted))} distinct ids, "
            f"expected {len(expected_ids)})"
        )
    return Ranking.from_groups(groups)


def render_adjacency(edges: EdgeSet) -> str:
    """Canonical adjacency block: targets ascending, sources ascending."""
    by_target: dict[ArgumentId, list[Relation]] = {}
    for rel in edges.edges:
        by_target.setdefault(rel.target, []).append(rel)
    lines = []
    for target in sorted(by_target):
        tuples = ", ".join(
            f"('Argument {rel.source}', '{rel.kind.value}')"
            for rel in sorted(by_target[target], key=Relation.sort_key)
        )
        lines.append(f"'Argument {target}': [{tuples}]")
    return "\n".join(lines)


@dataclass(frozen=True)
class AdjacencyParse:
    """Accepted edges plus a human-readable note per rejected tuple."""

    edges: EdgeSet
    rejections: tuple[str, ...]

    @property
    def rejected_count(self) -> int:
        return len(self.rejections)


def parse_adjacency(response: str, expected_ids: set[ArgumentId]) -> AdjacencyParse:
    """Extract the signed adjacency list from model output.

    Keys name targets, tuples name sources. Kind words are normalized
    ("supports" -> support); tuples with unknown ids, unknown kinds, or
    self-edges are rejected individually and reported, not fatal. Raises
    MissingAdjacency when no keyed-list structure is present at all, and
    EmptyAfterRejection when structure was present but nothing survived.
    """
    entries = list(_ADJACENCY_ENTRY.finditer(response))
    if not entries:
        raise MissingAdjacency("no adjacency-list structure found in response")

    accepted: set[Relation] = set()
    rejections: list[str] = []
    for entry in entries:
        target = int(entry.group(1))
        body = entry.group(2)
        if target not in expected_ids:
            rejections.append(f"unknown target id {target}")
            continue
        for tup in _ADJACENCY_TUPLE.finditer(body):
            source = int(tup.group(1))
            kind_word = tup.group(2).lower()
            if source not in expected_ids:
                rejections.append(f"unknown source id {source} (target {target})")
                continue
            kind = _KIND_WORDS.get(kind_word)
            if kind is None:
                rejections.append(f"unknown relation kind {kind_word!r} (target {target})")
                continue
            if source == target:
                rejections.append(f"self-edge on argument {target}")
                continue
            accepted.add(Relation(source, target, kind))

    if not accepted and rejections:
        raise EmptyAfterRejection(
            f"all {len(rejections)} adjacency tuples were rejected: "
            + "; ".join(rejections[:5])
        )
    return AdjacencyParse(edges=EdgeSet(frozenset(accepted)), rejections=tuple(rejections))
