"""Instruction strategies and prompt assembly.

Six strategies are supported: a bare ranking request (VANILLA), in-context
learning with one or three worked exemplars (ICL_ONE_SHOT / ICL_FEW_SHOT),
and chain-of-thought variants that ask the model to write out a signed
adjacency list before ranking (COT_ZERO_SHOT / COT_ONE_SHOT / COT_FEW_SHOT).

Prompts are assembled from editable text templates, one file per strategy,
carrying the placeholders [Arguments], [Exemplar_i], [Ranking_i],
[Adjacency_i], and [Reasoning_i]. The template set is content-hashed so every
run report pins the exact wording it was produced with.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from ..dialogue import Dialogue, flatten
from ..errors import ExemplarCountMismatch, UnresolvedPlaceholder
from ..graph import DebateGraph, RelationKind
from ..metrics import EdgeSet
from ..semantics import Ranking, acceptability, gold_ranking
from .parsing import render_adjacency, render_ranking


class PromptStrategy(Enum):
    VANILLA = "vanilla"
    ICL_ONE_SHOT = "icl_one_shot"
    ICL_FEW_SHOT = "icl_few_shot"
    COT_ZERO_SHOT = "cot_zero_shot"
    COT_ONE_SHOT = "cot_one_shot"
    COT_FEW_SHOT = "cot_few_shot"

    @property
    def exemplar_count(self) -> int:
        return _EXEMPLAR_COUNTS[self]

    @property
    def wants_adjacency(self) -> bool:
        """CoT strategies instruct the model to emit an adjacency list."""
        return self in (
            PromptStrategy.COT_ZERO_SHOT,
            PromptStrategy.COT_ONE_SHOT,
            PromptStrategy.COT_FEW_SHOT,
        )


_EXEMPLAR_COUNTS = {
    PromptStrategy.VANILLA: 0,
    PromptStrategy.ICL_ONE_SHOT: 1,
    PromptStrategy.ICL_FEW_SHOT: 3,
    PromptStrategy.COT_ZERO_SHOT: 0,
    PromptStrategy.COT_ONE_SHOT: 1,
    PromptStrategy.COT_FEW_SHOT: 3,
}


@dataclass(frozen=True)
class Exemplar:
    """A worked example embedded in ICL/CoT prompts."""

    dialogue: Dialogue
    ranking: Ranking
    adjacency: EdgeSet | None = None
    reasoning_text: str | None = None


@dataclass(frozen=True)
class TemplateSet:
    """One template string per strategy plus a hash over all of them."""

    templates: Mapping[PromptStrategy, str]
    content_hash: str

    @classmethod
    def from_mapping(cls, templates: Mapping[PromptStrategy, str]) -> "TemplateSet":
        digest = hashlib.sha256()
        for strategy in PromptStrategy:
            if strategy not in templates:
                raise ValueError(f"template set lacks strategy {strategy.value}")
            digest.update(strategy.value.encode())
            digest.update(b"\0")
            digest.update(templates[strategy].encode())
            digest.update(b"\0")
        return cls(templates=dict(templates), content_hash=digest.hexdigest())

    @classmethod
    def from_dir(cls, path: str | Path) -> "TemplateSet":
        path = Path(path)
        return cls.from_mapping(
            {s: (path / f"{s.value}.txt").read_text() for s in PromptStrategy}
        )

    @classmethod
    def default(cls) -> "TemplateSet":
        package = resources.files("quadrank") / "templates"
        return cls.from_mapping(
            {s: (package / f"{s.value}.txt").read_text() for s in PromptStrategy}
        )


_PLACEHOLDER = re.compile(r"\[([A-Za-z]+(?:_[0-9]+)?)\]")


def build_prompt(
    strategy: PromptStrategy,
    dialogue: Dialogue,
    exemplars: Sequence[Exemplar] = (),
    templates: TemplateSet | None = None,
) -> str:
    """Expand the strategy's template with the target dialogue and exemplars.

    The exemplar count must match the strategy exactly (0, 1, or 3). Unknown
    placeholders, out-of-range exemplar indices, and references to missing
    exemplar fields raise UnresolvedPlaceholder.
    """
    if templates is None:
        templates = TemplateSet.default()
    if len(exemplars) != strategy.exemplar_count:
        raise ExemplarCountMismatch(
            f"strategy {strategy.value} takes {strategy.exemplar_count} exemplar(s), "
            f"got {len(exemplars)}"
        )

    def dialogue_body(d: Dialogue) -> str:
        return "\n".join(line for _, line in d.lines)

    def substitute(match: re.Match) -> str:
        token = match.group(1)
        if token == "Arguments":
            return dialogue_body(dialogue)
        name, _, index_text = token.partition("_")
        if name in {"Exemplar", "Ranking", "Adjacency", "Reasoning"} and index_text.isdigit():
            index = int(index_text)
            if not (1 <= index <= len(exemplars)):
                raise UnresolvedPlaceholder(
                    f"[{token}] refers to exemplar {index}, but only "
                    f"{len(exemplars)} exemplar(s) were provided"
                )
            exemplar = exemplars[index - 1]
            if name == "Exemplar":
                return dialogue_body(exemplar.dialogue)
            if name == "Ranking":
                return render_ranking(exemplar.ranking)
            if name == "Adjacency":
                if exemplar.adjacency is None:
                    raise UnresolvedPlaceholder(
                        f"[{token}] needs an adjacency list, but exemplar {index} has none"
                    )
                return render_adjacency(exemplar.adjacency)
            if exemplar.reasoning_text is None:
                raise UnresolvedPlaceholder(
                    f"[{token}] needs reasoning text, but exemplar {index} has none"
                )
            return exemplar.reasoning_text
        raise UnresolvedPlaceholder(f"unknown placeholder [{token}]")

    return _PLACEHOLDER.sub(substitute, templates.templates[strategy])


def exemplar_from_graph(graph: DebateGraph, include_reasoning: bool = False) -> Exemplar:
    """Build a gold exemplar: chronological dialogue, gold ranking, gold
    adjacency, and (optionally) a generated reasoning narration."""
    scores = acceptability(graph)
    ranking = gold_ranking(scores)
    exemplar = Exemplar(
        dialogue=flatten(graph, graph.chronological_ids),
        ranking=ranking,
        adjacency=EdgeSet.from_graph(graph),
        reasoning_text=gold_reasoning(graph) if include_reasoning else None,
    )
    return exemplar


def gold_reasoning(graph: DebateGraph) -> str:
    """Deterministic narration of the graph's relations and their effect,
    used as the worked analysis inside CoT exemplars."""
    scores = acceptability(graph).scores

    def name_list(ids) -> str:
        names = [f"Argument {a}" for a in sorted(ids)]
        if len(names) == 1:
            return names[0]
        return ", ".join(names[:-1]) + " and " + names[-1]

    sentences = []
    for argument in graph.arguments:
        aid = argument.id
        att = graph.attackers_by_target[aid]
        sup = graph.supporters_by_target[aid]
        if not att and not sup:
            sentences.append(
                f"Argument {aid} is neither attacked nor supported, so it keeps its "
                "initial plausibility."
            )
        elif att and not sup:
            sentences.append(
                f"Argument {aid} is attacked by {name_list(att)}, which weakens it."
            )
        elif sup and not att:
            sentences.append(
                f"Argument {aid} is supported by {name_list(sup)}, which strengthens it."
            )
        else:
            sentences.append(
                f"Argument {aid} is attacked by {name_list(att)} and supported by "
                f"{name_list(sup)}, so the two effects are weighed against each other."
            )
    strongest = max(scores, key=lambda a: (scores[a], -a))
    sentences.append(
        f"Working through these effects from the leaves upward, Argument {strongest} "
        "comes out strongest, and the full ranking follows."
    )
    return " ".join(sentences)


def default_exemplar_names(graphs: Sequence[DebateGraph]) -> tuple[str, str, str]:
    """Pick three diverse exemplars from a corpus by relation mix:
    the most attack-heavy graph, the most balanced, and the most
    support-heavy (ties broken by corpus order). Returned in that order."""
    fractions: list[tuple[str, float]] = []
    for g in graphs:
        attacks = sum(1 for r in g.relations if r.kind is RelationKind.ATTACK)
        if g.relations:
            fractions.append((g.name, attacks / len(g.relations)))
    if len(fractions) < 3:
        raise ValueError(
            "default exemplar selection needs at least three graphs with relations"
        )

    chosen: list[str] = []

    def pick(score_of) -> str:
        best_name, _ = max(
            ((name, frac) for name, frac in fractions if name not in chosen),
            key=lambda item: score_of(item[1]),
        )
        chosen.append(best_name)
        return best_name

    attack_heavy = pick(lambda frac: frac)
    support_heavy = pick(lambda frac: 1.0 - frac)
    balanced = pick(lambda frac: -abs(frac - 0.5))
    return (attack_heavy, balanced, support_heavy)
