#!/usr/bin/env python3
"""Generate the bundled demonstration corpora under src/quadrank/data/.

Three entailment-pair XML files are produced, all fully deterministic
(fixed string seeds, no environment dependence):

  twelve_angry_men.xml  three jury-deliberation segments (83 arguments)
  debatepedia.xml       22 public-policy debates (282 arguments)
  sobrietytest.xml      the single SobrietyTest debate on its own

Every graph is a tree rooted at argument 1 (each later argument addresses
exactly one earlier one), matching the single-target texture of debate
threads. The script re-parses its own output and asserts every structural
count, the SobrietyTest acceptability scores, the default exemplar
selection, and the evaluation-pair total before writing anything.
"""

from __future__ import annotations

import random
import sys
from collections import Counter
from pathlib import Path

PKG_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PKG_ROOT / "src"))

from quadrank.graph import (  # noqa: E402
    Argument,
    DebateGraph,
    Relation,
    RelationKind,
    build_graph,
    pair_count,
)
from quadrank.harness.prompts import default_exemplar_names  # noqa: E402
from quadrank.ingest import corpus_stats, parse_node_xml, write_node_xml  # noqa: E402
from quadrank.metrics import whitespace_tokens  # noqa: E402
from quadrank.semantics import acceptability, gold_ranking  # noqa: E402

DATA_DIR = PKG_ROOT / "src" / "quadrank" / "data"

# Words that must never appear in generated argument text: the dialogue and
# response parsers treat them as markup, and keeping them out of the prose
# means any occurrence in a transcript is structural, never accidental.
BANNED_WORDS = ("attack", "support", "argument", "ranking")

# (node_count, support_count) per topic; edge count is node_count - 1.
TWELVE_ANGRY_MEN = {
    "12AngryMen-Act1": (39, 12),
    "12AngryMen-Act2": (33, 10),
    "12AngryMen-Act3": (11, 3),
}

DEBATEPEDIA_EXEMPLARS = {
    "ZoosBan": (14, 2),
    "UrbanBikeLanes": (13, 10),
    "VideoGameRegulation": (13, 6),
}

DEBATEPEDIA_EVAL = {
    "AirportSecurityScanners": (26, 14),
    "SchoolUniforms": (22, 12),
    "CongestionPricing": (18, 9),
    "CurfewLaws": (18, 10),
    "DaylightSavingTime": (16, 8),
    "Ecotourism": (15, 8),
    "FlagDesecrationBan": (13, 7),
    "GeneticallyModifiedCrops": (13, 5),
    "HomeworkBan": (12, 6),
    "InternetVoting": (12, 5),
    "JunkFoodTax": (11, 6),
    "LoweringVotingAge": (10, 5),
    "MandatoryRecycling": (10, 4),
    "NuclearEnergyExpansion": (9, 5),
    "OpenBordersPolicy": (8, 4),
    "PlasticBagBan": (8, 3),
    "WolfReintroduction": (7, 4),
    "YearRoundSchooling": (6, 3),
}

TOPIC_PHRASES = {
    "12AngryMen-Act1": [
        "the defendant's guilt", "the murder weapon", "the old man's testimony",
        "the boy's alibi", "reasonable doubt", "the prosecution's story",
    ],
    "12AngryMen-Act2": [
        "the knife wound's angle", "the el train noise", "the woman across the street",
        "the timeline of that night", "the jurors' own prejudices", "the boy's record",
    ],
    "12AngryMen-Act3": [
        "the eyewitness's glasses", "the final vote", "the boy's fate",
        "the lingering doubts", "the verdict", "the last holdout",
    ],
    "AirportSecurityScanners": [
        "full-body scanners at airports", "passenger screening lines",
        "millimeter-wave imaging", "checkpoint delays", "traveler privacy",
        "detection of hidden items",
    ],
    "CongestionPricing": [
        "congestion pricing downtown", "peak-hour road tolls", "rush-hour traffic volumes",
        "transit funding", "commuter costs", "delivery schedules",
    ],
    "CurfewLaws": [
        "teen curfew laws", "late-night restrictions", "juvenile crime rates",
        "parental authority", "the liberties of minors", "police discretion",
    ],
    "DaylightSavingTime": [
        "daylight saving time", "the twice-yearly clock change", "evening daylight",
        "sleep disruption", "household energy use", "morning commutes in the dark",
    ],
    "Ecotourism": [
        "ecotourism programs", "fragile wildlife habitats", "village economies",
        "conservation funding", "visitor footprints", "guided reserve tours",
    ],
    "FlagDesecrationBan": [
        "a flag desecration ban", "burning the national flag", "symbolic protest",
        "free expression", "national symbols", "veterans' sensibilities",
    ],
    "GeneticallyModifiedCrops": [
        "genetically modified crops", "engineered seed varieties", "per-acre yields",
        "pesticide use", "food safety testing", "seed licensing fees",
    ],
    "HomeworkBan": [
        "a ban on homework", "after-school assignments", "family time in the evening",
        "independent study habits", "classroom instruction hours", "grading workloads",
    ],
    "InternetVoting": [
        "internet voting", "online ballots", "election security", "voter turnout",
        "verifiable audit trails", "registration databases",
    ],
    "JunkFoodTax": [
        "a junk food tax", "levies on sugary snacks", "obesity rates",
        "grocery prices", "public health budgets", "soda consumption",
    ],
    "LoweringVotingAge": [
        "lowering the voting age", "sixteen-year-old voters", "civic education",
        "youth turnout", "political maturity", "school-based registration",
    ],
    "MandatoryRecycling": [
        "mandatory recycling", "curbside sorting rules", "landfill volumes",
        "collection costs", "household compliance", "contaminated bins",
    ],
    "NuclearEnergyExpansion": [
        "nuclear energy expansion", "new reactor construction", "carbon-free baseload power",
        "radioactive waste storage", "plant safety records", "construction overruns",
    ],
    "OpenBordersPolicy": [
        "an open borders policy", "unrestricted migration", "labor markets",
        "enforcement budgets", "cultural exchange", "wage pressures",
    ],
    "PlasticBagBan": [
        "a plastic bag ban", "single-use carryout bags", "marine litter",
        "reusable totes", "checkout fees", "thicker replacement bags",
    ],
    "SchoolUniforms": [
        "school uniforms", "a mandatory dress code", "peer pressure over clothing",
        "student self-expression", "uniform costs for families", "morning routines",
    ],
    "UrbanBikeLanes": [
        "protected bike lanes", "street redesigns", "cyclist safety",
        "curbside parking removal", "downtown traffic flow", "delivery loading zones",
    ],
    "VideoGameRegulation": [
        "video game regulation", "age ratings for games", "violent game content",
        "children's screen time", "parental controls", "in-game purchases",
    ],
    "WolfReintroduction": [
        "wolf reintroduction", "predator recovery programs", "livestock losses",
        "elk overgrazing", "ecosystem balance", "ranchers' compensation claims",
    ],
    "YearRoundSchooling": [
        "year-round schooling", "a balanced school calendar", "summer learning loss",
        "teacher burnout", "family vacation planning", "building cooling costs",
    ],
    "ZoosBan": [
        "a ban on zoos", "keeping animals in enclosures", "captive breeding programs",
        "animal welfare standards", "wildlife education", "sanctuary alternatives",
    ],
}

OPENERS = [
    "Honestly,", "To my mind,", "On balance,", "Think about it:",
    "Let us be clear:", "From where I sit,", "If we are candid,",
    "Looking at the evidence,", "Setting rhetoric aside,", "Time and again,",
    "Say what you like,", "For all the noise,",
]

CLAUSES = [
    "the record on {p} speaks for itself,",
    "{p} matters far more than {q} here,",
    "nobody seriously disputes the basic facts about {p},",
    "we keep coming back to {p} whenever {q} is raised,",
    "the numbers behind {p} are hard to ignore,",
    "what happened with {q} shows exactly where {p} leads,",
    "any honest look at {p} must reckon with {q},",
    "experience with {p} elsewhere tells the same story,",
    "the costs tied to {p} dwarf the benefits claimed for {q},",
    "skeptics of {p} badly underestimate {q},",
    "every study of {p} that I have seen points one way,",
    "you cannot talk about {p} without facing {q},",
    "people who live with {p} daily see through the slogans,",
    "the burden of proof on {p} has never been met,",
    "{q} is the quiet price we pay for {p},",
]

# SobrietyTest is written by hand so its acceptability scores are a worked
# example: sigma(3) = 0.75, sigma(5) = sigma(7) = 0.25, sigma(1) = 0.4921875.
SOBRIETY_TEXTS = {
    1: "Roadside sobriety tests are a fair and reliable way for officers to "
       "decide who should not be driving.",
    2: "Standardized walk-and-turn checks were validated in controlled studies.",
    3: "Nervous but sober drivers fail these checks all the time, especially "
       "on uneven pavement at night.",
    4: "Clinic trials over three separate decades found that roughly one sober "
       "adult in three cannot hold the one-leg stand for thirty seconds, even "
       "after a full demonstration and two practice tries.",
    5: "Officers follow detailed scoring rubrics, so personal hunches play a "
       "smaller role than critics assume.",
    6: "Dashcam reviews show officers skipping half the rubric steps once "
       "they have decided someone is impaired.",
    7: "A roadside check is quick and lets obviously impaired drivers be "
       "taken off the road before a crash.",
    8: "Quickness is no virtue when the result decides an arrest; a breath "
       "reading takes scarcely longer.",
}
SOBRIETY_RELATIONS = [
    (2, 1, RelationKind.SUPPORT),
    (3, 1, RelationKind.ATTACK),
    (4, 3, RelationKind.SUPPORT),
    (5, 1, RelationKind.SUPPORT),
    (6, 5, RelationKind.ATTACK),
    (7, 1, RelationKind.SUPPORT),
    (8, 7, RelationKind.ATTACK),
]

IN_DEGREE_CAP = 11
ROOT_BIAS = 3.0


def make_text(rng: random.Random, phrases: list[str], target_tokens: int) -> str:
    words = rng.choice(OPENERS).split()
    while len(words) < target_tokens:
        clause = rng.choice(CLAUSES).format(p=rng.choice(phrases), q=rng.choice(phrases))
        words.extend(clause.split())
    text = " ".join(words[:target_tokens]).rstrip(",;:")
    if not text.endswith((".", "!", "?")):
        text += "."
    return text


def make_tree(rng: random.Random, n: int) -> dict[int, int]:
    """Parent id for each argument 2..n, each addressing an earlier argument."""
    while True:
        in_degree: Counter[int] = Counter()
        parents: dict[int, int] = {}
        for i in range(2, n + 1):
            candidates = [j for j in range(1, i) if in_degree[j] < IN_DEGREE_CAP]
            weights = [ROOT_BIAS if j == 1 else 1.0 for j in candidates]
            parent = rng.choices(candidates, weights=weights, k=1)[0]
            parents[i] = parent
            in_degree[parent] += 1
        if n >= 4 and max(in_degree.values()) < 2:
            continue  # want at least one point of converging replies
        if n >= 4 and all(p == 1 for p in parents.values()):
            continue  # want at least one reply-to-a-reply
        return parents


def build_topic(topic: str, n: int, n_support: int) -> DebateGraph:
    if topic == "SobrietyTest":
        args = [
            Argument(i, SOBRIETY_TEXTS[i], chronological_index=i - 1)
            for i in range(1, 9)
        ]
        rels = [Relation(s, t, k) for s, t, k in SOBRIETY_RELATIONS]
        return build_graph(args, rels, name=topic)

    rng = random.Random(f"quadrank-fixtures/{topic}")
    phrases = TOPIC_PHRASES[topic]
    parents = make_tree(rng, n)
    sources = sorted(parents)
    while True:
        support_sources = set(rng.sample(sources, n_support))
        rels = [
            Relation(
                i,
                parents[i],
                RelationKind.SUPPORT if i in support_sources else RelationKind.ATTACK,
            )
            for i in sources
        ]
        texts: dict[int, str] = {}
        for i in range(1, n + 1):
            while True:
                candidate = make_text(rng, phrases, rng.randint(5, 45))
                if candidate not in texts.values():
                    texts[i] = candidate
                    break
        args = [Argument(i, texts[i], chronological_index=i - 1) for i in range(1, n + 1)]
        graph = build_graph(args, rels, name=topic)
        ranking = gold_ranking(acceptability(graph))
        if len(ranking.tie_groups) >= 2:
            return graph  # scores must discriminate at least two strength levels


def check_graph(graph: DebateGraph, n: int, n_support: int) -> None:
    assert len(graph) == n, graph.name
    assert len(graph.relations) == n - 1, graph.name
    supports = sum(1 for r in graph.relations if r.kind is RelationKind.SUPPORT)
    assert supports == n_support, (graph.name, supports, n_support)
    out_degree = Counter(r.source for r in graph.relations)
    assert all(c == 1 for c in out_degree.values()), graph.name
    in_degree = Counter(r.target for r in graph.relations)
    assert max(in_degree.values()) <= IN_DEGREE_CAP, graph.name
    if n >= 4:
        assert max(in_degree.values()) >= 2, graph.name
        assert any(p != 1 for p in (r.target for r in graph.relations)), graph.name
    blob = " ".join(a.text for a in graph.arguments).lower()
    for word in BANNED_WORDS:
        assert word not in blob, (graph.name, word)
    token_counts = [whitespace_tokens(a.text) for a in graph.arguments]
    if n >= 6:
        assert max(token_counts) - min(token_counts) >= 8, graph.name
    assert len(gold_ranking(acceptability(graph)).tie_groups) >= 2, graph.name


def main() -> None:
    angry = [build_topic(t, n, s) for t, (n, s) in TWELVE_ANGRY_MEN.items()]
    debate_spec = dict(DEBATEPEDIA_EXEMPLARS)
    debate_spec.update(DEBATEPEDIA_EVAL)
    debate_spec["SobrietyTest"] = (8, 4)
    debate = [build_topic(t, n, s) for t, (n, s) in sorted(debate_spec.items())]
    sobriety = [g for g in debate if g.name == "SobrietyTest"]

    for graphs, spec in ((angry, TWELVE_ANGRY_MEN), (debate, debate_spec)):
        for g in graphs:
            check_graph(g, *spec[g.name])

    angry_stats = corpus_stats(angry)
    assert (angry_stats.graph_count, angry_stats.node_count, angry_stats.edge_count) == (3, 83, 80)
    assert (angry_stats.support_edges, angry_stats.attack_edges) == (25, 55)
    debate_stats = corpus_stats(debate)
    assert (debate_stats.graph_count, debate_stats.node_count, debate_stats.edge_count) == (22, 282, 260)
    assert (debate_stats.support_edges, debate_stats.attack_edges) == (140, 120)
    assert round(angry_stats.mean_in_degree, 2) == 0.96
    assert round(debate_stats.mean_in_degree, 2) == 0.92

    eval_graphs = [g for g in debate if g.name not in DEBATEPEDIA_EXEMPLARS]
    assert len(eval_graphs) == 19
    assert sum(len(g) for g in eval_graphs) == 242
    assert pair_count(angry) == 1324
    assert pair_count(eval_graphs) == 1676
    assert pair_count(angry + eval_graphs) == 3000

    assert default_exemplar_names(debate) == (
        "ZoosBan", "VideoGameRegulation", "UrbanBikeLanes",
    )

    scores = acceptability(sobriety[0]).scores
    assert scores == {1: 0.4921875, 2: 0.5, 3: 0.75, 4: 0.5, 5: 0.25, 6: 0.5, 7: 0.25, 8: 0.5}
    assert gold_ranking(acceptability(sobriety[0])).tie_groups == (
        (3,), (2, 4, 6, 8), (1,), (5, 7),
    )

    outputs = {
        "twelve_angry_men.xml": angry,
        "debatepedia.xml": debate,
        "sobrietytest.xml": sobriety,
    }
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    for filename, graphs in outputs.items():
        payload = write_node_xml(graphs)
        reparsed = parse_node_xml(payload)
        assert reparsed == list(graphs), f"round trip failed for {filename}"
        (DATA_DIR / filename).write_bytes(payload + b"\n")
        print(f"wrote {DATA_DIR / filename} ({len(graphs)} graphs, {len(payload)} bytes)")


if __name__ == "__main__":
    main()
