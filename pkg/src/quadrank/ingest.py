"""Corpus ingestion: entailment-pair XML, corpus stats, splits, and a plain
canonical graph-file format.

The XML schema is the textual-entailment pair layout used by debate corpora:

    <entailment-corpus>
      <pair id="17" entailment="YES" topic="SobrietyTest">
        <t id="2">responding argument text</t>
        <h id="1">claim argument text</h>
      </pair>
      ...
    </entailment-corpus>

Each pair becomes one relation with source = t, target = h; entailment YES
means SUPPORT and NO means ATTACK. One DebateGraph is built per distinct
topic. Argument texts are canonicalized (trimmed, internal whitespace
collapsed) before storage and comparison.
"""

from __future__ import annotations

import io
import os
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

from .errors import (
    ConflictingArgumentText,
    DuplicateExemplar,
    MalformedGraphFile,
    MalformedXml,
    UnknownEntailmentValue,
    UnknownGraphName,
)
from .graph import (
    Argument,
    ArgumentId,
    DebateGraph,
    Relation,
    RelationKind,
    build_graph,
)

_ENTAILMENT_TO_KIND = {"YES": RelationKind.SUPPORT, "NO": RelationKind.ATTACK}


@dataclass(frozen=True)
class RawPair:
    """One parsed pair element, ids already resolved to per-topic integers."""

    pair_id: str
    topic: str
    entailment_value: str
    t_id: ArgumentId
    h_id: ArgumentId
    t_text: str
    h_text: str

    @property
    def kind(self) -> RelationKind:
        return _ENTAILMENT_TO_KIND[self.entailment_value]


@dataclass(frozen=True)
class CorpusStats:
    graph_count: int
    node_count: int
    edge_count: int
    support_edges: int
    attack_edges: int
    per_graph_nodes: Mapping[str, int]
    mean_in_degree: float
    mean_out_degree: float


@dataclass(frozen=True)
class CorpusSplit:
    """Disjoint exemplar/evaluation partition of one corpus."""

    exemplars: tuple[DebateGraph, ...]
    evaluation: tuple[DebateGraph, ...]


def canonical_text(text: str) -> str:
    """Trim and collapse internal whitespace runs to single spaces."""
    return re.sub(r"\s+", " ", text).strip()


def _read_bytes(source: bytes | str | os.PathLike | IO[bytes]) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, str):
        # A string is XML text if it looks like markup, else a path.
        if source.lstrip().startswith("<"):
            return source.encode("utf-8")
        return Path(source).read_bytes()
    if isinstance(source, os.PathLike):
        return Path(source).read_bytes()
    data = source.read()
    return data.encode("utf-8") if isinstance(data, str) else data


def parse_node_xml(source: bytes | str | os.PathLike | IO[bytes]) -> list[DebateGraph]:
    """Parse entailment-pair XML into one validated DebateGraph per topic.

    Topics keep document order. Within a topic, arguments are deduplicated by
    id; the first occurrence fixes the text and later occurrences must agree
    after canonicalization. Chronology is ascending numeric id; if any id in
    a topic is not a positive integer, all of the topic's arguments are
    renumbered 1..n by first appearance instead.
    """
    data = _read_bytes(source)
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, column = exc.position
        raise MalformedXml(
            f"not well-formed XML (line {line}, column {column}): {exc.msg if hasattr(exc, 'msg') else exc}"
        ) from None

    by_topic: dict[str, list[tuple[str, str, str, str, str, str]]] = {}
    for position, pair in enumerate(root.iter("pair"), start=1):
        pair_id = pair.get("id")
        topic = pair.get("topic")
        entailment = pair.get("entailment")
        where = f"pair #{position}" + (f" (id={pair_id})" if pair_id else "")
        if pair_id is None or topic is None or entailment is None:
            raise MalformedXml(f"{where} lacks an id, topic, or entailment attribute")
        value = entailment.strip().upper()
        if value not in _ENTAILMENT_TO_KIND:
            raise UnknownEntailmentValue(
                f"{where} has entailment={entailment!r}; expected YES or NO"
            )
        t_elem = pair.find("t")
        h_elem = pair.find("h")
        if t_elem is None or h_elem is None:
            raise MalformedXml(f"{where} lacks a <t> or <h> child")
        t_id, h_id = t_elem.get("id"), h_elem.get("id")
        if t_id is None or h_id is None:
            raise MalformedXml(f"{where} has a <t> or <h> element without an id")
        t_text = canonical_text(t_elem.text or "")
        h_text = canonical_text(h_elem.text or "")
        if not t_text or not h_text:
            raise MalformedXml(f"{where} has an empty argument text")
        by_topic.setdefault(topic, []).append(
            (pair_id, value, t_id, h_id, t_text, h_text)
        )

    graphs = []
    for topic, entries in by_topic.items():
        graphs.append(_build_topic_graph(topic, entries))
    return graphs


def _build_topic_graph(
    topic: str, entries: list[tuple[str, str, str, str, str, str]]
) -> DebateGraph:
    # Resolve raw id strings: numeric everywhere, or renumber by appearance.
    appearance: list[str] = []
    for _, _, t_id, h_id, _, _ in entries:
        for raw in (t_id, h_id):
            if raw not in appearance:
                appearance.append(raw)

    def as_positive_int(raw: str) -> int | None:
        try:
            value = int(raw.strip())
        except ValueError:
            return None
        return value if value >= 1 else None

    numeric = {raw: as_positive_int(raw) for raw in appearance}
    if all(v is not None for v in numeric.values()) and len(set(numeric.values())) == len(numeric):
        resolve = {raw: numeric[raw] for raw in appearance}
    else:
        resolve = {raw: i for i, raw in enumerate(appearance, start=1)}

    texts: dict[ArgumentId, str] = {}
    pairs: list[RawPair] = []
    for pair_id, value, t_raw, h_raw, t_text, h_text in entries:
        t_id, h_id = resolve[t_raw], resolve[h_raw]
        for aid, text in ((t_id, t_text), (h_id, h_text)):
            if aid not in texts:
                texts[aid] = text
            elif texts[aid] != text:
                raise ConflictingArgumentText(
                    f"argument {aid} of topic {topic!r} has conflicting texts: "
                    f"{texts[aid]!r} vs {text!r}"
                )
        pairs.append(RawPair(pair_id, topic, value, t_id, h_id, t_text, h_text))

    args = [
        Argument(id=aid, text=texts[aid], chronological_index=index)
        for index, aid in enumerate(sorted(texts))
    ]
    relations = [Relation(p.t_id, p.h_id, p.kind) for p in pairs]
    return build_graph(args, relations, name=topic)


def write_node_xml(graphs: Sequence[DebateGraph]) -> bytes:
    """Serialize graphs back to the entailment-pair schema.

    The pair schema can only mention arguments through relations, so every
    argument must occur in at least one relation (always true of parsed
    corpora).
    """
    root = ET.Element("entailment-corpus")
    pair_id = 0
    for g in graphs:
        touched = {r.source for r in g.relations} | {r.target for r in g.relations}
        missing = sorted(g.argument_ids - touched)
        if missing:
            raise ValueError(
                f"graph {g.name!r}: arguments {missing} occur in no relation and "
                "cannot be expressed in pair XML"
            )
        for rel in g.relations:
            pair_id += 1
            entailment = "YES" if rel.kind is RelationKind.SUPPORT else "NO"
            pair = ET.SubElement(
                root,
                "pair",
                id=str(pair_id),
                entailment=entailment,
                topic=g.name,
            )
            t = ET.SubElement(pair, "t", id=str(rel.source))
            t.text = g.by_id[rel.source].text
            h = ET.SubElement(pair, "h", id=str(rel.target))
            h.text = g.by_id[rel.target].text
    tree = ET.ElementTree(root)
    ET.indent(tree)
    buffer = io.BytesIO()
    tree.write(buffer, encoding="utf-8", xml_declaration=True)
    return buffer.getvalue()


def corpus_stats(graphs: Sequence[DebateGraph]) -> CorpusStats:
    """Aggregate counts over a list of graphs; degree means are corpus-wide."""
    nodes = sum(len(g) for g in graphs)
    support = sum(1 for g in graphs for r in g.relations if r.kind is RelationKind.SUPPORT)
    attack = sum(1 for g in graphs for r in g.relations if r.kind is RelationKind.ATTACK)
    edges = support + attack
    mean_degree = edges / nodes if nodes else 0.0
    return CorpusStats(
        graph_count=len(graphs),
        node_count=nodes,
        edge_count=edges,
        support_edges=support,
        attack_edges=attack,
        per_graph_nodes={g.name: len(g) for g in graphs},
        # every edge contributes one in- and one out-endpoint, so the corpus
        # means coincide even though the distributions differ
        mean_in_degree=mean_degree,
        mean_out_degree=mean_degree,
    )


def split_corpus(
    graphs: Sequence[DebateGraph], exemplar_names: Sequence[str]
) -> CorpusSplit:
    """Partition a corpus into named exemplars and the remaining evaluation
    graphs (corpus order preserved on the evaluation side)."""
    by_name = {g.name: g for g in graphs}
    seen: set[str] = set()
    exemplars = []
    for name in exemplar_names:
        if name not in by_name:
            raise UnknownGraphName(f"no graph named {name!r} in the corpus")
        if name in seen:
            raise DuplicateExemplar(f"graph {name!r} listed as exemplar twice")
        seen.add(name)
        exemplars.append(by_name[name])
    evaluation = tuple(g for g in graphs if g.name not in seen)
    return CorpusSplit(exemplars=tuple(exemplars), evaluation=evaluation)


# ---------------------------------------------------------------------------
# canonical graph file: a tab-separated plain-text corpus representation that,
# unlike the pair XML, can express isolated arguments and explicit weights.
#
#   # quadrank corpus v1
#   graph <TAB> <name>
#   arg   <TAB> <id> <TAB> <chronological_index> <TAB> <weight> <TAB> <text>
#   rel   <TAB> <source id> <TAB> attack|support <TAB> <target id>

GRAPH_FILE_HEADER = "# quadrank corpus v1"


def dump_graph_file(graphs: Sequence[DebateGraph]) -> str:
    lines = [GRAPH_FILE_HEADER]
    for g in graphs:
        lines.append(f"graph\t{g.name}")
        for a in g.arguments:
            text = canonical_text(a.text)
            lines.append(
                f"arg\t{a.id}\t{a.chronological_index}\t{g.base_weights[a.id]!r}\t{text}"
            )
        for r in g.relations:
            lines.append(f"rel\t{r.source}\t{r.kind.value}\t{r.target}")
    return "\n".join(lines) + "\n"


def load_graph_file(text: str) -> list[DebateGraph]:
    stripped = text.lstrip()
    if not stripped.startswith("# quadrank corpus"):
        raise MalformedGraphFile(
            f"first line must be the header {GRAPH_FILE_HEADER!r}"
        )
    graphs: list[DebateGraph] = []
    name: str | None = None
    args: list[Argument] = []
    rels: list[Relation] = []
    weights: dict[ArgumentId, float] = {}

    def flush():
        if name is not None:
            graphs.append(build_graph(args, rels, weights, name=name))

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        record = fields[0]
        try:
            if record == "graph":
                (_, graph_name,) = fields
                flush()
                name, args, rels, weights = graph_name, [], [], {}
            elif record == "arg":
                _, aid, chrono, weight, body = fields
                args.append(Argument(int(aid), body, int(chrono)))
                weights[int(aid)] = float(weight)
            elif record == "rel":
                _, src, kind, tgt = fields
                rels.append(Relation(int(src), int(tgt), RelationKind(kind)))
            else:
                raise ValueError(f"unknown record type {record!r}")
        except (ValueError, TypeError) as exc:
            raise MalformedGraphFile(f"line {lineno}: {exc}") from None
        if record in {"arg", "rel"} and name is None:
            raise MalformedGraphFile(f"line {lineno}: {record} record before any graph")
    flush()
    return graphs


def load_corpus(path: str | os.PathLike) -> list[DebateGraph]:
    """Load a corpus from either pair XML or a canonical graph file, sniffing
    the format from the first non-blank byte."""
    raw = Path(path).read_bytes()
    if raw.lstrip().startswith(b"<"):
        return parse_node_xml(raw)
    return load_graph_file(raw.decode("utf-8"))
