"""quadrank: QuAD acceptability degrees over bipolar debate graphs, dialogue
flattening, rank/edge metrics, and an LLM ranking-evaluation harness."""

from .dialogue import Dialogue, OrderSample, flatten, sample_topological_orders
from .graph import (
    Argument,
    ArgumentId,
    DebateGraph,
    Relation,
    RelationKind,
    attackers,
    build_graph,
    pair_count,
    supporters,
    topological_order,
)
from .ingest import (
    CorpusSplit,
    CorpusStats,
    RawPair,
    corpus_stats,
    dump_graph_file,
    load_corpus,
    load_graph_file,
    parse_node_xml,
    split_corpus,
    write_node_xml,
)
from .metrics import (
    BucketCorrelation,
    EdgeSet,
    MacroRecord,
    PrfScore,
    QuartileBuckets,
    QuartileKey,
    edge_prf,
    kendall_tau,
    macro_average,
    quartile_correlations,
    quartile_split,
    rank_vector,
    restrict_ranking,
    spearman_rho,
)
from .semantics import (
    Ranking,
    ScoreMap,
    acceptability,
    aggregate_attack,
    aggregate_support,
    gold_ranking,
)

__version__ = "0.1.0"

__all__ = [
    "Argument",
    "ArgumentId",
    "BucketCorrelation",
    "CorpusSplit",
    "CorpusStats",
    "DebateGraph",
    "Dialogue",
    "EdgeSet",
    "MacroRecord",
    "OrderSample",
    "PrfScore",
    "QuartileBuckets",
    "QuartileKey",
    "Ranking",
    "RawPair",
    "Relation",
    "RelationKind",
    "ScoreMap",
    "acceptability",
    "aggregate_attack",
    "aggregate_support",
    "attackers",
    "build_graph",
    "corpus_stats",
    "dump_graph_file",
    "edge_prf",
    "flatten",
    "gold_ranking",
    "kendall_tau",
    "load_corpus",
    "load_graph_file",
    "macro_average",
    "pair_count",
    "parse_node_xml",
    "quartile_correlations",
    "quartile_split",
    "rank_vector",
    "restrict_ranking",
    "sample_topological_orders",
    "spearman_rho",
    "split_corpus",
    "supporters",
    "topological_order",
    "write_node_xml",
]
