"""Evaluation runs: prompt each evaluation graph, parse the responses, score
them against the gold standard, and aggregate into a run report.

A run produces one record per (graph, presentation order, repetition). Parse
failures get one re-prompt retry; a record that still fails is marked as a
format violation, its metrics become undefined markers excluded from the
averages, and it counts toward the violation rate. Backend failures abort the
run with whatever records exist and the report flagged incomplete.
"""

from __future__ import annotations

import csv
import hashlib
import json
import statistics
from concurrent.futures import FIRST_EXCEPTION, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from ..dialogue import flatten, sample_topological_orders
from ..errors import PARSE_FAILURES, BackendError, ExemplarCountMismatch, HarnessError, OutputExists
from ..graph import DebateGraph
from ..ingest import CorpusSplit
from ..metrics import EdgeSet, edge_prf, kendall_tau, macro_average, spearman_rho
from ..semantics import Ranking, acceptability, gold_ranking
from ..errors import AllUndefined
from .backends import Backend, GenerationParams
from .parsing import parse_adjacency, parse_ranking
from .prompts import Exemplar, PromptStrategy, TemplateSet, build_prompt, exemplar_from_graph

RECORD_CSV_COLUMNS = [
    "graph",
    "strategy",
    "repetition",
    "order_index",
    "ordering",
    "rho",
    "tau",
    "precision",
    "recall",
    "f1",
    "format_violation",
    "retried",
    "latency_s",
]

AGGREGATE_CSV_COLUMNS = [
    "scope",
    "n_records",
    "rho",
    "rho_excluded",
    "tau",
    "tau_excluded",
    "precision",
    "precision_excluded",
    "recall",
    "recall_excluded",
    "f1",
    "f1_excluded",
]


@dataclass(frozen=True)
class ModelResponse:
    """One parsed completion."""

    raw_text: str
    parsed_ranking: Ranking | None
    parsed_adjacency: EdgeSet | None
    format_violation: bool
    latency: float
    token_usage: dict | None = None


@dataclass(frozen=True)
class EvalRecord:
    """Scores for one (graph, order, repetition) cell."""

    graph_name: str
    repetition: int
    order_index: int | None
    ordering_label: str
    metrics: dict[str, float | None]
    format_violation: bool
    retried: bool
    latency: float
    predicted_groups: tuple[tuple[int, ...], ...] | None

    def to_json_dict(self) -> dict:
        return {
            "graph": self.graph_name,
            "repetition": self.repetition,
            "order_index": self.order_index,
            "ordering": self.ordering_label,
            "metrics": dict(self.metrics),
            "format_violation": self.format_violation,
            "retried": self.retried,
            "latency": self.latency,
            "predicted": [list(g) for g in self.predicted_groups]
            if self.predicted_groups is not None
            else None,
        }


@dataclass
class RunReport:
    """Everything one evaluation run produced, serializable to JSON and CSV."""

    corpus_id: str
    strategy: PromptStrategy
    model_id: str
    seed: int
    params: GenerationParams
    template_hash: str
    ordering_mode: str
    records: list[EvalRecord]
    per_graph: dict[str, dict]
    macro: dict
    pooled: dict
    format_violation_rate: float
    incomplete: bool
    order_counts: dict[str, int] | None = None
    robustness: dict | None = None
    created_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    def to_json_dict(self) -> dict:
        return {
            "created_at": self.created_at,
            "corpus_id": self.corpus_id,
            "strategy": self.strategy.value,
            "model_id": self.model_id,
            "seed": self.seed,
            "params": {
                "temperature": self.params.temperature,
                "repetitions": self.params.repetitions,
                "max_output_tokens": self.params.max_output_tokens,
                "request_timeout": self.params.request_timeout,
                "retry_limit": self.params.retry_limit,
            },
            "template_hash": self.template_hash,
            "ordering_mode": self.ordering_mode,
            "incomplete": self.incomplete,
            "format_violation_rate": self.format_violation_rate,
            "records": [r.to_json_dict() for r in self.records],
            "order_counts": self.order_counts,
            "aggregates": {
                "per_graph": self.per_graph,
                "macro": self.macro,
                "pooled": self.pooled,
                "robustness": self.robustness,
            },
        }


def derive_seed(seed: int, *labels: str) -> int:
    """Stable per-scope seed derivation (independent of Python's hash)."""
    material = ":".join([str(seed), *labels]).encode("utf-8")
    return int.from_bytes(hashlib.sha256(material).digest()[:8], "big")


@dataclass(frozen=True)
class _Cell:
    graph: DebateGraph
    prompt: str
    repetition: int
    order_index: int | None
    ordering_label: str
    gold_ranking: Ranking
    gold_edges: EdgeSet


def _metric_keys(strategy: PromptStrategy) -> list[str]:
    keys = ["rho", "tau"]
    if strategy.wants_adjacency:
        keys += ["precision", "recall", "f1"]
    return keys


def _evaluate_cell(
    backend: Backend,
    params: GenerationParams,
    strategy: PromptStrategy,
    cell: _Cell,
) -> EvalRecord:
    ids = set(cell.graph.argument_ids)
    tag = f"{cell.graph.name}|{cell.ordering_label}|rep{cell.repetition}"

    def attempt(attempt_tag: str):
        completion = backend.complete(cell.prompt, params, attempt_tag)
        ranking = parse_ranking(completion.text, ids)
        adjacency = (
            parse_adjacency(completion.text, ids).edges
            if strategy.wants_adjacency
            else None
        )
        return completion, ranking, adjacency

    retried = False
    latency = 0.0
    try:
        completion, ranking, adjacency = attempt(tag)
        latency = completion.latency
    except PARSE_FAILURES:
        retried = True
        try:
            completion, ranking, adjacency = attempt(tag + "|retry")
            latency += completion.latency
        except PARSE_FAILURES:
            metrics: dict[str, float | None] = {k: None for k in _metric_keys(strategy)}
            return EvalRecord(
                graph_name=cell.graph.name,
                repetition=cell.repetition,
                order_index=cell.order_index,
                ordering_label=cell.ordering_label,
                metrics=metrics,
                format_violation=True,
                retried=True,
                latency=latency,
                predicted_groups=None,
            )

    metrics = {
        "rho": spearman_rho(cell.gold_ranking, ranking),
        "tau": kendall_tau(cell.gold_ranking, ranking),
    }
    if strategy.wants_adjacency:
        prf = edge_prf(cell.gold_edges, adjacency)
        metrics.update(precision=prf.precision, recall=prf.recall, f1=prf.f1)
    return EvalRecord(
        graph_name=cell.graph.name,
        repetition=cell.repetition,
        order_index=cell.order_index,
        ordering_label=cell.ordering_label,
        metrics=metrics,
        format_violation=False,
        retried=retried,
        latency=latency,
        predicted_groups=ranking.tie_groups,
    )


def _run_cells(
    backend: Backend,
    params: GenerationParams,
    strategy: PromptStrategy,
    cells: list[_Cell],
    parallelism: int,
) -> tuple[list[EvalRecord], bool]:
    """Evaluate cells, preserving cell order in the result; on a backend
    failure return what finished and flag the run incomplete."""
    if parallelism <= 1:
        records = []
        for cell in cells:
            try:
                records.append(_evaluate_cell(backend, params, strategy, cell))
            except BackendError:
                return records, True
        return records, False

    results: dict[int, EvalRecord] = {}
    incomplete = False
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = {
            pool.submit(_evaluate_cell, backend, params, strategy, cell): index
            for index, cell in enumerate(cells)
        }
        done, not_done = wait(futures, return_when=FIRST_EXCEPTION)
        for future in done:
            try:
                results[futures[future]] = future.result()
            except BackendError:
                incomplete = True
        if not_done:
            incomplete = True
            for future in not_done:
                future.cancel()
    records = [results[i] for i in sorted(results)]
    return records, incomplete


def _safe_macro(dicts: Sequence[dict], keys: Sequence[str]) -> dict:
    try:
        aggregated = macro_average(dicts)
        return {
            "means": dict(aggregated.means),
            "excluded": dict(aggregated.excluded),
            "n": aggregated.record_count,
        }
    except AllUndefined:
        return {
            "means": {k: None for k in keys},
            "excluded": {k: len(dicts) for k in keys},
            "n": len(dicts),
        }


def _aggregate(
    records: list[EvalRecord],
    graph_order: Sequence[str],
    keys: Sequence[str],
) -> tuple[dict[str, dict], dict, dict]:
    """Per-graph means over repetitions, macro over graphs, and the pooled
    mean over all records (both averaging orders reported)."""
    per_graph: dict[str, dict] = {}
    graph_means: list[dict] = []
    for name in graph_order:
        graph_records = [r.metrics for r in records if r.graph_name == name]
        if not graph_records:
            continue
        summary = _safe_macro(graph_records, keys)
        per_graph[name] = summary
        graph_means.append(summary["means"])
    macro = _safe_macro(graph_means, keys) if graph_means else {
        "means": {k: None for k in keys},
        "excluded": {k: 0 for k in keys},
        "n": 0,
    }
    pooled = _safe_macro([r.metrics for r in records], keys) if records else {
        "means": {k: None for k in keys},
        "excluded": {k: 0 for k in keys},
        "n": 0,
    }
    return per_graph, macro, pooled


def _violation_rate(records: list[EvalRecord]) -> float:
    if not records:
        return 0.0
    return sum(1 for r in records if r.format_violation) / len(records)


def _gold(graph: DebateGraph) -> tuple[Ranking, EdgeSet]:
    return gold_ranking(acceptability(graph)), EdgeSet.from_graph(graph)


def _build_exemplars(
    split: CorpusSplit, strategy: PromptStrategy
) -> list[Exemplar]:
    needed = strategy.exemplar_count
    if len(split.exemplars) < needed:
        raise ExemplarCountMismatch(
            f"strategy {strategy.value} needs {needed} exemplar(s); the split "
            f"provides {len(split.exemplars)}"
        )
    return [
        exemplar_from_graph(g, include_reasoning=strategy.wants_adjacency)
        for g in split.exemplars[:needed]
    ]


def run_evaluation(
    split: CorpusSplit,
    strategy: PromptStrategy,
    backend: Backend,
    params: GenerationParams,
    seed: int,
    templates: TemplateSet | None = None,
    corpus_id: str = "corpus",
    parallelism: int = 1,
) -> RunReport:
    """Evaluate every graph of the split in chronological presentation,
    params.repetitions times each."""
    if not split.evaluation:
        raise HarnessError("evaluation split is empty")
    if templates is None:
        templates = TemplateSet.default()
    exemplars = _build_exemplars(split, strategy)

    cells: list[_Cell] = []
    for graph in split.evaluation:
        dialogue = flatten(graph, graph.chronological_ids)
        prompt = build_prompt(strategy, dialogue, exemplars, templates)
        gold_rank, gold_edges = _gold(graph)
        for repetition in range(1, params.repetitions + 1):
            cells.append(
                _Cell(graph, prompt, repetition, None, "chronological", gold_rank, gold_edges)
            )

    records, incomplete = _run_cells(backend, params, strategy, cells, parallelism)
    keys = _metric_keys(strategy)
    per_graph, macro, pooled = _aggregate(
        records, [g.name for g in split.evaluation], keys
    )
    return RunReport(
        corpus_id=corpus_id,
        strategy=strategy,
        model_id=backend.describe(),
        seed=seed,
        params=params,
        template_hash=templates.content_hash,
        ordering_mode="chronological",
        records=records,
        per_graph=per_graph,
        macro=macro,
        pooled=pooled,
        format_violation_rate=_violation_rate(records),
        incomplete=incomplete,
    )


def run_toposort_robustness(
    split: CorpusSplit,
    strategy: PromptStrategy,
    backend: Backend,
    params: GenerationParams,
    seed: int,
    k: int = 5,
    claim_first: bool = True,
    templates: TemplateSet | None = None,
    corpus_id: str = "corpus",
    parallelism: int = 1,
) -> RunReport:
    """Evaluate each graph under k sampled presentation orders (repetitions
    per order), reporting order sensitivity as per-graph mean/std."""
    if not split.evaluation:
        raise HarnessError("evaluation split is empty")
    if templates is None:
        templates = TemplateSet.default()
    exemplars = _build_exemplars(split, strategy)

    cells: list[_Cell] = []
    order_counts: dict[str, int] = {}
    for graph in split.evaluation:
        graph_seed = derive_seed(seed, graph.name)
        sample = sample_topological_orders(graph, k, graph_seed, claim_first=claim_first)
        order_counts[graph.name] = len(sample.orders)
        gold_rank, gold_edges = _gold(graph)
        for index, order in enumerate(sample.orders):
            label = f"toposort(seed={graph_seed},index={index})"
            dialogue = flatten(graph, order, label=label)
            prompt = build_prompt(strategy, dialogue, exemplars, templates)
            for repetition in range(1, params.repetitions + 1):
                cells.append(
                    _Cell(graph, prompt, repetition, index, label, gold_rank, gold_edges)
                )

    records, incomplete = _run_cells(backend, params, strategy, cells, parallelism)
    keys = _metric_keys(strategy)
    per_graph, macro, pooled = _aggregate(
        records, [g.name for g in split.evaluation], keys
    )
    return RunReport(
        corpus_id=corpus_id,
        strategy=strategy,
        model_id=backend.describe(),
        seed=seed,
        params=params,
        template_hash=templates.content_hash,
        ordering_mode=f"toposort(k={k},claim_first={claim_first})",
        records=records,
        per_graph=per_graph,
        macro=macro,
        pooled=pooled,
        format_violation_rate=_violation_rate(records),
        incomplete=incomplete,
        order_counts=order_counts,
        robustness=_robustness_summary(records, list(order_counts)),
    )


def _robustness_summary(records: list[EvalRecord], graph_order: list[str]) -> dict:
    """Order sensitivity: per graph, the mean over repetitions within each
    order, then mean/std across orders; macro over graphs (undefined stds of
    single-order graphs are excluded)."""
    summary: dict = {"per_graph": {}}
    grand: dict[str, list[float]] = {"rho_mean": [], "rho_std": [], "tau_mean": [], "tau_std": []}
    for name in graph_order:
        graph_records = [r for r in records if r.graph_name == name]
        if not graph_records:
            continue
        entry: dict = {}
        for metric in ("rho", "tau"):
            order_means: list[float] = []
            for order_index in sorted({r.order_index for r in graph_records}):
                values = [
                    r.metrics[metric]
                    for r in graph_records
                    if r.order_index == order_index and r.metrics.get(metric) is not None
                ]
                if values:
                    order_means.append(sum(values) / len(values))
            mean = statistics.mean(order_means) if order_means else None
            std = statistics.stdev(order_means) if len(order_means) >= 2 else None
            entry[f"{metric}_mean"] = mean
            entry[f"{metric}_std"] = std
            if mean is not None:
                grand[f"{metric}_mean"].append(mean)
            if std is not None:
                grand[f"{metric}_std"].append(std)
        summary["per_graph"][name] = entry
    for key, values in grand.items():
        summary[key] = statistics.mean(values) if values else None
    return summary


# ---------------------------------------------------------------------------
# serialization


def _csv_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_report(report: RunReport, out_dir: str | Path, force: bool = False) -> list[Path]:
    """Write report.json, records.csv, and aggregate.csv into out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    targets = [out_dir / "report.json", out_dir / "records.csv", out_dir / "aggregate.csv"]
    if not force:
        for target in targets:
            if target.exists():
                raise OutputExists(f"{target} exists; pass --force to overwrite")

    targets[0].write_text(
        json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n"
    )

    with targets[1].open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(RECORD_CSV_COLUMNS)
        for r in report.records:
            writer.writerow(
                [
                    r.graph_name,
                    report.strategy.value,
                    r.repetition,
                    _csv_value(r.order_index),
                    r.ordering_label,
                    _csv_value(r.metrics.get("rho")),
                    _csv_value(r.metrics.get("tau")),
                    _csv_value(r.metrics.get("precision")),
                    _csv_value(r.metrics.get("recall")),
                    _csv_value(r.metrics.get("f1")),
                    _csv_value(r.format_violation),
                    _csv_value(r.retried),
                    _csv_value(r.latency),
                ]
            )

    with targets[2].open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(AGGREGATE_CSV_COLUMNS)

        def aggregate_row(scope: str, summary: dict) -> list[str]:
            row = [scope, str(summary.get("n", ""))]
            for key in ("rho", "tau", "precision", "recall", "f1"):
                row.append(_csv_value(summary["means"].get(key)))
                row.append(_csv_value(summary["excluded"].get(key)))
            return row

        for name, summary in report.per_graph.items():
            writer.writerow(aggregate_row(name, summary))
        writer.writerow(aggregate_row("macro", report.macro))
        writer.writerow(aggregate_row("pooled", report.pooled))
    return targets


def load_report(path: str | Path) -> dict:
    """Read a report.json back as a plain dict (the bias command's input)."""
    return json.loads(Path(path).read_text())
