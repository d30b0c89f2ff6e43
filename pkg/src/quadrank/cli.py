"""Command-line interface.

Five subcommands: quad (score + rank corpora), flatten (write dialogue
transcripts), evaluate (run an instruction strategy against a backend),
bias (length/position quartile analysis of a finished run), and stats
(corpus descriptive statistics).

Exit codes: 0 on success, 1 on domain errors (cycles, malformed corpora,
backend failures), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import data
from .errors import (
    DuplicateExemplar,
    OutputExists,
    QuadrankError,
    UnknownGraphName,
)
from .graph import DebateGraph, pair_count
from .harness.backends import BackendConfig, GenerationParams, build_backend
from .harness.prompts import PromptStrategy, TemplateSet, default_exemplar_names
from .harness.runner import (
    load_report,
    run_evaluation,
    run_toposort_robustness,
    write_report,
)
from .ingest import CorpusSplit, corpus_stats, load_corpus, split_corpus
from .metrics import QuartileKey, macro_average, quartile_correlations, quartile_split
from .semantics import Ranking, acceptability, gold_ranking
from .dialogue import flatten, sample_topological_orders
from .errors import AllUndefined


def resolve_corpus(spec: str) -> Path:
    """Map "builtin:<name>" to a bundled fixture, anything else to a path."""
    if spec.startswith("builtin:"):
        return data.fixture_path(spec.removeprefix("builtin:"))
    return Path(spec)


def _load_corpora(specs: list[str]) -> list[DebateGraph]:
    graphs: list[DebateGraph] = []
    for spec in specs:
        graphs.extend(load_corpus(resolve_corpus(spec)))
    return graphs


def _fmt(value: float | None, digits: int = 4) -> str:
    return "n/a" if value is None else f"{value:.{digits}f}"


def _safe_filename(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name)


def _guard_overwrite(path: Path, force: bool) -> None:
    if path.exists() and not force:
        raise OutputExists(f"{path} exists; pass --force to overwrite")


# ---------------------------------------------------------------------------
# quad


def cmd_quad(args) -> int:
    graphs = _load_corpora(args.corpus)
    all_scores: dict[str, dict] = {}
    all_rankings: dict[str, dict] = {}
    for graph in graphs:
        score_map = acceptability(graph)
        ranking = gold_ranking(score_map)
        all_scores[graph.name] = {str(a): score_map.scores[a] for a in sorted(score_map.scores)}
        all_rankings[graph.name] = {
            "ordered_ids": list(ranking.ordered_ids),
            "tie_groups": [list(g) for g in ranking.tie_groups],
        }
        print(f"{graph.name}: {len(graph)} arguments, {len(graph.relations)} relations")
        print("  rank  id  weight  score")
        for position, aid in enumerate(ranking.ordered_ids, start=1):
            weight = graph.base_weights[aid]
            print(f"  {position:>4}  {aid:>2}  {weight:>6.2f}  {score_map.scores[aid]:.4f}")

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for filename, payload in (("scores.json", all_scores), ("rankings.json", all_rankings)):
            target = out / filename
            _guard_overwrite(target, args.force)
            target.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote {out / 'scores.json'} and {out / 'rankings.json'}")
    return 0


# ---------------------------------------------------------------------------
# flatten


def cmd_flatten(args) -> int:
    ordering = args.ordering
    toposort_k, seed = args.toposort, args.seed
    if ordering.startswith("toposort:"):
        try:
            _, k_text, seed_text = ordering.split(":")
            toposort_k, seed = int(k_text), int(seed_text)
        except ValueError:
            raise QuadrankError(
                f"bad --ordering value {ordering!r}; expected toposort:<k>:<seed>"
            )
        ordering = "toposort"
    if ordering not in {"chronological", "toposort"}:
        raise QuadrankError(f"unknown ordering {args.ordering!r}")
    if ordering == "toposort" and seed is None:
        print("error: --seed is required for toposort ordering", file=sys.stderr)
        return 2

    graphs = _load_corpora(args.corpus)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = 0
    for graph in graphs:
        stem = _safe_filename(graph.name)
        if ordering == "chronological":
            dialogue = flatten(graph, graph.chronological_ids)
            target = out / f"{stem}.chronological.txt"
            _guard_overwrite(target, args.force)
            target.write_text(dialogue.text)
            written += 1
        else:
            sample = sample_topological_orders(
                graph, toposort_k, seed, claim_first=not args.claim_last
            )
            if sample.not_enough_orders:
                print(
                    f"warning: {graph.name} admits only {len(sample.orders)} "
                    f"distinct order(s), {sample.requested} requested",
                    file=sys.stderr,
                )
            for index, order in enumerate(sample.orders):
                label = f"toposort(seed={seed},index={index})"
                dialogue = flatten(graph, order, label=label)
                target = out / f"{stem}.toposort-seed{seed}-i{index}.txt"
                _guard_overwrite(target, args.force)
                target.write_text(dialogue.text)
                written += 1
    print(f"wrote {written} dialogue file(s) to {out}")
    return 0


# ---------------------------------------------------------------------------
# evaluate


def _build_split(args) -> tuple[CorpusSplit, str]:
    corpus_path = resolve_corpus(args.corpus)
    corpus_graphs = load_corpus(corpus_path)
    strategy = PromptStrategy(args.strategy)

    names: list[str] = []
    if args.exemplars:
        names = [n.strip() for n in args.exemplars.split(",") if n.strip()]

    if args.exemplar_corpus:
        exemplar_graphs = load_corpus(resolve_corpus(args.exemplar_corpus))
        if not names and strategy.exemplar_count:
            names = list(default_exemplar_names(exemplar_graphs))
        by_name = {g.name: g for g in exemplar_graphs}
        chosen: list[DebateGraph] = []
        for name in names:
            if name not in by_name:
                raise UnknownGraphName(f"no graph named {name!r} in the exemplar corpus")
            if any(g.name == name for g in chosen):
                raise DuplicateExemplar(f"graph {name!r} listed as exemplar twice")
            chosen.append(by_name[name])
        split = CorpusSplit(exemplars=tuple(chosen), evaluation=tuple(corpus_graphs))
    else:
        if not names and strategy.exemplar_count:
            names = list(default_exemplar_names(corpus_graphs))
        split = split_corpus(corpus_graphs, names)
    return split, corpus_path.name


def cmd_evaluate(args) -> int:
    strategy = PromptStrategy(args.strategy)
    split, corpus_id = _build_split(args)

    if args.backend_config:
        config = BackendConfig.from_file(args.backend_config)
    elif args.replay and not args.record:
        config = BackendConfig()
    else:
        print(
            "error: --backend-config is required unless replaying an archive",
            file=sys.stderr,
        )
        return 2

    templates = TemplateSet.from_dir(args.templates) if args.templates else None
    params = GenerationParams(
        temperature=args.temperature,
        repetitions=args.reps,
        max_output_tokens=args.max_output_tokens,
        request_timeout=args.timeout,
        retry_limit=args.retries,
    )
    backend = build_backend(
        config, graphs=split.evaluation, replay=args.replay, record=args.record
    )

    if args.toposort:
        report = run_toposort_robustness(
            split,
            strategy,
            backend,
            params,
            seed=args.seed,
            k=args.toposort,
            claim_first=not args.claim_last,
            templates=templates,
            corpus_id=corpus_id,
            parallelism=args.parallel,
        )
    else:
        report = run_evaluation(
            split,
            strategy,
            backend,
            params,
            seed=args.seed,
            templates=templates,
            corpus_id=corpus_id,
            parallelism=args.parallel,
        )

    paths = write_report(report, args.out, force=args.force)

    means = report.macro["means"]
    print(
        f"{strategy.value} on {corpus_id} ({report.ordering_mode}): "
        f"{len(report.records)} records, model {report.model_id}"
    )
    print(f"format violations: {report.format_violation_rate:.1%}")
    summary = f"macro rho={_fmt(means.get('rho'))} tau={_fmt(means.get('tau'))}"
    if strategy.wants_adjacency:
        summary += f" f1={_fmt(means.get('f1'))}"
    print(summary)
    if report.robustness:
        print(
            f"order sensitivity: rho {_fmt(report.robustness['rho_mean'])} "
            f"+/- {_fmt(report.robustness['rho_std'])}"
        )
    print("wrote " + ", ".join(str(p) for p in paths))
    if report.incomplete:
        print("warning: run aborted on a backend failure; report is partial", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# bias


def cmd_bias(args) -> int:
    report = load_report(args.report)
    graphs = {g.name: g for g in _load_corpora(args.corpus)}
    key = QuartileKey.LENGTH_TOKENS if args.key == "length" else QuartileKey.POSITION

    gold_cache: dict[str, Ranking] = {}
    bucket_cache: dict[str, object] = {}
    per_bucket: dict[str, list[dict[str, float | None]]] = {}
    used = skipped = 0
    for record in report["records"]:
        name = record["graph"]
        if record.get("predicted") is None:
            skipped += 1
            continue
        if name not in graphs:
            raise UnknownGraphName(
                f"report references graph {name!r} which is not in the given corpus"
            )
        if name not in gold_cache:
            gold_cache[name] = gold_ranking(acceptability(graphs[name]))
            bucket_cache[name] = quartile_split(graphs[name], key)
        predicted = Ranking.from_groups(record["predicted"])
        for bucket in quartile_correlations(gold_cache[name], predicted, bucket_cache[name]):
            per_bucket.setdefault(bucket.label, []).append(
                {"rho": bucket.rho, "tau": bucket.tau}
            )
        used += 1

    if not per_bucket:
        raise QuadrankError("report contains no parseable records to analyze")

    rows = []
    print(f"quartile bias by {args.key} over {used} record(s) ({skipped} skipped)")
    print("  bucket  n_records  rho      tau      excluded(rho/tau)")
    for label in sorted(per_bucket):
        records = per_bucket[label]
        try:
            aggregated = macro_average(records)
            means, excluded = aggregated.means, aggregated.excluded
        except AllUndefined:
            means = {"rho": None, "tau": None}
            excluded = {"rho": len(records), "tau": len(records)}
        row = {
            "bucket": label,
            "n_records": len(records),
            "rho": means.get("rho"),
            "rho_excluded": excluded.get("rho", 0),
            "tau": means.get("tau"),
            "tau_excluded": excluded.get("tau", 0),
        }
        rows.append(row)
        print(
            f"  {label:<6}  {row['n_records']:>9}  {_fmt(row['rho']):<7}  "
            f"{_fmt(row['tau']):<7}  {row['rho_excluded']}/{row['tau_excluded']}"
        )

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        json_target = out / "bias.json"
        csv_target = out / "bias.csv"
        _guard_overwrite(json_target, args.force)
        _guard_overwrite(csv_target, args.force)
        json_target.write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n")
        lines = ["bucket,n_records,rho,rho_excluded,tau,tau_excluded"]
        for row in rows:
            lines.append(
                f"{row['bucket']},{row['n_records']},"
                f"{'' if row['rho'] is None else repr(row['rho'])},{row['rho_excluded']},"
                f"{'' if row['tau'] is None else repr(row['tau'])},{row['tau_excluded']}"
            )
        csv_target.write_text("\n".join(lines) + "\n")
        print(f"wrote {json_target} and {csv_target}")
    return 0


# ---------------------------------------------------------------------------
# stats


def cmd_stats(args) -> int:
    excluded = {n.strip() for n in (args.exclude or "").split(",") if n.strip()}
    all_graphs: list[DebateGraph] = []
    sections: list[tuple[str, list[DebateGraph]]] = []
    for spec in args.corpus:
        graphs = [g for g in load_corpus(resolve_corpus(spec)) if g.name not in excluded]
        sections.append((spec, graphs))
        all_graphs.extend(graphs)
    if len(sections) > 1:
        sections.append(("total", all_graphs))

    rows = []
    for label, graphs in sections:
        stats = corpus_stats(graphs)
        pairs = pair_count(graphs)
        print(f"{label}:")
        print(
            f"  graphs={stats.graph_count} nodes={stats.node_count} "
            f"edges={stats.edge_count} support={stats.support_edges} "
            f"attack={stats.attack_edges}"
        )
        print(
            f"  mean in-degree={stats.mean_in_degree:.2f} "
            f"mean out-degree={stats.mean_out_degree:.2f} "
            f"unordered argument pairs={pairs}"
        )
        per_graph = ", ".join(f"{n}={c}" for n, c in stats.per_graph_nodes.items())
        print(f"  per-graph nodes: {per_graph}")
        rows.append(
            {
                "corpus": label,
                "graphs": stats.graph_count,
                "nodes": stats.node_count,
                "edges": stats.edge_count,
                "support": stats.support_edges,
                "attack": stats.attack_edges,
                "mean_in_degree": stats.mean_in_degree,
                "mean_out_degree": stats.mean_out_degree,
                "pairs": pairs,
            }
        )

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        target = out / "stats.csv"
        _guard_overwrite(target, args.force)
        header = "corpus,graphs,nodes,edges,support,attack,mean_in_degree,mean_out_degree,pairs"
        lines = [header] + [
            f"{r['corpus']},{r['graphs']},{r['nodes']},{r['edges']},{r['support']},"
            f"{r['attack']},{r['mean_in_degree']!r},{r['mean_out_degree']!r},{r['pairs']}"
            for r in rows
        ]
        target.write_text("\n".join(lines) + "\n")
        print(f"wrote {target}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadrank",
        description="QuAD acceptability scoring and LLM ranking evaluation for debate graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    quad = sub.add_parser("quad", help="score corpora and print gold rankings")
    quad.add_argument("--corpus", nargs="+", required=True,
                      help="corpus file(s): pair XML, canonical graph file, or builtin:<name>")
    quad.add_argument("--out", help="directory for scores.json and rankings.json")
    quad.add_argument("--force", action="store_true", help="overwrite existing outputs")
    quad.set_defaults(handler=cmd_quad)

    flat = sub.add_parser("flatten", help="write dialogue transcripts")
    flat.add_argument("--corpus", nargs="+", required=True)
    flat.add_argument("--out", required=True, help="directory for transcript files")
    flat.add_argument("--ordering", default="chronological",
                      help="chronological (default), toposort, or toposort:<k>:<seed>")
    flat.add_argument("--toposort", type=int, default=5, metavar="K",
                      help="orders per graph when --ordering toposort (default 5)")
    flat.add_argument("--seed", type=int, help="seed for toposort sampling")
    flat.add_argument("--claim-last", action="store_true",
                      help="invert the constraint: sources precede targets")
    flat.add_argument("--force", action="store_true")
    flat.set_defaults(handler=cmd_flatten)

    ev = sub.add_parser("evaluate", help="run an instruction strategy against a backend")
    ev.add_argument("--corpus", required=True)
    ev.add_argument("--exemplar-corpus",
                    help="corpus to draw exemplars from (default: --corpus)")
    ev.add_argument("--exemplars",
                    help="comma-separated exemplar graph names (default: computed "
                         "attack-heavy / balanced / support-heavy)")
    ev.add_argument("--strategy", required=True,
                    choices=[s.value for s in PromptStrategy])
    ev.add_argument("--backend-config", help="backend descriptor JSON file")
    ev.add_argument("--templates", help="directory of prompt template overrides")
    ev.add_argument("--seed", type=int, required=True)
    ev.add_argument("--reps", type=int, default=3)
    ev.add_argument("--temperature", type=float, default=0.7)
    ev.add_argument("--max-output-tokens", type=int, default=2048)
    ev.add_argument("--timeout", type=float, default=120.0)
    ev.add_argument("--retries", type=int, default=3)
    ev.add_argument("--parallel", type=int, default=1)
    ev.add_argument("--toposort", type=int, default=0, metavar="K",
                    help="run the order-robustness protocol with K orders per graph")
    ev.add_argument("--claim-last", action="store_true")
    ev.add_argument("--replay", help="replay archive path (JSON lines)")
    ev.add_argument("--record", action="store_true",
                    help="append live completions to the --replay archive")
    ev.add_argument("--out", required=True)
    ev.add_argument("--force", action="store_true")
    ev.set_defaults(handler=cmd_evaluate)

    bias = sub.add_parser("bias", help="length/position quartile analysis of a run report")
    bias.add_argument("--report", required=True, help="report.json from evaluate")
    bias.add_argument("--corpus", nargs="+", required=True)
    bias.add_argument("--key", required=True, choices=["length", "position"])
    bias.add_argument("--out")
    bias.add_argument("--force", action="store_true")
    bias.set_defaults(handler=cmd_bias)

    stats = sub.add_parser("stats", help="corpus descriptive statistics")
    stats.add_argument("--corpus", nargs="+", required=True)
    stats.add_argument("--exclude", help="comma-separated graph names to drop")
    stats.add_argument("--out")
    stats.add_argument("--force", action="store_true")
    stats.set_defaults(handler=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except QuadrankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
