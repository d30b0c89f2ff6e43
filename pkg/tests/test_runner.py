from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import pytest

from quadrank.errors import (
    ExemplarCountMismatch,
    HarnessError,
    OutputExists,
    TransportError,
)
from quadrank.harness import (
    GenerationParams,
    GoldEchoBackend,
    PromptStrategy,
    render_adjacency,
    render_ranking,
)
from quadrank.harness.backends import Completion
from quadrank.harness.runner import (
    derive_seed,
    load_report,
    run_evaluation,
    run_toposort_robustness,
    write_report,
)
from quadrank.ingest import CorpusSplit, split_corpus
from quadrank.metrics import EdgeSet
from quadrank.semantics import acceptability, gold_ranking


@pytest.fixture(scope="module")
def eval_split(request) -> CorpusSplit:
    debatepedia = request.getfixturevalue("debatepedia")
    small = [g for g in debatepedia if g.name in {"SobrietyTest", "YearRoundSchooling", "WolfReintroduction"}]
    return CorpusSplit(exemplars=(), evaluation=tuple(small))


@dataclass
class ScriptedBackend:
    """Answers from a per-tag script; falls back to a gold echo."""

    graphs: list
    script: dict[str, str] = field(default_factory=dict)
    calls: list[str] = field(default_factory=list)

    def describe(self) -> str:
        return "mock:scripted"

    def complete(self, prompt: str, params: GenerationParams, tag: str) -> Completion:
        self.calls.append(tag)
        if tag in self.script:
            return Completion(text=self.script[tag], latency=0.01)
        return GoldEchoBackend(self.graphs).complete(prompt, params, tag)


def gold_text(graph) -> str:
    ranking = gold_ranking(acceptability(graph))
    return render_adjacency(EdgeSet.from_graph(graph)) + "\n" + render_ranking(ranking)


class TestRunEvaluation:
    def test_gold_echo_full_marks(self, eval_split):
        backend = GoldEchoBackend(list(eval_split.evaluation))
        report = run_evaluation(
            eval_split, PromptStrategy.VANILLA, backend, GenerationParams(), seed=5
        )
        assert len(report.records) == 3 * 3
        assert report.format_violation_rate == 0.0
        assert report.macro["means"]["rho"] == pytest.approx(1.0)
        assert report.pooled["means"]["tau"] == pytest.approx(1.0)
        assert not report.incomplete
        assert report.ordering_mode == "chronological"
        assert report.strategy is PromptStrategy.VANILLA
        assert set(report.per_graph) == {g.name for g in eval_split.evaluation}

    def test_cot_adds_edge_metrics(self, eval_split):
        backend = GoldEchoBackend(list(eval_split.evaluation))
        report = run_evaluation(
            eval_split, PromptStrategy.COT_ZERO_SHOT, backend, GenerationParams(), seed=5
        )
        assert report.macro["means"]["f1"] == pytest.approx(1.0)
        assert report.macro["means"]["precision"] == pytest.approx(1.0)

    def test_retry_after_format_violation(self, eval_split):
        target = eval_split.evaluation[0].name
        backend = ScriptedBackend(
            list(eval_split.evaluation),
            script={f"{target}|chronological|rep1": "no usable content"},
        )
        report = run_evaluation(
            eval_split, PromptStrategy.VANILLA, backend, GenerationParams(), seed=5
        )
        assert report.format_violation_rate == 0.0
        bad = [r for r in report.records if r.graph_name == target and r.repetition == 1]
        assert bad[0].retried
        assert bad[0].metrics["rho"] == pytest.approx(1.0)
        assert f"{target}|chronological|rep1|retry" in backend.calls

    def test_persistent_violation_yields_none_metrics(self, eval_split):
        target = eval_split.evaluation[0].name
        backend = ScriptedBackend(
            list(eval_split.evaluation),
            script={
                f"{target}|chronological|rep1": "nope",
                f"{target}|chronological|rep1|retry": "still nope",
            },
        )
        report = run_evaluation(
            eval_split, PromptStrategy.VANILLA, backend, GenerationParams(), seed=5
        )
        bad = [r for r in report.records if r.graph_name == target and r.repetition == 1][0]
        assert bad.format_violation
        assert bad.metrics == {"rho": None, "tau": None}
        assert bad.predicted_groups is None
        assert report.format_violation_rate == pytest.approx(1 / 9)
        # macro over the affected graph still averages its two clean repetitions
        assert report.per_graph[target]["means"]["rho"] == pytest.approx(1.0)
        assert report.per_graph[target]["excluded"]["rho"] == 1

    def test_cot_retries_when_adjacency_missing(self, eval_split):
        target_graph = eval_split.evaluation[0]
        ranking_only = render_ranking(gold_ranking(acceptability(target_graph)))
        backend = ScriptedBackend(
            list(eval_split.evaluation),
            script={f"{target_graph.name}|chronological|rep1": ranking_only},
        )
        report = run_evaluation(
            eval_split, PromptStrategy.COT_ZERO_SHOT, backend, GenerationParams(), seed=5
        )
        assert f"{target_graph.name}|chronological|rep1|retry" in backend.calls
        assert report.format_violation_rate == 0.0

    def test_vanilla_ignores_missing_adjacency(self, eval_split):
        target_graph = eval_split.evaluation[0]
        ranking_only = render_ranking(gold_ranking(acceptability(target_graph)))
        backend = ScriptedBackend(
            list(eval_split.evaluation),
            script={f"{target_graph.name}|chronological|rep1": ranking_only},
        )
        run_evaluation(
            eval_split, PromptStrategy.VANILLA, backend, GenerationParams(), seed=5
        )
        assert f"{target_graph.name}|chronological|rep1|retry" not in backend.calls

    def test_parallel_matches_sequential(self, eval_split):
        backend = GoldEchoBackend(list(eval_split.evaluation))
        seq = run_evaluation(
            eval_split, PromptStrategy.COT_ZERO_SHOT, backend, GenerationParams(), seed=5
        )
        par = run_evaluation(
            eval_split, PromptStrategy.COT_ZERO_SHOT, backend, GenerationParams(),
            seed=5, parallelism=4,
        )
        assert [r.to_json_dict() for r in seq.records] == [r.to_json_dict() for r in par.records]
        assert seq.macro == par.macro

    def test_backend_failure_marks_incomplete(self, eval_split):
        class FailingBackend:
            def __init__(self, inner, fail_on):
                self.inner, self.fail_on = inner, fail_on

            def describe(self):
                return "mock:failing"

            def complete(self, prompt, params, tag):
                if tag.startswith(self.fail_on):
                    raise TransportError("boom")
                return self.inner.complete(prompt, params, tag)

        last = eval_split.evaluation[-1].name
        backend = FailingBackend(GoldEchoBackend(list(eval_split.evaluation)), last)
        report = run_evaluation(
            eval_split, PromptStrategy.VANILLA, backend, GenerationParams(), seed=5
        )
        assert report.incomplete
        assert all(r.graph_name != last for r in report.records)

    def test_empty_evaluation_rejected(self, eval_split):
        backend = GoldEchoBackend(list(eval_split.evaluation))
        with pytest.raises(HarnessError):
            run_evaluation(
                CorpusSplit(exemplars=(), evaluation=()),
                PromptStrategy.VANILLA,
                backend,
                GenerationParams(),
                seed=1,
            )

    def test_exemplar_mismatch_raised_before_any_call(self, eval_split):
        backend = ScriptedBackend(list(eval_split.evaluation))
        with pytest.raises(ExemplarCountMismatch):
            run_evaluation(
                eval_split, PromptStrategy.ICL_FEW_SHOT, backend, GenerationParams(), seed=5
            )
        assert backend.calls == []

    def test_few_shot_uses_first_three_exemplars(self, debatepedia):
        split = split_corpus(
            debatepedia, ["ZoosBan", "VideoGameRegulation", "UrbanBikeLanes", "Ecotourism"]
        )
        small = CorpusSplit(
            exemplars=split.exemplars,
            evaluation=tuple(g for g in split.evaluation if g.name == "SobrietyTest"),
        )
        backend = GoldEchoBackend([g for g in debatepedia if g.name == "SobrietyTest"])
        report = run_evaluation(
            small, PromptStrategy.ICL_FEW_SHOT, backend, GenerationParams(), seed=5
        )
        assert report.macro["means"]["rho"] == pytest.approx(1.0)


class TestRobustness:
    def test_gold_echo_zero_std(self, eval_split):
        backend = GoldEchoBackend(list(eval_split.evaluation))
        report = run_toposort_robustness(
            eval_split, PromptStrategy.VANILLA, backend, GenerationParams(),
            seed=9, k=4,
        )
        assert report.robustness is not None
        assert report.robustness["rho_mean"] == pytest.approx(1.0)
        assert report.robustness["rho_std"] == pytest.approx(0.0)
        assert report.ordering_mode == "toposort(k=4,claim_first=True)"
        # SobrietyTest and WolfReintroduction branch; YearRoundSchooling may not
        assert report.order_counts is not None
        for name, count in report.order_counts.items():
            per_graph = [r for r in report.records if r.graph_name == name]
            assert len(per_graph) == count * 3
            labels = {r.ordering_label for r in per_graph}
            assert len(labels) == count
            assert all("toposort(seed=" in label for label in labels)

    def test_deterministic_per_graph_seeds(self, eval_split):
        backend = GoldEchoBackend(list(eval_split.evaluation))
        a = run_toposort_robustness(
            eval_split, PromptStrategy.VANILLA, backend, GenerationParams(), seed=9, k=3
        )
        b = run_toposort_robustness(
            eval_split, PromptStrategy.VANILLA, backend, GenerationParams(), seed=9, k=3
        )
        assert [r.to_json_dict() for r in a.records] == [r.to_json_dict() for r in b.records]

    def test_derive_seed_stable(self):
        assert derive_seed(9, "SobrietyTest") == derive_seed(9, "SobrietyTest")
        assert derive_seed(9, "SobrietyTest") != derive_seed(9, "ZoosBan")
        assert derive_seed(9, "SobrietyTest") != derive_seed(10, "SobrietyTest")


class TestReportIO:
    def make_report(self, eval_split):
        backend = GoldEchoBackend(list(eval_split.evaluation))
        return run_evaluation(
            eval_split, PromptStrategy.COT_ZERO_SHOT, backend, GenerationParams(), seed=5
        )

    def test_write_and_load(self, tmp_path, eval_split):
        report = self.make_report(eval_split)
        paths = write_report(report, tmp_path / "out")
        names = {p.name for p in paths}
        assert names == {"report.json", "records.csv", "aggregate.csv"}
        loaded = load_report(tmp_path / "out" / "report.json")
        assert loaded["strategy"] == "cot_zero_shot"
        assert loaded["seed"] == 5
        assert loaded["params"]["temperature"] == 0.7
        assert loaded["params"]["repetitions"] == 3
        assert len(loaded["records"]) == len(report.records)
        assert loaded["aggregates"]["macro"]["means"]["rho"] == pytest.approx(1.0)
        assert loaded["template_hash"] == report.template_hash

    def test_records_csv_columns(self, tmp_path, eval_split):
        report = self.make_report(eval_split)
        write_report(report, tmp_path / "out")
        with open(tmp_path / "out" / "records.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 9
        first = rows[0]
        assert first["graph"] == eval_split.evaluation[0].name
        assert first["strategy"] == "cot_zero_shot"
        assert first["rho"] == "1.0"
        assert first["format_violation"] == "false"
        expected_cols = [
            "graph", "strategy", "repetition", "order_index", "ordering",
            "rho", "tau", "precision", "recall", "f1",
            "format_violation", "retried", "latency_s",
        ]
        assert list(first.keys()) == expected_cols

    def test_aggregate_csv_has_macro_and_pooled(self, tmp_path, eval_split):
        report = self.make_report(eval_split)
        write_report(report, tmp_path / "out")
        with open(tmp_path / "out" / "aggregate.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        scopes = [r["scope"] for r in rows]
        assert scopes[-2:] == ["macro", "pooled"]
        assert len(rows) == len(eval_split.evaluation) + 2

    def test_overwrite_guard(self, tmp_path, eval_split):
        report = self.make_report(eval_split)
        write_report(report, tmp_path / "out")
        with pytest.raises(OutputExists):
            write_report(report, tmp_path / "out")
        write_report(report, tmp_path / "out", force=True)

    def test_report_json_sorted_and_newline_terminated(self, tmp_path, eval_split):
        report = self.make_report(eval_split)
        write_report(report, tmp_path / "out")
        raw = (tmp_path / "out" / "report.json").read_text()
        assert raw.endswith("\n")
        parsed = json.loads(raw)
        assert list(parsed) == sorted(parsed)
