from __future__ import annotations

import itertools
import random

import pytest

from conftest import make_graph
from oracles import (
    brute_force_tau_b,
    fractional_ranks_oracle,
    pearson,
    scipy_kendall,
    scipy_spearman,
    set_prf,
)
from quadrank.errors import AllUndefined, MismatchedArgumentSets
from quadrank.graph import Relation, RelationKind
from quadrank.metrics import (
    EdgeSet,
    QuartileKey,
    edge_prf,
    kendall_tau,
    macro_average,
    quartile_correlations,
    quartile_split,
    rank_vector,
    restrict_ranking,
    spearman_rho,
    whitespace_tokens,
)
from quadrank.semantics import Ranking, acceptability, gold_ranking


def ranking_of(values: dict[int, float]) -> Ranking:
    """Build a Ranking from id -> strength, higher is better, ties kept."""
    groups: dict[float, list[int]] = {}
    for aid, v in values.items():
        groups.setdefault(v, []).append(aid)
    ordered = [sorted(members) for v, members in sorted(groups.items(), reverse=True)]
    return Ranking.from_groups(ordered)


class TestRankVector:
    def test_fractional_ranks(self):
        r = ranking_of({1: 0.9, 2: 0.5, 3: 0.5, 4: 0.1})
        assert rank_vector(r) == {1: 1.0, 2: 2.5, 3: 2.5, 4: 4.0}

    def test_matches_slow_oracle_on_random_rankings(self):
        rng = random.Random(44)
        for _ in range(500):
            n = rng.randint(1, 9)
            values = {i: rng.choice([0.1, 0.3, 0.5, 0.7]) for i in range(1, n + 1)}
            mine = rank_vector(ranking_of(values))
            ids = sorted(values)
            oracle = fractional_ranks_oracle([values[i] for i in ids])
            for aid, expected in zip(ids, oracle):
                assert mine[aid] == pytest.approx(expected)


def random_ranking_pair(rng: random.Random, n: int) -> tuple[Ranking, Ranking]:
    gold = ranking_of({i: rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]) for i in range(1, n + 1)})
    pred = ranking_of({i: rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]) for i in range(1, n + 1)})
    return gold, pred


def as_value_vectors(gold: Ranking, pred: Ranking) -> tuple[list[float], list[float]]:
    """Express both rankings as comparable score vectors over sorted ids
    (negated rank: higher = better), the form scipy consumes."""
    ids = sorted(gold.ordered_ids)
    gr, pr = rank_vector(gold), rank_vector(pred)
    return [-gr[i] for i in ids], [-pr[i] for i in ids]


class TestSpearman:
    def test_identity_and_reversal_exact(self):
        r = ranking_of({1: 3, 2: 2, 3: 1, 4: 0})
        rev = ranking_of({1: 0, 2: 1, 3: 2, 4: 3})
        assert spearman_rho(r, r) == 1.0
        assert spearman_rho(r, rev) == -1.0

    def test_matches_scipy_on_fuzzed_pairs(self):
        rng = random.Random(1234)
        checked = 0
        for _ in range(1000):
            gold, pred = random_ranking_pair(rng, rng.randint(2, 9))
            mine = spearman_rho(gold, pred)
            x, y = as_value_vectors(gold, pred)
            oracle = scipy_spearman(x, y)
            if oracle is None:
                assert mine is None
            else:
                assert mine == pytest.approx(oracle, abs=1e-12)
                checked += 1
        assert checked > 500

    def test_matches_pearson_on_fractional_ranks(self):
        rng = random.Random(99)
        for _ in range(500):
            gold, pred = random_ranking_pair(rng, rng.randint(2, 8))
            x, y = as_value_vectors(gold, pred)
            mine = spearman_rho(gold, pred)
            oracle = pearson(x, y)
            if oracle is None:
                assert mine is None
            else:
                assert mine == pytest.approx(oracle, abs=1e-12)

    def test_degenerate_cases_undefined(self):
        single = ranking_of({1: 1.0})
        assert spearman_rho(single, single) is None
        all_tied = ranking_of({1: 0.5, 2: 0.5, 3: 0.5})
        strict = ranking_of({1: 0.9, 2: 0.5, 3: 0.1})
        assert spearman_rho(all_tied, strict) is None
        assert spearman_rho(strict, all_tied) is None

    def test_mismatched_ids_rejected(self):
        a = ranking_of({1: 1.0, 2: 0.5})
        b = ranking_of({1: 1.0, 3: 0.5})
        with pytest.raises(MismatchedArgumentSets):
            spearman_rho(a, b)


class TestKendall:
    def test_identity_and_reversal_exact(self):
        r = ranking_of({1: 3, 2: 2, 3: 1, 4: 0})
        rev = ranking_of({1: 0, 2: 1, 3: 2, 4: 3})
        assert kendall_tau(r, r) == 1.0
        assert kendall_tau(r, rev) == -1.0

    def test_all_permutations_n_up_to_6(self):
        for n in range(2, 7):
            ids = list(range(1, n + 1))
            gold = ranking_of({i: float(n - i) for i in ids})
            gold_vec = [float(n - i) for i in ids]
            for perm in itertools.permutations(range(n)):
                pred = ranking_of({ids[j]: float(perm[j]) for j in range(n)})
                pred_vec = [float(perm[j]) for j in range(n)]
                mine = kendall_tau(gold, pred)
                brute = brute_force_tau_b(gold_vec, pred_vec)
                scipy_val = scipy_kendall(gold_vec, pred_vec)
                assert mine == pytest.approx(brute, abs=1e-12)
                assert mine == pytest.approx(scipy_val, abs=1e-12)

    def test_sampled_tied_cases_n_up_to_8(self):
        rng = random.Random(321)
        checked = 0
        for _ in range(1000):
            gold, pred = random_ranking_pair(rng, rng.randint(2, 8))
            mine = kendall_tau(gold, pred)
            x, y = as_value_vectors(gold, pred)
            brute = brute_force_tau_b(x, y)
            if brute is None:
                assert mine is None
                continue
            scipy_val = scipy_kendall(x, y)
            assert mine == pytest.approx(brute, abs=1e-12)
            assert mine == pytest.approx(scipy_val, abs=1e-12)
            checked += 1
        assert checked > 500

    def test_degenerate_cases_undefined(self):
        all_tied = ranking_of({1: 0.5, 2: 0.5})
        strict = ranking_of({1: 0.9, 2: 0.1})
        assert kendall_tau(all_tied, strict) is None
        assert kendall_tau(ranking_of({1: 1.0}), ranking_of({1: 1.0})) is None


def edge(s: int, t: int, kind: str) -> Relation:
    return Relation(s, t, RelationKind(kind))


class TestEdgePrf:
    def test_echo_perfect(self):
        gold = EdgeSet.from_tuples([(2, 1, "attack"), (3, 1, "support")])
        score = edge_prf(gold, gold)
        assert (score.precision, score.recall, score.f1) == (1.0, 1.0, 1.0)

    def test_kind_flip_zero(self):
        gold = EdgeSet.from_tuples([(2, 1, "attack"), (3, 1, "support")])
        flipped = EdgeSet.from_tuples([(2, 1, "support"), (3, 1, "attack")])
        score = edge_prf(gold, flipped)
        assert (score.precision, score.recall, score.f1) == (0.0, 0.0, 0.0)

    def test_empty_sets_zero_by_convention(self):
        gold = EdgeSet.from_tuples([(2, 1, "attack")])
        none = EdgeSet(frozenset())
        assert edge_prf(gold, none) == edge_prf(none, gold)
        score = edge_prf(none, none)
        assert (score.precision, score.recall, score.f1) == (0.0, 0.0, 0.0)

    def test_matches_set_oracle_on_fuzzed_pairs(self):
        rng = random.Random(555)
        universe = [
            (s, t, k)
            for s in range(1, 6)
            for t in range(1, 6)
            if s != t
            for k in ("attack", "support")
        ]
        for _ in range(1000):
            gold_t = rng.sample(universe, rng.randint(0, 10))
            pred_t = rng.sample(universe, rng.randint(0, 10))
            mine = edge_prf(EdgeSet.from_tuples(gold_t), EdgeSet.from_tuples(pred_t))
            p, r, f = set_prf(set(gold_t), set(pred_t))
            assert mine.precision == pytest.approx(p)
            assert mine.recall == pytest.approx(r)
            assert mine.f1 == pytest.approx(f)

    def test_from_graph(self, chain3):
        edges = EdgeSet.from_graph(chain3)
        assert edges == EdgeSet.from_tuples([(2, 1, "attack"), (3, 2, "attack")])


class TestMacroAverage:
    def test_skips_undefined_and_counts_exclusions(self):
        records = [
            {"rho": 1.0, "tau": 0.5},
            {"rho": None, "tau": 0.5},
            {"rho": 0.0, "tau": None},
        ]
        result = macro_average(records)
        assert result.means["rho"] == pytest.approx(0.5)
        assert result.means["tau"] == pytest.approx(0.5)
        assert result.excluded == {"rho": 1, "tau": 1}
        assert result.record_count == 3

    def test_key_with_nothing_defined_is_none(self):
        result = macro_average([{"rho": 1.0, "tau": None}, {"rho": 0.0, "tau": None}])
        assert result.means["tau"] is None
        assert result.excluded["tau"] == 2

    def test_all_undefined_everywhere_raises(self):
        with pytest.raises(AllUndefined):
            macro_average([{"rho": None}, {"rho": None}])
        with pytest.raises(AllUndefined):
            macro_average([])


class TestQuartiles:
    def test_bucket_sizes_differ_by_at_most_one(self, debatepedia):
        for g in debatepedia:
            for key in (QuartileKey.LENGTH_TOKENS, QuartileKey.POSITION):
                buckets = quartile_split(g, key)
                sizes = [len(b) for b in buckets.buckets]
                assert sum(sizes) == len(g)
                assert max(sizes) - min(sizes) <= 1
                assert sizes == sorted(sizes, reverse=True)

    def test_position_buckets_follow_chronology(self, sobriety):
        buckets = quartile_split(sobriety, QuartileKey.POSITION)
        assert buckets.buckets == ((1, 2), (3, 4), (5, 6), (7, 8))
        assert buckets.labels == ("PQ1", "PQ2", "PQ3", "PQ4")

    def test_length_buckets_sorted_by_token_count(self, sobriety):
        buckets = quartile_split(sobriety, QuartileKey.LENGTH_TOKENS)
        flat = [aid for bucket in buckets.buckets for aid in bucket]
        counts = [whitespace_tokens(sobriety.by_id[a].text) for a in flat]
        assert counts == sorted(counts)
        assert buckets.labels == ("LQ1", "LQ2", "LQ3", "LQ4")

    def test_five_node_split_2_1_1_1(self):
        g = make_graph(5, [])
        buckets = quartile_split(g, QuartileKey.POSITION)
        assert [len(b) for b in buckets.buckets] == [2, 1, 1, 1]

    def test_restrict_ranking(self):
        r = ranking_of({1: 0.9, 2: 0.5, 3: 0.5, 4: 0.1})
        restricted = restrict_ranking(r, {2, 3, 4})
        assert restricted.tie_groups == ((2, 3), (4,))

    def test_quartile_correlations_gold_vs_gold(self, sobriety):
        gold = gold_ranking(acceptability(sobriety))
        buckets = quartile_split(sobriety, QuartileKey.POSITION)
        rows = quartile_correlations(gold, gold, buckets)
        assert [row.label for row in rows] == ["PQ1", "PQ2", "PQ3", "PQ4"]
        for row in rows:
            assert row.rho is None or row.rho == pytest.approx(1.0)
            assert row.tau is None or row.tau == pytest.approx(1.0)


def test_whitespace_tokens():
    assert whitespace_tokens("one two  three") == 3
    assert whitespace_tokens("  padded  ") == 1
