from __future__ import annotations

import random

import pytest

from conftest import make_graph
from oracles import order_respects, random_dag
from quadrank.errors import (
    CycleDetected,
    DanglingEndpoint,
    DuplicateId,
    DuplicateRelation,
    SelfRelation,
    UnknownArgument,
    WeightOutOfRange,
)
from quadrank.graph import (
    DEFAULT_BASE_WEIGHT,
    Argument,
    Relation,
    RelationKind,
    attackers,
    build_graph,
    pair_count,
    supporters,
    topological_order,
)


class TestArgumentValidation:
    def test_rejects_non_positive_id(self):
        with pytest.raises(ValueError):
            Argument(0, "text", 0)
        with pytest.raises(ValueError):
            Argument(-3, "text", 0)

    def test_rejects_bool_id(self):
        with pytest.raises(ValueError):
            Argument(True, "text", 0)

    def test_rejects_empty_text(self):
        with pytest.raises(ValueError):
            Argument(1, "   ", 0)

    def test_rejects_negative_chronology(self):
        with pytest.raises(ValueError):
            Argument(1, "text", -1)


class TestRelation:
    def test_self_relation_rejected(self):
        with pytest.raises(SelfRelation):
            Relation(1, 1, RelationKind.ATTACK)

    def test_kind_from_string(self):
        assert RelationKind("attack") is RelationKind.ATTACK
        assert RelationKind("support") is RelationKind.SUPPORT


class TestBuildGraph:
    def test_duplicate_id_rejected(self):
        args = [Argument(1, "a", 0), Argument(1, "b", 1)]
        with pytest.raises(DuplicateId):
            build_graph(args, [])

    def test_duplicate_chronology_rejected(self):
        args = [Argument(1, "a", 0), Argument(2, "b", 0)]
        with pytest.raises(ValueError):
            build_graph(args, [])

    def test_dangling_endpoint_rejected(self):
        with pytest.raises(DanglingEndpoint):
            make_graph(2, [(2, 3, "attack")])

    def test_duplicate_relation_rejected(self):
        with pytest.raises(DuplicateRelation):
            make_graph(2, [(2, 1, "attack"), (2, 1, "attack")])

    def test_conflicting_kinds_rejected(self):
        with pytest.raises(DuplicateRelation):
            make_graph(2, [(2, 1, "attack"), (2, 1, "support")])

    def test_unknown_weight_key_rejected(self):
        with pytest.raises(UnknownArgument):
            make_graph(2, [(2, 1, "attack")], weights={5: 0.5})

    def test_weight_out_of_range_rejected(self):
        for bad in (-0.1, 1.1, float("nan")):
            with pytest.raises(WeightOutOfRange):
                make_graph(2, [(2, 1, "attack")], weights={1: bad})

    def test_weight_bounds_inclusive(self):
        g = make_graph(2, [(2, 1, "attack")], weights={1: 0.0, 2: 1.0})
        assert g.base_weights[1] == 0.0
        assert g.base_weights[2] == 1.0

    def test_default_weight_applied(self):
        g = make_graph(2, [(2, 1, "support")], weights={2: 0.9})
        assert g.base_weights[1] == DEFAULT_BASE_WEIGHT
        assert g.base_weights[2] == 0.9

    def test_two_cycle_detected_with_path(self):
        with pytest.raises(CycleDetected) as exc:
            make_graph(2, [(2, 1, "attack"), (1, 2, "attack")])
        assert "cycle" in str(exc.value)
        assert exc.value.cycle[0] == exc.value.cycle[-1]

    def test_longer_cycle_detected(self):
        with pytest.raises(CycleDetected):
            make_graph(4, [(1, 2, "attack"), (2, 3, "support"), (3, 1, "attack"), (4, 1, "support")])

    def test_accessors(self):
        g = make_graph(3, [(2, 1, "attack"), (3, 1, "support")])
        assert attackers(g, 1) == {2}
        assert supporters(g, 1) == {3}
        assert attackers(g, 2) == set()
        with pytest.raises(UnknownArgument):
            attackers(g, 9)

    def test_length_and_ids(self):
        g = make_graph(4, [(2, 1, "attack")])
        assert len(g) == 4
        assert g.argument_ids == {1, 2, 3, 4}
        assert g.chronological_ids == (1, 2, 3, 4)


class TestTopologicalOrder:
    def test_sources_precede_targets(self):
        rng = random.Random(90125)
        for _ in range(200):
            g = random_dag(rng, max_nodes=10, density=0.35, random_weights=False)
            order = topological_order(g)
            assert sorted(order) == sorted(g.argument_ids)
            constraints = [(r.source, r.target) for r in g.relations]
            assert order_respects(tuple(order), constraints)

    def test_deterministic_min_id_tie_break(self):
        g = make_graph(4, [(2, 1, "attack"), (3, 1, "support"), (4, 2, "attack")])
        # 3 and 4 are sources with no incoming edges; 2 waits on 4, 1 on 2 and 3.
        assert topological_order(g) == [3, 4, 2, 1]


def test_pair_count_sums_combinations():
    graphs = [make_graph(4, []), make_graph(3, []), make_graph(1, [])]
    assert pair_count(graphs) == 6 + 3 + 0
