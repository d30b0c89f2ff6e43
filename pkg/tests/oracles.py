"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written with a different algorithmic shape
than the library code it checks: recursion instead of a topological pass,
brute-force pair counting instead of closed-form tau, scipy instead of
hand-rolled correlation, exhaustive enumeration instead of sampling.
"""

from __future__ import annotations

import itertools
import random
import warnings

from scipy import stats as scipy_stats

from quadrank.graph import (
    Argument,
    DebateGraph,
    Relation,
    RelationKind,
    build_graph,
)

# ---------------------------------------------------------------------------
# Recursive QuAD oracle


def quad_scores_recursive(graph: DebateGraph) -> dict[int, float]:
    """Memoized top-down recursion computed straight from the aggregator definitions."""
    memo: dict[int, float] = {}

    def strength(aid: int) -> float:
        if aid in memo:
            return memo[aid]
        theta = graph.base_weights[aid]
        attackers = [r.source for r in graph.relations if r.target == aid and r.kind is RelationKind.ATTACK]
        supporters = [r.source for r in graph.relations if r.target == aid and r.kind is RelationKind.SUPPORT]
        v_att = theta
        for b in attackers:
            v_att *= 1.0 - strength(b)
        v_sup = 1.0 - (1.0 - theta)
        if supporters:
            rest = 1.0 - theta
            for c in supporters:
                rest *= 1.0 - strength(c)
            v_sup = 1.0 - rest
        if attackers and supporters:
            result = (v_att + v_sup) / 2.0
        elif attackers:
            result = v_att
        elif supporters:
            result = v_sup
        else:
            result = theta
        memo[aid] = result
        return result

    return {aid: strength(aid) for aid in graph.argument_ids}


# ---------------------------------------------------------------------------
# Random DAG builder for fuzzing


def random_dag(
    rng: random.Random,
    max_nodes: int = 12,
    density: float = 0.4,
    random_weights: bool = True,
) -> DebateGraph:
    """A random acyclic graph: edges only from higher ids to lower ids."""
    n = rng.randint(1, max_nodes)
    args = [Argument(i, f"statement {i}", chronological_index=i - 1) for i in range(1, n + 1)]
    rels = []
    for source in range(2, n + 1):
        for target in range(1, source):
            if rng.random() < density:
                kind = RelationKind.ATTACK if rng.random() < 0.5 else RelationKind.SUPPORT
                rels.append(Relation(source, target, kind))
    weights = None
    if random_weights:
        weights = {i: rng.random() for i in range(1, n + 1)}
    return build_graph(args, rels, base_weights=weights, name=f"fuzz-{n}")


# ---------------------------------------------------------------------------
# Rank-correlation oracles (scipy + brute force)


def scipy_spearman(gold: list[float], predicted: list[float]) -> float | None:
    if len(gold) < 2:
        return None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # degenerate inputs are fuzzed on purpose
        rho = scipy_stats.spearmanr(gold, predicted).statistic
    return None if rho != rho else float(rho)  # NaN -> undefined


def scipy_kendall(gold: list[float], predicted: list[float]) -> float | None:
    if len(gold) < 2:
        return None
    tau = scipy_stats.kendalltau(gold, predicted, variant="b").statistic
    return None if tau != tau else float(tau)


def brute_force_tau_b(x: list[float], y: list[float]) -> float | None:
    """Tau-b from explicit pair counting, in exact rational arithmetic."""
    n = len(x)
    concordant = discordant = ties_x = ties_y = 0
    for i, j in itertools.combinations(range(n), 2):
        dx = (x[i] > x[j]) - (x[i] < x[j])
        dy = (y[i] > y[j]) - (y[i] < y[j])
        if dx == 0 and dy == 0:
            ties_x += 1
            ties_y += 1
        elif dx == 0:
            ties_x += 1
        elif dy == 0:
            ties_y += 1
        elif dx == dy:
            concordant += 1
        else:
            discordant += 1
    total = n * (n - 1) // 2
    denom_x = total - ties_x
    denom_y = total - ties_y
    if denom_x == 0 or denom_y == 0:
        return None
    return (concordant - discordant) / (denom_x * denom_y) ** 0.5


def fractional_ranks_oracle(values: list[float]) -> list[float]:
    """Average-of-positions ranks computed the slow, obvious way (rank 1 = best)."""
    ranks = []
    for v in values:
        greater = sum(1 for w in values if w > v)
        equal = sum(1 for w in values if w == v)
        # occupied positions: greater+1 .. greater+equal
        ranks.append(greater + (equal + 1) / 2)
    return ranks


def pearson(x: list[float], y: list[float]) -> float | None:
    n = len(x)
    if n < 2:
        return None
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0 or syy == 0:
        return None
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    return sxy / (sxx * syy) ** 0.5


# ---------------------------------------------------------------------------
# Set-based precision/recall/F1 oracle


def set_prf(gold: set, predicted: set) -> tuple[float, float, float]:
    hits = len(gold & predicted)
    precision = hits / len(predicted) if predicted else 0.0
    recall = hits / len(gold) if gold else 0.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


# ---------------------------------------------------------------------------
# Linear-extension oracle


def all_orders_satisfying(
    ids: list[int], constraints: list[tuple[int, int]], limit: int | None = None
) -> list[tuple[int, ...]]:
    """Every permutation of ids where each (before, after) constraint holds,
    by filtering the full permutation set (fine for small fixtures)."""
    must_precede = {}
    for before, after in constraints:
        must_precede.setdefault(after, set()).add(before)
    found = []
    for perm in itertools.permutations(ids):
        position = {aid: i for i, aid in enumerate(perm)}
        if all(
            position[b] < position[a]
            for a, befores in must_precede.items()
            for b in befores
        ):
            found.append(perm)
            if limit is not None and len(found) >= limit:
                break
    return found


def order_respects(order: tuple[int, ...], constraints: list[tuple[int, int]]) -> bool:
    position = {aid: i for i, aid in enumerate(order)}
    return all(position[b] < position[a] for b, a in constraints)
