import math

import numpy as np
import pytest

from graphsketch.community import WeightedSubgraph
from graphsketch.errors import InvalidParameterError
from graphsketch.evaluate import (
    PprParams,
    auc,
    cohesiveness,
    conductance,
    conductance_ratio,
    density,
    estimator_error_experiment,
    internal_external_weights,
    observed_account_graph,
    personalized_pagerank,
    rank_correlation_experiment,
    recall_curve,
    separability,
    weighted_clustering,
)
from graphsketch.expansion import SeedSet
from graphsketch.ingest import generate_planted_partition


def graph_from(weights: np.ndarray, ids=None) -> WeightedSubgraph:
    n = weights.shape[0]
    vertices = np.array(ids if ids is not None else range(n), dtype=np.uint64)
    return WeightedSubgraph(vertices, weights.astype(np.float64), 0.0)


def random_graph(n: int, rng: np.random.Generator, p_edge: float = 0.6) -> WeightedSubgraph:
    w = rng.uniform(0.05, 1.0, size=(n, n)) * (rng.uniform(size=(n, n)) < p_edge)
    w = np.triu(w, 1) + np.triu(w, 1).T
    return graph_from(w)


def brute_internal_external(w: np.ndarray, members: set[int]) -> tuple[float, float]:
    m_s = c_s = 0.0
    n = w.shape[0]
    for i in range(n):
        for j in range(n):
            if i in members and j in members and i < j:
                m_s += w[i, j]
            elif i in members and j not in members:
                c_s += w[i, j]
    return m_s, c_s


def test_internal_external_weights_on_embedded_clique():
    w = np.zeros((6, 6))
    for i in range(4):
        for j in range(4):
            if i != j:
                w[i, j] = 1.0
    g = graph_from(w)
    m_s, c_s = internal_external_weights(g, {0, 1, 2, 3})
    assert (m_s, c_s) == (6.0, 0.0)

    w2 = np.zeros((3, 3))
    w2[0, 1] = w2[1, 0] = 0.5
    m_s, c_s = internal_external_weights(graph_from(w2), {0})
    assert (m_s, c_s) == (0.0, 0.5)

    with pytest.raises(InvalidParameterError):
        internal_external_weights(g, {99})


def test_internal_external_weights_match_brute_force():
    rng = np.random.default_rng(4)
    g = random_graph(20, rng)
    members = set(int(x) for x in rng.choice(20, size=8, replace=False))
    m_s, c_s = internal_external_weights(g, members)
    bm, bc = brute_internal_external(g.weights, members)
    assert m_s == pytest.approx(bm, abs=1e-9)
    assert c_s == pytest.approx(bc, abs=1e-9)


def test_conductance_values():
    assert conductance(6, 0) == 0.0
    assert conductance(0, 3) == 1.0
    assert conductance(6, 3) == pytest.approx(0.2)
    assert math.isnan(conductance(0, 0))


def test_separability_values_and_identity():
    assert separability(6, 3) == pytest.approx(2.0)
    assert separability(6, 0) == math.inf
    assert math.isnan(separability(0, 0))
    rng = np.random.default_rng(3)
    for _ in range(50):
        m_s, c_s = rng.uniform(0.01, 10, size=2)
        con = conductance(m_s, c_s)
        assert abs(separability(m_s, c_s) - (1 - con) / (2 * con)) < 1e-12


def test_density_values():
    assert density(6, 4) == pytest.approx(1.0)  # unit-weight K4
    assert density(0, 5) == 0.0
    assert density(1.5, 3) == pytest.approx(0.5)
    with pytest.raises(InvalidParameterError):
        density(1.0, 1)


def test_weighted_clustering_known_shapes():
    tri = graph_from(np.ones((3, 3)) - np.eye(3))
    assert weighted_clustering(tri, {0, 1, 2}) == pytest.approx(1.0)
    path = np.zeros((3, 3))
    path[0, 1] = path[1, 0] = path[1, 2] = path[2, 1] = 1.0
    assert weighted_clustering(graph_from(path), {0, 1, 2}) == pytest.approx(0.0)
    assert math.isnan(weighted_clustering(graph_from(np.zeros((3, 3))), {0, 1, 2}))


def test_weighted_clustering_matches_matrix_oracle():
    rng = np.random.default_rng(8)
    g = random_graph(10, rng)
    members = set(range(10))
    ws = g.weights
    wmax = ws.max()
    num = np.zeros(10)
    den = np.zeros(10)
    for i in range(10):
        for j in range(10):
            for k in range(10):
                num[i] += ws[i, j] * ws[j, k] * ws[k, i]
                den[i] += ws[i, j] * (wmax if j != k else 0.0) * ws[k, i]
    ok = den > 0
    expect = float(np.mean(num[ok] / den[ok]))
    assert weighted_clustering(g, members) == pytest.approx(expect, abs=1e-9)


def exhaustive_cohesiveness(w: np.ndarray) -> float:
    """Minimum small-side conductance over every proper subset."""
    from itertools import combinations

    n = w.shape[0]
    strength = w.sum(axis=1)
    total = strength.sum()
    best = math.inf
    for size in range(1, n):
        for subset in combinations(range(n), size):
            mask = np.zeros(n, dtype=bool)
            mask[list(subset)] = True
            cut = w[np.ix_(mask, ~mask)].sum()
            vol = strength[mask].sum()
            small = min(vol, total - vol)
            if small > 0:
                best = min(best, cut / small)
            elif cut == 0:
                best = 0.0
    return best


def test_cohesiveness_clique():
    w = np.ones((8, 8)) - np.eye(8)
    g = graph_from(w)
    value = cohesiveness(g, set(range(8)), samples=10, seed=1)
    assert value > 0.5
    assert value == pytest.approx(exhaustive_cohesiveness(w), abs=1e-9)


def test_cohesiveness_bridged_cliques_is_low():
    w = np.zeros((8, 8))
    for grp in (range(4), range(4, 8)):
        for i in grp:
            for j in grp:
                if i != j:
                    w[i, j] = 1.0
    w[3, 4] = w[4, 3] = 0.05
    g = graph_from(w)
    value = cohesiveness(g, set(range(8)), samples=10, seed=2)
    assert value < 0.1
    assert value == pytest.approx(exhaustive_cohesiveness(w), abs=1e-9)


def test_cohesiveness_deterministic():
    rng = np.random.default_rng(11)
    g = random_graph(12, rng)
    a = cohesiveness(g, set(range(12)), samples=10, seed=5)
    b = cohesiveness(g, set(range(12)), samples=10, seed=5)
    assert a == b


def test_conductance_ratio():
    assert conductance_ratio(0.5, 0.25) == pytest.approx(2.0)
    assert conductance_ratio(0.0, 0.4) == 0.0
    assert math.isnan(conductance_ratio(0.5, 0.0))
    assert math.isnan(conductance_ratio(math.nan, 0.3))


def test_ppr_single_vertex():
    w = np.zeros((1, 1))
    scored = personalized_pagerank(graph_from(w), PprParams(SeedSet.of([0])), exclude_seeds=False)
    assert scored == [(0, pytest.approx(1.0))]


def test_ppr_directed_star():
    import scipy.sparse as sp

    from graphsketch.evaluate import AccountGraph

    leaves = 4
    w = np.zeros((leaves + 1, leaves + 1))
    w[0, 1:] = 1.0
    g = AccountGraph(np.arange(leaves + 1, dtype=np.uint64), sp.csr_matrix(w))
    scored = dict(
        personalized_pagerank(g, PprParams(SeedSet.of([0]), iterations=1), exclude_seeds=False)
    )
    assert scored[0] == pytest.approx(0.15)
    for leaf in range(1, leaves + 1):
        assert scored[leaf] == pytest.approx(0.85 / leaves)


def test_ppr_symmetry_and_mass_conservation():
    # symmetric barbell: scores on mirrored vertices match, mass sums to one
    w = np.zeros((6, 6))
    for grp in (range(3), range(3, 6)):
        for i in grp:
            for j in grp:
                if i != j:
                    w[i, j] = 1.0
    w[2, 3] = w[3, 2] = 1.0
    g = graph_from(w)
    scored = dict(
        personalized_pagerank(g, PprParams(SeedSet.of([2, 3]), iterations=3), exclude_seeds=False)
    )
    assert scored[0] == pytest.approx(scored[5])
    assert scored[1] == pytest.approx(scored[4])
    assert scored[2] == pytest.approx(scored[3])
    assert sum(scored.values()) <= 1.0 + 1e-9

    with pytest.raises(InvalidParameterError):
        personalized_pagerank(g, PprParams(SeedSet.of([99])))


def test_recall_curve_values():
    init = SeedSet.of(list(range(30)))
    truth = set(range(40))
    top5 = recall_curve(list(range(30, 35)), truth, init)
    assert top5[4] == pytest.approx(0.5)
    assert np.all(np.diff(top5) >= 0)
    none = recall_curve(list(range(100, 110)), truth, init)
    assert np.all(none == 0.0)
    perfect = recall_curve(list(range(30, 40)), truth, init)
    assert perfect[-1] == 1.0
    with pytest.raises(InvalidParameterError):
        recall_curve([], {1, 2}, SeedSet.of([1, 2]))
    with pytest.raises(InvalidParameterError):
        recall_curve([], {1}, SeedSet.of([5]))


def test_auc_values():
    for length in (1, 7, 50, 313):
        perfect = np.arange(1, length + 1) / length
        assert auc(perfect) == pytest.approx(0.5, abs=1e-12)
    assert auc(np.zeros(10)) == 0.0
    rng = np.random.default_rng(5)
    random_curve = np.minimum(1, np.sort(rng.uniform(0, 1, size=20)))
    assert 0.0 < auc(random_curve) < 1.0
    with pytest.raises(InvalidParameterError):
        auc(np.array([1.5]))


def test_estimator_error_experiment_identical_pair_zero():
    from graphsketch.ingest import Dataset, NeighborSet

    sets = [NeighborSet(i, np.array([2, 4, 8, 16], dtype=np.uint64)) for i in range(3)]
    ds = Dataset(sets, 20, 1.0)
    rows = estimator_error_experiment(ds, [16, 64], pairs=3, seed=1)
    for _k, mean_err, _se in rows:
        assert mean_err == 0.0


def test_estimator_error_decreases_with_k():
    ds, _ = generate_planted_partition(60, 2, 600, 0.4, 0.05, seed=19)
    rows = estimator_error_experiment(ds, [16, 256], pairs=150, seed=2)
    errs = {k: err for k, err, _ in rows}
    assert errs[256] < errs[16]


def test_estimator_error_halves_per_two_doublings():
    # error scales as 1/sqrt(k): k=250 -> k=1000 should shrink it by ~1/2
    ds, _ = generate_planted_partition(80, 2, 800, 0.4, 0.05, seed=29)
    rows = estimator_error_experiment(ds, [250, 1000], pairs=300, seed=4)
    errs = {k: err for k, err, _ in rows}
    ratio = errs[1000] / errs[250]
    assert 0.35 < ratio < 0.65


def test_rank_correlation_exact_pathway_and_errors():
    ds, _ = generate_planted_partition(60, 2, 600, 0.4, 0.05, seed=23)
    rho_small, rho_exact = rank_correlation_experiment(ds, target=0, k_small=64, k_large=None, seed=3)
    assert rho_exact == pytest.approx(1.0)
    assert -1.0 <= rho_small <= 1.0
    with pytest.raises(InvalidParameterError):
        rank_correlation_experiment(ds, target=0, k_small=8, k_large=16, min_comparators=10**6)


def test_longer_signatures_rank_better_in_most_trials():
    # k=1000 should beat k=100 on rank fidelity in at least 95 of 100 seeded runs
    ds, _ = generate_planted_partition(44, 2, 800, 0.35, 0.03, seed=37)
    wins = 0
    for trial in range(100):
        rho_small, rho_large = rank_correlation_experiment(ds, target=0, k_small=100, k_large=1000, seed=trial)
        wins += rho_large >= rho_small
    assert wins >= 95


def test_rank_correlation_degenerate_is_nan():
    from graphsketch.ingest import Dataset, NeighborSet

    # every comparator identical to the target: exact similarities constant
    sets = [NeighborSet(i, np.array([1, 2, 3], dtype=np.uint64)) for i in range(25)]
    ds = Dataset(sets, 10, 1.0)
    rho_small, rho_large = rank_correlation_experiment(ds, 0, 16, 32, min_comparators=20)
    assert math.isnan(rho_small) and math.isnan(rho_large)


def test_observed_account_graph_from_planted():
    ds, truth = generate_planted_partition(40, 2, 200, 0.9, 0.01, seed=31)
    g = observed_account_graph(ds)
    adj = g.adjacency.toarray()
    assert np.array_equal(adj, adj.T)
    assert np.all(np.diag(adj) == 0)
    # dense intra-community connectivity at p_in=0.9
    members = sorted(truth.communities[0])
    intra = adj[np.ix_(members, members)]
    assert intra.sum() > 0.7 * len(members) * (len(members) - 1)
