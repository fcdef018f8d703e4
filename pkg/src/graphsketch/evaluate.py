"""Quality metrics, the PageRank baseline, and estimator experiments.

Community-goodness metrics operate on a weighted graph: internal weight
``m_s``, boundary weight ``c_s``, and the derived conductance, separability,
density, clustering, cohesiveness and conductance ratio.  Undefined metric
values are reported as ``nan`` (or ``inf`` for separability with a closed
boundary) rather than raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .community import WeightedSubgraph
from .errors import InvalidParameterError
from .expansion import ExpansionResult, SeedSet
from .ingest import Dataset, GroundTruth
from .sketch import HashFamily

__all__ = [
    "GroundTruth",
    "PprParams",
    "AccountGraph",
    "observed_account_graph",
    "internal_external_weights",
    "conductance",
    "separability",
    "density",
    "weighted_clustering",
    "cohesiveness",
    "conductance_ratio",
    "personalized_pagerank",
    "recall_curve",
    "auc",
    "estimator_error_experiment",
    "rank_correlation_experiment",
    "recall_benchmark",
]


@dataclass(frozen=True)
class PprParams:
    """Teleport set, iteration count, and damping for personalised PageRank."""

    teleport_set: SeedSet
    iterations: int = 3
    damping: float = 0.85

    def __post_init__(self) -> None:
        if not 0.0 < self.damping < 1.0:
            raise InvalidParameterError("damping must lie in (0, 1)")
        if self.iterations < 1:
            raise InvalidParameterError("iterations must be >= 1")


@dataclass(eq=False)
class AccountGraph:
    """Unweighted account-to-account graph observed directly from the edges."""

    ids: np.ndarray  # (n,) uint64
    adjacency: sp.csr_matrix  # (n, n) float64


def observed_account_graph(dataset: Dataset, undirected: bool = True) -> AccountGraph:
    """Edges between accounts: a -> b when b's own universe id is in N(a)."""
    handles = dataset.account_universe_ids
    if handles is None:
        raise InvalidParameterError("dataset does not map accounts into the neighbour universe")
    order = np.argsort(handles, kind="stable")
    sorted_handles = handles[order]
    rows, cols = [], []
    for i, ns in enumerate(dataset.accounts):
        if ns.degree == 0:
            continue
        # membership test: neighbour id present among the account handles
        pos = np.searchsorted(sorted_handles, ns.neighbors)
        valid = pos < sorted_handles.size
        match = np.zeros(ns.neighbors.size, dtype=bool)
        match[valid] = sorted_handles[pos[valid]] == ns.neighbors[valid]
        targets = order[pos[match]]
        targets = targets[targets != i]
        rows.extend([i] * targets.size)
        cols.extend(int(t) for t in targets)
    n = len(dataset)
    adj = sp.coo_matrix(
        (np.ones(len(rows)), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
        shape=(n, n),
    ).tocsr()
    adj.data[:] = 1.0
    if undirected:
        adj = adj.maximum(adj.T)
    return AccountGraph(dataset.ids, adj)


def internal_external_weights(graph: WeightedSubgraph, members: set[int]) -> tuple[float, float]:
    """(m_s, c_s): weight inside the member set and weight crossing its boundary."""
    mask = np.zeros(len(graph), dtype=bool)
    present = {int(v): i for i, v in enumerate(graph.vertices)}
    for m in members:
        if int(m) not in present:
            raise InvalidParameterError(f"member {m} is not a graph vertex")
        mask[present[int(m)]] = True
    w = graph.weights
    m_s = float(w[np.ix_(mask, mask)].sum() / 2.0)
    c_s = float(w[np.ix_(mask, ~mask)].sum())
    return m_s, c_s


def conductance(m_s: float, c_s: float) -> float:
    """Boundary weight over total volume; nan when the set touches no weight."""
    if m_s < 0 or c_s < 0:
        raise InvalidParameterError("weights must be non-negative")
    if m_s == 0 and c_s == 0:
        return math.nan
    return c_s / (2.0 * m_s + c_s)


def separability(m_s: float, c_s: float) -> float:
    """Internal over boundary weight; +inf for a closed boundary."""
    if m_s < 0 or c_s < 0:
        raise InvalidParameterError("weights must be non-negative")
    if m_s == 0 and c_s == 0:
        return math.nan
    if c_s == 0:
        return math.inf
    return m_s / c_s


def density(m_s: float, n_s: int) -> float:
    """Internal weight relative to a unit-weight clique on the same vertices."""
    if n_s < 2:
        raise InvalidParameterError("density needs at least 2 members")
    return 2.0 * m_s / (n_s * (n_s - 1))


def weighted_clustering(graph: WeightedSubgraph, members: set[int]) -> float:
    """Mean triadic-closure ratio over member vertices.

    Per vertex the numerator is the weighted closed-triangle mass
    ``(W^3)_ii`` and the denominator the same quantity with the middle hop
    replaced by the best possible weight within the set.
    """
    if len(members) < 3:
        raise InvalidParameterError("clustering needs at least 3 members")
    idx = sorted(graph.index_of(m) for m in members)
    ws = graph.weights[np.ix_(idx, idx)]
    wmax = float(ws.max())
    if wmax == 0.0:
        return math.nan
    m = len(idx)
    wmax_mat = np.full((m, m), wmax)
    np.fill_diagonal(wmax_mat, 0.0)
    num = np.diag(ws @ ws @ ws)
    den = np.diag(ws @ wmax_mat @ ws)
    ok = den > 0
    if not ok.any():
        return math.nan
    return float(np.mean(num[ok] / den[ok]))


def _sweep_min_conductance(ws: np.ndarray, order: np.ndarray) -> float:
    """Minimum small-side conductance over prefix cuts of ``order``."""
    m = ws.shape[0]
    strength = ws.sum(axis=1)
    total_vol = float(strength.sum())
    in_mask = np.zeros(m, dtype=bool)
    vol_in = 0.0
    w_in = 0.0
    best = math.inf
    for t in range(m - 1):
        v = order[t]
        w_in += float(ws[v, in_mask].sum())
        in_mask[v] = True
        vol_in += float(strength[v])
        cut = vol_in - 2.0 * w_in
        small = min(vol_in, total_vol - vol_in)
        value = 0.0 if small == 0.0 else cut / small
        best = min(best, value)
    return best


def cohesiveness(
    graph: WeightedSubgraph,
    members: set[int],
    samples: int = 10,
    seed: int = 0,
    iterations: int = 3,
    damping: float = 0.85,
) -> float:
    """Minimum conductance of any sub-community found by seeded sweeps.

    For each sample a random tenth of the members seeds a personalised
    PageRank on the induced subgraph; prefix cuts of the score ordering are
    swept and the best (small-side) conductance is kept.  Low values mean
    the set splits easily.
    """
    if len(members) < 4:
        raise InvalidParameterError("cohesiveness needs at least 4 members")
    member_ids = sorted(int(m) for m in members)
    idx = [graph.index_of(m) for m in member_ids]
    ws = graph.weights[np.ix_(idx, idx)]
    m = len(member_ids)
    rng = np.random.default_rng(seed)
    subset_size = max(1, m // 10)
    best = math.inf
    induced = WeightedSubgraph(np.array(member_ids, dtype=np.uint64), ws, graph.threshold)
    for _ in range(samples):
        chosen = rng.choice(m, size=subset_size, replace=False)
        teleport = SeedSet.of([member_ids[c] for c in sorted(chosen)])
        params = PprParams(teleport, iterations=iterations, damping=damping)
        scored = personalized_pagerank(induced, params, exclude_seeds=False)
        score_by_id = {acct: s for acct, s in scored}
        scores = np.array([score_by_id[i] for i in member_ids])
        order = np.lexsort((np.array(member_ids), -scores))
        best = min(best, _sweep_min_conductance(ws, order))
    return best


def conductance_ratio(con: float, coh: float) -> float:
    """Conductance over cohesiveness; nan when cohesiveness is 0 or undefined."""
    if math.isnan(con) or math.isnan(coh) or coh == 0:
        return math.nan
    return con / coh


def personalized_pagerank(
    graph: WeightedSubgraph | AccountGraph,
    params: PprParams,
    exclude_seeds: bool = True,
) -> list[tuple[int, float]]:
    """Power iteration with teleportation restricted to the seed set.

    ``x <- damping * (P^T x + dangling_mass * v) + (1 - damping) * v`` is
    applied exactly ``iterations`` times from ``x0 = v``; rows without
    out-weight hand their mass back to the teleport vector, so the scores
    keep summing to one.  Output is sorted by score descending, ties by
    ascending id.
    """
    if isinstance(graph, WeightedSubgraph):
        ids = graph.vertices
        weights = sp.csr_matrix(graph.weights)
    else:
        ids = graph.ids
        weights = graph.adjacency
    n = ids.size
    pos = {int(v): i for i, v in enumerate(ids)}
    teleport_rows = []
    for s in params.teleport_set.seeds:
        if int(s) not in pos:
            raise InvalidParameterError(f"teleport account {s} is not in the graph")
        teleport_rows.append(pos[int(s)])
    if not teleport_rows:
        raise InvalidParameterError("empty teleport set")

    out = np.asarray(weights.sum(axis=1)).ravel()
    dangling = out == 0.0
    inv_out = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, out))
    transition = sp.diags(inv_out) @ weights  # row-stochastic except dangling rows

    v = np.zeros(n)
    v[teleport_rows] = 1.0 / len(teleport_rows)
    x = v.copy()
    d = params.damping
    for _ in range(params.iterations):
        dangling_mass = float(x[dangling].sum())
        x = d * (transition.T @ x + dangling_mass * v) + (1.0 - d) * v

    order = np.lexsort((ids, -x))
    seeds = set(params.teleport_set.seeds)
    ranked = []
    for i in order:
        acct = int(ids[i])
        if exclude_seeds and acct in seeds:
            continue
        ranked.append((acct, float(x[i])))
    return ranked


def _ranking_ids(ranking) -> list[int]:
    if isinstance(ranking, ExpansionResult):
        return [acct for acct, _ in ranking.ranked]
    ids = []
    for item in ranking:
        if isinstance(item, tuple):
            ids.append(int(item[0]))
        else:
            ids.append(int(item))
    return ids


def recall_curve(ranking, truth: set[int], init: SeedSet) -> np.ndarray:
    """Recall after each of the top-t selections, t up to |truth| - |init|.

    Recall is the fraction of the non-seed truth members recovered, so a
    perfect ranking reaches exactly 1 at the end of the curve.
    """
    truth_ids = set(int(x) for x in truth)
    init_ids = set(init.seeds)
    if not init_ids <= truth_ids:
        raise InvalidParameterError("seed set must be contained in the truth community")
    length = len(truth_ids) - len(init_ids)
    if length <= 0:
        raise InvalidParameterError("truth community no larger than the seed set")
    targets = truth_ids - init_ids
    curve = np.zeros(length, dtype=np.float64)
    hits = 0
    ids = _ranking_ids(ranking)
    for t in range(length):
        if t < len(ids) and ids[t] in targets:
            hits += 1
        curve[t] = hits / length
    return curve


def auc(curve: np.ndarray) -> float:
    """Area under a recall curve, scaled so a perfect ranking scores 0.5.

    The curve is integrated by trapezoid from an implicit origin with the
    selection axis normalised to [0, 1]; the immediately-saturating
    diagonal curve of a perfect ranking then integrates to exactly 1/2.
    """
    curve = np.asarray(curve, dtype=np.float64)
    if curve.size == 0:
        raise InvalidParameterError("empty recall curve")
    if curve.min() < 0 or curve.max() > 1:
        raise InvalidParameterError("recall values must lie in [0, 1]")
    full = np.concatenate([[0.0], curve])
    return float(np.trapezoid(full, dx=1.0 / curve.size))


def estimator_error_experiment(
    dataset: Dataset,
    k_values: list[int],
    pairs: int,
    seed: int = 0,
) -> list[tuple[int, float, float]]:
    """|estimate - exact| similarity error at several signature lengths.

    Samples account pairs, computes the exact Jaccard once per pair, and
    sketches both sides with an independent hash family per signature
    length.  Returns (k, mean absolute error, standard error) rows.
    """
    from .ingest import exact_jaccard

    n = len(dataset)
    if n * (n - 1) // 2 < pairs:
        raise InvalidParameterError("dataset has fewer distinct pairs than requested")
    rng = np.random.default_rng(seed)
    seen = set()
    sampled: list[tuple[int, int]] = []
    while len(sampled) < pairs:
        i, j = rng.integers(0, n, size=2)
        if i == j:
            continue
        key = (min(i, j), max(i, j))
        if key not in seen:
            seen.add(key)
            sampled.append(key)
    exact = np.array(
        [exact_jaccard(dataset.accounts[i], dataset.accounts[j]) for i, j in sampled]
    )
    rows = []
    for k in sorted(k_values):
        family = HashFamily.create(k, dataset.universe_size, seed * 100003 + k)
        cache: dict[int, np.ndarray] = {}

        def sig(acct_row: int) -> np.ndarray:
            if acct_row not in cache:
                cache[acct_row] = family.hash_set(dataset.accounts[acct_row].neighbors)
            return cache[acct_row]

        est = np.array(
            [np.count_nonzero(sig(i) == sig(j)) / k for i, j in sampled]
        )
        err = np.abs(est - exact)
        rows.append((k, float(err.mean()), float(err.std(ddof=1) / math.sqrt(pairs))))
    return rows


def rank_correlation_experiment(
    dataset: Dataset,
    target: int,
    k_small: int | None,
    k_large: int | None,
    seed: int = 0,
    min_comparators: int = 20,
) -> tuple[float, float]:
    """Spearman correlation between exact and estimated similarity rankings.

    Comparators are every account with nonzero exact similarity to the
    target.  Passing ``None`` for a signature length selects the exact
    computation pathway (correlation 1 by construction).  Degenerate
    constant rankings yield nan.
    """
    from scipy.stats import spearmanr

    from .ingest import exact_jaccard

    target_ns = dataset.neighbor_set(target)
    comparators = []
    exact = []
    for ns in dataset.accounts:
        if ns.account == target_ns.account:
            continue
        j = exact_jaccard(target_ns, ns)
        if j > 0:
            comparators.append(ns)
            exact.append(j)
    if len(comparators) < min_comparators:
        raise InvalidParameterError(
            f"target has {len(comparators)} nonzero-similarity comparators, needs {min_comparators}"
        )
    exact = np.array(exact)

    def estimated(k: int | None, salt: int) -> np.ndarray:
        if k is None:
            return exact.copy()
        family = HashFamily.create(k, dataset.universe_size, seed * 99991 + salt)
        tsig = family.hash_set(target_ns.neighbors)
        return np.array(
            [np.count_nonzero(tsig == family.hash_set(ns.neighbors)) / k for ns in comparators]
        )

    rhos = []
    for salt, k in enumerate((k_small, k_large)):
        est = estimated(k, salt)
        if np.all(est == est[0]) or np.all(exact == exact[0]):
            rhos.append(math.nan)
        else:
            rhos.append(float(spearmanr(exact, est).statistic))
    return rhos[0], rhos[1]


def recall_benchmark(
    dataset: Dataset,
    truth: GroundTruth,
    k: int = 1000,
    n_seeds: int = 30,
    n_draws: int = 5,
    seed: int = 0,
    workers: int = 2,
) -> dict[str, list[float]]:
    """Recall-curve areas of the two expansion rankers and the PageRank baseline.

    For every ground-truth community and seed draw, the seeds are expanded
    to the community's full size and the area under the recall curve is
    recorded.  PageRank runs on the directly observed account-to-account
    graph, teleporting to the same seeds for three iterations.
    """
    from .expansion import StopKind, StoppingRule, expand_ac, expand_ms
    from .lsh import build_index
    from .sketch import HashFamily, build_signatures

    family = HashFamily.create(k, dataset.universe_size, seed)
    matrix = build_signatures(dataset, family, workers=workers)
    index = build_index(matrix)
    observed = observed_account_graph(dataset)
    rng = np.random.default_rng(seed)

    scores: dict[str, list[float]] = {"ms": [], "ac": [], "ppr": []}
    for tag in sorted(truth.communities):
        members = sorted(truth.communities[tag])
        target = len(members) - n_seeds
        if target <= 0:
            raise InvalidParameterError(f"community {tag} smaller than the seed draw")
        for _ in range(n_draws):
            chosen = rng.choice(len(members), size=n_seeds, replace=False)
            seeds = SeedSet.of([members[c] for c in sorted(chosen)])
            stop = StoppingRule(StopKind.FIXED_COUNT, target)
            truth_set = set(members)
            for name, expander in (("ms", expand_ms), ("ac", expand_ac)):
                result = expander(index, matrix, seeds, stop)
                scores[name].append(auc(recall_curve(result, truth_set, seeds)))
            params = PprParams(seeds, iterations=3)
            ranking = personalized_pagerank(observed, params)[:target]
            scores["ppr"].append(auc(recall_curve(ranking, truth_set, seeds)))
    return scores
