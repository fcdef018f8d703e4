"""Weighted similarity subgraphs and random-walk community detection.

The second stage of a query: estimate all pairwise similarities among the
expanded accounts, then partition the resulting weighted graph.  The
partitioner follows the classic random-walk agglomeration: vertices whose
t-step walk distributions are close are merged first (Ward criterion), and
the cut along the merge sequence with the highest weighted Newman
modularity is returned.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import InvalidParameterError, InvalidPartitionError, SizeLimitError
from .sketch import SignatureMatrix

MAX_SUBGRAPH_MEMBERS = 2000


@dataclass(eq=False)
class WeightedSubgraph:
    """Symmetric estimated-similarity matrix over a set of accounts."""

    vertices: np.ndarray  # (m,) uint64 account ids
    weights: np.ndarray  # (m, m) float64, zero diagonal
    threshold: float

    def __len__(self) -> int:
        return int(self.vertices.size)

    def index_of(self, account_id: int) -> int:
        matches = np.nonzero(self.vertices == np.uint64(account_id))[0]
        if matches.size == 0:
            raise InvalidParameterError(f"account {account_id} not in subgraph")
        return int(matches[0])


@dataclass(eq=False)
class CommunityMap:
    """A partition of a weighted subgraph, with the merge history."""

    subgraph: WeightedSubgraph
    labels: dict[int, int]
    merge_dendrogram: list[tuple[int, int, float]]  # (vertex id, vertex id, merge height)
    modularity: float

    def to_json(self) -> str:
        edges = []
        w = self.subgraph.weights
        for i in range(len(self.subgraph)):
            for j in range(i + 1, len(self.subgraph)):
                if w[i, j] > 0:
                    edges.append([int(self.subgraph.vertices[i]), int(self.subgraph.vertices[j]), float(w[i, j])])
        return json.dumps(
            {
                "vertices": [int(v) for v in self.subgraph.vertices],
                "edges": edges,
                "labels": {str(k): v for k, v in self.labels.items()},
                "modularity": self.modularity,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "CommunityMap":
        data = json.loads(text)
        vertices = np.array(data["vertices"], dtype=np.uint64)
        m = vertices.size
        pos = {int(v): i for i, v in enumerate(vertices)}
        weights = np.zeros((m, m), dtype=np.float64)
        for i, j, w in data["edges"]:
            weights[pos[int(i)], pos[int(j)]] = w
            weights[pos[int(j)], pos[int(i)]] = w
        labels = {int(k): int(v) for k, v in data["labels"].items()}
        return cls(WeightedSubgraph(vertices, weights, 0.0), labels, [], float(data["modularity"]))


def build_weighted_subgraph(
    matrix: SignatureMatrix, members: list[int], threshold: float = 0.01
) -> WeightedSubgraph:
    """All pairwise similarity estimates among ``members``; weights below
    ``threshold`` are zeroed."""
    if len(set(int(m) for m in members)) != len(members):
        raise InvalidParameterError("members must be duplicate-free")
    if len(members) > MAX_SUBGRAPH_MEMBERS:
        raise SizeLimitError(f"{len(members)} members exceed the {MAX_SUBGRAPH_MEMBERS} bound")
    rows = []
    for mid in members:
        row = matrix.row_of(mid)
        if row is None:
            raise InvalidParameterError(f"unknown account id {mid}")
        rows.append(row)
    rows = np.array(rows, dtype=np.int64)
    m = rows.size
    vals = matrix.values[rows]
    nonempty = matrix.degrees[rows] > 0
    weights = np.zeros((m, m), dtype=np.float64)
    for i in range(m):
        if not nonempty[i]:
            continue
        frac = np.count_nonzero(vals == vals[i], axis=1) / matrix.k
        weights[i] = np.where(nonempty, frac, 0.0)
    np.fill_diagonal(weights, 0.0)
    weights[weights < threshold] = 0.0
    return WeightedSubgraph(matrix.ids[rows], weights, float(threshold))


def modularity(graph: WeightedSubgraph, labels: Mapping[int, int]) -> float:
    """Weighted Newman modularity of a partition,
    ``Q = sum_c (w_in_c / W - (w_tot_c / 2W)^2)``."""
    for v in graph.vertices:
        if int(v) not in labels:
            raise InvalidPartitionError(f"vertex {int(v)} has no community label")
    w = graph.weights
    total = w.sum() / 2.0
    if total == 0.0:
        return 0.0
    strength = w.sum(axis=1)
    label_arr = np.array([labels[int(v)] for v in graph.vertices])
    q = 0.0
    for c in np.unique(label_arr):
        mask = label_arr == c
        w_in = w[np.ix_(mask, mask)].sum() / 2.0
        w_tot = strength[mask].sum()
        q += w_in / total - (w_tot / (2.0 * total)) ** 2
    return float(q)


class _MergeState:
    """Bookkeeping for one community during agglomeration."""

    __slots__ = ("size", "rep", "pvec", "w_in", "w_tot", "cross", "members")

    def __init__(self, size, rep, pvec, w_in, w_tot, cross, members):
        self.size = size
        self.rep = rep  # smallest account id, used for deterministic ties
        self.pvec = pvec
        self.w_in = w_in
        self.w_tot = w_tot
        self.cross = cross  # community index -> total cross weight
        self.members = members  # vertex positions in the subgraph


def walktrap(graph: WeightedSubgraph, t: int = 4) -> CommunityMap:
    """Partition a weighted subgraph by agglomerating random-walk profiles.

    Vertices with zero strength take no part in the walks and end up as
    singleton communities.  At every step the adjacent pair whose merge
    least increases the within-community walk-distance variance is fused
    (ties broken by the smallest account-id pair); the returned partition
    is the cut of the merge sequence with maximum modularity.
    """
    if len(graph) == 0:
        raise InvalidParameterError("subgraph is empty")
    if t < 1:
        raise InvalidParameterError("walk length t must be >= 1")
    n = len(graph)
    w = graph.weights
    strength = w.sum(axis=1)
    total = strength.sum() / 2.0
    ids = graph.vertices.astype(np.int64)

    active = np.nonzero(strength > 0)[0]
    if total == 0.0 or active.size == 0:
        labels = {int(ids[i]): i for i in range(n)}
        return CommunityMap(graph, _relabel(labels), [], 0.0)

    wa = w[np.ix_(active, active)]
    p = wa / wa.sum(axis=1, keepdims=True)
    pt = np.linalg.matrix_power(p, t)
    inv_d = 1.0 / strength[active]
    na = active.size

    comms: dict[int, _MergeState] = {}
    for local, v in enumerate(active):
        comms[int(v)] = _MergeState(1, int(ids[v]), pt[local], 0.0, float(strength[v]), {}, [int(v)])
    for li, v in enumerate(active):
        for lj in np.nonzero(wa[li] > 0)[0]:
            u = active[lj]
            if u != v:
                comms[int(v)].cross[int(u)] = float(wa[li, lj])

    def delta_sigma(c1: int, c2: int) -> float:
        s1, s2 = comms[c1].size, comms[c2].size
        diff = comms[c1].pvec - comms[c2].pvec
        r2 = float(np.dot(diff * diff, inv_d))
        return (s1 * s2) / (s1 + s2) * r2 / na

    heap: list[tuple[float, int, int, int, int]] = []
    for c1 in comms:
        for c2 in comms[c1].cross:
            if c1 < c2:
                r1, r2_ = comms[c1].rep, comms[c2].rep
                heapq.heappush(heap, (delta_sigma(c1, c2), min(r1, r2_), max(r1, r2_), c1, c2))

    def q_of(c: int) -> float:
        return comms[c].w_in / total - (comms[c].w_tot / (2.0 * total)) ** 2

    q_now = sum(q_of(c) for c in comms)
    q_by_step = [q_now]
    merges: list[tuple[int, int, int, float]] = []  # (comm a, comm b, new comm, height)
    dendrogram: list[tuple[int, int, float]] = []
    next_comm = n
    alive = set(comms)

    while heap:
        dsig, _, _, c1, c2 = heapq.heappop(heap)
        if c1 not in alive or c2 not in alive:
            continue
        a, b = comms[c1], comms[c2]
        cn = next_comm
        next_comm += 1
        pvec = (a.size * a.pvec + b.size * b.pvec) / (a.size + b.size)
        cross: dict[int, float] = {}
        for src in (a.cross, b.cross):
            for other, wgt in src.items():
                if other not in (c1, c2):
                    cross[other] = cross.get(other, 0.0) + wgt
        merged = _MergeState(
            a.size + b.size,
            min(a.rep, b.rep),
            pvec,
            a.w_in + b.w_in + a.cross.get(c2, 0.0),
            a.w_tot + b.w_tot,
            cross,
            a.members + b.members,
        )
        q_now -= q_of(c1) + q_of(c2)
        alive.discard(c1)
        alive.discard(c2)
        comms[cn] = merged
        alive.add(cn)
        q_now += q_of(cn)
        for other in cross:
            oc = comms[other].cross
            oc.pop(c1, None)
            oc.pop(c2, None)
            oc[cn] = cross[other]
            r1, r2_ = merged.rep, comms[other].rep
            heapq.heappush(
                heap, (delta_sigma(cn, other), min(r1, r2_), max(r1, r2_), min(cn, other), max(cn, other))
            )
        merges.append((c1, c2, cn, float(dsig)))
        dendrogram.append((a.rep, b.rep, float(dsig)))
        q_by_step.append(q_now)

    best_step = int(np.argmax(q_by_step))

    # replay the first best_step merges to materialise the chosen partition
    parent: dict[int, int] = {}
    for c1, c2, cn, _ in merges[:best_step]:
        parent[c1] = cn
        parent[c2] = cn

    def find(c: int) -> int:
        while c in parent:
            c = parent[c]
        return c

    labels: dict[int, int] = {}
    for v in range(n):
        if strength[v] > 0:
            labels[int(ids[v])] = find(v)
        else:
            labels[int(ids[v])] = -1 - v  # isolated: unique singleton marker
    labels = _relabel(labels)
    return CommunityMap(graph, labels, dendrogram, float(q_by_step[best_step]))


def _relabel(raw: dict[int, int]) -> dict[int, int]:
    """Renumber communities 0..C-1 ordered by their smallest account id."""
    mins: dict[int, int] = {}
    for acct, com in raw.items():
        mins[com] = min(mins.get(com, acct), acct)
    order = sorted(mins, key=lambda c: mins[c])
    remap = {c: i for i, c in enumerate(order)}
    return {acct: remap[com] for acct, com in raw.items()}
