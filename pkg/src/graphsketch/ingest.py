"""Edge-list ingestion, neighbourhood sets, and synthetic benchmark graphs.

An account's neighbourhood is the set of vertex ids directly connected to
it, ignoring edge direction.  Accounts (the items that later receive
signatures) are the distinct source ids of the edge list; the neighbour
universe may be much larger than the account set.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EdgeListParseError, EmptyDatasetError, InvalidParameterError

CACHE_MAGIC = b"GSE1"


@dataclass(frozen=True, eq=False)
class NeighborSet:
    """Sorted, duplicate-free neighbour ids of one account."""

    account: int
    neighbors: np.ndarray  # sorted ascending, dtype uint64

    @property
    def degree(self) -> int:
        return int(self.neighbors.size)


@dataclass(eq=False)
class Dataset:
    """An immutable collection of neighbourhood sets.

    ``universe_size`` is the size of the neighbour id space (one past the
    largest neighbour id), which is what the hash family must cover.
    ``account_universe_ids`` maps each account to its own id inside the
    neighbour universe; for edge lists the two id spaces coincide, so the
    mapping is the identity.
    """

    accounts: list[NeighborSet]
    universe_size: int
    avg_out_degree: float
    account_universe_ids: np.ndarray | None = None
    _row_of: dict[int, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not self._row_of:
            self._row_of = {ns.account: i for i, ns in enumerate(self.accounts)}

    @property
    def ids(self) -> np.ndarray:
        return np.array([ns.account for ns in self.accounts], dtype=np.uint64)

    @property
    def degrees(self) -> np.ndarray:
        return np.array([ns.degree for ns in self.accounts], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.accounts)

    def neighbor_set(self, account_id: int) -> NeighborSet:
        try:
            return self.accounts[self._row_of[int(account_id)]]
        except KeyError:
            raise InvalidParameterError(f"unknown account id {account_id}") from None

    def __contains__(self, account_id: int) -> bool:
        return int(account_id) in self._row_of


@dataclass(frozen=True)
class GroundTruth:
    """Known community memberships used to evaluate rankings."""

    communities: dict[int, frozenset[int]]

    def label_of(self, account_id: int) -> int:
        for tag, members in self.communities.items():
            if account_id in members:
                return tag
        raise InvalidParameterError(f"account {account_id} has no community label")


def exact_jaccard(a: NeighborSet, b: NeighborSet) -> float:
    """|N(a) ∩ N(b)| / |N(a) ∪ N(b)|; two empty sets count as 0."""
    if a.degree == 0 and b.degree == 0:
        return 0.0
    inter = np.intersect1d(a.neighbors, b.neighbors, assume_unique=True).size
    union = a.degree + b.degree - inter
    return inter / union


def load_edge_list(
    path: str | Path,
    direction_mode: str = "undirected",
    min_degree: int = 1,
) -> Dataset:
    """Read a TSV edge list (``src<TAB>dst`` per line, ``#`` comments).

    Every distinct source id becomes an account.  In ``undirected`` mode an
    edge also contributes the source to the destination's neighbourhood when
    the destination is itself an account; ``as_given`` keeps edges one-way.
    """
    if direction_mode not in ("undirected", "as_given"):
        raise InvalidParameterError(f"unknown direction_mode {direction_mode!r}")
    edges: list[tuple[int, int]] = []
    with open(path, "rt", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise EdgeListParseError(lineno, f"expected 2 fields, got {len(parts)}")
            try:
                src, dst = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListParseError(lineno, f"non-numeric token in {stripped!r}") from None
            if src < 0 or dst < 0:
                raise EdgeListParseError(lineno, "ids must be non-negative")
            edges.append((src, dst))
    if not edges:
        raise EmptyDatasetError(f"no edges found in {path}")

    neighbors: dict[int, set[int]] = {}
    for src, _ in edges:
        neighbors.setdefault(src, set())
    for src, dst in edges:
        neighbors[src].add(dst)
        if direction_mode == "undirected" and dst in neighbors:
            neighbors[dst].add(src)

    account_ids = sorted(neighbors)
    sets = [
        NeighborSet(acct, np.array(sorted(neighbors[acct]), dtype=np.uint64))
        for acct in account_ids
    ]
    sets = [ns for ns in sets if ns.degree >= min_degree]
    if not sets:
        raise EmptyDatasetError("no accounts left after the minimum-degree filter")
    return _finish_dataset(sets, account_universe_ids=np.array([ns.account for ns in sets], dtype=np.uint64))


def _finish_dataset(sets: list[NeighborSet], account_universe_ids: np.ndarray | None,
                    universe_size: int | None = None) -> Dataset:
    all_ids = np.concatenate([ns.neighbors for ns in sets]) if sets else np.empty(0, np.uint64)
    distinct = np.unique(all_ids)
    if universe_size is None:
        universe_size = int(distinct[-1]) + 1 if distinct.size else 0
    total = int(sum(ns.degree for ns in sets))
    avg_out = total / distinct.size if distinct.size else 0.0
    return Dataset(sets, universe_size, avg_out, account_universe_ids)


def generate_planted_partition(
    n_accounts: int,
    n_communities: int,
    universe: int,
    p_in: float,
    p_out: float,
    seed: int,
    account_p_in: float | None = None,
    account_p_out: float | None = None,
) -> tuple[Dataset, GroundTruth]:
    """Synthetic benchmark with known communities.

    The neighbour universe is split into one contiguous block per community.
    An account in community ``c`` includes each element of block ``c``
    independently with probability ``p_in`` and each element of every other
    block with ``p_out``.  Each account is also assigned its own id inside
    its community's block, so an account-to-account "observed" graph can be
    derived from the neighbourhoods.

    ``account_p_in``/``account_p_out`` optionally override the inclusion
    probabilities for the universe ids owned by accounts, modelling graphs
    where direct account-to-account edges are much sparser than shared-
    audience overlap.  By default account ids follow the block rates.
    """
    if not (0.0 <= p_out < p_in <= 1.0):
        raise InvalidParameterError("requires 0 <= p_out < p_in <= 1")
    if (account_p_in is None) != (account_p_out is None):
        raise InvalidParameterError("override both account rates or neither")
    if n_communities < 1 or n_accounts < 2 * n_communities:
        raise InvalidParameterError("need at least 2 accounts per community")
    if universe < n_communities:
        raise InvalidParameterError("universe smaller than the community count")

    comm_sizes = _split_sizes(n_accounts, n_communities)
    block_sizes = _split_sizes(universe, n_communities)
    if any(bs < cs for bs, cs in zip(block_sizes, comm_sizes)):
        raise InvalidParameterError("universe blocks too small to hold the accounts")

    block_starts = np.concatenate([[0], np.cumsum(block_sizes)[:-1]]).astype(np.int64)
    rng = np.random.default_rng(seed)
    seen = np.zeros(universe, dtype=bool)

    sets: list[NeighborSet] = []
    handles = np.empty(n_accounts, dtype=np.uint64)
    labels: list[int] = []
    communities: dict[int, set[int]] = {c: set() for c in range(n_communities)}
    acct = 0
    for c in range(n_communities):
        start, bs = int(block_starts[c]), block_sizes[c]
        for j in range(comm_sizes[c]):
            own = _bernoulli_subset(rng, bs, p_in) + start
            rest = _bernoulli_subset(rng, universe - bs, p_out)
            rest = np.where(rest < start, rest, rest + bs)  # skip over the own block
            if account_p_in is not None:
                own, rest = _resample_account_ids(
                    rng, own, rest, c, block_starts, comm_sizes, account_p_in, account_p_out
                )
            nbrs = np.sort(np.concatenate([own, rest])).astype(np.uint64)
            seen[nbrs.astype(np.int64)] = True
            sets.append(NeighborSet(acct, nbrs))
            handles[acct] = start + j
            labels.append(c)
            communities[c].add(acct)
            acct += 1

    total = int(sum(ns.degree for ns in sets))
    avg_out = total / max(1, int(seen.sum()))
    dataset = Dataset(sets, universe, avg_out, handles)
    truth = GroundTruth({c: frozenset(m) for c, m in communities.items()})
    return dataset, truth


def _split_sizes(total: int, parts: int) -> list[int]:
    base, rem = divmod(total, parts)
    return [base + (1 if i < rem else 0) for i in range(parts)]


def _bernoulli_subset(rng: np.random.Generator, n: int, p: float) -> np.ndarray:
    """Indices of an independent-Bernoulli(p) subset of range(n)."""
    if n == 0 or p == 0.0:
        return np.empty(0, dtype=np.int64)
    count = int(rng.binomial(n, p))
    return rng.choice(n, size=count, replace=False).astype(np.int64)


def _resample_account_ids(
    rng: np.random.Generator,
    own: np.ndarray,
    rest: np.ndarray,
    community: int,
    block_starts: np.ndarray,
    comm_sizes: list[int],
    account_p_in: float,
    account_p_out: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Redraw membership of account-owned universe ids at the override rates.

    The first ``comm_sizes[c]`` elements of block ``c`` are the ids owned by
    that community's accounts.
    """
    n_comm = len(comm_sizes)
    for c in range(n_comm):
        lo = int(block_starts[c])
        hi = lo + comm_sizes[c]
        if c == community:
            own = own[(own < lo) | (own >= hi)]
            own = np.concatenate([own, _bernoulli_subset(rng, hi - lo, account_p_in) + lo])
        else:
            rest = rest[(rest < lo) | (rest >= hi)]
            rest = np.concatenate([rest, _bernoulli_subset(rng, hi - lo, account_p_out) + lo])
    return own, rest


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write the binary neighbourhood cache (magic ``GSE1``, little-endian)."""
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<QQ", dataset.universe_size, len(dataset.accounts)))
        for ns in dataset.accounts:
            fh.write(struct.pack("<QQ", ns.account, ns.degree))
            fh.write(ns.neighbors.astype("<u8").tobytes())


def load_dataset(path: str | Path) -> Dataset:
    """Read a ``GSE1`` cache written by :func:`save_dataset`."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CACHE_MAGIC:
            raise InvalidParameterError(f"bad cache magic {magic!r}")
        universe_size, count = struct.unpack("<QQ", fh.read(16))
        sets = []
        for _ in range(count):
            acct, degree = struct.unpack("<QQ", fh.read(16))
            nbrs = np.frombuffer(fh.read(8 * degree), dtype="<u8").astype(np.uint64)
            sets.append(NeighborSet(int(acct), nbrs))
    ds = _finish_dataset(sets, account_universe_ids=np.array([ns.account for ns in sets], dtype=np.uint64),
                         universe_size=int(universe_size))
    return ds
