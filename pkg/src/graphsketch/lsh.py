"""Banded locality-sensitive index over minhash signatures.

The first ``bands * rows`` positions of each signature are split into
``bands`` consecutive groups of ``rows`` values; each group is folded into
a 64-bit band key.  Two accounts become mutual candidates when any whole
band key coincides, which for signature agreement fraction ``s`` happens
with probability ``1 - (1 - s**rows) ** bands``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .sketch import SignatureMatrix

_FNV_OFFSET = np.uint64(0xCBF29CE484222325)
_FNV_PRIME = np.uint64(0x100000001B3)


@dataclass(frozen=True)
class BandingConfig:
    """Number of bands and signature values per band."""

    bands: int = 500
    rows: int = 2

    def __post_init__(self) -> None:
        if self.bands < 1 or self.rows < 1:
            raise InvalidParameterError("bands and rows must be >= 1")


def band_keys(values: np.ndarray, config: BandingConfig) -> np.ndarray:
    """64-bit FNV-1a key of each band, for each signature row."""
    if values.ndim == 1:
        values = values[None, :]
    n = values.shape[0]
    keys = np.empty((n, config.bands), dtype=np.uint64)
    for bi in range(config.bands):
        h = np.full(n, _FNV_OFFSET, dtype=np.uint64)
        for r in range(config.rows):
            h = (h ^ values[:, bi * config.rows + r]) * _FNV_PRIME
        keys[:, bi] = h
    return keys


@dataclass(eq=False)
class LshIndex:
    """Immutable band-key buckets over the indexed (non-empty) accounts."""

    matrix: SignatureMatrix
    config: BandingConfig
    indexed_rows: np.ndarray  # rows of the matrix that were indexed
    _sorted_keys: list[np.ndarray] = field(repr=False, default_factory=list)
    _sorted_rows: list[np.ndarray] = field(repr=False, default_factory=list)

    def __post_init__(self) -> None:
        self._indexed = set(int(r) for r in self.indexed_rows)

    def is_indexed(self, account_id: int) -> bool:
        row = self.matrix.row_of(account_id)
        return row is not None and row in self._indexed

    def _bucket_rows(self, band: int, key: np.uint64) -> np.ndarray:
        keys = self._sorted_keys[band]
        lo = int(np.searchsorted(keys, key, side="left"))
        hi = int(np.searchsorted(keys, key, side="right"))
        return self._sorted_rows[band][lo:hi]

    def bucket_of(self, account_id: int, band: int) -> np.ndarray:
        """Account ids sharing the given band with ``account_id`` (itself included)."""
        row = self.matrix.row_of(account_id)
        if row is None or row not in self._indexed:
            raise InvalidParameterError(f"account {account_id} is not indexed")
        key = band_keys(self.matrix.values[row], self.config)[0, band]
        return self.matrix.ids[self._bucket_rows(band, key)]


@dataclass(frozen=True)
class CandidateSet:
    """Near-neighbour candidates of a seed set, with unresolved seeds flagged."""

    accounts: np.ndarray  # sorted account ids, seeds excluded
    unindexed_seeds: tuple[int, ...]


def build_index(matrix: SignatureMatrix, config: BandingConfig = BandingConfig()) -> LshIndex:
    """Index every non-empty account of the matrix.

    Per band the keys are kept in sorted order, so a bucket lookup is a pair
    of binary searches; the index never yields false negatives for accounts
    sharing an identical band.
    """
    if config.bands * config.rows > matrix.k:
        raise InvalidParameterError(
            f"banding needs {config.bands * config.rows} values, signature has {matrix.k}"
        )
    rows = np.nonzero(matrix.degrees > 0)[0]
    index = LshIndex(matrix, config, rows)
    if rows.size == 0:
        index._sorted_keys = [np.empty(0, np.uint64) for _ in range(config.bands)]
        index._sorted_rows = [np.empty(0, np.int64) for _ in range(config.bands)]
        return index
    keys = band_keys(matrix.values[rows], config)
    for bi in range(config.bands):
        order = np.argsort(keys[:, bi], kind="stable")
        index._sorted_keys.append(keys[order, bi])
        index._sorted_rows.append(rows[order])
    return index


def query_candidates(index: LshIndex, seeds: list[int]) -> CandidateSet:
    """Union of bucket members over every seed and band, seeds excluded.

    Seeds that are unknown or have empty neighbourhoods cannot be looked up;
    they are skipped and reported in the result.
    """
    if not seeds:
        raise InvalidParameterError("seed list is empty")
    matrix = index.matrix
    seed_rows = []
    unindexed = []
    for s in seeds:
        row = matrix.row_of(s)
        if row is None or row not in index._indexed:
            unindexed.append(int(s))
        else:
            seed_rows.append(row)
    collected: list[np.ndarray] = []
    if seed_rows:
        keys = band_keys(matrix.values[np.array(seed_rows)], index.config)
        for si in range(len(seed_rows)):
            for bi in range(index.config.bands):
                collected.append(index._bucket_rows(bi, keys[si, bi]))
    if collected:
        rows = np.unique(np.concatenate(collected))
        rows = rows[~np.isin(rows, np.array(seed_rows, dtype=rows.dtype))]
        accounts = np.sort(matrix.ids[rows])
    else:
        accounts = np.empty(0, dtype=np.uint64)
    return CandidateSet(accounts, tuple(unindexed))
