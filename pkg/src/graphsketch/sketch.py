"""Minhash signatures: generation, Jaccard estimation, unions, and coverage.

Each of the ``k`` signature positions holds the minimum of a universal hash
``h_i(x) = (a_i * x + b_i) mod p`` over the neighbour ids of an account,
with ``p`` the smallest prime at least the universe size.  The fraction of
positions on which two signatures agree is an unbiased estimate of the
Jaccard similarity of the underlying sets, with variance ``J(1-J)/k``.
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IncompatibleSignatureError, InvalidParameterError
from .ingest import Dataset

STORE_MAGIC = b"GSM1"
SENTINEL = np.uint64(0xFFFFFFFFFFFFFFFF)  # signature value of an empty neighbourhood
_MAX_MODULUS = (1 << 32) - 1  # keeps a*x + b inside uint64
_MIN_MODULUS = 1 << 20  # affine families over small primes carry an O(set/p) min-wise bias
_NEIGHBOR_CHUNK = 8192


def _next_prime(n: int) -> int:
    from sympy import nextprime  # deferred: sympy import is slow

    return int(nextprime(n - 1))


@dataclass(frozen=True, eq=False)
class HashFamily:
    """k universal hash functions drawn reproducibly from a master seed."""

    k: int
    modulus: int
    master_seed: int
    a: np.ndarray  # (k,) uint64, nonzero mod modulus
    b: np.ndarray  # (k,) uint64

    @classmethod
    def create(cls, k: int, universe_size: int, master_seed: int) -> "HashFamily":
        if k < 1:
            raise InvalidParameterError("signature length k must be >= 1")
        modulus = _next_prime(max(_MIN_MODULUS, int(universe_size)))
        return cls.from_params(k, modulus, master_seed)

    @classmethod
    def from_params(cls, k: int, modulus: int, master_seed: int) -> "HashFamily":
        if modulus > _MAX_MODULUS:
            raise InvalidParameterError(
                f"modulus {modulus} exceeds {_MAX_MODULUS}; universe too large"
            )
        rng = np.random.default_rng(master_seed)
        a = rng.integers(1, modulus, size=k, dtype=np.uint64)
        b = rng.integers(0, modulus, size=k, dtype=np.uint64)
        return cls(k, int(modulus), int(master_seed), a, b)

    def compatible_with(self, other: "HashFamily") -> bool:
        return (
            self.k == other.k
            and self.modulus == other.modulus
            and self.master_seed == other.master_seed
        )

    def hash_set(self, elements: np.ndarray) -> np.ndarray:
        """Signature of one set: position-wise min of hashed elements."""
        if elements.size == 0:
            return np.full(self.k, SENTINEL, dtype=np.uint64)
        p = np.uint64(self.modulus)
        elems = np.ascontiguousarray(elements, dtype=np.uint64)
        out = np.full(self.k, SENTINEL, dtype=np.uint64)
        for start in range(0, elems.size, _NEIGHBOR_CHUNK):
            chunk = elems[start : start + _NEIGHBOR_CHUNK]
            hashed = (self.a[:, None] * chunk[None, :] + self.b[:, None]) % p
            np.minimum(out, hashed.min(axis=1), out=out)
        return out


@dataclass(frozen=True, eq=False)
class Signature:
    """Minhash values of one account (or of a union of accounts)."""

    values: np.ndarray  # (k,) uint64
    family: HashFamily
    owner: int | None = None
    degree: int | None = None

    @property
    def is_empty(self) -> bool:
        if self.degree is not None:
            return self.degree == 0
        return bool(np.all(self.values == SENTINEL))


@dataclass(frozen=True)
class JaccardEstimate:
    """Match count over signature length; ``value == matches / k``."""

    value: float
    matches: int
    k: int


@dataclass(eq=False)
class SignatureMatrix:
    """One signature per account, sharing a hash family."""

    ids: np.ndarray  # (n,) uint64 account ids
    degrees: np.ndarray  # (n,) int64
    values: np.ndarray  # (n, k) uint64
    family: HashFamily

    def __post_init__(self) -> None:
        self._row_of = {int(acct): i for i, acct in enumerate(self.ids)}

    @property
    def k(self) -> int:
        return self.family.k

    def __len__(self) -> int:
        return int(self.ids.size)

    def row_of(self, account_id: int) -> int | None:
        return self._row_of.get(int(account_id))

    def signature(self, account_id: int) -> Signature:
        row = self.row_of(account_id)
        if row is None:
            raise InvalidParameterError(f"unknown account id {account_id}")
        return Signature(
            self.values[row], self.family, owner=int(account_id), degree=int(self.degrees[row])
        )


def build_signatures(dataset: Dataset, family: HashFamily, workers: int = 1) -> SignatureMatrix:
    """Sketch every account of the dataset.

    The output is bit-identical regardless of ``workers`` or neighbour
    order: each account's row depends only on its own neighbour set and the
    family.  Accounts with empty neighbourhoods get all-sentinel rows.
    """
    if family.modulus < dataset.universe_size:
        raise InvalidParameterError(
            f"modulus {family.modulus} smaller than universe {dataset.universe_size}"
        )
    n = len(dataset)
    values = np.full((n, family.k), SENTINEL, dtype=np.uint64)

    def fill(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            ns = dataset.accounts[i]
            if ns.degree:
                values[i] = family.hash_set(ns.neighbors)

    if workers <= 1 or n < 2:
        fill(0, n)
    else:
        bounds = np.linspace(0, n, num=min(workers, n) + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fill, int(lo), int(hi)) for lo, hi in zip(bounds, bounds[1:])]
            for fut in futures:
                fut.result()
    return SignatureMatrix(dataset.ids, dataset.degrees, values, family)


def estimate_jaccard(a: Signature, b: Signature) -> JaccardEstimate:
    """Fraction of agreeing positions; empty accounts estimate 0 vs everything."""
    if not a.family.compatible_with(b.family) or a.values.size != b.values.size:
        raise IncompatibleSignatureError("signatures come from different hash families")
    if a.is_empty or b.is_empty:
        return JaccardEstimate(0.0, 0, a.family.k)
    matches = int(np.count_nonzero(a.values == b.values))
    return JaccardEstimate(matches / a.family.k, matches, a.family.k)


def estimator_variance(j: float, k: int) -> float:
    """Sampling variance of the match-fraction estimator at true similarity j."""
    if k < 1:
        raise InvalidParameterError("k must be >= 1")
    if not 0.0 <= j <= 1.0:
        raise InvalidParameterError("j must lie in [0, 1]")
    return j * (1.0 - j) / k


def union_signature(parts: list[Signature]) -> Signature:
    """Signature of the union of the underlying sets: elementwise minimum."""
    if not parts:
        raise InvalidParameterError("union of an empty signature list")
    family = parts[0].family
    for p in parts[1:]:
        if not family.compatible_with(p.family):
            raise IncompatibleSignatureError("signatures come from different hash families")
    merged = np.minimum.reduce([p.values for p in parts])
    return Signature(merged, family)


def union_cardinality(size_a: float, size_c: float, j: float) -> float:
    """|A ∪ C| from the two set sizes and their Jaccard similarity."""
    if size_a < 0 or size_c < 0:
        raise InvalidParameterError("set sizes must be non-negative")
    if not 0.0 <= j <= 1.0:
        raise InvalidParameterError("j must lie in [0, 1]")
    return (size_a + size_c) / (1.0 + j)


class _RunningUnion:
    """Union signature plus estimated unique-neighbour count, grown one account at a time.

    The estimated count is clamped to be non-decreasing: estimation noise in
    the similarity can otherwise make the union-size recurrence dip below
    the running value, which is impossible for real sets.
    """

    def __init__(self, family: HashFamily) -> None:
        self.family = family
        self.values: np.ndarray | None = None
        self.empty = True
        self.size = 0.0

    def add(self, values: np.ndarray, degree: int, is_empty: bool) -> float:
        if self.values is None:
            self.values = values.copy()
            self.empty = is_empty
            self.size = float(degree)
            return self.size
        if self.empty or is_empty:
            j = 0.0
        else:
            j = np.count_nonzero(self.values == values) / self.family.k
        self.size = max(self.size, (self.size + degree) / (1.0 + j))
        np.minimum(self.values, values, out=self.values)
        self.empty = self.empty and is_empty
        return self.size


def coverage_trace(community: list[tuple[Signature, int]]) -> list[float]:
    """Estimated unique-neighbour count after each addition.

    Maintains the running union signature and applies the union-size
    recurrence with the estimated similarity between the union so far and
    each new account.
    """
    if not community:
        return []
    family = community[0][0].family
    running = _RunningUnion(family)
    trace = []
    for sig, degree in community:
        if not family.compatible_with(sig.family):
            raise IncompatibleSignatureError("signatures come from different hash families")
        trace.append(running.add(sig.values, degree, sig.is_empty))
    return trace


def save_signatures(matrix: SignatureMatrix, path: str | Path) -> None:
    """Write the signature store (magic ``GSM1``, little-endian)."""
    n, k = matrix.values.shape
    with open(path, "wb") as fh:
        fh.write(STORE_MAGIC)
        fh.write(
            struct.pack(
                "<IQQQ", k, n, matrix.family.master_seed & 0xFFFFFFFFFFFFFFFF, matrix.family.modulus
            )
        )
        block = np.empty((n, k + 2), dtype="<u8")
        block[:, 0] = matrix.ids
        block[:, 1] = matrix.degrees.astype(np.uint64)
        block[:, 2:] = matrix.values
        fh.write(block.tobytes())


def load_signatures(path: str | Path) -> SignatureMatrix:
    """Read a ``GSM1`` store; verifies the magic and the signature length."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != STORE_MAGIC:
            raise InvalidParameterError(f"bad store magic {magic!r}")
        k, n, master_seed, modulus = struct.unpack("<IQQQ", fh.read(28))
        payload = fh.read()
    expected = n * (k + 2) * 8
    if len(payload) != expected:
        raise InvalidParameterError(
            f"store payload is {len(payload)} bytes, expected {expected} for n={n}, k={k}"
        )
    block = np.frombuffer(payload, dtype="<u8").reshape(n, k + 2)
    family = HashFamily.from_params(int(k), int(modulus), int(master_seed))
    return SignatureMatrix(
        block[:, 0].astype(np.uint64),
        block[:, 1].astype(np.int64),
        np.ascontiguousarray(block[:, 2:], dtype=np.uint64),
        family,
    )
