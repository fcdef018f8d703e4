"""Shared test utilities: set-pair construction and batched estimator sampling."""

from __future__ import annotations

import numpy as np

from graphsketch.sketch import HashFamily


def make_set_pair(
    j: float, union_size: int, universe: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Two random sets with exact Jaccard similarity ``j`` and the given union size."""
    inter = round(j * union_size)
    assert abs(inter / union_size - j) < 1e-12, "j must be representable at this union size"
    extra = union_size - inter
    assert extra % 2 == 0, "need an even number of non-shared elements"
    ids = rng.choice(universe, size=union_size, replace=False).astype(np.uint64)
    shared, only_a, only_b = ids[:inter], ids[inter : inter + extra // 2], ids[inter + extra // 2 :]
    a = np.sort(np.concatenate([shared, only_a]))
    b = np.sort(np.concatenate([shared, only_b]))
    return a, b


def batched_estimates(
    elems_a: np.ndarray,
    elems_b: np.ndarray,
    k: int,
    modulus: int,
    seeds: np.ndarray,
    chunk: int = 64,
) -> np.ndarray:
    """Match-fraction estimate of one set pair under many hash families.

    Families are materialised through ``HashFamily.from_params`` so the test
    exercises exactly the coefficients production code would use; only the
    min-hashing itself is batched for speed.
    """
    p = np.uint64(modulus)
    ea = elems_a.astype(np.uint64)
    eb = elems_b.astype(np.uint64)
    out = np.empty(len(seeds), dtype=np.float64)
    for start in range(0, len(seeds), chunk):
        batch = seeds[start : start + chunk]
        fams = [HashFamily.from_params(k, modulus, int(s)) for s in batch]
        a_coef = np.stack([f.a for f in fams])  # (c, k)
        b_coef = np.stack([f.b for f in fams])
        sig_a = ((a_coef[:, :, None] * ea[None, None, :] + b_coef[:, :, None]) % p).min(axis=2)
        sig_b = ((a_coef[:, :, None] * eb[None, None, :] + b_coef[:, :, None]) % p).min(axis=2)
        out[start : start + len(batch)] = (sig_a == sig_b).mean(axis=1)
    return out


def batched_signature_pairs(
    elems_a: np.ndarray,
    elems_b: np.ndarray,
    k: int,
    modulus: int,
    seeds: np.ndarray,
    chunk: int = 64,
) -> tuple[np.ndarray, np.ndarray]:
    """Full signature pairs (trials, k) under many hash families."""
    p = np.uint64(modulus)
    ea = elems_a.astype(np.uint64)
    eb = elems_b.astype(np.uint64)
    sa = np.empty((len(seeds), k), dtype=np.uint64)
    sb = np.empty((len(seeds), k), dtype=np.uint64)
    for start in range(0, len(seeds), chunk):
        batch = seeds[start : start + chunk]
        fams = [HashFamily.from_params(k, modulus, int(s)) for s in batch]
        a_coef = np.stack([f.a for f in fams])
        b_coef = np.stack([f.b for f in fams])
        sa[start : start + len(batch)] = (
            (a_coef[:, :, None] * ea[None, None, :] + b_coef[:, :, None]) % p
        ).min(axis=2)
        sb[start : start + len(batch)] = (
            (a_coef[:, :, None] * eb[None, None, :] + b_coef[:, :, None]) % p
        ).min(axis=2)
    return sa, sb


def batched_multi_pair_signatures(
    sets_a: np.ndarray,
    sets_b: np.ndarray,
    k: int,
    modulus: int,
    seeds: np.ndarray,
    chunk: int = 64,
) -> tuple[np.ndarray, np.ndarray]:
    """Signatures for many distinct set pairs, one hash family per pair.

    ``sets_a`` and ``sets_b`` are (pairs, m) arrays of equally-sized sets;
    row i is sketched with the family seeded by ``seeds[i]``.
    """
    p = np.uint64(modulus)
    pairs = sets_a.shape[0]
    sa = np.empty((pairs, k), dtype=np.uint64)
    sb = np.empty((pairs, k), dtype=np.uint64)
    ea = sets_a.astype(np.uint64)
    eb = sets_b.astype(np.uint64)
    for start in range(0, pairs, chunk):
        stop = min(start + chunk, pairs)
        fams = [HashFamily.from_params(k, modulus, int(s)) for s in seeds[start:stop]]
        a_coef = np.stack([f.a for f in fams])[:, :, None]  # (c, k, 1)
        b_coef = np.stack([f.b for f in fams])[:, :, None]
        sa[start:stop] = ((a_coef * ea[start:stop, None, :] + b_coef) % p).min(axis=2)
        sb[start:stop] = ((a_coef * eb[start:stop, None, :] + b_coef) % p).min(axis=2)
    return sa, sb


def brute_force_ms_order(matrix, seed_ids: list[int], candidate_ids: np.ndarray) -> list[int]:
    """Full-scan mean-distance ranking, restricted to the given candidates.

    Independent of the LSH path: scores are recomputed per account with
    plain position comparisons.
    """
    seed_rows = [matrix.row_of(s) for s in seed_ids]
    scored = []
    for acct in candidate_ids:
        row = matrix.row_of(int(acct))
        dist = 0.0
        for srow in seed_rows:
            if matrix.degrees[srow] == 0 or matrix.degrees[row] == 0:
                dist += 1.0
            else:
                eq = int(np.count_nonzero(matrix.values[row] == matrix.values[srow]))
                dist += 1.0 - eq / matrix.k
        scored.append((dist / len(seed_rows), int(acct)))
    scored.sort()
    return [acct for _, acct in scored]


def exact_union_size(sets: list[np.ndarray]) -> int:
    merged = np.unique(np.concatenate(sets)) if sets else np.empty(0)
    return int(merged.size)
