"""Seed expansion: rank LSH candidates against a seed set and stop.

Two sequential rankers are provided.  ``expand_ms`` scores every candidate
once by its mean estimated Jaccard distance to the seeds.  ``expand_ac``
grows the reference set: after each selection the remaining candidates'
mean distances are updated with the recursive rule
``X' = (n*X + D(candidate, selected)) / (n + 1)``, which is algebraically
identical to recomputing the mean over the grown set.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .lsh import CandidateSet, LshIndex, query_candidates
from .sketch import SignatureMatrix, _RunningUnion


@dataclass(frozen=True)
class SeedSet:
    """Duplicate-free, ordered collection of input account ids."""

    seeds: tuple[int, ...]

    @classmethod
    def of(cls, ids: list[int]) -> "SeedSet":
        if not ids:
            raise InvalidParameterError("seed set is empty")
        seen: dict[int, None] = {}
        for i in ids:
            seen.setdefault(int(i))
        return cls(tuple(seen))

    def __len__(self) -> int:
        return len(self.seeds)


class StopKind(enum.Enum):
    FIXED_COUNT = "fixed_count"
    COVERAGE_THRESHOLD = "coverage_threshold"


class StopReason(enum.Enum):
    COUNT_REACHED = "count_reached"
    COVERAGE_REACHED = "coverage_reached"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class StoppingRule:
    kind: StopKind
    value: float


def make_stopping_rule(kind: str | StopKind, value: float) -> StoppingRule:
    """Stop after a fixed number of additions, or once the estimated
    unique-neighbour count of the additions reaches an absolute value."""
    kind = StopKind(kind) if not isinstance(kind, StopKind) else kind
    if kind is StopKind.FIXED_COUNT:
        if int(value) != value or value < 1:
            raise InvalidParameterError("fixed_count needs an integer value >= 1")
        return StoppingRule(kind, int(value))
    if value <= 0:
        raise InvalidParameterError("coverage_threshold needs a positive value")
    return StoppingRule(kind, float(value))


@dataclass(frozen=True)
class ExpansionResult:
    """Ranked accounts with their distance at selection time."""

    ranked: list[tuple[int, float]]
    coverage: list[float] | None
    stop_reason: StopReason
    unindexed_seeds: tuple[int, ...] = ()


def _seed_rows(matrix: SignatureMatrix, seeds: SeedSet) -> tuple[list[int], list[int]]:
    rows, missing = [], []
    for s in seeds.seeds:
        row = matrix.row_of(s)
        if row is None:
            missing.append(int(s))
        else:
            rows.append(row)
    return rows, missing


def _mean_seed_distance(matrix: SignatureMatrix, cand_rows: np.ndarray, seed_rows: list[int]) -> np.ndarray:
    """Mean Jaccard distance of each candidate row to the seed rows.

    A seed with an empty neighbourhood contributes a constant distance of 1.
    """
    vals = matrix.values
    k = matrix.k
    dist = np.zeros(cand_rows.size, dtype=np.float64)
    cand_vals = vals[cand_rows]
    for srow in seed_rows:
        if matrix.degrees[srow] == 0:
            dist += 1.0
        else:
            frac = np.count_nonzero(cand_vals == vals[srow], axis=1) / k
            dist += 1.0 - frac
    return dist / len(seed_rows)


def _truncate_by_rule(
    matrix: SignatureMatrix,
    ordered_rows: np.ndarray,
    ordered_dist: np.ndarray,
    stop: StoppingRule,
) -> tuple[list[tuple[int, float]], list[float] | None, StopReason]:
    ranked: list[tuple[int, float]] = []
    if stop.kind is StopKind.FIXED_COUNT:
        limit = int(stop.value)
        take = min(limit, ordered_rows.size)
        for row, d in zip(ordered_rows[:take], ordered_dist[:take]):
            ranked.append((int(matrix.ids[row]), float(d)))
        reason = StopReason.COUNT_REACHED if take == limit else StopReason.EXHAUSTED
        return ranked, None, reason

    union = _RunningUnion(matrix.family)
    coverage: list[float] = []
    for row, d in zip(ordered_rows, ordered_dist):
        degree = int(matrix.degrees[row])
        cov = union.add(matrix.values[row], degree, degree == 0)
        ranked.append((int(matrix.ids[row]), float(d)))
        coverage.append(cov)
        if cov >= stop.value:
            return ranked, coverage, StopReason.COVERAGE_REACHED
    return ranked, coverage, StopReason.EXHAUSTED


def expand_ms(
    index: LshIndex,
    matrix: SignatureMatrix,
    seeds: SeedSet,
    stop: StoppingRule,
    candidates: CandidateSet | None = None,
) -> ExpansionResult:
    """Rank candidates by mean estimated distance to the fixed seed set."""
    cand = candidates if candidates is not None else query_candidates(index, list(seeds.seeds))
    seed_rows, missing = _seed_rows(matrix, seeds)
    unindexed = tuple(sorted(set(cand.unindexed_seeds) | set(missing)))
    if cand.accounts.size == 0 or not seed_rows:
        return ExpansionResult([], None, StopReason.EXHAUSTED, unindexed)
    cand_rows = np.array([matrix.row_of(a) for a in cand.accounts], dtype=np.int64)
    dist = _mean_seed_distance(matrix, cand_rows, seed_rows)
    order = np.lexsort((matrix.ids[cand_rows], dist))
    ranked, coverage, reason = _truncate_by_rule(matrix, cand_rows[order], dist[order], stop)
    return ExpansionResult(ranked, coverage, reason, unindexed)


def expand_ac(
    index: LshIndex,
    matrix: SignatureMatrix,
    seeds: SeedSet,
    stop: StoppingRule,
    candidates: CandidateSet | None = None,
) -> ExpansionResult:
    """Greedy agglomerative ranking with a growing reference set.

    The candidate pool is fixed to the initial LSH result; the reference set
    starts as the seeds and absorbs each selected account.
    """
    cand = candidates if candidates is not None else query_candidates(index, list(seeds.seeds))
    seed_rows, missing = _seed_rows(matrix, seeds)
    unindexed = tuple(sorted(set(cand.unindexed_seeds) | set(missing)))
    if cand.accounts.size == 0 or not seed_rows:
        return ExpansionResult([], None, StopReason.EXHAUSTED, unindexed)

    cand_rows = np.array([matrix.row_of(a) for a in cand.accounts], dtype=np.int64)
    cand_ids = matrix.ids[cand_rows].astype(np.int64)
    cand_vals = matrix.values[cand_rows]
    x = _mean_seed_distance(matrix, cand_rows, seed_rows)
    n_ref = len(seed_rows)
    remaining = np.ones(cand_rows.size, dtype=bool)

    track_coverage = stop.kind is StopKind.COVERAGE_THRESHOLD
    union = _RunningUnion(matrix.family) if track_coverage else None
    ranked: list[tuple[int, float]] = []
    coverage: list[float] = []
    reason = StopReason.EXHAUSTED
    limit = int(stop.value) if stop.kind is StopKind.FIXED_COUNT else cand_rows.size

    while remaining.any():
        live = np.nonzero(remaining)[0]
        xs = x[live]
        best = live[np.lexsort((cand_ids[live], xs))[0]]
        remaining[best] = False
        row = cand_rows[best]
        ranked.append((int(cand_ids[best]), float(x[best])))

        if track_coverage:
            degree = int(matrix.degrees[row])
            cov = union.add(matrix.values[row], degree, degree == 0)
            coverage.append(cov)
            if cov >= stop.value:
                reason = StopReason.COVERAGE_REACHED
                break
        elif len(ranked) >= limit:
            reason = StopReason.COUNT_REACHED
            break

        if remaining.any():
            frac = np.count_nonzero(cand_vals == matrix.values[row], axis=1) / matrix.k
            d_new = 1.0 - frac
            x = (n_ref * x + d_new) / (n_ref + 1)
            n_ref += 1
    return ExpansionResult(ranked, coverage if track_coverage else None, reason, unindexed)
