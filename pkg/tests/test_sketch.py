import numpy as np
import pytest
from helpers import batched_estimates, exact_union_size, make_set_pair

from graphsketch.errors import IncompatibleSignatureError, InvalidParameterError
from graphsketch.ingest import NeighborSet, exact_jaccard, generate_planted_partition
from graphsketch.sketch import (
    SENTINEL,
    HashFamily,
    Signature,
    build_signatures,
    coverage_trace,
    estimate_jaccard,
    estimator_variance,
    load_signatures,
    save_signatures,
    union_cardinality,
    union_signature,
)


@pytest.fixture(scope="module")
def planted():
    return generate_planted_partition(200, 4, 1000, 0.3, 0.02, seed=17)


def dataset_of(sets: dict[int, list[int]], universe: int):
    from graphsketch.ingest import Dataset

    accounts = [
        NeighborSet(acct, np.array(sorted(ids), dtype=np.uint64)) for acct, ids in sorted(sets.items())
    ]
    return Dataset(accounts, universe, 1.0)


def test_singleton_signature_is_direct_hash():
    family = HashFamily.create(64, 100, master_seed=5)
    sig = family.hash_set(np.array([42], dtype=np.uint64))
    expect = (family.a * np.uint64(42) + family.b) % np.uint64(family.modulus)
    assert np.array_equal(sig, expect)


def test_equal_sets_give_identical_signatures():
    ds = dataset_of({0: [1, 5, 9], 1: [9, 1, 5]}, universe=10)
    family = HashFamily.create(128, 10, master_seed=1)
    mx = build_signatures(ds, family)
    assert np.array_equal(mx.values[0], mx.values[1])


def test_build_is_worker_invariant(planted):
    ds, _ = planted
    family = HashFamily.create(128, ds.universe_size, master_seed=3)
    one = build_signatures(ds, family, workers=1)
    eight = build_signatures(ds, family, workers=8)
    assert np.array_equal(one.values, eight.values)


def test_modulus_must_cover_universe():
    ds = dataset_of({0: [100]}, universe=101)
    family = HashFamily.from_params(16, modulus=97, master_seed=0)
    with pytest.raises(InvalidParameterError):
        build_signatures(ds, family)
    assert HashFamily.create(16, 10, master_seed=0).modulus >= 101  # floored domain


def test_empty_account_is_all_sentinel_and_estimates_zero():
    ds = dataset_of({0: [], 1: [], 2: [3]}, universe=10)
    family = HashFamily.create(32, 10, master_seed=2)
    mx = build_signatures(ds, family)
    assert np.all(mx.values[0] == SENTINEL)
    empty_a, empty_b, full = mx.signature(0), mx.signature(1), mx.signature(2)
    assert estimate_jaccard(empty_a, empty_b).value == 0.0
    assert estimate_jaccard(empty_a, full).value == 0.0
    assert estimate_jaccard(full, full).value == 1.0


def test_estimate_trivials():
    family = HashFamily.create(1000, 2000, master_seed=9)
    vals = np.arange(1000, dtype=np.uint64)
    a = Signature(vals, family, degree=5)
    b_vals = vals.copy()
    b_vals[250:] += np.uint64(1)  # agree on exactly 250 of 1000 positions
    b = Signature(b_vals, family, degree=5)
    assert estimate_jaccard(a, a).value == 1.0
    est = estimate_jaccard(a, b)
    assert est.matches == 250 and est.value == 0.25


def test_incompatible_families_raise():
    fam1 = HashFamily.create(32, 100, master_seed=1)
    fam2 = HashFamily.create(32, 100, master_seed=2)
    a = Signature(np.zeros(32, dtype=np.uint64), fam1, degree=1)
    b = Signature(np.zeros(32, dtype=np.uint64), fam2, degree=1)
    with pytest.raises(IncompatibleSignatureError):
        estimate_jaccard(a, b)


def test_estimator_moments_match_theory():
    # fixed pair with exact J, many independent families: unbiased mean and
    # variance at the binomial rate J(1-J)/k
    j, k, trials = 0.3, 100, 1000
    rng = np.random.default_rng(123)
    a, b = make_set_pair(j, union_size=100, universe=10007, rng=rng)
    family = HashFamily.create(k, 10007, master_seed=0)
    seeds = np.arange(50_000, 50_000 + trials)
    est = batched_estimates(a, b, k, family.modulus, seeds)
    tol = 3 * np.sqrt(j * (1 - j) / (k * trials))
    assert abs(est.mean() - j) < tol
    expect_var = estimator_variance(j, k)
    assert abs(est.var(ddof=1) - expect_var) / expect_var < 0.25


def test_estimate_std_for_half_similarity():
    # spread of the estimate at J=0.5, k=1000 is sqrt(0.25/1000) ~ 0.0158
    rng = np.random.default_rng(7)
    k, trials = 1000, 1000
    a, b = make_set_pair(0.5, union_size=100, universe=10007, rng=rng)
    family = HashFamily.create(k, 10007, master_seed=0)
    est = batched_estimates(a, b, k, family.modulus, np.arange(trials))
    expect = np.sqrt(0.5 * 0.5 / k)
    assert abs(est.std(ddof=1) - expect) / expect < 0.25


def test_estimator_variance_values():
    assert estimator_variance(0.5, 1000) == pytest.approx(2.5e-4)
    assert estimator_variance(0.0, 10) == 0.0
    assert estimator_variance(1.0, 10) == 0.0
    assert estimator_variance(0.2, 100) == pytest.approx(1.6e-3)
    with pytest.raises(InvalidParameterError):
        estimator_variance(0.5, 0)
    with pytest.raises(InvalidParameterError):
        estimator_variance(1.5, 10)


def test_union_signature_identity_and_commutativity():
    ds = dataset_of({0: [1, 2], 1: [4, 9], 2: [2, 7]}, universe=10)
    family = HashFamily.create(64, 10, master_seed=4)
    mx = build_signatures(ds, family)
    sigs = [mx.signature(i) for i in range(3)]
    assert np.array_equal(union_signature([sigs[0]]).values, sigs[0].values)
    fwd = union_signature(sigs).values
    rev = union_signature(sigs[::-1]).values
    assert np.array_equal(fwd, rev)
    with pytest.raises(InvalidParameterError):
        union_signature([])


def test_union_signature_equals_signature_of_union():
    rng = np.random.default_rng(31)
    family = HashFamily.create(256, 500, master_seed=8)
    for _ in range(25):
        a = np.unique(rng.integers(0, 500, size=30)).astype(np.uint64)
        b = np.unique(rng.integers(0, 500, size=30)).astype(np.uint64)
        sig_a = Signature(family.hash_set(a), family, degree=a.size)
        sig_b = Signature(family.hash_set(b), family, degree=b.size)
        union = np.unique(np.concatenate([a, b]))
        direct = family.hash_set(union)
        assert np.array_equal(union_signature([sig_a, sig_b]).values, direct)


def test_union_cardinality_worked_example():
    # {1,2,3} and {2,3,4}: sizes 3 and 3, J=0.5 -> union of 4
    assert union_cardinality(3, 3, 0.5) == pytest.approx(4.0)
    assert union_cardinality(5, 7, 0.0) == pytest.approx(12.0)


def test_union_cardinality_exact_on_random_sets():
    rng = np.random.default_rng(77)
    for _ in range(100):
        a = np.unique(rng.integers(0, 200, size=rng.integers(1, 60)))
        b = np.unique(rng.integers(0, 200, size=rng.integers(1, 60)))
        inter = np.intersect1d(a, b).size
        union = a.size + b.size - inter
        j = inter / union
        assert union_cardinality(a.size, b.size, j) == pytest.approx(union, abs=1e-9)


def test_coverage_trace_disjoint_and_duplicate():
    family = HashFamily.create(512, 1000, master_seed=12)
    a = np.arange(10, dtype=np.uint64)
    c = np.arange(500, 520, dtype=np.uint64)
    sig_a = Signature(family.hash_set(a), family, degree=10)
    sig_c = Signature(family.hash_set(c), family, degree=20)
    trace = coverage_trace([(sig_a, 10), (sig_c, 20)])
    assert trace[0] == pytest.approx(10.0)
    # disjoint sets: estimated J should be 0 or tiny, coverage near 30
    assert trace[1] == pytest.approx(30.0, rel=0.05)
    dup = coverage_trace([(sig_a, 10), (sig_a, 10)])
    assert dup == [10.0, 10.0]


def test_coverage_trace_tracks_exact_union(planted):
    ds, truth = planted
    family = HashFamily.create(1000, ds.universe_size, master_seed=6)
    mx = build_signatures(ds, family)
    members = sorted(truth.communities[0])[:20]
    parts = [(mx.signature(m), ds.accounts[m].degree) for m in members]
    trace = coverage_trace(parts)
    exact = exact_union_size([ds.accounts[m].neighbors for m in members])
    assert len(trace) == 20
    assert all(t2 >= t1 for t1, t2 in zip(trace, trace[1:]))
    assert abs(trace[-1] - exact) / exact < 0.05


def test_store_round_trip(tmp_path, planted):
    ds, _ = planted
    family = HashFamily.create(64, ds.universe_size, master_seed=20)
    mx = build_signatures(ds, family, workers=2)
    path = tmp_path / "store.gsm"
    save_signatures(mx, path)
    again = load_signatures(path)
    assert np.array_equal(again.values, mx.values)
    assert np.array_equal(again.ids, mx.ids)
    assert np.array_equal(again.degrees, mx.degrees)
    assert again.family.compatible_with(mx.family)
    assert np.array_equal(again.family.a, mx.family.a)


def test_store_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.gsm"
    path.write_bytes(b"NOPE" + b"\x00" * 28)
    with pytest.raises(InvalidParameterError):
        load_signatures(path)
