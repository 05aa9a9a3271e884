import itertools
import logging

import numpy as np
import pytest

from sepgen import matrix_algebra as ma
from sepgen.counting import n_etale
from sepgen.errors import Infeasible
from sepgen.oracle import (
    CacheStore,
    cache_get,
    cache_key,
    cache_put,
    cached,
    count_etale,
    count_matrix,
    estimate_matrix_fraction,
    partition,
    resolve_cache_dir,
    wilson_interval,
)


def test_partition_covers_range():
    for total in (0, 1, 7, 100, 4096):
        for parts in (1, 3, 4, 16):
            chunks = partition(total, parts)
            assert len(chunks) == parts
            assert chunks[0][0] == 0 and chunks[-1][1] == total
            assert all(a[1] == b[0] for a, b in zip(chunks, chunks[1:]))


@pytest.mark.parametrize("q,n,g,N", [(2, 2, 2, 6), (2, 6, 1, 9), (2, 3, 1, 2), (4, 3, 1, 20)])
def test_count_etale_examples(q, n, g, N):
    res = count_etale(q, n, g)
    assert res.normalized == N
    assert res.raw_count == n * N


def test_count_etale_brute_force_generation():
    # independent route: generating tuples of F_8 over F_2 avoid the prime subfield only
    res = count_etale(2, 3, 2)
    assert res.raw_count == 8**2 - 2**2


def test_count_etale_matches_formula_small_grid():
    for q, n, g in itertools.product((2, 3, 4), range(1, 5), range(1, 4)):
        if q ** (n * g) <= 10**4:
            assert count_etale(q, n, g).normalized == n_etale(q, n, g)


def test_count_matrix_anchor():
    res = count_matrix(2, 1, 2, 2)
    assert (res.raw_count, res.normalized, res.group_order) == (96, 16, 6)
    res = count_matrix(2, 1, 2, 1)
    assert res.raw_count == 0


@pytest.mark.parametrize("k", [1, 4, 16])
def test_partition_invariance(k):
    assert count_matrix(2, 1, 2, 3, parts=k).raw_count == count_matrix(2, 1, 2, 3).raw_count
    assert count_etale(3, 2, 3, parts=k).raw_count == count_etale(3, 2, 3).raw_count


def test_worker_pool_gives_same_count():
    assert count_matrix(2, 1, 2, 2, parts=4, workers=2).raw_count == 96
    assert count_etale(2, 4, 2, parts=3, workers=2).normalized == n_etale(2, 4, 2)


def test_spanning_tuples_are_counted():
    alg = ma.matrix_algebra(2, 1, 2)
    for g in (2, 3):
        spanning = sum(
            ma.spans_linearly(ma.MatrixTuple.from_vectors(alg, np.array(v)))
            for v in itertools.product(itertools.product(range(2), repeat=4), repeat=g)
        )
        assert count_matrix(2, 1, 2, g).raw_count >= spanning


def test_guard():
    with pytest.raises(Infeasible) as exc:
        count_matrix(2, 1, 2, 3, guard=100)
    assert exc.value.exit_code == 3
    with pytest.raises(Infeasible):
        count_etale(2, 10, 3, guard=1000)


def test_montecarlo():
    res = estimate_matrix_fraction(2, 1, 2, 2, samples=2000, seed=1)
    assert res.mode == "montecarlo"
    assert res.ci_low <= res.point <= res.ci_high
    assert res == estimate_matrix_fraction(2, 1, 2, 2, samples=2000, seed=1)
    out = res.to_json()
    assert out["confidence"] == "0.99" and out["samples"] == "2000"


def test_montecarlo_single_sample():
    alg = ma.matrix_algebra(2, 1, 2)
    for seed in range(40):
        draw = np.random.default_rng(seed).integers(0, 2, size=(1, 2, alg.dim))[0]
        if ma.generates_full(ma.MatrixTuple.from_vectors(alg, draw)):
            res = estimate_matrix_fraction(2, 1, 2, 2, samples=1, seed=seed)
            assert res.point == 1.0 and res.ci_high == 1.0
            break
    else:
        pytest.fail("no generating draw found")


def test_wilson_interval():
    lo, hi = wilson_interval(3750, 10_000)
    assert lo < 0.375 < hi and hi - lo < 0.03
    assert wilson_interval(0, 10)[0] == 0.0
    assert wilson_interval(10, 10)[1] == 1.0


def test_exhaustive_json():
    out = count_matrix(2, 1, 2, 2).to_json()
    assert out["S_g"] == "96" and out["N"] == "16" and out["C"] == "6"


# -- cache --------------------------------------------------------------------------


def test_cache_round_trip(tmp_path):
    store = CacheStore(tmp_path)
    key = cache_key("matrix", 2, 1, 2, 2, "exhaustive")
    res = count_matrix(2, 1, 2, 2)
    assert cache_get(store, key) is None
    assert cache_put(store, key, res)
    assert cache_get(store, key) == res
    mc = estimate_matrix_fraction(2, 1, 2, 2, samples=100, seed=5)
    mkey = cache_key("matrix", 2, 1, 2, 2, "montecarlo", 100, 5)
    cache_put(store, mkey, mc)
    assert cache_get(store, mkey) == mc
    assert mkey != cache_key("matrix", 2, 1, 2, 2, "montecarlo", 100, 6)


def test_cache_record_is_text(tmp_path):
    store = CacheStore(tmp_path)
    store.put("k", count_etale(2, 2, 2))
    lines = store.path("k").read_text(encoding="utf-8").splitlines()
    assert "raw_count=12" in lines
    assert lines[-1].startswith("checksum=")


def test_corrupt_entry_is_recomputed(tmp_path, caplog):
    store = CacheStore(tmp_path)
    key = cache_key("etale", 2, 2, 1, 2, "exhaustive")
    store.put(key, count_etale(2, 2, 2))
    path = store.path(key)
    path.write_text(path.read_text().replace("raw_count=12", "raw_count=13"))
    calls = []

    def compute():
        calls.append(1)
        return count_etale(2, 2, 2)

    with caplog.at_level(logging.WARNING):
        res = cached(store, key, compute)
    assert calls and res.raw_count == 12
    assert "corrupt" in caplog.text
    assert store.get(key).raw_count == 12  # overwritten
    cached(store, key, compute)
    assert len(calls) == 1


def test_unwritable_cache_is_not_fatal(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    store = CacheStore(blocker / "sub")
    assert not store.put("k", count_etale(2, 1, 1))
    assert cached(store, "k", lambda: count_etale(2, 1, 1)).normalized == 2


def test_cache_dir_precedence(monkeypatch, tmp_path):
    monkeypatch.setenv("SEPGEN_CACHE", str(tmp_path / "env"))
    assert resolve_cache_dir(str(tmp_path / "flag")) == tmp_path / "flag"
    assert resolve_cache_dir() == tmp_path / "env"
    monkeypatch.delenv("SEPGEN_CACHE")
    assert str(resolve_cache_dir()) == ".sepgen-cache"
