import os
import time

import numpy as np
import pytest

from boxdim.cache import GraphCache, cache_key
from boxdim.cayley import build_quotient_cayley
from boxdim.errors import ConfigError
from boxdim.groups import CongruenceQuotient, free_abelian, unitriangular


def quotient(m=12, spec=None):
    return CongruenceQuotient(spec or free_abelian(1), m)


def test_roundtrip(tmp_path):
    cache = GraphCache(tmp_path)
    cold = build_quotient_cayley(quotient(), cache=cache)
    warm = build_quotient_cayley(quotient(), cache=cache)
    assert np.array_equal(cold.adjacency, warm.adjacency)
    assert np.array_equal(cold.dist, warm.dist)
    assert np.array_equal(cold.coords, warm.coords)
    assert warm.quotient == quotient() and warm.generators == cold.generators


def test_roundtrip_matrix_group(tmp_path):
    cache = GraphCache(tmp_path)
    q = quotient(3, unitriangular(3))
    cold = build_quotient_cayley(q, cache=cache)
    warm = build_quotient_cayley(q, cache=cache)
    assert np.array_equal(cold.adjacency, warm.adjacency)
    assert np.array_equal(cold.coords, warm.coords)
    assert warm.distance(5, 11) == cold.distance(5, 11)


def test_key_separates_generators_and_moduli(tmp_path):
    spec = free_abelian(1)
    q = quotient(10)
    assert cache_key(q, spec.generators) != cache_key(quotient(11), spec.generators)
    assert cache_key(q, spec.generators) != cache_key(q, (((2,),),))


def test_miss_returns_none(tmp_path):
    cache = GraphCache(tmp_path)
    assert cache.load(quotient(), free_abelian(1).generators) is None


def test_corrupt_files_are_misses_and_removed(tmp_path):
    cache = GraphCache(tmp_path)
    graph = build_quotient_cayley(quotient(), cache=cache)
    (path, _, _), = cache.entries()

    good = path.read_bytes()
    for bad in (good[:10], b"NOPE" + good[4:], good.replace(b"BXDM", b"BXDN")):
        path.write_bytes(bad)
        assert cache.load(quotient(), graph.generators) is None
        assert not path.exists()
        path.write_bytes(good)
    assert cache.load(quotient(), graph.generators) is not None


def test_wrong_digest_is_a_miss(tmp_path):
    cache = GraphCache(tmp_path)
    build_quotient_cayley(quotient(8), cache=cache)
    (path, _, _), = cache.entries()
    # pretend the file answers a different key
    other = GraphCache(tmp_path)._path(b"\x00" * 32)
    path.rename(other)
    assert cache.load(quotient(8), free_abelian(1).generators) is None


def test_gc_budget_zero_evicts_all(tmp_path):
    cache = GraphCache(tmp_path)
    for m in (4, 6, 8):
        build_quotient_cayley(quotient(m), cache=cache)
    kept, deleted, freed = cache.gc(0)
    assert (kept, deleted) == (0, 3) and freed > 0
    assert cache.entries() == []


def test_gc_keeps_most_recent_within_budget(tmp_path):
    cache = GraphCache(tmp_path)
    for m in (4, 6, 8):
        build_quotient_cayley(quotient(m), cache=cache)
    entries = cache.entries()
    sizes = {p.name: s for p, _, s in entries}
    # age the first two so the m=8 file is newest, then budget for it alone
    now = time.time()
    for i, (p, _, _) in enumerate(entries):
        os.utime(p, (now - 100 + i, now - 100 + i))
    newest = cache.entries()[-1][0]
    kept, deleted, _ = cache.gc(sizes[newest.name])
    assert (kept, deleted) == (1, 2)
    assert [p for p, _, _ in cache.entries()] == [newest]


def test_load_refreshes_lru_position(tmp_path):
    cache = GraphCache(tmp_path)
    g4 = build_quotient_cayley(quotient(4), cache=cache)
    build_quotient_cayley(quotient(6), cache=cache)
    old = time.time() - 50
    for p, _, _ in cache.entries():
        os.utime(p, (old, old))
    # touching m=4 by loading it should make it the survivor
    assert cache.load(quotient(4), g4.generators) is not None
    kept, deleted, _ = cache.gc(cache.entries()[-1][2])
    assert (kept, deleted) == (1, 2 - 1)
    survivor = build_quotient_cayley(quotient(4), cache=cache)
    assert np.array_equal(survivor.adjacency, g4.adjacency)


def test_gc_empty_dir(tmp_path):
    cache = GraphCache(tmp_path)
    assert cache.gc(10 ** 6) == (0, 0, 0)
    with pytest.raises(ConfigError):
        cache.gc(-1)
