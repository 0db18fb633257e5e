"""Dimension solver tests.

The exhaustive enumerator is the oracle for the branch-and-bound; a third,
even dumber itertools.product check guards both on tiny spaces.
"""
import itertools
import random

import numpy as np
import pytest

from boxdim.boxspace import build_box_space
from boxdim.cayley import GrowthBound, build_quotient_cayley
from boxdim.covers import Cover, CoverSet, verify_cover
from boxdim.dimension import (
    FiniteMetricSpace,
    ProfileRow,
    asdim_profile,
    box_witness_cover,
    grid_families,
    interval_families,
    random_metric_space,
    rs_dim,
    rs_dim_exact,
    rs_dim_exhaustive,
    rs_dim_greedy,
    s_ladder,
    structured_component_families,
)
from boxdim.errors import ConfigError, ResourceCapError
from boxdim.groups import CongruenceQuotient, Filtration, free_abelian, unitriangular
from fractions import Fraction


def cycle_space(m):
    g = build_quotient_cayley(CongruenceQuotient(free_abelian(1), m))
    return FiniteMetricSpace.from_graph(g)


def path_space(n):
    idx = np.arange(n)
    return FiniteMetricSpace.from_matrix(np.abs(idx[:, None] - idx[None, :]))


def product_oracle(space, R, S):
    """Smallest valid color count by raw enumeration of every function."""
    n = space.n_vertices
    D = space.dist_matrix

    def valid(coloring):
        for color in set(coloring):
            pts = [i for i in range(n) if coloring[i] == color]
            comp = {i: i for i in pts}

            def find(x):
                while comp[x] != x:
                    x = comp[x]
                return x

            for i in pts:
                for j in pts:
                    if i < j and D[i, j] < R:
                        comp[find(i)] = find(j)
            groups = {}
            for i in pts:
                groups.setdefault(find(i), []).append(i)
            for g in groups.values():
                for i in g:
                    for j in g:
                        if D[i, j] > S:
                            return False
        return True

    for k in range(1, n + 1):
        if any(valid(c) for c in itertools.product(range(k), repeat=n)):
            return k - 1
    raise AssertionError("unreachable")


# --- solver anchors -------------------------------------------------------------

def test_cycle_twelve_needs_two_families():
    res = rs_dim_exact(cycle_space(12), R=2, S=3)
    assert res.n == 1
    assert rs_dim_exhaustive(cycle_space(12), R=2, S=3).n == 1


def test_path_five():
    res = rs_dim_exact(path_space(5), R=2, S=2)
    assert res.n == 1


def test_large_s_is_trivial():
    for space in (cycle_space(12), path_space(7)):
        assert rs_dim_exact(space, R=3, S=space.diameter).n == 0


def test_all_close_space_forces_singletons():
    m = np.ones((5, 5), dtype=int) - np.eye(5, dtype=int)
    space = FiniteMetricSpace.from_matrix(m)
    # every pair is <2-connected, S = 0 forbids any pair: five singletons
    assert rs_dim_exact(space, R=2, S=0).n == 4
    assert rs_dim_exhaustive(space, R=2, S=0).n == 4


def test_n_cap_reports_exceeded():
    res = rs_dim_exact(cycle_space(12), R=2, S=3, n_cap=0)
    assert res.exceeded_cap
    assert res.n is None and res.cover is None


def test_point_caps():
    with pytest.raises(ResourceCapError):
        rs_dim_exact(cycle_space(12), R=2, S=3, point_cap=10)
    with pytest.raises(ResourceCapError):
        rs_dim_exhaustive(cycle_space(14), R=2, S=3)


def test_parameter_validation():
    with pytest.raises(ConfigError):
        rs_dim_exact(cycle_space(6), R=0, S=3)
    with pytest.raises(ConfigError):
        rs_dim_exhaustive(cycle_space(6), R=2, S=-1)
    with pytest.raises(ConfigError):
        rs_dim(cycle_space(6), 2, 3, method="nope")


def test_witness_cover_structure():
    res = rs_dim_exact(cycle_space(12), R=2, S=3)
    assert res.n_families == 2 == len(res.cover.families)
    got = sorted(v for _, s in res.cover.all_sets() for _, ids in s.parts for v in ids)
    assert got == list(range(12))
    report = verify_cover(res.cover, R=2, S=3)
    assert report.ok


def test_exact_is_deterministic():
    a = rs_dim_exact(cycle_space(10), R=2, S=4)
    b = rs_dim_exact(cycle_space(10), R=2, S=4)
    assert a.coloring == b.coloring and a.n == b.n


# --- oracle agreement ------------------------------------------------------------

def test_exact_matches_exhaustive_random_spaces():
    rng = random.Random(20260815)
    for trial in range(60):
        space = random_metric_space(rng, rng.randint(4, 10), max_distance=6)
        R = rng.randint(1, 3)
        S = rng.randint(2, 6)
        got = rs_dim_exact(space, R, S, n_cap=10)
        want = rs_dim_exhaustive(space, R, S)
        assert got.n == want.n, (trial, R, S, space.dist_matrix.tolist())


def test_exact_matches_product_oracle_tiny():
    rng = random.Random(424242)
    for trial in range(25):
        space = random_metric_space(rng, rng.randint(3, 6), max_distance=5)
        R = rng.randint(1, 3)
        S = rng.randint(1, 5)
        got = rs_dim_exact(space, R, S, n_cap=6)
        assert got.n == product_oracle(space, R, S), (trial, R, S)


def test_exact_matches_exhaustive_cycles_and_paths():
    for m in (5, 8, 12):
        space = cycle_space(m)
        for R in (2, 3):
            for S in (2, 4):
                assert rs_dim_exact(space, R, S).n == rs_dim_exhaustive(space, R, S).n
    for n in (6, 9):
        space = path_space(n)
        for R in (2, 3):
            for S in (2, 3):
                assert rs_dim_exact(space, R, S).n == rs_dim_exhaustive(space, R, S).n


def test_monotonicity_in_s_and_r():
    rng = random.Random(99)
    for _ in range(12):
        space = random_metric_space(rng, rng.randint(5, 9), max_distance=6)
        ns = [rs_dim_exact(space, 2, S).n for S in (1, 2, 4, 6)]
        assert all(a >= b for a, b in zip(ns, ns[1:])), ns
        nr = [rs_dim_exact(space, R, 3).n for R in (1, 2, 3, 4)]
        assert all(a <= b for a, b in zip(nr, nr[1:])), nr


def test_greedy_upper_bounds_exact():
    rng = random.Random(7)
    for _ in range(15):
        space = random_metric_space(rng, rng.randint(5, 10), max_distance=6)
        R = rng.randint(1, 3)
        S = rng.randint(2, 6)
        greedy = rs_dim_greedy(space, R, S)
        exact = rs_dim_exact(space, R, S, n_cap=10)
        assert greedy.n >= exact.n
        assert verify_cover(greedy.cover, R, S).ok


def test_greedy_cycle_frozen():
    res = rs_dim_greedy(cycle_space(12), R=2, S=3)
    # carving radius 1 yields four three-point arcs in a cycle, 2-colorable
    assert res.n == 1
    assert verify_cover(res.cover, R=2, S=3).ok


# --- metric space plumbing --------------------------------------------------------

def test_from_matrix_validation():
    with pytest.raises(ConfigError):
        FiniteMetricSpace.from_matrix([[0, 1], [2, 0]])
    with pytest.raises(ConfigError):
        FiniteMetricSpace.from_matrix([[1]])
    with pytest.raises(ConfigError):
        FiniteMetricSpace.from_matrix([[0, 0], [0, 0]])
    with pytest.raises(ConfigError):
        FiniteMetricSpace.from_matrix([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    with pytest.raises(ConfigError):
        FiniteMetricSpace.from_matrix([[0, 1, 2], [1, 0, 1]])


def test_random_metric_space_is_metric():
    rng = random.Random(5150)
    for _ in range(20):
        space = random_metric_space(rng, rng.randint(2, 12), max_distance=7)
        FiniteMetricSpace.from_matrix(space.dist_matrix)   # revalidates


def test_from_graph_matches_graph_distances():
    g = build_quotient_cayley(CongruenceQuotient(free_abelian(2), 4))
    space = FiniteMetricSpace.from_graph(g)
    assert space.n_vertices == 16
    for u, v in ((0, 5), (3, 12), (1, 1)):
        assert space.distance(u, v) == g.distance(u, v)


# --- structured patterns -----------------------------------------------------------

def test_interval_families_single_set_when_diameter_fits():
    assert interval_families(9, 2, 8) == [[list(range(9))]]


def test_interval_families_alternate_and_verify():
    box = build_box_space(Filtration(free_abelian(1), (256,)))
    fams = interval_families(256, 8, 64)
    assert len(fams) == 2
    cover = Cover(space=box, families=tuple(
        tuple(CoverSet(label=f"f{j}.s{i}", parts=((0, tuple(ids)),))
              for i, ids in enumerate(fam))
        for j, fam in enumerate(fams)))
    report = verify_cover(cover, R=8, S=64)
    assert report.ok


def test_interval_families_infeasible():
    assert interval_families(7, 3, 2) is None


def test_grid_families_verify_on_torus():
    box = build_box_space(Filtration(free_abelian(2), (16,)))
    comp = box.components[0]
    fams = structured_component_families(comp, R=2, S=4)
    assert len(fams) == 3
    cover = Cover(space=box, families=tuple(
        tuple(CoverSet(label=f"f{j}.s{i}", parts=((0, tuple(ids)),))
              for i, ids in enumerate(fam))
        for j, fam in enumerate(fams)))
    report = verify_cover(cover, R=2, S=4)
    assert report.ok
    assert report.is_cover


def test_grid_families_infeasible_when_no_block_fits():
    assert grid_families(8, 8, 100) is None


def test_structured_unavailable_elsewhere():
    q = CongruenceQuotient(unitriangular(3), 4)
    g = build_quotient_cayley(q)
    assert structured_component_families(g, 2, 8) is None


# --- profiles ----------------------------------------------------------------------

def test_s_ladder():
    assert s_ladder(2, 64) == [4, 8, 16, 32, 64]
    assert s_ladder(8, 64) == [16, 32, 64]
    assert s_ladder(8, 10) == [10]


def test_box_witness_cover_merges_small_components():
    box = build_box_space(Filtration(free_abelian(1), (2, 4, 256)))
    got = box_witness_cover(box, R=4, S=16, mode="structured")
    assert got is not None
    cover, report = got
    assert report.ok
    labels0 = {s.label for s in cover.families[0]}
    assert "F" in labels0
    assert len(cover.families) == 2


def test_profile_structured_line_box():
    box = build_box_space(Filtration(free_abelian(1),
                                     tuple(2 ** t for t in range(1, 11))))
    table = asdim_profile(box, (2, 4, 8), S_cap=64, mode="structured")
    assert [row.R for row in table.rows] == [2, 4, 8]
    for row in table.rows:
        assert row.n_achieved == 1
        assert row.s_achieved <= 64
        assert row.note == ""
        assert row.hirsch_length == 1
        assert row.component_count == 10


def test_profile_structured_plane_box():
    box = build_box_space(Filtration(free_abelian(2), (4, 16, 64)))
    table = asdim_profile(box, (2,), S_cap=16, mode="structured")
    row = table.rows[0]
    assert row.n_achieved == 2
    assert row.hirsch_length == 2
    assert verify_cover(row.cover, 2, row.s_achieved).ok


def test_profile_greedy_unitriangular_box():
    box = build_box_space(Filtration(unitriangular(3), (2, 4)))
    table = asdim_profile(box, (2,), S_cap=4, mode="greedy")
    row = table.rows[0]
    assert row.n_achieved is not None
    assert row.s_achieved <= 4
    assert row.hirsch_length == 3


def test_profile_exact_mode():
    box = build_box_space(Filtration(free_abelian(1), (16, 32)))
    table = asdim_profile(box, (2,), S_cap=8, mode="exact")
    row = table.rows[0]
    assert row.n_achieved == 1


def test_profile_prop41_mode():
    box = build_box_space(Filtration(free_abelian(1),
                                     tuple(2 ** t for t in range(1, 8))))
    growth = GrowthBound(C=Fraction(3), d=1, validated_range=(1, 10 ** 7))
    table = asdim_profile(box, (2,), S_cap=64, mode="prop41", growth=growth)
    row = table.rows[0]
    assert row.n_achieved == verify_cover(row.cover, 2, check_disjoint=False).r_multiplicity - 1
    assert row.n_achieved <= 4
    # doubling stabilizes at radius R, so the measured sets stay small
    assert row.s_achieved <= 64 and row.note == ""
    tight = asdim_profile(box, (2,), S_cap=4, mode="prop41", growth=growth)
    assert tight.rows[0].note == "S_cap exhausted"
    assert tight.rows[0].s_achieved > 4
    with pytest.raises(ConfigError):
        asdim_profile(box, (2,), S_cap=64, mode="prop41")


def test_profile_flags_unreachable_s_cap():
    box = build_box_space(Filtration(free_abelian(2), (8,)))
    table = asdim_profile(box, (8,), S_cap=4, mode="structured")
    row = table.rows[0]
    assert row.n_achieved is None and row.s_achieved is None
    assert row.note == "S_cap exhausted"


def test_profile_threads_match():
    box = build_box_space(Filtration(free_abelian(1),
                                     tuple(2 ** t for t in range(1, 9))))
    t1 = asdim_profile(box, (2, 4), S_cap=32, mode="structured", threads=1)
    t4 = asdim_profile(box, (2, 4), S_cap=32, mode="structured", threads=4)
    strip = lambda rows: [(r.R, r.s_achieved, r.n_achieved, r.mode) for r in rows]
    assert strip(t1.rows) == strip(t4.rows)


def test_profile_csv_rows():
    box = build_box_space(Filtration(free_abelian(1), (16, 64)))
    table = asdim_profile(box, (2,), S_cap=16, mode="structured")
    rows = list(table.as_csv_rows())
    assert rows[0] == ProfileRow.CSV_FIELDS
    assert len(rows) == 2
    assert rows[1][0] == "2"


def test_profile_rejects_unknown_mode():
    box = build_box_space(Filtration(free_abelian(1), (8,)))
    with pytest.raises(ConfigError):
        asdim_profile(box, (2,), S_cap=8, mode="magic")
