"""Cover engine tests.

The naive reference implementations live at the top and everything fast is
checked against them on spaces small enough to brute-force.
"""
import random
from fractions import Fraction

import numpy as np
import pytest

from boxdim.boxspace import build_box_space, isometry_profile
from boxdim.cayley import GrowthBound, build_quotient_cayley
from boxdim.covers import (
    Cover,
    CoverParams,
    CoverSet,
    assemble_box_families,
    cover_prop41,
    diagonal_transfer,
    doubling_radius,
    families_from_multiplicity_cover,
    family_violations,
    maximal_packing,
    packing_count_max,
    r_multiplicity,
    verify_cover,
)
from boxdim.errors import (
    ConfigError,
    GrowthBoundError,
    InsufficientInputError,
    VerificationError,
)
from boxdim.groups import CongruenceQuotient, Filtration, free_abelian


# --- reference implementations ------------------------------------------------

def brute_multiplicity(cover, R):
    """Per-point count of sets meeting the R-ball, by raw distance loops."""
    space = cover.space
    sets = [set(s.points()) for _, s in cover.all_sets()]
    best = 0
    for p in space.points():
        c = sum(1 for pts in sets
                if any(space.distance(p, q) <= R for q in pts))
        best = max(best, c)
    return best


def brute_set_distance(space, a, b):
    return min(space.distance(p, q) for p in a.points() for q in b.points())


def brute_family_min(space, family):
    pairs = [(family[i], family[j])
             for i in range(len(family)) for j in range(i + 1, len(family))]
    if not pairs:
        return None
    return min(brute_set_distance(space, a, b) for a, b in pairs)


def brute_set_diameter(space, s):
    pts = list(s.points())
    if len(pts) < 2:
        return 0
    return max(space.distance(pts[i], pts[j])
               for i in range(len(pts)) for j in range(i + 1, len(pts)))


def z_box(*moduli):
    return build_box_space(Filtration(free_abelian(1), tuple(moduli)))


def cycle(m):
    return build_quotient_cayley(CongruenceQuotient(free_abelian(1), m))


def arc_set(label, ci, ids):
    return CoverSet(label=label, parts=((ci, tuple(ids)),))


# --- parameters ----------------------------------------------------------------

def test_params_line_growth():
    p = CoverParams.from_growth(2, GrowthBound(C=Fraction(3), d=1, validated_range=(1, 20)))
    assert p.K == 5
    assert p.m == 9
    assert p.S_0 == 4 ** 10 * 2
    # m is minimal for (K/4^d)^m >= C R^d
    ratio = Fraction(p.K, 4 ** p.d)
    assert ratio ** p.m >= p.C * p.R ** p.d
    assert ratio ** (p.m - 1) < p.C * p.R ** p.d


def test_params_minimality_sweep():
    for d in (1, 2, 4):
        for R in (1, 2, 8):
            for C in (Fraction(3), Fraction(5), Fraction(7, 2)):
                p = CoverParams.from_growth(R, GrowthBound(C=C, d=d, validated_range=(1, 10)))
                assert p.K == 4 ** d + 1
                ratio = Fraction(p.K, 4 ** d)
                assert ratio ** p.m >= C * R ** d
                assert p.m == 0 or ratio ** (p.m - 1) < C * R ** d
                assert p.S_0 == 4 ** (p.m + 1) * R
                assert p.S_0 >= 4 * R


def test_params_rejects_bad_input():
    g = GrowthBound(C=Fraction(3), d=1, validated_range=(1, 4))
    with pytest.raises(ConfigError):
        CoverParams.from_growth(0, g)
    with pytest.raises(ConfigError):
        CoverParams.from_growth(2, GrowthBound(C=Fraction(-1), d=1, validated_range=(1, 4)))


# --- doubling radius -----------------------------------------------------------

def test_doubling_radius_line():
    g = cycle(100)
    p = CoverParams.from_growth(2, GrowthBound(C=Fraction(3), d=1, validated_range=(1, 50)))
    # first rung already doubles: |B(8)| = 17 <= 5 * |B(2)| = 25
    assert g.ball_size(8) == 17
    assert g.ball_size(2) == 5
    assert doubling_radius(g, p) == 2


def test_doubling_radius_torus():
    q = CongruenceQuotient(free_abelian(2), 32)
    g = build_quotient_cayley(q)
    p = CoverParams.from_growth(2, GrowthBound(C=Fraction(5), d=2, validated_range=(1, 20)))
    assert g.ball_size(8) == 145
    assert g.ball_size(2) == 13
    assert p.K == 17
    assert doubling_radius(g, p) == 2


def test_doubling_radius_saturates_at_diameter():
    g = cycle(12)
    p = CoverParams.from_growth(6, GrowthBound(C=Fraction(3), d=1, validated_range=(1, 12)))
    # R = diameter: both balls are the whole vertex set
    assert doubling_radius(g, p) == 6


def test_doubling_radius_rejects_false_growth_claim():
    g = cycle(12)
    p = CoverParams.from_growth(2, GrowthBound(C=Fraction(1), d=1, validated_range=(1, 12)))
    with pytest.raises(GrowthBoundError):
        doubling_radius(g, p)


def test_doubling_invariant_sweep():
    for m in (12, 16, 48, 64):
        g = cycle(m)
        for R in (1, 2, 8):
            p = CoverParams.from_growth(R, GrowthBound(C=Fraction(3), d=1, validated_range=(1, m)))
            rn = doubling_radius(g, p)
            assert rn in {4 ** i * R for i in range(p.m + 1)}
            assert g.ball_size(4 * rn) <= p.K * g.ball_size(rn)


# --- packings ------------------------------------------------------------------

def test_packing_cycle_unit_radius():
    g = cycle(12)
    assert maximal_packing(g, 1).tolist() == [0, 3, 6, 9]


def test_packing_cycle_saturated():
    g = cycle(12)
    assert maximal_packing(g, 6).tolist() == [0]


def test_packing_dense_generators():
    q = CongruenceQuotient(free_abelian(1), 5)
    g = build_quotient_cayley(q, generators=((1,), (2,)))
    # all distances are 1, so one ball blocks everything
    assert maximal_packing(g, 1).tolist() == [0]


def test_packing_invariants_random():
    rng = random.Random(2218)
    for _ in range(25):
        m = rng.randrange(8, 70)
        g = cycle(m)
        rn = rng.randrange(1, 6)
        centers = maximal_packing(g, rn)
        # pairwise ball disjointness <=> centers more than 2 rn apart
        for i in range(len(centers)):
            for j in range(i + 1, len(centers)):
                assert g.distance(int(centers[i]), int(centers[j])) > 2 * rn
        # maximality: everything is blocked
        blocked = np.zeros(m, dtype=bool)
        for c in centers:
            blocked[g.ball_ids(int(c), 2 * rn)] = True
        assert blocked.all()


def test_packing_count_matches_brute_force():
    rng = random.Random(515)
    for _ in range(10):
        m = rng.randrange(10, 40)
        g = cycle(m)
        rn = rng.randrange(1, 4)
        centers = maximal_packing(g, rn)
        got = packing_count_max(g, centers, rn)
        want = max(sum(1 for c in centers if g.distance(z, int(c)) <= 3 * rn)
                   for z in range(m))
        assert got == want


# --- multiplicity --------------------------------------------------------------

def test_multiplicity_hand_checked_arcs():
    # packing {0,3,6,9} on the 12-cycle, balls of radius 2 around each:
    # five-point arcs at stride three; a radius-2 ball spans nine points
    # and meets exactly three arcs (point 1 sees the arcs at 0, 3, and 9)
    box = z_box(12)
    g = box.components[0]
    assert maximal_packing(g, 1).tolist() == [0, 3, 6, 9]
    sets = tuple(arc_set(f"b{c}", 0, g.ball_ids(c, 2)) for c in (0, 3, 6, 9))
    cover = Cover(space=box, families=(sets,))
    assert sorted(sets[0].parts[0][1]) == [0, 1, 2, 10, 11]
    assert r_multiplicity(cover, 2) == 3
    assert brute_multiplicity(cover, 2) == 3
    assert r_multiplicity(cover, 0) == 2   # overlaps alone
    assert r_multiplicity(cover, 1) == 3


def test_multiplicity_against_brute_force_random():
    rng = random.Random(90125)
    box = z_box(4, 8, 16)
    for _ in range(12):
        sets = []
        for k in range(rng.randrange(2, 6)):
            ci = rng.randrange(3)
            m = box.components[ci].n_vertices
            start = rng.randrange(m)
            size = rng.randrange(1, 5)
            ids = tuple(sorted((start + t) % m for t in range(size)))
            sets.append(arc_set(f"s{k}", ci, ids))
        cover = Cover(space=box, families=(tuple(sets),))
        for R in (0, 1, 2, 3, 7):
            assert r_multiplicity(cover, R) == brute_multiplicity(cover, R)


def test_multiplicity_counts_cross_component_reach():
    # a set in the 2-component is within R = 3 of every point of the
    # 4-component (cross distance 1 + 2 = 3), and vice versa
    box = z_box(2, 4)
    cover = Cover(space=box, families=((arc_set("a", 0, (0, 1)),
                                        arc_set("b", 1, (0,))),))
    assert r_multiplicity(cover, 3) == brute_multiplicity(cover, 3) == 2
    assert r_multiplicity(cover, 2) == brute_multiplicity(cover, 2) == 1


# --- verify_cover ---------------------------------------------------------------

def four_arc_cover(box):
    arcs = [(0, 1, 2), (3, 4, 5), (6, 7, 8), (9, 10, 11)]
    fam0 = tuple(arc_set(f"a{i}", 0, arcs[i]) for i in (0, 2))
    fam1 = tuple(arc_set(f"a{i}", 0, arcs[i]) for i in (1, 3))
    return Cover(space=box, families=(fam0, fam1))


def test_verify_cover_valid_two_families():
    box = z_box(12)
    cover = four_arc_cover(box)
    report = verify_cover(cover, R=4, S=2)
    assert report.ok
    assert report.is_cover and report.uncovered_witness is None
    assert report.max_set_diameter == 2 and report.diameters_exact
    assert report.family_min_distances == (None, None)
    assert report.close_pair_witnesses == ()
    assert report.r_multiplicity == brute_multiplicity(cover, 4)


def test_verify_cover_reports_close_pairs():
    box = z_box(12)
    cover = four_arc_cover(box)
    report = verify_cover(cover, R=5, S=2)
    assert not report.ok
    assert report.family_min_distances == (4, 4)
    assert ("a0", "a2") in {(a, b) for _, a, b, _ in report.close_pair_witnesses}
    # the distance claims in the witnesses are exact
    labels = {s.label: s for _, s in cover.all_sets()}
    for _, a, b, d in report.close_pair_witnesses:
        assert brute_set_distance(box, labels[a], labels[b]) == d


def test_verify_cover_detects_uncovered_point():
    box = z_box(12)
    fam = (arc_set("a", 0, (0, 1, 2, 3, 4, 5)),)
    report = verify_cover(Cover(space=box, families=(fam,)), R=1, S=5)
    assert not report.is_cover
    assert report.uncovered_witness == (0, 6)


def test_verify_cover_flags_oversized_set():
    box = z_box(12)
    cover = four_arc_cover(box)
    report = verify_cover(cover, R=4, S=1)
    assert report.oversized_witness is not None
    label, diam = report.oversized_witness
    assert diam == 2
    assert not report.ok


def test_verify_cover_singletons_and_whole_space():
    box = z_box(8)
    singles = tuple(arc_set(f"p{v}", 0, (v,)) for v in range(8))
    rep = verify_cover(Cover(space=box, families=(singles,)), R=0, S=0)
    assert rep.ok and rep.r_multiplicity == 1 and rep.max_set_diameter == 0
    whole = (arc_set("all", 0, tuple(range(8))),)
    rep = verify_cover(Cover(space=box, families=(whole,)), R=3, S=4)
    assert rep.is_cover and rep.r_multiplicity == 1
    assert rep.max_set_diameter == 4


def test_verify_cover_rejects_malformed():
    box = z_box(8)
    with pytest.raises(ConfigError):
        verify_cover(Cover(space=box, families=((arc_set("x", 0, ()),),)), 1, 1)
    with pytest.raises(ConfigError):
        verify_cover(Cover(space=box, families=((arc_set("x", 1, (0,)),),)), 1, 1)
    with pytest.raises(ConfigError):
        verify_cover(Cover(space=box, families=((arc_set("x", 0, (9,)),),)), 1, 1)
    dup = (arc_set("x", 0, (0,)), arc_set("x", 0, (1,)))
    with pytest.raises(ConfigError):
        verify_cover(Cover(space=box, families=(dup,)), 1, 1)


def test_verify_cover_diameters_match_brute_force():
    rng = random.Random(777)
    box = z_box(4, 8, 16)
    for _ in range(8):
        sets = []
        for k in range(rng.randrange(1, 5)):
            parts = []
            for ci in sorted(rng.sample(range(3), rng.randrange(1, 3))):
                m = box.components[ci].n_vertices
                start = rng.randrange(m)
                ids = tuple(sorted({(start + t) % m for t in range(rng.randrange(1, 5))}))
                parts.append((ci, ids))
            sets.append(CoverSet(label=f"s{k}", parts=tuple(parts)))
        cover = Cover(space=box, families=(tuple(sets),))
        report = verify_cover(cover, R=1, S=100)
        assert report.diameters_exact
        assert report.max_set_diameter == max(brute_set_diameter(box, s) for s in sets)


def test_family_min_distance_matches_brute_force():
    rng = random.Random(31337)
    box = z_box(8, 16)
    for _ in range(12):
        fam = []
        for k in range(rng.randrange(2, 5)):
            ci = rng.randrange(2)
            m = box.components[ci].n_vertices
            start = rng.randrange(m)
            ids = tuple(sorted({(start + t) % m for t in range(rng.randrange(1, 4))}))
            fam.append(arc_set(f"s{k}", ci, ids))
        for R in (1, 2, 4, 9, 26):
            viol = family_violations(box, tuple(fam), R)
            want = brute_family_min(box, fam)
            if want is not None and want < R:
                assert min(d for _, _, d in viol) == want
            else:
                assert viol == []


# --- the packing cover ----------------------------------------------------------

GROWTH_Z = GrowthBound(C=Fraction(3), d=1, validated_range=(1, 10 ** 7))


def test_prop41_cover_line_box():
    box = z_box(*[2 ** t for t in range(1, 9)])
    cover, report = cover_prop41(box, R=8, growth=GROWTH_Z)
    assert report.ok
    assert report.r_multiplicity <= report.params.K == 5
    assert report.max_set_diameter <= max(report.params.S_0, 8)
    assert report.is_cover
    # one collective set spans every component of diameter <= R
    labels = [s.label for _, s in cover.all_sets()]
    assert labels.count("F_R") == 1
    f_r = next(s for _, s in cover.all_sets() if s.label == "F_R")
    assert f_r.component_indices() == tuple(
        ci for ci, d in enumerate(box.diameters) if d <= 8)
    for ci, rn in enumerate(report.doubling_radii):
        if box.diameters[ci] > 8:
            assert rn is not None
            assert report.packing_counts[ci] <= report.params.K


def test_prop41_multiplicity_within_bound_at_large_radius():
    # at R = 64 six small components sit pairwise within reach; a cover
    # with one set per small component would exceed K = 5, the collective
    # set keeps the count at one
    box = z_box(*[2 ** t for t in range(1, 11)])
    cover, report = cover_prop41(box, R=64, growth=GROWTH_Z)
    assert report.params.K == 5
    assert report.r_multiplicity <= 5
    assert report.ok


def test_prop41_exact_multiplicity_small_box():
    box = z_box(4, 8, 32)
    cover, report = cover_prop41(box, R=2, growth=GROWTH_Z)
    assert report.r_multiplicity == brute_multiplicity(cover, 2)
    assert report.r_multiplicity <= 5


def test_prop41_threaded_build_identical():
    box = z_box(*[2 ** t for t in range(1, 8)])
    c1, r1 = cover_prop41(box, R=4, growth=GROWTH_Z, threads=1)
    c2, r2 = cover_prop41(box, R=4, growth=GROWTH_Z, threads=4)
    assert [s.label for _, s in c1.all_sets()] == [s.label for _, s in c2.all_sets()]
    assert [s.parts for _, s in c1.all_sets()] == [s.parts for _, s in c2.all_sets()]
    assert r1.r_multiplicity == r2.r_multiplicity
    assert r1.doubling_radii == r2.doubling_radii


def test_prop41_all_components_small():
    box = z_box(4, 8)
    cover, report = cover_prop41(box, R=10, growth=GROWTH_Z)
    assert cover.n_sets() == 1
    assert report.r_multiplicity == 1
    assert report.max_set_diameter == 2 + 4


def test_prop41_torus_box():
    growth = GrowthBound(C=Fraction(5), d=2, validated_range=(1, 10 ** 7))
    small = build_box_space(Filtration(free_abelian(2), (4, 8)))
    cover, report = cover_prop41(small, R=2, growth=growth)
    assert report.ok
    assert report.params.K == 17
    assert report.r_multiplicity == brute_multiplicity(cover, 2)
    big = build_box_space(Filtration(free_abelian(2), (4, 8, 16)))
    cover, report = cover_prop41(big, R=2, growth=growth)
    assert report.ok
    assert report.r_multiplicity <= 17


# --- regrouping into disjoint families -------------------------------------------

def test_regroup_hand_checked_cycle():
    box = z_box(12)
    g = box.components[0]
    sets = tuple(arc_set(f"b{c}", 0, g.ball_ids(c, 2)) for c in (0, 3, 6, 9))
    cover = Cover(space=box, families=(sets,))
    out = families_from_multiplicity_cover(cover, R=2)
    # the proximity graph is the 4-cycle b0-b3-b6-b9-b0: two families
    assert len(out.families) == 2
    assert {s.label for s in out.families[0]} == {"b0", "b6"}
    assert {s.label for s in out.families[1]} == {"b3", "b9"}
    report = verify_cover(out, R=2, S=4)
    assert report.family_min_distances == (None, None)


def test_regroup_preserves_sets_and_is_disjoint():
    box = z_box(*[2 ** t for t in range(1, 7)])
    cover, _ = cover_prop41(box, R=2, growth=GROWTH_Z)
    out = families_from_multiplicity_cover(cover, R=2)
    assert sorted(s.label for _, s in out.all_sets()) == sorted(
        s.label for _, s in cover.all_sets())
    for fam in out.families:
        assert family_violations(box, fam, 2) == []


def test_regroup_overlapping_sets_get_distinct_families():
    box = z_box(8)
    a = arc_set("a", 0, (0, 1, 2))
    b = arc_set("b", 0, (2, 3, 4))
    out = families_from_multiplicity_cover(Cover(space=box, families=((a, b),)), R=1)
    fams = {s.label: j for j, fam in enumerate(out.families) for s in fam}
    assert fams["a"] != fams["b"]


# --- per-scale assembly -----------------------------------------------------------

def eight_component_box():
    return z_box(*[2 ** t for t in range(1, 9)])


def scale_covers(box):
    """Scale 1: alternating arcs of two; scale 4: arcs of eight on the large
    components plus whole-component sets on the two smallest."""
    def arcs(ci, size):
        m = box.components[ci].n_vertices
        chunks = [tuple(range(a, a + size)) for a in range(0, m, size)]
        fam0 = tuple(arc_set(f"k{size}.c{ci}.a{i}", ci, chunks[i])
                     for i in range(0, len(chunks), 2))
        fam1 = tuple(arc_set(f"k{size}.c{ci}.a{i}", ci, chunks[i])
                     for i in range(1, len(chunks), 2))
        return fam0, fam1

    c1_f0, c1_f1 = [], []
    for ci in range(1, 8):
        f0, f1 = arcs(ci, 2)
        c1_f0.extend(f0)
        c1_f1.extend(f1)
    cover1 = Cover(space=box, families=(tuple(c1_f0), tuple(c1_f1)))

    c4_f0 = [CoverSet(label="whole0", parts=((0, (0, 1)),)),
             CoverSet(label="whole1", parts=((1, tuple(range(4))),))]
    c4_f1 = []
    for ci in range(4, 8):
        f0, f1 = arcs(ci, 8)
        c4_f0.extend(f0)
        c4_f1.extend(f1)
    cover4 = Cover(space=box, families=(tuple(c4_f0), tuple(c4_f1)))
    return {1: cover1, 4: cover4}


def test_assembly_pipeline():
    box = eight_component_box()
    profile = isometry_profile(box)
    covers = scale_covers(box)
    asm = assemble_box_families(box, covers, profile)
    assert asm.report.ok
    assert asm.scales == (1, 4)
    # scale 1 sets have diameter 1, scale 4 arcs have diameter 7
    assert asm.scale_diameters == {1: 1, 4: 7}
    # thresholds: first component whose balls of radius max(k, S_k) are
    # genuine copies; radii along this box are floor((m - 1) / 2)
    assert asm.thresholds == {1: 1, 4: 3}
    assert asm.finite_parts == {1: (0,), 4: (0, 1, 2)}
    # whole-component sets at scale 4 sit below the window and are dropped
    labels4 = {s.label for fam in asm.families[4] for s in fam}
    assert "whole0" not in labels4 and "whole1" not in labels4
    # subtraction identity held exactly
    assert asm.report.subtraction_ok
    # scale-1 assembled family includes the kept scale-4 sets
    labels1 = {s.label for fam in asm.families[1] for s in fam}
    assert any(lbl.startswith("k8.") for lbl in labels1)


def test_assembly_corrupted_threshold_is_witnessed():
    box = eight_component_box()
    profile = isometry_profile(box)
    covers = scale_covers(box)
    honest = assemble_box_families(box, covers, profile)
    assert honest.report.ok
    # forcing the scale-4 window down to component 0 pulls the two
    # whole-component sets into one family at distance 1 + 2 = 3 < 4
    bad = assemble_box_families(box, covers, profile,
                                thresholds={1: 1, 4: 0})
    assert not bad.report.ok
    pairs = {(a, b): d for _, _, a, b, d in bad.report.violations}
    assert pairs.get(("whole0", "whole1")) == 3


def test_assembly_rejects_straddler_in_window():
    box = eight_component_box()
    profile = isometry_profile(box)
    covers = scale_covers(box)
    straddler = CoverSet(label="bad", parts=((4, (0, 1)), (5, (0, 1))))
    fam0 = covers[4].families[0] + (straddler,)
    covers = {1: covers[1], 4: Cover(space=box, families=(fam0, covers[4].families[1]))}
    with pytest.raises(VerificationError):
        assemble_box_families(box, covers, profile)


def test_assembly_tolerates_straddler_below_window():
    box = eight_component_box()
    profile = isometry_profile(box)
    covers = scale_covers(box)
    low = CoverSet(label="low", parts=((0, (0, 1)), (1, (0, 1))))
    fam0 = covers[4].families[0] + (low,)
    covers = {1: covers[1], 4: Cover(space=box, families=(fam0, covers[4].families[1]))}
    asm = assemble_box_families(box, covers, profile)
    assert asm.report.ok
    assert all(s.label != "low" for fam in asm.families[4] for s in fam)


def test_assembly_needs_usable_truncation():
    box = z_box(2, 4)
    profile = isometry_profile(box)
    cover = Cover(space=box, families=((arc_set("a", 1, tuple(range(4))),),))
    with pytest.raises(ConfigError):
        assemble_box_families(box, {5: cover}, profile)


# --- diagonal transfer ------------------------------------------------------------

Z = free_abelian(1)


def striped(radius, flip=False):
    out = {}
    for x in range(-radius, radius + 1):
        fam = (x // 4) % 2
        out[(x,)] = 1 - fam if flip else fam
    return out


def test_transfer_agreeing_inputs():
    inputs = [(r, striped(r)) for r in (10, 15, 20, 25, 30)]
    res = diagonal_transfer(Z, inputs, R=2, S=3, r0=4)
    assert len(res.coloring) == 9
    assert res.surviving_radii == (10, 15, 20, 25, 30)
    assert res.discarded_radii == ()
    for x in range(-4, 5):
        assert res.coloring[(x,)] == (x // 4) % 2


def test_transfer_majority_discards_disagreement():
    inputs = [(10, striped(10)), (15, striped(15, flip=True)), (20, striped(20))]
    res = diagonal_transfer(Z, inputs, R=2, S=3, r0=4)
    assert res.discarded_radii == (15,)
    for x in range(-4, 5):
        assert res.coloring[(x,)] == (x // 4) % 2


def test_transfer_single_input_is_restriction():
    res = diagonal_transfer(Z, [(10, striped(10))], R=2, S=3, r0=4)
    assert res.surviving_radii == (10,)
    assert res.coloring == {(x,): (x // 4) % 2 for x in range(-4, 5)}


def test_transfer_monochrome_needs_large_s():
    inputs = [(12, {(x,): 0 for x in range(-12, 13)})]
    res = diagonal_transfer(Z, inputs, R=2, S=8, r0=2)
    assert set(res.coloring.values()) == {0}


def test_transfer_invalid_input_raises_designated_error():
    # a single monochrome cover with S too small: the restriction is one
    # <2-connected cluster of diameter 8 > 3, so the stitched coloring
    # cannot verify and the designated error is raised
    inputs = [(10, {(x,): 0 for x in range(-10, 11)})]
    with pytest.raises(InsufficientInputError):
        diagonal_transfer(Z, inputs, R=2, S=3, r0=4)


def test_transfer_missing_element_raises():
    partial = {(x,): (x // 4) % 2 for x in range(0, 11)}
    with pytest.raises(InsufficientInputError):
        diagonal_transfer(Z, [(10, partial)], R=2, S=3, r0=4)


def test_transfer_validates_preconditions():
    with pytest.raises(ConfigError):
        diagonal_transfer(Z, [(8, striped(8))], R=2, S=3, r0=4)
    with pytest.raises(ConfigError):
        diagonal_transfer(Z, [(10, striped(10)), (10, striped(10))], R=2, S=3, r0=4)
    with pytest.raises(ConfigError):
        diagonal_transfer(Z, [(10, {(x,): 5 for x in range(-10, 11)})],
                          R=2, S=3, r0=2, n=1)
    with pytest.raises(InsufficientInputError):
        diagonal_transfer(Z, [], R=2, S=3, r0=4)


def test_transfer_result_is_valid_coloring():
    # independent check of the (R, S) property on the output
    res = diagonal_transfer(Z, [(r, striped(r)) for r in (10, 14)], R=2, S=3, r0=4)
    pts = sorted(res.coloring)
    for color in set(res.coloring.values()):
        run = [x for (x,) in pts if res.coloring[(x,)] == color]
        # clusters are maximal runs of consecutive integers
        cluster = [run[0]]
        for x in run[1:]:
            if x - cluster[-1] < 2:
                cluster.append(x)
            else:
                assert cluster[-1] - cluster[0] <= 3
                cluster = [x]
        assert cluster[-1] - cluster[0] <= 3
