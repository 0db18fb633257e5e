"""(R, S)-dimension of finite metric spaces and box-space profiles.

The dimension is phrased through colorings: a coloring of the points with
n + 1 colors is an (R, S)-witness when every monochromatic <R-connected
cluster has diameter at most S; expanding the clusters into sets gives
n + 1 families of R-disjoint sets of diameter at most S covering the
space, and conversely.  Three solvers share that reformulation: an exact
branch-and-bound, a brute-force enumerator used as its oracle, and a
greedy ball-carving heuristic that scales to whole components.

asdim_profile sweeps box spaces across scales R and records the smallest
witness family count found for each, against the Hirsch length of the
underlying group.
"""
from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .boxspace import BoxSpace
from .cayley import GrowthBound
from .covers import Cover, CoverSet, _dilate, cover_prop41, verify_cover
from .errors import ConfigError, ResourceCapError, VerificationError
from .groups import FREE_ABELIAN, hirsch_length


class FiniteMetricSpace:
    """A finite metric space backed by an explicit integer distance matrix."""

    def __init__(self, dist_matrix: np.ndarray):
        self.dist_matrix = np.asarray(dist_matrix, dtype=np.int32)
        self.n_vertices = self.dist_matrix.shape[0]

    @property
    def diameter(self) -> int:
        return int(self.dist_matrix.max())

    def distance(self, u: int, v: int) -> int:
        return int(self.dist_matrix[u, v])

    def distances_from(self, v: int) -> np.ndarray:
        return self.dist_matrix[v]

    @classmethod
    def from_matrix(cls, matrix) -> "FiniteMetricSpace":
        m = np.asarray(matrix, dtype=np.int64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ConfigError(f"distance matrix must be square, got {m.shape}")
        n = m.shape[0]
        if n > 1024:
            raise ResourceCapError(f"matrix too large to validate ({n} points)")
        if (m.diagonal() != 0).any():
            raise ConfigError("distance matrix has a nonzero diagonal entry")
        if (m != m.T).any():
            raise ConfigError("distance matrix is not symmetric")
        off = m[~np.eye(n, dtype=bool)]
        if n > 1 and (off <= 0).any():
            raise ConfigError("off-diagonal distances must be positive")
        # triangle inequality, all triples
        if n and (m > (m[:, :, None] + m[None, :, :]).min(axis=1)).any():
            raise ConfigError("distance matrix violates the triangle inequality")
        return cls(m)

    @classmethod
    def from_graph(cls, graph, point_cap: int = 4096) -> "FiniteMetricSpace":
        n = graph.n_vertices
        if n > point_cap:
            raise ResourceCapError(f"{n} points exceeds the cap {point_cap}")
        rows = np.stack([graph.distances_from(v) for v in range(n)])
        return cls(rows)


def random_metric_space(rng: random.Random, n_points: int,
                        max_distance: int = 6) -> FiniteMetricSpace:
    """Random integer metric: symmetric draws closed under shortest paths."""
    if n_points < 1 or max_distance < 1:
        raise ConfigError("need n_points >= 1 and max_distance >= 1")
    m = np.zeros((n_points, n_points), dtype=np.int64)
    for i in range(n_points):
        for j in range(i + 1, n_points):
            m[i, j] = m[j, i] = rng.randint(1, max_distance)
    for k in range(n_points):
        m = np.minimum(m, m[:, k:k + 1] + m[k:k + 1, :])
    return FiniteMetricSpace(m)


class SingleComponentSpace:
    """Adapts one metric component to the box-space addressing protocol,
    so covers of a single space go through the same verifier."""

    def __init__(self, comp):
        self.components = (comp,)
        self.diameters = (int(comp.diameter),)
        self.component_count = 1
        self.n_points = comp.n_vertices

    def points(self):
        for v in range(self.components[0].n_vertices):
            yield (0, v)

    def distance(self, p, q) -> int:
        return self.components[0].distance(p[1], q[1])


@dataclass(frozen=True)
class RSDimResult:
    n: int | None                # smallest n found; None if the cap was hit
    R: int
    S: int
    method: str
    coloring: tuple | None       # per point, in the space's own indexing
    cover: Cover | None          # expanded witness over SingleComponentSpace
    exceeded_cap: bool = False

    @property
    def n_families(self) -> int | None:
        return None if self.n is None else self.n + 1


def _full_matrix(space) -> np.ndarray:
    if hasattr(space, "dist_matrix"):
        return np.asarray(space.dist_matrix)
    return np.stack([space.distances_from(v) for v in range(space.n_vertices)])


def _clusters_of_color(D: np.ndarray, pts, R: int):
    """<R-connected clusters among pts (indices), by union-find."""
    parent = list(range(len(pts)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if D[pts[i], pts[j]] < R:
                parent[find(i)] = find(j)
    out = {}
    for i in range(len(pts)):
        out.setdefault(find(i), []).append(pts[i])
    return list(out.values())


def _coloring_to_cover(space, D: np.ndarray, coloring, R: int) -> Cover:
    wrapper = SingleComponentSpace(space)
    by_color = {}
    for v, c in enumerate(coloring):
        by_color.setdefault(c, []).append(v)
    families = []
    for c in sorted(by_color):
        sets = []
        for ci, cluster in enumerate(_clusters_of_color(D, by_color[c], R)):
            sets.append(CoverSet(label=f"f{c}.s{ci}",
                                 parts=((0, tuple(sorted(cluster))),)))
        families.append(tuple(sets))
    return Cover(space=wrapper, families=tuple(families))


def _verified_result(space, D, coloring, R, S, method) -> RSDimResult:
    cover = _coloring_to_cover(space, D, coloring, R)
    report = verify_cover(cover, R, S)
    if not report.ok:
        raise VerificationError(
            f"{method} produced an invalid witness at R={R}, S={S}: "
            f"{report.oversized_witness or report.close_pair_witnesses}")
    n = len(cover.families) - 1
    return RSDimResult(n=n, R=R, S=S, method=method,
                       coloring=tuple(coloring), cover=cover)


def rs_dim_exact(space, R: int, S: int, n_cap: int = 8,
                 point_cap: int = 60) -> RSDimResult:
    """Smallest n admitting an (R, S)-witness, by branch and bound.

    Points are processed in breadth-first order from point 0; colors obey
    the restricted-growth convention (a new color only when all smaller
    ones appear earlier), which removes color permutations from the search.
    Clusters of equal-colored points merged below distance R are maintained
    incrementally, and a branch dies as soon as one exceeds diameter S.
    """
    n_pts = space.n_vertices
    if n_pts > point_cap:
        raise ResourceCapError(f"{n_pts} points exceeds point_cap={point_cap}")
    if R < 1 or S < 0:
        raise ConfigError(f"need R >= 1 and S >= 0, got R={R}, S={S}")
    D = _full_matrix(space)
    order = sorted(range(n_pts), key=lambda v: (int(D[0, v]), v))

    def solve(kmax: int):
        color = {}
        clusters = {}           # cid -> (frozen members tuple, diam)
        point_cid = {}
        counter = [0]

        def assign(idx: int) -> bool:
            if idx == n_pts:
                return True
            p = order[idx]
            used = 1 + max(color.values(), default=-1)
            for c in range(min(used + 1, kmax)):
                near = {point_cid[q] for q in color
                        if color[q] == c and D[p, q] < R}
                members = [p]
                diam = 0
                for cid in near:
                    members.extend(clusters[cid][0])
                ok = True
                if len(members) > 1:
                    sub = D[np.ix_(members, members)]
                    diam = int(sub.max())
                    ok = diam <= S
                if not ok:
                    continue
                cid_new = counter[0]
                counter[0] += 1
                stash = [(cid, clusters.pop(cid)) for cid in near]
                moved = [(q, point_cid[q]) for q in members if q != p]
                clusters[cid_new] = (tuple(members), diam)
                for q in members:
                    point_cid[q] = cid_new
                color[p] = c
                point_cid[p] = cid_new
                if assign(idx + 1):
                    return True
                del color[p]
                del point_cid[p]
                del clusters[cid_new]
                for cid, data in stash:
                    clusters[cid] = data
                for q, cid in moved:
                    point_cid[q] = cid
            return False

        if assign(0):
            return [color[v] for v in range(n_pts)]
        return None

    for k in range(1, min(n_pts, n_cap + 1) + 1):
        coloring = solve(k)
        if coloring is not None:
            return _verified_result(space, D, coloring, R, S, "exact")
    return RSDimResult(n=None, R=R, S=S, method="exact", coloring=None,
                       cover=None, exceeded_cap=True)


def _restricted_growth_strings(n: int, kmax: int):
    """All colorings of n points using colors 0..kmax-1 with color c first
    appearing only after c-1; yields lists reused in place."""
    seq = [0] * n

    def rec(i: int, used: int):
        if i == n:
            yield seq
            return
        for c in range(min(used + 1, kmax)):
            seq[i] = c
            yield from rec(i + 1, max(used, c + 1))

    yield from rec(0, 0)


def rs_dim_exhaustive(space, R: int, S: int, point_cap: int = 12) -> RSDimResult:
    """Reference solver: tries every coloring, smallest color count first.

    Deliberately shares nothing with the branch-and-bound beyond the
    definition; its validity test re-derives clusters from each complete
    coloring.
    """
    n_pts = space.n_vertices
    if n_pts > point_cap:
        raise ResourceCapError(f"{n_pts} points exceeds point_cap={point_cap}")
    if R < 1 or S < 0:
        raise ConfigError(f"need R >= 1 and S >= 0, got R={R}, S={S}")
    D = _full_matrix(space)

    def valid(coloring) -> bool:
        by_color = {}
        for v, c in enumerate(coloring):
            by_color.setdefault(c, []).append(v)
        for pts in by_color.values():
            for cluster in _clusters_of_color(D, pts, R):
                if len(cluster) > 1:
                    sub = D[np.ix_(cluster, cluster)]
                    if int(sub.max()) > S:
                        return False
        return True

    for k in range(1, n_pts + 1):
        for seq in _restricted_growth_strings(n_pts, k):
            if max(seq) == k - 1 and valid(seq):
                return _verified_result(space, D, list(seq), R, S, "exhaustive")
    raise VerificationError("no valid coloring found; unreachable for k = n")


def rs_dim_greedy(space, R: int, S: int) -> RSDimResult:
    """Heuristic witness: farthest-point ball carving at radius S//2, then
    greedy coloring of the cluster proximity graph.  Upper bound only."""
    n_pts = space.n_vertices
    if R < 1 or S < 0:
        raise ConfigError(f"need R >= 1 and S >= 0, got R={R}, S={S}")
    carve = S // 2
    assigned = np.full(n_pts, -1, dtype=np.int64)
    nearest = np.full(n_pts, np.iinfo(np.int32).max, dtype=np.int64)
    clusters = []
    while (assigned < 0).any():
        free = np.flatnonzero(assigned < 0)
        center = int(free[np.argmax(nearest[free])])
        d = space.distances_from(center).astype(np.int64)
        cluster = free[d[free] <= carve]
        assigned[cluster] = len(clusters)
        clusters.append(cluster)
        nearest = np.minimum(nearest, d)

    k = len(clusters)
    adj = [set() for _ in range(k)]
    for i, cluster in enumerate(clusters):
        if hasattr(space, "adjacency"):
            near = _dilate(space, cluster, max(R - 1, 0))
        else:
            hit = space.dist_matrix[cluster].min(axis=0) <= R - 1
            near = np.flatnonzero(hit)
        for j in set(int(x) for x in assigned[near]):
            if j != i:
                adj[i].add(j)
                adj[j].add(i)
    cluster_color = []
    for i in range(k):
        used = {cluster_color[j] for j in adj[i] if j < i}
        c = 0
        while c in used:
            c += 1
        cluster_color.append(c)
    coloring = [0] * n_pts
    for i, cluster in enumerate(clusters):
        for v in cluster:
            coloring[int(v)] = cluster_color[i]
    D = _full_matrix(space) if n_pts <= 4096 else None
    if D is None:
        raise ResourceCapError("greedy witness verification needs <= 4096 points")
    return _verified_result(space, D, coloring, R, S, "greedy")


def rs_dim(space, R: int, S: int, method: str = "exact", **kwargs) -> RSDimResult:
    if method == "exact":
        return rs_dim_exact(space, R, S, **kwargs)
    if method == "exhaustive":
        return rs_dim_exhaustive(space, R, S, **kwargs)
    if method == "greedy":
        return rs_dim_greedy(space, R, S)
    raise ConfigError(f"unknown method {method!r}")


# --- structured witnesses for cycles and square tori -------------------------

def interval_families(m: int, R: int, S: int):
    """Alternating arcs on the m-cycle: an even number of arcs with sizes in
    [R, S+1], neighbors in different families.  None if infeasible."""
    if m - 1 <= S:
        return [[list(range(m))]]
    count = max(2, -(-m // (S + 1)))
    if count % 2:
        count += 1
    while count * R <= m:
        base, rem = divmod(m, count)
        hi = base + (1 if rem else 0)
        if base >= R and hi <= S + 1:
            sizes = [base + 1] * rem + [base] * (count - rem)
            arcs = []
            at = 0
            for s in sizes:
                arcs.append(list(range(at, at + s)))
                at += s
            return [[arcs[i] for i in range(count) if i % 2 == 0],
                    [arcs[i] for i in range(count) if i % 2 == 1]]
        count += 2
    return None


def grid_families(m: int, R: int, S: int):
    """Three-family zone pattern on the m x m torus, m a power of two.

    The torus is tiled by L x L blocks; points near a block corner form the
    corner family, points near a block edge (but away from corners) the
    edge family, and the rest per-block cores.  Corner reach T2 doubles the
    edge reach T1 = ceil(R/2), which is what keeps horizontal and vertical
    edge zones R-separated from each other.  None if no block size L | m
    satisfies the separation and diameter constraints.
    """
    t1 = -(-R // 2)
    t2 = 2 * t1
    L = None
    cand = 1
    while cand <= m:
        if (m % cand == 0 and cand >= R + 2 * t2 - 2 and cand >= 2 * t2
                and 2 * (cand - 2 * t1) <= S):
            L = cand
            break
        cand *= 2
    if L is None:
        return None

    corner, edge, core = {}, {}, {}
    for u in range(m):
        pu = u % L
        du = min(pu, L - pu)
        for v in range(m):
            pv = v % L
            dv = min(pv, L - pv)
            vid = u * m + v
            if du < t2 and dv < t2:
                cu = (u - pu) % m if pu < t2 else (u + L - pu) % m
                cv = (v - pv) % m if pv < t2 else (v + L - pv) % m
                corner.setdefault((cu, cv), []).append(vid)
            elif dv < t1:
                edge.setdefault(("h", u // L, (v - pv) % m if pv < t1
                                 else (v + L - pv) % m), []).append(vid)
            elif du < t1:
                edge.setdefault(("v", (u - pu) % m if pu < t1
                                 else (u + L - pu) % m, v // L), []).append(vid)
            else:
                core.setdefault((u // L, v // L), []).append(vid)
    return [[sorted(ids) for _, ids in sorted(corner.items())],
            [sorted(ids) for _, ids in sorted(edge.items())],
            [sorted(ids) for _, ids in sorted(core.items())]]


def structured_component_families(comp, R: int, S: int):
    """Dispatch the pattern constructions by group shape; None if there is
    no structured pattern for this component or these parameters."""
    spec = comp.spec
    if spec.kind == FREE_ABELIAN and spec.rank == 1:
        return interval_families(comp.modulus, R, S)
    if spec.kind == FREE_ABELIAN and spec.rank == 2:
        fams = grid_families(comp.modulus, R, S)
        if fams is None:
            return None
        # grid_families labels vertices u * m + v; convert to vertex ids
        m = comp.modulus
        out = []
        for fam in fams:
            conv = []
            for ids in fam:
                uv = np.asarray(ids, dtype=np.int64)
                coords = np.stack([uv // m, uv % m], axis=1)
                conv.append(sorted(int(x) for x in comp.encode(coords)))
            out.append(conv)
        return out
    return None


# --- asymptotic dimension profile across scales ------------------------------

PROFILE_MODES = ("exact", "greedy", "structured", "prop41")


@dataclass(frozen=True)
class ProfileRow:
    R: int
    s_achieved: int | None
    n_achieved: int | None
    mode: str
    component_count: int
    hirsch_length: int
    wall_time_ms: float
    note: str = ""
    cover: Cover | None = None

    CSV_FIELDS = ("R", "s_achieved", "n_achieved", "mode", "component_count",
                  "hirsch_length", "wall_time_ms")

    def csv_values(self):
        blank = lambda x: "" if x is None else x
        return (self.R, blank(self.s_achieved), blank(self.n_achieved),
                self.mode, self.component_count, self.hirsch_length,
                f"{self.wall_time_ms:.3f}")


@dataclass(frozen=True)
class ProfileTable:
    rows: tuple

    def as_csv_rows(self):
        yield ProfileRow.CSV_FIELDS
        for row in self.rows:
            yield tuple(str(v) for v in row.csv_values())


def s_ladder(R: int, S_cap: int):
    """Candidate diameter budgets: 2R, 4R, ... capped at S_cap."""
    out = []
    v = 2 * R
    while v < S_cap:
        out.append(v)
        v *= 2
    out.append(S_cap)
    return out


def box_witness_cover(box: BoxSpace, R: int, S: int, mode: str,
                      threads: int = 1, n_cap: int = 8, point_cap: int = 60):
    """One uniform-scale witness cover of a box space, or None.

    Components of diameter <= S // 2 merge into a single set (pairwise sums
    of their diameters stay within S); components of diameter in
    (S // 2, S] become whole-component sets; every larger component is
    solved per mode.  Any two sets from different components of diameter
    > S // 2 sit at distance > S >= R, so per-component family indices can
    be shared across components.  The assembled cover is re-verified and
    None is returned unless every check passes.
    """
    small = [ci for ci, d in enumerate(box.diameters) if d <= S // 2]
    medium = [ci for ci, d in enumerate(box.diameters) if S // 2 < d <= S]
    large = [ci for ci, d in enumerate(box.diameters) if d > S]

    def solve(ci):
        comp = box.components[ci]
        if mode == "structured":
            return structured_component_families(comp, R, S)
        if mode == "greedy":
            res = rs_dim_greedy(comp, R, S)
        elif mode == "exact":
            res = rs_dim_exact(comp, R, S, n_cap=n_cap, point_cap=point_cap)
            if res.exceeded_cap:
                return None
        else:
            raise ConfigError(f"unknown witness mode {mode!r}")
        fams = []
        for fam in res.cover.families:
            fams.append([list(s.parts[0][1]) for s in fam])
        return fams

    if threads > 1 and len(large) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            solved = list(pool.map(solve, large))
    else:
        solved = [solve(ci) for ci in large]
    if any(f is None for f in solved):
        return None

    n_fam = max([len(f) for f in solved], default=0)
    n_fam = max(n_fam, 1 if (small or medium) else 0)
    families = [[] for _ in range(n_fam)]
    if small:
        parts = tuple((ci, tuple(range(box.components[ci].n_vertices)))
                      for ci in small)
        families[0].append(CoverSet(label="F", parts=parts))
    for ci in medium:
        families[0].append(CoverSet(
            label=f"w{ci}",
            parts=((ci, tuple(range(box.components[ci].n_vertices))),)))
    for ci, fams in zip(large, solved):
        for j, fam in enumerate(fams):
            for si, ids in enumerate(fam):
                families[j].append(CoverSet(label=f"c{ci}.f{j}.s{si}",
                                            parts=((ci, tuple(ids)),)))
    cover = Cover(space=box, families=tuple(tuple(f) for f in families))
    report = verify_cover(cover, R, S)
    if not report.ok:
        return None
    return cover, report


def asdim_profile(box: BoxSpace, R_list, S_cap: int, mode: str,
                  growth: GrowthBound | None = None, threads: int = 1,
                  n_cap: int = 8, point_cap: int = 60) -> ProfileTable:
    """Scale sweep: for each R, the smallest witness family count found
    with set diameters within S_cap, next to the group's Hirsch length."""
    if mode not in PROFILE_MODES:
        raise ConfigError(f"mode must be one of {PROFILE_MODES}, got {mode!r}")
    if mode == "prop41" and growth is None:
        raise ConfigError("prop41 mode needs a growth bound")
    h = hirsch_length(box.spec)
    rows = []
    for R in sorted(set(int(r) for r in R_list)):
        t0 = time.perf_counter()
        if mode == "prop41":
            cover, report = cover_prop41(box, R, growth, threads=threads)
            note = "S_cap exhausted" if report.max_set_diameter > S_cap else ""
            rows.append(ProfileRow(
                R=R, s_achieved=report.max_set_diameter,
                n_achieved=report.r_multiplicity - 1, mode=mode,
                component_count=box.component_count, hirsch_length=h,
                wall_time_ms=(time.perf_counter() - t0) * 1000.0,
                note=note, cover=cover))
            continue
        best = None
        for S in s_ladder(R, S_cap):
            got = box_witness_cover(box, R, S, mode, threads=threads,
                                    n_cap=n_cap, point_cap=point_cap)
            if got is None:
                continue
            cover, report = got
            n = len([f for f in cover.families if f]) - 1
            if best is None or n < best[0]:
                best = (n, report.max_set_diameter, cover)
        ms = (time.perf_counter() - t0) * 1000.0
        if best is None:
            rows.append(ProfileRow(R=R, s_achieved=None, n_achieved=None,
                                   mode=mode, component_count=box.component_count,
                                   hirsch_length=h, wall_time_ms=ms,
                                   note="S_cap exhausted"))
        else:
            rows.append(ProfileRow(R=R, s_achieved=best[1], n_achieved=best[0],
                                   mode=mode, component_count=box.component_count,
                                   hirsch_length=h, wall_time_ms=ms,
                                   cover=best[2]))
    return ProfileTable(rows=tuple(rows))
