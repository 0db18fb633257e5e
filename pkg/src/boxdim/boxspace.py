"""Finite truncations of box spaces and the coarse metric between components.

A box space here is a prefix of the infinite object: one Cayley graph per
modulus of a filtration, with the coarse disjoint-union metric.  Within a
component distances are graph distances; between components i != j the
distance is exactly diameters[i] + diameters[j].

Also provided: ball-isometry radii (the largest k such that B(e, k) of the
infinite group maps injectively into the quotient) and coarse unions of
balls of the infinite group, which serve as the subspace substrate for the
transfer arguments.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeMismatchError
from .cayley import CayleyGraph, build_quotient_cayley, enumerate_ball
from .groups import (
    Filtration,
    GroupSpec,
    QuotientFamily,
    flatten,
    identity,
    invert,
    is_kernel_element,
    multiply,
    reduce_mod,
)


@dataclass
class BoxSpace:
    """Components in filtration order; points are (component_index, vertex_id)."""

    filtration: Filtration | QuotientFamily
    components: tuple

    @property
    def spec(self) -> GroupSpec:
        return self.filtration.spec

    @property
    def moduli(self) -> tuple:
        return tuple(g.modulus for g in self.components)

    @property
    def diameters(self) -> tuple:
        return tuple(g.diameter for g in self.components)

    @property
    def component_count(self) -> int:
        return len(self.components)

    @property
    def n_points(self) -> int:
        return sum(g.n_vertices for g in self.components)

    def check_point(self, p) -> None:
        ci, v = p
        if not (0 <= ci < len(self.components)):
            raise ShapeMismatchError(f"component index {ci} out of range")
        self.components[ci].check_vertex(v)

    def points(self):
        for ci, g in enumerate(self.components):
            for v in range(g.n_vertices):
                yield (ci, v)

    def distance(self, p, q) -> int:
        self.check_point(p)
        self.check_point(q)
        if p[0] == q[0]:
            return self.components[p[0]].distance(p[1], q[1])
        return self.diameters[p[0]] + self.diameters[q[0]]


def box_distance(space, p, q) -> int:
    """Coarse disjoint-union metric; works for box spaces and ball unions."""
    return space.distance(p, q)


def build_box_space(filtration, component_count: int | None = None,
                    vertex_cap: int = 10 ** 6, threads: int = 1,
                    cache=None) -> BoxSpace:
    quotients = filtration.quotients()
    if component_count is not None:
        if not (1 <= component_count <= len(quotients)):
            raise ConfigError(
                f"component_count must be in [1, {len(quotients)}], got {component_count}")
        quotients = quotients[:component_count]

    def build(q):
        return build_quotient_cayley(q, vertex_cap=vertex_cap, cache=cache)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            components = tuple(pool.map(build, quotients))
    else:
        components = tuple(build(q) for q in quotients)
    return BoxSpace(filtration=filtration, components=components)


# --- ball-isometry radii ----------------------------------------------------

@dataclass(frozen=True)
class IsometryRadius:
    """Largest verified k with B_G(e, 2k) meeting the kernel only at e.

    exact=False means the BFS budget ran out first, so radius is a certified
    lower bound rather than the exact value.
    """

    radius: int
    exact: bool


def isometry_radius(quotient, budget: int = 10 ** 7) -> IsometryRadius:
    """BFS the infinite group outward until the first kernel element.

    A first kernel hit at word length L pins the exact radius floor((L-1)/2):
    every shorter ball misses the kernel and B(e, L) does not.
    """
    spec = quotient.spec
    gens = list(spec.generators) + [invert(spec, g) for g in spec.generators]
    e = identity(spec)
    seen = {e}
    frontier = [e]
    level = 0
    while frontier:
        level += 1
        nxt = []
        for v in frontier:
            for g in gens:
                w = multiply(spec, v, g)
                if w in seen:
                    continue
                if is_kernel_element(quotient, w):
                    return IsometryRadius(radius=(level - 1) // 2, exact=True)
                seen.add(w)
                nxt.append(w)
        if len(seen) > budget:
            # level fully explored and kernel-free, so B(e, level) is clean
            return IsometryRadius(radius=level // 2, exact=False)
        frontier = nxt
    raise ConfigError("group exhausted without reaching the kernel; "
                      "generators do not generate an infinite group")


def verify_ball_isometry(quotient, k: int, state_cap: int = 10 ** 7) -> bool:
    """True iff the quotient map is injective on B_G(e, k).

    Injectivity makes the rooted, generator-labeled ball of the quotient an
    exact copy of the ball of G: edges and labels are preserved by any
    homomorphism, so injectivity is the entire content.
    """
    if k < 0:
        raise ConfigError(f"radius must be >= 0, got {k}")
    ball = enumerate_ball(quotient.spec, k, state_cap)
    images = {reduce_mod(quotient, v) for v in ball}
    return len(images) == len(ball)


@dataclass(frozen=True)
class IsometryProfile:
    """Per-component isometry radii of a box space and the scale thresholds.

    effective_radii is the running maximum of the computed radii: kernels
    shrink along the filtration, so a radius certified for component i is
    also valid for every later component even when a budget cut the later
    computation short.
    """

    radii: tuple                 # of IsometryRadius, one per component

    @property
    def effective_radii(self) -> tuple:
        out = []
        best = 0
        for r in self.radii:
            best = max(best, r.radius)
            out.append(best)
        return tuple(out)

    def threshold(self, k: int):
        """Smallest component index whose ball of radius k is a copy of the
        ball of G, or None if the truncation has no such component."""
        for i, r in enumerate(self.effective_radii):
            if r >= k:
                return i
        return None


def isometry_profile(box: BoxSpace, budget: int = 10 ** 7) -> IsometryProfile:
    return IsometryProfile(radii=tuple(
        isometry_radius(g.quotient, budget) for g in box.components))


# --- coarse unions of balls of the infinite group ---------------------------

@dataclass
class InducedBallGraph:
    """B_G(e, radius) with the metric of the subgraph induced by G's edges."""

    spec: GroupSpec
    radius: int
    elements: tuple              # group elements, sorted by (word length, coords)
    dist_matrix: np.ndarray      # (n, n) int32 all-pairs distances
    word_lengths: tuple          # d_G(e, elt) per element

    @property
    def n_vertices(self) -> int:
        return len(self.elements)

    @property
    def diameter(self) -> int:
        return int(self.dist_matrix.max())

    def check_vertex(self, v: int) -> None:
        if not (0 <= v < self.n_vertices):
            raise ShapeMismatchError(f"vertex id {v} out of range [0, {self.n_vertices})")

    def distance(self, u: int, v: int) -> int:
        self.check_vertex(u)
        self.check_vertex(v)
        return int(self.dist_matrix[u, v])

    def distances_from(self, v: int) -> np.ndarray:
        self.check_vertex(v)
        return self.dist_matrix[v]

    def ball_ids(self, center: int, r: int) -> np.ndarray:
        self.check_vertex(center)
        return np.flatnonzero(self.dist_matrix[center] <= r)


def _induced_ball(spec: GroupSpec, radius: int, state_cap: int) -> InducedBallGraph:
    lengths = enumerate_ball(spec, radius, state_cap)
    elements = sorted(lengths, key=lambda v: (lengths[v], flatten(spec, v)))
    index = {v: i for i, v in enumerate(elements)}
    gens = list(spec.generators) + [invert(spec, g) for g in spec.generators]
    neighbors = []
    for v in elements:
        row = []
        for g in gens:
            w = multiply(spec, v, g)
            j = index.get(w)
            if j is not None:
                row.append(j)
        neighbors.append(row)
    n = len(elements)
    dist = np.full((n, n), -1, dtype=np.int32)
    for s in range(n):
        dist[s, s] = 0
        frontier = [s]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for w in neighbors[u]:
                    if dist[s, w] < 0:
                        dist[s, w] = d
                        nxt.append(w)
            frontier = nxt
    # balls of a connected graph stay connected through the identity
    assert (dist >= 0).all()
    return InducedBallGraph(spec=spec, radius=radius, elements=tuple(elements),
                            dist_matrix=dist,
                            word_lengths=tuple(lengths[v] for v in elements))


@dataclass
class BallUnionSpace:
    """Coarse disjoint union of balls of G; same point addressing and the
    same cross-component metric convention as BoxSpace."""

    spec: GroupSpec
    components: tuple            # of InducedBallGraph, radii increasing

    @property
    def radii(self) -> tuple:
        return tuple(c.radius for c in self.components)

    @property
    def diameters(self) -> tuple:
        return tuple(c.diameter for c in self.components)

    @property
    def component_count(self) -> int:
        return len(self.components)

    @property
    def n_points(self) -> int:
        return sum(c.n_vertices for c in self.components)

    def check_point(self, p) -> None:
        ci, v = p
        if not (0 <= ci < len(self.components)):
            raise ShapeMismatchError(f"component index {ci} out of range")
        self.components[ci].check_vertex(v)

    def points(self):
        for ci, c in enumerate(self.components):
            for v in range(c.n_vertices):
                yield (ci, v)

    def distance(self, p, q) -> int:
        self.check_point(p)
        self.check_point(q)
        if p[0] == q[0]:
            return self.components[p[0]].distance(p[1], q[1])
        return self.diameters[p[0]] + self.diameters[q[0]]


def coarse_union_of_balls(spec: GroupSpec, radii,
                          state_cap: int = 10 ** 6) -> BallUnionSpace:
    radii = tuple(int(r) for r in radii)
    if not radii:
        raise ConfigError("need at least one radius")
    for a, b in zip(radii, radii[1:]):
        if b <= a:
            raise ConfigError(f"radii must be strictly increasing, got {a} then {b}")
    if radii[0] < 0:
        raise ConfigError("radii must be non-negative")
    comps = tuple(_induced_ball(spec, r, state_cap) for r in radii)
    return BallUnionSpace(spec=spec, components=comps)
