"""Bottleneck distance between diagrams, L-infinity distance, and an
enumerative upper bound for the natural pseudo-distance.

The bottleneck optimum is found by binary search over the finite set of
candidate costs (all pairwise costs and all diagonal costs); the optimum is
always one of these, so the result is exact with no tolerance.  Feasibility
at a threshold is a maximum bipartite matching on the usual doubled graph
where each diagram gets one diagonal copy per point of the other diagram.

Points with infinite death form a separate layer: they may only match each
other (at |birth1 - birth2|), and mismatched counts make the distance
infinite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Sequence

from .common import SizeGuardExceeded
from .complexes import SimplicialComplex, VertexFunction, maximal_simplices
from .persistence import PersistenceDiagram

BRUTEFORCE_GUARD = 8
NP_VERTEX_GUARD = 9


@dataclass(frozen=True)
class Matching:
    """A witness matching: (i, j) index pairs into the two diagrams' points,
    None standing for the diagonal.  cost is the max pair cost."""

    pairs: tuple[tuple[int | None, int | None], ...]
    cost: float


def _pair_cost(p: tuple[float, float], q: tuple[float, float]) -> float:
    p_inf, q_inf = math.isinf(p[1]), math.isinf(q[1])
    if p_inf != q_inf:
        return math.inf
    if p_inf:
        return abs(p[0] - q[0])
    return max(abs(p[0] - q[0]), abs(p[1] - q[1]))


def _diagonal_cost(p: tuple[float, float]) -> float:
    if math.isinf(p[1]):
        return math.inf
    return (p[1] - p[0]) / 2.0


def _max_matching(adj: list[list[int]], n_right: int) -> tuple[int, list[int]]:
    """Augmenting-path maximum matching; returns (size, right match per left).

    Iterative DFS: alternating paths can get as long as the vertex count, so
    recursion is not safe at a few hundred diagram points.
    """
    match_left = [-1] * len(adj)
    match_right = [-1] * n_right

    def augment(root: int) -> bool:
        seen = [False] * n_right
        prev_right: dict[int, int] = {}
        stack = [(root, iter(adj[root]))]
        while stack:
            u, edges = stack[-1]
            for v in edges:
                if seen[v]:
                    continue
                seen[v] = True
                prev_right[v] = u
                w = match_right[v]
                if w == -1:
                    while v != -1:  # flip the alternating path back to the root
                        u2 = prev_right[v]
                        old = match_left[u2]
                        match_left[u2] = v
                        match_right[v] = u2
                        v = old
                    return True
                stack.append((w, iter(adj[w])))
                break
            else:
                stack.pop()
        return False

    size = 0
    for u in range(len(adj)):
        if augment(u):
            size += 1
    return size, match_left


def _finite_layer(
    pts1: list[tuple[float, float]], pts2: list[tuple[float, float]]
) -> tuple[float, list[tuple[int | None, int | None]]]:
    """Optimal bottleneck matching of finite points, diagonal allowed.

    Left vertices: the points of pts1 then one diagonal copy per point of
    pts2.  Right vertices: the points of pts2 then one diagonal copy per
    point of pts1.  Diagonal copies pair with their own point when its
    diagonal cost clears the threshold, and with each other for free.
    """
    n1, n2 = len(pts1), len(pts2)
    if n1 == 0 and n2 == 0:
        return 0.0, []
    cost = [[_pair_cost(p, q) for q in pts2] for p in pts1]
    diag1 = [_diagonal_cost(p) for p in pts1]
    diag2 = [_diagonal_cost(q) for q in pts2]
    candidates = sorted({0.0, *diag1, *diag2, *(c for row in cost for c in row)})

    def adjacency(threshold: float) -> list[list[int]]:
        adj: list[list[int]] = []
        for i in range(n1):
            row = [j for j in range(n2) if cost[i][j] <= threshold]
            if diag1[i] <= threshold:
                row.append(n2 + i)
            adj.append(row)
        for j in range(n2):
            row = list(range(n2, n2 + n1))  # diagonal-to-diagonal is free
            if diag2[j] <= threshold:
                row.insert(0, j)
            adj.append(row)
        return adj

    def feasible(threshold: float) -> bool:
        size, _ = _max_matching(adjacency(threshold), n1 + n2)
        return size == n1 + n2

    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    best = candidates[lo]
    _, match_left = _max_matching(adjacency(best), n1 + n2)
    pairs: list[tuple[int | None, int | None]] = []
    for i in range(n1):
        v = match_left[i]
        pairs.append((i, v) if v < n2 else (i, None))
    for j in range(n2):
        if match_left[n1 + j] == j:
            pairs.append((None, j))
    return best, pairs


def bottleneck_distance(
    d1: PersistenceDiagram, d2: PersistenceDiagram
) -> tuple[float, Matching]:
    """Exact bottleneck distance and one optimal matching.

    Infinite iff the two diagrams carry different numbers of infinite-death
    points; in that case the leftover infinite points are reported against
    the diagonal at infinite cost.
    """
    if d1.degree != d2.degree:
        raise ValueError(f"degree mismatch: {d1.degree} != {d2.degree}")
    fin1 = [i for i, p in enumerate(d1.points) if not math.isinf(p[1])]
    fin2 = [j for j, q in enumerate(d2.points) if not math.isinf(q[1])]
    inf1 = [i for i, p in enumerate(d1.points) if math.isinf(p[1])]
    inf2 = [j for j, q in enumerate(d2.points) if math.isinf(q[1])]

    inf1.sort(key=lambda i: d1.points[i][0])
    inf2.sort(key=lambda j: d2.points[j][0])
    pairs: list[tuple[int | None, int | None]] = []
    if len(inf1) != len(inf2):
        # no finite-cost matching exists; still report a full witness, with
        # the leftover infinite points forced to the diagonal at infinite cost
        common = min(len(inf1), len(inf2))
        pairs.extend(zip(inf1[:common], inf2[:common]))
        pairs.extend((i, None) for i in inf1[common:])
        pairs.extend((None, j) for j in inf2[common:])
        _, fin_pairs = _finite_layer(
            [d1.points[i] for i in fin1], [d2.points[j] for j in fin2]
        )
        for a, b in fin_pairs:
            pairs.append(
                (fin1[a] if a is not None else None, fin2[b] if b is not None else None)
            )
        return math.inf, Matching(tuple(pairs), math.inf)

    inf_cost = 0.0
    for i, j in zip(inf1, inf2):
        pairs.append((i, j))
        inf_cost = max(inf_cost, abs(d1.points[i][0] - d2.points[j][0]))

    fin_cost, fin_pairs = _finite_layer(
        [d1.points[i] for i in fin1], [d2.points[j] for j in fin2]
    )
    for a, b in fin_pairs:
        pairs.append(
            (fin1[a] if a is not None else None, fin2[b] if b is not None else None)
        )
    return max(inf_cost, fin_cost), Matching(tuple(pairs), max(inf_cost, fin_cost))


def bottleneck_bruteforce(d1: PersistenceDiagram, d2: PersistenceDiagram) -> float:
    """Exhaustive-enumeration oracle; exact on diagrams of at most 8 points."""
    if d1.degree != d2.degree:
        raise ValueError(f"degree mismatch: {d1.degree} != {d2.degree}")
    if len(d1.points) > BRUTEFORCE_GUARD or len(d2.points) > BRUTEFORCE_GUARD:
        raise SizeGuardExceeded(
            f"brute force limited to {BRUTEFORCE_GUARD} points per diagram"
        )
    fin1 = [p for p in d1.points if not math.isinf(p[1])]
    fin2 = [q for q in d2.points if not math.isinf(q[1])]
    inf1 = sorted(p[0] for p in d1.points if math.isinf(p[1]))
    inf2 = sorted(q[0] for q in d2.points if math.isinf(q[1]))
    if len(inf1) != len(inf2):
        return math.inf

    inf_best = math.inf if inf1 else 0.0
    for perm in permutations(range(len(inf2))):
        worst = max((abs(b1 - inf2[k]) for b1, k in zip(inf1, perm)), default=0.0)
        inf_best = min(inf_best, worst)

    best = math.inf

    def assign(i: int, used: set[int], worst: float) -> None:
        nonlocal best
        if worst >= best:
            return
        if i == len(fin1):
            leftover = worst
            for j in range(len(fin2)):
                if j not in used:
                    leftover = max(leftover, _diagonal_cost(fin2[j]))
            best = min(best, leftover)
            return
        assign(i + 1, used, max(worst, _diagonal_cost(fin1[i])))
        for j in range(len(fin2)):
            if j not in used:
                used.add(j)
                assign(i + 1, used, max(worst, _pair_cost(fin1[i], fin2[j])))
                used.remove(j)

    assign(0, set(), 0.0)
    return max(best, inf_best)


def linf_distance(f: VertexFunction | Sequence[float], g: VertexFunction | Sequence[float]) -> float:
    """Max over vertices of |f - g| for functions on the same vertex set."""
    if len(f) != len(g):
        raise ValueError(f"length mismatch: {len(f)} != {len(g)}")
    return max((abs(a - b) for a, b in zip(f, g)), default=0.0)


def _simplex_counts(complex: SimplicialComplex) -> dict[int, int]:
    counts: dict[int, int] = {}
    for s in complex.simplices:
        counts[len(s)] = counts.get(len(s), 0) + 1
    return counts


def _vertex_profile(complex: SimplicialComplex) -> list[tuple[int, ...]]:
    """Per vertex, the sorted sizes of the facets containing it (an isomorphism
    invariant used to prune the search)."""
    profile: list[list[int]] = [[] for _ in range(complex.vertex_count)]
    for facet in maximal_simplices(complex):
        for v in facet:
            profile[v].append(len(facet))
    return [tuple(sorted(p)) for p in profile]


def is_isomorphism(
    k1: SimplicialComplex, k2: SimplicialComplex, image: Sequence[int]
) -> bool:
    """True iff ``image`` is a vertex bijection carrying k1 onto k2."""
    n = k1.vertex_count
    if k2.vertex_count != n or len(image) != n or sorted(image) != list(range(n)):
        return False
    if _simplex_counts(k1) != _simplex_counts(k2):
        return False
    # injective vertex map: per-dimension counts equal + forward simplicial
    # already forces surjectivity onto k2's simplices
    for s in maximal_simplices(k1):
        if tuple(sorted(image[v] for v in s)) not in k2.simplices:
            return False
    return True


def natural_pseudo_upper(
    k1: SimplicialComplex,
    f: VertexFunction,
    k2: SimplicialComplex,
    g: VertexFunction,
    isomorphisms: Sequence[Sequence[int]] | None = None,
    max_vertices: int = NP_VERTEX_GUARD,
) -> float:
    """Min over simplicial isomorphisms h of max_v |f(v) - g(h(v))|.

    This is an UPPER BOUND on the natural pseudo-distance: the infimum there
    ranges over all homeomorphisms, which a finite enumeration cannot exhaust.
    Returns inf when the complexes are not isomorphic.  Pass ``isomorphisms``
    (vertex image lists) to skip the enumeration and its size guard.
    """
    if len(f) != k1.vertex_count or len(g) != k2.vertex_count:
        raise ValueError("function length does not match its complex")
    if isomorphisms is not None:
        best = math.inf
        for image in isomorphisms:
            if not is_isomorphism(k1, k2, image):
                raise ValueError(f"supplied map {list(image)} is not an isomorphism")
            best = min(best, max((abs(f[v] - g[image[v]]) for v in range(len(f))), default=0.0))
        return best

    if k1.vertex_count > max_vertices or k2.vertex_count > max_vertices:
        raise SizeGuardExceeded(
            f"isomorphism enumeration limited to {max_vertices} vertices; "
            "pass explicit isomorphisms for larger inputs"
        )
    n = k1.vertex_count
    if k2.vertex_count != n or _simplex_counts(k1) != _simplex_counts(k2):
        return math.inf
    if n == 0:
        return 0.0

    prof1, prof2 = _vertex_profile(k1), _vertex_profile(k2)
    by_max: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    for s in maximal_simplices(k1):
        by_max[s[-1]].append(s)

    best = math.inf
    image = [-1] * n
    used = [False] * n

    def extend(v: int, worst: float) -> None:
        nonlocal best
        if worst >= best:
            return
        if v == n:
            best = worst
            return
        for w in range(n):
            if used[w] or prof1[v] != prof2[w]:
                continue
            image[v] = w
            ok = True
            for s in by_max[v]:
                if tuple(sorted(image[u] for u in s)) not in k2.simplices:
                    ok = False
                    break
            if ok:
                used[w] = True
                extend(v + 1, max(worst, abs(f[v] - g[w])))
                used[w] = False
        image[v] = -1

    extend(0, 0.0)
    return best
