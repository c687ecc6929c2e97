"""Merge trees of sublevel filtrations and their interleaving distance.

A merge tree is stored by its critical nodes only: leaves (component births)
and merge nodes, each strictly below its parent, with the root edge extending
to +infinity.  A point of the tree is a pair (node, height) with the height
on the edge above the node; the node is called the point's *carrier*.

An eps-interleaving is a pair of maps t1 -> t2 and t2 -> t1 that raise
heights by exactly eps, respect the tree structure, and compose to the
2*eps up-shift inside each tree.  Such a map is determined by the carriers
assigned to the source's nodes, which makes the existence check a finite
search: images of leaves are free choices, images of merge nodes are forced
by any one child, and remaining children must agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .common import ParseError, content_lines, fmt_value, parse_int, parse_value
from .complexes import FilteredComplex
from .persistence import PersistenceDiagram

EXACT_NODE_GUARD = 12


@dataclass
class MergeTree:
    """Rooted node-heighted tree; immutable by convention after construction."""

    heights: dict[int, float]
    parent: dict[int, int]
    root: int

    def __post_init__(self) -> None:
        nodes = set(self.heights)
        if not nodes:
            raise ValueError("a merge tree needs at least one node")
        if self.root not in nodes:
            raise ValueError("root is not a node")
        if set(self.parent) != nodes - {self.root}:
            raise ValueError("every node except the root needs exactly one parent")
        children: dict[int, int] = {n: 0 for n in nodes}
        for child, par in self.parent.items():
            if par not in nodes:
                raise ValueError(f"parent {par} of {child} is not a node")
            if not self.heights[child] < self.heights[par]:
                raise ValueError(
                    f"child {child} must sit strictly below its parent {par}"
                )
            children[par] += 1
        for n, k in children.items():
            if k == 1:
                raise ValueError(
                    f"node {n} has exactly one child; non-critical nodes must be contracted"
                )
        for n in nodes:  # strict height increase already excludes cycles, but be loud
            seen = {n}
            cur = n
            while cur != self.root:
                cur = self.parent[cur]
                if cur in seen:
                    raise ValueError("parent relation contains a cycle")
                seen.add(cur)

    def nodes(self) -> list[int]:
        return sorted(self.heights)

    def children(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {n: [] for n in self.heights}
        for child, par in sorted(self.parent.items()):
            out[par].append(child)
        return out

    def leaves(self) -> list[int]:
        have_child = set(self.parent.values())
        return sorted(n for n in self.heights if n not in have_child)

    def __len__(self) -> int:
        return len(self.heights)


def build_merge_tree(fc: FilteredComplex) -> MergeTree:
    """Merge tree of the sublevel filtration of a connected complex.

    Union-find sweep over edges in filtration order.  A merge at height t
    either creates a new node (both sides strictly lower), reuses an existing
    node at t, or silently absorbs a zero-persistence branch born at t; equal
    height merge nodes collapse into one.  The resulting tree realizes the
    degree-0 persistence pairing under the elder rule.
    """
    n = fc.complex.vertex_count
    if n == 0:
        raise ValueError("cannot build a merge tree of an empty complex")
    heights: dict[int, float] = {}
    children: dict[int, list[int]] = {}
    next_id = 0

    def new_node(h: float, kids: list[int]) -> int:
        nonlocal next_id
        node = next_id
        next_id += 1
        heights[node] = h
        children[node] = kids
        return node

    comp_node = [new_node(fc.filtration[(v,)], []) for v in range(n)]
    parent_uf = list(range(n))

    def find(i: int) -> int:
        root = i
        while parent_uf[root] != root:
            root = parent_uf[root]
        while parent_uf[i] != root:
            parent_uf[i], i = root, parent_uf[i]
        return root

    def discard(node: int) -> None:
        del heights[node]
        del children[node]

    for u, v in sorted(fc.complex.edges(), key=lambda e: (fc.filtration[e], e)):
        t = fc.filtration[(u, v)]
        ru, rv = find(u), find(v)
        if ru == rv:
            continue
        a, b = comp_node[ru], comp_node[rv]
        ha, hb = heights[a], heights[b]
        a_at_t, b_at_t = ha == t, hb == t
        if a_at_t and b_at_t:
            a_leaf, b_leaf = not children[a], not children[b]
            if b_leaf:
                discard(b)
                merged = a
            elif a_leaf:
                discard(a)
                merged = b
            else:
                children[a].extend(children[b])
                discard(b)
                merged = a
        elif a_at_t:
            if not children[a]:  # zero-persistence branch: vanishes
                discard(a)
                merged = b
            else:
                children[a].append(b)
                merged = a
        elif b_at_t:
            if not children[b]:
                discard(b)
                merged = a
            else:
                children[b].append(a)
                merged = b
        else:
            merged = new_node(t, [a, b])
        parent_uf[rv] = ru
        comp_node[ru] = merged

    roots = {find(v) for v in range(n)}
    if len(roots) > 1:
        raise ValueError(
            f"complex is disconnected ({len(roots)} components); merge trees need one root"
        )

    # compact ids: deterministic relabeling by (height, creation id)
    order = sorted(heights, key=lambda node: (heights[node], node))
    relabel = {node: i for i, node in enumerate(order)}
    out_heights = {relabel[node]: heights[node] for node in order}
    out_parent: dict[int, int] = {}
    for node, kids in children.items():
        for kid in kids:
            out_parent[relabel[kid]] = relabel[node]
    root = relabel[comp_node[next(iter(roots))]]
    return MergeTree(out_heights, out_parent, root)


def diagram_from_tree(tree: MergeTree) -> PersistenceDiagram:
    """Elder-rule readout: at each merge the branch with the oldest leaf
    survives; every other child branch dies there.  The globally oldest
    branch never dies."""
    children = tree.children()
    min_birth: dict[int, float] = {}
    # children sit strictly below their parents, so ascending height order
    # visits every child before its parent
    for node in sorted(tree.heights, key=lambda n: (tree.heights[n], n)):
        kids = children[node]
        if not kids:
            min_birth[node] = tree.heights[node]
        else:
            min_birth[node] = min(min_birth[k] for k in kids)
    points: list[tuple[float, float]] = []
    for node, kids in children.items():
        if not kids:
            continue
        survivor = min(range(len(kids)), key=lambda i: min_birth[kids[i]])
        for i, kid in enumerate(kids):
            if i != survivor:
                points.append((min_birth[kid], tree.heights[node]))
    points.append((min_birth[tree.root], math.inf))
    return PersistenceDiagram(0, tuple(points))


# ---------------------------------------------------------------------------
# Interleaving
# ---------------------------------------------------------------------------


def _carrier(tree: MergeTree, node: int, height: float) -> int:
    """Carrier of the point at ``height`` on the ancestor path from ``node``."""
    cur = node
    while cur in tree.parent and tree.heights[tree.parent[cur]] <= height:
        cur = tree.parent[cur]
    return cur


def _alive(tree: MergeTree, height: float) -> list[int]:
    """Carriers whose edge contains ``height`` (the branches alive there)."""
    out = []
    for n in tree.nodes():
        if tree.heights[n] <= height and (
            n == tree.root or height < tree.heights[tree.parent[n]]
        ):
            out.append(n)
    return out


def _consistent_maps(src: MergeTree, dst: MergeTree, eps: float) -> list[dict[int, int]]:
    """All structure-respecting carrier assignments src -> dst at shift eps.

    Leaf images are free among the branches of dst alive at (leaf height +
    eps); the image of every internal node is forced by walking up from any
    child, and the walks from different children must agree.
    """
    leaves = src.leaves()
    results: list[dict[int, int]] = []
    forced: dict[int, int] = {}

    def place(i: int) -> None:
        if i == len(leaves):
            results.append(dict(forced))
            return
        leaf = leaves[i]
        for cand in _alive(dst, src.heights[leaf] + eps):
            added = [leaf]
            forced[leaf] = cand
            node, image = leaf, cand
            ok = True
            while node in src.parent:
                par = src.parent[node]
                image = _carrier(dst, image, src.heights[par] + eps)
                if par in forced:
                    ok = forced[par] == image
                    break
                forced[par] = image
                added.append(par)
                node = par
            if ok:
                place(i + 1)
            for n in added:
                del forced[n]

    place(0)
    return results


def _compositions_ok(
    src: MergeTree,
    dst: MergeTree,
    fwd: dict[int, int],
    back: dict[int, int],
    eps: float,
) -> bool:
    """back(fwd(.)) must act as the 2*eps up-shift on every node of src."""
    for n in src.nodes():
        target_height = src.heights[n] + 2.0 * eps
        via = _carrier(src, back[fwd[n]], target_height)
        direct = _carrier(src, n, target_height)
        if via != direct:
            return False
    return True


def check_interleaving(
    t1: MergeTree, t2: MergeTree, eps: float, return_witness: bool = False
):
    """Decide whether an eps-interleaving of the two trees exists.

    With return_witness=True returns (bool, (fwd, back)) where the maps give
    each source node's carrier in the other tree, or (False, None).
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    backs = _consistent_maps(t2, t1, eps)
    if backs:
        for fwd in _consistent_maps(t1, t2, eps):
            for back in backs:
                if _compositions_ok(t1, t2, fwd, back, eps) and _compositions_ok(
                    t2, t1, back, fwd, eps
                ):
                    return (True, (fwd, back)) if return_witness else True
    return (False, None) if return_witness else False


def interleaving_candidates(t1: MergeTree, t2: MergeTree) -> list[float]:
    """Differences and half-differences of node heights across both trees;
    the optimal interleaving value always lies in this set."""
    hs = sorted(set(t1.heights.values()) | set(t2.heights.values()))
    cands = {0.0}
    for i, a in enumerate(hs):
        for b in hs[i + 1 :]:
            cands.add(b - a)
            cands.add((b - a) / 2.0)
    return sorted(cands)


def _collapse_bound(t1: MergeTree, t2: MergeTree) -> float:
    """An eps at which both trees surely interleave: everything maps to the
    other root's ray and both up-shifts land on the rays as well."""
    lo1, lo2 = min(t1.heights.values()), min(t2.heights.values())
    r1, r2 = t1.heights[t1.root], t2.heights[t2.root]
    return max(0.0, r2 - lo1, r1 - lo2, (r1 - lo1) / 2.0, (r2 - lo2) / 2.0)


def interleaving_distance(
    t1: MergeTree, t2: MergeTree, node_guard: int = EXACT_NODE_GUARD
):
    """Min eps admitting an interleaving, exact via the candidate scan.

    Above the node guard the exhaustive check is not attempted: the result is
    then a bracket (lower, upper) = (degree-0 bottleneck distance, collapse
    bound) instead of a number.
    """
    from .bottleneck import bottleneck_distance  # cycle-free late import

    lower, _ = bottleneck_distance(diagram_from_tree(t1), diagram_from_tree(t2))
    if len(t1) > node_guard or len(t2) > node_guard:
        return (lower, _collapse_bound(t1, t2))
    for eps in interleaving_candidates(t1, t2):
        # candidates below the diagram bound cannot be feasible
        if eps < lower:
            continue
        if check_interleaving(t1, t2, eps):
            return eps
    raise AssertionError("collapse bound is always a feasible candidate")


# ---------------------------------------------------------------------------
# Text format: `node <id> <height>` and `edge <child-id> <parent-id>` lines.
# ---------------------------------------------------------------------------


def parse_tree(text: str, source: str = "<string>") -> MergeTree:
    heights: dict[int, float] = {}
    parent: dict[int, int] = {}
    for lineno, tokens in content_lines(text):
        if tokens[0] == "node":
            if len(tokens) != 3:
                raise ParseError(source, lineno, "expected `node <id> <height>`")
            node = parse_int(tokens[1], source, lineno)
            if node in heights:
                raise ParseError(source, lineno, f"duplicate node {node}")
            heights[node] = parse_value(tokens[2], source, lineno)
        elif tokens[0] == "edge":
            if len(tokens) != 3:
                raise ParseError(source, lineno, "expected `edge <child> <parent>`")
            child = parse_int(tokens[1], source, lineno)
            par = parse_int(tokens[2], source, lineno)
            if child in parent:
                raise ParseError(source, lineno, f"node {child} has two parents")
            parent[child] = par
        else:
            raise ParseError(source, lineno, f"expected `node` or `edge`, got {tokens[0]!r}")
    roots = set(heights) - set(parent)
    if len(roots) != 1:
        raise ParseError(source, 1, f"tree must have exactly one root, found {len(roots)}")
    try:
        return MergeTree(heights, parent, roots.pop())
    except ValueError as exc:
        raise ParseError(source, 1, str(exc)) from None


def format_tree(tree: MergeTree) -> str:
    out = [f"node {n} {fmt_value(tree.heights[n])}" for n in tree.nodes()]
    out.extend(f"edge {c} {p}" for c, p in sorted(tree.parent.items()))
    return "\n".join(out) + "\n"


def load_tree(path: str | Path) -> MergeTree:
    p = Path(path)
    return parse_tree(p.read_text(encoding="utf-8"), source=str(p))


def save_tree(path: str | Path, tree: MergeTree) -> None:
    Path(path).write_text(format_tree(tree), encoding="utf-8")
