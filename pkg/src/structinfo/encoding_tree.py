"""Encoding trees of height <= 2, structural entropy and greedy optimization.

All entropies are in bits. A node's cut ``g`` is its volume minus twice the
weight of non-loop edges inside it; self-loops therefore count as boundary
weight, which keeps the one-layer tree's entropy equal to the Shannon entropy
of the normalized degrees on graphs with loops.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from . import _kernels
from .graph import WeightedGraph

Mode = Literal["matching", "community"]


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class TreeNode:
    vertices: tuple[int, ...]
    parent: int | None
    children: tuple[int, ...]
    g: float
    vol: float

    @property
    def is_leaf(self) -> bool:
        return not self.children


def _cut_and_volume(graph: WeightedGraph, vertices: Sequence[int]) -> tuple[float, float]:
    idx = np.asarray(vertices)
    block = graph.weights[np.ix_(idx, idx)]
    vol = float(graph.degrees[idx].sum())
    inner_twice = float(block.sum() - np.trace(block))
    return vol - inner_twice, vol


class EncodingTree:
    """Rooted tree over a graph's vertices; node 0 is the root.

    Built from the ordered list of root children: an ``int`` is a leaf hung
    directly under the root, a sequence of two or more ints is an internal
    node whose children are leaves.
    """

    def __init__(self, graph: WeightedGraph, root_children: Sequence[int | Sequence[int]]):
        n = graph.vertex_count
        groups: list[tuple[int, ...]] = []
        for item in root_children:
            grp = (int(item),) if np.isscalar(item) else tuple(int(v) for v in item)
            if not grp:
                raise TreeError("empty tree node")
            groups.append(grp)
        flat = [v for grp in groups for v in grp]
        if sorted(flat) != list(range(n)):
            raise TreeError("root children must partition the vertex set")

        self.vertex_count = n
        g, vol = _cut_and_volume(graph, range(n))
        nodes: list[TreeNode | None] = [None]
        root_kids = []
        for grp in groups:
            gid = len(nodes)
            root_kids.append(gid)
            gg, gv = _cut_and_volume(graph, grp)
            if len(grp) == 1:
                nodes.append(TreeNode(grp, 0, (), gg, gv))
                continue
            nodes.append(None)
            leaf_ids = []
            for v in grp:
                lg, lv = _cut_and_volume(graph, (v,))
                leaf_ids.append(len(nodes))
                nodes.append(TreeNode((v,), gid, (), lg, lv))
            nodes[gid] = TreeNode(grp, 0, tuple(leaf_ids), gg, gv)
        nodes[0] = TreeNode(tuple(range(n)), None, tuple(root_kids), g, vol)
        self.nodes: tuple[TreeNode, ...] = tuple(nodes)

    @classmethod
    def from_labels(cls, graph: WeightedGraph, labels: Sequence[int]) -> "EncodingTree":
        """Tree whose internal nodes are the groups of equal labels.

        Groups are ordered by their smallest vertex; singletons become leaves
        under the root.
        """
        buckets: dict[int, list[int]] = {}
        for v, lab in enumerate(labels):
            buckets.setdefault(int(lab), []).append(v)
        groups = sorted(buckets.values(), key=min)
        return cls(graph, [grp[0] if len(grp) == 1 else grp for grp in groups])

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]

    @property
    def root_children(self) -> tuple[int, ...]:
        return self.root.children

    @property
    def height(self) -> int:
        return 2 if any(self.nodes[c].children for c in self.root_children) else 1

    def groups(self) -> list[tuple[int, ...]]:
        """Vertex subsets of the root's children, left to right."""
        return [self.nodes[c].vertices for c in self.root_children]

    def internal_groups(self) -> list[tuple[int, ...]]:
        return [self.nodes[c].vertices for c in self.root_children if self.nodes[c].children]

    def community_labels(self) -> np.ndarray:
        """Index of the root child containing each vertex."""
        out = np.empty(self.vertex_count, dtype=int)
        for k, grp in enumerate(self.groups()):
            out[list(grp)] = k
        return out

    def is_matching(self) -> bool:
        kids = [self.nodes[c] for c in self.root_children]
        return all(len(node.children) == 2 for node in kids)

    def same_structure(self, other: "EncodingTree") -> bool:
        """Same partition of the vertices, ignoring order."""
        def canon(tree):
            return sorted(tuple(sorted(g)) for g in tree.groups())
        return canon(self) == canon(other)

    def __repr__(self):
        return f"EncodingTree({self.groups()!r})"

    def serialize(self) -> str:
        """One line per node: ``depth vertex-subset g vol``."""
        lines = []

        def walk(nid, depth):
            node = self.nodes[nid]
            subset = ",".join(str(v) for v in node.vertices)
            lines.append(f"{'  ' * depth}{depth} {{{subset}}} {node.g:.12g} {node.vol:.12g}")
            for c in node.children:
                walk(c, depth + 1)

        walk(0, 0)
        return "\n".join(lines) + "\n"


def one_layer_tree(graph: WeightedGraph) -> EncodingTree:
    if graph.volume <= 0:
        raise TreeError("graph has zero volume")
    return EncodingTree(graph, list(range(graph.vertex_count)))


def _node_term(g: float, vol: float, parent_vol: float, total: float) -> float:
    if g == 0.0:
        return 0.0
    return -(g / total) * np.log2(vol / parent_vol)


def structural_entropy(graph: WeightedGraph, tree: EncodingTree) -> float:
    """Structural entropy of ``graph`` under ``tree``, recomputing node stats from the graph."""
    if tree.vertex_count != graph.vertex_count:
        raise TreeError("tree and graph disagree on the vertex count")
    total = graph.volume
    if total <= 0:
        raise TreeError("graph has zero volume")
    h = 0.0
    for node in tree.nodes[1:]:
        g, vol = _cut_and_volume(graph, node.vertices)
        parent_vol = _cut_and_volume(graph, tree.nodes[node.parent].vertices)[1]
        h += _node_term(g, vol, parent_vol, total)
    return max(h, 0.0)


def _require_root_children(tree: EncodingTree, a: int, b: int) -> None:
    kids = tree.root_children
    if a == b or a not in kids or b not in kids:
        raise TreeError("stretch needs two distinct children of the root")


def stretch_delta(graph: WeightedGraph, tree: EncodingTree, a: int, b: int) -> float:
    """Entropy reduction from joining root children ``a`` and ``b`` (node ids).

    For two leaves this is the stretch operator's closed form
    ``-(g_a + g_b - g_new) / vol(G) * log2(vol_new / vol(G))``. When either
    node is internal the two subsets are unioned into one internal node and
    the reduction picks up the re-parenting of the existing leaves.
    """
    _require_root_children(tree, a, b)
    na, nb = tree.nodes[a], tree.nodes[b]
    total = graph.volume
    merged = na.vertices + nb.vertices
    g_new, vol_new = _cut_and_volume(graph, merged)
    if vol_new <= 0:
        return 0.0
    delta = 0.0
    numer = na.g + nb.g - g_new
    if numer != 0.0:
        delta -= numer / total * np.log2(vol_new / total)
    for node in (na, nb):
        if node.children:
            leaf_cut = sum(tree.nodes[c].g for c in node.children)
            slack = leaf_cut - node.g
            if slack != 0.0:
                delta -= slack / total * np.log2(vol_new / node.vol)
    return float(delta)


def apply_stretch(graph: WeightedGraph, tree: EncodingTree, a: int, b: int) -> EncodingTree:
    """Tree with root children ``a`` and ``b`` joined, placed at ``a``'s position."""
    _require_root_children(tree, a, b)
    out = []
    for c in tree.root_children:
        if c == b:
            continue
        verts = tree.nodes[c].vertices
        if c == a:
            verts = verts + tree.nodes[b].vertices
        out.append(verts[0] if len(verts) == 1 else verts)
    return EncodingTree(graph, out)


def optimize_two_layer(graph: WeightedGraph, mode: Mode = "community") -> EncodingTree:
    """Greedily apply the best positive-gain join among root children until none remains.

    ``matching`` only joins two leaves; ``community`` also unions internal
    nodes, keeping height <= 2. Ties go to the pair with the smallest vertex
    indices.
    """
    if mode not in ("matching", "community"):
        raise TreeError(f"unknown mode {mode!r}")
    if graph.volume <= 0:
        raise TreeError("graph has zero volume")
    code = _kernels.MATCHING if mode == "matching" else _kernels.COMMUNITY
    rep, _ = _kernels.greedy_two_layer(np.ascontiguousarray(graph.weights), code)
    return EncodingTree.from_labels(graph, rep)


def matching_pairs(tree: EncodingTree, n: int) -> list[tuple[int, int]]:
    """``(x, y)`` vertex pairs of a bipartite matching tree, ordered by x.

    x-vertices are ``0..n-1`` and y-vertices ``n..2n-1``.
    """
    if tree.vertex_count != 2 * n or not tree.is_matching() or len(tree.root_children) != n:
        raise TreeError("not a perfect matching tree")
    pairs = []
    for grp in tree.groups():
        xs = [v for v in grp if v < n]
        ys = [v for v in grp if v >= n]
        if len(xs) != 1 or len(ys) != 1:
            raise TreeError("matching node must hold one x and one y vertex")
        pairs.append((xs[0], ys[0]))
    return sorted(pairs)


def l_transform(graph: WeightedGraph, tree: EncodingTree, l: int) -> EncodingTree:
    """Cyclic re-matching: node ``i`` becomes ``{x of node (i+l) mod n, y of node i}``."""
    if l < 0:
        raise TreeError("l must be non-negative")
    n = graph.vertex_count // 2
    pairs = matching_pairs(tree, n)
    shifted = [(pairs[(i + l) % n][0], pairs[i][1]) for i in range(n)]
    return EncodingTree(graph, [tuple(sorted(p)) for p in shifted])
