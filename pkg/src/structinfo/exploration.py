"""Value-conditional structural entropy and the intrinsic rewards built on it."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from . import _kernels
from .encoding_tree import EncodingTree, optimize_two_layer, structural_entropy
from .graph import WeightedGraph, degree_realization, value_graph

DIST_FLOOR = 1e-12
Centroid = Literal["mean", "medoid", "weighted"]


@dataclass(frozen=True)
class TransitionBatch:
    states: np.ndarray
    actions: np.ndarray
    next_states: np.ndarray
    rewards: np.ndarray
    embeddings: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        emb = np.atleast_2d(np.asarray(self.embeddings, dtype=float))
        n = emb.shape[0]
        if n < 2:
            raise ValueError("a batch needs at least two records")
        if emb.shape[1] < 1:
            raise ValueError("embeddings must have at least one dimension")
        object.__setattr__(self, "embeddings", emb)
        for name in ("states", "actions", "next_states", "rewards", "values"):
            arr = np.asarray(getattr(self, name))
            if arr.shape != (n,):
                raise ValueError(f"{name} must hold one entry per record")
            object.__setattr__(self, name, arr)

    @classmethod
    def from_embeddings(cls, embeddings, values) -> "TransitionBatch":
        """Batch carrying only what the estimator reads; ids and rewards are zero."""
        emb = np.atleast_2d(np.asarray(embeddings, dtype=float))
        zeros = np.zeros(emb.shape[0], dtype=int)
        return cls(zeros, zeros, zeros, np.zeros(emb.shape[0]), emb, np.asarray(values, dtype=float))

    def __len__(self):
        return self.embeddings.shape[0]

    def take(self, order) -> "TransitionBatch":
        order = np.asarray(order)
        return TransitionBatch(self.states[order], self.actions[order], self.next_states[order],
                               self.rewards[order], self.embeddings[order], self.values[order])


@dataclass(frozen=True)
class CommunityAssignment:
    labels: np.ndarray
    centroids: np.ndarray

    @property
    def n_communities(self) -> int:
        return self.centroids.shape[0]

    def members(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.labels == c) for c in range(self.n_communities)]

    def take(self, order) -> "CommunityAssignment":
        return CommunityAssignment(self.labels[np.asarray(order)], self.centroids)


def kth_distances(points: np.ndarray, k: int) -> np.ndarray:
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=float)))
    if pts.shape[1] < 1:
        raise ValueError("points must have at least one dimension")
    if not 1 <= k < pts.shape[0]:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={pts.shape[0]}")
    return _kernels.kth_neighbor_distance(pts, k)


def knn_entropy(points, k: int) -> float:
    """(d/n) * sum log2 max(2 * r_k(x_i), 1e-12), without the additive constant."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d = 2.0 * kth_distances(pts, k)
    return float(pts.shape[1] / pts.shape[0] * np.log2(np.maximum(d, DIST_FLOOR)).sum())


def affinity_graph(values: Sequence[float]) -> WeightedGraph:
    """Complement of the value-difference graph: ``max|dv| - |v_i - v_j|``.

    Similar values get heavy edges, so minimizing structural entropy groups
    them; the most dissimilar pair gets weight zero and is never joined
    directly.
    """
    dist = value_graph(values).weights
    aff = dist.max() - dist
    np.fill_diagonal(aff, 0.0)
    return WeightedGraph(aff)


def community_labels(values: Sequence[float]) -> np.ndarray:
    """Community index per record, numbered by smallest member.

    All-equal values form one community; if every pair is equally far apart
    the affinity graph is empty and each record stands alone.
    """
    v = np.ascontiguousarray(values, dtype=float)
    if v.size < 2:
        raise ValueError("need at least two values")
    aff, spread = _kernels.affinity_matrix(v)
    if spread <= 0:
        return np.zeros(v.size, dtype=np.int64)
    if not aff.any():
        return np.arange(v.size)
    rep, _ = _kernels.greedy_two_layer(aff, _kernels.COMMUNITY)
    _, labels = np.unique(rep, return_inverse=True)
    return labels


def hierarchy_tree(values: Sequence[float]) -> EncodingTree:
    """Two-layer community tree over the affinity graph of the given values."""
    v = np.asarray(values, dtype=float)
    graph = affinity_graph(v)
    if value_graph(v).volume <= 0:
        return EncodingTree(graph, [tuple(range(v.size))])
    if graph.volume <= 0:
        return EncodingTree(graph, list(range(v.size)))
    return optimize_two_layer(graph, "community")


def centroids_for(embeddings: np.ndarray, labels: np.ndarray, weights=None,
                  method: Centroid = "mean") -> np.ndarray:
    emb = np.asarray(embeddings, dtype=float)
    out = np.empty((labels.max() + 1, emb.shape[1]))
    for c in range(out.shape[0]):
        idx = np.flatnonzero(labels == c)
        pts = emb[idx]
        if method == "mean":
            out[c] = pts.mean(axis=0)
        elif method == "weighted":
            w = np.asarray(weights, dtype=float)[idx]
            out[c] = pts.mean(axis=0) if w.sum() <= 0 else (w[:, None] * pts).sum(axis=0) / w.sum()
        elif method == "medoid":
            cost = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1).sum(axis=1)
            out[c] = pts[int(np.argmin(cost))]
        else:
            raise ValueError(f"unknown centroid method {method!r}")
    return out


def build_hierarchy(batch: TransitionBatch, centroid: Centroid = "mean") -> CommunityAssignment:
    labels = community_labels(batch.values)
    return CommunityAssignment(labels, centroids_for(batch.embeddings, labels, batch.values, centroid))


def _community_k(k: int, n1: int) -> int:
    return min(k, n1 - 1)


def vcse_estimate(batch: TransitionBatch, assignment: CommunityAssignment, k: int) -> float:
    if k >= len(batch):
        raise ValueError("k must be smaller than the batch size")
    first = knn_entropy(batch.embeddings, k)
    n1 = assignment.n_communities
    if n1 < 2:
        return first
    return first - knn_entropy(assignment.centroids, _community_k(k, n1))


def intrinsic_rewards(batch: TransitionBatch, assignment: CommunityAssignment, k: int) -> np.ndarray:
    """Per record: log2(1 + d0(record)) - log2(1 + d1(record's community))."""
    if k >= len(batch):
        raise ValueError("k must be smaller than the batch size")
    d0 = 2.0 * kth_distances(batch.embeddings, k)
    n1 = assignment.n_communities
    if n1 < 2:
        d1 = np.zeros(n1)
    else:
        d1 = 2.0 * kth_distances(assignment.centroids, _community_k(k, n1))
    return np.log2(1.0 + d0) - np.log2(1.0 + d1[assignment.labels])


def shannon_rewards(batch: TransitionBatch, k: int) -> np.ndarray:
    """Community-free baseline: log2(1 + d0) per record."""
    if k >= len(batch):
        raise ValueError("k must be smaller than the batch size")
    return np.log2(1.0 + 2.0 * kth_distances(batch.embeddings, k))


def combine_reward(r_ext, r_int, beta: float):
    if beta < 0:
        raise ValueError("beta must be non-negative")
    return r_ext + beta * r_int


@dataclass(frozen=True)
class VcseReport:
    h_v0: float
    h_v1: float
    h_tree: float
    zeta: float

    @property
    def gap(self) -> float:
        return self.h_v0 - self.h_v1

    def holds(self, tol: float = 1e-9) -> bool:
        return (self.zeta * self.h_v0 <= self.gap + tol
                and self.gap <= self.h_tree + tol
                and self.h_tree <= self.h_v0 + tol)


def exact_vcse(probs: Sequence[float], labels: Sequence[int]) -> VcseReport:
    """Exact entropies for known visitation probabilities and a community partition."""
    p = np.asarray(probs, dtype=float)
    lab = np.asarray(labels)
    if lab.shape != p.shape:
        raise ValueError("one community label per probability")
    graph = degree_realization(p)
    tree = EncodingTree.from_labels(graph, lab)
    h_tree = structural_entropy(graph, tree)
    comm = np.array([p[lab == c].sum() for c in np.unique(lab)])
    h_v0 = float(-(p * np.log2(p)).sum())
    h_v1 = float(-(comm * np.log2(comm)).sum())
    if p.size == 1:
        zeta = 0.0
    else:
        vol = np.array([p[lab == c].sum() for c in lab])
        zeta = float((np.log(p / vol) / np.log(p)).min())
    return VcseReport(h_v0, h_v1, h_tree, zeta)


def first_record_reward(method: str, embeddings: np.ndarray, values: np.ndarray, k: int,
                        centroid: Centroid = "mean") -> float:
    """Intrinsic reward of record 0 only; the per-step path used during training.

    Equals ``intrinsic_rewards(...)[0]`` (si2e) or ``shannon_rewards(...)[0]``
    (shannon-entropy) on the same batch.
    """
    d0 = 2.0 * _kernels.kth_distance_from(embeddings, 0, k)
    if method == "shannon-entropy":
        return float(np.log2(1.0 + d0))
    labels = community_labels(values)
    n1 = int(labels.max()) + 1
    if n1 < 2:
        return float(np.log2(1.0 + d0))
    if centroid == "mean":
        cents = _kernels.mean_centroids(embeddings, labels, n1)
    else:
        cents = centroids_for(embeddings, labels, values, centroid)
    d1 = 2.0 * _kernels.kth_distance_from(cents, labels[0], _community_k(k, n1))
    return float(np.log2(1.0 + d0) - np.log2(1.0 + d1))
