"""Weighted undirected graphs and the graph constructions used by the library.

Self-loops are allowed. A self-loop contributes its weight once to the degree
of its vertex, so the volume of a graph with loops is not twice its total edge
weight.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SUM_TOL = 1e-12


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class WeightedGraph:
    """Immutable undirected graph stored as a dense symmetric weight matrix.

    ``weights[i, i]`` holds the self-loop weight of vertex ``i``.
    """

    weights: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
            raise GraphError("weights must be a non-empty square matrix")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise GraphError("edge weights must be finite and non-negative")
        if not np.array_equal(w, w.T):
            raise GraphError("weight matrix must be symmetric")
        if self.labels is not None and len(self.labels) != w.shape[0]:
            raise GraphError("one label per vertex required")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, float]], labels=None) -> "WeightedGraph":
        w = np.zeros((n, n))
        seen = set()
        for i, j, wt in edges:
            i, j = int(i), int(j)
            if not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"edge ({i}, {j}) out of range for {n} vertices")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            w[i, j] = w[j, i] = float(wt)
        return cls(w, None if labels is None else tuple(labels))

    @property
    def vertex_count(self) -> int:
        return self.weights.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        # the diagonal is counted once, by construction of the row sum
        return self.weights.sum(axis=1)

    @property
    def volume(self) -> float:
        return float(self.degrees.sum())

    def edges(self) -> list[tuple[int, int, float]]:
        """Non-zero edges as ``(i, j, w)`` with ``i <= j``."""
        iu, ju = np.triu_indices(self.vertex_count)
        mask = self.weights[iu, ju] > 0
        return [(int(i), int(j), float(w)) for i, j, w in zip(iu[mask], ju[mask], self.weights[iu, ju][mask])]

    def is_connected(self) -> bool:
        n = self.vertex_count
        adj = self.weights > 0
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            v = stack.pop()
            for u in np.flatnonzero(adj[v] & ~seen):
                seen[u] = True
                stack.append(int(u))
        return bool(seen.all())


@dataclass(frozen=True)
class JointDistribution:
    """Joint probability table p(x_i, y_j) with strictly positive entries."""

    table: np.ndarray
    px: np.ndarray = field(init=False, repr=False)
    py: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        if t.ndim != 2 or t.size == 0:
            raise GraphError("joint table must be a non-empty matrix")
        if not np.all(np.isfinite(t)) or np.any(t <= 0):
            raise GraphError("joint probabilities must be strictly positive")
        if np.any(t > 1):
            raise GraphError("joint probabilities must not exceed 1")
        if abs(t.sum() - 1.0) > SUM_TOL:
            raise GraphError(f"joint table sums to {t.sum()!r}, not 1")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)
        px, py = t.sum(axis=1), t.sum(axis=0)
        px.setflags(write=False)
        py.setflags(write=False)
        object.__setattr__(self, "px", px)
        object.__setattr__(self, "py", py)

    @property
    def shape(self) -> tuple[int, int]:
        return self.table.shape

    @property
    def is_square(self) -> bool:
        return self.table.shape[0] == self.table.shape[1]

    def transpose(self) -> "JointDistribution":
        return JointDistribution(self.table.T.copy())


def bipartite_from_joint(joint: JointDistribution) -> WeightedGraph:
    """Bipartite graph with x-vertices ``0..n-1`` and y-vertices ``n..n+m-1``."""
    n, m = joint.shape
    w = np.zeros((n + m, n + m))
    w[:n, n:] = joint.table
    w[n:, :n] = joint.table.T
    labels = tuple(f"x{i}" for i in range(n)) + tuple(f"y{j}" for j in range(m))
    return WeightedGraph(w, labels)


def value_graph(values: Sequence[float]) -> WeightedGraph:
    """Complete loop-free graph weighted by absolute differences of policy values."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size < 2:
        raise GraphError("value graph needs at least two values")
    return WeightedGraph(np.abs(v[:, None] - v[None, :]))


def degree_realization(probs: Sequence[float]) -> WeightedGraph:
    """Connected graph whose vertex degrees equal the given probabilities.

    Built inductively: a two-vertex base (edge ``min(p0, p1)`` plus a loop of
    ``|p1 - p0|`` on the heavier vertex), then each new vertex ``k`` with
    normalized mass ``q`` rescales the existing graph by ``(1 - q)**2`` and
    attaches to every old vertex ``i`` with weight ``q * q_i`` plus a loop
    ``q**2``. Zero-weight loops are dropped.
    """
    p = np.asarray(probs, dtype=float).ravel()
    if p.size < 1:
        raise GraphError("need at least one probability")
    if np.any(~np.isfinite(p)) or np.any(p <= 0):
        raise GraphError("visitation probabilities must be positive")
    if abs(p.sum() - 1.0) > SUM_TOL:
        raise GraphError(f"probabilities sum to {p.sum()!r}, not 1")
    n = p.size
    if n == 1:
        return WeightedGraph(np.array([[p[0]]]))

    w = np.zeros((n, n))
    prefix = np.cumsum(p)
    # base case on the first two vertices, normalized to their own mass
    q0, q1 = p[0] / prefix[1], p[1] / prefix[1]
    lo = min(q0, q1)
    w[0, 1] = w[1, 0] = lo
    heavy = 0 if q0 > q1 else 1
    w[heavy, heavy] = abs(q1 - q0)
    for k in range(2, n):
        q = p[k] / prefix[k]
        qi = p[:k] / prefix[k]
        w[:k, :k] *= (1.0 - q) ** 2
        w[:k, k] = w[k, :k] = qi * q
        w[k, k] = q * q
    return WeightedGraph(w)


# -- text fixtures ---------------------------------------------------------

def read_edge_list(path: str | Path) -> WeightedGraph:
    """Parse ``i j w`` lines; ``#`` starts a comment."""
    edges = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphError(f"{path}:{lineno}: expected 'i j w'")
        edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
    if not edges:
        raise GraphError(f"{path}: no edges")
    n = 1 + max(max(i, j) for i, j, _ in edges)
    return WeightedGraph.from_edges(n, edges)


def write_edge_list(graph: WeightedGraph, path: str | Path) -> None:
    lines = [f"# {graph.vertex_count} vertices"]
    lines += [f"{i} {j} {w!r}" for i, j, w in graph.edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix(path: str | Path) -> np.ndarray:
    """Whitespace-separated rows; ``#`` comments allowed."""
    rows = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append([float(tok) for tok in line.split()])
    if not rows or len({len(r) for r in rows}) != 1:
        raise GraphError(f"{path}: ragged or empty matrix")
    return np.array(rows)


def read_joint(path: str | Path) -> JointDistribution:
    return JointDistribution(read_matrix(path))
