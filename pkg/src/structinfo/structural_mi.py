"""Structural mutual information on bipartite joint-distribution graphs.

Quantities are in bits. Joint tables must be square for anything built on
one-to-one matchings.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, NamedTuple, Sequence

import numpy as np

from .encoding_tree import EncodingTree, l_transform, optimize_two_layer, structural_entropy
from .graph import JointDistribution, WeightedGraph, bipartite_from_joint

SANDWICH_TOL = 1e-9


def _require_square(joint: JointDistribution) -> int:
    if not joint.is_square:
        raise ValueError(f"square joint required, got shape {joint.shape}")
    return joint.shape[0]


def _plogp(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def marginal_structural_entropy(joint: JointDistribution, axis: Literal["X", "Y"] = "X") -> float:
    p = joint.px if axis == "X" else joint.py
    return _plogp(p / 2.0)


def matching_tree(joint: JointDistribution, graph: WeightedGraph | None = None) -> EncodingTree:
    """Optimized one-to-one matching tree of the joint's bipartite graph.

    A single-cell joint has no positive-gain pairing; its only matching is
    returned directly.
    """
    n = _require_square(joint)
    graph = bipartite_from_joint(joint) if graph is None else graph
    tree = optimize_two_layer(graph, "matching")
    if len(tree.root_children) != n or not tree.is_matching():
        tree = EncodingTree(graph, [(i, n + i) for i in range(n)])
    return tree


def joint_structural_entropy(joint: JointDistribution, l: int = 0) -> float:
    """Structural entropy of the bipartite graph under the l-transformed matching tree."""
    graph = bipartite_from_joint(joint)
    base = matching_tree(joint, graph)
    return structural_entropy(graph, l_transform(graph, base, l))


def joint_entropy_closed_form(joint: JointDistribution, l: int = 0) -> float:
    """Per-node sum for the identity-based l-matching using only marginals and joint cells.

    Pairs ``x_{(i+l) mod n}`` with ``y_i``. Only agrees with
    :func:`joint_structural_entropy` when the optimized matching is the identity.
    """
    n = _require_square(joint)
    total = 0.0
    for i in range(n):
        ip = (i + l) % n
        px, py, pxy = joint.px[ip], joint.py[i], joint.table[ip, i]
        vol = px + py
        g = vol - 2.0 * pxy
        if g > 0:
            total -= g / 2.0 * np.log2(vol / 2.0)
        total -= px / 2.0 * np.log2(px / vol) + py / 2.0 * np.log2(py / vol)
    return float(total)


def smi_closed_form(joint: JointDistribution) -> float:
    _require_square(joint)
    denom = joint.px[:, None] + joint.py[None, :]
    return float((joint.table * np.log2(2.0 / denom)).sum())


def smi_by_definition(joint: JointDistribution) -> float:
    """Sum over all n cyclic re-matchings of (H_SI(X) + H_SI(Y) - joint structural entropy)."""
    n = _require_square(joint)
    graph = bipartite_from_joint(joint)
    base = matching_tree(joint, graph)
    single = marginal_structural_entropy(joint, "X") + marginal_structural_entropy(joint, "Y")
    return float(sum(single - structural_entropy(graph, l_transform(graph, base, l)) for l in range(n)))


class Shannon(NamedTuple):
    hx: float
    hy: float
    hxy: float
    hx_given_y: float
    mi: float


def shannon(joint: JointDistribution) -> Shannon:
    hx, hy, hxy = _plogp(joint.px), _plogp(joint.py), _plogp(joint.table)
    t = joint.table
    mi = float((t * np.log2(t / np.outer(joint.px, joint.py))).sum())
    return Shannon(hx, hy, hxy, hxy - hy, mi)


@dataclass(frozen=True)
class TheoremReport:
    lhs: float
    mid: float
    rhs: float
    epsilon: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.mid + SANDWICH_TOL and self.mid <= self.rhs + SANDWICH_TOL


def sandwich_epsilon(joint: JointDistribution) -> float:
    """Smallest log-ratio exponent log_{p(x,y)} p(x) / log_{p(x,y)} p(y) over all cells."""
    t = joint.table
    if t.size == 1:
        return 1.0
    log_t = np.log(t)
    eps_x = np.log(joint.px)[:, None] / log_t
    eps_y = np.log(joint.py)[None, :] / log_t
    return float(min(eps_x.min(), eps_y.min()))


def theorem32_report(joint: JointDistribution, smi=smi_closed_form) -> TheoremReport:
    _require_square(joint)
    sh = shannon(joint)
    eps = sandwich_epsilon(joint)
    return TheoremReport(sh.mi, smi(joint), sh.mi + (1.0 - eps) * sh.hxy, eps)


def theorem41_check(marginal: Sequence[float]) -> tuple[float, float]:
    """(I_SI, I) for the idealized diagonal joint with the given marginal.

    Evaluated analytically: the diagonal joint has zero cells, which the
    bipartite graph construction rejects.
    """
    p = np.asarray(marginal, dtype=float).ravel()
    if p.size == 0 or np.any(p <= 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError("marginal must be positive and sum to 1")
    # diagonal cells p(x_i, y_i) = p_i, with p(x_i) = p(y_i) = p_i
    smi = float((p * np.log2(2.0 / (p + p))).sum())
    mi = float((p * np.log2(p / (p * p))).sum())
    return smi, mi
