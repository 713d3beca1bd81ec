"""Exact tabular evaluation of the representation-learning bounds (bits).

Joint tables are indexed ``[z, s]``: rows are representation symbols, columns
are states. Decoders are strictly positive row-stochastic tables.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import JointDistribution
from .structural_mi import shannon, smi_closed_form

ROW_TOL = 1e-12


@dataclass(frozen=True)
class TabularChannel:
    """Row-stochastic table; a single row stands for an unconditional decoder."""

    table: np.ndarray

    def __post_init__(self):
        t = np.atleast_2d(np.array(self.table, dtype=float))
        if np.any(~np.isfinite(t)) or np.any(t <= 0):
            raise ValueError("decoder entries must be strictly positive")
        if np.any(np.abs(t.sum(axis=1) - 1.0) > ROW_TOL):
            raise ValueError("decoder rows must sum to 1")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @classmethod
    def normalized(cls, weights) -> "TabularChannel":
        w = np.atleast_2d(np.asarray(weights, dtype=float))
        return cls(w / w.sum(axis=1, keepdims=True))


@dataclass(frozen=True)
class LossBundle:
    l_up: float
    l_zgs: float
    l_sgz: float
    eta: float

    @property
    def combined(self) -> float:
        return self.l_up + self.l_zgs + self.eta * self.l_sgz


def l_up(joint_zs: JointDistribution, q_m: TabularChannel) -> float:
    """Expected KL(p(z|s) || q_m(z)) under p(s); upper-bounds I(Z;S)."""
    qm = q_m.table
    if qm.shape != (1, joint_zs.shape[0]):
        raise ValueError("q_m must be a single row over the Z alphabet")
    t = joint_zs.table
    p_z_given_s = t / joint_zs.py[None, :]
    return float((t * np.log2(p_z_given_s / qm[0][:, None])).sum())


def l_zgs(joint_zs: JointDistribution, q: TabularChannel) -> float:
    """Cross-entropy of Z given S under decoder ``q[s, z]``; upper-bounds H(Z|S)."""
    nz, ns = joint_zs.shape
    if q.table.shape != (ns, nz):
        raise ValueError(f"q_z|s must have shape {(ns, nz)}")
    return float(-(joint_zs.table * np.log2(q.table.T)).sum())


def l_sgz(joint_zs_next: JointDistribution, q: TabularChannel) -> float:
    """Expected log-likelihood of S' under decoder ``q[z, s']``; lower-bounds I(Z;S')."""
    if q.table.shape != joint_zs_next.shape:
        raise ValueError(f"q_s|z must have shape {joint_zs_next.shape}")
    return float((joint_zs_next.table * np.log2(q.table)).sum())


def smi_upper_decomposition_check(joint: JointDistribution, tol: float = 1e-9) -> bool:
    """I_SI(X;Y) <= I(X;Y) + H(X|Y) + H(Y)."""
    sh = shannon(joint)
    return smi_closed_form(joint) <= sh.mi + sh.hx_given_y + sh.hy + tol


def combined_loss(l_up: float, l_zgs: float, l_sgz: float, eta: float = 1.0) -> LossBundle:
    if eta < 0:
        raise ValueError("eta must be non-negative")
    return LossBundle(float(l_up), float(l_zgs), float(l_sgz), float(eta))


def true_marginal_decoder(joint_zs: JointDistribution) -> TabularChannel:
    return TabularChannel(joint_zs.px[None, :])


def true_z_given_s(joint_zs: JointDistribution) -> TabularChannel:
    return TabularChannel((joint_zs.table / joint_zs.py[None, :]).T)


def true_s_given_z(joint_zs_next: JointDistribution) -> TabularChannel:
    return TabularChannel(joint_zs_next.table / joint_zs_next.px[:, None])
