"""Seeded theorem and property checks behind ``structinfo verify``."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import structural_mi as smi_mod
from .bounds import (TabularChannel, l_sgz, l_up, l_zgs, smi_upper_decomposition_check,
                     true_marginal_decoder, true_s_given_z, true_z_given_s)
from .encoding_tree import (EncodingTree, apply_stretch, one_layer_tree, optimize_two_layer,
                            stretch_delta, structural_entropy)
from .exploration import exact_vcse, knn_entropy
from .graph import JointDistribution, WeightedGraph, degree_realization

SEED = 20240601
GAIN_FLOOR = 1e-12


@dataclass(frozen=True)
class CheckResult:
    group: str
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


# -- random draws -------------------------------------------------------------

def random_joint(rng: np.random.Generator, n: int) -> JointDistribution:
    t = rng.dirichlet(np.ones(n * n)).reshape(n, n)
    t = np.maximum(t, 1e-300)
    return JointDistribution(t / t.sum())


def random_simplex(rng: np.random.Generator, n: int) -> np.ndarray:
    p = rng.dirichlet(np.ones(n))
    p = np.maximum(p, 1e-12)
    return p / p.sum()


def random_graph(rng: np.random.Generator, n: int, density: float = 0.5, loops: bool = True) -> WeightedGraph:
    w = np.triu(rng.random((n, n)) * (rng.random((n, n)) < density), 1)
    w = w + w.T
    if loops:
        w[np.diag_indices(n)] = rng.random(n) * (rng.random(n) < 0.3)
    if w.sum() <= 0:
        w[0, 1] = w[1, 0] = 1.0
    return WeightedGraph(w)


def random_bipartite(rng: np.random.Generator, nx: int, ny: int, density: float = 0.35) -> WeightedGraph:
    n = nx + ny
    w = np.zeros((n, n))
    block = rng.random((nx, ny)) * (rng.random((nx, ny)) < density)
    if not block.any():
        block[rng.integers(nx), rng.integers(ny)] = 1.0
    w[:nx, nx:] = block
    w[nx:, :nx] = block.T
    return WeightedGraph(w)


def random_tree(rng: np.random.Generator, graph: WeightedGraph) -> EncodingTree:
    n = graph.vertex_count
    return EncodingTree.from_labels(graph, rng.integers(0, max(1, n // 2), size=n))


# -- reference greedy (slow, pure Python) -----------------------------------

def reference_greedy(graph: WeightedGraph, mode: str) -> EncodingTree:
    """Greedy joins evaluated with :func:`stretch_delta`; the kernel must agree.

    Gains below ``GAIN_FLOOR`` count as zero: joining a zero-degree vertex
    gains nothing, but the generic formula leaves a rounding residue.
    """
    tree = one_layer_tree(graph)
    while True:
        kids = sorted(tree.root_children, key=lambda c: tree.nodes[c].vertices[0])
        best, pick = 0.0, None
        for a, b in itertools.combinations(kids, 2):
            na, nb = tree.nodes[a], tree.nodes[b]
            if mode == "matching" and (na.children or nb.children):
                continue
            gain = stretch_delta(graph, tree, a, b)
            if gain > max(best, GAIN_FLOOR):
                best, pick = gain, (a, b)
        if pick is None:
            return tree
        tree = apply_stretch(graph, tree, *pick)


# -- check groups ------------------------------------------------------------

def _eq5(rng, smi) -> list[CheckResult]:
    worst = 0.0
    for _ in range(100):
        j = random_joint(rng, int(rng.integers(2, 9)))
        worst = max(worst, abs(smi(j) - smi_mod.smi_by_definition(j)))
    return [CheckResult("eq5", "closed form equals definition (100 joints)", worst <= 1e-9, f"max err {worst:.2e}")]


def _theorem32(rng, smi) -> list[CheckResult]:
    bad = 0
    for _ in range(1000):
        rep = smi_mod.theorem32_report(random_joint(rng, int(rng.integers(2, 9))), smi=smi)
        bad += not rep.holds
    return [CheckResult("theorem32", "MI <= SMI <= MI + (1-eps) H(X,Y) (1000 joints)", bad == 0, f"{bad} violations")]


def _theorem41(rng, smi) -> list[CheckResult]:
    worst = 0.0
    for _ in range(50):
        p = random_simplex(rng, int(rng.integers(1, 12)))
        s, m = smi_mod.theorem41_check(p)
        h = float(-(p * np.log2(p)).sum())
        worst = max(worst, abs(s - h), abs(m - h))
    return [CheckResult("theorem41", "SMI = MI = H(X) on diagonal joints (50)", worst <= 1e-12, f"max err {worst:.2e}")]


def _prop31(rng, smi) -> list[CheckResult]:
    bad = 0
    for _ in range(200):
        nx, ny = int(rng.integers(2, 7)), int(rng.integers(2, 7))
        g = random_bipartite(rng, nx, ny)
        tree = optimize_two_layer(g, "matching")
        for grp in tree.internal_groups():
            bad += any(g.weights[a, b] <= 0 for a, b in itertools.combinations(grp, 2))
    return [CheckResult("prop31", "matching nodes only join adjacent vertices (200 graphs)", bad == 0,
                        f"{bad} non-adjacent pairs")]


def _stretch(rng, smi) -> list[CheckResult]:
    worst = 0.0
    for _ in range(200):
        g = random_graph(rng, int(rng.integers(3, 9)))
        tree = random_tree(rng, g)
        kids = tree.root_children
        if len(kids) < 2:
            continue
        a, b = rng.choice(len(kids), 2, replace=False)
        a, b = kids[a], kids[b]
        delta = stretch_delta(g, tree, a, b)
        direct = structural_entropy(g, tree) - structural_entropy(g, apply_stretch(g, tree, a, b))
        worst = max(worst, abs(delta - direct))
    fixture = WeightedGraph.from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)])
    flat = one_layer_tree(fixture)
    worked = stretch_delta(fixture, flat, flat.root_children[0], flat.root_children[1])
    out = [CheckResult("stretch", "gain formula equals entropy difference (200 draws)", worst <= 1e-10,
                       f"max err {worst:.2e}"),
           CheckResult("stretch", "two disjoint edges: joining 0,1 saves 0.5 bits", abs(worked - 0.5) <= 1e-12,
                       f"gain {worked:.12g}")]
    mismatch = 0
    for i in range(60):
        mode = "matching" if i % 2 else "community"
        g = random_graph(rng, int(rng.integers(3, 8)))
        fast = optimize_two_layer(g, mode)
        mismatch += not fast.same_structure(reference_greedy(g, mode))
    out.append(CheckResult("stretch", "compiled greedy equals reference greedy (60 graphs)", mismatch == 0,
                           f"{mismatch} mismatches"))
    return out


def _prop42(rng, smi) -> list[CheckResult]:
    worst, disconnected = 0.0, 0
    for _ in range(200):
        p = random_simplex(rng, int(rng.integers(1, 17)))
        g = degree_realization(p)
        worst = max(worst, float(np.abs(g.degrees - p).max()))
        disconnected += not g.is_connected()
    return [CheckResult("prop42", "realized degrees match (200 draws)", worst <= 1e-12, f"max err {worst:.2e}"),
            CheckResult("prop42", "realized graphs are connected", disconnected == 0, f"{disconnected} disconnected")]


def _theorem43(rng, smi) -> list[CheckResult]:
    bad = 0
    for _ in range(200):
        n = int(rng.integers(2, 13))
        p = random_simplex(rng, n)
        labels = rng.integers(0, int(rng.integers(1, n + 1)), size=n)
        bad += not exact_vcse(p, labels).holds()
    return [CheckResult("theorem43", "four-way entropy sandwich (200 draws)", bad == 0, f"{bad} violations")]


def _bounds(rng, smi) -> list[CheckResult]:
    viol = np.zeros(4, dtype=int)
    tight = 0.0
    for _ in range(200):
        nz, ns = int(rng.integers(2, 6)), int(rng.integers(2, 6))
        j = JointDistribution(rng.dirichlet(np.ones(nz * ns)).reshape(nz, ns))
        jn = JointDistribution(rng.dirichlet(np.ones(nz * ns)).reshape(nz, ns))
        mi = smi_mod.shannon(j).mi
        h_z_given_s = smi_mod.shannon(j).hx_given_y
        mi_next, h_next = smi_mod.shannon(jn).mi, smi_mod.shannon(jn).hy
        q_m = TabularChannel.normalized(rng.random((1, nz)) + 0.05)
        q_zs = TabularChannel.normalized(rng.random((ns, nz)) + 0.05)
        q_sz = TabularChannel.normalized(rng.random((nz, ns)) + 0.05)
        viol[0] += l_up(j, q_m) < mi - 1e-12
        viol[1] += l_zgs(j, q_zs) < h_z_given_s - 1e-12
        viol[2] += h_next + l_sgz(jn, q_sz) > mi_next + 1e-12
        viol[3] += not smi_upper_decomposition_check(random_joint(rng, nz))
        tight = max(tight,
                    abs(l_up(j, true_marginal_decoder(j)) - mi),
                    abs(l_zgs(j, true_z_given_s(j)) - h_z_given_s),
                    abs(h_next + l_sgz(jn, true_s_given_z(jn)) - mi_next))
    names = ("marginal decoder upper-bounds I(Z;S)", "conditional decoder upper-bounds H(Z|S)",
             "next-state decoder lower-bounds I(Z;S')", "SMI <= I + H(X|Y) + H(Y)")
    out = [CheckResult("bounds", f"{nm} (200 draws)", v == 0, f"{v} violations") for nm, v in zip(names, viol)]
    out.append(CheckResult("bounds", "true decoders are tight", tight <= 1e-12, f"max gap {tight:.2e}"))
    return out


def _knn(rng, smi) -> list[CheckResult]:
    trans, scale = 0.0, 0.0
    for _ in range(50):
        n, d = int(rng.integers(4, 30)), int(rng.integers(1, 5))
        k = int(rng.integers(1, n))
        pts = rng.normal(size=(n, d))
        base = knn_entropy(pts, k)
        trans = max(trans, abs(knn_entropy(pts + rng.normal(size=d), k) - base))
        a = float(rng.uniform(0.1, 10.0))
        scale = max(scale, abs(knn_entropy(a * pts, k) - base - d * np.log2(a)))
    fixture = knn_entropy(np.array([[0.0], [1.0], [3.0]]), 1)
    return [CheckResult("knn", "translation invariance (50 sets)", trans <= 1e-12, f"max err {trans:.2e}"),
            CheckResult("knn", "scaling adds d*log2(a) (50 sets)", scale <= 1e-12, f"max err {scale:.2e}"),
            CheckResult("knn", "{0,1,3} with k=1 gives 4/3", abs(fixture - 4 / 3) <= 1e-12, f"value {fixture:.15g}")]


GROUPS: dict[str, Callable] = {
    "eq5": _eq5,
    "theorem32": _theorem32,
    "theorem41": _theorem41,
    "theorem43": _theorem43,
    "prop31": _prop31,
    "prop42": _prop42,
    "stretch": _stretch,
    "bounds": _bounds,
    "knn": _knn,
}


def _flipped_smi(joint: JointDistribution) -> float:
    denom = joint.px[:, None] + joint.py[None, :]
    return float((joint.table * np.log2(denom / 2.0)).sum())


# deliberately broken implementations, used to show the suite notices them
FAULTS: dict[str, Callable] = {"eq5-sign": _flipped_smi}


def run_checks(only: list[str] | None = None, fault: str | None = None) -> list[CheckResult]:
    names = list(GROUPS) if not only else only
    unknown = [n for n in names if n not in GROUPS]
    if unknown:
        raise KeyError(f"unknown check group(s): {', '.join(unknown)}; choose from {', '.join(GROUPS)}")
    if fault is not None and fault not in FAULTS:
        raise KeyError(f"unknown fault {fault!r}")
    smi = FAULTS[fault] if fault else smi_mod.smi_closed_form
    results = []
    for i, name in enumerate(GROUPS):
        if name not in names:
            continue
        rng = np.random.default_rng([SEED, i])
        t0 = time.perf_counter()
        group = GROUPS[name](rng, smi)
        dt = (time.perf_counter() - t0) / max(len(group), 1)
        results.extend(CheckResult(r.group, r.name, r.passed, r.detail, dt) for r in group)
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'group':<10} {'check':<{width}}  status  detail"]
    for r in results:
        lines.append(f"{r.group:<10} {r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.detail}")
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines)
