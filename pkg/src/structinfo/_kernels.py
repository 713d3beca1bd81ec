"""Compiled inner loops for the greedy tree optimizer and k-NN distances.

These run once per environment step during training, so they are jitted.
"""
import numpy as np
from numba import njit

MATCHING = 0
COMMUNITY = 1


@njit(cache=True)
def _log2(x):
    return np.log2(x)


@njit(cache=True)
def _merge_gain(cross, vol_c, log_total, total, inner_x, log_x, inner_y, log_y):
    # entropy drop (bits) from joining two root children into one internal node;
    # inner_* > 0 implies a positive volume, so log_* is finite when used
    if vol_c <= 0.0:
        return 0.0
    log_c = np.log2(vol_c)
    gain = 0.0
    if cross > 0.0:
        gain += cross * (log_total - log_c)
    if inner_x > 0.0:
        gain -= inner_x * (log_c - log_x)
    if inner_y > 0.0:
        gain -= inner_y * (log_c - log_y)
    return 2.0 * gain / total


@njit(cache=True)
def _rescan(gain, eligible, r, n):
    best = -np.inf
    arg = -1
    for j in range(r + 1, n):
        if eligible[j] and gain[r, j] > best:
            best = gain[r, j]
            arg = j
    return best, arg


@njit(cache=True)
def greedy_two_layer(weights, mode):
    """Greedy stretch/merge loop on a dense weight matrix.

    Returns ``(rep, internal)``: ``rep[v]`` is the smallest vertex index of the
    root child containing ``v``; ``internal[r]`` marks reps that became
    internal nodes. Among equal gains the lexicographically smallest
    ``(rep_a, rep_b)`` pair wins.
    """
    n = weights.shape[0]
    vol = weights.sum(axis=1).copy()
    total = vol.sum()
    cross = weights.copy()
    for i in range(n):
        cross[i, i] = 0.0
    inner = np.zeros(n)
    eligible = np.ones(n, dtype=np.bool_)
    internal = np.zeros(n, dtype=np.bool_)
    rep = np.arange(n)

    log_total = np.log2(total)
    log_vol = np.zeros(n)
    for i in range(n):
        if vol[i] > 0.0:
            log_vol[i] = np.log2(vol[i])
    gain = np.full((n, n), -np.inf)
    for i in range(n):
        for j in range(i + 1, n):
            gain[i, j] = _merge_gain(cross[i, j], vol[i] + vol[j], log_total, total, 0.0, 0.0, 0.0, 0.0)
    row_best = np.full(n, -np.inf)
    row_arg = np.full(n, -1)
    for i in range(n):
        row_best[i], row_arg[i] = _rescan(gain, eligible, i, n)

    while True:
        best = 0.0
        bi = -1
        for i in range(n):
            if eligible[i] and row_arg[i] >= 0 and row_best[i] > best:
                best = row_best[i]
                bi = i
        if bi < 0:
            break
        bj = row_arg[bi]

        inner[bi] += inner[bj] + cross[bi, bj]
        vol[bi] += vol[bj]
        log_vol[bi] = np.log2(vol[bi]) if vol[bi] > 0.0 else 0.0
        eligible[bj] = False
        internal[bi] = True
        if mode == MATCHING:
            eligible[bi] = False
        for v in range(n):
            if rep[v] == bj:
                rep[v] = bi
        for k in range(n):
            if k != bi:
                cross[bi, k] += cross[bj, k]
                cross[k, bi] = cross[bi, k]
            cross[bj, k] = 0.0
            cross[k, bj] = 0.0
        cross[bi, bi] = 0.0
        if eligible[bi]:
            for k in range(n):
                if not eligible[k] or k == bi:
                    continue
                a = min(k, bi)
                b = max(k, bi)
                gain[a, b] = _merge_gain(cross[a, b], vol[a] + vol[b], log_total, total,
                                         inner[a], log_vol[a], inner[b], log_vol[b])
        for r in range(n):
            if not eligible[r]:
                continue
            if r == bi:
                row_best[r], row_arg[r] = _rescan(gain, eligible, r, n)
            elif row_arg[r] == bi or row_arg[r] == bj:
                # the other entries of the row are unchanged and <= the old best
                if r < bi and eligible[bi] and gain[r, bi] >= row_best[r]:
                    row_best[r] = gain[r, bi]
                    row_arg[r] = bi
                else:
                    row_best[r], row_arg[r] = _rescan(gain, eligible, r, n)
            elif r < bi and eligible[bi]:
                g = gain[r, bi]
                if g > row_best[r] or (g == row_best[r] and bi < row_arg[r]):
                    row_best[r] = g
                    row_arg[r] = bi
    return rep, internal


@njit(cache=True)
def kth_neighbor_distance(points, k):
    """Euclidean distance from each point to its k-th nearest other point."""
    n = points.shape[0]
    d = points.shape[1]
    out = np.empty(n)
    row = np.empty(n - 1)
    for i in range(n):
        c = 0
        for j in range(n):
            if j == i:
                continue
            s = 0.0
            for t in range(d):
                diff = points[i, t] - points[j, t]
                s += diff * diff
            row[c] = s
            c += 1
        out[i] = np.sqrt(np.partition(row, k - 1)[k - 1])
    return out


@njit(cache=True)
def actor_critic_updates(logits, values, states, actions, next_states, rewards, dones,
                         gamma, lr_pi, lr_v):
    """Sequential one-step advantage actor-critic updates, in place."""
    n_actions = logits.shape[1]
    probs = np.empty(n_actions)
    for t in range(states.shape[0]):
        s = states[t]
        a = actions[t]
        boot = 0.0 if dones[t] else gamma * values[next_states[t]]
        delta = rewards[t] + boot - values[s]
        values[s] += lr_v * delta
        m = logits[s].max()
        z = 0.0
        for b in range(n_actions):
            probs[b] = np.exp(logits[s, b] - m)
            z += probs[b]
        for b in range(n_actions):
            pb = probs[b] / z
            if b == a:
                logits[s, b] += lr_pi * delta * (1.0 - pb)
            else:
                logits[s, b] -= lr_pi * delta * pb


@njit(cache=True)
def kth_distance_from(points, i, k):
    """k-th nearest-neighbour distance of ``points[i]`` alone."""
    n = points.shape[0]
    row = np.empty(n - 1)
    c = 0
    for j in range(n):
        if j == i:
            continue
        s = 0.0
        for t in range(points.shape[1]):
            diff = points[i, t] - points[j, t]
            s += diff * diff
        row[c] = s
        c += 1
    return np.sqrt(np.partition(row, k - 1)[k - 1])


@njit(cache=True)
def affinity_matrix(values):
    n = values.shape[0]
    dist = np.empty((n, n))
    top = 0.0
    for i in range(n):
        for j in range(n):
            d = abs(values[i] - values[j])
            dist[i, j] = d
            if d > top:
                top = d
    for i in range(n):
        for j in range(n):
            dist[i, j] = 0.0 if i == j else top - dist[i, j]
    return dist, top


@njit(cache=True)
def mean_centroids(points, labels, n_groups):
    out = np.zeros((n_groups, points.shape[1]))
    counts = np.zeros(n_groups)
    for i in range(points.shape[0]):
        counts[labels[i]] += 1.0
        for t in range(points.shape[1]):
            out[labels[i], t] += points[i, t]
    for g in range(n_groups):
        for t in range(points.shape[1]):
            out[g, t] /= counts[g]
    return out
