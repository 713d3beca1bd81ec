"""Tabular softmax actor-critic trained on extrinsic plus intrinsic reward."""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from . import _kernels
from .bounds import LossBundle, TabularChannel, combined_loss, l_sgz, l_up, l_zgs
from .env import Mdp, reset, step
from .exploration import first_record_reward
from .graph import JointDistribution

Method = Literal["none", "shannon-entropy", "si2e"]
METHODS = ("none", "shannon-entropy", "si2e")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    method: Method = "si2e"
    beta: float = 0.005
    k: int = 5
    gamma: float = 0.99
    lr_pi: float = 0.1
    lr_v: float = 0.1
    t_up: int = 16
    batch_size: int = 64
    buffer_capacity: int = 10_000
    total_steps: int = 20_000
    seed: int = 0
    eta: float = 1.0
    centroid: str = "mean"
    value_source: str = "prob"
    diagnostics: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}")
        if self.beta < 0 or self.eta < 0:
            raise ConfigError("beta and eta must be non-negative")
        if not 0 <= self.gamma < 1:
            raise ConfigError("gamma must lie in [0, 1)")
        if self.lr_pi < 0 or self.lr_v < 0:
            raise ConfigError("learning rates must be non-negative")
        if self.t_up < 1 or self.total_steps < 1:
            raise ConfigError("t_up and total_steps must be positive")
        if self.batch_size < 2 or not 1 <= self.k < self.batch_size:
            raise ConfigError("need batch_size >= 2 and 1 <= k < batch_size")
        if self.buffer_capacity < self.batch_size:
            raise ConfigError("buffer_capacity must hold at least one batch")
        if self.centroid not in ("mean", "medoid", "weighted"):
            raise ConfigError(f"unknown centroid {self.centroid!r}")
        if self.value_source not in ("prob", "q"):
            raise ConfigError(f"unknown value_source {self.value_source!r}")


class PolicyTable:
    """Softmax logits per (state, action) plus a state-value table."""

    def __init__(self, n_states: int, n_actions: int, gamma=0.99, lr_pi=0.1, lr_v=0.1):
        self.logits = np.zeros((n_states, n_actions))
        self.values = np.zeros(n_states)
        self.gamma = gamma
        self.lr_pi = lr_pi
        self.lr_v = lr_v

    def probs(self, state=None) -> np.ndarray:
        z = self.logits if state is None else self.logits[state]
        e = np.exp(z - z.max(axis=-1, keepdims=True))
        return e / e.sum(axis=-1, keepdims=True)

    def copy(self) -> "PolicyTable":
        out = PolicyTable(*self.logits.shape, self.gamma, self.lr_pi, self.lr_v)
        out.logits[:] = self.logits
        out.values[:] = self.values
        return out


class ReplayBuffer:
    """Ring buffer of transitions with uniform sampling."""

    FIELDS = ("states", "actions", "next_states", "rewards", "dones")

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.states = np.zeros(capacity, dtype=np.int64)
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.next_states = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.dones = np.zeros(capacity, dtype=np.bool_)
        self.size = 0
        self._head = 0

    def __len__(self):
        return self.size

    def add(self, s, a, s2, r, done):
        i = self._head
        self.states[i], self.actions[i], self.next_states[i] = s, a, s2
        self.rewards[i], self.dones[i] = r, done
        self._head = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample_indices(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.size < n:
            raise ValueError(f"buffer holds {self.size} transitions, need {n}")
        return rng.integers(0, self.size, size=n)

    def sample(self, n: int, rng: np.random.Generator) -> dict:
        idx = self.sample_indices(n, rng)
        return {name: getattr(self, name)[idx] for name in self.FIELDS}


def act(policy: PolicyTable, state: int, rng: np.random.Generator) -> int:
    p = policy.probs(state)
    a = int(np.searchsorted(np.cumsum(p), rng.random(), side="right"))
    return min(a, p.size - 1)


def update(policy: PolicyTable, batch: dict) -> PolicyTable:
    """One advantage actor-critic step per transition, applied in batch order, in place."""
    if len(batch["states"]) == 0:
        raise ValueError("empty batch")
    _kernels.actor_critic_updates(
        policy.logits, policy.values,
        np.asarray(batch["states"], dtype=np.int64), np.asarray(batch["actions"], dtype=np.int64),
        np.asarray(batch["next_states"], dtype=np.int64), np.asarray(batch["rewards"], dtype=float),
        np.asarray(batch["dones"], dtype=np.bool_), policy.gamma, policy.lr_pi, policy.lr_v)
    return policy


@dataclass
class EpisodeLog:
    seed: int
    config: dict
    returns: list = field(default_factory=list)
    successes: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    intrinsic_means: list = field(default_factory=list)
    traces: list = field(default_factory=list)
    losses: list = field(default_factory=list)

    CSV_HEADER = ("episode", "return", "success", "steps", "intrinsic_mean")

    def __len__(self):
        return len(self.returns)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_HEADER)
        for i in range(len(self)):
            w.writerow([i, repr(float(self.returns[i])), int(self.successes[i]), self.steps[i],
                        repr(float(self.intrinsic_means[i]))])
        return buf.getvalue()

    def visit_frequency(self, mdp: Mdp, pairs, last: int = 100) -> float:
        """Fraction of steps in the final ``last`` episodes spent on the given (state, action) pairs."""
        codes = {s * mdp.n_actions + a for s, a in pairs}
        tail = self.traces[-last:]
        total = sum(len(t) for t in tail)
        hits = sum(int(np.isin(t, list(codes)).sum()) for t in tail)
        return hits / total if total else 0.0


def _window_losses(buffer: ReplayBuffer, idx: np.ndarray, n_actions: int, eta: float) -> LossBundle:
    """Representation-loss diagnostics over Laplace-smoothed empirical tables.

    Z is the (state, action) code. The joint comes from the sampled batch; the
    decoders come from the whole buffer, so the bounds are not trivially tight.
    """
    s_all = buffer.states[:buffer.size]
    z_all = s_all * n_actions + buffer.actions[:buffer.size]
    n_all = buffer.next_states[:buffer.size]
    zs, ss, ns = z_all[idx], s_all[idx], n_all[idx]
    z_sym = np.unique(zs)
    s_sym = np.unique(np.concatenate([ss, ns]))
    zi, si, ni = (np.searchsorted(z_sym, zs), np.searchsorted(s_sym, ss), np.searchsorted(s_sym, ns))

    def table(rows, cols, r, c):
        t = np.full((rows, cols), 0.5)
        np.add.at(t, (r, c), 1.0)
        return t / t.sum()

    joint_zs = JointDistribution(table(len(z_sym), len(s_sym), zi, si))
    joint_zn = JointDistribution(table(len(z_sym), len(s_sym), zi, ni))
    keep = np.isin(z_all, z_sym) & np.isin(s_all, s_sym) & np.isin(n_all, s_sym)
    bz, bs, bn = (np.searchsorted(z_sym, z_all[keep]), np.searchsorted(s_sym, s_all[keep]),
                  np.searchsorted(s_sym, n_all[keep]))
    wide_zs = table(len(z_sym), len(s_sym), bz, bs)
    wide_zn = table(len(z_sym), len(s_sym), bz, bn)
    q_m = TabularChannel.normalized(wide_zs.sum(axis=1))
    q_zgs = TabularChannel.normalized(wide_zs.T)
    q_sgz = TabularChannel.normalized(wide_zn)
    return combined_loss(l_up(joint_zs, q_m), l_zgs(joint_zs, q_zgs), l_sgz(joint_zn, q_sgz), eta)


def train(env: Mdp, config: TrainConfig, record_traces: bool = True) -> EpisodeLog:
    """Run the collect / reward / store / periodic-update loop for ``total_steps`` steps.

    Independent generator streams drive action sampling, intrinsic-reward
    batches and update batches, so ``beta = 0`` reproduces the plain
    actor-critic trajectory exactly.
    """
    act_rng, intr_rng, upd_rng = (np.random.default_rng(s) for s in
                                  np.random.SeedSequence(config.seed).spawn(3))
    policy = PolicyTable(env.n_states, env.n_actions, config.gamma, config.lr_pi, config.lr_v)
    buffer = ReplayBuffer(config.buffer_capacity)
    emb_table = np.ascontiguousarray(env.embedding_table())
    log = EpisodeLog(config.seed, asdict(config))
    n_actions = env.n_actions
    use_intrinsic = config.method != "none"
    others = config.batch_size - 1

    t_global = 0
    while t_global < config.total_steps:
        s = reset(env)
        ep_ret, ep_int, trace, done = 0.0, [], [], False
        for t in range(env.step_cap):
            a = act(policy, s, act_rng)
            s2, r_ext, done = step(env, s, a, t=t)
            r_int = 0.0
            if use_intrinsic and buffer.size >= others:
                idx = buffer.sample_indices(others, intr_rng)
                bs = np.concatenate(([s], buffer.states[idx]))
                ba = np.concatenate(([a], buffer.actions[idx]))
                codes = bs * n_actions + ba
                if config.value_source == "prob":
                    vals = policy.probs()[bs, ba]
                else:
                    bn = np.concatenate(([s2], buffer.next_states[idx]))
                    vals = config.gamma * policy.values[bn]
                r_int = first_record_reward(config.method, emb_table[codes], vals, config.k, config.centroid)
            terminal = bool(env.terminal[s2])
            buffer.add(s, a, s2, r_ext + config.beta * r_int, terminal)
            t_global += 1
            if t_global % config.t_up == 0 and buffer.size >= config.batch_size:
                idx = buffer.sample_indices(config.batch_size, upd_rng)
                if config.diagnostics:
                    log.losses.append(_window_losses(buffer, idx, n_actions, config.eta))
                update(policy, {name: getattr(buffer, name)[idx] for name in ReplayBuffer.FIELDS})
            ep_ret += r_ext
            ep_int.append(r_int)
            trace.append(s * n_actions + a)
            s = s2
            if done or t_global >= config.total_steps:
                break
        if not done and log.returns:
            break  # budget ran out mid-episode; the partial episode is not logged
        log.returns.append(ep_ret)
        log.successes.append(bool(env.terminal[s]))
        log.steps.append(len(trace))
        log.intrinsic_means.append(float(np.mean(ep_int)))
        if record_traces:
            log.traces.append(np.asarray(trace, dtype=np.int32))
    log.policy = policy
    return log
