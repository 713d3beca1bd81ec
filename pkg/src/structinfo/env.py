"""Small deterministic MDPs: the six-state fixture and character-map gridworlds.

Figure-1 fixture wiring (states s0..s5, actions a0..a3). Only the s2<->s5
bounce under a3 is fixed by the source figure; the rest is our choice:

    s0: a0,a1,a3 -> s1   a2 -> s3
    s1: a0,a1 -> s2      a2 -> s5      a3 -> s1
    s2: a0,a1 -> s4      a2 -> s3      a3 -> s5   (redundant)
    s5: a0,a1 -> s4      a2 -> s3      a3 -> s2   (redundant)
    s3: a0,a1 -> s4      a2 -> s1      a3 -> s3
    s4: a0,a1 -> s0      a2 -> s3      a3 -> s2

Entering s0 pays 1 and ends the episode. s2 and s5 behave identically, as do
a0 and a1, which is what lets the state-action space collapse.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

ACTIONS = ((-1, 0), (0, 1), (1, 0), (0, -1))  # N, E, S, W


class EnvError(ValueError):
    pass


@dataclass(frozen=True)
class Mdp:
    """Tabular MDP. ``transitions[s, a]`` is a distribution over next states."""

    name: str
    transitions: np.ndarray
    rewards: np.ndarray
    start: int
    terminal: np.ndarray
    step_cap: int
    coords: np.ndarray
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        p = self.transitions
        if p.ndim != 3 or p.shape[0] != p.shape[2]:
            raise EnvError("transitions must have shape (S, A, S)")
        if np.any(p < 0) or np.any(np.abs(p.sum(axis=2) - 1.0) > 1e-12):
            raise EnvError("transition rows must be distributions")
        if self.rewards.shape != p.shape or not np.all(np.isfinite(self.rewards)):
            raise EnvError("rewards must be finite with shape (S, A, S)")
        if not 0 <= self.start < p.shape[0]:
            raise EnvError("start state out of range")
        if self.coords.shape != (p.shape[0], 2):
            raise EnvError("coords must be (S, 2)")
        # fast path for deterministic tables
        det = np.argmax(p, axis=2)
        object.__setattr__(self, "_det", det if np.all(p.max(axis=2) == 1.0) else None)

    @property
    def n_states(self) -> int:
        return self.transitions.shape[0]

    @property
    def n_actions(self) -> int:
        return self.transitions.shape[1]

    def embedding(self, state: int, action: int) -> np.ndarray:
        return np.concatenate([self.coords[state], np.eye(self.n_actions)[action]])

    def embedding_table(self) -> np.ndarray:
        """``(S * A, 2 + A)`` embeddings indexed by ``s * A + a``."""
        return np.array([self.embedding(s, a) for s in range(self.n_states) for a in range(self.n_actions)])


def reset(mdp: Mdp) -> int:
    return mdp.start


def step(mdp: Mdp, state: int, action: int, rng: np.random.Generator | None = None,
         t: int = 0) -> tuple[int, float, bool]:
    """Advance one step; ``t`` is the index of this step within the episode."""
    if not 0 <= action < mdp.n_actions:
        raise EnvError(f"action {action} out of range")
    if not 0 <= state < mdp.n_states:
        raise EnvError(f"state {state} out of range")
    if mdp._det is not None:
        nxt = int(mdp._det[state, action])
    else:
        if rng is None:
            raise EnvError("stochastic transitions need an rng")
        nxt = int(rng.choice(mdp.n_states, p=mdp.transitions[state, action]))
    reward = float(mdp.rewards[state, action, nxt])
    done = bool(mdp.terminal[nxt]) or t + 1 >= mdp.step_cap
    return nxt, reward, done


def _deterministic(next_state: np.ndarray) -> np.ndarray:
    s, a = next_state.shape
    p = np.zeros((s, a, s))
    p[np.arange(s)[:, None], np.arange(a)[None, :], next_state] = 1.0
    return p


def figure1_mdp() -> Mdp:
    nxt = np.array([
        [1, 1, 3, 1],
        [2, 2, 5, 1],
        [4, 4, 3, 5],
        [4, 4, 1, 3],
        [0, 0, 3, 2],
        [4, 4, 3, 2],
    ])
    p = _deterministic(nxt)
    r = np.zeros_like(p)
    r[:, :, 0] = 1.0
    terminal = np.zeros(6, dtype=bool)
    terminal[0] = True
    # layout: s0 s1 s2 on the top row, s3 s4 s5 below (s5 under s2)
    coords = np.array([[0, 0], [0, 0.5], [0, 1], [1, 0], [1, 0.5], [1, 1]], dtype=float)
    return Mdp("figure1", p, r, 0, terminal, 50, coords, tuple(f"s{i}" for i in range(6)))


@dataclass(frozen=True)
class GridworldSpec:
    width: int
    height: int
    walls: frozenset
    start: tuple[int, int]
    goal: tuple[int, int]
    key: tuple[int, int] | None = None
    door: tuple[int, int] | None = None
    name: str = "grid"

    def __post_init__(self):
        cells = {self.start, self.goal} | {c for c in (self.key, self.door) if c is not None}
        for r, c in cells | set(self.walls):
            if not (0 <= r < self.height and 0 <= c < self.width):
                raise EnvError(f"cell {(r, c)} outside the {self.height}x{self.width} grid")
        if self.start in self.walls:
            raise EnvError("start cell is a wall")
        if self.goal in self.walls:
            raise EnvError("goal cell is a wall")
        if (self.key is None) != (self.door is None):
            raise EnvError("key and door come together")


def parse_map(text: str, name: str = "grid") -> GridworldSpec:
    """Character map: ``#`` wall, ``.`` floor, ``S`` start, ``G`` goal, ``K`` key, ``D`` door."""
    # comment lines start with "# " (hash, space); map rows never contain spaces
    rows = [ln.rstrip() for ln in text.splitlines() if ln.strip() and not ln.startswith("# ")]
    if not rows:
        raise EnvError("empty map")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise EnvError("map rows have unequal length")
    walls, marks = set(), {}
    for r, row in enumerate(rows):
        for c, ch in enumerate(row):
            if ch == "#":
                walls.add((r, c))
            elif ch in "SGKD":
                if ch in marks:
                    raise EnvError(f"duplicate '{ch}' in map")
                marks[ch] = (r, c)
            elif ch != ".":
                raise EnvError(f"unknown map character {ch!r}")
    for ch in "SG":
        if ch not in marks:
            raise EnvError(f"map has no '{ch}' cell")
    return GridworldSpec(width, len(rows), frozenset(walls), marks["S"], marks["G"],
                         marks.get("K"), marks.get("D"), name)


def load_map(name_or_path: str) -> GridworldSpec:
    """Built-in map by name (``empty5``, ``fourrooms9``, ``doorkey6``) or a file path."""
    builtin = resources.files("structinfo") / "maps" / f"{name_or_path}.txt"
    if builtin.is_file():
        return parse_map(builtin.read_text(), name_or_path)
    path = Path(name_or_path)
    if not path.is_file():
        raise EnvError(f"no such map: {name_or_path}")
    return parse_map(path.read_text(), path.stem)


def _move(spec: GridworldSpec, cell, action, has_key):
    dr, dc = ACTIONS[action]
    r, c = cell[0] + dr, cell[1] + dc
    if not (0 <= r < spec.height and 0 <= c < spec.width) or (r, c) in spec.walls:
        return cell, has_key
    if (r, c) == spec.door and not has_key:
        return cell, has_key
    return (r, c), has_key or (r, c) == spec.key


def shortest_path_length(spec: GridworldSpec) -> int | None:
    """Breadth-first search over (cell, has_key) from start to goal."""
    start = (spec.start, spec.start == spec.key)
    seen = {start: 0}
    queue = deque([start])
    while queue:
        cell, key = queue.popleft()
        if cell == spec.goal:
            return seen[(cell, key)]
        for a in range(4):
            nxt = _move(spec, cell, a, key)
            if nxt not in seen:
                seen[nxt] = seen[(cell, key)] + 1
                queue.append(nxt)
    return None


def gridworld(spec: GridworldSpec) -> Mdp:
    if shortest_path_length(spec) is None:
        raise EnvError("goal is unreachable from start")
    cells = [(r, c) for r in range(spec.height) for c in range(spec.width) if (r, c) not in spec.walls]
    keys = (False, True) if spec.key is not None else (False,)
    index = {(cell, k): i for i, (k, cell) in enumerate((k, cell) for k in keys for cell in cells)}
    n = len(index)
    nxt = np.zeros((n, 4), dtype=int)
    for (cell, k), i in index.items():
        for a in range(4):
            nxt[i, a] = index[_move(spec, cell, a, k)]
    p = _deterministic(nxt)
    terminal = np.zeros(n, dtype=bool)
    for (cell, k), i in index.items():
        terminal[i] = cell == spec.goal
    r = np.zeros_like(p)
    r[:, :, terminal] = 1.0
    coords = np.zeros((n, 2))
    for (cell, _), i in index.items():
        coords[i] = (cell[0] / max(spec.height - 1, 1), cell[1] / max(spec.width - 1, 1))
    labels = tuple(f"{cell[0]},{cell[1]}{'+k' if k else ''}" for (cell, k) in index)
    return Mdp(spec.name, p, r, index[(spec.start, spec.start == spec.key)], terminal,
               4 * spec.width * spec.height, coords, labels)


def make_env(name: str) -> Mdp:
    if name == "figure1":
        return figure1_mdp()
    return gridworld(load_map(name))
