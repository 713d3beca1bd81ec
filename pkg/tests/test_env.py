from collections import deque

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from structinfo.env import (EnvError, figure1_mdp, gridworld, load_map, make_env, parse_map, reset,
                            shortest_path_length, step)

FOURROOMS_DOORWAYS = [(2, 4), (7, 4), (4, 2), (4, 6)]


def bfs_on_text(rows):
    """Grid distance from S to G treating only '#' as blocked (no keys)."""
    cells = {(r, c): ch for r, row in enumerate(rows) for c, ch in enumerate(row)}
    start = next(p for p, ch in cells.items() if ch == "S")
    goal = next(p for p, ch in cells.items() if ch == "G")
    dist = {start: 0}
    queue = deque([start])
    while queue:
        r, c = queue.popleft()
        for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nxt = (r + dr, c + dc)
            if cells.get(nxt, "#") != "#" and nxt not in dist:
                dist[nxt] = dist[(r, c)] + 1
                queue.append(nxt)
    return dist.get(goal)


def map_rows(name):
    from importlib import resources
    text = (resources.files("structinfo") / "maps" / f"{name}.txt").read_text()
    return [ln for ln in text.splitlines() if ln and not ln.startswith("# ")]


class TestFigure1:
    def test_state_action_space(self):
        mdp = figure1_mdp()
        assert mdp.n_states * mdp.n_actions == 24

    def test_redundant_bounce(self):
        mdp = figure1_mdp()
        assert step(mdp, 2, 3)[0] == 5
        assert step(mdp, 5, 3)[0] == 2

    def test_reset_and_goal(self):
        mdp = figure1_mdp()
        assert reset(mdp) == 0
        assert step(mdp, 4, 0) == (0, 1.0, True)
        assert mdp.step_cap == 50

    def test_embedding_is_coords_plus_one_hot(self):
        mdp = figure1_mdp()
        table = mdp.embedding_table()
        assert table.shape == (24, 6)
        assert np.array_equal(table[2 * 4 + 3], np.concatenate([mdp.coords[2], [0, 0, 0, 1]]))


class TestGridworld:
    def test_empty_room_shortest_path(self):
        assert shortest_path_length(load_map("empty5")) == 8

    def test_fourrooms_path_needs_a_doorway(self):
        rows = map_rows("fourrooms9")
        assert shortest_path_length(load_map("fourrooms9")) == bfs_on_text(rows) == 16
        blocked = [list(r) for r in rows]
        for r, c in FOURROOMS_DOORWAYS:
            assert blocked[r][c] == "."
            blocked[r][c] = "#"
        assert bfs_on_text(["".join(r) for r in blocked]) is None

    def test_door_without_key_is_a_no_op(self):
        spec = load_map("doorkey6")
        mdp = gridworld(spec)
        label = {lab: i for i, lab in enumerate(mdp.labels)}
        left_of_door = label["2,2"]
        assert step(mdp, left_of_door, 1)[0] == left_of_door
        assert step(mdp, label["2,2+k"], 1)[0] == label["2,3+k"]

    def test_doorkey_path_goes_through_key_and_door(self):
        rows = map_rows("doorkey6")
        walled = [r.replace("D", "#") for r in rows]
        assert bfs_on_text(walled) is None
        to_key = bfs_on_text([r.replace("G", ".").replace("K", "G") for r in rows])
        from_key = bfs_on_text([r.replace("S", ".").replace("K", "S") for r in rows])
        assert shortest_path_length(load_map("doorkey6")) == to_key + from_key == 9

    def test_step_cap(self):
        mdp = make_env("empty5")
        assert mdp.step_cap == 4 * 25
        assert step(mdp, mdp.start, 0, t=mdp.step_cap - 1)[2]

    def test_missing_map(self):
        with pytest.raises(EnvError):
            load_map("/no/such/map.txt")

    @pytest.mark.parametrize("text", ["", "S..\n..", "S.X\n..G", "...\n..G", "S#.\n##G", "S.K\n..G"])
    def test_invalid_maps(self, text):
        with pytest.raises(EnvError):
            gridworld(parse_map(text))

    def test_action_out_of_range(self):
        with pytest.raises(EnvError):
            step(make_env("empty5"), 0, 4)


@pytest.mark.parametrize("name", ["figure1", "empty5", "fourrooms9", "doorkey6"])
def test_random_walk_fuzz(name):
    mdp = make_env(name)
    rng = np.random.default_rng(0)
    s, t, ep_reward = reset(mdp), 0, 0.0
    for _ in range(1000):
        s2, r, done = step(mdp, s, int(rng.integers(mdp.n_actions)), t=t)
        assert 0 <= s2 < mdp.n_states and r in (0.0, 1.0)
        ep_reward += r
        t += 1
        assert t <= mdp.step_cap
        s = s2
        if done:
            assert ep_reward in (0.0, 1.0)
            s, t, ep_reward = reset(mdp), 0, 0.0


@given(st.lists(st.integers(0, 3), min_size=1, max_size=60))
def test_same_actions_same_trajectory(actions):
    mdp = make_env("fourrooms9")

    def rollout():
        s, out = reset(mdp), []
        for t, a in enumerate(actions):
            s, r, done = step(mdp, s, a, t=t)
            out.append((s, r, done))
            if done:
                break
        return out

    assert rollout() == rollout()
