"""8x8 gridworld with a locked door: find the key, open the door, reach the goal.

A wall column containing a single locked door separates the agent/key region
from the goal region. Observations are a 7x7x3 byte egocentric view with the
agent at the bottom-center facing up; cells behind walls or the locked door
are occluded. Reward is -0.01 per step and +1 on reaching the goal; episodes
fail after 1000 steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import EpisodeDoneError

GRID_SIZE = 8
VIEW_SIZE = 7
MAX_STEPS = 1000

TURN_LEFT = 0
TURN_RIGHT = 1
FORWARD = 2
PICKUP = 3
TOGGLE = 4
N_ACTIONS = 5

# (dx, dy) per direction 0..3
DIR_VECS = ((0, -1), (1, 0), (0, 1), (-1, 0))  # N, E, S, W


class Cell(IntEnum):
    EMPTY = 1
    WALL = 2
    KEY = 3
    DOOR_LOCKED = 4
    DOOR_OPEN = 5
    GOAL = 6


# Egocentric view channel 0 object ids (0 is reserved for unseen/occluded).
EGO_OBJECT_ID = {
    Cell.EMPTY: 1,
    Cell.WALL: 2,
    Cell.KEY: 3,
    Cell.DOOR_LOCKED: 4,
    Cell.DOOR_OPEN: 4,
    Cell.GOAL: 5,
}
# Channel 1 carries door state: 1 locked, 0 open; other cells 0.
EGO_STATE = {Cell.DOOR_LOCKED: 1}

_WALKABLE = (Cell.EMPTY, Cell.DOOR_OPEN, Cell.GOAL)
_OPAQUE = (Cell.WALL, Cell.DOOR_LOCKED)


@dataclass
class DoorKeyState:
    grid: np.ndarray  # (8, 8) uint8 of Cell values, indexed [y, x]
    agent_pos: tuple[int, int]  # (x, y)
    agent_dir: int  # 0=N 1=E 2=S 3=W
    has_key: bool
    step_count: int

    def copy(self) -> "DoorKeyState":
        return DoorKeyState(
            self.grid.copy(), self.agent_pos, self.agent_dir, self.has_key, self.step_count
        )


def generate_layout(seed: int) -> DoorKeyState:
    """Sample a solvable layout: wall column, door row, key/agent left, goal right."""
    rng = np.random.default_rng(seed)
    grid = np.full((GRID_SIZE, GRID_SIZE), Cell.WALL, dtype=np.uint8)
    grid[1:-1, 1:-1] = Cell.EMPTY

    wall_col = int(rng.integers(2, GRID_SIZE - 2))  # keeps >=1 open column each side
    grid[:, wall_col] = Cell.WALL
    door_row = int(rng.integers(1, GRID_SIZE - 1))
    grid[door_row, wall_col] = Cell.DOOR_LOCKED

    left = [(x, y) for x in range(1, wall_col) for y in range(1, GRID_SIZE - 1)]
    right = [(x, y) for x in range(wall_col + 1, GRID_SIZE - 1) for y in range(1, GRID_SIZE - 1)]

    key_pos = left[int(rng.integers(len(left)))]
    agent_choices = [c for c in left if c != key_pos]
    agent_pos = agent_choices[int(rng.integers(len(agent_choices)))]
    agent_dir = int(rng.integers(4))
    goal_pos = right[int(rng.integers(len(right)))]

    grid[key_pos[1], key_pos[0]] = Cell.KEY
    grid[goal_pos[1], goal_pos[0]] = Cell.GOAL
    return DoorKeyState(grid, agent_pos, agent_dir, has_key=False, step_count=0)


class DoorKeyEnv:
    """Single-owner episode state machine over sampled or fixed layouts."""

    name = "doorkey"
    n_actions = N_ACTIONS
    obs_dim = VIEW_SIZE * VIEW_SIZE * 3
    default_action = FORWARD

    def __init__(self, fixed_layout_seed: int | None = None):
        self.fixed_layout_seed = fixed_layout_seed
        self.state: DoorKeyState | None = None
        self.done = True
        self.success = False
        self.return_centi = 0  # exact reward accounting in hundredths

    def reset(self, seed: int) -> np.ndarray:
        layout_seed = seed if self.fixed_layout_seed is None else self.fixed_layout_seed
        self.state = generate_layout(layout_seed)
        self.done = False
        self.success = False
        self.return_centi = 0
        return self.observation()

    def observation(self) -> np.ndarray:
        return render_egocentric(self.state)

    @property
    def step_count(self) -> int:
        return self.state.step_count

    @property
    def episode_return(self) -> float:
        return self.return_centi / 100.0

    def _front_cell(self) -> tuple[int, int]:
        dx, dy = DIR_VECS[self.state.agent_dir]
        x, y = self.state.agent_pos
        return x + dx, y + dy

    def step(self, action: int) -> tuple[np.ndarray, float, bool]:
        if self.done:
            raise EpisodeDoneError("doorkey episode already terminated")
        if not 0 <= action < N_ACTIONS:
            raise ValueError(f"invalid doorkey action: {action}")
        st = self.state
        reward_centi = -1

        if action == TURN_LEFT:
            st.agent_dir = (st.agent_dir - 1) % 4
        elif action == TURN_RIGHT:
            st.agent_dir = (st.agent_dir + 1) % 4
        elif action == FORWARD:
            fx, fy = self._front_cell()
            cell = Cell(st.grid[fy, fx])
            if cell in _WALKABLE:
                st.agent_pos = (fx, fy)
                if cell == Cell.GOAL:
                    reward_centi += 100
                    self.done = True
                    self.success = True
        elif action == PICKUP:
            fx, fy = self._front_cell()
            if st.grid[fy, fx] == Cell.KEY:
                st.has_key = True
                st.grid[fy, fx] = Cell.EMPTY
        elif action == TOGGLE:
            fx, fy = self._front_cell()
            if st.grid[fy, fx] == Cell.DOOR_LOCKED and st.has_key:
                st.grid[fy, fx] = Cell.DOOR_OPEN

        st.step_count += 1
        self.return_centi += reward_centi
        if st.step_count >= MAX_STEPS and not self.done:
            self.done = True
            self.success = False
        return self.observation(), reward_centi / 100.0, self.done


def _visibility(ego_cells: list[list[Cell | None]]) -> np.ndarray:
    """Flood visibility outward from the agent; opaque cells end propagation."""
    vis = np.zeros((VIEW_SIZE, VIEW_SIZE), dtype=bool)
    vis[VIEW_SIZE - 1, VIEW_SIZE // 2] = True  # agent anchor cell

    def see_through(j: int, i: int) -> bool:
        cell = ego_cells[j][i]
        return cell is not None and cell not in _OPAQUE

    for j in range(VIEW_SIZE - 1, -1, -1):
        for i in range(0, VIEW_SIZE - 1):
            if vis[j, i] and see_through(j, i):
                vis[j, i + 1] = True
                if j > 0:
                    vis[j - 1, i] = True
                    vis[j - 1, i + 1] = True
        for i in range(VIEW_SIZE - 1, 0, -1):
            if vis[j, i] and see_through(j, i):
                vis[j, i - 1] = True
                if j > 0:
                    vis[j - 1, i] = True
                    vis[j - 1, i - 1] = True
    return vis


def render_egocentric(state: DoorKeyState) -> np.ndarray:
    """7x7x3 uint8 view, agent at bottom-center facing up; occluded cells zero."""
    fx, fy = DIR_VECS[state.agent_dir]
    rx, ry = DIR_VECS[(state.agent_dir + 1) % 4]
    ax, ay = state.agent_pos

    ego_cells: list[list[Cell | None]] = []
    for j in range(VIEW_SIZE):
        row: list[Cell | None] = []
        forward = VIEW_SIZE - 1 - j
        for i in range(VIEW_SIZE):
            side = i - VIEW_SIZE // 2
            wx = ax + fx * forward + rx * side
            wy = ay + fy * forward + ry * side
            if 0 <= wx < GRID_SIZE and 0 <= wy < GRID_SIZE:
                row.append(Cell(state.grid[wy, wx]))
            else:
                row.append(None)
        ego_cells.append(row)

    vis = _visibility(ego_cells)
    view = np.zeros((VIEW_SIZE, VIEW_SIZE, 3), dtype=np.uint8)
    for j in range(VIEW_SIZE):
        for i in range(VIEW_SIZE):
            cell = ego_cells[j][i]
            if cell is None or not vis[j, i]:
                continue
            view[j, i, 0] = EGO_OBJECT_ID[cell]
            view[j, i, 1] = EGO_STATE.get(cell, 0)
    return view
