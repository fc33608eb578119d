"""Full-state scripted controller for the doorkey task.

Shortest-path oracle used to certify layout solvability; sees the whole grid,
so it is a test fixture, not a fair agent.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from ..envs.doorkey import (
    Cell,
    DIR_VECS,
    DoorKeyState,
    FORWARD,
    PICKUP,
    TOGGLE,
    TURN_LEFT,
    TURN_RIGHT,
)

_PLAN_WALKABLE = (Cell.EMPTY, Cell.DOOR_OPEN, Cell.GOAL)


def _find(grid: np.ndarray, cell: Cell) -> tuple[int, int] | None:
    ys, xs = np.where(grid == cell)
    if len(xs) == 0:
        return None
    return int(xs[0]), int(ys[0])


def _first_action(state: DoorKeyState, face: tuple[int, int] | None = None,
                  reach: tuple[int, int] | None = None) -> int:
    """BFS over (pos, dir) with moves {forward, turn left, turn right}."""
    grid = state.grid

    def done(x: int, y: int, d: int) -> bool:
        if reach is not None:
            return (x, y) == reach
        dx, dy = DIR_VECS[d]
        return (x + dx, y + dy) == face

    start = (*state.agent_pos, state.agent_dir)
    queue = deque([start])
    first_move: dict[tuple[int, int, int], int] = {start: -1}
    while queue:
        x, y, d = queue.popleft()
        if done(x, y, d):
            return first_move[(x, y, d)]
        dx, dy = DIR_VECS[d]
        nxt = []
        if Cell(grid[y + dy, x + dx]) in _PLAN_WALKABLE:
            nxt.append(((x + dx, y + dy, d), FORWARD))
        nxt.append(((x, y, (d - 1) % 4), TURN_LEFT))
        nxt.append(((x, y, (d + 1) % 4), TURN_RIGHT))
        for node, move in nxt:
            if node not in first_move:
                first_move[node] = first_move[(x, y, d)] if first_move[(x, y, d)] != -1 else move
                queue.append(node)
    raise RuntimeError("no path found; layout violates solvability invariants")


def scripted_doorkey_action(state: DoorKeyState) -> int:
    """Next action toward key, then door, then goal."""
    grid = state.grid
    if not state.has_key:
        key = _find(grid, Cell.KEY)
        dx, dy = DIR_VECS[state.agent_dir]
        ax, ay = state.agent_pos
        if (ax + dx, ay + dy) == key:
            return PICKUP
        return _first_action(state, face=key)
    door = _find(grid, Cell.DOOR_LOCKED)
    if door is not None:
        dx, dy = DIR_VECS[state.agent_dir]
        ax, ay = state.agent_pos
        if (ax + dx, ay + dy) == door:
            return TOGGLE
        return _first_action(state, face=door)
    goal = _find(grid, Cell.GOAL)
    return _first_action(state, reach=goal)
