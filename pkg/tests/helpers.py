"""Shared test utilities: hand-built states and a pure-Python step oracle."""

from __future__ import annotations

import numpy as np

from zombiesim import _kernels as K
from zombiesim.behavior import BehaviorTable
from zombiesim.engine import SimState, resolve_cell_interactions
from zombiesim.intervention import AgentKind, CrossingVerdict, ScenarioPolicy, adjudicate_crossing
from zombiesim.movement import MovementParams, _mask_at, _pick, substep_weights
from zombiesim.worldmap import DIRECTIONS, GridWorld


def make_state(world: GridWorld, agents, seed=0, policy=ScenarioPolicy(), step=0) -> SimState:
    """``agents`` is a list of (x, y, home_x, home_y, status)."""
    a = np.array(agents, dtype=np.int64).reshape(-1, 5)
    state = SimState(
        step=step,
        px=a[:, 0].astype(np.int16), py=a[:, 1].astype(np.int16),
        hx=a[:, 2].astype(np.int16), hy=a[:, 3].astype(np.int16),
        status=a[:, 4].astype(np.int8),
        infected_at=np.full(len(a), step, dtype=np.int32),
        rng=np.random.default_rng(seed), policy=policy,
        track_border=bool(world.quarantine.any()),
    )
    state.recount(world)
    state._record()
    return state


def crowd(world: GridWorld, n, pos, home, status, seed=0, policy=ScenarioPolicy()) -> SimState:
    """``n`` agents sharing a position, home and status, built without Python loops."""
    state = make_state(world, [(*pos, *home, status)], seed=seed, policy=policy)
    for name in ("px", "py", "hx", "hy", "status", "infected_at"):
        setattr(state, name, np.repeat(getattr(state, name), n))
    state.recount(world)
    state.trajectory.clear()
    state._record()
    return state


def _kind(status) -> AgentKind:
    return {K.HEALTHY: AgentKind.HUMAN, K.INCUBATING: AgentKind.INCUBATING, K.ZOMBIE: AgentKind.ZOMBIE}[int(status)]


def _attempt(state, world, i, weights, hour):
    """One substep for agent i with the given direction weights; returns False if killed."""
    if not any(w > 0 for w in weights):
        return True
    k = _pick(weights, state.rng.random())
    src = (int(state.px[i]), int(state.py[i]))
    dst = (src[0] + DIRECTIONS[k][0], src[1] + DIRECTIONS[k][1])
    verdict = adjudicate_crossing(state.policy, hour, _kind(state.status[i]), src, dst, world, state.rng)
    if verdict == CrossingVerdict.ALLOW:
        state.px[i], state.py[i] = dst
    elif verdict == CrossingVerdict.KILL:
        state.status[i] = K.DEAD
        return False
    return True


def reference_step(state: SimState, world: GridWorld, table=BehaviorTable(), params=MovementParams()) -> SimState:
    """Straightforward re-implementation of one hour, consuming draws like the engine."""
    hour = state.step + 1
    due = (state.status == K.INCUBATING) & (state.infected_at + state.incubation_steps <= hour)
    state.status[due] = K.ZOMBIE
    state.recount(world)

    zombie_cells = sorted(
        {(int(state.py[i]), int(state.px[i])) for i in np.flatnonzero(state.status == K.ZOMBIE)}
    )
    for y, x in zombie_cells:
        resolve_cell_interactions(state, (x, y), table)

    for i in range(state.n_agents):
        s = state.status[i]
        if s == K.DEAD:
            continue
        if s == K.HEALTHY:
            for _ in range(2):
                pos = (int(state.px[i]), int(state.py[i]))
                w = substep_weights(int(state.hx[i]) - pos[0], int(state.hy[i]) - pos[1], _mask_at(world, pos), params)
                _attempt(state, world, i, w, hour)
        else:
            mask = _mask_at(world, (int(state.px[i]), int(state.py[i])))
            n = bin(mask).count("1")
            _attempt(state, world, i, [1.0 / n if mask >> k & 1 else 0.0 for k in range(8)] if n else [0.0] * 8, hour)

    state.recount(world)
    if state.track_border and state.first_border_step is None and state.infected_outside > 0:
        state.first_border_step = hour
    state.step = hour
    state._record()
    return state


# One line per acceptance criterion; echoed again in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def acceptance_line(number: int, ok: bool, text: str) -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {text}"
    ACCEPTANCE_LINES.append(line)
    return line
