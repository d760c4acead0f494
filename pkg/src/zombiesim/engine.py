"""One simulation run: promote, interact, move, record, once per simulated hour."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import _kernels as K
from .behavior import BehaviorTable, InteractionOutcome, resolve_interaction
from .intervention import PolicyKind, ScenarioPolicy
from .movement import MovementParams, full_mask_table
from .worldmap import GridWorld

__all__ = [
    "AgentStatus",
    "Winner",
    "Termination",
    "SimState",
    "RunOutcome",
    "InvariantError",
    "init_run",
    "resolve_cell_interactions",
    "step",
    "check_termination",
    "run",
    "TRAJECTORY_COLUMNS",
]

# Offsets beyond this radius (rare: humans stay near home) use the slow path.
TABLE_RADIUS = 20
DEFAULT_MAX_STEPS = 2000
TRAJECTORY_COLUMNS = ("step", "healthy", "incubating", "zombies", "dead_zombies")


class AgentStatus(enum.IntEnum):
    HEALTHY = K.HEALTHY
    INCUBATING = K.INCUBATING
    ZOMBIE = K.ZOMBIE
    DEAD_ZOMBIE = K.DEAD


class Winner(str, enum.Enum):
    HUMANS = "Humans"
    ZOMBIES = "Zombies"
    UNRESOLVED = "Unresolved"


class Termination(enum.Enum):
    ONGOING = "Ongoing"
    HUMANS_WIN = "HumansWin"
    ZOMBIES_WIN = "ZombiesWin"


class InvariantError(RuntimeError):
    pass


@dataclass(frozen=True)
class _WorldArrays:
    width: int
    n_cells: int
    masks: np.ndarray
    quarantine: np.ndarray
    has_quarantine: bool


def _world_arrays(world: GridWorld) -> _WorldArrays:
    cached = world.__dict__.get("_kernel_arrays")
    if cached is None:
        cached = _WorldArrays(
            width=world.width,
            n_cells=world.width * world.height,
            masks=np.ascontiguousarray(world.neighbor_masks().ravel()),
            quarantine=np.ascontiguousarray(world.quarantine.ravel()),
            has_quarantine=bool(world.quarantine.any()),
        )
        object.__setattr__(world, "_kernel_arrays", cached)
    return cached


@lru_cache(maxsize=8)
def _human_table(params: MovementParams) -> np.ndarray:
    return full_mask_table(TABLE_RADIUS, params)


_ZOMBIE_TABLE = K.zombie_cdf_table()


@dataclass
class SimState:
    """Mutable state of one run.  Agent arrays are indexed by agent id.

    Humans get ids in cell order (row-major), the initial zombie comes last.
    """

    step: int
    px: np.ndarray
    py: np.ndarray
    hx: np.ndarray
    hy: np.ndarray
    status: np.ndarray
    infected_at: np.ndarray
    rng: np.random.Generator
    policy: ScenarioPolicy
    incubation_steps: int = 1
    counts: np.ndarray = field(default_factory=lambda: np.zeros(5, dtype=np.int64))
    first_border_step: int | None = None
    track_border: bool = True
    trajectory: list[tuple[int, int, int, int, int]] = field(default_factory=list)

    @property
    def n_agents(self) -> int:
        return self.status.shape[0]

    @property
    def healthy(self) -> int:
        return int(self.counts[0])

    @property
    def incubating(self) -> int:
        return int(self.counts[1])

    @property
    def zombies(self) -> int:
        return int(self.counts[2])

    @property
    def dead_zombies(self) -> int:
        return int(self.counts[3])

    @property
    def infected_outside(self) -> int:
        """Zombies plus incubating humans standing outside the quarantine area."""
        return int(self.counts[4])

    def recount(self, world: GridWorld) -> None:
        arrays = _world_arrays(world)
        self.counts[:4] = np.bincount(self.status, minlength=4)[:4]
        live_infected = (self.status == K.INCUBATING) | (self.status == K.ZOMBIE)
        cells = self.py.astype(np.int64) * arrays.width + self.px
        self.counts[4] = int(np.count_nonzero(live_infected & ~arrays.quarantine[cells]))

    def occupancy(self, world: GridWorld) -> tuple[np.ndarray, np.ndarray]:
        """Per-cell (healthy, zombie+incubating) counts as ``[y, x]`` grids."""
        arrays = _world_arrays(world)
        h = np.empty(arrays.n_cells, dtype=np.int64)
        z = np.empty(arrays.n_cells, dtype=np.int64)
        K.cell_counts(self.status, self.px, self.py, arrays.width, arrays.n_cells, h, z)
        shape = (world.height, world.width)
        return h.reshape(shape), z.reshape(shape)

    def cell_index(self) -> dict[tuple[int, int], list[int]]:
        """Cell -> ids of the live agents standing there (slow; for inspection)."""
        out: dict[tuple[int, int], list[int]] = {}
        live = np.flatnonzero(self.status != K.DEAD)
        for i in live.tolist():
            out.setdefault((int(self.px[i]), int(self.py[i])), []).append(i)
        return out

    def copy(self) -> "SimState":
        rng = np.random.Generator(type(self.rng.bit_generator)())
        rng.bit_generator.state = self.rng.bit_generator.state
        return SimState(
            step=self.step, px=self.px.copy(), py=self.py.copy(), hx=self.hx.copy(), hy=self.hy.copy(),
            status=self.status.copy(), infected_at=self.infected_at.copy(), rng=rng, policy=self.policy,
            incubation_steps=self.incubation_steps, counts=self.counts.copy(),
            first_border_step=self.first_border_step, track_border=self.track_border,
            trajectory=list(self.trajectory),
        )

    def _record(self) -> None:
        self.trajectory.append((self.step, *(int(c) for c in self.counts[:4])))


@dataclass
class RunOutcome:
    winner: Winner
    end_step: int
    peak_zombies: int
    first_border_step: int | None
    trajectory: np.ndarray  # (end_step + 1, 5) with TRAJECTORY_COLUMNS
    run_id: int = 0
    seed: int | None = None


def init_run(
    world: GridWorld, policy: ScenarioPolicy, seed: int | np.random.Generator, incubation_steps: int = 1
) -> SimState:
    if incubation_steps < 1:
        raise ValueError("incubation_steps must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pop = world.population.ravel()
    n_humans = int(pop.sum())
    cells = np.repeat(np.arange(pop.size, dtype=np.int64), pop)
    xs = np.append(cells % world.width, world.origin.x).astype(np.int16)
    ys = np.append(cells // world.width, world.origin.y).astype(np.int16)
    status = np.zeros(n_humans + 1, dtype=np.int8)
    status[-1] = K.ZOMBIE
    state = SimState(
        step=0, px=xs, py=ys, hx=xs.copy(), hy=ys.copy(), status=status,
        infected_at=np.zeros(n_humans + 1, dtype=np.int32), rng=rng, policy=policy,
        incubation_steps=incubation_steps,
        track_border=_world_arrays(world).has_quarantine,
    )
    state.recount(world)
    state._record()
    return state


def resolve_cell_interactions(state: SimState, cell: Sequence[int], table: BehaviorTable) -> SimState:
    """Reference (pure Python) resolution of one cell; same draw order as the kernel."""
    x, y = cell
    here = (state.px == x) & (state.py == y)
    zombies = np.flatnonzero(here & (state.status == K.ZOMBIE)).tolist()
    humans = np.flatnonzero(here & (state.status == K.HEALTHY)).tolist()
    hour = state.step + 1
    for z in zombies:
        for h in humans:
            if state.status[h] != K.HEALTHY:
                continue
            outcome = resolve_interaction(state.rng, table)
            if outcome is InteractionOutcome.ZOMBIE_KILLED:
                state.status[z] = K.DEAD
                state.counts[2] -= 1
                state.counts[3] += 1
                break
            if outcome is InteractionOutcome.HUMAN_INFECTED:
                state.status[h] = K.INCUBATING
                state.infected_at[h] = hour
                state.counts[0] -= 1
                state.counts[1] += 1
    return state


def step(
    state: SimState,
    world: GridWorld,
    table: BehaviorTable = BehaviorTable(),
    params: MovementParams = MovementParams(),
) -> SimState:
    """Advance one hour in place.  The hour being simulated is ``state.step + 1``."""
    arrays = _world_arrays(world)
    hour = state.step + 1
    expected = state.counts[:4].copy()

    promoted = K.promote(state.status, state.infected_at, hour, state.incubation_steps)
    expected[1] -= promoted
    expected[2] += promoted

    killed, infected = K.interaction_phase(
        state.rng, state.status, state.infected_at, state.px, state.py,
        arrays.width, arrays.n_cells, hour, table.as_array(),
    )
    expected += (-infected, infected, -killed, killed)

    policy = state.policy
    border_kills = K.movement_phase(
        state.rng, state.status, state.px, state.py, state.hx, state.hy,
        arrays.width, arrays.masks, arrays.quarantine, _ZOMBIE_TABLE, _human_table(params),
        TABLE_RADIUS, params.as_array(), int(policy.kind), policy.active(hour),
        float(policy.leak_probability), state.counts,
    )
    expected += (0, 0, -border_kills, border_kills)

    if not np.array_equal(expected, state.counts[:4]) or int(state.counts[:4].sum()) != state.n_agents:
        raise InvariantError(
            f"hour {hour}: agent conservation violated: tracked {expected.tolist()}, "
            f"recounted {state.counts[:4].tolist()}, agents {state.n_agents}"
        )
    if state.track_border and state.first_border_step is None and state.infected_outside > 0:
        state.first_border_step = hour
    state.step = hour
    state._record()
    return state


def check_termination(state: SimState) -> Termination:
    if state.healthy == 0:
        return Termination.ZOMBIES_WIN
    if state.zombies == 0 and state.incubating == 0:
        return Termination.HUMANS_WIN
    policy = state.policy
    if policy.kind == PolicyKind.STRICT and state.step >= policy.activation_step and state.infected_outside == 0:
        return Termination.HUMANS_WIN
    return Termination.ONGOING


def check_positions(state: SimState, world: GridWorld) -> None:
    live = state.status != K.DEAD
    if not world.passable[state.py[live], state.px[live]].all():
        raise InvariantError(f"hour {state.step}: agent on an impassable cell")


def run(
    world: GridWorld,
    policy: ScenarioPolicy = ScenarioPolicy(),
    table: BehaviorTable = BehaviorTable(),
    params: MovementParams = MovementParams(),
    seed: int | np.random.Generator = 0,
    max_steps: int = DEFAULT_MAX_STEPS,
    incubation_steps: int = 1,
    on_step: Callable[[SimState], None] | None = None,
    validate: bool = False,
) -> RunOutcome:
    """Simulate until one side wins or ``max_steps`` hours have elapsed."""
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    state = init_run(world, policy, seed, incubation_steps)
    if on_step is not None:
        on_step(state)
    verdict = check_termination(state)
    while verdict is Termination.ONGOING and state.step < max_steps:
        step(state, world, table, params)
        if validate:
            check_positions(state, world)
        if on_step is not None:
            on_step(state)
        verdict = check_termination(state)

    winner = {
        Termination.HUMANS_WIN: Winner.HUMANS,
        Termination.ZOMBIES_WIN: Winner.ZOMBIES,
        Termination.ONGOING: Winner.UNRESOLVED,
    }[verdict]
    traj = np.array(state.trajectory, dtype=np.int64).reshape(-1, len(TRAJECTORY_COLUMNS))
    return RunOutcome(
        winner=winner,
        end_step=state.step,
        peak_zombies=int(traj[:, 3].max()),
        first_border_step=state.first_border_step,
        trajectory=traj,
        seed=seed if isinstance(seed, int) else None,
    )
