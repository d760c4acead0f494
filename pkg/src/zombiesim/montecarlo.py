"""Batches of independent runs with scheduling-independent seeding."""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .behavior import BehaviorTable
from .engine import DEFAULT_MAX_STEPS, RunOutcome, Winner, run
from .intervention import ScenarioPolicy
from .movement import MovementParams
from .worldmap import GridWorld

__all__ = ["BatchConfig", "BatchSummary", "mix_seed", "mix_seeds", "run_one", "run_batch", "aggregate"]

log = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    z = (x + _GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(base_seed: int, run_index: int) -> int:
    """64-bit stream seed for run ``run_index``: splitmix64(splitmix64(base) XOR index).

    The splitmix64 finaliser is a bijection on 64-bit words, so distinct
    indices below 2**64 never share a seed under one base seed.
    """
    return _splitmix64(_splitmix64(base_seed & _MASK64) ^ (run_index & _MASK64))


def mix_seeds(base_seed: int, run_indices: np.ndarray) -> np.ndarray:
    """Vectorised :func:`mix_seed` over an index array (uint64 wraparound arithmetic)."""
    idx = np.asarray(run_indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (idx ^ np.uint64(_splitmix64(base_seed & _MASK64))) + np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class BatchConfig:
    world: GridWorld
    n_runs: int = 1000
    base_seed: int = 0
    policy: ScenarioPolicy = ScenarioPolicy()
    behavior: BehaviorTable = BehaviorTable()
    movement: MovementParams = MovementParams()
    max_steps: int = DEFAULT_MAX_STEPS
    incubation_steps: int = 1
    max_parallel_runs: int = 1
    trajectory_stride: int = 1
    validate: bool = False

    def __post_init__(self):
        if self.n_runs < 0:
            raise ValueError("n_runs must be >= 0")
        if self.max_parallel_runs < 1:
            raise ValueError("max_parallel_runs must be >= 1")
        if self.trajectory_stride < 1:
            raise ValueError("trajectory_stride must be >= 1")


@dataclass
class BatchSummary:
    outcomes: list[RunOutcome] = field(default_factory=list)
    counts: dict[Winner, int] = field(default_factory=lambda: {w: 0 for w in Winner})
    hours_to_win: dict[Winner, list[int]] = field(default_factory=lambda: {Winner.HUMANS: [], Winner.ZOMBIES: []})
    first_border_steps: list[int | None] = field(default_factory=list)
    peak_zombies: list[int] = field(default_factory=list)
    histograms: dict[str, dict[int, int]] = field(default_factory=dict)
    zombie_envelope: np.ndarray = field(default_factory=lambda: np.zeros((0, 4), dtype=np.int64))

    @property
    def n_runs(self) -> int:
        return len(self.outcomes)

    @property
    def unresolved(self) -> int:
        return self.counts[Winner.UNRESOLVED]

    def fraction(self, winner: Winner) -> float:
        return self.counts[winner] / self.n_runs if self.n_runs else float("nan")


def _thin(traj: np.ndarray, stride: int) -> np.ndarray:
    if stride == 1:
        return traj
    keep = np.zeros(len(traj), dtype=bool)
    keep[::stride] = True
    keep[-1] = True
    return traj[keep]


def run_one(cfg: BatchConfig, run_index: int) -> RunOutcome:
    seed = mix_seed(cfg.base_seed, run_index)
    out = run(
        cfg.world, cfg.policy, cfg.behavior, cfg.movement, seed=seed, max_steps=cfg.max_steps,
        incubation_steps=cfg.incubation_steps, validate=cfg.validate,
    )
    out.run_id = run_index
    out.trajectory = _thin(out.trajectory, cfg.trajectory_stride)
    return out


_worker_cfg: BatchConfig | None = None


def _init_worker(cfg: BatchConfig) -> None:
    global _worker_cfg
    _worker_cfg = cfg


def _worker_run(run_index: int) -> RunOutcome:
    assert _worker_cfg is not None
    return run_one(_worker_cfg, run_index)


def run_batch(cfg: BatchConfig) -> BatchSummary:
    """Run ``cfg.n_runs`` independent simulations; output never depends on parallelism."""
    indices = range(cfg.n_runs)
    outcomes: list[RunOutcome] = []
    if cfg.max_parallel_runs == 1 or cfg.n_runs <= 1:
        for i in indices:
            outcomes.append(run_one(cfg, i))
            _log_run(outcomes[-1], cfg.n_runs)
    else:
        with ProcessPoolExecutor(
            max_workers=min(cfg.max_parallel_runs, cfg.n_runs), initializer=_init_worker, initargs=(cfg,)
        ) as pool:
            for out in pool.map(_worker_run, indices):
                outcomes.append(out)
                _log_run(out, cfg.n_runs)
    return aggregate(outcomes)


def _log_run(out: RunOutcome, n_runs: int) -> None:
    log.info("run %d/%d: %s at step %d (peak zombies %d)",
             out.run_id + 1, n_runs, out.winner.value, out.end_step, out.peak_zombies)


def _histogram(values) -> dict[int, int]:
    return dict(sorted(Counter(values).items()))


def aggregate(outcomes) -> BatchSummary:
    """Summary statistics; input order is irrelevant (runs are sorted by id)."""
    outs = sorted(outcomes, key=lambda o: o.run_id)
    s = BatchSummary(outcomes=outs)
    for o in outs:
        s.counts[o.winner] += 1
        if o.winner is not Winner.UNRESOLVED:
            s.hours_to_win[o.winner].append(o.end_step)
        s.first_border_steps.append(o.first_border_step)
        s.peak_zombies.append(o.peak_zombies)
    s.histograms = {
        "hours_to_win_humans": _histogram(s.hours_to_win[Winner.HUMANS]),
        "hours_to_win_zombies": _histogram(s.hours_to_win[Winner.ZOMBIES]),
        "first_border_step": _histogram(v for v in s.first_border_steps if v is not None),
        "peak_zombies_humans_won": _histogram(o.peak_zombies for o in outs if o.winner is Winner.HUMANS),
    }
    s.zombie_envelope = _envelope(outs)
    return s


def _envelope(outs: list[RunOutcome]) -> np.ndarray:
    """Per step: (step, min, median, max) of live zombies over runs still going at that step."""
    by_step: dict[int, list[int]] = {}
    for o in outs:
        for row in o.trajectory:
            by_step.setdefault(int(row[0]), []).append(int(row[3]))
    rows = [(t, min(v), int(np.median(v)), max(v)) for t, v in sorted(by_step.items())]
    return np.array(rows, dtype=np.int64).reshape(-1, 4)


def with_runs(cfg: BatchConfig, n_runs: int) -> BatchConfig:
    return replace(cfg, n_runs=n_runs)
