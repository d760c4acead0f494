"""Zombie uniform walk and the human two-substep, home-biased walk.

All samplers draw one uniform per substep and invert the cumulative
distribution in the fixed direction order E, NE, N, NW, W, SW, S, SE, so the
Python reference functions consume a random stream exactly like the engine
kernels do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .worldmap import DIRECTIONS, Cell, GridWorld

__all__ = [
    "MovementParams",
    "home_sector",
    "central_direction",
    "substep_weights",
    "human_substep_distribution",
    "move_human",
    "move_zombie",
    "full_mask_table",
]


@dataclass(frozen=True)
class MovementParams:
    base_weight: float = 0.125
    bias_per_km: float = 0.05
    bias_cap_distance: int = 12
    full_bias_distance: int = 13

    def __post_init__(self):
        if min(self.base_weight, self.bias_per_km, self.bias_cap_distance, self.full_bias_distance) < 0:
            raise ValueError("movement parameters must be non-negative")
        if 3 * self.base_weight + self.bias_cap_distance * self.bias_per_km > 1 + 1e-12:
            raise ValueError("home-sector mass exceeds 1 at the bias cap distance")
        if 5 * self.base_weight - self.bias_cap_distance * self.bias_per_km < -1e-12:
            raise ValueError("away-sector mass negative at the bias cap distance")
        if self.full_bias_distance <= self.bias_cap_distance:
            raise ValueError("full_bias_distance must exceed bias_cap_distance")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.base_weight, self.bias_per_km, self.bias_cap_distance, self.full_bias_distance],
            dtype=np.float64,
        )


def central_direction(dx: int, dy: int) -> int:
    """Direction index of the neighbour closest to a home at offset (dx, dy)."""
    best, best_d2 = 0, None
    for k, (ox, oy) in enumerate(DIRECTIONS):
        d2 = (dx - ox) ** 2 + (dy - oy) ** 2
        if best_d2 is None or d2 < best_d2:
            best, best_d2 = k, d2
    return best


def home_sector(current: Sequence[int], home: Sequence[int], world: GridWorld) -> tuple[list[Cell], list[Cell]]:
    """Return (geometric sector, available sector), central cell first."""
    cx, cy = current
    dx, dy = home[0] - cx, home[1] - cy
    if dx == 0 and dy == 0:
        raise ValueError("current cell is the home cell; no sector is defined")
    c = central_direction(dx, dy)
    sector = [Cell(cx + DIRECTIONS[k][0], cy + DIRECTIONS[k][1]) for k in (c, (c - 1) % 8, (c + 1) % 8)]
    return sector, [s for s in sector if world.is_passable(s)]


def substep_weights(dx: int, dy: int, mask: int, p: MovementParams) -> list[float]:
    """Probabilities over the 8 directions for a human whose home lies at offset (dx, dy).

    ``mask`` has bit k set when direction k is available.
    """
    avail = [bool(mask >> k & 1) for k in range(8)]
    n_avail = sum(avail)
    if n_avail == 0:
        return [0.0] * 8
    uniform = [1.0 / n_avail if a else 0.0 for a in avail]
    if dx == 0 and dy == 0:
        return uniform
    c = central_direction(dx, dy)
    in_sector = [False] * 8
    for k in (c, (c - 1) % 8, (c + 1) % 8):
        in_sector[k] = True
    h = sum(1 for k in range(8) if avail[k] and in_sector[k])
    a = n_avail - h
    x = math.isqrt(dx * dx + dy * dy)
    if h == 0:
        return uniform
    if x >= p.full_bias_distance:
        return [1.0 / h if avail[k] and in_sector[k] else 0.0 for k in range(8)]
    if a == 0:
        return uniform
    x = min(x, p.bias_cap_distance)
    p_home = (3 * p.base_weight + x * p.bias_per_km) / h
    p_away = (5 * p.base_weight - x * p.bias_per_km) / a
    return [(p_home if in_sector[k] else p_away) if avail[k] else 0.0 for k in range(8)]


def _mask_at(world: GridWorld, c: Sequence[int]) -> int:
    mask = 0
    for k, (ox, oy) in enumerate(DIRECTIONS):
        if world.is_passable((c[0] + ox, c[1] + oy)):
            mask |= 1 << k
    return mask


def human_substep_distribution(
    current: Sequence[int], home: Sequence[int], world: GridWorld, p: MovementParams = MovementParams()
) -> dict[Cell, float]:
    cx, cy = current
    w = substep_weights(home[0] - cx, home[1] - cy, _mask_at(world, current), p)
    dist = {Cell(cx + ox, cy + oy): wk for (ox, oy), wk in zip(DIRECTIONS, w) if wk > 0.0}
    return dist or {Cell(cx, cy): 1.0}


def _pick(weights: Sequence[float], u: float) -> int:
    acc = 0.0
    last = -1
    for k, w in enumerate(weights):
        if w <= 0.0:
            continue
        acc += w
        last = k
        if u < acc:
            return k
    return last  # u landed in rounding slack above the cumulative total


def _substep(rng: np.random.Generator, pos: Cell, weights: list[float]) -> Cell:
    if not any(weights):
        return pos
    k = _pick(weights, rng.random())
    return Cell(pos[0] + DIRECTIONS[k][0], pos[1] + DIRECTIONS[k][1])


def move_human(
    rng: np.random.Generator,
    position: Sequence[int],
    home: Sequence[int],
    world: GridWorld,
    p: MovementParams = MovementParams(),
) -> Cell:
    """Two sequential substeps, the distribution recomputed at the intermediate cell."""
    pos = Cell(*position)
    for _ in range(2):
        w = substep_weights(home[0] - pos.x, home[1] - pos.y, _mask_at(world, pos), p)
        pos = _substep(rng, pos, w)
    return pos


def move_zombie(rng: np.random.Generator, position: Sequence[int], world: GridWorld) -> Cell:
    pos = Cell(*position)
    mask = _mask_at(world, pos)
    n = bin(mask).count("1")
    if n == 0:
        return pos
    return _substep(rng, pos, [1.0 / n if mask >> k & 1 else 0.0 for k in range(8)])


def full_mask_table(radius: int, p: MovementParams) -> np.ndarray:
    """Cumulative substep weights for every home offset within ``radius``, all 8 neighbours open.

    Shape ``(2r+1, 2r+1, 8)`` indexed ``[dx + r, dy + r, k]``.
    """
    size = 2 * radius + 1
    table = np.empty((size, size, 8), dtype=np.float64)
    for i in range(size):
        for j in range(size):
            table[i, j] = np.cumsum(substep_weights(i - radius, j - radius, 0xFF, p))
    return table
