"""Rasterized geography: passability, population, quarantine flags.

Cells are addressed by integer ``(x, y)`` with x growing east and y growing
north.  Grids are stored row-major as ``array[y, x]``; the flat cell index
used by the engine is ``y * width + x``.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "Cell",
    "Rect",
    "GridWorld",
    "SyntheticSpec",
    "MapFormatError",
    "DIRECTIONS",
    "DIRECTION_NAMES",
    "load_raster",
    "write_raster",
    "synthetic_world",
    "neighbors",
    "in_quarantine",
]

# E, NE, N, NW, W, SW, S, SE
DIRECTIONS: tuple[tuple[int, int], ...] = (
    (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1),
)
DIRECTION_NAMES = ("E", "NE", "N", "NW", "W", "SW", "S", "SE")

CSV_HEADER = ("x", "y", "population", "quarantine")


class MapFormatError(ValueError):
    """Raised when a map file or world definition is malformed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class Cell(NamedTuple):
    x: int
    y: int


class Rect(NamedTuple):
    """Half-open cell rectangle ``x0 <= x < x1, y0 <= y < y1``."""

    x0: int
    y0: int
    x1: int
    y1: int

    def contains(self, x: int, y: int) -> bool:
        return self.x0 <= x < self.x1 and self.y0 <= y < self.y1


def _frozen(a: np.ndarray, dtype) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class GridWorld:
    """Immutable raster world.  Arrays are indexed ``[y, x]``."""

    passable: np.ndarray
    population: np.ndarray
    quarantine: np.ndarray
    origin: Cell

    def __post_init__(self):
        passable = _frozen(self.passable, np.bool_)
        population = _frozen(self.population, np.int64)
        quarantine = _frozen(self.quarantine, np.bool_)
        if passable.ndim != 2 or passable.shape != population.shape or passable.shape != quarantine.shape:
            raise MapFormatError("passable, population and quarantine grids must share one 2-D shape")
        object.__setattr__(self, "passable", passable)
        object.__setattr__(self, "population", population)
        object.__setattr__(self, "quarantine", quarantine)
        object.__setattr__(self, "origin", Cell(int(self.origin[0]), int(self.origin[1])))

        if (population < 0).any():
            raise MapFormatError("negative population")
        if population[~passable].any():
            raise MapFormatError("population on impassable cell")
        if quarantine[~passable].any():
            raise MapFormatError("quarantine flag on impassable cell")
        if not self.contains(self.origin):
            raise MapFormatError(f"origin {tuple(self.origin)} outside the map")
        if not passable[self.origin.y, self.origin.x]:
            raise MapFormatError(f"origin {tuple(self.origin)} is not passable")
        # Total population > 0 is deliberately not enforced: empty synthetic
        # worlds are valid fixtures (an immediate zombie win).

    @property
    def width(self) -> int:
        return self.passable.shape[1]

    @property
    def height(self) -> int:
        return self.passable.shape[0]

    @property
    def total_population(self) -> int:
        return int(self.population.sum())

    def contains(self, c: Sequence[int]) -> bool:
        return 0 <= c[0] < self.width and 0 <= c[1] < self.height

    def is_passable(self, c: Sequence[int]) -> bool:
        return self.contains(c) and bool(self.passable[c[1], c[0]])

    def cell_index(self, c: Sequence[int]) -> int:
        return c[1] * self.width + c[0]

    def neighbor_masks(self) -> np.ndarray:
        """Per-cell 8-bit availability mask; bit k set iff direction k is passable."""
        h, w = self.passable.shape
        padded = np.zeros((h + 2, w + 2), dtype=np.bool_)
        padded[1:-1, 1:-1] = self.passable
        mask = np.zeros((h, w), dtype=np.uint8)
        for k, (dx, dy) in enumerate(DIRECTIONS):
            shifted = padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]
            mask |= shifted.astype(np.uint8) << k
        mask[~self.passable] = 0
        return mask

    def with_origin(self, origin: Sequence[int]) -> "GridWorld":
        return GridWorld(self.passable, self.population, self.quarantine, Cell(*origin))

    def __eq__(self, other):
        if not isinstance(other, GridWorld):
            return NotImplemented
        return (
            self.origin == other.origin
            and np.array_equal(self.passable, other.passable)
            and np.array_equal(self.population, other.population)
            and np.array_equal(self.quarantine, other.quarantine)
        )

    __hash__ = None


def neighbors(world: GridWorld, c: Sequence[int]) -> list[Cell]:
    """Passable in-bounds 8-neighbours of ``c`` in the order E, NE, N, NW, W, SW, S, SE."""
    x, y = c
    out = []
    for dx, dy in DIRECTIONS:
        n = Cell(x + dx, y + dy)
        if world.is_passable(n):
            out.append(n)
    return out


def in_quarantine(world: GridWorld, c: Sequence[int]) -> bool:
    return bool(world.quarantine[c[1], c[0]])


# ---------------------------------------------------------------------------
# Map CSV

_DIRECTIVE = re.compile(r"^#\s*(width|height|origin)\s*=\s*(.+?)\s*$")


def _parse_int(text: str, what: str, line: int) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise MapFormatError(f"{what} is not an integer: {text!r}", line) from None


def parse_cell(text: str) -> Cell:
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    if len(parts) != 2:
        raise ValueError(f"expected 'x,y', got {text!r}")
    return Cell(int(parts[0]), int(parts[1]))


def load_raster(path: str | Path, origin: Sequence[int] | None = None) -> GridWorld:
    """Load a sparse map CSV (``x,y,population,quarantine``; one row per passable cell).

    Cells missing from the file are impassable.  ``# width=``, ``# height=``
    and ``# origin=x,y`` comment directives are honoured when present; an
    explicit ``origin`` argument overrides the file's directive.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MapFormatError(f"cannot read map {path}: {exc}") from exc

    directives: dict[str, tuple[str, int]] = {}
    rows: list[tuple[int, int, int, int, int]] = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _DIRECTIVE.match(line)
            if m:
                directives[m.group(1)] = (m.group(2), lineno)
            continue
        fields = next(csv.reader([line]))
        if not header_seen:
            if tuple(f.strip() for f in fields) != CSV_HEADER:
                raise MapFormatError(f"expected header {','.join(CSV_HEADER)!r}", lineno)
            header_seen = True
            continue
        if len(fields) != 4:
            raise MapFormatError(f"expected 4 fields, got {len(fields)}", lineno)
        x = _parse_int(fields[0], "x", lineno)
        y = _parse_int(fields[1], "y", lineno)
        pop = _parse_int(fields[2], "population", lineno)
        quar = _parse_int(fields[3], "quarantine", lineno)
        if x < 0 or y < 0:
            raise MapFormatError(f"negative coordinate ({x},{y})", lineno)
        if pop < 0:
            raise MapFormatError(f"negative population {pop}", lineno)
        if quar not in (0, 1):
            raise MapFormatError(f"quarantine must be 0 or 1, got {quar}", lineno)
        rows.append((x, y, pop, quar, lineno))

    if not header_seen:
        raise MapFormatError("missing header line")
    if not rows:
        raise MapFormatError("map has no passable cells")

    def dim(name: str, observed: int) -> int:
        if name not in directives:
            return observed
        value, lineno = directives[name]
        n = _parse_int(value, name, lineno)
        if n <= 0:
            raise MapFormatError(f"{name} must be positive", lineno)
        return n

    width = dim("width", max(r[0] for r in rows) + 1)
    height = dim("height", max(r[1] for r in rows) + 1)

    passable = np.zeros((height, width), dtype=np.bool_)
    population = np.zeros((height, width), dtype=np.int64)
    quarantine = np.zeros((height, width), dtype=np.bool_)
    for x, y, pop, quar, lineno in rows:
        if x >= width or y >= height:
            raise MapFormatError(f"cell ({x},{y}) outside {width}x{height} map", lineno)
        if passable[y, x]:
            raise MapFormatError(f"duplicate cell ({x},{y})", lineno)
        passable[y, x] = True
        population[y, x] = pop
        quarantine[y, x] = bool(quar)

    if origin is None:
        if "origin" not in directives:
            raise MapFormatError("missing origin: pass one explicitly or add '# origin=x,y'")
        value, lineno = directives["origin"]
        try:
            origin = parse_cell(value)
        except ValueError as exc:
            raise MapFormatError(str(exc), lineno) from None
        if not (0 <= origin[0] < width and 0 <= origin[1] < height) or not passable[origin[1], origin[0]]:
            raise MapFormatError(f"origin {tuple(origin)} is not a passable cell", lineno)
    return GridWorld(passable, population, quarantine, Cell(*origin))


def format_raster(world: GridWorld) -> str:
    buf = io.StringIO()
    buf.write(f"# width={world.width}\n# height={world.height}\n")
    buf.write(f"# origin={world.origin.x},{world.origin.y}\n")
    buf.write(",".join(CSV_HEADER) + "\n")
    ys, xs = np.nonzero(world.passable)
    for y, x in zip(ys.tolist(), xs.tolist()):
        buf.write(f"{x},{y},{int(world.population[y, x])},{int(world.quarantine[y, x])}\n")
    return buf.getvalue()


def write_raster(world: GridWorld, path: str | Path) -> None:
    Path(path).write_text(format_raster(world), encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# Synthetic worlds


@dataclass(frozen=True)
class SyntheticSpec:
    width: int
    height: int
    total_population: int
    placement: str = "uniform"  # "uniform" | "hotspot"
    hotspot: Cell | None = None  # defaults to the centre cell
    decay_km: float = 2.0
    quarantine: Rect | None = None
    impassable: tuple[Rect, ...] = field(default_factory=tuple)
    origin: Cell | None = None  # defaults to the hotspot / centre cell

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("width and height must be positive")
        if self.total_population < 0:
            raise ValueError("total population must be >= 0")
        if self.placement not in ("uniform", "hotspot"):
            raise ValueError(f"unknown placement rule {self.placement!r}")
        if self.decay_km <= 0:
            raise ValueError("decay_km must be positive")
        rects = list(self.impassable) + ([self.quarantine] if self.quarantine else [])
        for r in rects:
            if not (0 <= r.x0 <= r.x1 <= self.width and 0 <= r.y0 <= r.y1 <= self.height):
                raise ValueError(f"rectangle {tuple(r)} outside {self.width}x{self.height}")

    @property
    def center(self) -> Cell:
        return Cell(self.width // 2, self.height // 2)


def _split_by_index(weights: np.ndarray, total: int) -> np.ndarray:
    """Integer split proportional to ``weights``; leftovers go to lowest flat indices."""
    flat = weights.ravel().astype(np.float64)
    alloc = np.floor(flat / flat.sum() * total).astype(np.int64)
    remainder = total - int(alloc.sum())
    if remainder:
        idx = np.flatnonzero(flat > 0)[:remainder]
        alloc[idx] += 1
    return alloc.reshape(weights.shape)


def synthetic_world(spec: SyntheticSpec) -> GridWorld:
    passable = np.ones((spec.height, spec.width), dtype=np.bool_)
    for r in spec.impassable:
        passable[r.y0:r.y1, r.x0:r.x1] = False
    quarantine = np.zeros_like(passable)
    if spec.quarantine is not None:
        q = spec.quarantine
        quarantine[q.y0:q.y1, q.x0:q.x1] = True
        quarantine &= passable

    if spec.placement == "uniform":
        weights = passable.astype(np.float64)
    else:
        hx, hy = spec.hotspot or spec.center
        yy, xx = np.mgrid[0:spec.height, 0:spec.width]
        dist = np.hypot(xx - hx, yy - hy)
        weights = np.exp(-dist / spec.decay_km) * passable

    if spec.total_population > 0:
        if not passable.any():
            raise ValueError("population requested on a world with no passable cells")
        population = _split_by_index(weights, spec.total_population)
    else:
        population = np.zeros(passable.shape, dtype=np.int64)

    origin = spec.origin or spec.hotspot or spec.center
    if not passable.any():
        raise ValueError("world has no passable cells")
    return GridWorld(passable, population, quarantine, Cell(*origin))


def chebyshev(a: Sequence[int], b: Sequence[int]) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def euclid_floor(dx: int, dy: int) -> int:
    return math.isqrt(dx * dx + dy * dy)
