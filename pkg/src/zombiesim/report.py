"""CSV result files and PPM (P6) map frames."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .engine import TRAJECTORY_COLUMNS
from .montecarlo import BatchSummary
from .worldmap import GridWorld

__all__ = [
    "RUNS_COLUMNS",
    "write_batch_csv",
    "intensity",
    "render_frame",
    "write_frame",
    "frame_name",
    "read_ppm",
    "save_snapshots",
    "load_snapshots",
    "render_snapshots",
]

RUNS_COLUMNS = ("run_id", "winner", "end_step", "peak_zombies", "first_border_step")
HISTOGRAM_COLUMNS = ("metric", "bin", "count")

IMPASSABLE_RGB = (0, 0, 0)
EMPTY_RGB = (220, 220, 220)


def _writer(path: Path):
    fh = open(path, "w", newline="", encoding="utf-8")
    return fh, csv.writer(fh, lineterminator="\n")


def write_batch_csv(summary: BatchSummary, out_dir: str | Path) -> list[Path]:
    """Write runs.csv, trajectories.csv and histograms.csv; byte-deterministic."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [out_dir / "runs.csv", out_dir / "trajectories.csv", out_dir / "histograms.csv"]

    fh, w = _writer(paths[0])
    with fh:
        w.writerow(RUNS_COLUMNS)
        for o in summary.outcomes:
            fb = "" if o.first_border_step is None else o.first_border_step
            w.writerow((o.run_id, o.winner.value, o.end_step, o.peak_zombies, fb))

    fh, w = _writer(paths[1])
    with fh:
        w.writerow(("run_id",) + TRAJECTORY_COLUMNS)
        for o in summary.outcomes:
            for row in o.trajectory.tolist():
                w.writerow([o.run_id, *row])

    fh, w = _writer(paths[2])
    with fh:
        w.writerow(HISTOGRAM_COLUMNS)
        for metric in sorted(summary.histograms):
            for bin_, count in sorted(summary.histograms[metric].items()):
                w.writerow((metric, bin_, count))
    return paths


def intensity(n) -> np.ndarray:
    """Channel intensity for a head count: min(255, 64 + floor(48 * log2(1 + n)))."""
    n = np.asarray(n, dtype=np.float64)
    return np.minimum(255, 64 + np.floor(48.0 * np.log2(1.0 + n))).astype(np.uint8)


def render_frame(healthy: np.ndarray, zombies: np.ndarray, world: GridWorld) -> bytes:
    """One pixel per cell, north at the top.  Grids are indexed ``[y, x]``."""
    shape = (world.height, world.width)
    if np.shape(healthy) != shape or np.shape(zombies) != shape:
        raise ValueError(f"snapshot shape {np.shape(healthy)}/{np.shape(zombies)} does not match world {shape}")
    healthy = np.asarray(healthy)
    zombies = np.asarray(zombies)
    img = np.empty(shape + (3,), dtype=np.uint8)
    img[...] = EMPTY_RGB
    human_only = (healthy > 0) & (zombies == 0)
    img[human_only] = 0
    img[human_only, 1] = intensity(healthy[human_only])
    has_zombie = zombies > 0
    img[has_zombie] = 0
    img[has_zombie, 0] = intensity(zombies[has_zombie])
    img[~world.passable] = IMPASSABLE_RGB
    header = f"P6\n{world.width} {world.height}\n255\n".encode("ascii")
    return header + img[::-1].tobytes()


def frame_name(step: int) -> str:
    return f"frame_{step:06d}.ppm"


def write_frame(path: str | Path, healthy, zombies, world: GridWorld) -> Path:
    path = Path(path)
    path.write_bytes(render_frame(healthy, zombies, world))
    return path


def read_ppm(data: bytes) -> np.ndarray:
    """Minimal P6 reader (maxval 255); returns an (height, width, 3) array, top row first."""
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        start = pos
        while not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    if tokens[0] != b"P6":
        raise ValueError("not a binary PPM (P6)")
    width, height, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise ValueError("only maxval 255 is supported")
    pixels = data[pos + 1:]
    if len(pixels) != 3 * width * height:
        raise ValueError(f"pixel payload is {len(pixels)} bytes, expected {3 * width * height}")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width, 3)


def save_snapshots(path: str | Path, world: GridWorld, steps, healthy, zombies) -> Path:
    path = Path(path)
    np.savez_compressed(
        path,
        steps=np.asarray(steps, dtype=np.int64),
        healthy=np.asarray(healthy, dtype=np.uint32),
        zombies=np.asarray(zombies, dtype=np.uint32),
        passable=world.passable,
        quarantine=world.quarantine,
        origin=np.array(world.origin, dtype=np.int64),
    )
    return path


def load_snapshots(path: str | Path):
    """Returns (world, steps, healthy, zombies) from a snapshot archive."""
    with np.load(path) as z:
        world = GridWorld(
            z["passable"], np.zeros(z["passable"].shape, dtype=np.int64), z["quarantine"], tuple(z["origin"])
        )
        return world, z["steps"], z["healthy"], z["zombies"]


def render_snapshots(path: str | Path, out_dir: str | Path) -> list[Path]:
    world, steps, healthy, zombies = load_snapshots(path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return [
        write_frame(out_dir / frame_name(int(t)), h, z, world)
        for t, h, z in zip(steps, healthy, zombies)
    ]
