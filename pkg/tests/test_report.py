import numpy as np
import pytest

from zombiesim.engine import RunOutcome, Winner, run
from zombiesim.montecarlo import BatchConfig, aggregate, run_batch
from zombiesim.report import (
    frame_name, intensity, load_snapshots, read_ppm, render_frame, render_snapshots, save_snapshots, write_batch_csv,
)
from zombiesim.worldmap import Cell, GridWorld, Rect, SyntheticSpec, synthetic_world


def test_empty_summary_writes_headers(tmp_path):
    paths = write_batch_csv(aggregate([]), tmp_path)
    assert [p.name for p in paths] == ["runs.csv", "trajectories.csv", "histograms.csv"]
    assert (tmp_path / "runs.csv").read_bytes() == b"run_id,winner,end_step,peak_zombies,first_border_step\n"
    assert (tmp_path / "trajectories.csv").read_bytes() == b"run_id,step,healthy,incubating,zombies,dead_zombies\n"
    assert (tmp_path / "histograms.csv").read_bytes() == b"metric,bin,count\n"


def test_single_run_row(tmp_path):
    traj = np.array([[0, 4, 0, 1, 0], [1, 4, 0, 1, 0], [2, 4, 0, 1, 0], [3, 4, 0, 0, 1]])
    write_batch_csv(aggregate([RunOutcome(Winner.HUMANS, 3, 1, None, traj, run_id=0)]), tmp_path)
    assert (tmp_path / "runs.csv").read_text().splitlines()[1] == "0,Humans,3,1,"
    lines = (tmp_path / "trajectories.csv").read_text().splitlines()
    assert lines[1:] == ["0,0,4,0,1,0", "0,1,4,0,1,0", "0,2,4,0,1,0", "0,3,4,0,0,1"]
    hist = (tmp_path / "histograms.csv").read_text().splitlines()
    assert "hours_to_win_humans,3,1" in hist and "peak_zombies_humans_won,1,1" in hist


def test_csv_is_byte_deterministic(tmp_path, quarantine_world):
    cfg = BatchConfig(quarantine_world, n_runs=5, base_seed=3)
    a, b = tmp_path / "a", tmp_path / "b"
    write_batch_csv(run_batch(cfg), a)
    write_batch_csv(run_batch(cfg), b)
    for name in ("runs.csv", "trajectories.csv", "histograms.csv"):
        data = (a / name).read_bytes()
        assert data == (b / name).read_bytes()
        assert b"\r" not in data


def test_intensity_formula():
    assert intensity(0) == 64
    assert intensity(1) == 112
    assert intensity(3) == 160
    assert intensity(20_000) == 255
    n = np.arange(0, 5000)
    expected = np.minimum(255, 64 + np.floor(48 * np.log2(1 + n)))
    assert np.array_equal(intensity(n), expected)


def tiny_world():
    passable = np.array([[True, True, False], [True, True, True]])
    return GridWorld(passable, np.zeros((2, 3), np.int64), np.zeros((2, 3), bool), (0, 0))


def test_render_pixels():
    w = tiny_world()
    h = np.array([[0, 5, 0], [0, 2, 0]])
    z = np.array([[1, 0, 0], [0, 3, 0]])
    data = render_frame(h, z, w)
    header = b"P6\n3 2\n255\n"
    assert data.startswith(header) and len(data) == len(header) + 3 * 3 * 2
    img = read_ppm(data)
    # top row is y = 1
    assert img[1, 0].tolist() == [112, 0, 0]  # (0, 0): one zombie
    assert img[1, 1].tolist() == [0, int(intensity(5)), 0]  # (1, 0): humans only
    assert img[1, 2].tolist() == [0, 0, 0]  # (2, 0): impassable
    assert img[0, 0].tolist() == [220, 220, 220]  # (0, 1): empty
    assert img[0, 1].tolist() == [int(intensity(3)), 0, 0]  # zombies win the colour
    assert img[0, 2].tolist() == [220, 220, 220]


def test_render_golden_bytes():
    w = tiny_world()
    data = render_frame(np.array([[0, 1, 0], [0, 0, 0]]), np.array([[1, 0, 0], [0, 0, 0]]), w)
    px = bytes([220] * 9) + bytes([112, 0, 0, 0, 112, 0, 0, 0, 0])
    assert data == b"P6\n3 2\n255\n" + px


def test_render_dimension_mismatch():
    with pytest.raises(ValueError):
        render_frame(np.zeros((3, 3)), np.zeros((3, 3)), tiny_world())


def test_read_ppm_rejects_garbage():
    with pytest.raises(ValueError):
        read_ppm(b"P3\n1 1\n255\n\x00\x00\x00")
    with pytest.raises(ValueError):
        read_ppm(b"P6\n2 1\n255\n\x00\x00\x00")


def test_frame_name():
    assert frame_name(7) == "frame_000007.ppm"


def test_snapshots_round_trip(tmp_path, quarantine_world):
    frames = []
    run(quarantine_world, seed=4, max_steps=5, on_step=lambda s: frames.append((s.step, *s.occupancy(quarantine_world))))
    path = save_snapshots(tmp_path / "snap.npz", quarantine_world, *zip(*frames))
    world, steps, h, z = load_snapshots(path)
    assert steps.tolist() == [f[0] for f in frames]
    assert np.array_equal(world.passable, quarantine_world.passable) and world.origin == quarantine_world.origin
    assert int(h[0].sum() + z[0].sum()) == quarantine_world.total_population + 1
    paths = render_snapshots(path, tmp_path / "frames")
    assert [p.name for p in paths] == [frame_name(t) for t in steps.tolist()]
    for p, hh, zz in zip(paths, h, z):
        assert p.read_bytes() == render_frame(hh, zz, quarantine_world)
