"""Deterministic Uusimaa-like test world.

The real 1 km population grid is not redistributable, so this builds a
stand-in with the same file format and the same headline numbers: a
south-coast region of roughly 9 000 km^2 holding exactly 1 704 456 people,
about 1.2 million of them inside a capital-region quarantine block around
the outbreak origin, plus towns, rural spread, lakes and a western
peninsula.  Everything is a pure function of the constants below.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np
from scipy import ndimage

from .worldmap import Cell, GridWorld, load_raster

UUSIMAA_POPULATION = 1_704_456
CAPITAL_POPULATION = 1_200_000

WIDTH, HEIGHT = 170, 90
ORIGIN_X = 100
# capital block relative to the origin: x from -28 to the east edge, y up to
# coast + 17.  The east edge is 15 km out except on the shore south-east of
# the origin (rows at least NEAR_DROP below it), where it comes in to 13 km.
CAPITAL_WEST, CAPITAL_NORTH = 28, 17
CAPITAL_EAST_NEAR, CAPITAL_EAST_FAR, NEAR_DROP = 13, 15, 4

# (dx from origin, height above coast, share, decay km)
CAPITAL_CENTRES = ((0, 1, 1.0, 6.0), (-12, 3, 0.35, 3.5), (3, 11, 0.3, 3.5))
TOWNS = (
    (40, 5, 50_000, 2.5),    # Porvoo
    (62, 6, 15_000, 2.0),    # Loviisa
    (-50, 26, 46_000, 2.5),  # Lohja
    (-30, 6, 40_000, 2.5),   # Kirkkonummi
    (-31, 24, 30_000, 2.5),  # Vihti
    (-10, 31, 43_000, 2.5),  # Nurmijärvi
    (6, 26, 80_000, 2.5),    # Kerava / Järvenpää / Tuusula
    (2, 48, 47_000, 2.5),    # Hyvinkää
    (30, 38, 12_000, 2.0),   # Mäntsälä
    (-70, 6, 28_000, 2.0),   # Raasepori
    (-92, 3, 8_000, 1.5),    # Hanko
)
LAKES = ((-35, 40, 6, 3), (-60, 45, 4, 6), (20, 55, 5, 3), (45, 30, 3, 5), (-15, 58, 7, 2), (55, 52, 4, 4))

FIXTURE_NAME = "uusimaa_synthetic.csv"


def _coast(x: np.ndarray) -> np.ndarray:
    return np.floor(8 + 2.5 * np.sin(x / 11.0) + 1.5 * np.sin(x / 5.3 + 0.7)).astype(int)


def _north(x: np.ndarray) -> np.ndarray:
    top = 70 + 8 * np.sin(x / 27.0 + 1.0) + 3 * np.sin(x / 7.0)
    peninsula = _coast(x) + 5 + 1.6 * x  # narrows to the south-west tip
    return np.floor(np.minimum(top, peninsula)).astype(int)


def uusimaa_like_world() -> GridWorld:
    xs = np.arange(WIDTH)
    yy, xx = np.mgrid[0:HEIGHT, 0:WIDTH]
    coast = _coast(xs)[None, :]
    north = _north(xs)[None, :]
    land = (yy >= coast) & (yy <= north) & (xx >= 1) & (xx <= WIDTH - 3)

    oy = int(_coast(np.array([ORIGIN_X]))[0])
    for dx, h, rx, ry in LAKES:
        cx, cy = ORIGIN_X + dx, oy + h
        land &= ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 > 1.0

    labels, n = ndimage.label(land, structure=np.ones((3, 3), dtype=int))
    sizes = ndimage.sum(land, labels, index=np.arange(1, n + 1))
    land = labels == (1 + int(np.argmax(sizes)))

    origin = Cell(ORIGIN_X, oy + 1)
    east = np.where(yy <= origin.y - NEAR_DROP, CAPITAL_EAST_NEAR, CAPITAL_EAST_FAR)
    capital = land & (xx >= ORIGIN_X - CAPITAL_WEST) & (xx < ORIGIN_X + east) & (yy < coast + CAPITAL_NORTH)

    cap_w = np.zeros((HEIGHT, WIDTH))
    for dx, h, share, decay in CAPITAL_CENTRES:
        r = np.hypot(xx - (ORIGIN_X + dx), yy - (oy + h))
        cap_w += share * np.exp(-r / decay)
    cap_w = (cap_w + 0.002) * capital

    rng = np.random.default_rng(20220101)
    rural = rng.lognormal(mean=0.0, sigma=0.8, size=(HEIGHT, WIDTH)) * land * ~capital
    rest_w = rural / rural.sum() * 0.35
    town_total = sum(t[2] for t in TOWNS)
    for dx, h, pop, decay in TOWNS:
        r = np.hypot(xx - (ORIGIN_X + dx), yy - (oy + h))
        w = np.exp(-r / decay) * land * ~capital
        rest_w += 0.65 * pop / town_total * w / w.sum()

    population = _largest_remainder(cap_w, CAPITAL_POPULATION) + _largest_remainder(
        rest_w, UUSIMAA_POPULATION - CAPITAL_POPULATION
    )
    return GridWorld(land, population, capital, origin)


def _largest_remainder(weights: np.ndarray, total: int) -> np.ndarray:
    exact = weights / weights.sum() * total
    alloc = np.floor(exact).astype(np.int64)
    short = total - int(alloc.sum())
    # stable sort keeps ties in flat-index order
    order = np.argsort(-(exact - alloc).ravel(), kind="stable")[:short]
    alloc.ravel()[order] += 1
    return alloc


def fixture_path() -> Path:
    return Path(str(resources.files("zombiesim") / "data" / FIXTURE_NAME))


def load_uusimaa_fixture() -> GridWorld:
    return load_raster(fixture_path())
