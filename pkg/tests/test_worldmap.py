import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zombiesim.fixtures import UUSIMAA_POPULATION, fixture_path, load_uusimaa_fixture, uusimaa_like_world
from zombiesim.worldmap import (
    Cell, GridWorld, MapFormatError, Rect, SyntheticSpec, format_raster, in_quarantine,
    load_raster, neighbors, synthetic_world, write_raster,
)


def write(tmp_path, text, name="map.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_minimal_file(tmp_path):
    p = write(tmp_path, "x,y,population,quarantine\n0,0,5,0\n1,0,3,1\n")
    w = load_raster(p, origin=(0, 0))
    assert (w.width, w.height) == (2, 1)
    assert w.passable.sum() == 2
    assert w.total_population == 8
    assert in_quarantine(w, (1, 0)) and not in_quarantine(w, (0, 0))


def test_comments_and_missing_cells_are_impassable(tmp_path):
    p = write(tmp_path, "# a comment\nx,y,population,quarantine\n# another\n2,1,4,0\n0,0,1,0\n")
    w = load_raster(p, origin=(2, 1))
    assert (w.width, w.height) == (3, 2)
    assert not w.passable[0, 1] and w.population[0, 1] == 0
    assert w.passable[1, 2]


@pytest.mark.parametrize(
    "body, line",
    [
        ("0,0,5,0\n1,0,-1,0\n", 3),  # negative population
        ("0,0,5,0\n0,0,2,0\n", 3),  # duplicate
        ("0,0,5,0\n1,0\n", 3),  # short row
        ("0,0,5,0\n1,zero,2,0\n", 3),  # not an integer
        ("0,0,5,2\n", 2),  # bad quarantine flag
        ("0,0,5,0\n-1,0,1,0\n", 3),  # negative coordinate
    ],
)
def test_malformed_rows_name_the_line(tmp_path, body, line):
    p = write(tmp_path, "x,y,population,quarantine\n" + body)
    with pytest.raises(MapFormatError) as err:
        load_raster(p, origin=(0, 0))
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_out_of_bounds_against_declared_size(tmp_path):
    p = write(tmp_path, "# width=2\n# height=2\nx,y,population,quarantine\n0,0,1,0\n5,0,1,0\n")
    with pytest.raises(MapFormatError) as err:
        load_raster(p, origin=(0, 0))
    assert err.value.line == 5


def test_origin_errors(tmp_path):
    p = write(tmp_path, "x,y,population,quarantine\n0,0,1,0\n2,0,1,0\n")
    with pytest.raises(MapFormatError, match="missing origin"):
        load_raster(p)
    with pytest.raises(MapFormatError, match="not passable"):
        load_raster(p, origin=(1, 0))
    p2 = write(tmp_path, "# origin=1,0\nx,y,population,quarantine\n0,0,1,0\n2,0,1,0\n", "b.csv")
    with pytest.raises(MapFormatError) as err:
        load_raster(p2)
    assert err.value.line == 1
    assert load_raster(p2, origin=(2, 0)).origin == Cell(2, 0)


def test_bad_header(tmp_path):
    p = write(tmp_path, "x,y,pop,q\n0,0,1,0\n")
    with pytest.raises(MapFormatError, match="header"):
        load_raster(p, origin=(0, 0))


def test_invariants_enforced():
    passable = np.array([[True, False]])
    with pytest.raises(MapFormatError):
        GridWorld(passable, np.array([[1, 2]]), np.zeros((1, 2), bool), (0, 0))
    with pytest.raises(MapFormatError):
        GridWorld(passable, np.array([[1, 0]]), np.array([[False, True]]), (0, 0))
    with pytest.raises(MapFormatError):
        GridWorld(passable, np.array([[1, 0]]), np.zeros((1, 2), bool), (1, 0))


def test_world_is_immutable(open_world):
    with pytest.raises(ValueError):
        open_world.population[0, 0] = 7


def test_uniform_split():
    w = synthetic_world(SyntheticSpec(3, 3, 9))
    assert (w.population == 1).all()


def test_uniform_remainder_goes_to_lowest_index():
    w = synthetic_world(SyntheticSpec(3, 3, 10))
    assert w.population[0, 0] == 2
    assert w.population.sum() == 10
    assert (w.population.ravel()[1:] == 1).all()


def test_hotspot_decays_from_centre():
    w = synthetic_world(SyntheticSpec(5, 5, 100, placement="hotspot"))
    edge = np.concatenate([w.population[0], w.population[-1], w.population[:, 0], w.population[:, -1]])
    assert w.population[2, 2] > edge.max()
    assert w.total_population == 100


def test_synthetic_obstacles_and_quarantine():
    spec = SyntheticSpec(6, 4, 20, quarantine=Rect(0, 0, 3, 4), impassable=(Rect(2, 0, 4, 1),), origin=Cell(0, 0))
    w = synthetic_world(spec)
    assert not w.passable[0, 2] and not w.quarantine[0, 2]
    assert w.quarantine[1, 2]
    assert w.population[~w.passable].sum() == 0


def test_synthetic_errors():
    with pytest.raises(ValueError):
        synthetic_world(SyntheticSpec(2, 2, 5, impassable=(Rect(0, 0, 2, 2),)))
    with pytest.raises(ValueError):
        SyntheticSpec(2, 2, 5, quarantine=Rect(0, 0, 3, 2))
    with pytest.raises(ValueError):
        SyntheticSpec(2, 2, -1)


def test_synthetic_is_deterministic():
    spec = SyntheticSpec(9, 7, 1234, placement="hotspot", decay_km=1.5)
    assert synthetic_world(spec) == synthetic_world(spec)


def test_neighbors_interior_corner_and_blocked(open_world):
    assert neighbors(open_world, (5, 5)) == [
        (6, 5), (6, 6), (5, 6), (4, 6), (4, 5), (4, 4), (5, 4), (6, 4),
    ]
    assert neighbors(open_world, (0, 0)) == [(1, 0), (1, 1), (0, 1)]
    w = synthetic_world(SyntheticSpec(5, 5, 10, impassable=(Rect(2, 3, 3, 4),), origin=Cell(0, 0)))
    ns = neighbors(w, (2, 2))
    assert len(ns) == 7 and (2, 3) not in ns


def test_in_quarantine_flags(quarantine_world):
    assert in_quarantine(quarantine_world, (0, 0))
    assert not in_quarantine(quarantine_world, (8, 0))
    assert not in_quarantine(quarantine_world, (10, 0))  # impassable


@st.composite
def random_worlds(draw):
    w = draw(st.integers(1, 7))
    h = draw(st.integers(1, 7))
    passable = np.array(draw(st.lists(st.booleans(), min_size=w * h, max_size=w * h))).reshape(h, w)
    passable.ravel()[0] = True
    pops = np.array(draw(st.lists(st.integers(0, 50), min_size=w * h, max_size=w * h))).reshape(h, w) * passable
    quar = np.array(draw(st.lists(st.booleans(), min_size=w * h, max_size=w * h))).reshape(h, w) & passable
    return GridWorld(passable, pops, quar, Cell(0, 0))


@settings(max_examples=60, deadline=None)
@given(random_worlds())
def test_raster_round_trip(tmp_path_factory, world):
    p = tmp_path_factory.mktemp("rt") / "m.csv"
    write_raster(world, p)
    assert load_raster(p) == world


@settings(max_examples=60, deadline=None)
@given(random_worlds())
def test_neighbor_symmetry(world):
    for y in range(world.height):
        for x in range(world.width):
            if not world.passable[y, x]:
                continue
            for n in neighbors(world, (x, y)):
                assert (x, y) in neighbors(world, n)


def test_neighbor_mask_matches_neighbors(quarantine_world):
    masks = quarantine_world.neighbor_masks()
    for y in range(quarantine_world.height):
        for x in range(quarantine_world.width):
            expected = len(neighbors(quarantine_world, (x, y))) if quarantine_world.passable[y, x] else 0
            assert bin(int(masks[y, x])).count("1") == expected


def test_uusimaa_fixture_total_population():
    w = load_uusimaa_fixture()
    assert w.total_population == UUSIMAA_POPULATION == 1_704_456
    assert w.passable[w.origin.y, w.origin.x] and w.quarantine[w.origin.y, w.origin.x]
    assert 1_150_000 <= int(w.population[w.quarantine].sum()) <= 1_250_000


def test_uusimaa_fixture_matches_generator():
    assert fixture_path().read_text() == format_raster(uusimaa_like_world())
