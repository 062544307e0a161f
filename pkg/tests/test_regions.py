import math

import numpy as np
import pytest

from ccn_lab.errors import ConfigurationError
from ccn_lab.regions import classify_array, region_map
from ccn_lab.rolls import classify


@pytest.fixture(scope="module")
def map512():
    return region_map(512)


def test_radii_512(map512):
    h = map512.cell
    assert abs(map512.inner_radius() - 1 / math.sqrt(3)) <= h
    assert abs(map512.outer_radius() - 1.0) <= h
    assert map512.inner_radius() == pytest.approx(0.5774, abs=0.005)


def test_area_fraction_512(map512):
    assert map512.area_fraction() == pytest.approx(2 / 3, abs=0.01)


def test_coarse_map_within_one_cell():
    m = region_map(64)
    assert abs(m.inner_radius() - 1 / math.sqrt(3)) <= m.cell
    assert abs(m.outer_radius() - 1.0) <= m.cell


@pytest.mark.parametrize("res", [0, 16, 63])
def test_resolution_floor(res):
    with pytest.raises(ConfigurationError):
        region_map(res)


def test_array_classifier_matches_pointwise(rng):
    pts = rng.uniform(-1.05, 1.05, size=(200, 2))
    codes = classify_array(pts[:, 0], pts[:, 1])
    names = ["outside_D", "D_plus", "D_minus", "boundary_existence", "boundary_zz"]
    for (k, l), c in zip(pts, codes):
        assert classify((k, l)).value == names[c]


def test_rows_cover_grid(map512):
    rows = list(region_map(64).rows())
    assert len(rows) == 64 * 64
    assert {r[3] for r in rows} <= {"outside_D", "D_plus", "D_minus", "boundary_existence", "boundary_zz"}


def test_worker_count_does_not_change_map():
    a, b = region_map(96, workers=1), region_map(96, workers=4)
    assert np.array_equal(a.codes, b.codes)
