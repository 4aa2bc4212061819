import numpy as np
import pytest

from sinlens.basins import (UNRESOLVED, T, attractors, iterate_map, pixel_centers,
                            render_basins)
from sinlens.core import InvalidParam, LensParams, g_prime
from sinlens.io import ppm_bytes, read_ppm
from sinlens.solver import find_all

K = LensParams(1.92)
W = 0.67j


@pytest.fixture(scope="module")
def att():
    return attractors(K, W)


def test_three_attractors(att):
    assert len(att) == 3
    assert abs(att[0] - 1.5363458j) < 1e-6
    for z in att:
        assert abs(complex(g_prime(1.92, z))) < 1
        assert abs(complex(T(K, W, z)) - z) < 1e-10


def test_iterate_examples(att):
    assert iterate_map(K, W, att[0], att) == (0, 0)
    label, steps = iterate_map(K, W, 1.4j, att)
    assert label == 0 and steps > 0
    with pytest.raises(InvalidParam):
        iterate_map(K, W, 1j, [])


def test_escape_and_pole_unresolved(att):
    assert iterate_map(K, W, 60j, att)[0] == UNRESOLVED
    assert iterate_map(K, W, 0j, att)[0] == UNRESOLVED


@pytest.fixture(scope="module")
def small(att):
    return render_basins(K, W, (-3, 3, -3, 3), 120, 120, attractor_list=att)


def test_render_small(small):
    assert small.labels.shape == (120, 120)
    assert small.resolved_fraction > 0.99
    assert small.basin_count() == 3


def test_labeled_orbits_end_at_attractors(att):
    Z = pixel_centers((-3, 3, -3, 3), 30, 30)
    img = render_basins(K, W, (-3, 3, -3, 3), 30, 30, attractor_list=att)
    for z0, lab, n in zip(Z.ravel(), img.labels.ravel(), img.steps.ravel()):
        if lab == UNRESOLVED:
            continue
        z = z0
        for _ in range(n):
            z = complex(T(K, W, z))
        assert abs(z - att[lab]) < 1e-6


def test_mirror_symmetry(small):
    # z -> -conj(z) swaps the two off-axis attractors and fixes the axis one
    swap = np.array([0, 2, 1, UNRESOLVED])
    L = small.labels
    mapped = swap[np.where(L == UNRESOLVED, 3, L)]
    assert np.mean(L[:, ::-1] == mapped) > 0.999


def test_resolved_fraction_monotone(att):
    fr = [render_basins(K, W, (-3, 3, -3, 3), 40, 40, mi, attractor_list=att).resolved_fraction
          for mi in (100, 200, 500)]
    assert fr[0] <= fr[1] <= fr[2]


def test_deterministic_ppm(att, small):
    again = render_basins(K, W, (-3, 3, -3, 3), 120, 120, attractor_list=att)
    a, b = ppm_bytes(small), ppm_bytes(again)
    assert a == b
    assert a.startswith(b"P6\n120 120\n255\n")
    rgb = read_ppm(a)
    assert rgb.shape == (120, 120, 3)
    # palette: white, gray, black by descending Im of the fixed point
    top = small.labels == 0
    assert np.all(rgb[top] == 255)


def test_attractor_count_matches_solver_k1():
    p = LensParams(1.0)
    n = find_all(p, 0j).n_preserving
    assert len(attractors(p, 0j)) == n


def test_no_attractors_rejected():
    with pytest.raises(InvalidParam):
        render_basins(K, W, (-1, 1, -1, 1), 4, 4, attractor_list=[])
    with pytest.raises(InvalidParam):
        render_basins(K, W, (1, -1, -1, 1), 4, 4)
