import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sinlens.caustic import (K_HIGH, K_LOW, CuspFamily, boundary_image, cusp_ratio,
                             distance_to_curves, find_cusps, oblique_s, p_critical_points, p_cubic,
                             positive_root_p, trace_caustic)
from sinlens.core import InvalidParam, LensParams, g_prime


def test_p_root_special_values():
    assert abs(positive_root_p(2.0) - 1.0) <= 1e-12
    assert abs(positive_root_p(2.0 / math.sqrt(3.0)) - 3.0) <= 1e-10


@given(st.floats(0.01, 6.0))
def test_p_root_is_root(k):
    r = positive_root_p(k)
    assert r > 0
    assert abs(float(p_cubic(k, r))) < 1e-11 * max(1.0, r ** 3)
    # the only positive root: p < 0 below it, > 0 above it
    assert float(p_cubic(k, 0.5 * r)) < 0 < float(p_cubic(k, r + 0.5))


@given(st.floats(0.01, 6.0))
def test_p_root_at_most_three_iff_k_large_enough(k):
    # p(3) = 3k^2 - 4, so r(k) <= 3 exactly when k >= 2/sqrt(3)
    r = positive_root_p(k)
    if k >= K_LOW + 1e-9:
        assert r <= 3.0 + 1e-12
    elif k <= K_LOW - 1e-9:
        assert r > 3.0


def test_p_root_example():
    r = positive_root_p(1.92)
    assert 1 < r < 3 and abs(float(p_cubic(1.92, r))) < 1e-12


@pytest.mark.parametrize("k", np.linspace(0.1, 1.99, 12))
def test_p_critical_values(k):
    lo, hi = p_critical_points(k)
    s = (2 / 9) * math.sqrt(12 - 3 * k * k)
    assert float(p_cubic(k, hi)) == pytest.approx((k * k - 4) * (1 + s), abs=1e-10)
    assert float(p_cubic(k, lo)) == pytest.approx((k * k - 4) * (1 - s), abs=1e-10)
    with pytest.raises(InvalidParam):
        p_critical_points(2.5)


@pytest.mark.parametrize("k,n", [(1.0, 4), (1.1, 4), (K_LOW, 4), (1.15, 4), (1.16, 8), (1.5, 8),
                                 (1.92, 8), (1.99, 8), (2.0, 4), (2.01, 4), (3.0, 4)])
def test_cusp_counts(k, n):
    cusps = find_cusps(LensParams(k))
    assert len(cusps) == n
    fam = [c.family for c in cusps]
    assert fam.count(CuspFamily.AXIS_REAL) == 2 and fam.count(CuspFamily.AXIS_IMAG) == 2
    for c in cusps:
        assert abs(abs(complex(g_prime(k, c.z))) - 1) < 1e-10
        q = complex(cusp_ratio(k, c.z))
        assert abs(q.imag) <= 1e-8 * abs(q) and q.real > 0
        assert abs(c.z.real) < math.pi / 2
        if c.family is CuspFamily.AXIS_REAL:
            assert c.z.imag == 0
        elif c.family is CuspFamily.AXIS_IMAG:
            assert c.z.real == 0
        else:
            assert c.z.real != 0 and c.z.imag != 0
    quads = sorted((c.z.real > 0, c.z.imag > 0) for c in cusps if c.family is CuspFamily.OBLIQUE)
    assert quads == ([] if n == 4 else [(False, False), (False, True), (True, False), (True, True)])


def test_oblique_window_is_open():
    assert oblique_s(K_LOW) == [] and oblique_s(K_HIGH) == []
    assert len(oblique_s(1.16)) == 2 and oblique_s(1.15) == []


def test_axis_cusp_example_k1():
    c = find_cusps(LensParams(1.0))[0]
    x = math.acos((math.sqrt(5) - 1) / 2)
    assert c.z == pytest.approx(complex(x, 0), abs=1e-14)
    assert c.z.real == pytest.approx(0.904557, abs=1e-6)
    assert c.image.real == pytest.approx(x - math.tan(x), abs=1e-12)
    assert c.image.real == pytest.approx(-0.367463, abs=1e-6)


@pytest.mark.parametrize("k", [0.5, 1.1, 1.5, 1.92, 2.0, 2.5])
def test_axis_cusp_image_signs(k):
    f1, f2, f3, f4 = (c.image for c in find_cusps(LensParams(k))[:4])
    assert f1.real < 0 and f3.real > 0 and abs(f1.imag) < 1e-12 and abs(f3.imag) < 1e-12
    assert f2.imag > 0 and f4.imag < 0 and abs(f2.real) < 1e-12 and abs(f4.real) < 1e-12


def test_sheared_cusps_rejected():
    with pytest.raises(InvalidParam):
        find_cusps(LensParams(1.0, 0.1))


@pytest.mark.parametrize("k", [0.5, 1.1, 1.16, 1.5, 1.92, 1.99, 2.0, 2.01, 3.0])
def test_arcs_convex(k):
    c = trace_caustic(LensParams(k), 1024)
    n_cusp = len(c.cusps)
    assert n_cusp in (4, 8)
    for arc in c.arcs:
        d = np.diff(arc.tangent_arg)
        # strictly monotone turning along each smooth arc (one sign per arc)
        assert np.all(d > 0) or np.all(d < 0)
    # number of arcs: one per cusp-to-cusp piece, or cusp-to-boundary for k >= 2
    assert len(c.arcs) == (n_cusp if k < 2 else 8)


def test_caustic_symmetric():
    c = trace_caustic(LensParams(1.92), 512)
    p = c.points()
    p = p[np.isfinite(p)]
    step = max(np.max(np.abs(np.diff(a.image))) for a in c.arcs)
    for img in (np.conj(p), -p):
        d = np.min(np.abs(p[:, None] - img[None, :]), axis=1)
        assert d.max() < 2 * step


def test_simple_closed_caustic_k11():
    c = trace_caustic(LensParams(1.1), 512)
    img = np.concatenate([a.image[:-1] for a in c.arcs])
    # cusp images sit one per semi-axis
    ims = [cu.image for cu in c.cusps]
    assert sorted(np.sign([z.real for z in ims[::2]])) == [-1, 1]
    assert sorted(np.sign([z.imag for z in ims[1::2]])) == [-1, 1]
    # closed: the last arc ends where the first starts
    assert abs(c.arcs[-1].image[-1] - c.arcs[0].image[0]) < 1e-12
    assert img.size > 0


def test_boundary_image():
    right, left = boundary_image(LensParams(2.01), 5.0, 1001)
    mid = right[500]
    assert mid.imag == pytest.approx(0.0, abs=1e-12)
    assert mid.real == pytest.approx(math.pi / 2 - 2.01, abs=1e-12)
    assert left[500].real == pytest.approx(-(math.pi / 2 - 2.01), abs=1e-12)
    far_r, _ = boundary_image(LensParams(2.01), 40.0, 11)
    assert far_r[0].real == pytest.approx(math.pi / 2, abs=1e-12)
    with pytest.raises(ValueError):
        boundary_image(LensParams(1.0), 0.0)


def test_distance_to_curves():
    p = LensParams(1.1)
    cusp = find_cusps(p)[0].image
    d = distance_to_curves(p, [cusp, cusp + 0.5, 100 + 0j])
    assert d[0] < 1e-9
    assert 0 < d[1] <= 0.5 + 1e-12
    assert d[2] > 90
