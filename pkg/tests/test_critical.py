import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sinlens.core import InvalidParam, LensParams, g_prime, jacobian
from sinlens.critical import (BoundaryCase, Topology, critical_s, curve_pieces, quadratic_roots,
                              strip_endpoints, trace_critical)

K_VALUES = [0.3, 1.0, 1.1, 1.5, 1.92, 1.999, 2.0, 2.01, 2.5, 4.0]


def test_critical_s_examples():
    k = 1.0
    assert critical_s(LensParams(k), 0.0) == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-15)
    for k in (0.5, 1.92, 3.0):
        s0 = critical_s(LensParams(k), 0.0)
        assert s0.imag == 0 and 0 < s0.real < 1
        assert s0.real == pytest.approx(-k / 2 + math.sqrt(k * k / 4 + 1), abs=1e-15)
        sp = critical_s(LensParams(k), math.pi)
        assert sp.real == pytest.approx(k / 2 + math.sqrt(k * k / 4 + 1), abs=1e-14)
        assert abs(sp.imag) < 1e-14


def test_boundary_case():
    # for k > 2 both roots are imaginary where the curve meets the strip edge
    k = 2.5
    with pytest.raises(BoundaryCase):
        critical_s(LensParams(k), math.pi / 2)


@given(k=st.floats(0.05, 5), t=st.floats(0, 2 * math.pi))
def test_root_pairing(k, t):
    a, b = quadratic_roots(k, t)
    assert complex(a * b) == pytest.approx(-1.0, abs=1e-12)


def test_bifurcation_witness():
    # k^2 e^{2it} + 4 vanishes for a real t only when k = 2 (at t = pi/2)
    t = np.linspace(0, 2 * np.pi, 200001)
    for k in (1.5, 1.99, 2.01, 3.0):
        assert np.min(np.abs(k * k * np.exp(2j * t) + 4)) > 1e-3
    assert abs(4 * np.exp(1j * np.pi) + 4) < 1e-12


@pytest.mark.parametrize("k", K_VALUES)
def test_trace_on_curve_and_in_strip(k):
    c = trace_critical(LensParams(k), 256)
    z = c.points()
    assert np.max(np.abs(np.abs(g_prime(k, z)) - 1)) < 1e-10
    assert np.all(np.abs(z.real) <= math.pi / 2 + 1e-15)
    for arc in c.arcs:
        assert np.all(np.diff(arc.t) > 0)
    assert c.topology is (Topology.ONE_LOOP if k < 2 else Topology.FOUR_ARCS)
    assert len(c.arcs) == (1 if k < 2 else 4)


def _hausdorff(a, b):
    da = np.min(np.abs(a[:, None] - b[None, :]), axis=1).max()
    db = np.min(np.abs(b[:, None] - a[None, :]), axis=1).max()
    return max(da, db)


@pytest.mark.parametrize("k", [1.1, 1.92, 2.01, 3.0])
def test_fourfold_symmetry(k):
    c = trace_critical(LensParams(k), 256)
    z = c.points()
    step = np.max(np.abs(np.diff(c.arcs[0].z)))
    for img in (np.conj(z), -z):
        assert _hausdorff(z, img) < 2 * step


def test_loop_is_counterclockwise_and_encloses_pole():
    c = trace_critical(LensParams(1.1), 512)
    z = c.arcs[0].z
    assert c.arcs[0].closed and z[0] == z[-1]
    area = 0.5 * np.sum((np.conj(z[:-1]) * z[1:]).imag)
    assert area > 0
    # the enclosed region is D-: J < 0 inside, near the pole
    assert jacobian(LensParams(1.1), 0.01 + 0.01j) < 0


def test_strip_endpoints():
    v1, v2, t0 = strip_endpoints(LensParams(2.0))
    assert t0 == pytest.approx(math.asinh(1.0), abs=1e-15)
    assert t0 == pytest.approx(0.881374, abs=1e-6)
    assert v1 == v2
    v1, v2, t0 = strip_endpoints(LensParams(2.01))
    assert math.sinh(t0) == pytest.approx(1.005 - math.sqrt(0.010025), abs=1e-14)
    # asinh(0.904875) = 0.812486 (a quoted 0.810695 does not satisfy the formula)
    assert math.sinh(t0) == pytest.approx(0.904875, abs=1e-6)
    assert t0 == pytest.approx(0.812486, abs=1e-6)
    assert v2.imag < v1.imag < 0 and v1.real == -math.pi / 2
    for v in (v1, v2):
        assert abs(abs(complex(g_prime(2.01, v))) - 1) < 1e-10
    for k in (2.2, 3.0, 5.0):
        assert math.sinh(strip_endpoints(LensParams(k))[2]) < 1
    with pytest.raises(InvalidParam):
        strip_endpoints(LensParams(1.9))


@pytest.mark.parametrize("k", K_VALUES)
def test_pieces_chain(k):
    pieces = curve_pieces(LensParams(k))
    assert len(pieces) == (4 if k < 2 else 8)
    for p in pieces:
        z = p(k, np.array([0.0, 1e-9, 0.5, 1 - 1e-9, 1.0]))
        assert abs(z[0] - z[1]) < 1e-4 and abs(z[-1] - z[-2]) < 1e-4
    if k < 2:
        for a, b in zip(pieces, pieces[1:] + pieces[:1]):
            assert a.z_hi == b.z_lo


def test_samples_minimum():
    with pytest.raises(InvalidParam):
        trace_critical(LensParams(1.0), 8)
