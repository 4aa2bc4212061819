import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sinlens.core import (InvalidParam, LensParams, PoleError, eval_f, f_values, format_complex,
                          g_prime, jacobian, jet, parse_complex, symmetry_images, wirtinger)

strip_x = st.floats(-1.5707, 1.5707)
ks = st.floats(0.01, 5.0)


def f_ref(k, z):
    # independent scalar reference: z - k / sin(conj z) via cmath
    return z - k / cmath.sin(z.conjugate())


def test_params_validation():
    with pytest.raises(InvalidParam):
        LensParams(0.0)
    with pytest.raises(InvalidParam):
        LensParams(-1.0)
    with pytest.raises(InvalidParam):
        LensParams(float("nan"))
    with pytest.raises(InvalidParam):
        LensParams(1.0, 1j)
    p = LensParams(2, 0.5)
    assert p.k == 2.0 and p.alpha == 0.5 + 0j
    assert p.k_eff == pytest.approx(1.5)
    assert p.target(2j) == pytest.approx(1.5j)


def test_value_on_imaginary_axis():
    # f(iy) = i (y - k / sinh y)
    got = complex(eval_f(LensParams(1.0), 1j))
    assert got.real == pytest.approx(0.0, abs=1e-15)
    assert got.imag == pytest.approx(1.0 - 1.0 / math.sinh(1.0), abs=1e-14)
    assert got.imag == pytest.approx(0.149082, abs=1e-6)


def test_value_on_strip_edge():
    got = complex(eval_f(LensParams(2.01), complex(math.pi / 2, 0)))
    assert got == pytest.approx(math.pi / 2 - 2.01, abs=1e-15)
    assert got.real == pytest.approx(-0.439204, abs=1e-6)


@given(k=ks, x=st.floats(0.01, 1.57))
def test_real_axis_is_real(k, x):
    v = complex(eval_f(LensParams(k), complex(x, 0.0)))
    assert v.imag == 0.0
    assert v.real == pytest.approx(x - k / math.sin(x), rel=1e-13)


def test_pole():
    p = LensParams(1.0)
    with pytest.raises(PoleError):
        eval_f(p, 0j)
    with pytest.raises(PoleError):
        eval_f(p, 1e-15 + 0j)
    assert np.isnan(f_values(p, np.array([0j, 1j]))[0])
    # evaluation is entire away from the poles, including outside the strip
    assert complex(eval_f(p, 2.0 + 0.5j)) == pytest.approx(f_ref(1.0, 2.0 + 0.5j))


@given(k=ks, x=strip_x, y=st.floats(-4, 4))
def test_matches_reference(k, x, y):
    z = complex(x, y)
    if abs(z) < 1e-3:
        return
    assert complex(eval_f(LensParams(k), z)) == pytest.approx(f_ref(k, z), rel=1e-12, abs=1e-12)


@given(k=ks, x=strip_x, y=st.floats(-4, 4))
def test_symmetries(k, x, y):
    z = complex(x, y)
    if abs(z) < 1e-3:
        return
    p = LensParams(k)
    fz = complex(eval_f(p, z))
    zc, zn, znc = symmetry_images(z)
    tol = 1e-12 * max(1.0, abs(fz))
    assert abs(complex(eval_f(p, zc)) - fz.conjugate()) <= tol
    assert abs(complex(eval_f(p, zn)) + fz) <= tol
    assert abs(complex(eval_f(p, znc)) + fz.conjugate()) <= tol


def test_symmetry_images_examples():
    assert symmetry_images(1 + 2j) == (1 - 2j, -1 - 2j, -1 + 2j)
    assert symmetry_images(0j) == (0, 0, 0)
    assert symmetry_images(1j) == (-1j, -1j, 1j)


def test_jet_examples():
    j = jet(LensParams(1.0), complex(math.pi / 4, 0))
    assert abs(j.d_zbar) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert j.jacobian == pytest.approx(-1.0, abs=1e-12)
    assert j.d_z == 1
    j = jet(LensParams(3.0), complex(math.pi / 2, 0.0))
    assert abs(j.d_zbar) < 1e-15 and j.jacobian == pytest.approx(1.0)


def test_wirtinger_finite_differences():
    rng = np.random.default_rng(0)
    h = 1e-6
    for _ in range(1000):
        k = rng.uniform(0.1, 4.0)
        z = complex(rng.uniform(-1.5, 1.5), rng.uniform(-3, 3))
        if abs(z) < 0.05:
            continue
        p = LensParams(k)
        _, a, b = wirtinger(p, z)
        fx = (complex(eval_f(p, z + h)) - complex(eval_f(p, z - h))) / (2 * h)
        fy = (complex(eval_f(p, z + 1j * h)) - complex(eval_f(p, z - 1j * h))) / (2 * h)
        a_fd, b_fd = 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)
        scale = max(1.0, abs(complex(a)), abs(complex(b)))
        assert abs(a_fd - complex(a)) / scale < 1e-5
        assert abs(b_fd - complex(b)) / scale < 1e-5


@given(k=ks, x=strip_x, y=st.floats(-3, 3))
def test_jacobian_is_one_minus_gprime_squared(k, x, y):
    z = complex(x, y)
    if abs(z) < 1e-2:
        return
    p = LensParams(k)
    j = jet(p, z)
    gp = complex(g_prime(k, z))
    assert j.d_zbar == pytest.approx(gp.conjugate(), rel=1e-13)
    assert j.jacobian == pytest.approx(1.0 - abs(gp) ** 2, rel=1e-12, abs=1e-12)


def test_jacobian_signs():
    p = LensParams(1.0)
    ring = 0.05 * np.exp(1j * np.linspace(0, 2 * np.pi, 32))
    assert np.all(jacobian(p, ring) < 0)
    assert np.all(jacobian(p, np.linspace(-1.5, 1.5, 31) + 5j) > 0)


def test_shear_form():
    p = LensParams(1.5, 0.2 - 0.1j)
    u = 0.3 + 0.4j
    k1 = 1.5 * (1 - abs(p.alpha) ** 2)
    want = u + p.alpha * u.conjugate() - k1 / cmath.sin(u.conjugate())
    assert complex(eval_f(p, u)) == pytest.approx(want, rel=1e-14)
    _, a, b = wirtinger(p, u)
    assert complex(b) == pytest.approx(p.alpha + k1 * cmath.cos(u.conjugate()) / cmath.sin(u.conjugate()) ** 2)


@pytest.mark.parametrize("text,value", [
    ("0+0.67i", 0.67j), ("1-2i", 1 - 2j), ("-3.5", -3.5 + 0j), ("2i", 2j), ("-i", -1j),
    ("i", 1j), ("1e-3+2E2i", 1e-3 + 200j), (" 4 ", 4 + 0j), ("-0.5-0.25i", -0.5 - 0.25j),
])
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("bad", ["", "abc", "1+", "1+2", "2i3", "i i", "1+2ii"])
def test_parse_complex_rejects(bad):
    with pytest.raises(ValueError):
        parse_complex(bad)


@given(st.complex_numbers(allow_nan=False, allow_infinity=False, max_magnitude=1e12))
def test_format_parse_roundtrip(z):
    assert parse_complex(format_complex(z, 17)) == z
