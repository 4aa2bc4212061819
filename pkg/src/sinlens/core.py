"""The lens map f(z) = z - k/sin(conj z) on the strip |Re z| < pi/2.

With a shear alpha != 0 the same machinery runs in the substituted variable
u = z - alpha*conj(z), where the equation becomes

    u + alpha*conj(u) - k1/sin(conj u) = w1,   k1 = k(1-|alpha|^2), w1 = w(1-|alpha|^2).

Every function here accepts Python complex scalars or numpy arrays.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

HALF_PI = 0.5 * np.pi

# |sin z| below this is treated as the pole at z = 0
POLE_EXCLUSION = 1e-13


class PoleError(ValueError):
    """Evaluation requested at (or numerically indistinguishable from) the pole."""


class InvalidParam(ValueError):
    pass


@dataclass(frozen=True)
class LensParams:
    k: float
    alpha: complex = 0j

    def __post_init__(self):
        k = float(self.k)
        if not np.isfinite(k) or k <= 0:
            raise InvalidParam(f"k must be positive, got {self.k!r}")
        alpha = complex(self.alpha)
        if alpha != 0 and abs(abs(alpha) - 1.0) < 1e-12:
            raise InvalidParam("|alpha| = 1 is excluded")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "alpha", alpha)

    @property
    def sheared(self) -> bool:
        return self.alpha != 0

    @property
    def shear_factor(self) -> float:
        """1 - |alpha|^2."""
        return 1.0 - abs(self.alpha) ** 2

    @property
    def k_eff(self) -> float:
        """Mass parameter of the map actually evaluated (k1 under shear)."""
        return self.k * self.shear_factor

    def target(self, w):
        """Right-hand side of the evaluated map for source position w."""
        return w * self.shear_factor if self.sheared else w


@dataclass(frozen=True)
class MapJet:
    value: complex
    d_z: complex
    d_zbar: complex
    jacobian: float
    gpp: complex


def _check_pole(sz):
    if np.any(np.abs(sz) < POLE_EXCLUSION):
        raise PoleError("evaluation at the pole z = 0")


def f_values(params: LensParams, z):
    """Map values with NaN at poles instead of raising. Array-friendly."""
    z = np.asarray(z, dtype=complex)
    zc = np.conj(z)
    with np.errstate(all="ignore"):
        sz = np.sin(zc)
        out = z + params.alpha * zc - params.k_eff / sz
    bad = np.abs(sz) < POLE_EXCLUSION
    if np.ndim(out) == 0:
        return complex(np.nan, np.nan) if bad else complex(out)
    out[bad] = np.nan
    return out


def eval_f(params: LensParams, z):
    """f(z) = z + conj(g(z)), g(z) = -k/sin z; sheared form when alpha != 0."""
    z = np.asarray(z, dtype=complex)
    _check_pole(np.sin(z))
    return f_values(params, z)


def g_prime(k: float, z):
    """g'(z) = k cos z / sin^2 z."""
    z = np.asarray(z, dtype=complex)
    s = np.sin(z)
    return k * np.cos(z) / (s * s)


def g_second(k: float, z):
    """g''(z) = -k (1 + cos^2 z) / sin^3 z."""
    z = np.asarray(z, dtype=complex)
    s = np.sin(z)
    c = np.cos(z)
    return -k * (1.0 + c * c) / (s * s * s)


def wirtinger(params: LensParams, z):
    """(f, f_z, f_zbar) as arrays, without pole checks."""
    z = np.asarray(z, dtype=complex)
    zc = np.conj(z)
    k = params.k_eff
    # overflow far up the strip yields inf/nan, which callers treat as divergence
    with np.errstate(all="ignore"):
        sz = np.sin(zc)
        cz = np.cos(zc)
        value = z + params.alpha * zc - k / sz
        d_zbar = params.alpha + k * cz / (sz * sz)
    return value, np.ones_like(value), d_zbar


def jet(params: LensParams, z) -> MapJet:
    z = complex(z)
    _check_pole(np.sin(z))
    value, d_z, d_zbar = wirtinger(params, z)
    value, d_z, d_zbar = complex(value), complex(d_z), complex(d_zbar)
    jac = abs(d_z) ** 2 - abs(d_zbar) ** 2
    # gpp is taken at u = z; for alpha = 0 that is g''(z)
    gpp = complex(g_second(params.k_eff, z))
    return MapJet(value, d_z, d_zbar, jac, gpp)


def jacobian(params: LensParams, z):
    """J = |f_z|^2 - |f_zbar|^2, vectorized."""
    _, a, b = wirtinger(params, z)
    return np.abs(a) ** 2 - np.abs(b) ** 2


def symmetry_images(z: complex) -> tuple[complex, complex, complex]:
    z = complex(z)
    return z.conjugate(), -z, -z.conjugate()


_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(
    rf"^\s*(?P<re>[+-]?{_NUM})?\s*(?:(?P<sign>[+-])?\s*(?P<im>{_NUM})?\s*(?P<i>[ij]))?\s*$"
)


def parse_complex(text: str) -> complex:
    """Parse `a+bi`, `a-bi`, `bi` or `a`. A bare `i` means 1i."""
    m = _COMPLEX_RE.match(text)
    if m is None or (m.group("re") is None and m.group("i") is None):
        raise ValueError(f"not a complex literal: {text!r}")
    re_part = m.group("re")
    if m.group("i") is None:
        return complex(float(re_part), 0.0)
    im_txt = m.group("im") or "1"
    sign = m.group("sign")
    if sign is None and re_part is not None:
        # `2i` or `-2i`: the matched "re" was really the imaginary coefficient
        if m.group("im") is not None:
            raise ValueError(f"not a complex literal: {text!r}")
        return complex(0.0, float(re_part))
    im = float(im_txt) * (-1.0 if sign == "-" else 1.0)
    return complex(float(re_part) if re_part is not None else 0.0, im)


def format_complex(z: complex, digits: int = 12) -> str:
    z = complex(z)
    re_s = f"{z.real:.{digits}g}"
    im = z.imag
    sign = "-" if (im < 0 or (im == 0 and np.signbit(im))) else "+"
    return f"{re_s}{sign}{abs(im):.{digits}g}i"
