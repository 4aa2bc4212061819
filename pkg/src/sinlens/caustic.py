"""Cusps of the caustic, the caustic itself, and the image of the strip boundary."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import HALF_PI, InvalidParam, LensParams, f_values, g_prime, g_second
from .critical import TWO_PI, Piece, axis_points, curve_pieces
from .curves import CurveSet, SampledCurve

K_LOW = 2.0 / np.sqrt(3.0)
K_HIGH = 2.0
THRESHOLD_EPS = 1e-12


class CuspFamily(enum.Enum):
    AXIS_REAL = "AxisReal"
    AXIS_IMAG = "AxisImag"
    OBLIQUE = "Oblique"


@dataclass(frozen=True)
class Cusp:
    z: complex
    image: complex
    family: CuspFamily
    t: float
    s: complex
    r: float


def p_cubic(k: float, r):
    """p(r) = r^3 - 3r^2 + (k^2 - 1) r - 1."""
    r = np.asarray(r, dtype=float)
    return ((r - 3.0) * r + (k * k - 1.0)) * r - 1.0


def _p_shifted(k: float, r: float) -> float:
    # same cubic written as x^3 + (k^2 - 4)(x + 1), x = r - 1; the sign stays
    # reliable next to the triple root at k = 2
    x = r - 1.0
    return x * x * x + (k - 2.0) * (k + 2.0) * (x + 1.0)


def positive_root_p(k: float, tol: float = 1e-14) -> float:
    """The unique positive root r(k) of p, by bisection on (0, 4)."""
    if k <= 0:
        raise InvalidParam("k must be positive")
    lo, hi = 0.0, 4.0
    # p(0) = -1 < 0 and p(4) = 11 + 4k^2 > 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _p_shifted(k, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def p_critical_points(k: float) -> tuple[float, float]:
    """Real critical points 1 -+ sqrt((4 - k^2)/3) of p (requires k < 2)."""
    if not 0 < k < 2:
        raise InvalidParam("p has real critical points only for 0 < k < 2")
    d = np.sqrt((4.0 - k * k) / 3.0)
    return 1.0 - d, 1.0 + d


def cusp_ratio(k: float, z):
    """(g'')^2 / (g')^3, real and positive exactly at cusp preimages on the curve."""
    return g_second(k, z) ** 2 / g_prime(k, z) ** 3


def curve_param(k: float, z) -> float:
    """t = -arg g'(z) in [0, 2 pi)."""
    return float(np.mod(-np.angle(g_prime(k, z)), TWO_PI))


def _cusp(params: LensParams, z: complex, family: CuspFamily, t: float | None = None) -> Cusp:
    k = params.k
    s = complex(np.cos(z))
    if t is None:
        t = curve_param(k, z)
    return Cusp(z, complex(f_values(params, z)), family, t, s, abs(s) ** 2)


def axis_cusps(params: LensParams) -> list[Cusp]:
    x1, c = axis_points(params.k)
    return [
        _cusp(params, complex(x1, 0.0), CuspFamily.AXIS_REAL, 0.0),
        _cusp(params, complex(0.0, c), CuspFamily.AXIS_IMAG, np.pi),
        _cusp(params, complex(-x1, 0.0), CuspFamily.AXIS_REAL, 0.0),
        _cusp(params, complex(0.0, -c), CuspFamily.AXIS_IMAG, np.pi),
    ]


def oblique_s(k: float) -> list[complex]:
    """Values s = cos z of the off-axis cusps that lie in Re s > 0 (possibly none)."""
    if k <= K_LOW + THRESHOLD_EPS or k >= K_HIGH - THRESHOLD_EPS:
        return []
    r = positive_root_p(k)
    c2 = (1.0 - k * k * r + r * r) / (2.0 * r)
    theta = 0.5 * np.arccos(np.clip(c2, -1.0, 1.0))
    out = []
    for ang in (theta, -theta, np.pi - theta, theta - np.pi):
        s = np.sqrt(r) * np.exp(1j * ang)
        # sign of Re((1+s^2)^2/s^3) is that of cos(t)(r^2 - 1)
        if np.cos(ang) * (r * r - 1.0) > 0 and s.real > 0:
            out.append(complex(s))
    return out


def find_cusps(params: LensParams) -> list[Cusp]:
    """All cusp preimages on the critical curve: z1..z4 on the axes, then
    (for 2/sqrt3 < k < 2) one oblique point per quadrant, ordered Q1..Q4."""
    if params.sheared:
        raise InvalidParam("cusps are computed for alpha = 0 only")
    cusps = axis_cusps(params)
    oblique = []
    for s in oblique_s(params.k):
        z = complex(np.arccos(s))
        oblique.extend([z, -z])
    oblique.sort(key=lambda z: _quadrant(z))
    cusps.extend(_cusp(params, z, CuspFamily.OBLIQUE) for z in oblique)
    return cusps


def _quadrant(z: complex) -> int:
    if z.real > 0:
        return 1 if z.imag > 0 else 4
    return 2 if z.imag > 0 else 3


def boundary_line(params: LensParams, side: int, im_limit: float):
    """Image of Re z = side*pi/2 as a curve of u in [0, 1] (y from -im_limit up)."""
    k = params.k_eff

    def fn(u):
        y = -im_limit + 2.0 * im_limit * np.asarray(u, dtype=float)
        return side * (HALF_PI - k / np.cosh(y)) + 1j * y
    return fn


def boundary_image(params: LensParams, im_limit: float, samples: int = 1024):
    """Images of the lines Re z = +-pi/2 for |Im z| <= im_limit: (right, left)."""
    if im_limit <= 0:
        raise ValueError("im_limit must be positive")
    u = np.linspace(0.0, 1.0, samples)
    return boundary_line(params, 1, im_limit)(u), boundary_line(params, -1, im_limit)(u)


@dataclass
class CausticArc:
    z: np.ndarray          # preimage samples on the critical curve
    t: np.ndarray          # unwrapped curve parameter, increasing
    image: np.ndarray      # f(z)
    tangent_arg: np.ndarray  # unwrapped argument of consecutive chords
    start_cusp: bool
    end_cusp: bool


@dataclass
class Caustic:
    k: float
    arcs: list[CausticArc]
    cusps: list[Cusp]
    pieces: list = field(default_factory=list, repr=False)

    def points(self) -> np.ndarray:
        return np.concatenate([a.image for a in self.arcs])


def _split_pieces(params: LensParams, cusps: list[Cusp]) -> list[Piece]:
    """Quadrant pieces of the critical curve cut at oblique cusps."""
    out = []
    for p in curve_pieces(params):
        inner = [c for c in cusps if c.family is CuspFamily.OBLIQUE
                 and _quadrant(c.z) == p.quadrant and p.t_lo < c.t < p.t_hi]
        if not inner:
            out.append(p)
            continue
        c = inner[0]
        out.append(Piece(p.quadrant, p.t_lo, c.t, p.z_lo, c.z))
        out.append(Piece(p.quadrant, c.t, p.t_hi, c.z, p.z_hi))
    return out


def _is_cusp_point(z: complex, cusps: list[Cusp]) -> bool:
    return any(abs(z - c.z) < 1e-12 for c in cusps)


def trace_caustic(params: LensParams, samples_per_arc: int = 2048) -> Caustic:
    """Sample the caustic arc by arc, each arc running between consecutive cusps
    (or from a cusp to the strip boundary when k >= 2), in increasing t."""
    cusps = find_cusps(params)
    pieces = _split_pieces(params, cusps)
    k = params.k
    arcs = []
    u = np.linspace(0.0, 1.0, samples_per_arc)
    for p in pieces:
        z = p(k, u)
        t = p.t_lo + (p.t_hi - p.t_lo) * u
        img = f_values(params, z)
        ang = np.unwrap(np.angle(np.diff(img)))
        arcs.append(CausticArc(z, t, img, ang,
                               _is_cusp_point(p.z_lo, cusps), _is_cusp_point(p.z_hi, cusps)))
    return Caustic(k, arcs, cusps, pieces)


def piece_image_fn(params: LensParams, piece: Piece):
    k = params.k

    def fn(u):
        return f_values(params, piece(k, u))
    return fn


@lru_cache(maxsize=32)
def curve_set(params: LensParams, im_limit: float) -> CurveSet:
    """Caustic plus strip-boundary image, for distance queries."""
    curves = []
    for j, p in enumerate(_split_pieces(params, find_cusps(params))):
        curves.append(SampledCurve.build(piece_image_fn(params, p), f"caustic{j}",
                                         tol=1e-4, max_len=0.02))
    for side in (1, -1):
        curves.append(SampledCurve.build(boundary_line(params, side, im_limit),
                                         f"boundary{side:+d}", tol=1e-4, max_len=0.02))
    return CurveSet(curves)


def distance_to_curves(params: LensParams, ws, im_limit: float | None = None) -> np.ndarray:
    """Distance from w to the caustic union the image of the strip boundary."""
    ws = np.atleast_1d(np.asarray(ws, dtype=complex))
    if im_limit is None:
        im_limit = float(np.ceil(np.max(np.abs(ws.imag)) + params.k + 3.0))
    return curve_set(params, im_limit).distance(ws)
