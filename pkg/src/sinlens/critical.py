"""Closed-form tracing of the critical curve |g'(z)| = 1.

On the curve g'(z) = exp(-i t), and with s = cos z this is the quadratic
s^2 + k e^{it} s - 1 = 0. For every t exactly one root has Re s > 0 (the roots
multiply to -1), and its two preimages +-arccos(s) are the curve points with
parameter t. For t in (0, pi) the principal arccos lands in the first quadrant,
for t in (pi, 2 pi) in the fourth; negation gives the third and second.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import HALF_PI, InvalidParam, LensParams

TWO_PI = 2.0 * np.pi
BOUNDARY_EPS = 1e-12


class BoundaryCase(ArithmeticError):
    """Both roots of the quadratic are imaginary: the curve meets Re z = +-pi/2."""


class Topology(enum.Enum):
    ONE_LOOP = "OneLoop"
    FOUR_ARCS = "FourArcs"


@dataclass
class Arc:
    """A sampled piece of the critical curve.

    `t` is the curve parameter unwrapped so that it increases along the arc;
    the geometric parameter is `t % (2*pi)`.
    """
    z: np.ndarray
    t: np.ndarray
    closed: bool = False


@dataclass
class CriticalCurve:
    k: float
    arcs: list[Arc]
    topology: Topology
    endpoints: tuple[complex, complex, float] | None = None
    pieces: list = field(default_factory=list, repr=False)

    def points(self) -> np.ndarray:
        return np.concatenate([a.z for a in self.arcs])


def quadratic_roots(k: float, t):
    """Both roots of s^2 + k e^{it} s - 1 = 0, as (root_a, root_b)."""
    t = np.asarray(t, dtype=float)
    b = k * np.exp(1j * t)
    disc = np.sqrt(b * b + 4.0)
    return 0.5 * (-b + disc), 0.5 * (-b - disc)


def _s_positive(k: float, t):
    r1, r2 = quadratic_roots(k, t)
    return np.where(r1.real >= r2.real, r1, r2)


def critical_s(params: LensParams, t: float) -> complex:
    """Root s = cos z of the critical-curve quadratic with Re s > 0."""
    s = complex(_s_positive(params.k, t))
    if abs(s.real) < BOUNDARY_EPS:
        raise BoundaryCase(f"Re s = 0 at t = {t!r}")
    return s


# quadrant -> (sign of Re z, sign of Im z, t-interval start)
QUADRANTS = {
    1: (1.0, 1.0, 0.0),
    2: (-1.0, 1.0, np.pi),
    3: (-1.0, -1.0, 0.0),
    4: (1.0, -1.0, np.pi),
}


def quadrant_point(k: float, t, quadrant: int):
    """Critical-curve point(s) with parameter t lying in the given closed quadrant."""
    sx, sy, _ = QUADRANTS[quadrant]
    z = np.arccos(_s_positive(k, t))
    return sx * np.abs(z.real) + 1j * sy * np.abs(z.imag)


def strip_endpoints(params: LensParams) -> tuple[complex, complex, float]:
    """Endpoints v1, v2 of the curve on Re z = -pi/2 (Im v2 < Im v1 < 0) and t0."""
    k = params.k
    if k < 2.0:
        raise InvalidParam("strip endpoints exist only for k >= 2")
    root = np.sqrt(max(k * k / 4.0 - 1.0, 0.0))
    t0 = float(np.arcsinh(k / 2.0 - root))
    t1 = float(np.arcsinh(k / 2.0 + root))
    return complex(-HALF_PI, -t0), complex(-HALF_PI, -t1), t0


@dataclass(frozen=True)
class Piece:
    """A quadrant piece of the curve on a t-interval, for resampling."""
    quadrant: int
    t_lo: float
    t_hi: float
    z_lo: complex
    z_hi: complex

    def __call__(self, k: float, u):
        """Point at fractional position u in [0, 1]; endpoints are exact."""
        u = np.asarray(u, dtype=float)
        t = self.t_lo + (self.t_hi - self.t_lo) * u
        z = np.asarray(quadrant_point(k, t % TWO_PI, self.quadrant), dtype=complex)
        z = np.where(u <= 0.0, self.z_lo, z)
        z = np.where(u >= 1.0, self.z_hi, z)
        return z


def axis_points(k: float) -> tuple[float, float]:
    """(x1, c) with z1 = x1 > 0 and z2 = i c the axis points of the curve."""
    half = k / 2.0
    root = np.sqrt(half * half + 1.0)
    s_real = -half + root
    s_imag = half + root
    x1 = float(np.arccos(s_real))
    c = float(np.log(s_imag + np.sqrt(s_imag * s_imag - 1.0)))
    return x1, c


def curve_pieces(params: LensParams) -> list[Piece]:
    """Quadrant pieces in counterclockwise order (D- on the left).

    For k < 2 they chain into one loop z1 -> z2 -> z3 -> z4 -> z1. For k >= 2
    each quadrant piece is cut where it meets the strip boundary.
    """
    k = params.k
    x1, c = axis_points(k)
    z1, z2, z3, z4 = complex(x1, 0), complex(0, c), complex(-x1, 0), complex(0, -c)
    if k < 2.0:
        return [
            Piece(1, 0.0, np.pi, z1, z2),
            Piece(2, np.pi, TWO_PI, z2, z3),
            Piece(3, 0.0, np.pi, z3, z4),
            Piece(4, np.pi, TWO_PI, z4, z1),
        ]
    _, _, t0 = strip_endpoints(params)
    t1 = float(np.arcsinh(k / 2.0 + np.sqrt(k * k / 4.0 - 1.0)))
    h = HALF_PI
    return [
        Piece(1, 0.0, h, z1, complex(h, t0)),
        Piece(1, h, np.pi, complex(h, t1), z2),
        Piece(2, np.pi, 3 * h, z2, complex(-h, t1)),
        Piece(2, 3 * h, TWO_PI, complex(-h, t0), z3),
        Piece(3, 0.0, h, z3, complex(-h, -t0)),
        Piece(3, h, np.pi, complex(-h, -t1), z4),
        Piece(4, np.pi, 3 * h, z4, complex(h, -t1)),
        Piece(4, 3 * h, TWO_PI, complex(h, -t0), z1),
    ]


def _sample_piece(k: float, piece: Piece, n: int):
    u = np.linspace(0.0, 1.0, n)
    return piece(k, u), piece.t_lo + (piece.t_hi - piece.t_lo) * u


def trace_critical(params: LensParams, samples_per_arc: int = 2048) -> CriticalCurve:
    """Sample the critical curve at uniform t.

    k < 2: one closed counterclockwise loop (4 * samples_per_arc points).
    k >= 2: four open arcs, each joining two points of the strip boundary,
    listed in the order through z1, z2, z3 = -z1, z4 = -z2.
    """
    if samples_per_arc < 16:
        raise InvalidParam("samples_per_arc must be >= 16")
    k = params.k
    pieces = curve_pieces(params)
    if k < 2.0:
        zs, ts = [], []
        for j, p in enumerate(pieces):
            z, t = _sample_piece(k, p, samples_per_arc + 1)
            # unwrap: pieces 3 and 4 repeat the t-range of 1 and 2
            t = t + (TWO_PI if j >= 2 else 0.0)
            zs.append(z[:-1])
            ts.append(t[:-1])
        z = np.concatenate(zs + [zs[0][:1]])
        t = np.concatenate(ts + [np.array([2 * TWO_PI])])
        return CriticalCurve(k, [Arc(z, t, closed=True)], Topology.ONE_LOOP, None, pieces)

    half = samples_per_arc // 2 + 1
    arcs = []
    # an arc is the second half of one quadrant piece followed by the first
    # half of the next: (7,0) through z1, (1,2) through z2, (3,4), (5,6)
    for a, b in ((7, 0), (1, 2), (3, 4), (5, 6)):
        za, ta = _sample_piece(k, pieces[a], half)
        zb, tb = _sample_piece(k, pieces[b], half)
        if tb[0] < ta[-1]:
            tb = tb + TWO_PI
        arcs.append(Arc(np.concatenate([za, zb[1:]]), np.concatenate([ta, tb[1:]])))
    return CriticalCurve(k, arcs, Topology.FOUR_ARCS, strip_endpoints(params), pieces)
