"""Parametrized plane curves and adaptive polyline sampling."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree

# u in [0, 1] (array) -> complex points
CurveFn = Callable[[np.ndarray], np.ndarray]


def adaptive_sample(fn: CurveFn, n0: int = 64, tol: float = 1e-4,
                    max_len: float = 0.05, max_points: int = 200_000):
    """Sample fn on [0, 1], bisecting segments whose chord is long or sags.

    Returns (u, points) with u strictly increasing and both ends included.
    """
    u = np.linspace(0.0, 1.0, n0)
    p = fn(u)
    while len(u) < max_points:
        um = 0.5 * (u[:-1] + u[1:])
        pm = fn(um)
        chord = np.abs(p[1:] - p[:-1])
        sag = np.abs(pm - 0.5 * (p[1:] + p[:-1]))
        bad = (chord > max_len) | (sag > tol)
        # parameter resolution floor
        bad &= (u[1:] - u[:-1]) > 1e-13
        if not bad.any():
            break
        idx = np.nonzero(bad)[0]
        u = np.insert(u, idx + 1, um[idx])
        p = np.insert(p, idx + 1, pm[idx])
    return u, p


@dataclass
class SampledCurve:
    """A parametrized curve with a cached polyline, supporting exact-ish distance queries."""
    fn: CurveFn
    u: np.ndarray
    points: np.ndarray
    label: str = ""

    @classmethod
    def build(cls, fn: CurveFn, label: str = "", **kw) -> "SampledCurve":
        u, p = adaptive_sample(fn, **kw)
        return cls(fn, u, p, label)


class CurveSet:
    """Distances from query points to a collection of parametrized curves.

    A k-d tree over the polyline vertices gives a lower bound; queries that
    come close are refined by a bounded scalar minimization along the curve.
    """

    def __init__(self, curves: list[SampledCurve]):
        self.curves = curves
        pts = np.concatenate([c.points for c in curves])
        self._owner = np.concatenate([np.full(len(c.points), j) for j, c in enumerate(curves)])
        self._local = np.concatenate([np.arange(len(c.points)) for c in curves])
        self._tree = cKDTree(np.column_stack([pts.real, pts.imag]))
        seg = [np.abs(np.diff(c.points)).max() for c in curves if len(c.points) > 1]
        self._max_seg = max(seg) if seg else 0.0

    def _refine(self, w: complex, j: int, i: int) -> float:
        c = self.curves[j]
        lo = c.u[max(i - 1, 0)]
        hi = c.u[min(i + 1, len(c.u) - 1)]
        res = minimize_scalar(lambda v: abs(complex(c.fn(np.array([v]))[0]) - w),
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-14})
        return min(float(res.fun), float(np.abs(c.points[i] - w)))

    def distance(self, ws, refine_below: float = 1e-2, k_nearest: int = 8) -> np.ndarray:
        """Distance from each w to the union of curves.

        Values above `refine_below` are polyline-vertex distances (upper
        bounds that are accurate to half a segment length); values below
        are refined on the true curve.
        """
        ws = np.atleast_1d(np.asarray(ws, dtype=complex))
        q = np.column_stack([ws.real, ws.imag])
        kk = min(k_nearest, len(self._owner))
        d, idx = self._tree.query(q, k=kk)
        d = np.atleast_2d(d.reshape(len(ws), -1))
        idx = np.atleast_2d(idx.reshape(len(ws), -1))
        out = d[:, 0].copy()
        near = np.nonzero(d[:, 0] - 0.5 * self._max_seg < refine_below)[0]
        for n in near:
            # all vertices that could bound a segment closer than the nearest vertex
            cand = self._tree.query_ball_point(q[n], d[n, 0] + self._max_seg)
            best = out[n]
            for v in cand:
                j, i = int(self._owner[v]), int(self._local[v])
                pts = self.curves[j].points
                di = abs(pts[i] - ws[n])
                # only local minima of the vertex distance along the curve
                if i > 0 and abs(pts[i - 1] - ws[n]) < di:
                    continue
                if i + 1 < len(pts) and abs(pts[i + 1] - ws[n]) < di:
                    continue
                best = min(best, self._refine(ws[n], j, i))
            out[n] = best
        return out
