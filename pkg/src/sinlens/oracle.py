"""Brute-force root finder used to check the Newton solver.

Scans |f - w| on a dense grid over the strip, takes the grid local minima below
a threshold and polishes each with a derivative-free simplex descent. Nothing
here uses derivatives of f or the Newton code.
"""
from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .core import HALF_PI, LensParams, f_values, jacobian
from .solver import Solution, orientation_of

MIN_THRESHOLD = 0.05
ACCEPT = 1e-10
DEDUP = 1e-6
DEFAULT_DENSITY = 2000


def _objective(params: LensParams, z: np.ndarray, w: np.ndarray) -> np.ndarray:
    v = np.abs(f_values(params, z) - w)
    v[~np.isfinite(v) | (np.abs(z.real) >= HALF_PI)] = np.inf
    return v


def _simplex(params: LensParams, center: np.ndarray, w: np.ndarray, h: np.ndarray):
    V = np.stack([center, center + h, center + 1j * h], axis=1)
    F = np.stack([_objective(params, V[:, j], w) for j in range(3)], axis=1)
    return V, F


def simplex_descent(params: LensParams, z0: np.ndarray, w, size,
                    max_iter: int = 600, restart_every: int = 120):
    """Vectorized Nelder-Mead on |f(z) - w| in the plane, one simplex per start.

    Returns (z_best, residual).
    """
    z0 = np.asarray(z0, dtype=complex)
    m = z0.size
    w = np.broadcast_to(np.asarray(w, dtype=complex), (m,))
    size = np.broadcast_to(np.asarray(size, dtype=float), (m,))
    V, F = _simplex(params, z0, w, size)
    tol = 1e-13 * np.maximum(1.0, np.abs(w))
    rows = np.arange(m)
    for it in range(1, max_iter + 1):
        order = np.argsort(F, axis=1)
        V = V[rows[:, None], order]
        F = F[rows[:, None], order]
        live = np.flatnonzero(F[:, 0] >= tol)
        if live.size == 0:
            break
        Vl, Fl, wl = V[live], F[live], w[live]
        c = 0.5 * (Vl[:, 0] + Vl[:, 1])
        xr = 2.0 * c - Vl[:, 2]
        xe = 3.0 * c - 2.0 * Vl[:, 2]
        xo = 0.5 * (c + xr)
        xi = 0.5 * (c + Vl[:, 2])
        fr = _objective(params, xr, wl)
        fe = _objective(params, xe, wl)
        fo = _objective(params, xo, wl)
        fi = _objective(params, xi, wl)
        f0, f1, f2 = Fl[:, 0], Fl[:, 1], Fl[:, 2]

        new_v = Vl[:, 2].copy()
        new_f = f2.copy()
        expand = fr < f0
        take_e = expand & (fe < fr)
        take_r = (expand & ~take_e) | ((fr >= f0) & (fr < f1))
        outside = (fr >= f1) & (fr < f2)
        inside = fr >= f2
        new_v[take_e], new_f[take_e] = xe[take_e], fe[take_e]
        new_v[take_r], new_f[take_r] = xr[take_r], fr[take_r]
        oc = outside & (fo <= fr)
        new_v[oc], new_f[oc] = xo[oc], fo[oc]
        ic = inside & (fi < f2)
        new_v[ic], new_f[ic] = xi[ic], fi[ic]
        shrink = (outside & ~oc) | (inside & ~ic)
        Vl[:, 2], Fl[:, 2] = new_v, new_f
        if shrink.any():
            s = np.flatnonzero(shrink)
            for j in (1, 2):
                Vl[s, j] = Vl[s, 0] + 0.5 * (Vl[s, j] - Vl[s, 0])
                Fl[s, j] = _objective(params, Vl[s, j], wl[s])
        if it % restart_every == 0:
            # rebuild collapsed simplices around the current best point
            span = np.maximum(np.abs(Vl[:, 1] - Vl[:, 0]), np.abs(Vl[:, 2] - Vl[:, 0]))
            Vl, Fl = _simplex(params, Vl[:, 0], wl, np.maximum(4.0 * span, 1e-12))
        V[live], F[live] = Vl, Fl
    best = np.argmin(F, axis=1)
    return V[rows, best], F[rows, best]


class OracleGrid:
    """f sampled once on a grid over the strip, reusable for many w."""

    def __init__(self, params: LensParams, y_half: float, density: int = DEFAULT_DENSITY):
        if params.sheared:
            raise ValueError("the oracle handles alpha = 0")
        self.params = params
        nx, ny = int(density), 2 * int(density)
        self.x = np.linspace(-HALF_PI, HALF_PI, nx)
        self.y = np.linspace(-y_half, y_half, ny)
        self.hx = self.x[1] - self.x[0]
        self.hy = self.y[1] - self.y[0]
        Z = self.x[None, :] + 1j * self.y[:, None]
        F = np.full((ny + 2, nx + 2), np.nan + 0j)
        F[1:-1, 1:-1] = f_values(params, Z)
        self.F = F
        self._tree = None
        self._tree_nodes = None

    def _grid_z(self, flat_padded: np.ndarray) -> np.ndarray:
        nxp = self.F.shape[1]
        i, j = np.divmod(flat_padded, nxp)
        return self.x[j - 1] + 1j * self.y[i - 1]

    def _local_minima(self, cand: np.ndarray, w: complex) -> np.ndarray:
        """Subset of padded flat indices that are grid local minima of |F - w|."""
        if cand.size == 0:
            return cand
        nxp = self.F.shape[1]
        Ff = self.F.ravel()
        d0 = np.abs(Ff[cand] - w)
        keep = np.ones(cand.size, dtype=bool)
        for off in (-nxp - 1, -nxp, -nxp + 1, -1, 1, nxp - 1, nxp, nxp + 1):
            dn = np.abs(Ff[cand + off] - w)
            dn[~np.isfinite(dn)] = np.inf
            keep &= d0 <= dn
        return cand[keep]

    def candidates(self, w: complex) -> np.ndarray:
        D = np.abs(self.F - w)
        D[~np.isfinite(D)] = np.inf
        cand = np.flatnonzero(D < MIN_THRESHOLD)
        return self._local_minima(cand, w)

    def _build_tree(self, ws: np.ndarray):
        Ff = self.F.ravel()
        pad = MIN_THRESHOLD
        sel = (np.isfinite(Ff)
               & (Ff.real > ws.real.min() - pad) & (Ff.real < ws.real.max() + pad)
               & (Ff.imag > ws.imag.min() - pad) & (Ff.imag < ws.imag.max() + pad))
        nodes = np.flatnonzero(sel)
        self._tree_nodes = nodes
        self._tree = cKDTree(np.column_stack([Ff[nodes].real, Ff[nodes].imag]))

    def find(self, ws) -> list[list[Solution]]:
        ws = np.atleast_1d(np.asarray(ws, dtype=complex))
        if len(ws) == 1:
            cands = [self.candidates(ws[0])]
        else:
            self._build_tree(ws)
            hits = self._tree.query_ball_point(np.column_stack([ws.real, ws.imag]), MIN_THRESHOLD)
            cands = [self._local_minima(self._tree_nodes[np.asarray(h, dtype=int)], w)
                     for h, w in zip(hits, ws)]
        starts = np.concatenate([self._grid_z(c) for c in cands]) if cands else np.empty(0, complex)
        owner = np.concatenate([np.full(c.size, j) for j, c in enumerate(cands)]) if cands else np.empty(0, int)
        out: list[list[Solution]] = [[] for _ in ws]
        if starts.size == 0:
            return out
        h = 0.5 * min(self.hx, self.hy)
        zb, fb = simplex_descent(self.params, starts, ws[owner], np.full(starts.size, h))
        for j in range(len(ws)):
            mine = (owner == j) & (fb < ACCEPT) & (np.abs(zb.real) < HALF_PI) & (zb != 0)
            zz, ff = zb[mine], fb[mine]
            roots = []
            for idx in np.argsort(ff, kind="stable"):
                if all(abs(zz[idx] - r) >= DEDUP for r in roots):
                    roots.append(zz[idx])
            sols = []
            for z in roots:
                jac = float(jacobian(self.params, z))
                res = float(abs(complex(f_values(self.params, z)) - ws[j]))
                sols.append(Solution(complex(z), orientation_of(jac), res, jac))
            sols.sort(key=lambda s: (-s.z.imag, s.z.real))
            out[j] = sols
        return out


def oracle_find_all(params: LensParams, w: complex, grid_density: int = DEFAULT_DENSITY) -> list[Solution]:
    """Roots of f(z) = w found by grid scan plus simplex polishing.

    A coarse grid can miss roots that sit closer together than the grid
    spacing; that is expected behaviour, not an error.
    """
    y_half = max(1.0, abs(w) + params.k) + 0.5
    return OracleGrid(params, y_half, grid_density).find([w])[0]
