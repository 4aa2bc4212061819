"""Winding numbers of closed image curves, and the indices of f(dD-) and f(dD+)."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .core import HALF_PI, LensParams, f_values
from .critical import curve_pieces
from .curves import adaptive_sample

ON_CURVE = 1e-9
MAX_ANGLE = 0.5 * np.pi


class OnCurveError(ValueError):
    """The query point lies on the curve, so the index is undefined."""


@dataclass
class OrientedLoop:
    """Closed polyline. `param`/`curve` (optional) let the winding routine
    insert exact curve points where the sampling is too coarse."""
    points: np.ndarray
    orientation_note: str = ""
    param: np.ndarray | None = None
    curve: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)
        if len(self.points) < 8:
            raise ValueError("a loop needs at least 8 points")
        if self.points[0] != self.points[-1]:
            raise ValueError("loop is not closed (first point != last point)")
        if (self.param is None) != (self.curve is None):
            raise ValueError("param and curve go together")


def _segment_distance(p: np.ndarray, w: complex) -> float:
    a, b = p[:-1], p[1:]
    ab = b - a
    L2 = np.abs(ab) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = np.where(L2 > 0, ((w - a) * np.conj(ab)).real / L2, 0.0)
    tau = np.clip(tau, 0.0, 1.0)
    return float(np.min(np.abs(a + tau * ab - w)))


def _turning(d: np.ndarray) -> np.ndarray:
    return np.angle(d[..., 1:] / d[..., :-1])


def winding_number(loop: OrientedLoop, w: complex, max_passes: int = 60) -> int:
    """Integer winding number of the loop about w.

    Sums the signed angle each segment subtends at w. When the loop carries a
    curve function, segments subtending pi/2 or more are bisected with exact
    curve points until none is left.
    """
    w = complex(w)
    pts, par = loop.points, loop.param
    for _ in range(max_passes):
        d = pts - w
        if np.min(np.abs(d)) < ON_CURVE:
            raise OnCurveError(f"{w} lies on the curve")
        ang = _turning(d)
        bad = np.abs(ang) >= MAX_ANGLE
        if not bad.any() or loop.curve is None:
            break
        idx = np.nonzero(bad)[0]
        pm = 0.5 * (par[idx] + par[idx + 1])
        par = np.insert(par, idx + 1, pm)
        pts = np.insert(pts, idx + 1, loop.curve(pm))
    else:
        raise OnCurveError(f"sampling did not resolve the loop near {w}")
    if _segment_distance(pts, w) < ON_CURVE:
        raise OnCurveError(f"{w} lies on the curve")
    total = ang.sum() / (2.0 * np.pi)
    n = int(round(total))
    if abs(total - n) > 1e-6:
        raise OnCurveError(f"non-integer winding {total} at {w}")
    return n


def winding_numbers(loop: OrientedLoop, ws, chunk: int = 256) -> np.ndarray:
    """Vectorized winding_number over many w. On-curve points give a masked
    sentinel: the result is an int array with np.iinfo(int).min there."""
    ws = np.atleast_1d(np.asarray(ws, dtype=complex))
    out = np.empty(len(ws), dtype=np.int64)
    pts = loop.points
    for lo in range(0, len(ws), chunk):
        wc = ws[lo:lo + chunk]
        d = pts[None, :] - wc[:, None]
        ang = _turning(d)
        ok = (np.abs(ang).max(axis=1) < MAX_ANGLE) & (np.abs(d).min(axis=1) > 1e-6)
        out[lo:lo + chunk] = np.rint(ang.sum(axis=1) / (2.0 * np.pi)).astype(np.int64)
        for j in np.nonzero(~ok)[0]:
            try:
                out[lo + j] = winding_number(loop, wc[j])
            except OnCurveError:
                out[lo + j] = UNDEFINED
    return out


UNDEFINED = np.iinfo(np.int64).min


# --- region boundaries --------------------------------------------------------

def _segment(a: complex, b: complex):
    def fn(u):
        return a + (b - a) * np.asarray(u, dtype=float)
    return fn


def _reverse(fn):
    def rev(u):
        return fn(1.0 - np.asarray(u, dtype=float))
    return rev


def _piece_fn(k: float, piece):
    def fn(u):
        return piece(k, u)
    return fn


def chain_loop(params: LensParams, domain_pieces: Sequence[Callable], note: str,
               tol: float = 1e-3, max_len: float = 0.05) -> OrientedLoop:
    """Image under f of a closed chain of domain curves, each on u in [0, 1]."""
    images = [(lambda fn: (lambda u: f_values(params, fn(u))))(fn) for fn in domain_pieces]
    n = len(images)

    def curve(s):
        s = np.asarray(s, dtype=float)
        j = np.clip(np.floor(s).astype(int), 0, n - 1)
        u = s - j
        out = np.empty(s.shape, dtype=complex)
        for m in np.unique(j):
            sel = j == m
            out[sel] = images[m](u[sel])
        return out

    params_list, pts_list = [], []
    for j, img in enumerate(images):
        u, p = adaptive_sample(img, n0=32, tol=tol, max_len=max_len)
        params_list.append(u[:-1] + j)
        pts_list.append(p[:-1])
    par = np.concatenate(params_list + [np.array([float(n)])])
    pts = np.concatenate(pts_list + [pts_list[0][:1]])
    return OrientedLoop(pts, note, par, curve)


def dminus_chain(params: LensParams) -> list[Callable]:
    """Domain curves of dD- traversed with D- on the left: the critical curve
    counterclockwise, plus (k > 2) the strip-boundary intervals where J < 0."""
    k = params.k
    pieces = curve_pieces(params)
    chain = []
    for j, p in enumerate(pieces):
        chain.append(_piece_fn(k, p))
        nxt = pieces[(j + 1) % len(pieces)]
        if abs(p.z_hi - nxt.z_lo) > 1e-14:
            chain.append(_segment(p.z_hi, nxt.z_lo))
    return chain


def dplus_chains(params: LensParams, clip: float) -> list[list[Callable]]:
    """Closed domain chains whose union is the clipped dD+ (D+ on the left)."""
    k = params.k
    h = HALF_PI
    pieces = curve_pieces(params)
    rev = [(_reverse(_piece_fn(k, p))) for p in pieces]
    top_r, top_l = complex(h, clip), complex(-h, clip)
    bot_r, bot_l = complex(h, -clip), complex(-h, -clip)
    if k < 2.0:
        rect = [_segment(bot_r, top_r), _segment(top_r, top_l),
                _segment(top_l, bot_l), _segment(bot_l, bot_r)]
        # critical curve clockwise: reversed pieces in reverse order
        return [rect, rev[::-1]]
    p = pieces
    # p[0] ends at (h, t0), p[1] starts at (h, t1), etc.; see curve_pieces
    d1 = [_segment(p[7].z_lo, p[0].z_hi), rev[0], rev[7]]
    d3 = [_segment(p[1].z_lo, top_r), _segment(top_r, top_l),
          _segment(top_l, p[2].z_hi), rev[2], rev[1]]
    d2 = [_segment(p[3].z_lo, p[4].z_hi), rev[4], rev[3]]
    d4 = [_segment(p[5].z_lo, bot_l), _segment(bot_l, bot_r),
          _segment(bot_r, p[6].z_hi), rev[6], rev[5]]
    return [d1, d3, d2, d4]


def default_clip(params: LensParams, w) -> float:
    return max(10.0, float(np.max(np.abs(w))) + params.k + 5.0)


@lru_cache(maxsize=64)
def dminus_loop(params: LensParams) -> OrientedLoop:
    return chain_loop(params, dminus_chain(params), "D- on the left")


@lru_cache(maxsize=64)
def dplus_loops(params: LensParams, clip: float) -> tuple[OrientedLoop, ...]:
    return tuple(chain_loop(params, c, "D+ on the left") for c in dplus_chains(params, clip))


def index_dminus(params: LensParams, w: complex) -> int:
    """Index of f(dD-) about w, dD- oriented with D- on its left."""
    return winding_number(dminus_loop(params), w)


def _check_clip(params: LensParams, w, clip: float):
    if np.max(np.abs(w)) >= clip - params.k - 1.0:
        raise ValueError(f"clip {clip} too small for |w| = {np.max(np.abs(w))}")


def index_dplus(params: LensParams, w: complex, clip: float | None = None) -> int:
    """Index of f(dD+ clipped to |Im z| < clip) about w, D+ on the left."""
    if clip is None:
        clip = default_clip(params, w)
    _check_clip(params, w, clip)
    return sum(winding_number(loop, w) for loop in dplus_loops(params, float(clip)))


def indices_dminus(params: LensParams, ws) -> np.ndarray:
    return winding_numbers(dminus_loop(params), ws)


def indices_dplus(params: LensParams, ws, clip: float | None = None) -> np.ndarray:
    ws = np.atleast_1d(np.asarray(ws, dtype=complex))
    if clip is None:
        clip = default_clip(params, ws)
    _check_clip(params, ws, clip)
    parts = [winding_numbers(loop, ws) for loop in dplus_loops(params, float(clip))]
    total = np.sum(parts, axis=0)
    undefined = np.any([p == UNDEFINED for p in parts], axis=0)
    total[undefined] = UNDEFINED
    return total
