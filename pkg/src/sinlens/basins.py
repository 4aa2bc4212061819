"""Basins of attraction of T(z) = w + k/sin(conj z).

Fixed points of T are exactly the solutions of f(z) = w, and a fixed point
attracts when |g'(z*)| < 1, i.e. at the orientation-preserving solutions. The
attractors are taken from the solver, and each pixel is labelled by the first
attractor its orbit comes within CAPTURE of.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import POLE_EXCLUSION, InvalidParam, LensParams, g_prime
from .solver import DEFAULT_RNG_SEED, Orientation, find_all

UNRESOLVED = -1
CAPTURE = 1e-6
ESCAPE_IM = 50.0
DEFAULT_MAX_ITER = 500

# white, gray, black for the first three attractors (descending Im), then extras
PALETTE = [(255, 255, 255), (128, 128, 128), (0, 0, 0),
           (31, 119, 180), (44, 160, 44), (255, 127, 14)]
UNRESOLVED_RGB = (214, 39, 40)


def T(params: LensParams, w: complex, z):
    z = np.asarray(z, dtype=complex)
    with np.errstate(all="ignore"):
        return w + params.k / np.sin(np.conj(z))


def attractors(params: LensParams, w: complex, rng_seed: int = DEFAULT_RNG_SEED) -> list[complex]:
    """Attracting fixed points of T, ordered by descending Im then Re."""
    if params.sheared:
        raise InvalidParam("basins are defined for alpha = 0")
    rep = find_all(params, w, rng_seed=rng_seed)
    pts = [s.z for s in rep.solutions
           if s.orientation is Orientation.PRESERVING and abs(complex(g_prime(params.k, s.z))) < 1.0]
    return sorted(pts, key=lambda z: (-z.imag, z.real))


def _iterate(params: LensParams, w: complex, z0: np.ndarray, att: np.ndarray, max_iter: int):
    """Vectorized orbit classification. Returns (labels, steps, endpoints)."""
    z = np.array(z0, dtype=complex).ravel()
    labels = np.full(z.size, UNRESOLVED, dtype=np.int16)
    steps = np.full(z.size, max_iter, dtype=np.int32)
    active = np.arange(z.size)
    for it in range(max_iter + 1):
        if active.size == 0:
            break
        za = z[active]
        d = np.abs(za[:, None] - att[None, :])
        j = np.argmin(d, axis=1)
        hit = d[np.arange(za.size), j] < CAPTURE
        labels[active[hit]] = j[hit]
        steps[active[hit]] = it
        # pole guard and escape: these orbits stay unresolved
        lost = ~np.isfinite(za) | (np.abs(za.imag) > ESCAPE_IM)
        with np.errstate(all="ignore"):
            lost |= np.abs(np.sin(np.conj(za))) < POLE_EXCLUSION
        steps[active[lost]] = it
        go = ~hit & ~lost
        active = active[go]
        if it < max_iter and active.size:
            z[active] = T(params, w, z[active])
    return labels, steps, z


def iterate_map(params: LensParams, w: complex, z0: complex, attractor_list,
                max_iter: int = DEFAULT_MAX_ITER) -> tuple[int, int]:
    """(attractor id or UNRESOLVED, steps taken) for one starting point."""
    att = np.asarray(attractor_list, dtype=complex)
    if att.size == 0:
        raise InvalidParam("no attractors")
    labels, steps, _ = _iterate(params, complex(w), np.array([z0]), att, max_iter)
    return int(labels[0]), int(steps[0])


@dataclass
class BasinImage:
    viewport: tuple[float, float, float, float]   # x0, x1, y0, y1 in the z-plane
    width: int
    height: int
    labels: np.ndarray     # (height, width), row 0 at the top (y1)
    attractors: list[complex]
    steps: np.ndarray
    max_iter: int = DEFAULT_MAX_ITER

    @property
    def resolved_fraction(self) -> float:
        return float(np.mean(self.labels != UNRESOLVED))

    def basin_count(self) -> int:
        return int(np.unique(self.labels[self.labels != UNRESOLVED]).size)

    def rgb(self) -> np.ndarray:
        pal = np.array([PALETTE[i % len(PALETTE)] for i in range(len(self.attractors))]
                       + [UNRESOLVED_RGB], dtype=np.uint8)
        return pal[np.where(self.labels == UNRESOLVED, len(self.attractors), self.labels)]


def pixel_centers(viewport, width: int, height: int) -> np.ndarray:
    x0, x1, y0, y1 = viewport
    xs = x0 + (np.arange(width) + 0.5) * (x1 - x0) / width
    ys = y1 - (np.arange(height) + 0.5) * (y1 - y0) / height
    return xs[None, :] + 1j * ys[:, None]


def render_basins(params: LensParams, w: complex, viewport=(-3.0, 3.0, -3.0, 3.0),
                  width: int = 400, height: int = 400, max_iter: int = DEFAULT_MAX_ITER,
                  attractor_list=None, rng_seed: int = DEFAULT_RNG_SEED) -> BasinImage:
    x0, x1, y0, y1 = viewport
    if width < 1 or height < 1 or not (x1 > x0 and y1 > y0):
        raise InvalidParam("bad viewport or image size")
    w = complex(w)
    att = attractors(params, w, rng_seed) if attractor_list is None else list(attractor_list)
    if not att:
        raise InvalidParam(f"no attracting fixed points for k={params.k}, w={w}")
    Z = pixel_centers(viewport, width, height)
    labels, steps, _ = _iterate(params, w, Z, np.asarray(att, dtype=complex), max_iter)
    return BasinImage(tuple(map(float, viewport)), width, height,
                      labels.reshape(height, width), att, steps.reshape(height, width), max_iter)
