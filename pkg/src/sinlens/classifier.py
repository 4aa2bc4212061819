"""Predicted solution counts (m reversing, n preserving) from curve indices.

The argument principle applied to D- (one pole inside) and to D+ (no poles)
turns the two indices into counts. The sign relating each index to its count
is not taken on faith: `calibrate` pins it once against the solver at a
reference point where both indices are nonzero, and every sweep re-checks it
on a few random cells.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .caustic import curve_set, distance_to_curves, find_cusps, trace_caustic
from .curves import CurveSet
from .core import InvalidParam, LensParams, jacobian
from .solver import DEFAULT_RNG_SEED, find_all, find_all_many
from .winding import (UNDEFINED, OnCurveError, default_clip, index_dminus, index_dplus,
                      indices_dminus, indices_dplus)

ON_CURVE_BAND = 1e-6
POLES_IN_DMINUS = 1
CALIBRATION_K = 1.1
CALIBRATION_W = 0j


class CalibrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Convention:
    """m = P - sign_minus * I(dD-),  n = sign_plus * I(dD+)."""
    sign_minus: int
    sign_plus: int
    poles: int = POLES_IN_DMINUS

    def counts(self, idx_minus, idx_plus):
        return self.poles - self.sign_minus * idx_minus, self.sign_plus * idx_plus


def pole_in_dminus(params: LensParams, radius: float = 1e-3) -> bool:
    """The pole at 0 lies in D-: J < 0 on a small circle around it."""
    z = radius * np.exp(1j * np.linspace(0.0, 2.0 * np.pi, 16, endpoint=False))
    return bool(np.all(jacobian(params, z) < 0))


@lru_cache(maxsize=1)
def calibrate(rng_seed: int = DEFAULT_RNG_SEED) -> Convention:
    params = LensParams(CALIBRATION_K)
    if not pole_in_dminus(params):
        raise CalibrationError("pole is not inside D-")
    rep = find_all(params, CALIBRATION_W, rng_seed=rng_seed)
    im, ip = index_dminus(params, CALIBRATION_W), index_dplus(params, CALIBRATION_W)
    if im == 0 or ip == 0:
        raise CalibrationError(f"calibration indices vanish: {im}, {ip}")
    s_minus, r1 = divmod(POLES_IN_DMINUS - rep.n_reversing, im)
    s_plus, r2 = divmod(rep.n_preserving, ip)
    if r1 or r2 or abs(s_minus) != 1 or abs(s_plus) != 1:
        raise CalibrationError(
            f"counts (m={rep.n_reversing}, n={rep.n_preserving}) do not match "
            f"indices ({im}, {ip}) up to sign")
    return Convention(int(s_minus), int(s_plus))


@dataclass
class RegionReport:
    w: complex
    idx_minus: int | None
    idx_plus: int | None
    m_predicted: int | None
    n_predicted: int | None
    m_solver: int
    n_solver: int
    consistent: bool
    on_curve: bool

    @property
    def total_predicted(self) -> int | None:
        if self.m_predicted is None:
            return None
        return self.m_predicted + self.n_predicted


def _require_unsheared(params: LensParams):
    if params.sheared:
        raise InvalidParam("the classifier handles alpha = 0 only")


def classify(params: LensParams, w: complex, rng_seed: int = DEFAULT_RNG_SEED) -> RegionReport:
    """Index-based (m, n) at w, cross-checked against the solver."""
    _require_unsheared(params)
    w = complex(w)
    conv = calibrate()
    rep = find_all(params, w, rng_seed=rng_seed)
    m_s, n_s = rep.n_reversing, rep.n_preserving
    near = float(distance_to_curves(params, [w])[0]) < ON_CURVE_BAND
    try:
        im, ip = index_dminus(params, w), index_dplus(params, w)
    except OnCurveError:
        near = True
    if near:
        return RegionReport(w, None, None, None, None, m_s, n_s, False, True)
    m, n = conv.counts(im, ip)
    return RegionReport(w, im, ip, int(m), int(n), m_s, n_s, (m, n) == (m_s, n_s), False)


@dataclass
class Prediction:
    """Vectorized predictions; entries with on_curve set carry no meaning."""
    ws: np.ndarray
    idx_minus: np.ndarray
    idx_plus: np.ndarray
    m: np.ndarray
    n: np.ndarray
    on_curve: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.m + self.n


def predict(params: LensParams, ws, clip: float | None = None) -> Prediction:
    _require_unsheared(params)
    ws = np.atleast_1d(np.asarray(ws, dtype=complex))
    conv = calibrate()
    im = indices_dminus(params, ws)
    ip = indices_dplus(params, ws, clip)
    on = (im == UNDEFINED) | (ip == UNDEFINED) | (distance_to_curves(params, ws) < ON_CURVE_BAND)
    m, n = conv.counts(np.where(on, 0, im), np.where(on, 0, ip))
    return Prediction(ws, im, ip, m, n, on)


@dataclass
class SpotCheck:
    w: complex
    predicted: tuple[int, int]
    solver: tuple[int, int]

    @property
    def ok(self) -> bool:
        return self.predicted == self.solver


@dataclass
class SweepResult:
    params: LensParams
    window: tuple[float, float, float, float]
    xs: np.ndarray
    ys: np.ndarray
    m: np.ndarray            # shape (ny, nx); row j is ys[j]
    n: np.ndarray
    on_curve: np.ndarray
    spot_checks: list[SpotCheck] = field(default_factory=list)

    @property
    def total(self) -> np.ndarray:
        return self.m + self.n

    @property
    def spot_checks_ok(self) -> bool:
        return all(s.ok for s in self.spot_checks)

    def rows(self):
        """(re_w, im_w, m, n, on_curve) per cell, row-major from the bottom."""
        for j, y in enumerate(self.ys):
            for i, x in enumerate(self.xs):
                on = bool(self.on_curve[j, i])
                yield (float(x), float(y), None if on else int(self.m[j, i]),
                       None if on else int(self.n[j, i]), on)


def grid(window, resolution: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    x0, x1, y0, y1 = window
    if not (x1 > x0 and y1 > y0):
        raise InvalidParam(f"empty window {window}")
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    W = xs[None, :] + 1j * ys[:, None]
    return xs, ys, W


def sweep(params: LensParams, window=(-2.0, 2.0, -2.0, 2.0), resolution: int = 64,
          spot_checks: int = 5, rng_seed: int = DEFAULT_RNG_SEED) -> SweepResult:
    """Label a resolution x resolution grid of w with predicted (m, n)."""
    if resolution < 16:
        raise InvalidParam("resolution must be at least 16")
    xs, ys, W = grid(window, resolution)
    pred = predict(params, W.ravel(), clip=default_clip(params, W.ravel()))
    shape = W.shape
    res = SweepResult(params, tuple(map(float, window)), xs, ys,
                      pred.m.reshape(shape), pred.n.reshape(shape), pred.on_curve.reshape(shape))
    off = np.flatnonzero(~pred.on_curve)
    if spot_checks and off.size:
        rng = np.random.default_rng(rng_seed)
        pick = rng.choice(off, size=min(spot_checks, off.size), replace=False)
        reports = find_all_many(params, pred.ws[pick], rng_seed=rng_seed)
        for i, rep in zip(pick, reports):
            res.spot_checks.append(SpotCheck(complex(pred.ws[i]),
                                             (int(pred.m[i]), int(pred.n[i])),
                                             (rep.n_reversing, rep.n_preserving)))
    return res


# --- crossing parity ---------------------------------------------------------

@dataclass
class Crossing:
    point: complex       # on the caustic
    normal: complex      # unit normal
    inner: complex
    outer: complex
    count_inner: int
    count_outer: int

    @property
    def jump(self) -> int:
        return self.count_inner - self.count_outer


def sample_crossings(params: LensParams, count: int = 100, delta: float = 1e-3,
                     rng_seed: int = DEFAULT_RNG_SEED, window: float = 2.5) -> list[Crossing]:
    """Short segments crossing the caustic transversally once, with solver
    counts at both ends.

    Crossing points are drawn on caustic arcs away from cusps. A segment is
    kept only when the crossing point is >= 2*delta from every other curve
    (boundary image, other caustic pieces) and both endpoints are >= delta/2
    from every curve. Arcs between cusps are convex, so the segment then
    meets the curve set exactly once.
    """
    _require_unsheared(params)
    rng = np.random.default_rng(rng_seed)
    caustic = trace_caustic(params, samples_per_arc=1024)
    cusp_images = np.array([c.image for c in find_cusps(params)])
    pts, nrm = [], []
    for arc in caustic.arcs:
        z = arc.image
        ok = np.isfinite(z) & (np.abs(z.real) < window) & (np.abs(z.imag) < window)
        tan = np.gradient(z)
        for i in np.flatnonzero(ok[1:-1]) + 1:
            if np.min(np.abs(cusp_images - z[i])) < 50 * delta or abs(tan[i]) == 0:
                continue
            pts.append(z[i])
            nrm.append(1j * tan[i] / abs(tan[i]))
    pts, nrm = np.array(pts), np.array(nrm)
    if pts.size == 0:
        return []
    order = rng.permutation(pts.size)
    singles = [CurveSet([c]) for c in curve_set(params, window + params.k + 3.0).curves]
    out: list[Crossing] = []
    for lo in range(0, order.size, 4 * count):
        idx = order[lo:lo + 4 * count]
        a, b = pts[idx] + delta * nrm[idx], pts[idx] - delta * nrm[idx]
        da = distance_to_curves(params, a)
        db = distance_to_curves(params, b)
        # distance to the nearest curve other than the one being crossed
        per_curve = np.sort(np.array([cs.distance(pts[idx]) for cs in singles]), axis=0)
        other = per_curve[1]
        good = np.flatnonzero((da >= 0.5 * delta) & (db >= 0.5 * delta) & (other >= 2 * delta))
        good = good[:count - len(out)]
        if good.size == 0:
            continue
        reps = find_all_many(params, np.concatenate([a[good], b[good]]), rng_seed=rng_seed)
        g = good.size
        for j, i in enumerate(good):
            out.append(Crossing(complex(pts[idx[i]]), complex(nrm[idx[i]]), complex(a[i]),
                                complex(b[i]), reps[j].count, reps[g + j].count))
        if len(out) >= count:
            break
    return out
