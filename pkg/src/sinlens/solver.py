"""All solutions of f(z) = w in the strip by multi-start Newton iteration.

Newton for a harmonic map linearizes f(z + dz) = f + a dz + b conj(dz) with the
Wirtinger pair a = f_z, b = f_zbar; solving a dz + b conj(dz) = r gives

    dz = (conj(a) r - b conj(r)) / (|a|^2 - |b|^2).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import HALF_PI, POLE_EXCLUSION, InvalidParam, LensParams, f_values, wirtinger

WALL = HALF_PI - 1e-12
DEDUP_RADIUS = 1e-6
RESIDUAL_OK = 1e-10
DEGENERATE_J = 1e-8
STALL_J = 1e-8
JITTER = 1e-4
MAX_JITTERS = 3
MAX_STEP = 2.0
DEFAULT_SEEDS = (61, 121)
DEFAULT_RNG_SEED = 42


class Orientation(enum.Enum):
    PRESERVING = "Preserving"
    REVERSING = "Reversing"
    DEGENERATE = "Degenerate"


def orientation_of(jac: float) -> Orientation:
    if abs(jac) < DEGENERATE_J:
        return Orientation.DEGENERATE
    return Orientation.PRESERVING if jac > 0 else Orientation.REVERSING


@dataclass(frozen=True)
class Solution:
    z: complex
    orientation: Orientation
    residual: float
    jacobian: float


@dataclass
class SolveReport:
    solutions: list[Solution]
    seeds_used: int
    oracle_agreement: bool | None = None
    violation: str | None = None
    params: LensParams | None = field(default=None, repr=False)
    w: complex | None = None

    @property
    def count(self) -> int:
        return len(self.solutions)

    def counts_by_orientation(self) -> dict[str, int]:
        out = {o.value: 0 for o in Orientation}
        for s in self.solutions:
            out[s.orientation.value] += 1
        return out

    @property
    def n_preserving(self) -> int:
        return sum(s.orientation is Orientation.PRESERVING for s in self.solutions)

    @property
    def n_reversing(self) -> int:
        return sum(s.orientation is Orientation.REVERSING for s in self.solutions)

    @property
    def has_degenerate(self) -> bool:
        return any(s.orientation is Orientation.DEGENERATE for s in self.solutions)


def _newton(params: LensParams, target: np.ndarray, z: np.ndarray, max_iter: int,
            rng: np.random.Generator, im_cap: float):
    """Vectorized Newton. Returns (z, converged mask)."""
    z = np.array(z, dtype=complex)
    target = np.broadcast_to(np.asarray(target, dtype=complex), z.shape).copy()
    n = z.size
    done = np.zeros(n, dtype=bool)
    tol = 1e-12 * np.maximum(1.0, np.abs(target))
    jitters = np.zeros(n, dtype=np.int8)
    walled = np.zeros(n, dtype=np.int8)
    active = np.arange(n)
    for _ in range(max_iter + 1):
        if active.size == 0:
            break
        za = z[active]
        val, a, b = wirtinger(params, za)
        r = target[active] - val
        conv = np.abs(r) < tol[active]
        done[active[conv]] = True
        keep = ~conv & np.isfinite(r)
        za, a, b, r, idx = za[keep], a[keep], b[keep], r[keep], active[keep]
        jac = np.abs(a) ** 2 - np.abs(b) ** 2
        stall = np.abs(jac) < STALL_J
        if stall.any():
            can = stall & (jitters[idx] < MAX_JITTERS)
            phase = rng.uniform(0.0, 2.0 * np.pi, int(can.sum()))
            za[can] += JITTER * np.exp(1j * phase)
            jitters[idx[can]] += 1
            # stalled and out of jitters: give up on these
            keep2 = ~(stall & ~can)
            step = np.zeros_like(za)
            ok = ~stall
            step[ok] = (np.conj(a[ok]) * r[ok] - b[ok] * np.conj(r[ok])) / jac[ok]
        else:
            keep2 = np.ones(len(za), dtype=bool)
            with np.errstate(all="ignore"):
                step = (np.conj(a) * r - b * np.conj(r)) / jac
        mag = np.abs(step)
        big = mag > MAX_STEP
        step[big] *= MAX_STEP / mag[big]
        znew = za + step
        hit = np.abs(znew.real) > WALL
        znew.real = np.clip(znew.real, -WALL, WALL)
        walled[idx] = np.where(hit, walled[idx] + 1, 0)
        alive = (keep2 & np.isfinite(znew) & (np.abs(znew.imag) < im_cap)
                 & (np.abs(np.sin(znew)) > POLE_EXCLUSION) & (walled[idx] < 6))
        z[idx] = znew
        active = idx[alive]
    return z, done


def seed_grid(y_half: float, nx: int, ny: int, margin: float = 0.01) -> np.ndarray:
    x = np.linspace(-HALF_PI + margin, HALF_PI - margin, nx)
    y = np.linspace(-y_half, y_half, ny)
    g = (x[None, :] + 1j * y[:, None]).ravel()
    # keep seeds away from the pole at 0
    near = np.abs(g) < 1e-3
    g[near] = g[near] + 0.5 * (x[1] - x[0]) + 0.5j * (y[1] - y[0])
    return g


def pole_seeds(params: LensParams, target: complex, rings: int = 12, spokes: int = 16) -> np.ndarray:
    """Extra seeds near the pole, where roots for large |w| hide in small basins.

    A log-polar ring set around 0 plus the asymptotic root -k/conj(w) of
    z - k/conj(z) = w.
    """
    r = np.geomspace(1e-3, 0.5, rings)
    a = (np.arange(spokes) + 0.5) * (2.0 * np.pi / spokes)
    ring = (r[:, None] * np.exp(1j * a[None, :])).ravel()
    extra = [ring]
    if abs(target) > 0:
        z = -params.k_eff / np.conj(complex(target))
        if abs(z.real) < WALL and abs(z) > 0:
            extra.append(np.array([z]))
    return np.concatenate(extra)


def seed_height(params: LensParams, w: complex) -> float:
    """|Im z| bound for all roots: |z - w| = k/|sin z| <= k/sinh|Im z|."""
    if not params.sheared:
        return max(1.0, abs(w) + params.k) + 0.5
    a = abs(params.alpha)
    w1 = abs(params.target(w))
    return max(1.0, (w1 + params.k_eff) / max(abs(1.0 - a), 1e-3)) + 0.5


def _dedup(z: np.ndarray, res: np.ndarray, radius: float = DEDUP_RADIUS) -> np.ndarray:
    order = np.argsort(res, kind="stable")
    z = z[order]
    out = []
    while z.size:
        c = z[0]
        out.append(c)
        z = z[np.abs(z - c) >= radius]
    return np.array(out, dtype=complex)


def _make_solutions(params: LensParams, target: complex, roots: np.ndarray) -> list[Solution]:
    sols = []
    for z in roots:
        val, a, b = wirtinger(params, z)
        res = float(abs(complex(f_values(params, z)) - target))
        jac = float(abs(complex(a)) ** 2 - abs(complex(b)) ** 2)
        sols.append(Solution(complex(z), orientation_of(jac), res, jac))
    sols.sort(key=lambda s: (-s.z.imag, s.z.real))
    return sols


def newton_solve(params: LensParams, w: complex, seed: complex, max_iter: int = 100,
                 rng: np.random.Generator | None = None) -> Solution | None:
    """Single Newton run from `seed`; None if it diverges, stalls or leaves the strip."""
    seed = complex(seed)
    if abs(seed.real) >= HALF_PI or abs(seed) < 1e-3:
        return None
    if rng is None:
        rng = np.random.default_rng(DEFAULT_RNG_SEED)
    target = params.target(complex(w))
    im_cap = 10.0 * seed_height(params, w) + 10.0
    z, done = _newton(params, np.array([target]), np.array([seed]), max_iter, rng, im_cap)
    if not done[0]:
        return None
    sol = _make_solutions(params, target, z)[0]
    return sol if sol.residual < RESIDUAL_OK else None


def _solve_targets(params: LensParams, ws: np.ndarray, seeds: tuple[int, int],
                   max_iter: int, rng: np.random.Generator, reseeds: int = 256):
    """Multi-start Newton for several right-hand sides at once (u-variable when sheared)."""
    nx, ny = seeds
    targets = np.array([params.target(w) for w in ws], dtype=complex)
    grids = [np.concatenate([seed_grid(seed_height(params, w), nx, ny), pole_seeds(params, t)])
             for w, t in zip(ws, targets)]
    z0 = np.concatenate(grids)
    owner = np.repeat(np.arange(len(ws)), [g.size for g in grids])
    im_cap = 10.0 * max(seed_height(params, w) for w in ws) + 10.0
    z, done = _newton(params, targets[owner], z0, max_iter, rng, im_cap)

    # perturbed restarts from the end points of failed runs
    fail = np.nonzero(~done & np.isfinite(z) & (np.abs(z) > 1e-3))[0]
    extra_z, extra_owner = np.empty(0, complex), np.empty(0, int)
    if fail.size:
        val = f_values(params, z[fail])
        resid = np.abs(val - targets[owner[fail]])
        resid[~np.isfinite(resid)] = np.inf
        picks = []
        for j in range(len(ws)):
            mine = fail[owner[fail] == j]
            if mine.size:
                r = resid[owner[fail] == j]
                picks.append(mine[np.argsort(r, kind="stable")[:reseeds]])
        picks = np.concatenate(picks) if picks else np.empty(0, int)
        if picks.size:
            start = z[picks] + 1e-3 * np.exp(1j * rng.uniform(0, 2 * np.pi, picks.size))
            start.real = np.clip(start.real, -WALL, WALL)
            ze, de = _newton(params, targets[owner[picks]], start, max_iter, rng, im_cap)
            extra_z, extra_owner = ze[de], owner[picks][de]

    allz = np.concatenate([z[done], extra_z])
    allo = np.concatenate([owner[done], extra_owner])
    results = []
    for j in range(len(ws)):
        zz = allz[allo == j]
        inside = (np.abs(zz.real) < HALF_PI) & (np.abs(zz) > 0)
        zz = zz[inside]
        res = np.abs(f_values(params, zz) - targets[j]) if zz.size else np.empty(0)
        good = res < RESIDUAL_OK
        roots = _dedup(zz[good], res[good]) if good.any() else np.empty(0, complex)
        results.append((roots, grids[j].size + int((extra_owner == j).sum())))
    return results, targets


def _report(params: LensParams, w: complex, target: complex, roots: np.ndarray,
            seeds_used: int, check_bound: bool) -> SolveReport:
    sols = _make_solutions(params, target, roots)
    rep = SolveReport(sols, seeds_used, params=params, w=complex(w))
    if check_bound and not 1 <= rep.count <= 6:
        rep.violation = f"solution count {rep.count} outside [1, 6]"
    return rep


def find_all_many(params: LensParams, ws, seeds: tuple[int, int] = DEFAULT_SEEDS,
                  max_iter: int = 80, rng_seed: int = DEFAULT_RNG_SEED,
                  chunk: int = 16) -> list[SolveReport]:
    """find_all for a batch of source positions (alpha = 0)."""
    if params.sheared:
        raise InvalidParam("use find_all_shear for alpha != 0")
    ws = np.atleast_1d(np.asarray(ws, dtype=complex))
    rng = np.random.default_rng(rng_seed)
    out = []
    for lo in range(0, len(ws), chunk):
        wc = ws[lo:lo + chunk]
        results, targets = _solve_targets(params, wc, seeds, max_iter, rng)
        for w, t, (roots, used) in zip(wc, targets, results):
            out.append(_report(params, w, t, roots, used, check_bound=True))
    return out


def find_all(params: LensParams, w: complex, seeds: tuple[int, int] = DEFAULT_SEEDS,
             max_iter: int = 80, rng_seed: int = DEFAULT_RNG_SEED) -> SolveReport:
    """Every solution of f(z) = w with |Re z| < pi/2.

    The count is checked against 1 <= n <= 6 and any breach is recorded in
    `violation` rather than corrected.
    """
    if params.sheared:
        return find_all_shear(params, w, seeds, max_iter, rng_seed)
    return find_all_many(params, [w], seeds, max_iter, rng_seed)[0]


def u_to_z(alpha: complex, u):
    """Invert u = z - alpha*conj(z)."""
    return (u + alpha * np.conj(u)) / (1.0 - abs(alpha) ** 2)


def find_all_shear(params: LensParams, w: complex, seeds: tuple[int, int] = DEFAULT_SEEDS,
                   max_iter: int = 80, rng_seed: int = DEFAULT_RNG_SEED) -> SolveReport:
    """Solutions with shear: solve in u = z - alpha*conj(z), then map back.

    No count bound is asserted. Residual and Jacobian refer to the u-equation.
    """
    if not params.sheared:
        return find_all_many(params, [w], seeds, max_iter, rng_seed)[0]
    rng = np.random.default_rng(rng_seed)
    results, targets = _solve_targets(params, np.array([w], dtype=complex), seeds, max_iter, rng)
    roots, used = results[0]
    sols = _make_solutions(params, targets[0], roots)
    sols = [Solution(complex(u_to_z(params.alpha, s.z)), s.orientation, s.residual, s.jacobian)
            for s in sols]
    sols.sort(key=lambda s: (-s.z.imag, s.z.real))
    return SolveReport(sols, used, params=params, w=complex(w))
