"""File emission: JSON, CSV, SVG and PPM writers, plus provenance sidecars.

Every writer is deterministic: the same inputs give the same bytes. Next to
each file `<name>` a sidecar `<name>.meta.json` records the command inputs.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from . import __version__
from .basins import BasinImage
from .caustic import Caustic, Cusp, boundary_image
from .classifier import RegionReport, SweepResult
from .core import LensParams, parse_complex
from .critical import CriticalCurve
from .solver import Orientation, Solution, SolveReport


# --- JSON ---------------------------------------------------------------------

def _c(z: complex) -> str:
    # shortest repr that round-trips
    z = complex(z)
    sign = "-" if np.signbit(z.imag) else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def solution_to_dict(s: Solution) -> dict:
    return {"z": _c(s.z), "orientation": s.orientation.value,
            "residual": s.residual, "jacobian": s.jacobian}


def solution_from_dict(d: dict) -> Solution:
    return Solution(parse_complex(d["z"]), Orientation(d["orientation"]),
                    float(d["residual"]), float(d["jacobian"]))


def report_to_dict(rep: SolveReport) -> dict:
    p = rep.params
    out = {
        "k": p.k if p else None,
        "alpha": _c(p.alpha) if p else None,
        "w": _c(rep.w) if rep.w is not None else None,
        "solutions": [solution_to_dict(s) for s in rep.solutions],
        "count": rep.count,
        "counts_by_orientation": rep.counts_by_orientation(),
        "seeds_used": rep.seeds_used,
    }
    if rep.oracle_agreement is not None:
        out["oracle_agreement"] = rep.oracle_agreement
    if rep.violation:
        out["violation"] = rep.violation
    return out


def report_from_dict(d: dict) -> SolveReport:
    params = LensParams(d["k"], parse_complex(d["alpha"])) if d.get("k") is not None else None
    w = parse_complex(d["w"]) if d.get("w") is not None else None
    sols = [solution_from_dict(s) for s in d["solutions"]]
    return SolveReport(sols, int(d.get("seeds_used", 0)), d.get("oracle_agreement"),
                       d.get("violation"), params, w)


def cusp_to_dict(c: Cusp) -> dict:
    return {"z": _c(c.z), "image": _c(c.image), "family": c.family.value,
            "t": c.t, "s": _c(c.s), "r": c.r}


def region_to_dict(r: RegionReport) -> dict:
    return {"w": _c(r.w), "idx_minus": r.idx_minus, "idx_plus": r.idx_plus,
            "m_predicted": r.m_predicted, "n_predicted": r.n_predicted,
            "m_solver": r.m_solver, "n_solver": r.n_solver,
            "consistent": r.consistent, "on_curve": r.on_curve}


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"


# --- CSV ----------------------------------------------------------------------

def csv_text(header: list[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for row in rows:
        wr.writerow(["" if v is None else (repr(float(v)) if isinstance(v, (float, np.floating))
                                          else v) for v in row])
    return buf.getvalue()


def caustic_csv(caustic: Caustic) -> str:
    cusp_z = [c.z for c in caustic.cusps]

    def rows():
        for a, arc in enumerate(caustic.arcs):
            for t, z, f in zip(arc.t, arc.z, arc.image):
                is_cusp = any(abs(z - c) < 1e-12 for c in cusp_z)
                yield (t, z.real, z.imag, f.real, f.imag, a, int(is_cusp))
    return csv_text(["t", "re_z", "im_z", "re_image", "im_image", "arc_id", "is_cusp"], rows())


def critical_csv(curve: CriticalCurve) -> str:
    def rows():
        for a, arc in enumerate(curve.arcs):
            for t, z in zip(arc.t, arc.z):
                yield (t, z.real, z.imag, a)
    return csv_text(["t", "re_z", "im_z", "arc_id"], rows())


def sweep_csv(res: SweepResult) -> str:
    return csv_text(["re_w", "im_w", "m", "n", "on_curve"],
                    ((x, y, m, n, int(on)) for x, y, m, n, on in res.rows()))


def solutions_csv(rep: SolveReport) -> str:
    return csv_text(["re_z", "im_z", "orientation", "residual", "jacobian"],
                    ((s.z.real, s.z.imag, s.orientation.value, s.residual, s.jacobian)
                     for s in rep.solutions))


# --- SVG ----------------------------------------------------------------------

class _Svg:
    """Minimal SVG canvas mapping a window of the w-plane onto pixels (y up)."""

    def __init__(self, window, size: int = 600):
        self.x0, self.x1, self.y0, self.y1 = window
        self.W = size
        self.H = max(1, int(round(size * (self.y1 - self.y0) / (self.x1 - self.x0))))
        self.parts: list[str] = []

    def xy(self, z: complex) -> tuple[float, float]:
        px = (z.real - self.x0) / (self.x1 - self.x0) * self.W
        py = (self.y1 - z.imag) / (self.y1 - self.y0) * self.H
        return px, py

    def polyline(self, pts, stroke="black", width=1.2, dash: str | None = None):
        # split at non-finite points and far excursions, then emit
        seg: list[str] = []

        def flush():
            if len(seg) > 1:
                extra = f' stroke-dasharray="{dash}"' if dash else ""
                self.parts.append(f'<polyline fill="none" stroke="{stroke}" stroke-width="{width}"'
                                  f'{extra} points="{" ".join(seg)}"/>')
            seg.clear()
        lim = 4 * max(self.W, self.H)
        for z in pts:
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                flush()
                continue
            px, py = self.xy(z)
            if abs(px) > lim or abs(py) > lim:
                flush()
                continue
            seg.append(f"{px:.2f},{py:.2f}")
        flush()

    def rect(self, x, y, w, h, fill):
        self.parts.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
                          f'fill="{fill}" stroke="none"/>')

    def circle(self, z, r=3.0, fill="red"):
        px, py = self.xy(z)
        self.parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="{r}" fill="{fill}"/>')

    def text(self, x, y, s, size=12):
        self.parts.append(f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" '
                          f'font-family="sans-serif">{s}</text>')

    def render(self, title: str = "") -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.W}" height="{self.H}" '
                f'viewBox="0 0 {self.W} {self.H}">\n')
        t = f"<title>{title}</title>\n" if title else ""
        bg = f'<rect width="{self.W}" height="{self.H}" fill="white"/>\n'
        return head + t + bg + "\n".join(self.parts) + "\n</svg>\n"


def _window_of(pts: np.ndarray, pad: float = 0.1):
    pts = pts[np.isfinite(pts)]
    x0, x1 = pts.real.min(), pts.real.max()
    y0, y1 = pts.imag.min(), pts.imag.max()
    span = max(x1 - x0, y1 - y0, 1e-3)
    return (x0 - pad * span, x1 + pad * span, y0 - pad * span, y1 + pad * span)


def caustic_svg(params: LensParams, caustic: Caustic, window=None, im_limit: float = 6.0,
                size: int = 600) -> str:
    """Caustic arcs solid, image of the strip boundary dotted."""
    if window is None:
        window = _window_of(caustic.points())
    svg = _Svg(window, size)
    right, left = boundary_image(params, im_limit, samples=2048)
    svg.polyline(right, stroke="black", dash="2,3")
    svg.polyline(left, stroke="black", dash="2,3")
    for arc in caustic.arcs:
        svg.polyline(arc.image, stroke="black")
    for c in caustic.cusps:
        svg.circle(c.image, 2.5, "red")
    return svg.render(f"caustic k={params.k}")


def critical_svg(curve: CriticalCurve, size: int = 400) -> str:
    """One polyline per arc over the strip, with the strip edges dashed."""
    pts = curve.points()
    ym = max(1.0, float(np.max(np.abs(pts.imag))) * 1.15)
    h = 0.5 * np.pi
    svg = _Svg((-h - 0.1, h + 0.1, -ym, ym), size)
    for x in (-h, h):
        svg.polyline(np.array([complex(x, -ym), complex(x, ym)]), stroke="gray", dash="4,3")
    for arc in curve.arcs:
        svg.polyline(arc.z, stroke="black")
    return svg.render(f"critical curve k={curve.k}")


_FILL_TOTAL = {0: "#ffffff", 1: "#e8eef7", 2: "#b9cde5", 3: "#7fa6d3",
               4: "#4a7fbf", 5: "#f4a259", 6: "#d1495b"}


def _fill(m: int, n: int) -> str:
    # hue by total, lightened slightly when reversing images dominate
    base = _FILL_TOTAL.get(m + n, "#888888")
    if m > n:
        r, g, b = (int(base[i:i + 2], 16) for i in (1, 3, 5))
        r, g, b = (min(255, int(v * 0.85 + 255 * 0.15)) for v in (r, g, b))
        return f"#{r:02x}{g:02x}{b:02x}"
    return base


def sweep_svg(res: SweepResult, size: int = 600, overlay: Caustic | None = None) -> str:
    """Choropleth of (m, n) labels; on-curve cells in black."""
    xs, ys = res.xs, res.ys
    dx = xs[1] - xs[0]
    dy = ys[1] - ys[0]
    window = (xs[0] - dx / 2, xs[-1] + dx / 2, ys[0] - dy / 2, ys[-1] + dy / 2)
    svg = _Svg(window, size)
    cw = svg.W / len(xs)
    ch = svg.H / len(ys)
    seen: dict[tuple[int, int], str] = {}
    for j in range(len(ys)):
        for i in range(len(xs)):
            if res.on_curve[j, i]:
                fill = "#000000"
            else:
                key = (int(res.m[j, i]), int(res.n[j, i]))
                fill = seen.setdefault(key, _fill(*key))
            svg.rect(i * cw, (len(ys) - 1 - j) * ch, cw + 0.05, ch + 0.05, fill)
    if overlay is not None:
        for arc in overlay.arcs:
            svg.polyline(arc.image, stroke="black", width=0.8)
    y = 14.0
    for (m, n), fill in sorted(seen.items()):
        svg.rect(4, y - 10, 12, 12, fill)
        svg.text(20, y, f"{m}/{n}")
        y += 16
    return svg.render(f"m/n regions k={res.params.k}")


# --- PPM ----------------------------------------------------------------------

def ppm_bytes(img: BasinImage) -> bytes:
    rgb = np.ascontiguousarray(img.rgb(), dtype=np.uint8)
    return f"P6\n{img.width} {img.height}\n255\n".encode("ascii") + rgb.tobytes()


def read_ppm(data: bytes) -> np.ndarray:
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6" or parts[2] != b"255":
        raise ValueError("not an 8-bit P6 image")
    w, h = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)


# --- files --------------------------------------------------------------------

def provenance(command: str, inputs: dict) -> dict:
    return {"generator": "sinlens", "version": __version__, "command": command,
            "inputs": {k: (_c(v) if isinstance(v, complex) else v) for k, v in inputs.items()}}


def emit(data: str | bytes, path: str | Path, meta: dict | None = None) -> Path:
    """Write data to path (text as UTF-8); with meta, also path + '.meta.json'."""
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        path.write_text(data, encoding="utf-8")
    else:
        path.write_bytes(data)
    if meta is not None:
        Path(str(path) + ".meta.json").write_text(dumps(meta), encoding="utf-8")
    return path
