"""CSV, JSON and SVG writers for spectra and pseudospectrum fields.

All writers are byte-deterministic: identical input gives identical files.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

SCHEMA_VERSION = 1


class OutputError(OSError):
    """Writing an output file failed; the message carries the path."""


def _write(path: str | Path, text: str) -> Path:
    path = Path(path)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _g17(x: float) -> str:
    return format(float(x), ".17g")


# -- spectra ----------------------------------------------------------------------

def emit_csv(record, path: str | Path) -> Optional[Path]:
    """``re,im,residual`` with a header line, one eigenvalue per line.

    Failed records produce no CSV; ``None`` is returned instead.
    """
    if not record.ok:
        return None
    lines = ["re,im,residual"]
    for lam, r in zip(record.eigenvalues, record.residuals):
        lines.append(f"{_g17(lam.real)},{_g17(lam.imag)},{_g17(r)}")
    return _write(path, "\n".join(lines) + "\n")


def record_to_dict(record, include_timing: bool = False) -> dict:
    d = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": record.version,
        "tag": record.tag,
        "status": record.status,
        "config": record.config,
        "eigenvalues": [
            {"re": float(lam.real), "im": float(lam.imag), "residual": float(r)}
            for lam, r in zip(record.eigenvalues, record.residuals)
        ],
        "stats": _plain(record.stats),
        "oracle": _plain(record.oracle),
    }
    if record.error is not None:
        d["error"] = record.error
    if include_timing:
        d["wall_time"] = record.wall_time
    return d


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def emit_json(record, path: str | Path, include_timing: bool = False) -> Path:
    """Record as JSON. Wall time is left out unless asked for, so reruns are byte-identical."""
    text = json.dumps(record_to_dict(record, include_timing), indent=1, sort_keys=True,
                      allow_nan=True)
    return _write(path, text + "\n")


def load_json_eigenvalues(path: str | Path) -> np.ndarray:
    with open(path) as fh:
        d = json.load(fh)
    return np.array([complex(e["re"], e["im"]) for e in d["eigenvalues"]])


def emit_index(records, path: str | Path, files: Sequence[dict]) -> Path:
    entries = []
    for rec, f in zip(records, files):
        entries.append({"tag": rec.tag, "status": rec.status, "error": rec.error,
                        "count": int(len(rec.eigenvalues)), "files": f,
                        "max_abs_re": float(np.abs(rec.eigenvalues.real).max()) if rec.ok else None,
                        "max_abs_im": float(np.abs(rec.eigenvalues.imag).max()) if rec.ok else None})
    text = json.dumps({"schema_version": SCHEMA_VERSION, "records": entries}, indent=1,
                      sort_keys=True)
    return _write(path, text + "\n")


# -- pseudospectrum fields -------------------------------------------------------

def emit_field_csv(fld, path: str | Path) -> Path:
    lines = ["z_re,z_im,smin"]
    for zr, zi, v in fld.rows():
        lines.append(f"{_g17(zr)},{_g17(zi)},{_g17(v)}")
    return _write(path, "\n".join(lines) + "\n")


def emit_field_json(fld, path: str | Path) -> Path:
    """Contour-ready payload: axes plus a ``values[ix][iy]`` matrix."""
    re, im = fld.grid.axes()
    d = {
        "schema_version": SCHEMA_VERSION,
        "grid": {"re_min": fld.grid.re_min, "re_max": fld.grid.re_max,
                 "im_min": fld.grid.im_min, "im_max": fld.grid.im_max,
                 "nx": fld.grid.nx, "ny": fld.grid.ny},
        "re": re.tolist(),
        "im": im.tolist(),
        "values": fld.values.tolist(),
        "iterations": fld.iterations.tolist(),
        "flags": fld.flags.tolist(),
        "seed": fld.seed,
        "meta": _plain(fld.meta),
    }
    return _write(path, json.dumps(d, indent=1, sort_keys=True) + "\n")


# -- SVG -----------------------------------------------------------------------------

W, H = 640, 480
MARGIN = dict(left=80, right=30, top=50, bottom=60)


def _nice_step(span: float, target: int = 6) -> float:
    raw = span / max(target, 1)
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 2.5, 5, 10):
        if raw <= m * mag:
            return m * mag
    return 10 * mag


def _ticks(lo: float, hi: float) -> list[float]:
    step = _nice_step(hi - lo)
    start = math.ceil(lo / step - 1e-9)
    out = []
    k = start
    while k * step <= hi + 1e-9 * step:
        out.append(k * step)
        k += 1
    return out


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    return format(v, ".6g")


def padded_bounds(values: Iterable[float], frac: float = 0.05) -> tuple[float, float]:
    """Data bounds widened by ``frac`` of the span on each side."""
    v = np.asarray(list(values), dtype=float)
    lo, hi = float(v.min()), float(v.max())
    span = hi - lo
    if span == 0:
        span = max(abs(lo), 1.0)
        return lo - frac * span, hi + frac * span
    return lo - frac * span, hi + frac * span


class _Canvas:
    def __init__(self, xlim, ylim, title: str, xlabel: str, ylabel: str):
        self.xlim, self.ylim = xlim, ylim
        self.x0, self.x1 = MARGIN["left"], W - MARGIN["right"]
        self.y0, self.y1 = H - MARGIN["bottom"], MARGIN["top"]
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
            f'viewBox="0 0 {W} {H}">',
            f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
            f'<text x="{W / 2:.2f}" y="28" text-anchor="middle" font-family="sans-serif" '
            f'font-size="16">{_escape(title)}</text>',
            f'<text x="{(self.x0 + self.x1) / 2:.2f}" y="{H - 15}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{_escape(xlabel)}</text>',
            f'<text x="20" y="{(self.y0 + self.y1) / 2:.2f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13" transform="rotate(-90 20 '
            f'{(self.y0 + self.y1) / 2:.2f})">{_escape(ylabel)}</text>',
        ]
        self._body: list[str] = []

    def px(self, x: float) -> float:
        return self.x0 + (x - self.xlim[0]) / (self.xlim[1] - self.xlim[0]) * (self.x1 - self.x0)

    def py(self, y: float) -> float:
        return self.y0 + (y - self.ylim[0]) / (self.ylim[1] - self.ylim[0]) * (self.y1 - self.y0)

    def add(self, element: str):
        self._body.append(element)

    def axes(self) -> list[str]:
        out = [f'<rect x="{self.x0}" y="{self.y1}" width="{self.x1 - self.x0}" '
               f'height="{self.y0 - self.y1}" fill="none" stroke="black"/>']
        for t in _ticks(*self.xlim):
            x = self.px(t)
            out.append(f'<line x1="{x:.2f}" y1="{self.y0}" x2="{x:.2f}" y2="{self.y0 + 5}" stroke="black"/>')
            out.append(f'<text x="{x:.2f}" y="{self.y0 + 20}" text-anchor="middle" '
                       f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>')
        for t in _ticks(*self.ylim):
            y = self.py(t)
            out.append(f'<line x1="{self.x0 - 5}" y1="{y:.2f}" x2="{self.x0}" y2="{y:.2f}" stroke="black"/>')
            out.append(f'<text x="{self.x0 - 8}" y="{y + 4:.2f}" text-anchor="end" '
                       f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>')
        return out

    def render(self) -> str:
        clip = (f'<clipPath id="plot"><rect x="{self.x0}" y="{self.y1}" '
                f'width="{self.x1 - self.x0}" height="{self.y0 - self.y1}"/></clipPath>')
        body = [clip, '<g clip-path="url(#plot)">', *self._body, "</g>"]
        return "\n".join(self.parts + body + self.axes() + ["</svg>"]) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def svg_scatter(values: np.ndarray, title: str = "", xlim=None, ylim=None,
                radius: float = 2.5) -> str:
    values = np.asarray(values, dtype=complex)
    if values.size == 0:
        raise ValueError("nothing to plot")
    xlim = xlim or padded_bounds(values.real)
    ylim = ylim or padded_bounds(values.imag)
    cv = _Canvas(xlim, ylim, title, "Re(lambda)", "Im(lambda)")
    for lam in values:
        cv.add(f'<circle cx="{cv.px(lam.real):.2f}" cy="{cv.py(lam.imag):.2f}" r="{radius}" '
               f'fill="black"/>')
    return cv.render()


def svg_field(fld, title: str = "") -> str:
    """Grayscale cell map of ``log10(s_min)``; darker means smaller."""
    re, im = fld.grid.axes()
    dx = (re[1] - re[0]) / 2
    dy = (im[1] - im[0]) / 2
    xlim = (re[0] - dx, re[-1] + dx)
    ylim = (im[0] - dy, im[-1] + dy)
    cv = _Canvas(xlim, ylim, title, "Re(z)", "Im(z)")
    floor = 1e-300
    logs = np.log10(np.maximum(fld.values, floor))
    finite = logs[np.isfinite(logs)]
    lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    span = hi - lo if hi > lo else 1.0
    for i in range(fld.grid.nx):
        for j in range(fld.grid.ny):
            v = logs[i, j]
            level = int(round(255 * (v - lo) / span)) if np.isfinite(v) else 255
            x = cv.px(re[i] - dx)
            y = cv.py(im[j] + dy)
            w = cv.px(re[i] + dx) - x
            h = cv.py(im[j] - dy) - y
            cv.add(f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
                   f'fill="rgb({level},{level},{level})"/>')
    return cv.render()


def emit_svg_scatter(obj, path: str | Path, title: Optional[str] = None, xlim=None, ylim=None) -> Path:
    """Standalone SVG: eigenvalue scatter for a record, cell map for a field."""
    if hasattr(obj, "eigenvalues"):
        text = svg_scatter(obj.eigenvalues, title if title is not None else obj.tag, xlim, ylim)
    elif hasattr(obj, "values") and hasattr(obj, "grid"):
        text = svg_field(obj, title if title is not None else obj.meta.get("pencil", ""))
    else:
        text = svg_scatter(np.asarray(obj), title or "", xlim, ylim)
    return _write(path, text)
