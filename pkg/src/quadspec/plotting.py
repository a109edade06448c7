"""Matplotlib renderings of spectra, sweeps and pseudospectra.

Figures go straight to files (Agg backend). Metadata that would embed dates
or version strings is stripped so reruns produce the same bytes.
"""
from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 11,
    "axes.titlesize": 11,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "figure.figsize": (5.5, 4.5),
    "savefig.dpi": 150,
    "svg.hashsalt": "quadspec",
}
MARKERS = ("o", "s", "^", "D", "v", "x", "+")


def _metadata(path: Path) -> dict:
    ext = path.suffix.lower()
    if ext == ".png":
        return {"Software": None}
    if ext in (".pdf", ".svg"):
        return {"Creator": None, "Producer": None, "CreationDate": None} if ext == ".pdf" \
            else {"Creator": None, "Date": None}
    return {}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata=_metadata(path), bbox_inches="tight")
    plt.close(fig)
    return path


def plot_spectrum(record, path, title: Optional[str] = None) -> Path:
    """Eigenvalue cloud in the complex plane, one marker per eigenvalue."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        lam = record.eigenvalues
        ax.plot(lam.real, lam.imag, "o", ms=2.5, color="k", ls="none")
        ax.set_xlabel(r"Re $\lambda$")
        ax.set_ylabel(r"Im $\lambda$")
        ax.set_title(title if title is not None else record.tag)
        ax.axhline(0, color="0.8", lw=0.6, zorder=0)
        ax.axvline(0, color="0.8", lw=0.6, zorder=0)
        return _save(fig, path)


def plot_overlay(records: Sequence, path, labels: Optional[Sequence[str]] = None,
                 title: str = "") -> Path:
    """Several spectra on one axis, as in the N and L comparison figures."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for k, rec in enumerate(r for r in records if r.ok):
            lam = rec.eigenvalues
            lab = labels[k] if labels else rec.tag
            ax.plot(lam.real, lam.imag, MARKERS[k % len(MARKERS)], ms=3, mfc="none",
                    ls="none", label=lab)
        ax.set_xlabel(r"Re $\lambda$")
        ax.set_ylabel(r"Im $\lambda$")
        ax.set_title(title)
        ax.legend(loc="best", frameon=False)
        return _save(fig, path)


def plot_pseudospectrum(fld, path, eigenvalues=None, levels: int = 12,
                        title: Optional[str] = None) -> Path:
    """Filled contours of ``log10 s_min`` with eigenvalues overlaid."""
    re, im = fld.grid.axes()
    logs = np.log10(np.maximum(fld.values, 1e-300)).T
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        cs = ax.contourf(re, im, logs, levels=levels, cmap="gray")
        fig.colorbar(cs, ax=ax, label=r"$\log_{10} s_{\min}(A - zI)$")
        if eigenvalues is not None and len(eigenvalues):
            ev = np.asarray(eigenvalues)
            inside = ((ev.real >= re[0]) & (ev.real <= re[-1]) &
                      (ev.imag >= im[0]) & (ev.imag <= im[-1]))
            ax.plot(ev.real[inside], ev.imag[inside], "r.", ms=3)
        ax.set_xlabel(r"Re $z$")
        ax.set_ylabel(r"Im $z$")
        ax.set_title(title if title is not None else str(fld.meta.get("pencil", "")))
        return _save(fig, path)
