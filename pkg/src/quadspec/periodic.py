"""Periodic operators: wrap-around Laplacian and variable-coefficient advection.

The advection part is ``H1 = (1/i) * sum_j a_j(x_j) d/dx_j`` discretised with
centred differences, so that along axis ``j`` row ``r`` carries
``+a_j(x_r)/(2ih)`` at the forward neighbour and ``-a_j(x_r)/(2ih)`` at the
backward one, wrapping around the period.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .grid import GridKind, GridSpec
from .operators import GENERAL, HERMITIAN, SYMMETRIC, SparseOperator, neighbor_table
from .pencil import QuadraticPencil

_PERIOD_TOL = 1e-12


@dataclass(frozen=True)
class CoefficientSpec:
    """Either ``a(t) = value`` or ``a(t) = amplitude * sin(frequency * t)``."""

    kind: str = "constant"
    value: float = 1.0
    amplitude: float = 1.0
    frequency: float = 1.0

    def __post_init__(self):
        if self.kind not in ("constant", "sinusoid"):
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        for v in (self.value, self.amplitude, self.frequency):
            if not math.isfinite(v):
                raise ValueError("coefficient parameters must be finite")

    @classmethod
    def constant(cls, value: float) -> "CoefficientSpec":
        return cls("constant", value=float(value))

    @classmethod
    def sinusoid(cls, amplitude: float = 1.0, frequency: float = 1.0) -> "CoefficientSpec":
        return cls("sinusoid", amplitude=float(amplitude), frequency=float(frequency))

    @classmethod
    def parse(cls, text: str) -> "CoefficientSpec":
        """Parse ``const:V`` or ``sin[:amp[:freq]]``."""
        parts = text.strip().split(":")
        head = parts[0].lower()
        try:
            if head in ("const", "constant"):
                if len(parts) != 2:
                    raise ValueError
                return cls.constant(_parse_real(parts[1]))
            if head in ("sin", "sinusoid"):
                if len(parts) > 3:
                    raise ValueError
                amp = _parse_real(parts[1]) if len(parts) > 1 else 1.0
                freq = _parse_real(parts[2]) if len(parts) > 2 else 1.0
                return cls.sinusoid(amp, freq)
        except ValueError:
            pass
        raise ValueError(f"cannot parse coefficient {text!r}; use const:V or sin[:amp[:freq]]")

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.is_constant:
            return np.full_like(t, self.value)
        return self.amplitude * np.sin(self.frequency * t)

    def label(self) -> str:
        if self.is_constant:
            return f"{self.value:g}"
        return f"sin{self.amplitude:g}x{self.frequency:g}"

    def check_period(self, period: float):
        if self.is_constant:
            return
        turns = self.frequency * period / (2.0 * math.pi)
        if abs(turns - round(turns)) > _PERIOD_TOL * max(1.0, abs(turns)):
            raise ValueError(
                f"sin coefficient with frequency {self.frequency} is not {period}-periodic"
            )


def _parse_real(text: str) -> float:
    """Real literal, also accepting ``sqrt(2)``, ``5*sqrt(2)`` and ``pi``."""
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    allowed = {"sqrt": math.sqrt, "pi": math.pi}
    if not all(ch.isalnum() or ch in "+-*/(). " for ch in text):
        raise ValueError(text)
    try:
        value = eval(text, {"__builtins__": {}}, allowed)  # restricted names only
    except Exception as exc:
        raise ValueError(text) from exc
    return float(value)


@dataclass(frozen=True)
class PeriodicPencilConfig:
    grid: GridSpec
    coefficients: tuple[CoefficientSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.grid.kind is not GridKind.PERIODIC:
            raise ValueError("PeriodicPencilConfig needs a periodic-torus grid")
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        if len(self.coefficients) != self.grid.dim:
            raise ValueError(
                f"need {self.grid.dim} coefficients, got {len(self.coefficients)}"
            )
        for a in self.coefficients:
            a.check_period(self.grid.extent)


def _require_torus(g: GridSpec):
    if g.kind is not GridKind.PERIODIC:
        raise ValueError(f"expected a periodic-torus grid, got {g.kind.value}")


def assemble_periodic_laplacian(g: GridSpec) -> SparseOperator:
    """``H0 = -Lap`` with circulant closure on every axis (positive semidefinite)."""
    _require_torus(g)
    inv = 1.0 / g.spacing**2
    size = g.size
    rows = [np.arange(size)]
    cols = [np.arange(size)]
    vals = [np.full(size, 2.0 * g.dim * inv)]
    for flat, back, fwd in neighbor_table(g.n_points, g.dim, periodic=True):
        for nb in (back, fwd):
            rows.append(flat)
            cols.append(nb)
            vals.append(np.full(size, -inv))
    m = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)
    )
    return SparseOperator(m, SYMMETRIC)


def assemble_advection(g: GridSpec, coeffs: Sequence[CoefficientSpec]) -> SparseOperator:
    """Centred-difference ``(1/i) sum_j a_j(x_j) d/dx_j`` with wrap-around."""
    _require_torus(g)
    coeffs = tuple(coeffs)
    if len(coeffs) != g.dim:
        raise ValueError(f"need {g.dim} coefficients, got {len(coeffs)}")
    size = g.size
    coords = g.coordinates()
    scale = 1.0 / (2j * g.spacing)
    rows, cols, vals = [], [], []
    for axis, (flat, back, fwd) in enumerate(neighbor_table(g.n_points, g.dim, periodic=True)):
        a = coeffs[axis](coords[:, axis])
        rows += [flat, flat]
        cols += [fwd, back]
        vals += [a * scale, -a * scale]
    m = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size),
        dtype=complex,
    )
    hint = HERMITIAN if all(a.is_constant for a in coeffs) else GENERAL
    return SparseOperator(m, hint)


def assemble_periodic_pencil(cfg: PeriodicPencilConfig) -> QuadraticPencil:
    g = cfg.grid
    h0 = assemble_periodic_laplacian(g)
    h1 = assemble_advection(g, cfg.coefficients)
    tag = "_".join(a.label() for a in cfg.coefficients)
    return QuadraticPencil(h0, h1, label=f"periodic_{g.tag()}_a{tag}", grid=g)
