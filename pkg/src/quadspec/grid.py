"""Uniform grids on Dirichlet boxes and periodic tori.

Unknowns are stacked with the x index running fastest, then y, then z, so
the flat (1-based) index of node ``(i, j, k)`` is
``(k - 1) * N**2 + (j - 1) * N + i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np


class GridKind(str, Enum):
    DIRICHLET = "dirichlet-box"
    PERIODIC = "periodic-torus"


@dataclass(frozen=True)
class GridSpec:
    """A tensor grid with ``n_points`` nodes per axis.

    For a Dirichlet box ``extent`` is the half-width ``L`` of ``[-L, L]^dim``
    and the nodes include both end points. For a periodic torus ``extent`` is
    the period and the last node sits one spacing before ``origin + L``.
    """

    dim: int
    kind: GridKind
    extent: float
    n_points: int
    origin: float = 0.0

    @property
    def spacing(self) -> float:
        if self.kind is GridKind.DIRICHLET:
            return 2.0 * self.extent / (self.n_points - 1)
        return self.extent / self.n_points

    h = spacing

    @property
    def size(self) -> int:
        return self.n_points**self.dim

    def axis(self) -> np.ndarray:
        """Node coordinates along one axis."""
        i = np.arange(self.n_points, dtype=float)
        if self.kind is GridKind.DIRICHLET:
            # symmetric form keeps x_i == -x_{N+1-i} bit for bit
            return self.extent * ((2.0 * i - (self.n_points - 1)) / (self.n_points - 1))
        return self.origin + i * self.spacing

    def flat_index(self, *multi: int) -> int:
        if len(multi) != self.dim:
            raise ValueError(f"expected {self.dim} indices, got {len(multi)}")
        n = self.n_points
        flat = 0
        for idx in reversed(multi):
            if not 1 <= idx <= n:
                raise IndexError(f"axis index {idx} outside 1..{n}")
            flat = flat * n + (idx - 1)
        return flat + 1

    def multi_index(self, flat: int) -> tuple[int, ...]:
        if not 1 <= flat <= self.size:
            raise IndexError(f"flat index {flat} outside 1..{self.size}")
        rem = flat - 1
        out = []
        for _ in range(self.dim):
            rem, r = divmod(rem, self.n_points)
            out.append(r + 1)
        return tuple(out)

    def coordinates(self) -> np.ndarray:
        """Array of shape ``(size, dim)`` with node coordinates in flat order."""
        ax = self.axis()
        # meshgrid with 'ij' on reversed axes gives x fastest after ravel
        mesh = np.meshgrid(*([ax] * self.dim), indexing="ij")
        cols = [m.ravel() for m in reversed(mesh)]
        return np.stack(cols, axis=1)

    def radius_squared(self) -> np.ndarray:
        return np.sum(self.coordinates() ** 2, axis=1)

    def tag(self) -> str:
        return f"{self.dim}d_N{self.n_points}_L{self.extent:g}"


def make_grid(
    dim: int,
    kind: GridKind | str,
    extent: float,
    n_points: int,
    origin: Optional[float] = None,
) -> GridSpec:
    kind = GridKind(kind)
    if dim not in (1, 2, 3):
        raise ValueError(f"dim must be 1, 2 or 3, got {dim}")
    if not np.isfinite(extent) or extent <= 0:
        raise ValueError(f"extent must be positive, got {extent}")
    if int(n_points) != n_points or n_points < 3:
        raise ValueError(f"n_points must be an integer >= 3, got {n_points}")
    if origin is None:
        origin = -extent if kind is GridKind.DIRICHLET else 0.0
    elif kind is GridKind.DIRICHLET and origin != -extent:
        raise ValueError("a Dirichlet box is always centred on the origin")
    return GridSpec(dim=dim, kind=kind, extent=float(extent), n_points=int(n_points),
                    origin=float(origin))


def node_coords(g: GridSpec, flat: int) -> np.ndarray:
    ax = g.axis()
    return np.array([ax[i - 1] for i in g.multi_index(flat)])


def flat_index(g: GridSpec, multi: Sequence[int]) -> int:
    return g.flat_index(*multi)
