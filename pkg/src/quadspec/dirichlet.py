"""Finite-difference operators on the box ``[-L, L]^dim`` with zero boundary data.

Every node of the grid, including those on the boundary, carries an
unknown; stencil neighbours outside the box are taken as zero. The
matrices therefore stay square of order ``N^dim`` with the block layout
D4/I in 2D and G6/J in 3D, and no boundary rows are eliminated.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .grid import GridKind, GridSpec
from .operators import SYMMETRIC, SparseOperator, diagonal, neighbor_table
from .pencil import QuadraticPencil


@dataclass(frozen=True)
class DirichletPencilConfig:
    grid: GridSpec
    c: float = 1.0

    def __post_init__(self):
        if self.grid.kind is not GridKind.DIRICHLET:
            raise ValueError("DirichletPencilConfig needs a dirichlet-box grid")
        if not np.isfinite(self.c):
            raise ValueError("coupling c must be finite")


def _require_box(g: GridSpec):
    if g.kind is not GridKind.DIRICHLET:
        raise ValueError(f"expected a dirichlet-box grid, got {g.kind.value}")


def assemble_laplacian(g: GridSpec) -> SparseOperator:
    """Discrete Laplacian with the ``1/h**2`` factor applied.

    Interior rows read ``(-2*dim*u_0 + sum of 2*dim neighbours) / h**2``;
    rows on the boundary drop neighbours that fall outside the box.
    """
    _require_box(g)
    h2 = g.spacing**2
    size = g.size
    off = 1.0 / h2
    rows = [np.arange(size)]
    cols = [np.arange(size)]
    vals = [np.full(size, -2.0 * g.dim / h2)]
    for flat, back, fwd in neighbor_table(g.n_points, g.dim, periodic=False):
        for nb in (back, fwd):
            keep = nb >= 0
            rows.append(flat[keep])
            cols.append(nb[keep])
            vals.append(np.full(keep.sum(), off))
    m = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)
    )
    return SparseOperator(m, SYMMETRIC)


def assemble_potential(g: GridSpec, power: int) -> SparseOperator:
    """Diagonal matrix of ``|x|**power`` at the nodes, ``power`` in {2, 4}."""
    _require_box(g)
    if power not in (2, 4):
        raise ValueError(f"power must be 2 or 4, got {power}")
    r2 = g.radius_squared()
    return diagonal(r2 if power == 2 else r2 * r2)


def assemble_dirichlet_pencil(cfg: DirichletPencilConfig) -> QuadraticPencil:
    """``H0 = -Lap + diag(|x|^4)`` and ``H1 = -2 c diag(|x|^2)``."""
    g = cfg.grid
    lap = assemble_laplacian(g)
    r2 = g.radius_squared()
    h0 = SparseOperator(-lap.matrix + sp.diags(r2 * r2, format="csr"), SYMMETRIC)
    h1 = diagonal(-2.0 * cfg.c * r2)
    return QuadraticPencil(h0, h1, label=f"dirichlet_{g.tag()}_c{cfg.c:g}", grid=g)
