"""Sparse operator container shared by the assembly routines."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

SYMMETRIC = "symmetric"
HERMITIAN = "hermitian"
GENERAL = "general"


@dataclass(frozen=True)
class SparseOperator:
    """Square sparse matrix in CSR form with a structural hint.

    ``hint`` is one of ``"symmetric"``, ``"hermitian"`` or ``"general"`` and is
    what the Matrix Market writer uses as the symmetry field.
    """

    matrix: sp.csr_matrix
    hint: str = GENERAL

    def __post_init__(self):
        m = sp.csr_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got {m.shape}")
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        object.__setattr__(self, "matrix", m)

    @property
    def order(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.matrix.data)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def entries(self) -> list[tuple[int, int, complex | float]]:
        """Stored entries as 1-based ``(row, col, value)`` sorted by row then column."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [(int(coo.row[k]) + 1, int(coo.col[k]) + 1, coo.data[k].item()) for k in order]

    def frobenius(self) -> float:
        return float(sp.linalg.norm(self.matrix, "fro")) if self.matrix.nnz else 0.0

    def bandwidth(self) -> tuple[int, int]:
        """Lower and upper bandwidth of the stored pattern."""
        coo = self.matrix.tocoo()
        if coo.nnz == 0:
            return 0, 0
        d = coo.col - coo.row
        return int(max(0, -d.min())), int(max(0, d.max()))

    def __matmul__(self, other):
        return self.matrix @ other

    def scaled(self, factor) -> "SparseOperator":
        return SparseOperator(self.matrix * factor, self.hint)

    def write_matrix_market(self, path: str | Path, comment: str = "") -> Path:
        """Write in Matrix Market coordinate format (real or complex field)."""
        path = Path(path)
        symmetry = self.hint if self.hint in (SYMMETRIC, HERMITIAN) else GENERAL
        field = "complex" if self.is_complex else "real"
        scipy.io.mmwrite(str(path), self.matrix, comment=comment, field=field,
                         precision=17, symmetry=symmetry)
        return path.with_suffix(".mtx") if path.suffix != ".mtx" else path


def zeros(order: int, dtype=float) -> SparseOperator:
    return SparseOperator(sp.csr_matrix((order, order), dtype=dtype), SYMMETRIC)


def diagonal(values: np.ndarray) -> SparseOperator:
    return SparseOperator(sp.diags(values, 0, format="csr"), SYMMETRIC)


def neighbor_table(n: int, dim: int, periodic: bool) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Backward and forward neighbours along each axis.

    Returns, per axis, ``(rows, backward, forward)`` index arrays (0-based)
    where a missing neighbour is ``-1``. Rows are in flat order.
    """
    size = n**dim
    flat = np.arange(size)
    out = []
    for axis in range(dim):
        stride = n**axis
        pos = (flat // stride) % n
        back = flat - stride
        fwd = flat + stride
        if periodic:
            back = np.where(pos == 0, flat + (n - 1) * stride, back)
            fwd = np.where(pos == n - 1, flat - (n - 1) * stride, fwd)
        else:
            back = np.where(pos == 0, -1, back)
            fwd = np.where(pos == n - 1, -1, fwd)
        out.append((flat, back, fwd))
    return out
