"""LU factorisations of ``L(z)`` reused across many right-hand sides.

Dirichlet pencils are banded under the natural ordering (bandwidth ``N`` in
2D, ``N**2`` in 3D) and go through LAPACK's partial-pivoting band LU.
Periodic pencils have wrap-around entries far from the diagonal, so they use
a general sparse LU instead.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import lapack

PIVOT_RTOL = 1e-13


class SingularFactorError(ArithmeticError):
    """Raised when a pivot falls below the relative singularity threshold."""

    def __init__(self, message: str, pivot: float = 0.0):
        super().__init__(message)
        self.pivot = pivot


def to_band(a: sp.spmatrix, kl: int, ku: int) -> np.ndarray:
    """Pack ``a`` into LAPACK ``gbtrf`` layout with ``kl`` extra rows for fill."""
    coo = sp.coo_matrix(a)
    n = a.shape[0]
    ab = np.zeros((2 * kl + ku + 1, n), dtype=np.result_type(coo.data, np.float64))
    ab[kl + ku + coo.row - coo.col, coo.col] = coo.data
    return ab


class BandedLU:
    """Band LU with partial pivoting (``?gbtrf``/``?gbtrs``)."""

    def __init__(self, a: sp.spmatrix, kl: int, ku: int, check: bool = True):
        self.n = a.shape[0]
        self.kl, self.ku = kl, ku
        ab = to_band(a, kl, ku)
        self.dtype = ab.dtype
        scale = float(np.max(np.abs(ab))) if ab.size else 0.0
        gbtrf, self._gbtrs = lapack.get_lapack_funcs(("gbtrf", "gbtrs"), (ab,))
        lu, piv, info = gbtrf(ab, kl, ku, overwrite_ab=1)
        if info < 0:
            raise ValueError(f"gbtrf: illegal argument {-info}")
        self._lu, self._piv = lu, piv
        pivots = np.abs(lu[kl + ku, :])
        self.min_pivot = float(pivots.min()) if self.n else 0.0
        self.scale = scale
        if check and (info > 0 or self.min_pivot < PIVOT_RTOL * scale):
            raise SingularFactorError(
                f"band LU pivot {self.min_pivot:.3e} below {PIVOT_RTOL:g} x {scale:.3e}",
                self.min_pivot,
            )
        if info > 0:
            # exact zero pivot: nudge so that inverse iteration can proceed
            lu[kl + ku, info - 1] = np.finfo(float).eps * max(scale, 1.0)

    def _solve(self, b, trans: int):
        b = np.asarray(b)
        dt = np.result_type(self.dtype, b.dtype)
        if dt != self.dtype:
            # real factors with complex rhs: solve real and imaginary parts apart
            re, info1 = self._gbtrs(self._lu, self.kl, self.ku, b.real.copy(), self._piv, trans=trans)
            im, info2 = self._gbtrs(self._lu, self.kl, self.ku, b.imag.copy(), self._piv, trans=trans)
            return re + 1j * im
        x, info = self._gbtrs(self._lu, self.kl, self.ku, b.astype(dt), self._piv, trans=trans)
        if info != 0:
            raise ValueError(f"gbtrs failed with info={info}")
        return x

    def solve(self, b):
        return self._solve(b, 0)

    def solve_adjoint(self, b):
        """Solve with the conjugate transpose of the factored matrix."""
        if np.iscomplexobj(self._lu):
            return self._solve(b, 2)
        return self._solve(b, 1)


class SparseLU:
    """Sparse LU (SuperLU) with the same interface as :class:`BandedLU`."""

    def __init__(self, a: sp.spmatrix, check: bool = True):
        a = sp.csc_matrix(a)
        self.n = a.shape[0]
        self.scale = float(np.max(np.abs(a.data))) if a.nnz else 0.0
        try:
            self._lu = spla.splu(a)
        except RuntimeError as exc:
            if check:
                raise SingularFactorError(f"sparse LU failed: {exc}") from exc
            eye = sp.identity(self.n, format="csc")
            self._lu = spla.splu(a + np.finfo(float).eps * max(self.scale, 1.0) * eye)
        self.dtype = self._lu.U.dtype
        pivots = np.abs(self._lu.U.diagonal())
        self.min_pivot = float(pivots.min()) if self.n else 0.0
        if check and self.min_pivot < PIVOT_RTOL * self.scale:
            raise SingularFactorError(
                f"sparse LU pivot {self.min_pivot:.3e} below {PIVOT_RTOL:g} x {self.scale:.3e}",
                self.min_pivot,
            )

    def solve(self, b):
        b = np.asarray(b)
        if np.iscomplexobj(b) and not np.iscomplexobj(np.empty(0, self.dtype)):
            return self._lu.solve(b.real.copy()) + 1j * self._lu.solve(b.imag.copy())
        return self._lu.solve(b.astype(np.result_type(b.dtype, self.dtype)))

    def solve_adjoint(self, b):
        b = np.asarray(b)
        if np.iscomplexobj(b) and not np.iscomplexobj(np.empty(0, self.dtype)):
            return self._lu.solve(b.real.copy(), trans="T") + 1j * self._lu.solve(
                b.imag.copy(), trans="T"
            )
        return self._lu.solve(b.astype(np.result_type(b.dtype, self.dtype)), trans="H")


def factorize(a: sp.spmatrix, check: bool = True):
    """Pick band LU when the band is narrow, sparse LU otherwise."""
    coo = sp.coo_matrix(a)
    n = a.shape[0]
    if coo.nnz:
        d = coo.col - coo.row
        kl, ku = int(max(0, -d.min())), int(max(0, d.max()))
    else:
        kl = ku = 0
    if n > 8 and 2 * kl + ku + 1 > n // 2:
        return SparseLU(a, check=check)
    return BandedLU(a, kl, ku, check=check)
