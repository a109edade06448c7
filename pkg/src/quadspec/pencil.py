"""Quadratic pencils ``L(z) = H0 + z H1 + z^2 I`` and their companion form.

The companion matrix is ``A = [[0, I], [-H0, -H1]]`` of order ``2M``; its
eigenvalues are those of the pencil and an eigenvector ``(u, v)`` has
``v = lambda * u``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .banded import SingularFactorError, factorize
from .operators import SparseOperator

DENSE_CAP = 6000


class NearEigenvalueError(SingularFactorError):
    """The shift ``z`` is (numerically) an eigenvalue of the pencil."""

    def __init__(self, z: complex, pivot: float = 0.0):
        super().__init__(f"L(z) is numerically singular at z = {z}", pivot)
        self.z = z


@dataclass(eq=False)
class QuadraticPencil:
    h0: SparseOperator
    h1: SparseOperator
    label: str = "pencil"
    grid: Optional[object] = field(default=None, repr=False)

    def __post_init__(self):
        if self.h0.order != self.h1.order:
            raise ValueError(f"H0 has order {self.h0.order} but H1 has {self.h1.order}")

    @property
    def order(self) -> int:
        return self.h0.order

    @property
    def scalar_field(self) -> str:
        return "complex" if (self.h0.is_complex or self.h1.is_complex) else "real"

    @property
    def is_real(self) -> bool:
        return self.scalar_field == "real"

    @cached_property
    def norms(self) -> tuple[float, float]:
        """Frobenius norms of ``H0`` and ``H1``."""
        return self.h0.frobenius(), self.h1.frobenius()

    def companion_norm(self) -> float:
        """Frobenius norm of the companion matrix."""
        n0, n1 = self.norms
        return float(np.sqrt(self.order + n0**2 + n1**2))

    def matrix_at(self, z: complex) -> sp.csr_matrix:
        """Sparse ``L(z)``."""
        eye = sp.identity(self.order, format="csr")
        if z == 0:
            return self.h0.matrix.astype(np.result_type(self.h0.matrix.dtype, float))
        return (self.h0.matrix + z * self.h1.matrix + (z * z) * eye).tocsr()

    def apply(self, z: complex, u: np.ndarray) -> np.ndarray:
        return self.h0.matrix @ u + z * (self.h1.matrix @ u) + (z * z) * u


@dataclass(frozen=True)
class EigenPair:
    value: complex
    vector: np.ndarray
    residual: float


class CompanionMatrix:
    """Companion linearisation, implicit (matvec only) or densely materialised."""

    def __init__(self, pencil: QuadraticPencil, mode: str = "implicit", cap: int = DENSE_CAP):
        if mode not in ("implicit", "dense"):
            raise ValueError(f"mode must be 'implicit' or 'dense', got {mode!r}")
        self.pencil = pencil
        self.mode = mode
        self._dense = None
        if mode == "dense":
            if pencil.order > cap:
                raise ValueError(
                    f"dense companion of order {2 * pencil.order} exceeds the cap "
                    f"(pencil order {pencil.order} > {cap}); use the Arnoldi solver"
                )
            self._dense = self._materialize()

    @property
    def shape(self) -> tuple[int, int]:
        n = 2 * self.pencil.order
        return n, n

    @property
    def dtype(self):
        return np.complex128 if not self.pencil.is_real else np.float64

    def _materialize(self) -> np.ndarray:
        p = self.pencil
        m = p.order
        a = np.zeros((2 * m, 2 * m), dtype=self.dtype)
        a[:m, m:] = np.eye(m)
        a[m:, :m] = -p.h0.toarray()
        a[m:, m:] = -p.h1.toarray()
        return a

    def toarray(self) -> np.ndarray:
        if self._dense is None:
            return self._materialize()
        return self._dense

    def matvec(self, w: np.ndarray) -> np.ndarray:
        """``A @ (u; v) = (v; -H0 u - H1 v)``, computed blockwise."""
        m = self.pencil.order
        u, v = w[:m], w[m:]
        lower = -(self.pencil.h0.matrix @ u) - (self.pencil.h1.matrix @ v)
        return np.concatenate([v, lower])

    __matmul__ = matvec


def linearize(p: QuadraticPencil, mode: str = "implicit", cap: int = DENSE_CAP) -> CompanionMatrix:
    return CompanionMatrix(p, mode, cap)


def residual(p: QuadraticPencil, lam: complex, u: np.ndarray) -> float:
    """Backward-error style residual of an approximate eigenpair.

    ``||L(lam) u|| / (||u|| (||H0||_F + |lam| ||H1||_F + |lam|^2))``
    """
    u = np.asarray(u)
    nu = np.linalg.norm(u)
    if nu == 0:
        raise ValueError("residual of the zero vector is undefined")
    n0, n1 = p.norms
    a = abs(lam)
    return float(np.linalg.norm(p.apply(lam, u)) / (nu * (n0 + a * n1 + a * a)))


class ShiftedSolver:
    """Solves ``(A - zI) w = b`` through one factorisation of ``L(z)``.

    Block elimination gives ``L(z) u = -(g + (H1 + zI) f)`` and
    ``v = f + z u``. The factorisation is reused for every right-hand side,
    and its conjugate transpose handles ``(A - zI)^H``.
    """

    def __init__(self, p: QuadraticPencil, z: complex):
        self.pencil = p
        self.z = complex(z)
        lz = p.matrix_at(self.z) if self.z.imag else p.matrix_at(self.z.real)
        try:
            self._lu = factorize(lz, check=True)
        except SingularFactorError as exc:
            raise NearEigenvalueError(self.z, exc.pivot) from exc
        self.n_solves = 0

    def solve(self, f: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        p, z = self.pencil, self.z
        rhs = -(g + p.h1.matrix @ f + z * f)
        u = self._lu.solve(rhs)
        self.n_solves += 1
        return u, f + z * u

    def solve_adjoint(self, f: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Solve ``(A - zI)^H (a; b) = (f; g)``."""
        p, zc = self.pencil, np.conj(self.z)
        b = self._lu.solve_adjoint(-(f + zc * g))
        a = g + p.h1.matrix.conj().T @ b + zc * b
        self.n_solves += 1
        return a, b

    def apply_inverse(self, w: np.ndarray) -> np.ndarray:
        m = self.pencil.order
        u, v = self.solve(w[:m], w[m:])
        return np.concatenate([u, v])

    def apply_inverse_adjoint(self, w: np.ndarray) -> np.ndarray:
        m = self.pencil.order
        a, b = self.solve_adjoint(w[:m], w[m:])
        return np.concatenate([a, b])


def shifted_solve(p: QuadraticPencil, z: complex, rhs: tuple[np.ndarray, np.ndarray]):
    f, g = rhs
    return ShiftedSolver(p, z).solve(np.asarray(f), np.asarray(g))


def eigenpair(p: QuadraticPencil, lam: complex, steps: int = 3, seed: int = 0) -> EigenPair:
    """Recover the u-block for ``lam`` by inverse iteration on ``L(lam)``."""
    lam = complex(lam)
    lu = factorize(p.matrix_at(lam), check=False)
    rng = np.random.default_rng(seed)
    m = p.order
    u = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    u /= np.linalg.norm(u)
    for _ in range(steps):
        u = lu.solve(u)
        nu = np.linalg.norm(u)
        if not np.isfinite(nu) or nu == 0:
            break
        u = u / nu
    return EigenPair(lam, u, residual(p, lam, u))


def _reflect(h: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``P H P`` for the Householder reflector ``P = I - 2 v v^H / (v^H v)``."""
    c = 2.0 / np.vdot(v, v).real
    hv = h @ v
    vh = v.conj() @ h
    out = h - c * np.outer(v, vh) - c * np.outer(hv, v.conj())
    return out + (c * c * np.vdot(v, hv)) * np.outer(v, v.conj())


def deflate_null_vector(p: QuadraticPencil, x: np.ndarray, rtol: float = 1e-12) -> QuadraticPencil:
    """Remove a common null vector of ``H0`` and ``H1`` from the pencil.

    When ``H0 x = H1 x = 0`` we have ``L(z) x = z^2 x``, so in an orthonormal
    basis starting with ``x`` the pencil is block upper triangular and
    ``det L(z) = z^2 det L~(z)``. The returned pencil ``L~`` has order
    ``M - 1``; the deflated pair of eigenvalues is exactly ``{0, 0}``. Such a
    pair is a Jordan block of the companion, which a backward-stable solver
    can only resolve to about ``sqrt(eps)``; deflating it keeps that error out
    of the rest of the computation.
    """
    x = np.asarray(x)
    x = x / np.linalg.norm(x)
    n0, n1 = p.norms
    if (np.linalg.norm(p.h0 @ x) > rtol * max(n0, 1.0)
            or np.linalg.norm(p.h1 @ x) > rtol * max(n1, 1.0)):
        raise ValueError("vector is not annihilated by both H0 and H1")
    alpha = -np.exp(1j * np.angle(x[0])) if np.iscomplexobj(x) else -np.sign(x[0] or 1.0)
    v = x.astype(np.result_type(x, alpha)).copy()
    v[0] -= alpha  # P x = alpha e1, hence (P H P) e1 = 0
    blocks = []
    for op in (p.h0, p.h1):
        reduced = _reflect(op.toarray().astype(np.result_type(op.matrix.dtype, v)), v)[1:, 1:]
        if not op.is_complex and np.isrealobj(v):
            reduced = reduced.real
        blocks.append(SparseOperator(reduced, op.hint))
    return QuadraticPencil(blocks[0], blocks[1], label=f"{p.label}_deflated", grid=None)


def certify(p: QuadraticPencil, values, seed: int = 0) -> np.ndarray:
    """Residual for each eigenvalue in ``values``."""
    return np.array([eigenpair(p, lam, seed=seed).residual for lam in values])
