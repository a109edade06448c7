"""Smallest singular values of ``A - zI`` over a grid of complex shifts."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .pencil import CompanionMatrix, NearEigenvalueError, QuadraticPencil, ShiftedSolver

DEFAULT_SEED = 20240531


@dataclass(frozen=True)
class ZGrid:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("grid bounds must be strictly ordered")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2 points per direction")

    @classmethod
    def parse(cls, text: str) -> "ZGrid":
        parts = [s.strip() for s in text.split(",")]
        if len(parts) != 6:
            raise ValueError(f"grid needs re0,re1,im0,im1,nx,ny; got {text!r}")
        r0, r1, i0, i1 = map(float, parts[:4])
        return cls(r0, r1, i0, i1, int(parts[4]), int(parts[5]))

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.linspace(self.re_min, self.re_max, self.nx),
                np.linspace(self.im_min, self.im_max, self.ny))

    def points(self) -> np.ndarray:
        """Complex shifts of shape ``(nx, ny)``."""
        re, im = self.axes()
        return re[:, None] + 1j * im[None, :]


@dataclass
class SminResult:
    value: float
    iterations: int
    converged: bool
    singular: bool = False


@dataclass
class PseudospectrumField:
    grid: ZGrid
    values: np.ndarray
    iterations: np.ndarray
    flags: np.ndarray
    seed: int = DEFAULT_SEED
    meta: dict = field(default_factory=dict)

    def rows(self):
        """``(z_re, z_im, smin)`` with the imaginary index running fastest."""
        pts = self.grid.points()
        for i in range(self.grid.nx):
            for j in range(self.grid.ny):
                yield pts[i, j].real, pts[i, j].imag, self.values[i, j]


def _start_vector(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return x / np.linalg.norm(x)


def _project_out(x: np.ndarray, basis: np.ndarray) -> np.ndarray:
    for _ in range(2):
        x = x - basis @ (basis.conj().T @ x)
    return x


def smin_at(p: QuadraticPencil, z: complex, seed: int = DEFAULT_SEED,
            rtol: float = 1e-8, max_iter: int = 200, keep: int = 3,
            basis_size: int = 30) -> SminResult:
    """``s_min(A - zI)`` from the dominant eigenvalue of ``T = (A - zI)^{-1} (A - zI)^{-H}``.

    Every application of ``T`` costs one adjoint and one forward solve with
    the factorisation of ``L(z)``. The dominant eigenvalue is found by
    thick-restart Lanczos with full reorthogonalisation (``keep`` Ritz
    vectors survive each restart), which copes with clustered smallest
    singular values where plain inverse iteration stalls. Iteration stops
    when the Ritz residual drops below ``rtol`` times the Ritz value or after
    ``max_iter`` applications of ``T``. The Ritz value never exceeds the true
    eigenvalue, so the returned ``1 / sqrt(rho)`` is an upper bound on
    ``s_min``. A shift where the factorisation reports singularity returns 0.
    """
    try:
        solver = ShiftedSolver(p, z)
    except NearEigenvalueError:
        return SminResult(0.0, 0, True, singular=True)
    n = 2 * p.order
    m = max(2, min(basis_size, n))
    keep = max(1, min(keep, m - 1))

    def apply_t(x):
        return solver.apply_inverse(solver.apply_inverse_adjoint(x))

    v = _start_vector(n, seed)[:, None]
    tv = np.zeros((n, 0), dtype=complex)
    rho = 0.0
    for it in range(1, max_iter + 1):
        tv = np.column_stack([tv, apply_t(v[:, -1])])
        if not np.all(np.isfinite(tv[:, -1])):
            return SminResult(0.0, it, True, singular=True)
        h = v.conj().T @ tv
        evals, evecs = np.linalg.eigh(0.5 * (h + h.conj().T))
        rho = float(evals[-1])
        if rho <= 0:
            return SminResult(0.0, it, True, singular=True)
        s = evecs[:, -1]
        r = tv @ s - rho * (v @ s)
        if np.linalg.norm(r) <= rtol * rho or v.shape[1] == n:
            return SminResult(float(1.0 / np.sqrt(rho)), it, True)
        if v.shape[1] == m:
            # thick restart on the leading Ritz vectors
            lead = evecs[:, ::-1][:, :keep]
            v, tv = v @ lead, tv @ lead
        nxt = _project_out(r, v)
        nrm = np.linalg.norm(nxt)
        if nrm <= 1e-14 * rho:
            return SminResult(float(1.0 / np.sqrt(rho)), it, True)
        v = np.column_stack([v, nxt / nrm])
    return SminResult(float(1.0 / np.sqrt(rho)), max_iter, False)


def smin_dense(p: QuadraticPencil, z: complex) -> float:
    """Cross-check path: full SVD of the materialised ``A - zI`` (small orders only)."""
    if p.order > 500:
        raise ValueError("dense s_min is limited to pencil order <= 500")
    a = CompanionMatrix(p, "dense").toarray().astype(complex)
    a -= z * np.eye(a.shape[0])
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def scan(p: QuadraticPencil, grid: ZGrid, seed: int = DEFAULT_SEED, workers: int = 1,
         rtol: float = 1e-8, max_iter: int = 200) -> PseudospectrumField:
    """Evaluate :func:`smin_at` at every grid node.

    Nodes are independent; with ``workers > 1`` they run on a thread pool and
    results are placed by grid index, so the field does not depend on
    scheduling. A failing node is recorded and the scan carries on.
    """
    pts = grid.points()
    values = np.zeros(pts.shape)
    iters = np.zeros(pts.shape, dtype=int)
    flags = np.empty(pts.shape, dtype=object)

    def one(idx):
        try:
            r = smin_at(p, pts[idx], seed=seed, rtol=rtol, max_iter=max_iter)
        except Exception as exc:  # keep scanning; the flag carries the reason
            return idx, SminResult(np.nan, 0, False), f"error: {exc}"
        flag = "singular" if r.singular else ("ok" if r.converged else "approximate")
        return idx, r, flag

    indices = list(np.ndindex(pts.shape))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, indices))
    else:
        results = [one(i) for i in indices]
    for idx, r, flag in results:
        values[idx] = r.value
        iters[idx] = r.iterations
        flags[idx] = flag
    return PseudospectrumField(grid, values, iters, flags, seed=seed,
                               meta={"pencil": p.label, "order": p.order})
