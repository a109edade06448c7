"""Closed-form reference spectra.

Nothing here touches the assembly code: the dispersion roots come from the
Fourier symbols of the stencils and the Dirichlet Laplacian eigenvalues from
the sine formula, so agreement with the assembled operators is a real check.
"""
from __future__ import annotations

import cmath
import itertools
import math
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linear_sum_assignment
from scipy.sparse.csgraph import maximum_bipartite_matching

from .grid import GridKind, GridSpec


def _quadratic_roots(s: float, p: float) -> tuple[complex, complex]:
    """Roots of ``x^2 + s x + p``; the '+' root takes the principal square root."""
    sq = cmath.sqrt(s * s - 4.0 * p)
    return (-s + sq) / 2.0, (-s - sq) / 2.0


def continuous_dispersion_roots(a: Sequence[float], k: Sequence[int]) -> tuple[complex, complex]:
    """Roots of ``lam^2 + lam * sum(a_j k_j) + |k|^2 = 0``."""
    if len(a) != len(k):
        raise ValueError("a and k must have the same length")
    s = float(sum(aj * kj for aj, kj in zip(a, k)))
    k2 = float(sum(kj * kj for kj in k))
    return _quadratic_roots(s, k2)


def _constant_values(a) -> list[float]:
    out = []
    for aj in a:
        if hasattr(aj, "is_constant"):
            if not aj.is_constant:
                raise ValueError("discrete dispersion needs constant coefficients")
            out.append(float(aj.value))
        else:
            out.append(float(aj))
    return out


def dispersion_symbols(g: GridSpec, a, m: Sequence[int]) -> tuple[float, float]:
    """Fourier symbols of the periodic advection and Laplacian for mode ``m``."""
    if g.kind is not GridKind.PERIODIC:
        raise ValueError("discrete dispersion is defined on periodic grids")
    a = _constant_values(a)
    if len(a) != g.dim or len(m) != g.dim:
        raise ValueError(f"need {g.dim} coefficients and mode indices")
    n, h = g.n_points, g.spacing
    s1 = 0.0
    s2 = 0.0
    for aj, mj in zip(a, m):
        if not 0 <= mj < n:
            raise ValueError(f"mode index {mj} outside 0..{n - 1}")
        theta = 2.0 * math.pi * mj / n
        s1 += aj * math.sin(theta) / h
        s2 += (2.0 - 2.0 * math.cos(theta)) / (h * h)
    return s1, s2


def discrete_dispersion_roots(g: GridSpec, a, m: Sequence[int]) -> tuple[complex, complex]:
    """Eigenvalues of the assembled constant-coefficient periodic pencil on mode ``m``."""
    return _quadratic_roots(*dispersion_symbols(g, a, m))


def discrete_dispersion_spectrum(g: GridSpec, a) -> np.ndarray:
    """Union of :func:`discrete_dispersion_roots` over all ``N**dim`` modes."""
    out = []
    for m in itertools.product(range(g.n_points), repeat=g.dim):
        out.extend(discrete_dispersion_roots(g, a, m))
    return np.array(out)


def c0_spectrum(h0_eigs: Iterable[float]) -> np.ndarray:
    """``{+i sqrt(mu), -i sqrt(mu)}`` for each eigenvalue ``mu >= 0`` of ``H0``."""
    out = []
    for mu in h0_eigs:
        mu = float(mu)
        if mu < 0:
            raise ValueError(f"H0 eigenvalue {mu} is negative")
        r = math.sqrt(mu)
        out.extend((1j * r, -1j * r))
    return np.array(out, dtype=complex)


def second_difference_eigs(n: int, h: float) -> np.ndarray:
    """Eigenvalues of ``-(u[i-1] - 2u[i] + u[i+1]) / h^2`` on ``n`` nodes with zero ends."""
    p = np.arange(1, n + 1)
    return 4.0 / (h * h) * np.sin(p * np.pi / (2.0 * (n + 1))) ** 2


def dirichlet_laplacian_eigs(g: GridSpec) -> np.ndarray:
    """All ``N**dim`` eigenvalues of the assembled ``-Lap`` on a Dirichlet box."""
    if g.kind is not GridKind.DIRICHLET:
        raise ValueError("dirichlet_laplacian_eigs needs a dirichlet-box grid")
    one = second_difference_eigs(g.n_points, g.spacing)
    total = np.zeros(1)
    for _ in range(g.dim):
        total = (total[:, None] + one[None, :]).ravel()
    return np.sort(total)


def sturm_count(diag: np.ndarray, off: np.ndarray, x: float) -> int:
    """Number of eigenvalues below ``x`` of a symmetric tridiagonal matrix."""
    count = 0
    q = 1.0
    tiny = np.finfo(float).tiny
    for i in range(len(diag)):
        b2 = off[i - 1] ** 2 if i > 0 else 0.0
        q = diag[i] - x - (b2 / q if i > 0 else 0.0)
        if q == 0.0:
            q = tiny
        if q < 0:
            count += 1
    return count


def tridiagonal_eigs_bisection(diag, off, tol: float = 1e-13) -> np.ndarray:
    """Eigenvalues of a symmetric tridiagonal matrix by Sturm-sequence bisection."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    n = len(diag)
    radius = np.abs(np.concatenate([[0.0], off])) + np.abs(np.concatenate([off, [0.0]]))
    lo, hi = float(np.min(diag - radius)), float(np.max(diag + radius))
    span = max(hi - lo, 1.0)
    out = np.empty(n)
    for k in range(n):
        a, b = lo, hi
        while b - a > tol * span:
            mid = 0.5 * (a + b)
            if sturm_count(diag, off, mid) > k:
                b = mid
            else:
                a = mid
        out[k] = 0.5 * (a + b)
    return out


def symmetric_eigs(h0) -> np.ndarray:
    """Eigenvalues of a real symmetric operator via LAPACK's symmetric solver."""
    m = h0.toarray() if hasattr(h0, "toarray") else np.asarray(h0)
    return np.linalg.eigvalsh(m)


# -- comparing point clouds -----------------------------------------------------

def hausdorff(a, b) -> float:
    """Hausdorff distance between two finite sets of complex numbers."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0 or b.size == 0:
        return math.inf if a.size != b.size else 0.0
    best_a = np.full(a.size, np.inf)
    best_b = np.full(b.size, np.inf)
    step = max(1, 4_000_000 // max(b.size, 1))
    for i in range(0, a.size, step):
        d = np.abs(a[i:i + step, None] - b[None, :])
        best_a[i:i + step] = d.min(axis=1)
        best_b = np.minimum(best_b, d.min(axis=0))
    return float(max(best_a.max(), best_b.max()))


def matching_distance(a, b) -> float:
    """Bottleneck distance: smallest ``d`` admitting a perfect matching with all pairs ``<= d``.

    Multiplicity aware, unlike :func:`hausdorff`. Found by bisection over the
    sorted pair distances with a bipartite-matching feasibility test.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        raise ValueError(f"sets have different sizes: {a.size} vs {b.size}")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    # the optimal-sum assignment gives a feasible upper bound to start from
    r, c = linear_sum_assignment(cost)
    levels = np.unique(cost)
    hi = int(np.searchsorted(levels, cost[r, c].max()))
    lo = int(np.searchsorted(levels, max(cost.min(axis=0).max(), cost.min(axis=1).max())))
    while lo < hi:
        mid = (lo + hi) // 2
        graph = sp.csr_matrix(cost <= levels[mid])
        if np.all(maximum_bipartite_matching(graph, perm_type="column") >= 0):
            hi = mid
        else:
            lo = mid + 1
    return float(levels[lo])
