"""Dense nonsymmetric eigensolver.

Pipeline: power-of-two balancing, Householder reduction to upper Hessenberg
form, then Francis double-shift QR for real matrices (conjugate pairs are
read off 2x2 blocks) or Wilkinson single-shift QR for complex ones. The
kernels are compiled with numba; only eigenvalues are computed by QR, and
eigenvectors are recovered separately by inverse iteration.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numba
import numpy as np
import scipy.linalg

DEFLATION_EPS = 1e-14
EXCEPTIONAL_EVERY = 10
MAX_ITER_PER_ROW = 30


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    converged: np.ndarray
    iterations: int = 0
    eigenvectors: Optional[np.ndarray] = None
    info: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))


def canonical_order(values: np.ndarray) -> np.ndarray:
    """Indices sorting by imaginary part, then real part."""
    values = np.asarray(values)
    return np.lexsort((values.real, values.imag))


# -- balancing ---------------------------------------------------------------

def balance(a: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal similarity ``D^-1 A D`` with powers of two on the diagonal.

    Row and column off-diagonal 1-norms are brought within a factor of two of
    each other (Parlett-Reinsch). Returns the balanced matrix and ``diag(D)``.
    """
    b = np.array(a, dtype=np.result_type(a, np.float64), copy=True)
    n = b.shape[0]
    if b.shape != (n, n):
        raise ValueError("balance needs a square matrix")
    d = np.ones(n)
    absb = np.abs(b)
    for _ in range(max_sweeps):
        done = True
        for i in range(n):
            c = absb[:, i].sum() - absb[i, i]
            r = absb[i, :].sum() - absb[i, i]
            if c == 0.0 or r == 0.0:
                continue
            g = r / 2.0
            f = 1.0
            s = c + r
            while c < g:
                f *= 2.0
                c *= 4.0
            g = r * 2.0
            while c > g:
                f /= 2.0
                c /= 4.0
            if (c + r) / f < 0.95 * s:
                done = False
                d[i] *= f
                b[i, :] /= f
                b[:, i] *= f
                absb[i, :] /= f
                absb[:, i] *= f
        if done:
            break
    return b, d


# -- Hessenberg reduction ------------------------------------------------------

@numba.njit(cache=True)
def _hessenberg_kernel(a, q, want_q):
    n = a.shape[0]
    v = np.zeros(n, dtype=a.dtype)
    w = np.zeros(n, dtype=a.dtype)
    for k in range(n - 2):
        alpha = 0.0
        for i in range(k + 1, n):
            alpha += abs(a[i, k]) ** 2
        tail = alpha - abs(a[k + 1, k]) ** 2
        if tail == 0.0:
            continue
        alpha = np.sqrt(alpha)
        x0 = a[k + 1, k]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 != 0.0 else 1.0 + 0.0 * x0
        for i in range(k + 1, n):
            v[i] = a[i, k]
        v[k + 1] = x0 + phase * alpha
        vv = abs(v[k + 1]) ** 2 + tail
        beta = 2.0 / vv
        # left: A[k+1:, k:] -= beta v (v^H A)
        for j in range(k, n):
            w[j] = 0.0
        for i in range(k + 1, n):
            vi = np.conj(v[i])
            for j in range(k, n):
                w[j] += vi * a[i, j]
        for i in range(k + 1, n):
            bv = beta * v[i]
            for j in range(k, n):
                a[i, j] -= bv * w[j]
        # right: A[:, k+1:] -= beta (A v) v^H
        for i in range(n):
            s = 0.0 * v[0]
            for j in range(k + 1, n):
                s += a[i, j] * v[j]
            s *= beta
            for j in range(k + 1, n):
                a[i, j] -= s * np.conj(v[j])
        a[k + 1, k] = -phase * alpha
        for i in range(k + 2, n):
            a[i, k] = 0.0
        if want_q:
            for i in range(n):
                s = 0.0 * v[0]
                for j in range(k + 1, n):
                    s += q[i, j] * v[j]
                s *= beta
                for j in range(k + 1, n):
                    q[i, j] -= s * np.conj(v[j])


def hessenberg(a: np.ndarray, want_q: bool = True) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Unitary reduction ``A = Q H Q^H`` with ``H`` upper Hessenberg.

    Entries below the first subdiagonal of ``H`` are stored as exact zeros.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("hessenberg needs a square matrix")
    dt = np.complex128 if np.iscomplexobj(a) else np.float64
    h = np.array(a, dtype=dt, order="C", copy=True)
    n = h.shape[0]
    q = np.eye(n, dtype=dt) if want_q else np.zeros((1, 1), dtype=dt)
    if n > 2:
        _hessenberg_kernel(h, q, want_q)
    return h, (q if want_q else None)


# -- real Francis double-shift QR ---------------------------------------------

@numba.njit(cache=True)
def _hqr_real(a, eps, exc_every, max_total):
    """Eigenvalues of a real upper Hessenberg matrix (destroys ``a``).

    Returns ``(wr, wi, conv, iterations)``. Unconverged positions keep the
    diagonal of the stalled block and are flagged with ``conv = False``.
    """
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    conv = np.zeros(n, dtype=np.bool_)
    anorm = 0.0
    for i in range(n):
        for j in range(max(i - 1, 0), n):
            anorm += abs(a[i, j])
    nn = n - 1
    t = 0.0
    total = 0
    failed = False
    while nn >= 0:
        its = 0
        while True:
            # look for a negligible subdiagonal entry
            l = 0
            for ll in range(nn, 0, -1):
                s = abs(a[ll - 1, ll - 1]) + abs(a[ll, ll])
                if s == 0.0:
                    s = anorm
                if abs(a[ll, ll - 1]) <= eps * s:
                    a[ll, ll - 1] = 0.0
                    l = ll
                    break
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                conv[nn] = True
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = np.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + (z if p >= 0.0 else -z)
                    wr[nn - 1] = x + z
                    wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = 0.0
                    wi[nn] = 0.0
                else:
                    wr[nn - 1] = x + p
                    wr[nn] = x + p
                    wi[nn - 1] = z
                    wi[nn] = -z
                conv[nn - 1] = True
                conv[nn] = True
                nn -= 2
                break
            if total >= max_total:
                failed = True
                break
            if its > 0 and its % exc_every == 0:
                # exceptional shift
                t += x
                for i in range(nn + 1):
                    a[i, i] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                x = 0.75 * s
                y = x
                w = -0.4375 * s * s
            its += 1
            total += 1
            # find two consecutive small subdiagonals to start the bulge
            m = nn - 2
            p = 0.0
            q = 0.0
            r = 0.0
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0
            # bulge chase restricted to the active window [l, nn]
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = 0.0
                    if k != nn - 1:
                        r = a[k + 2, k - 1]
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = np.sqrt(p * p + q * q + r * r)
                if p < 0.0:
                    s = -s
                if s != 0.0:
                    if k == m:
                        if l != m:
                            a[k, k - 1] = -a[k, k - 1]
                    else:
                        a[k, k - 1] = -s * x
                    p += s
                    x = p / s
                    y = q / s
                    z = r / s
                    q /= p
                    r /= p
                    for j in range(k, nn + 1):
                        p = a[k, j] + q * a[k + 1, j]
                        if k != nn - 1:
                            p += r * a[k + 2, j]
                            a[k + 2, j] -= p * z
                        a[k + 1, j] -= p * y
                        a[k, j] -= p * x
                    mmin = nn if nn < k + 3 else k + 3
                    for i in range(l, mmin + 1):
                        p = x * a[i, k] + y * a[i, k + 1]
                        if k != nn - 1:
                            p += z * a[i, k + 2]
                            a[i, k + 2] -= p * r
                        a[i, k + 1] -= p * q
                        a[i, k] -= p
        if failed:
            for i in range(nn + 1):
                wr[i] = a[i, i] + t
                wi[i] = 0.0
                conv[i] = False
            break
    return wr, wi, conv, total


# -- complex single-shift QR ----------------------------------------------------

@numba.njit(cache=True)
def _cabs1(z):
    return abs(z.real) + abs(z.imag)


@numba.njit(cache=True)
def _hqr_complex(a, eps, exc_every, max_total):
    """Eigenvalues of a complex upper Hessenberg matrix (destroys ``a``)."""
    n = a.shape[0]
    w = np.zeros(n, dtype=np.complex128)
    conv = np.zeros(n, dtype=np.bool_)
    anorm = 0.0
    for i in range(n):
        for j in range(max(i - 1, 0), n):
            anorm += abs(a[i, j])
    cs = np.zeros(n)
    sn = np.zeros(n, dtype=np.complex128)
    hi = n - 1
    total = 0
    failed = False
    while hi >= 0:
        its = 0
        while True:
            lo = 0
            for ll in range(hi, 0, -1):
                s = _cabs1(a[ll - 1, ll - 1]) + _cabs1(a[ll, ll])
                if s == 0.0:
                    s = anorm
                if _cabs1(a[ll, ll - 1]) <= eps * s:
                    a[ll, ll - 1] = 0.0
                    lo = ll
                    break
            if lo == hi:
                w[hi] = a[hi, hi]
                conv[hi] = True
                hi -= 1
                break
            if total >= max_total:
                failed = True
                break
            if its > 0 and its % exc_every == 0:
                sigma = a[hi, hi] + 0.75 * abs(a[hi, hi - 1].real) + 0.75j * abs(a[hi, hi - 1].imag) \
                    + abs(a[hi, hi - 1]) * (1.0 + 0.5j)
            else:
                # Wilkinson shift: eigenvalue of trailing 2x2 nearer a[hi, hi]
                aa = a[hi - 1, hi - 1]
                bb = a[hi - 1, hi]
                cc = a[hi, hi - 1]
                dd = a[hi, hi]
                tr2 = 0.5 * (aa + dd)
                disc = np.sqrt(0.25 * (aa - dd) * (aa - dd) + bb * cc)
                e1 = tr2 + disc
                e2 = tr2 - disc
                sigma = e1 if abs(e1 - dd) <= abs(e2 - dd) else e2
            its += 1
            total += 1
            # explicit shifted QR step on the window via Givens rotations
            for k in range(lo, hi + 1):
                a[k, k] -= sigma
            for k in range(lo, hi):
                f = a[k, k]
                g = a[k + 1, k]
                af = abs(f)
                ag = abs(g)
                if ag == 0.0:
                    c = 1.0
                    s_ = 0.0 + 0.0j
                elif af == 0.0:
                    c = 0.0
                    s_ = np.conj(g) / ag
                    # rotation mapping (0, g) to (|g|, 0)
                else:
                    nrm = np.sqrt(af * af + ag * ag)
                    c = af / nrm
                    s_ = (f / af) * np.conj(g) / nrm
                cs[k] = c
                sn[k] = s_
                for j in range(k, hi + 1):
                    t1 = a[k, j]
                    t2 = a[k + 1, j]
                    a[k, j] = c * t1 + s_ * t2
                    a[k + 1, j] = -np.conj(s_) * t1 + c * t2
            for k in range(lo, hi):
                c = cs[k]
                s_ = sn[k]
                top = k + 2 if k + 2 <= hi else hi
                for i in range(lo, top + 1):
                    t1 = a[i, k]
                    t2 = a[i, k + 1]
                    a[i, k] = c * t1 + np.conj(s_) * t2
                    a[i, k + 1] = -s_ * t1 + c * t2
            for k in range(lo, hi + 1):
                a[k, k] += sigma
        if failed:
            for i in range(hi + 1):
                w[i] = a[i, i]
                conv[i] = False
            break
    return w, conv, total


def qr_eigenvalues(h: np.ndarray, eps: float = DEFLATION_EPS) -> SpectrumResult:
    """All eigenvalues of an upper Hessenberg matrix by shifted QR.

    Real input takes the Francis double-shift path; complex input the
    single-shift path. A block that fails to converge within ``30 n`` total
    iterations leaves its eigenvalues flagged ``converged=False``.
    """
    h = np.asarray(h)
    n = h.shape[0]
    if n == 0:
        return SpectrumResult(np.zeros(0, complex), np.zeros(0, bool))
    max_total = MAX_ITER_PER_ROW * n
    if np.iscomplexobj(h):
        work = np.array(h, dtype=np.complex128, order="C", copy=True)
        w, conv, its = _hqr_complex(work, eps, EXCEPTIONAL_EVERY, max_total)
    else:
        work = np.array(h, dtype=np.float64, order="C", copy=True)
        wr, wi, conv, its = _hqr_real(work, eps, EXCEPTIONAL_EVERY, max_total)
        w = wr + 1j * wi
    order = canonical_order(w)
    return SpectrumResult(w[order], conv[order], int(its))


def eigvals(a: np.ndarray, do_balance: bool = True, eps: float = DEFLATION_EPS) -> SpectrumResult:
    """Eigenvalues of a dense square matrix: balance, Hessenberg, QR."""
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    b = balance(a)[0] if do_balance else a
    h, _ = hessenberg(b, want_q=False)
    res = qr_eigenvalues(h, eps)
    res.info["balanced"] = do_balance
    return res


def eigenvector(a: np.ndarray, lam: complex, steps: int = 5, seed: int = 0):
    """Unit eigenvector for an approximate eigenvalue by inverse iteration.

    The shift is moved off ``lam`` by ``1e-10 ||A||`` so the factorisation
    stays regular; on breakdown the offset grows tenfold, up to three times.
    Returns ``(vector, residual)`` with ``residual = ||A x - lam x||``.
    """
    a = np.asarray(a)
    n = a.shape[0]
    scale = max(np.linalg.norm(a, 1), np.finfo(float).tiny)
    dt = np.complex128
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    offset = 1e-10 * scale
    for attempt in range(4):
        shifted = a.astype(dt) - (lam + offset) * np.eye(n, dtype=dt)
        try:
            with np.errstate(all="raise"):
                lu = scipy.linalg.lu_factor(shifted, check_finite=True)
            if np.any(np.diag(lu[0]) == 0):
                raise np.linalg.LinAlgError("zero pivot")
        except (np.linalg.LinAlgError, FloatingPointError, ValueError):
            offset *= 10.0
            continue
        y = x
        for _ in range(steps):
            y = scipy.linalg.lu_solve(lu, y)
            ny = np.linalg.norm(y)
            if not np.isfinite(ny) or ny == 0:
                break
            y = y / ny
            x = y
        break
    res = float(np.linalg.norm(a @ x - lam * x))
    return x, res
