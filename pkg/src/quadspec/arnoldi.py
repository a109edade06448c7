"""Shift-invert Arnoldi for eigenvalues of the companion matrix near a shift.

The iteration runs on ``S = (A - z0 I)^{-1}``, applied through a single
factorisation of ``L(z0)``. Restarts are explicit: converged Ritz vectors
are locked into an orthonormal basis ``Q`` (with ``W = S Q`` kept alongside)
and every new Krylov vector is orthogonalised against ``Q`` and the current
basis with two passes of modified Gram-Schmidt.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .eig_dense import SpectrumResult, canonical_order
from .pencil import CompanionMatrix, NearEigenvalueError, QuadraticPencil, ShiftedSolver

log = logging.getLogger(__name__)

GUARD = 4


@dataclass(frozen=True)
class ArnoldiConfig:
    shift: complex = 0j
    subspace: int = 80
    want: int = 20
    tol: float = 1e-10
    max_restarts: int = 50
    seed: int = 0

    def validate(self, order: int):
        if not (1 <= self.want < self.subspace):
            raise ValueError(f"need 1 <= want < subspace, got want={self.want}, subspace={self.subspace}")
        if self.want > self.subspace // 2:
            raise ValueError(f"want={self.want} exceeds subspace/2={self.subspace // 2}")
        if self.subspace > 2 * order:
            raise ValueError(f"subspace {self.subspace} larger than companion order {2 * order}")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")


def _orthogonalize(x, bases, passes=2):
    """Project ``x`` off every column of each basis; returns (x, coefficients)."""
    coeffs = [np.zeros(b.shape[1], dtype=complex) for b in bases]
    for _ in range(passes):
        for b, c in zip(bases, coeffs):
            if b.shape[1] == 0:
                continue
            for j in range(b.shape[1]):
                d = np.vdot(b[:, j], x)
                x = x - d * b[:, j]
                c[j] += d
    return x, coeffs


def _factor_shift(p: QuadraticPencil, z0: complex, a_norm: float, rng) -> tuple[ShiftedSolver, complex]:
    """Factor ``L(z)`` at ``z0``, nudging the shift off a numerical eigenvalue.

    The pivot test does not catch every singular ``L(z0)``; a probe solve whose
    growth implies a distance below ``1e-11 ||A||`` to the spectrum is treated
    the same way. The nudge is ``sqrt(eps) max(1, |z0|)`` along the real axis.
    """
    nudge = np.sqrt(np.finfo(float).eps) * max(1.0, abs(z0))
    z = z0
    for _ in range(4):
        try:
            solver = ShiftedSolver(p, z)
        except NearEigenvalueError:
            z = z + nudge
            continue
        probe = rng.standard_normal(2 * p.order) + 1j * rng.standard_normal(2 * p.order)
        probe /= np.linalg.norm(probe)
        growth = np.linalg.norm(solver.apply_inverse(probe))
        if np.isfinite(growth) and growth * 1e-11 * a_norm < 1.0:
            return solver, z
        log.debug("shift %s sits on the spectrum (growth %.3e); nudging", z, growth)
        z = z + nudge
    raise NearEigenvalueError(z0)


def arnoldi_shift_invert(p: QuadraticPencil, cfg: ArnoldiConfig) -> SpectrumResult:
    """Eigenvalues of the companion of ``p`` nearest ``cfg.shift``.

    Each returned value comes with a Ritz residual ``||A w - lam w|| / ||w||``
    evaluated with the implicit companion; values meeting
    ``tol * ||A||_F`` are flagged converged. Fewer than ``want`` values are
    returned only on breakdown of the Krylov space or when restarts run out.
    """
    n_total = 2 * p.order
    cfg.validate(p.order)
    target_shift = complex(cfg.shift)
    comp = CompanionMatrix(p, "implicit")
    a_norm = p.companion_norm()
    rng = np.random.default_rng(cfg.seed)
    solver, z0 = _factor_shift(p, target_shift, a_norm, rng)

    q_lock = np.zeros((n_total, 0), dtype=complex)
    w_lock = np.zeros((n_total, 0), dtype=complex)
    start = rng.standard_normal(n_total) + 1j * rng.standard_normal(n_total)
    restarts = 0
    breakdown = False

    # a few guard values beyond `want` keep the nearest set honest
    target = min(cfg.want + GUARD, cfg.subspace - 1, n_total - 1)
    while q_lock.shape[1] < target and restarts <= cfg.max_restarts:
        n_lock = q_lock.shape[1]
        m = min(cfg.subspace, n_total - n_lock)
        v = np.zeros((n_total, m + 1), dtype=complex)
        h = np.zeros((m + 1, m), dtype=complex)
        c = np.zeros((n_lock, m), dtype=complex)
        x, _ = _orthogonalize(start, [q_lock])
        nx = np.linalg.norm(x)
        if nx == 0:
            break
        v[:, 0] = x / nx
        steps = m
        for j in range(m):
            y = solver.apply_inverse(v[:, j])
            y, (cq, cv) = _orthogonalize(y, [q_lock, v[:, : j + 1]])
            c[:, j] = cq
            h[: j + 1, j] = cv
            beta = np.linalg.norm(y)
            if beta <= 1e-14 * max(1.0, np.abs(h[: j + 1, j]).max()):
                # invariant subspace (or a shift sitting on an eigenvalue swamping
                # everything else): continue from a fresh orthogonal direction
                y, _ = _orthogonalize(rng.standard_normal(n_total) + 1j * rng.standard_normal(n_total),
                                      [q_lock, v[:, : j + 1]])
                beta = np.linalg.norm(y)
                if beta <= 1e-10:
                    steps = j + 1
                    breakdown = True
                    break
                v[:, j + 1] = y / beta
                continue
            h[j + 1, j] = beta
            v[:, j + 1] = y / beta
        hm = h[:steps, :steps]
        theta, y = np.linalg.eig(hm)
        # Ritz vectors of the deflated problem: locked part solves (T - theta) g = -C y
        t_lock = q_lock.conj().T @ w_lock
        order = np.argsort(-np.abs(theta))
        need = target - n_lock
        new_vecs = []
        for idx in order[:need]:
            th = theta[idx]
            yi = y[:, idx]
            g = np.zeros(n_lock, dtype=complex)
            if n_lock:
                g = np.linalg.solve(t_lock - th * np.eye(n_lock), -(c[:, :steps] @ yi))
            x = v[:, :steps] @ yi + (q_lock @ g if n_lock else 0)
            x /= np.linalg.norm(x)
            sx = solver.apply_inverse(x)
            if np.linalg.norm(sx - th * x) <= cfg.tol * abs(th):
                new_vecs.append((x, sx))
        # lock converged vectors in order of closeness to the shift
        for x, sx in new_vecs:
            xo, _ = _orthogonalize(x, [q_lock])
            nx = np.linalg.norm(xo)
            if nx < 1e-8:
                continue
            xo /= nx
            # S xo = (S x - sum coeff S q) / nx, consistent with W = S Q
            q_lock = np.column_stack([q_lock, xo])
            w_lock = np.column_stack([w_lock, solver.apply_inverse(xo)])
        log.debug("restart %d: locked %d of %d", restarts, q_lock.shape[1], target)
        if breakdown:
            break
        # restart from the sum of the wanted, still unconverged Ritz vectors
        pick = order[: max(target - q_lock.shape[1], 1)]
        start = v[:, :steps] @ y[:, pick].sum(axis=1)
        restarts += 1

    k = q_lock.shape[1]
    if k == 0:
        return SpectrumResult(np.zeros(0, complex), np.zeros(0, bool), restarts,
                              info={"shift": target_shift, "factored_shift": z0,
                                    "solves": solver.n_solves})
    t_lock = q_lock.conj().T @ w_lock
    theta, g = np.linalg.eig(t_lock)
    all_lams = z0 + 1.0 / theta
    keep = np.argsort(np.abs(all_lams - target_shift), kind="stable")[: cfg.want]
    lams = all_lams[keep]
    vecs = q_lock @ g[:, keep]
    vecs /= np.linalg.norm(vecs, axis=0)
    resid = np.array([np.linalg.norm(comp.matvec(vecs[:, i]) - lams[i] * vecs[:, i])
                      for i in range(len(lams))])
    conv = resid <= cfg.tol * a_norm
    o = canonical_order(lams)
    return SpectrumResult(
        lams[o], conv[o], restarts, eigenvectors=vecs[:, o],
        info={"shift": target_shift, "factored_shift": z0, "solves": solver.n_solves,
              "ritz_residuals": resid[o],
              "companion_norm": a_norm, "basis_orthogonality": float(
                  np.abs(q_lock.conj().T @ q_lock - np.eye(k)).max())},
    )
