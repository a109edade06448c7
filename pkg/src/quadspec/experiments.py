"""Assemble, solve and certify: the pipeline behind the command line."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .arnoldi import ArnoldiConfig, arnoldi_shift_invert
from .config import ExperimentConfig
from .dirichlet import DirichletPencilConfig, assemble_dirichlet_pencil
from .eig_dense import SpectrumResult, canonical_order, eigvals
from .grid import GridKind, make_grid
from .oracles import c0_spectrum, discrete_dispersion_spectrum, hausdorff, symmetric_eigs
from .pencil import DENSE_CAP, CompanionMatrix, QuadraticPencil, certify, deflate_null_vector
from .periodic import PeriodicPencilConfig, assemble_periodic_pencil

log = logging.getLogger(__name__)

DENSE_GUARD = 12000


class SolverFailure(RuntimeError):
    pass


@dataclass
class SpectrumRecord:
    config: dict
    eigenvalues: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    stats: dict = field(default_factory=dict)
    wall_time: float = 0.0
    version: str = __version__
    oracle: dict = field(default_factory=dict)
    status: str = "ok"
    error: Optional[str] = None
    tag: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def build_pencil(cfg: ExperimentConfig) -> QuadraticPencil:
    if cfg.problem == "dirichlet":
        g = make_grid(cfg.dim, GridKind.DIRICHLET, cfg.extent, cfg.n_points)
        return assemble_dirichlet_pencil(DirichletPencilConfig(g, cfg.c))
    g = make_grid(cfg.dim, GridKind.PERIODIC, cfg.extent, cfg.n_points, origin=cfg.origin)
    return assemble_periodic_pencil(PeriodicPencilConfig(g, cfg.coefficient_specs()))


def dense_spectrum(p: QuadraticPencil, force: bool = False, deflate: bool = True):
    """All ``2M`` eigenvalues of the companion, in canonical order.

    For periodic pencils the double zero carried by the constant mode is
    deflated exactly before the QR solve unless ``deflate`` is false.
    """
    if 2 * p.order > DENSE_GUARD and not force:
        raise SolverFailure(
            f"dense companion of order {2 * p.order} exceeds {DENSE_GUARD}; "
            "use --solver arnoldi with --shift, or pass --force"
        )
    cap = p.order if force else DENSE_CAP
    grid = p.grid
    if deflate and grid is not None and grid.kind is GridKind.PERIODIC and p.order > 1:
        # the constant vector is annihilated by both periodic operators
        reduced = deflate_null_vector(p, np.ones(p.order))
        res = eigvals(CompanionMatrix(reduced, "dense", cap=cap).toarray())
        values = np.concatenate([res.eigenvalues, np.zeros(2, complex)])
        conv = np.concatenate([res.converged, np.ones(2, bool)])
        o = canonical_order(values)
        return SpectrumResult(values[o], conv[o], res.iterations, info={"deflated": 2})
    return eigvals(CompanionMatrix(p, "dense", cap=cap).toarray())


def arnoldi_spectrum(p: QuadraticPencil, shifts, want: int, subspace: int, tol: float, seed: int):
    """Union of shift-invert runs, duplicates across shifts merged."""
    values, conv, stats = [], [], []
    for z0 in shifts:
        cfg = ArnoldiConfig(shift=complex(z0), subspace=subspace, want=want, tol=tol, seed=seed)
        r = arnoldi_shift_invert(p, cfg)
        stats.append({"shift": [z0.real, z0.imag], "found": len(r), "restarts": r.iterations,
                      "solves": r.info.get("solves", 0)})
        # a value already found from an earlier shift is matched one-to-one, so
        # genuine multiplicities inside a single run survive the merge
        previous = np.array(values, dtype=complex)
        used = np.zeros(len(previous), dtype=bool)
        for lam, ok in zip(r.eigenvalues, r.converged):
            if len(previous):
                dist = np.where(used, np.inf, np.abs(previous - lam))
                j = int(np.argmin(dist))
                if dist[j] <= 1e-8 * max(1.0, abs(lam)):
                    used[j] = True
                    continue
            values.append(lam)
            conv.append(ok)
    values = np.array(values, dtype=complex)
    conv = np.array(conv, dtype=bool)
    o = canonical_order(values)
    return values[o], conv[o], stats


def oracle_deltas(cfg: ExperimentConfig, p: QuadraticPencil, values: np.ndarray) -> dict:
    if cfg.problem == "dirichlet" and cfg.c == 0:
        ref = c0_spectrum(np.clip(symmetric_eigs(p.h0), 0, None))
        return {"c0_hausdorff": hausdorff(values, ref)}
    if cfg.problem == "periodic":
        specs = cfg.coefficient_specs()
        if all(a.is_constant for a in specs):
            ref = discrete_dispersion_spectrum(p.grid, specs)
            return {"dispersion_hausdorff": hausdorff(values, ref)}
    return {}


def run(cfg: ExperimentConfig) -> SpectrumRecord:
    """Solve one configuration and certify every eigenvalue with a residual."""
    t0 = time.perf_counter()
    rec = SpectrumRecord(config=cfg.echo(), tag=cfg.tag())
    try:
        p = build_pencil(cfg)
        if cfg.solver == "dense":
            res = dense_spectrum(p, force=cfg.force)
            values = res.eigenvalues
            rec.stats = {"solver": "dense", "qr_iterations": res.iterations,
                         "unconverged": int((~res.converged).sum()), "order": 2 * p.order}
            if not res.all_converged:
                raise SolverFailure(f"QR did not converge for {rec.stats['unconverged']} eigenvalues")
            rec.oracle = oracle_deltas(cfg, p, values)
        else:
            values, conv, stats = arnoldi_spectrum(p, cfg.shifts, cfg.want, cfg.subspace,
                                                   cfg.tol, cfg.seed)
            rec.stats = {"solver": "arnoldi", "runs": stats, "order": 2 * p.order,
                         "unconverged": int((~conv).sum())}
            if len(values) == 0:
                raise SolverFailure("Arnoldi returned no converged eigenvalues")
        rec.eigenvalues = values
        rec.residuals = certify(p, values, seed=cfg.seed)
        rec.stats["max_residual"] = float(rec.residuals.max()) if len(values) else 0.0
    except SolverFailure as exc:
        rec.status, rec.error = "failed", str(exc)
    except (np.linalg.LinAlgError, ArithmeticError, ValueError) as exc:
        rec.status, rec.error = "failed", f"{type(exc).__name__}: {exc}"
    rec.wall_time = time.perf_counter() - t0
    log.info("%s: %s in %.2fs", rec.tag, rec.status, rec.wall_time)
    return rec


def sweep(cfg: ExperimentConfig, workers: int = 1) -> list[SpectrumRecord]:
    """One record per sweep tuple, failures kept as placeholders, input order preserved."""
    configs = cfg.expand()
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, configs))
    return [run(c) for c in configs]
