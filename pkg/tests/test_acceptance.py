"""Acceptance criteria, one test per numbered criterion (criterion 2 has two).

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary ends
with one PASS/FAIL line per criterion and the measured quantities.
"""
import math
from functools import lru_cache

import numpy as np
import pytest

from quadspec.arnoldi import ArnoldiConfig, arnoldi_shift_invert
from quadspec.eig_dense import eigvals
from quadspec.experiments import dense_spectrum
from quadspec.oracles import (
    c0_spectrum,
    discrete_dispersion_spectrum,
    hausdorff,
    matching_distance,
    symmetric_eigs,
)
from quadspec.pencil import certify
from quadspec.pseudospectra import ZGrid, scan, smin_at

from .conftest import dirichlet_pencil, periodic_pencil
from .test_eig_dense import known_spectrum, random_matrix

SQRT2 = math.sqrt(2)
SECTOR = math.pi / 3 - 0.05


@pytest.fixture
def report(record_property, request):
    number = request.node.get_closest_marker("acceptance").args[0]
    record_property("criterion", number)

    def detail(text):
        record_property("detail", text)
        print(f"criterion {number}: {text}")

    return detail


@lru_cache(maxsize=None)
def dirichlet_spectrum(n, c, extent=1.0):
    p = dirichlet_pencil(n, c=c, extent=extent)
    res = dense_spectrum(p)
    assert res.all_converged
    return p, res.eigenvalues


@pytest.mark.slow
@pytest.mark.acceptance(1)
def test_zero_damping_gives_imaginary_spectrum(report):
    p, lam = dirichlet_spectrum(30, 0.0)
    assert len(lam) == 1800
    re_ratio = np.abs(lam.real).max() / np.abs(lam).max()
    oracle = c0_spectrum(np.clip(symmetric_eigs(p.h0), 0.0, None))
    dist = hausdorff(lam, oracle)
    report(f"max|Re|/max|lam| = {re_ratio:.2e} (<= 1e-8), Hausdorff to +-i sqrt(mu) = {dist:.2e} (<= 1e-6)")
    assert re_ratio <= 1e-8
    assert dist <= 1e-6


@pytest.mark.acceptance(2)
def test_dispersion_oracle_2d(report):
    a = (1.0, SQRT2)
    p = periodic_pencil(12, a)
    lam = dense_spectrum(p).eigenvalues
    oracle = discrete_dispersion_spectrum(p.grid, a)
    assert len(oracle) == 2 * 144 == len(lam)
    dist = hausdorff(lam, oracle)
    report(f"2D N=12 a=(1, sqrt2): Hausdorff = {dist:.2e} (<= 1e-9)")
    assert dist <= 1e-9


@pytest.mark.acceptance(2)
def test_dispersion_oracle_3d(report):
    a = (1.0, SQRT2, 5 * SQRT2)
    p = periodic_pencil(6, a, dim=3)
    lam = dense_spectrum(p).eigenvalues
    oracle = discrete_dispersion_spectrum(p.grid, a)
    dist = hausdorff(lam, oracle)
    report(f"3D N=6 a=(1, sqrt2, 5 sqrt2): Hausdorff = {dist:.2e} (<= 1e-8)")
    assert dist <= 1e-8


@pytest.mark.slow
@pytest.mark.acceptance(3)
def test_sector(report):
    margins = {}
    for n in (20, 30):
        _, lam = dirichlet_spectrum(n, 1.0)
        big = lam[np.abs(lam) > 1e-6]
        margins[n] = float(np.abs(np.angle(big)).min() - SECTOR)
    report("worst |arg| margin over pi/3 - 0.05: "
           + ", ".join(f"N={n}: {m:+.3f} rad" for n, m in margins.items()))
    assert all(m >= 0 for m in margins.values())


@pytest.mark.acceptance(4)
def test_monotone_trends(report):
    cs = (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)
    re_c = [np.abs(dirichlet_spectrum(16, c)[1].real).max() for c in cs]
    ls = (0.5, 1.0, 2.0)
    spectra = [dirichlet_spectrum(16, 1.0, extent) for extent in ls]
    re_l = [np.abs(lam.real).max() for _, lam in spectra]
    im_l = [np.abs(lam.imag).max() for _, lam in spectra]
    c_ok = all(x <= y for x, y in zip(re_c, re_c[1:]))
    re_ok = all(x <= y for x, y in zip(re_l, re_l[1:]))
    im_ok = all(x <= y for x, y in zip(im_l, im_l[1:]))
    fmt = lambda v: ", ".join(f"{x:.3g}" for x in v)  # noqa: E731
    report(f"max|Re| over c: [{fmt(re_c)}] {'ok' if c_ok else 'NOT monotone'}; "
           f"max|Re| over L: [{fmt(re_l)}] {'ok' if re_ok else 'NOT monotone'}; "
           f"max|Im| over L: [{fmt(im_l)}] {'ok' if im_ok else 'NOT monotone'}")
    assert c_ok
    assert re_ok
    assert im_ok


@pytest.mark.acceptance(5)
def test_symmetries(report):
    two_pi = 2 * math.pi
    cases = {
        "a=(1,1)": periodic_pencil(12, (1.0, 1.0)),
        "a=(sin,sin)": periodic_pencil(12, ("sin", "sin"), origin=-math.pi),
        "a=(1,5 sqrt2)": periodic_pencil(12, (1.0, 5 * SQRT2)),
    }
    assert all(p.grid.extent == two_pi for p in cases.values())
    found = {}
    for name, p in cases.items():
        lam = dense_spectrum(p).eigenvalues
        if name == "a=(1,5 sqrt2)":
            found[name] = {"-lam": matching_distance(lam, -lam)}
        else:
            found[name] = {"conj": matching_distance(lam, lam.conj()),
                           "-conj": matching_distance(lam, -lam.conj())}
    report("; ".join(f"{name}: " + ", ".join(f"{k} {v:.1e}" for k, v in d.items())
                     for name, d in found.items()) + " (<= 1e-8)")
    assert all(v <= 1e-8 for d in found.values() for v in d.values())


@pytest.mark.acceptance(6)
def test_eigensolver_kernel(report):
    worst_rec = 0.0
    for n, seed, cplx in [(20, 10, False), (50, 11, True), (120, 12, False), (200, 13, False), (200, 14, True)]:
        a, d = known_spectrum(n, seed, cplx)
        res = eigvals(a)
        assert res.all_converged
        worst_rec = max(worst_rec, matching_distance(res.eigenvalues, d) / np.abs(d).max())
    worst_tr, worst_det = 0.0, 0.0
    for seed in range(40):
        n = 1 + seed % 8
        a = random_matrix(n, 100 + seed, complex_=bool(seed % 2))
        ev = eigvals(a).eigenvalues
        worst_tr = max(worst_tr, abs(ev.sum() - np.trace(a)) / (n * np.abs(a).max()))
        det = np.linalg.det(a)
        worst_det = max(worst_det, abs(np.prod(ev) - det) / abs(det))
    report(f"recovery {worst_rec:.1e} (<= 1e-9), trace {worst_tr:.1e} (<= 1e-10), "
           f"determinant {worst_det:.1e} (<= 1e-8)")
    assert worst_rec <= 1e-9
    assert worst_tr <= 1e-10
    assert worst_det <= 1e-8


@pytest.mark.acceptance(7)
def test_arnoldi_matches_dense(report):
    p, lam = dirichlet_spectrum(10, 1.0)
    z0 = 0.5 + 5j
    res = arnoldi_shift_invert(p, ArnoldiConfig(shift=z0, want=20, subspace=60))
    ref = lam[np.argsort(np.abs(lam - z0), kind="stable")[:20]]
    dist = hausdorff(res.eigenvalues, ref)
    report(f"20 values nearest {z0}: Hausdorff = {dist:.2e} (<= 1e-8)")
    assert len(res.eigenvalues) == 20
    assert dist <= 1e-8


@pytest.mark.acceptance(8)
def test_pseudospectrum_bound(report):
    p, lam = dirichlet_spectrum(8, 1.0)
    grid = ZGrid(lam.real.min(), lam.real.max(), lam.imag.min(), lam.imag.max(), 15, 15)
    fld = scan(p, grid)
    dist = np.abs(grid.points()[..., None] - lam[None, None, :]).min(axis=-1)
    excess = float((fld.values - dist).max())
    a_norm = p.companion_norm()
    at_eigs = max(smin_at(p, z).value for z in lam) / a_norm
    report(f"max(s_min - dist) = {excess:.1e} (<= 1e-8), max s_min/||A||_F at eigenvalues = "
           f"{at_eigs:.1e} (<= 1e-8)")
    assert excess <= 1e-8
    assert at_eigs <= 1e-8


@pytest.mark.slow
@pytest.mark.acceptance(9)
def test_large_grid_arnoldi_probe(report):
    p = dirichlet_pencil(100, c=1.0)
    res = arnoldi_shift_invert(p, ArnoldiConfig(shift=0.5 + 20j, want=50, subspace=100))
    lam = res.eigenvalues
    resid = certify(p, lam)
    margin = float(np.abs(np.angle(lam[np.abs(lam) > 1e-6])).min() - SECTOR)
    report(f"2D N=100 (companion order 20000): {len(lam)} values, max residual {resid.max():.1e} "
           f"(<= 1e-8), sector margin {margin:+.3f} rad")
    assert len(lam) == 50
    assert resid.max() <= 1e-8
    assert margin >= 0
