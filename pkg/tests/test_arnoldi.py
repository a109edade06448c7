import numpy as np
import pytest

from quadspec.arnoldi import ArnoldiConfig, arnoldi_shift_invert
from quadspec.eig_dense import eigvals
from quadspec.oracles import hausdorff
from quadspec.pencil import linearize

from .conftest import dirichlet_pencil, periodic_pencil, scalar_pencil


def nearest(values, z, k):
    return values[np.argsort(np.abs(values - z), kind="stable")[:k]]


def test_scalar_pencil_nearest_root():
    res = arnoldi_shift_invert(scalar_pencil(2.0, 3.0), ArnoldiConfig(shift=-0.9, subspace=2, want=1))
    assert res.eigenvalues[0] == pytest.approx(-1.0, abs=1e-12)


def test_c0_values_purely_imaginary():
    p = dirichlet_pencil(10, c=0.0)
    z0 = 1j * np.median(np.sqrt(np.linalg.eigvalsh(p.h0.toarray())))
    res = arnoldi_shift_invert(p, ArnoldiConfig(shift=z0, want=20, subspace=60))
    assert len(res.eigenvalues) == 20
    assert np.abs(res.eigenvalues.real).max() <= 1e-8


@pytest.mark.parametrize("shift", [0.5 + 5j, -1.0 + 12j])
def test_agreement_with_dense(shift):
    p = dirichlet_pencil(10, c=1.0)
    dense = eigvals(linearize(p, "dense").toarray()).eigenvalues
    res = arnoldi_shift_invert(p, ArnoldiConfig(shift=shift, want=20, subspace=60))
    assert res.all_converged
    assert hausdorff(res.eigenvalues, nearest(dense, shift, 20)) <= 1e-8


def test_ritz_residuals_and_orthogonality():
    p = dirichlet_pencil(10, c=2.0)
    cfg = ArnoldiConfig(shift=1 + 8j, want=10, subspace=40, tol=1e-10)
    res = arnoldi_shift_invert(p, cfg)
    bound = cfg.tol * res.info["companion_norm"]
    assert np.all(res.info["ritz_residuals"] <= bound)
    assert res.info["basis_orthogonality"] <= 1e-12


def test_complex_pencil():
    p = periodic_pencil(6, ["sin", "sin"], origin=-np.pi)
    dense = eigvals(linearize(p, "dense").toarray()).eigenvalues
    z0 = 0.2 + 2.5j
    res = arnoldi_shift_invert(p, ArnoldiConfig(shift=z0, want=8, subspace=40))
    assert hausdorff(res.eigenvalues, nearest(dense, z0, 8)) <= 1e-8


def test_shift_invariance():
    p = dirichlet_pencil(10, c=1.0)
    a = arnoldi_shift_invert(p, ArnoldiConfig(shift=0.5 + 6j, want=12, subspace=50)).eigenvalues
    b = arnoldi_shift_invert(p, ArnoldiConfig(shift=0.8 + 6.5j, want=12, subspace=50)).eigenvalues
    shared = [lam for lam in a if np.abs(b - lam).min() < 1e-4]
    assert len(shared) >= 6
    for lam in shared:
        assert np.abs(b - lam).min() <= 1e-8


def test_deterministic():
    p = dirichlet_pencil(8, c=1.0)
    cfg = ArnoldiConfig(shift=3j, want=6, subspace=30, seed=5)
    np.testing.assert_array_equal(arnoldi_shift_invert(p, cfg).eigenvalues,
                                  arnoldi_shift_invert(p, cfg).eigenvalues)


@pytest.mark.parametrize("kw", [dict(want=0), dict(want=30, subspace=40), dict(subspace=1000), dict(tol=0.0)])
def test_config_validation(kw):
    p = dirichlet_pencil(8)
    with pytest.raises(ValueError):
        arnoldi_shift_invert(p, ArnoldiConfig(shift=1j, **{"want": 5, "subspace": 20, **kw}))


def test_multi_shift_merge_keeps_multiplicity():
    from quadspec.experiments import arnoldi_spectrum

    p = dirichlet_pencil(10, c=1.0)
    dense = eigvals(linearize(p, "dense").toarray()).eigenvalues
    one, _, _ = arnoldi_spectrum(p, [0.5 + 5j], want=6, subspace=30, tol=1e-10, seed=0)
    both, _, stats = arnoldi_spectrum(p, [0.5 + 5j, 0.6 + 5.1j], want=6, subspace=30, tol=1e-10, seed=0)
    assert len(one) == 6
    assert hausdorff(one, nearest(dense, 0.5 + 5j, 6)) <= 1e-8
    # the second shift sees the same cluster, so nothing new appears but nothing is lost
    assert len(both) >= 6 and len(stats) == 2
