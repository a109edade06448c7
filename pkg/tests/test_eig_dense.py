import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from quadspec.eig_dense import balance, eigenvector, eigvals, hessenberg, qr_eigenvalues
from quadspec.oracles import c0_spectrum, hausdorff, matching_distance, tridiagonal_eigs_bisection
from quadspec.pencil import linearize

from .conftest import dirichlet_pencil


def random_matrix(n, seed, complex_=False):
    r = np.random.default_rng(seed)
    a = r.standard_normal((n, n))
    if complex_:
        a = a + 1j * r.standard_normal((n, n))
    return a


def test_balance_leaves_balanced_matrix():
    a = np.array([[1.0, 2.0], [2.0, 1.0]])
    b, d = balance(a)
    np.testing.assert_array_equal(d, [1, 1])
    np.testing.assert_array_equal(b, a)


def test_balance_recovers_scaling():
    a = random_matrix(8, 3) + 4 * np.eye(8)
    a = 0.5 * (a + a.T)  # symmetric is balanced already
    dd = np.ones(8)
    dd[0] = 2.0**10
    scaled = np.diag(1 / dd) @ a @ np.diag(dd)
    b, d = balance(scaled)
    # D^-1 (Dk^-1 A Dk) D is balanced when d ~ 1/dk up to a common factor
    ratio = (d * dd) / (d * dd)[1]
    assert np.all(ratio <= 2.0) and np.all(ratio >= 0.5)
    np.testing.assert_allclose(b, np.diag(1 / d) @ scaled @ np.diag(d), rtol=0, atol=0)
    assert np.all(np.log2(d) == np.round(np.log2(d)))


def test_balance_preserves_spectrum():
    a = random_matrix(20, 5)
    a[:, 0] *= 1e6
    b, _ = balance(a)
    la, lb = np.linalg.eigvals(a), np.linalg.eigvals(b)
    assert matching_distance(la, lb) <= 1e-12 * np.abs(la).max()


def test_hessenberg_identity_on_hessenberg_input():
    h0 = np.triu(random_matrix(6, 1), -1)
    h, q = hessenberg(h0)
    np.testing.assert_array_equal(h, h0)
    np.testing.assert_array_equal(q, np.eye(6))


@pytest.mark.parametrize("complex_", [False, True])
def test_hessenberg_properties(complex_):
    a = random_matrix(30, 11, complex_)
    h, q = hessenberg(a)
    assert np.linalg.norm(q.conj().T @ q - np.eye(30)) <= 1e-13
    assert np.linalg.norm(a - q @ h @ q.conj().T) <= 1e-12 * np.linalg.norm(a)
    assert np.all(np.tril(h, -2) == 0)


def test_triangular_input_returns_diagonal():
    t = np.triu(random_matrix(7, 2))
    res = qr_eigenvalues(t)
    assert res.iterations == 0
    np.testing.assert_array_equal(np.sort(res.eigenvalues.real), np.sort(np.diag(t)))
    assert np.all(res.eigenvalues.imag == 0)


def test_rotation():
    res = eigvals(np.array([[0.0, -1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(res.eigenvalues, [-1j, 1j], atol=1e-15)
    assert res.all_converged


def known_spectrum(n, seed, complex_):
    """A = X T X^-1 with T block diagonal holding the prescribed eigenvalues."""
    r = np.random.default_rng(seed)
    if complex_:
        d = r.standard_normal(n) + 1j * r.standard_normal(n)
        x = np.eye(n) + 0.3 * (r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))) / np.sqrt(n)
        return x @ np.diag(d) @ np.linalg.inv(x), d
    k = n // 4
    pairs = r.standard_normal(k) + 1j * r.standard_normal(k)
    reals = r.standard_normal(n - 2 * k)
    t = np.zeros((n, n))
    for i, lam in enumerate(pairs):
        t[2 * i:2 * i + 2, 2 * i:2 * i + 2] = [[lam.real, lam.imag], [-lam.imag, lam.real]]
    t[np.arange(2 * k, n), np.arange(2 * k, n)] = reals
    x = np.eye(n) + 0.3 * r.standard_normal((n, n)) / np.sqrt(n)
    return x @ t @ np.linalg.inv(x), np.concatenate([pairs, pairs.conj(), reals])


@pytest.mark.parametrize("n,seed,complex_", [(20, 0, False), (20, 1, True), (60, 2, False), (200, 3, False),
                                             (200, 4, True)])
def test_construct_and_recover(n, seed, complex_):
    a, d = known_spectrum(n, seed, complex_)
    res = eigvals(a)
    assert res.all_converged
    assert matching_distance(res.eigenvalues, d) <= 1e-9 * np.abs(d).max()


@settings(deadline=None, max_examples=30)
@given(n=st.integers(1, 40), seed=st.integers(0, 2**16), complex_=st.booleans())
def test_trace_conservation(n, seed, complex_):
    a = random_matrix(n, seed, complex_)
    ev = eigvals(a).eigenvalues
    assert len(ev) == n
    assert abs(ev.sum() - np.trace(a)) <= 1e-10 * n * np.abs(a).max()


@settings(deadline=None, max_examples=30)
@given(n=st.integers(1, 8), seed=st.integers(0, 2**16), complex_=st.booleans())
def test_determinant_conservation(n, seed, complex_):
    a = random_matrix(n, seed, complex_)
    det = np.prod(np.diag(scipy.linalg.lu(a)[2])) * np.linalg.det(scipy.linalg.lu(a)[0])
    prod = np.prod(eigvals(a).eigenvalues)
    assert abs(prod - det) <= 1e-8 * max(abs(det), 1e-300) or abs(det) < 1e-12


@settings(deadline=None, max_examples=20)
@given(n=st.integers(2, 30), seed=st.integers(0, 2**16))
def test_real_conjugate_pairing(n, seed):
    ev = eigvals(random_matrix(n, seed)).eigenvalues
    upper = np.sort_complex(ev[ev.imag > 0])
    lower = np.sort_complex(ev[ev.imag < 0].conj())
    assert len(upper) == len(lower)
    np.testing.assert_array_equal(upper, lower)


def test_agreement_with_lapack():
    a = random_matrix(80, 9)
    assert hausdorff(eigvals(a).eigenvalues, np.linalg.eigvals(a)) <= 1e-11 * np.abs(a).max() * 80


def test_canonical_ordering():
    ev = eigvals(random_matrix(25, 7)).eigenvalues
    keys = list(zip(ev.imag, ev.real))
    assert keys == sorted(keys)


def test_c0_companion_matches_sturm_bisection():
    # 1D: H0 is tridiagonal; the bisection oracle shares no code with the QR path
    p = dirichlet_pencil(40, c=0.0, dim=1, extent=1.5)
    h0 = p.h0.toarray()
    mu = tridiagonal_eigs_bisection(np.diag(h0), np.diag(h0, 1))
    ev = eigvals(linearize(p, "dense").toarray()).eigenvalues
    assert hausdorff(ev, c0_spectrum(mu)) <= 1e-8


def test_eigenvector_diagonal():
    a = np.diag([1.0, 2.0, 5.0])
    x, res = eigenvector(a, 2.0)
    assert abs(abs(x[1]) - 1) < 1e-12 and abs(x[0]) < 1e-9 and abs(x[2]) < 1e-9
    assert res < 1e-9


def test_eigenvector_jordan_block():
    x, res = eigenvector(np.array([[0.0, 1.0], [0.0, 0.0]]), 0.0)
    assert res < 1e-8
    assert abs(abs(x[0]) - 1) < 1e-8


def test_eigenvector_scalar_companion():
    x, res = eigenvector(np.array([[0.0, 1.0], [-2.0, -3.0]]), -1.0)
    assert res < 1e-9
    np.testing.assert_allclose(x[1] / x[0], -1.0, rtol=1e-9)


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        eigvals(np.array([[np.nan, 0.0], [0.0, 1.0]]))
