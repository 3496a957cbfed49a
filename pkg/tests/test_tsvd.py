"""t-SVD factorization, ranks, nuclear norm, and shrinkage."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trpca.core import (
    conj_transpose,
    fft3,
    identity_tensor,
    ifft3,
    is_fdiagonal,
    is_orthogonal,
    norm,
    tproduct,
)
from trpca.errors import NumericalFailure
from trpca.tsvd import multi_rank, svt, tnn, tsvd, tubal_rank

from conftest import rel_err

dims = st.integers(min_value=1, max_value=8)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def fourier_singular_values(a):
    return np.linalg.svd(np.moveaxis(fft3(a), 2, 0), compute_uv=False)


def blkdiag_nuclear_norm(a):
    """Independent route: nuclear norm of the big block-diagonal matrix."""
    spec = fft3(a)
    n1, n2, n3 = a.shape
    big = np.zeros((n1 * n3, n2 * n3), dtype=complex)
    for k in range(n3):
        big[k * n1 : (k + 1) * n1, k * n2 : (k + 1) * n2] = spec[:, :, k]
    return float(np.linalg.svd(big, compute_uv=False).sum())


# ------------------------------------------------------------------- factors


def test_tsvd_zero_tensor():
    f = tsvd(np.zeros((3, 3, 2)))
    assert not f.s.any()
    assert not f.reconstruct().any()


def test_tsvd_identity():
    eye = identity_tensor(2, 3)
    f = tsvd(eye)
    np.testing.assert_allclose(f.s, eye, atol=1e-12)
    assert rel_err(f.reconstruct(), eye) < 1e-12


@settings(max_examples=40, deadline=None)
@given(n1=dims, n2=dims, n3=dims, seed=seeds)
def test_tsvd_contract(n1, n2, n3, seed):
    a = np.random.default_rng(seed).standard_normal((n1, n2, n3))
    f = tsvd(a)
    assert f.u.shape == (n1, n1, n3)
    assert f.s.shape == (n1, n2, n3)
    assert f.v.shape == (n2, n2, n3)
    assert rel_err(f.reconstruct(), a) <= 1e-9
    assert is_orthogonal(f.u, 1e-9)
    assert is_orthogonal(f.v, 1e-9)
    assert is_fdiagonal(f.s, 1e-9)


@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_tsvd_fourier_spectrum_sorted_nonnegative(seed):
    a = np.random.default_rng(seed).standard_normal((5, 4, 3))
    f = tsvd(a)
    spec = fft3(f.s)
    for k in range(3):
        diag = np.diagonal(spec[:, :, k])
        assert np.abs(diag.imag).max() < 1e-9
        vals = diag.real
        assert (vals >= -1e-9).all()
        assert (np.diff(vals) <= 1e-9).all()


def test_tsvd_wraps_lapack_failure(monkeypatch):
    def boom(*args, **kwargs):
        raise np.linalg.LinAlgError("no convergence")

    monkeypatch.setattr(np.linalg, "svd", boom)
    with pytest.raises(NumericalFailure):
        tsvd(np.ones((2, 2, 2)))


# --------------------------------------------------------------------- ranks


def test_multi_rank_identity():
    np.testing.assert_array_equal(multi_rank(identity_tensor(3, 4)), [3, 3, 3, 3])


def test_multi_rank_zero():
    np.testing.assert_array_equal(multi_rank(np.zeros((3, 3, 4))), [0, 0, 0, 0])


def test_multi_rank_of_product_bounded(rng):
    a = rng.standard_normal((4, 2, 3))
    b = rng.standard_normal((2, 4, 3))
    assert (multi_rank(tproduct(a, b)) <= 2).all()


def test_multi_rank_tolerance_domain():
    with pytest.raises(ValueError):
        multi_rank(np.ones((2, 2, 2)), rel_tol=0.0)
    with pytest.raises(ValueError):
        multi_rank(np.ones((2, 2, 2)), rel_tol=1.0)


def test_tubal_rank_identity_and_zero():
    assert tubal_rank(identity_tensor(3, 4)) == 3
    assert tubal_rank(np.zeros((3, 3, 4))) == 0


@pytest.mark.parametrize("seed", range(8))
def test_tubal_rank_of_gaussian_product(seed):
    gen = np.random.default_rng(seed)
    g1 = gen.standard_normal((8, 2, 5))
    g2 = gen.standard_normal((2, 8, 5))
    assert tubal_rank(tproduct(g1, g2)) == 2


def test_tubal_rank_subadditive_under_product():
    for seed in range(100):
        gen = np.random.default_rng(seed)
        rank_p = int(gen.integers(1, 4))
        rank_q = int(gen.integers(1, 4))
        p = tproduct(gen.standard_normal((5, rank_p, 3)), gen.standard_normal((rank_p, 4, 3)))
        q = tproduct(gen.standard_normal((4, rank_q, 3)), gen.standard_normal((rank_q, 5, 3)))
        assert tubal_rank(tproduct(p, q)) <= min(tubal_rank(p), tubal_rank(q))


def test_tubal_rank_agrees_with_singular_tube_count(rng):
    # second route: count singular tubes of the factorization whose peak
    # Fourier magnitude clears the same global threshold
    a = tproduct(rng.standard_normal((6, 3, 4)), rng.standard_normal((3, 6, 4)))
    f = tsvd(a)
    spec = fft3(f.s)
    mags = np.abs(np.diagonal(spec, axis1=0, axis2=1))  # (n3, min dim)
    cutoff = 1e-10 * mags.max()
    tube_count = int((mags.max(axis=0) > cutoff).sum())
    assert tubal_rank(a) == tube_count


# ----------------------------------------------------------------------- tnn


def test_tnn_identity_is_n_times_n3():
    assert tnn(identity_tensor(4, 5)) == pytest.approx(20.0, abs=1e-9)


def test_tnn_zero():
    assert tnn(np.zeros((2, 3, 4))) == 0.0


@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_tnn_matches_blkdiag_route(seed):
    a = np.random.default_rng(seed).standard_normal((4, 4, 3))
    direct = tnn(a)
    assert abs(direct - blkdiag_nuclear_norm(a)) <= 1e-9 * max(direct, 1.0)


# ----------------------------------------------------------------- shrinkage


def test_svt_zero_threshold_is_identity(rng):
    a = rng.standard_normal((3, 3, 2))
    assert rel_err(svt(a, 0.0), a) < 1e-10


def test_svt_full_shrinkage_of_identity():
    out = svt(identity_tensor(2, 2), 1.0)
    assert np.abs(out).max() < 1e-12


def test_svt_rejects_negative_threshold():
    with pytest.raises(ValueError):
        svt(np.ones((2, 2, 2)), -0.5)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, tau=st.sampled_from([0.1, 0.5, 2.0]))
def test_svt_spectral_law(seed, tau):
    a = np.random.default_rng(seed).standard_normal((4, 4, 3))
    before = fourier_singular_values(a)
    after = fourier_singular_values(svt(a, tau))
    np.testing.assert_allclose(after, np.maximum(before - tau, 0.0), atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_svt_shrinks_tnn_and_bounded_spectral_change(seed):
    a = np.random.default_rng(seed).standard_normal((5, 4, 4))
    tau = 0.3
    out = svt(a, tau)
    assert tnn(out) <= tnn(a) + 1e-9
    # per Fourier slice the spectral-norm change is at most tau
    spec_in = np.moveaxis(fft3(a), 2, 0)
    spec_out = np.moveaxis(fft3(out), 2, 0)
    changes = np.linalg.svd(spec_out - spec_in, compute_uv=False)[:, 0]
    assert (changes <= tau + 1e-9).all()


def test_svt_matches_tsvd_recomposition(rng):
    # same shrinkage done the long way through the full factorization
    a = rng.standard_normal((4, 3, 5))
    tau = 0.4
    f = tsvd(a)
    spec_s = fft3(f.s)
    n1, n2, n3 = a.shape
    rmin = min(n1, n2)
    shrunk = np.zeros_like(spec_s)
    for k in range(n3):
        d = np.maximum(np.diagonal(spec_s[:, :, k]).real - tau, 0.0)
        shrunk[:rmin, :rmin, k] = np.diag(d[:rmin])
    rebuilt = tproduct(f.u, tproduct(ifft3(shrunk), conj_transpose(f.v)))
    assert rel_err(svt(a, tau), rebuilt) < 1e-9
