"""Tubal singular value decomposition, ranks, nuclear norm, and shrinkage.

Every operation here works slice-by-slice in the Fourier domain.  Because
the input tensors are real, slice k and slice n3-k are complex conjugates;
we factor only the first half and mirror the factors, which both halves
the work and keeps the inverse transform exactly real.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import _require3, conj_transpose, discard_imag, fft3, tproduct
from .errors import NumericalFailure


@dataclass(frozen=True)
class TSVDFactors:
    """Orthogonal u (n1,n1,n3), f-diagonal s (n1,n2,n3), orthogonal v (n2,n2,n3)."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return tproduct(self.u, tproduct(self.s, conj_transpose(self.v)))


def _self_conjugate_slices(n3: int) -> tuple[int, ...]:
    # Fourier slices equal to their own mirror: 0, and n3/2 when n3 is even.
    if n3 % 2 == 0 and n3 > 1:
        return (0, n3 // 2)
    return (0,)


def _paired_slices(n3: int) -> np.ndarray:
    return np.arange(1, (n3 + 1) // 2)


def _spatial(spectral_stack: np.ndarray) -> np.ndarray:
    # (n3, p, q) Fourier slices -> real (p, q, n3) tensor
    return discard_imag(np.fft.ifft(np.moveaxis(spectral_stack, 0, 2), axis=2))


def tsvd(a: np.ndarray) -> TSVDFactors:
    """Factor a = u * s * v^T with orthogonal u, v and f-diagonal s.

    Computed by a full SVD of each Fourier-domain frontal slice; singular
    values land on the tube diagonal of s, nonincreasing within each slice.
    """
    a = _require3(a)
    n1, n2, n3 = a.shape
    spec = np.moveaxis(fft3(a), 2, 0)
    uh = np.empty((n3, n1, n1), dtype=np.complex128)
    sh = np.zeros((n3, n1, n2), dtype=np.complex128)
    vh = np.empty((n3, n2, n2), dtype=np.complex128)
    rr = np.arange(min(n1, n2))
    try:
        for k in _self_conjugate_slices(n3):
            u, sig, vt = np.linalg.svd(spec[k].real)
            uh[k] = u
            sh[k, rr, rr] = sig
            vh[k] = vt.T
        ks = _paired_slices(n3)
        if ks.size:
            u, sig, vt = np.linalg.svd(spec[ks])
            vt_t = np.swapaxes(vt, 1, 2)
            uh[ks] = u
            sh[ks[:, None], rr[None, :], rr[None, :]] = sig
            vh[ks] = vt_t.conj()
            uh[n3 - ks] = u.conj()
            sh[(n3 - ks)[:, None], rr[None, :], rr[None, :]] = sig
            vh[n3 - ks] = vt_t
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"slice SVD did not converge: {exc}") from exc
    return TSVDFactors(u=_spatial(uh), s=_spatial(sh), v=_spatial(vh))


def _fourier_singular_values(a: np.ndarray) -> np.ndarray:
    """Per-slice singular values, shape (n3, min(n1, n2)), nonincreasing rows."""
    a = _require3(a)
    try:
        return np.linalg.svd(np.moveaxis(fft3(a), 2, 0), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"slice SVD did not converge: {exc}") from exc


def multi_rank(a: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Rank of each Fourier-domain frontal slice.

    A singular value counts when it exceeds rel_tol times the largest
    singular value over all slices, so slices of very different scale are
    judged against one global yardstick.
    """
    if not 0.0 < rel_tol < 1.0:
        raise ValueError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    sv = _fourier_singular_values(a)
    threshold = rel_tol * float(sv.max())
    return (sv > threshold).sum(axis=1).astype(np.int64)


def tubal_rank(a: np.ndarray, rel_tol: float = 1e-10) -> int:
    """Number of nonzero singular tubes; equals the largest slice rank."""
    return int(multi_rank(a, rel_tol).max())


def tnn(a: np.ndarray) -> float:
    """Tensor nuclear norm: total of all Fourier-slice singular values."""
    return float(_fourier_singular_values(a).sum())


def svt(a: np.ndarray, tau: float) -> np.ndarray:
    """Shrink every Fourier-slice singular value by tau, flooring at zero."""
    a = _require3(a)
    if tau < 0:
        raise ValueError(f"threshold must be nonnegative, got {tau}")
    out, _ = _shrink_stack(a[np.newaxis], tau)
    return out[0]


def _shrink_stack(stack: np.ndarray, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """Soft-threshold singular values of a stack of tensors, batched.

    stack has shape (batch, n1, n2, n3).  Returns the shrunk stack and the
    surviving singular values as an array of shape (batch, n3, min(n1, n2)).
    The per-tensor result is identical to running `svt` on each member.
    """
    batch, n1, n2, n3 = stack.shape
    spec = np.moveaxis(np.fft.fft(stack, axis=3), 3, 1)  # (batch, n3, n1, n2)
    out = np.empty_like(spec)
    sig = np.empty((batch, n3, min(n1, n2)))
    try:
        for k in _self_conjugate_slices(n3):
            u, s, vt = np.linalg.svd(spec[:, k].real, full_matrices=False)
            s2 = np.maximum(s - tau, 0.0)
            out[:, k] = (u * s2[:, None, :]) @ vt
            sig[:, k] = s2
        ks = _paired_slices(n3)
        if ks.size:
            u, s, vt = np.linalg.svd(spec[:, ks], full_matrices=False)
            s2 = np.maximum(s - tau, 0.0)
            shrunk = (u * s2[..., None, :]) @ vt
            out[:, ks] = shrunk
            out[:, n3 - ks] = shrunk.conj()
            sig[:, ks] = s2
            sig[:, n3 - ks] = s2
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"slice SVD did not converge: {exc}") from exc
    new = discard_imag(np.fft.ifft(np.moveaxis(out, 1, 3), axis=3))
    return new, sig
