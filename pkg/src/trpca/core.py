"""Third-order tensor algebra over the tube-wise circular product.

A tensor is a float64 array of shape ``(n1, n2, n3)``: ``a[i, j, :]`` is
the (i, j) tube and ``a[:, :, k]`` the k-th frontal slice.  The Fourier
domain is reached with an unnormalized DFT along the tube axis (`fft3`);
the inverse transform carries the 1/n3 factor (`ifft3`).  Any tube length
is supported, not just powers of two.  All functions are pure and never
mutate their arguments.
"""

from __future__ import annotations

import numpy as np

from .errors import IndexOutOfRange, NonFiniteData, ShapeMismatch, SymmetryViolation

Tensor3 = np.ndarray
SpectralTensor3 = np.ndarray

#: Imaginary parts below tol * (1 + |real|) are rounding residue and dropped.
IMAG_RESIDUE_TOL = 1e-9

NORM_KINDS = ("fro", "inf", "l1", "l112")


def as_tensor3(data, name: str = "tensor") -> Tensor3:
    """Validate external input as a dense third-order tensor of finite values."""
    a = np.asarray(data, dtype=np.float64)
    if a.ndim != 3:
        raise ShapeMismatch(f"{name} must be 3-d, got {a.ndim}-d")
    if min(a.shape) < 1:
        raise ShapeMismatch(f"{name} has an empty mode: shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteData(f"{name} contains NaN or Inf entries")
    return a


def _require3(a, name: str = "tensor") -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 3 or min(a.shape) < 1:
        raise ShapeMismatch(f"{name} must be a nonempty 3-d array, got shape {np.shape(a)}")
    return a


def fft3(a: Tensor3) -> SpectralTensor3:
    """DFT of every tube (unnormalized forward transform)."""
    return np.fft.fft(_require3(a), axis=2)


def discard_imag(z: np.ndarray, tol: float = IMAG_RESIDUE_TOL) -> np.ndarray:
    """Drop rounding-level imaginary residue, or fail loudly.

    Residue above ``tol * (1 + |real part|)`` means an upstream transform
    broke conjugate symmetry; silently returning the real part would bury
    the bug, so that case raises SymmetryViolation instead.
    """
    z = np.asarray(z)
    if not np.iscomplexobj(z):
        return np.asarray(z, dtype=np.float64)
    bad = np.abs(z.imag) > tol * (1.0 + np.abs(z.real))
    if np.any(bad):
        worst = float(np.max(np.abs(z.imag[bad])))
        raise SymmetryViolation(
            f"imaginary residue up to {worst:.3e} exceeds tolerance {tol:.1e}"
        )
    return np.ascontiguousarray(z.real)


def ifft3(a: SpectralTensor3, tol: float = IMAG_RESIDUE_TOL) -> Tensor3:
    """Inverse DFT of every tube; the result must come out real."""
    a = np.asarray(a)
    if a.ndim != 3 or min(a.shape) < 1:
        raise ShapeMismatch(f"spectral tensor must be a nonempty 3-d array, got shape {a.shape}")
    return discard_imag(np.fft.ifft(a, axis=2), tol)


def _product_operands(a, b):
    a = _require3(a, "left operand")
    b = _require3(b, "right operand")
    if a.shape[1] != b.shape[0] or a.shape[2] != b.shape[2]:
        raise ShapeMismatch(
            f"cannot multiply {a.shape} by {b.shape}: need (n1,n2,n3) x (n2,n4,n3)"
        )
    return a, b


def tproduct(a: Tensor3, b: Tensor3) -> Tensor3:
    """Tube-wise circular product, evaluated slice-wise in the Fourier domain."""
    a, b = _product_operands(a, b)
    return ifft3(np.einsum("ikn,kjn->ijn", fft3(a), fft3(b)))


def tproduct_naive(a: Tensor3, b: Tensor3) -> Tensor3:
    """Reference product by direct circular convolution of tubes, no FFT.

    Quadratic in the tube length.  Exists as an independent check on
    `tproduct` and must never share its transform path.
    """
    a, b = _product_operands(a, b)
    n3 = a.shape[2]
    t = np.arange(n3)
    # shifted[k, j, s, t] = b[k, j, (t - s) mod n3]
    shifted = b[:, :, (t[None, :] - t[:, None]) % n3]
    return np.einsum("iks,kjst->ijt", a, shifted)


def conj_transpose(a: Tensor3) -> Tensor3:
    """Transpose every frontal slice, then reverse the order of slices 2..n3."""
    a = _require3(a)
    at = np.transpose(a, (1, 0, 2))
    out = np.empty_like(at)
    out[:, :, 0] = at[:, :, 0]
    out[:, :, 1:] = at[:, :, :0:-1]
    return out


def identity_tensor(n: int, n3: int) -> Tensor3:
    """First frontal slice is the n-by-n identity, all other slices are zero."""
    if n < 1 or n3 < 1:
        raise ShapeMismatch(f"identity tensor needs n >= 1 and n3 >= 1, got {n}, {n3}")
    out = np.zeros((n, n, n3))
    out[np.arange(n), np.arange(n), 0] = 1.0
    return out


def standard_basis(i: int, n: int, n3: int) -> Tensor3:
    """Column basis tensor of shape (n, 1, n3): entry (i, 0, 0) is 1.

    Indices are 0-based: valid i satisfies 0 <= i < n.
    """
    if n < 1 or n3 < 1:
        raise ShapeMismatch(f"basis tensor needs n >= 1 and n3 >= 1, got {n}, {n3}")
    if not 0 <= i < n:
        raise IndexOutOfRange(f"basis index {i} outside [0, {n})")
    out = np.zeros((n, 1, n3))
    out[i, 0, 0] = 1.0
    return out


def is_orthogonal(q: Tensor3, tol: float = 1e-9) -> bool:
    """True iff q^T * q and q * q^T both equal the identity tensor within tol."""
    q = _require3(q)
    n1, n2, n3 = q.shape
    if n1 != n2:
        raise ShapeMismatch(f"orthogonality needs square frontal slices, got {n1}x{n2}")
    eye = identity_tensor(n1, n3)
    qt = conj_transpose(q)
    return (
        norm(tproduct(qt, q) - eye) <= tol
        and norm(tproduct(q, qt) - eye) <= tol
    )


def is_fdiagonal(s: Tensor3, tol: float = 1e-9) -> bool:
    """True iff every frontal slice is diagonal to within tol."""
    s = _require3(s)
    n1, n2, _ = s.shape
    off = ~np.eye(n1, n2, dtype=bool)
    return bool(np.all(np.abs(s[off]) <= tol))


def norm(a: Tensor3, kind: str = "fro") -> float:
    """Tensor norms: Frobenius, entrywise max, entrywise l1, and the
    sum of tube-wise Frobenius norms ("l112")."""
    a = _require3(a)
    if kind == "fro":
        return float(np.sqrt((a * a).sum()))
    if kind == "inf":
        return float(np.max(np.abs(a)))
    if kind == "l1":
        return float(np.abs(a).sum())
    if kind == "l112":
        return float(np.sqrt((a * a).sum(axis=2)).sum())
    raise ValueError(f"unknown norm kind {kind!r}, expected one of {NORM_KINDS}")
