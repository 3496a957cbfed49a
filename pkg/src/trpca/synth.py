"""Synthetic problem instances with known ground truth.

Two families: a low-tubal-rank tensor plus random sparse spikes, and a
surveillance-style clip with a static rank-1 background and a bright
square patch that jumps across the scene, together with the patch's
support mask.  Both are deterministic for a fixed seed.
"""

from __future__ import annotations

import numpy as np

from .core import tproduct
from .errors import ShapeMismatch


def lowrank_instance(
    n1: int,
    n2: int,
    n3: int,
    rank: int,
    rho: float,
    amplitude: float = 1.0,
    seed: int = 0,
):
    """Tensor x = (low tubal rank) + (sparse spikes); returns (x, l0, s0).

    The low-rank part is a product of two Gaussian factors of inner size
    `rank`; a fraction rho of entries then receives a spike of the given
    amplitude with a random sign.
    """
    if min(n1, n2, n3) < 1:
        raise ShapeMismatch(f"dimensions must be positive, got {n1}x{n2}x{n3}")
    if not 1 <= rank <= min(n1, n2):
        raise ValueError(f"rank must lie in [1, {min(n1, n2)}], got {rank}")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"sparse fraction must lie in [0, 1], got {rho}")
    rng = np.random.default_rng(seed)
    g1 = rng.standard_normal((n1, rank, n3))
    g2 = rng.standard_normal((rank, n2, n3))
    l0 = tproduct(g1, g2)
    support = rng.random((n1, n2, n3)) < rho
    signs = np.where(rng.random((n1, n2, n3)) < 0.5, -1.0, 1.0)
    s0 = np.where(support, amplitude * signs, 0.0)
    return l0 + s0, l0, s0


def video_instance(
    n1: int = 32,
    n2: int = 32,
    n3: int = 16,
    square: int = 6,
    bg_amplitude: float = 1.0,
    fg_amplitude: float = 1.0,
    seed: int = 0,
):
    """Static rank-1 background plus a moving bright square; returns (x, mask).

    The background is an outer product of two positive vectors scaled so
    its brightest pixel equals bg_amplitude.  The square jumps by large
    strides (wrapping) so each pixel is covered in only a few frames,
    which keeps the motion spectrally distinct from the background.  The
    mask is 1 exactly on the square's pixels in each frame.
    """
    if min(n1, n2, n3) < 1:
        raise ShapeMismatch(f"dimensions must be positive, got {n1}x{n2}x{n3}")
    if not 1 <= square <= min(n1, n2):
        raise ValueError(f"square side must lie in [1, {min(n1, n2)}], got {square}")
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.25, 1.0, n1)
    v = rng.uniform(0.25, 1.0, n2)
    bg = np.outer(u, v)
    bg *= bg_amplitude / bg.max()
    x = np.repeat(bg[:, :, np.newaxis], n3, axis=2)
    mask = np.zeros((n1, n2, n3))
    row_span = n1 - square + 1
    col_span = n2 - square + 1
    for k in range(n3):
        r0 = (k * square) % row_span
        c0 = (k * (square + 1)) % col_span
        x[r0 : r0 + square, c0 : c0 + square, k] += fg_amplitude
        mask[r0 : r0 + square, c0 : c0 + square, k] = 1.0
    return x, mask


def support_scores(values: np.ndarray, mask: np.ndarray, threshold: float = 0.25):
    """Precision, recall, and F-measure of a magnitude-thresholded support.

    An entry is predicted active when its magnitude exceeds `threshold`
    times the largest magnitude in `values`; truth is mask > 0.5.
    """
    values = np.asarray(values, dtype=np.float64)
    mask = np.asarray(mask)
    if values.shape != mask.shape:
        raise ShapeMismatch(f"shapes differ: {values.shape} vs {mask.shape}")
    mag = np.abs(values)
    predicted = mag > threshold * mag.max()
    truth = mask > 0.5
    tp = int((predicted & truth).sum())
    fp = int((predicted & ~truth).sum())
    fn = int((~predicted & truth).sum())
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    fmeasure = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, fmeasure
