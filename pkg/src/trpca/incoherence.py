"""Coherence diagnostics for square low-rank blocks.

For a block of tubal rank r with reduced orthogonal factors u_p, v_p of
shape (n, r, n3), three quantities bound how concentrated the factors are:
the largest squared row energy of u_p and of v_p (scaled by n*n3/r), and
the squared entrywise maximum of u_p * v_p^T (scaled by n^2*n3^2/r).
Low-rank/sparse separation is only identifiable when all three are small;
this module reports the smallest bound each condition meets with equality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import _require3, conj_transpose, norm, standard_basis, tproduct
from .errors import ShapeMismatch, ZeroTensor
from .tsvd import tsvd, tubal_rank


@dataclass(frozen=True)
class IncoherenceReport:
    mu_u: float
    mu_v: float
    mu_uv: float
    mu: float
    r: int
    n: int
    n3: int


def incoherence_report(l: np.ndarray, rel_tol: float = 1e-10) -> IncoherenceReport:
    """Measure how coherent the singular factors of a square block are.

    Factors are truncated to the tubal rank determined by rel_tol (same
    convention as `tubal_rank`).  Each reported value is the smallest
    parameter for which the corresponding condition holds with equality,
    so `mu` <= budget decides all three at once.
    """
    l = _require3(l, "low-rank block")
    n1, n2, n3 = l.shape
    if n1 != n2:
        raise ShapeMismatch(f"incoherence needs square frontal slices, got {n1}x{n2}")
    if not l.any():
        raise ZeroTensor("incoherence is undefined for the zero tensor")
    n = n1
    r = tubal_rank(l, rel_tol)
    factors = tsvd(l)
    up = factors.u[:, :r, :]
    vp = factors.v[:, :r, :]
    upt = conj_transpose(up)
    vpt = conj_transpose(vp)
    row_u = max(norm(tproduct(upt, standard_basis(i, n, n3))) ** 2 for i in range(n))
    row_v = max(norm(tproduct(vpt, standard_basis(j, n, n3))) ** 2 for j in range(n))
    mu_u = n * n3 / r * row_u
    mu_v = n * n3 / r * row_v
    mu_uv = n**2 * n3**2 * norm(tproduct(up, vpt), "inf") ** 2 / r
    return IncoherenceReport(
        mu_u=mu_u,
        mu_v=mu_v,
        mu_uv=mu_uv,
        mu=max(mu_u, mu_v, mu_uv),
        r=r,
        n=n,
        n3=n3,
    )


def check_conditions(l: np.ndarray, mu_budget: float, rel_tol: float = 1e-10) -> bool:
    """True iff every coherence measure of l fits within mu_budget."""
    return incoherence_report(l, rel_tol).mu <= mu_budget
