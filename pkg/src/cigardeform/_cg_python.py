"""Numpy implementation of the stencil CG kernel (same API as the compiled one).

Inner products use ``np.sum`` on elementwise products, whose pairwise
summation order is fixed by the array shape, so repeated runs agree bit for bit.
"""

from __future__ import annotations

import numpy as np

KERNEL = "python"


def apply_stencil(u: np.ndarray, diag: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    out = diag[None, :] * u
    out[:, 1:] -= u[:, :-1]
    out[:, :-1] -= u[:, 1:]
    out[1:, :] -= u[:-1, :]
    out[:-1, :] -= u[1:, :]
    return out


def _dot(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sum(a * b))


def cg_stencil(b, diag, tol: float, max_iter: int):
    """Solve the stencil system from a zero start.

    Returns ``(u, iterations, relative_residual, converged)``.
    """
    b = np.ascontiguousarray(b, dtype=np.float64)
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    x = np.zeros_like(b)
    r = b.copy()
    p = b.copy()
    bnorm = np.sqrt(_dot(b, b)) or 1.0
    rr = _dot(r, r)
    it = 0
    while np.sqrt(rr) > tol * bnorm and it < max_iter:
        q = apply_stencil(p, diag)
        alpha = rr / _dot(p, q)
        x += alpha * p
        r -= alpha * q
        rr_new = _dot(r, r)
        p = r + (rr_new / rr) * p
        rr = rr_new
        it += 1
    relres = float(np.sqrt(rr) / bnorm)
    return x, it, relres, relres <= tol
