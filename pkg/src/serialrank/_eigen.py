"""Smallest eigenpairs of a symmetric matrix restricted to the complement of a
known null vector.

Two routes: a dense LAPACK solve (Householder reflection that maps the known
vector onto e_1, then a tridiagonalization-based ``eigh`` of the trailing
block) and a Lanczos iteration with full reorthogonalization for large n.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import ConvergenceError

DENSE_MAX_N = 2048


def _householder_vector(u: np.ndarray) -> np.ndarray:
    # H = I - 2 w w^T maps u (unit) onto -sign(u_0) e_1
    w = u.copy()
    w[0] += np.copysign(1.0, u[0] if u[0] != 0 else 1.0)
    return w / np.linalg.norm(w)


def deflated_eigh_dense(A: np.ndarray, u: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """``k`` smallest eigenpairs of ``A`` on the orthogonal complement of unit ``u``."""
    n = A.shape[0]
    w = _householder_vector(u)
    Aw = A @ w
    wAw = float(w @ Aw)
    HAH = A - 2.0 * np.outer(w, Aw) - 2.0 * np.outer(Aw, w) + 4.0 * wAw * np.outer(w, w)
    B = HAH[1:, 1:]
    B = (B + B.T) / 2.0
    k = min(k, n - 1)
    vals, Y = scipy.linalg.eigh(B, subset_by_index=[0, k - 1])
    Z = np.vstack([np.zeros((1, k)), Y])
    V = Z - 2.0 * np.outer(w, w @ Z)
    return vals, V


def lanczos_smallest(
    A: np.ndarray,
    u: np.ndarray,
    k: int,
    tol: float = 1e-10,
    max_iter: int | None = None,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Lanczos with full reorthogonalization, restricted to ``u``-perp.

    Stops when the ``k`` smallest Ritz pairs have residual at most
    ``tol * ||A||_F``. The start vector comes from a fixed seed so results
    are reproducible.
    """
    n = A.shape[0]
    k = min(k, n - 1)
    if max_iter is None:
        max_iter = min(n - 1, 600)
    scale = np.linalg.norm(A)
    rng = np.random.Generator(np.random.PCG64(seed))
    Q = np.zeros((max_iter + 1, n))
    alpha = np.zeros(max_iter)
    beta = np.zeros(max_iter)
    q = rng.standard_normal(n)
    q -= (u @ q) * u
    q /= np.linalg.norm(q)
    Q[0] = q
    resid = np.inf
    m = 0
    for m in range(max_iter):
        z = A @ Q[m]
        alpha[m] = Q[m] @ z
        z -= alpha[m] * Q[m]
        if m > 0:
            z -= beta[m - 1] * Q[m - 1]
        # two passes of classical Gram-Schmidt against the basis and u
        for _ in range(2):
            z -= Q[: m + 1].T @ (Q[: m + 1] @ z)
            z -= (u @ z) * u
        beta[m] = np.linalg.norm(z)
        size = m + 1
        if size >= k and (size % 10 == 0 or beta[m] < 1e-14 * scale or size == max_iter):
            theta, S = scipy.linalg.eigh_tridiagonal(alpha[:size], beta[: size - 1])
            resid = float(np.max(np.abs(beta[m] * S[-1, :k])))
            if resid <= tol * scale or beta[m] < 1e-14 * scale:
                V = Q[:size].T @ S[:, :k]
                V /= np.linalg.norm(V, axis=0)
                return theta[:k], V
        if beta[m] < 1e-14 * scale:
            break
        Q[m + 1] = z / beta[m]
    raise ConvergenceError(f"Lanczos did not converge in {m + 1} iterations", resid)


def smallest_deflated(
    A: np.ndarray,
    u: np.ndarray,
    k: int = 2,
    method: str = "auto",
    tol: float = 1e-10,
) -> tuple[np.ndarray, np.ndarray]:
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    if method == "auto":
        method = "dense" if A.shape[0] <= DENSE_MAX_N else "lanczos"
    if method == "dense":
        return deflated_eigh_dense(A, u, k)
    if method == "lanczos":
        return lanczos_smallest(A, u, k, tol=tol)
    raise ValueError(f"unknown eigensolver {method!r}")
