"""Smallest-eigenpair solver for symmetric PSD matrices.

Small problems go through LAPACK directly. Larger ones run Lanczos with
full reorthogonalization on the complement operator c*I - L (largest
eigenpairs of the complement are the smallest of L), locking converged
Ritz vectors and restarting deflated against them so repeated eigenvalues
(one zero per balanced component is common here) are recovered copy by
copy. Every returned pair is residual-checked; if the iteration stalls the
solver falls back to the dense path, whatever the size.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

DENSE_CUTOFF = 2000


def _dense_smallest(L, d):
    dense = L.toarray() if sp.issparse(L) else np.asarray(L, dtype=np.float64)
    vals, vecs = np.linalg.eigh(dense)
    return vals[:d], vecs[:, :d]


def _fix_signs(vecs):
    # deterministic orientation: largest-magnitude component positive
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        lead = np.argmax(np.abs(col))
        if col[lead] < 0:
            vecs[:, j] = -col
    return vecs


def _orth_against(v, basis):
    # two Gram-Schmidt passes keep orthogonality to working precision
    for _ in range(2):
        if basis.shape[1]:
            v = v - basis @ (basis.T @ v)
    return v


def _lanczos_locked(L, d, tol, seed):
    """Deflated Lanczos; returns (vals, vecs) or None when it stalls."""
    n = L.shape[0]
    # lambda_max(L) <= max absolute row sum
    c = max(float(abs(L).sum(axis=1).max()), 1.0)

    rng = np.random.Generator(np.random.PCG64(seed))
    locked_vecs = np.empty((n, 0))
    locked_vals: list[float] = []
    want = min(n, d + 3)  # small surplus guards against missed multiplicity
    matvecs = 0
    budget = max(20000, 100 * d)

    for _attempt in range(8):
        if len(locked_vals) >= want or matvecs > budget:
            break
        m = min(n - len(locked_vals), max(2 * (d - len(locked_vals)) + 30, 50))
        if m < 1:
            break
        q = _orth_against(rng.standard_normal(n), locked_vecs)
        nrm = np.linalg.norm(q)
        if nrm < 1e-12:
            break
        q /= nrm

        Q = np.empty((n, m))
        alphas = np.zeros(m)
        betas = np.zeros(m)
        Q[:, 0] = q
        steps = 0
        for j in range(m):
            w = c * Q[:, j] - L @ Q[:, j]
            matvecs += 1
            alphas[j] = float(np.dot(Q[:, j], w))
            w = _orth_against(w, locked_vecs)
            w -= Q[:, :j + 1] @ (Q[:, :j + 1].T @ w)
            w -= Q[:, :j + 1] @ (Q[:, :j + 1].T @ w)
            steps = j + 1
            beta = np.linalg.norm(w)
            if j + 1 < m:
                if beta < 1e-10:
                    break  # invariant subspace; Ritz pairs below are exact
                betas[j] = beta
                Q[:, j + 1] = w / beta

        T = np.diag(alphas[:steps])
        if steps > 1:
            T += np.diag(betas[:steps - 1], 1) + np.diag(betas[:steps - 1], -1)
        theta, S = np.linalg.eigh(T)

        newly = 0
        for idx in range(steps - 1, -1, -1):  # largest theta = smallest lambda
            x = Q[:, :steps] @ S[:, idx]
            x = _orth_against(x, locked_vecs)
            nrm = np.linalg.norm(x)
            if nrm < 1e-8:
                continue
            x /= nrm
            Lx = L @ x
            matvecs += 1
            lam = float(np.dot(x, Lx))
            if np.linalg.norm(Lx - lam * x) <= tol:
                locked_vecs = np.hstack([locked_vecs, x[:, None]])
                locked_vals.append(lam)
                newly += 1
                if len(locked_vals) >= want:
                    break
        if newly == 0 and steps >= n - len(locked_vals):
            break  # the whole remaining space was searched

    if len(locked_vals) < d:
        return None
    vals = np.asarray(locked_vals)
    order = np.argsort(vals, kind="stable")[:d]
    return vals[order], locked_vecs[:, order]


def smallest_eigenpairs(L, d, tol=1e-8, seed=0):
    """d smallest eigenpairs of symmetric L, residual-checked against tol.

    Returns (values ascending, column eigenvectors of unit norm).
    """
    n = L.shape[0]
    if d > n:
        raise ValueError(f"requested {d} eigenpairs from a {n}-node matrix")
    if d < 1:
        raise ValueError("d must be >= 1")
    if n <= DENSE_CUTOFF:
        vals, vecs = _dense_smallest(L, d)
        return vals, _fix_signs(vecs)
    result = _lanczos_locked(L.tocsr() if sp.issparse(L) else L, d, tol, seed)
    if result is None:
        vals, vecs = _dense_smallest(L, d)
        return vals, _fix_signs(vecs)
    vals, vecs = result
    return vals, _fix_signs(vecs)
