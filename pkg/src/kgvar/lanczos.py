"""Block Lanczos with full reorthogonalization and thick restarts.

Finds the ``k`` algebraically smallest eigenpairs of a symmetric operator.
The block size should be at least the largest multiplicity among the wanted
eigenvalues, since a Krylov space grown from ``b`` vectors sees at most ``b``
directions of any eigenspace.
"""

import numpy as np

from .errors import ArgumentError, ConvergenceError

EPS = np.finfo(float).eps


def _orthogonalize(Q, X):
    # classical Gram-Schmidt, applied twice
    for _ in range(2):
        if Q.shape[1]:
            X = X - Q @ (Q.T @ X)
    return X


def _orthonormal_block(Q, X, rng):
    X = _orthogonalize(Q, X)
    scale = max(np.linalg.norm(X, axis=0).max(initial=0.0), 1.0)
    Qx, R = np.linalg.qr(X)
    weak = np.abs(np.diag(R)) < 1e-10 * scale
    if weak.any():
        # Krylov space exhausted in some directions: refill with random vectors
        X[:, weak] = rng.standard_normal((X.shape[0], int(weak.sum())))
        X = _orthogonalize(Q, X)
        Qx, _ = np.linalg.qr(X)
        Qx = _orthogonalize(Q, Qx)
        Qx, _ = np.linalg.qr(Qx)
    return Qx


def lanczos_smallest(apply, n, k, block=None, max_basis=None, tol=1e-9, max_restarts=400, seed=0):
    """Smallest ``k`` eigenpairs of the symmetric operator ``apply`` (acting on n x p arrays).

    Returns ``(values, vectors, residuals)`` with orthonormal columns in
    ``vectors`` and ascending ``values``.  Raises ConvergenceError when the
    residual norms do not fall below ``max(tol, 64 eps ||A||)`` in time.
    """
    if not 1 <= k <= n:
        raise ArgumentError(f"k={k} must lie in [1, {n}]")
    b = min(block or k, n)
    if max_basis is None:
        max_basis = max(60, 4 * (k + b))
    if max_basis >= n or n <= 4 * (k + b):
        vals, vecs = np.linalg.eigh(apply(np.eye(n)))
        vecs = vecs[:, :k]
        return vals[:k], vecs, np.linalg.norm(apply(vecs) - vecs * vals[:k], axis=0)
    keep = min(max(k + b, max_basis // 2), max_basis - b)
    rng = np.random.default_rng(seed)

    Q = np.zeros((n, 0))
    AQ = np.zeros((n, 0))
    pending = rng.standard_normal((n, b))
    res = None
    for _ in range(max_restarts):
        while Q.shape[1] + b <= max_basis:
            X = _orthonormal_block(Q, pending, rng)
            AX = apply(X)
            Q = np.hstack([Q, X])
            AQ = np.hstack([AQ, AX])
            pending = AX

        H = Q.T @ AQ
        H = 0.5 * (H + H.T)
        theta, Y = np.linalg.eigh(H)
        U = Q @ Y[:, :k]
        AU = AQ @ Y[:, :k]
        res = np.linalg.norm(AU - U * theta[:k], axis=0)
        anorm = float(np.max(np.abs(theta)))
        if np.all(res <= max(tol, 64 * EPS * anorm)):
            return theta[:k], U, res

        pending = _orthogonalize(Q, pending)
        Yk = Y[:, :keep]
        Q = Q @ Yk
        AQ = AQ @ Yk
        Q, R = np.linalg.qr(Q)
        AQ = np.linalg.solve(R.T, AQ.T).T
    raise ConvergenceError(
        f"Lanczos did not converge after {max_restarts} restarts; residuals {res}", residuals=res
    )
