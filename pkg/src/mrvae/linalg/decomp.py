"""
Cyclic Jacobi eigensolver and one-sided Jacobi SVD for small dense matrices.

Both routines work on float64 copies and sweep over all (p, q) pairs until a
full sweep performs no rotation. Returned bases follow one sign convention:
the largest-magnitude entry of every (right) singular vector or eigenvector
is positive.
"""

from typing import Tuple

import numpy as np

from mrvae.core.exceptions import DimensionError, NumericalError
from mrvae.core.logging import get_logger
from mrvae.linalg.types import DenseMatrix, DiagonalVector, SpectrumDecomp, as_matrix

logger = get_logger(__name__)

MAX_DIM = 512
MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-10
_EPS = np.finfo(np.float64).eps


def _rotation(theta: float) -> Tuple[float, float]:
    """(c, s) of the Jacobi rotation that annihilates the pivot."""
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    return c, t * c


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    """Flip columns so that each column's largest-magnitude entry is positive."""
    if vecs.size == 0:
        return np.ones(vecs.shape[1])
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.where(vecs[idx, np.arange(vecs.shape[1])] < 0, -1.0, 1.0)
    vecs *= signs
    return signs


def sym_eig(m) -> SpectrumDecomp:
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations."""
    a = as_matrix(m, "sym_eig input")
    n, n2 = a.shape
    if n != n2:
        raise DimensionError(f"sym_eig needs a square matrix, got {a.shape}")
    if n > MAX_DIM:
        raise DimensionError(f"sym_eig supports at most {MAX_DIM} dimensions, got {n}")
    if n and np.max(np.abs(a - a.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(a))):
        raise DimensionError("sym_eig input is not symmetric")

    a = 0.5 * (a + a.T)
    v = np.eye(n)

    for sweep in range(MAX_SWEEPS):
        rotations = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                if abs(apq) <= _EPS * np.sqrt(abs(a[p, p] * a[q, q])):
                    a[p, q] = a[q, p] = 0.0
                    continue
                c, s = _rotation((a[q, q] - a[p, p]) / (2.0 * apq))

                col_p = a[:, p].copy()
                a[:, p] = c * col_p - s * a[:, q]
                a[:, q] = s * col_p + c * a[:, q]
                row_p = a[p, :].copy()
                a[p, :] = c * row_p - s * a[q, :]
                a[q, :] = s * row_p + c * a[q, :]
                a[p, q] = a[q, p] = 0.0

                vec_p = v[:, p].copy()
                v[:, p] = c * vec_p - s * v[:, q]
                v[:, q] = s * vec_p + c * v[:, q]
                rotations += 1
        if rotations == 0:
            logger.debug(f"sym_eig converged after {sweep} sweeps (n={n})")
            break
    else:
        raise NumericalError(f"sym_eig did not converge in {MAX_SWEEPS} sweeps")

    vals = np.diag(a).copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    v = v[:, order]
    _fix_signs(v)
    return SpectrumDecomp(eigvecs=v, eigvals=vals, source_dim=n)


def _complete_basis(cols: np.ndarray, good: np.ndarray) -> np.ndarray:
    """Replace the columns not flagged ``good`` with an orthonormal completion."""
    m, r = cols.shape
    basis = [cols[:, i] for i in range(r) if good[i]]
    candidates = iter(np.eye(m))
    out = cols.copy()
    for i in range(r):
        if good[i]:
            continue
        for e in candidates:
            w = e.copy()
            for _ in range(2):
                for b in basis:
                    w -= (b @ w) * b
            norm = np.linalg.norm(w)
            if norm > 0.5:
                w /= norm
                basis.append(w)
                out[:, i] = w
                break
    return out


def _one_sided_jacobi(m: np.ndarray):
    """Thin SVD of a tall (rows >= cols) matrix."""
    rows, cols = m.shape
    u = m.copy()
    v = np.eye(cols)

    for sweep in range(MAX_SWEEPS):
        rotations = 0
        for p in range(cols - 1):
            for q in range(p + 1, cols):
                alpha = u[:, p] @ u[:, p]
                beta = u[:, q] @ u[:, q]
                gamma = u[:, p] @ u[:, q]
                if gamma == 0.0 or abs(gamma) <= _EPS * np.sqrt(alpha * beta):
                    continue
                c, s = _rotation((beta - alpha) / (2.0 * gamma))

                col_p = u[:, p].copy()
                u[:, p] = c * col_p - s * u[:, q]
                u[:, q] = s * col_p + c * u[:, q]
                vec_p = v[:, p].copy()
                v[:, p] = c * vec_p - s * v[:, q]
                v[:, q] = s * vec_p + c * v[:, q]
                rotations += 1
        if rotations == 0:
            logger.debug(f"svd converged after {sweep} sweeps ({rows}x{cols})")
            break
    else:
        raise NumericalError(f"svd did not converge in {MAX_SWEEPS} sweeps")

    sing = np.linalg.norm(u, axis=0)
    order = np.argsort(-sing, kind="stable")
    sing = sing[order]
    u = u[:, order]
    v = v[:, order]

    tol = max(rows, cols) * _EPS * (sing[0] if sing.size else 0.0)
    good = sing > tol
    left = np.zeros_like(u)
    left[:, good] = u[:, good] / sing[good]
    sing = np.where(good, sing, 0.0)
    left = _complete_basis(left, good)
    return left, sing, v


def svd(m) -> Tuple[DenseMatrix, DiagonalVector, DenseMatrix]:
    """Thin singular value decomposition ``m = left @ diag(singulars) @ right.T``."""
    a = as_matrix(m, "svd input")
    rows, cols = a.shape
    if max(rows, cols) > MAX_DIM * 4:
        raise DimensionError(f"svd supports small matrices only, got {a.shape}")

    if rows >= cols:
        left, sing, right = _one_sided_jacobi(a)
    else:
        right, sing, left = _one_sided_jacobi(a.T.copy())

    signs = _fix_signs(right)
    left *= signs
    return left, sing, right
