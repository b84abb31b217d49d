"""Real symmetric eigenvalue routines."""

from __future__ import annotations

import numpy as np

SYMMETRY_TOL = 1e-12


def _require_symmetric(mat: np.ndarray) -> np.ndarray:
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if mat.size and np.abs(mat - mat.T).max() > SYMMETRY_TOL:
        raise ValueError("matrix is not symmetric")
    return mat


def jacobi_eigenvalues(mat: np.ndarray, tol: float = 1e-13, max_sweeps: int = 64) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps over all off-diagonal pairs until the off-diagonal Frobenius norm
    drops below ``tol`` (relative to the matrix norm, with an absolute floor).

    Returns:
        Eigenvalues in ascending order.
    """
    a = _require_symmetric(mat).copy()
    n = a.shape[0]
    scale = max(np.linalg.norm(a), 1.0)
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                diff = a[q, q] - a[p, p]
                if abs(apq) <= 1e-300 or abs(apq) < 1e-18 * abs(diff):
                    # rotation angle below rounding; dropping apq is exact to working precision
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = diff / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
    return np.sort(np.diag(a))


def symmetric_eigenvalues(mat: np.ndarray, method: str = "lapack") -> np.ndarray:
    """All eigenvalues of a real symmetric matrix, ascending.

    ``method="lapack"`` calls :func:`numpy.linalg.eigvalsh`; ``"jacobi"`` uses
    :func:`jacobi_eigenvalues` (slow, dependency-free, used as a cross-check).

    Raises:
        ValueError: if ``mat`` is not symmetric within 1e-12.
    """
    mat = _require_symmetric(mat)
    if method == "lapack":
        return np.linalg.eigvalsh(mat)
    if method == "jacobi":
        return jacobi_eigenvalues(mat)
    raise ValueError(f"unknown eigensolver {method!r}")
