"""Beam-splitter action on two-mode density matrices."""

from __future__ import annotations

from collections.abc import Mapping
from typing import Any, Optional

import numpy as np

from .fock_core import CoefficientTable, SplitterParams, cached_table, dense_unitary, fock_basis
from .states import NORM_TOL, TwoModeDensity

DENSE_MAX_TOTAL = 16


def _weight_grid(weights: Any) -> np.ndarray:
    if isinstance(weights, TwoModeDensity):
        if not weights.is_diagonal():
            raise ValueError("fast path needs a Fock-diagonal input; use apply_splitter_dense")
        return np.diag(weights.entries).reshape(weights.dim_a, weights.dim_b)
    if isinstance(weights, Mapping):
        if not weights:
            raise ValueError("empty weight map")
        dim_a = max(m for m, _ in weights) + 1
        dim_b = max(n for _, n in weights) + 1
        grid = np.zeros((dim_a, dim_b))
        for (m, n), p in weights.items():
            if m < 0 or n < 0:
                raise ValueError(f"negative occupation in weight key {(m, n)}")
            grid[m, n] = p
        return grid
    grid = np.asarray(weights, dtype=float)
    if grid.ndim != 2:
        raise ValueError("weights must be a 2-D grid, a {(m, n): p} map, or a diagonal TwoModeDensity")
    return grid


def apply_splitter_diagonal(
    weights: Any, params: SplitterParams, table: Optional[CoefficientTable] = None
) -> TwoModeDensity:
    """Output of the splitter for an input diagonal in the Fock basis.

    Accumulates one rank-1 term ``p_mn |psi_mn><psi_mn|`` per populated input
    pair, where ``psi_mn`` is the image of ``|m, n>``.  For inputs on
    ``dim_a x dim_b`` levels both output modes get ``dim_a + dim_b - 1`` levels,
    which is exactly the reachable support.

    Args:
        weights: ``{(m, n): p}``, a ``dim_a x dim_b`` array, or a diagonal
            :class:`TwoModeDensity`.
        params: splitter amplitudes.
        table: precomputed amplitudes; looked up from a shared cache if omitted.

    Raises:
        ValueError: if the weights are negative or not normalized.
    """
    grid = _weight_grid(weights)
    if np.any(grid < 0):
        raise ValueError("weights have negative entries")
    if abs(grid.sum() - 1.0) > NORM_TOL:
        raise ValueError(f"weights sum to {grid.sum()!r}, not 1")
    dim_a, dim_b = grid.shape
    max_total = dim_a + dim_b - 2
    dim = max_total + 1
    if table is None:
        table = cached_table(max_total, params.r2)
    elif table.params != params or table.max_total < max_total:
        raise ValueError("coefficient table does not cover this input")

    rho = np.zeros((dim * dim, dim * dim))
    for m, n in zip(*np.nonzero(grid)):
        N = m + n
        M = np.arange(N + 1)
        idx = M * dim + (N - M)
        c = table.row(m, n)
        rho[np.ix_(idx, idx)] += grid[m, n] * np.outer(c, c)
    return TwoModeDensity(dim, dim, rho)


def apply_splitter_dense(rho: TwoModeDensity, params: SplitterParams) -> TwoModeDensity:
    """Oracle path: conjugate an arbitrary density by :func:`dense_unitary`.

    The result lives on the same output grid as :func:`apply_splitter_diagonal`.
    """
    max_total = rho.dim_a + rho.dim_b - 2
    if max_total > DENSE_MAX_TOTAL:
        raise ValueError(
            f"dense oracle limited to total photon number {DENSE_MAX_TOTAL}, input reaches {max_total}"
        )
    U = dense_unitary(max_total, params)
    basis = fock_basis(max_total)
    if U.shape != (len(basis), len(basis)):
        raise ValueError("generated unitary does not match the Fock basis")
    dim = max_total + 1
    pos = {state: i for i, state in enumerate(basis)}
    embed = np.array([pos[(a, b)] for a in range(rho.dim_a) for b in range(rho.dim_b)])
    big = np.zeros((len(basis), len(basis)))
    big[np.ix_(embed, embed)] = rho.entries
    out = U @ big @ U.T
    grid = np.array([a * dim + b for a, b in basis])
    result = np.zeros((dim * dim, dim * dim))
    result[np.ix_(grid, grid)] = out
    return TwoModeDensity(dim, dim, result)


def photon_number_blocks(rho: TwoModeDensity) -> list[np.ndarray]:
    """Basis indices grouped by total number ``a + b``, ascending in total."""
    a, b = np.divmod(np.arange(rho.size), rho.dim_b)
    total = a + b
    return [np.flatnonzero(total == N) for N in range(total.max() + 1)]


def off_block_weight(rho: TwoModeDensity) -> float:
    """Largest entry coupling different total numbers (zero for splitter outputs)."""
    a, b = np.divmod(np.arange(rho.size), rho.dim_b)
    total = a + b
    mask = total[:, None] != total[None, :]
    return float(np.abs(rho.entries[mask]).max()) if mask.any() else 0.0


def block_eigenvalues(rho: TwoModeDensity) -> np.ndarray:
    """Spectrum of a density with no coherence between different total numbers."""
    parts = [np.linalg.eigvalsh(rho.entries[np.ix_(idx, idx)]) for idx in photon_number_blocks(rho)]
    return np.sort(np.concatenate(parts))
