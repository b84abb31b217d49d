"""Partial transpose, logarithmic negativity and the NPT test."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np

from .linalg import symmetric_eigenvalues
from .states import TwoModeDensity

NPT_TOL = 1e-10


@dataclass(frozen=True)
class NegativityReport:
    log_negativity: float
    trace_norm: float
    min_pt_eigenvalue: float
    is_npt: bool

    def to_dict(self) -> dict:
        return asdict(self)


def partial_transpose(rho: TwoModeDensity, side: Literal["A", "B"] = "A") -> np.ndarray:
    """Transpose the indices of one mode: ``PT[(i,j),(k,l)] = rho[(k,j),(i,l)]`` for side A."""
    t = rho.tensor()
    if side == "A":
        t = t.transpose(2, 1, 0, 3)
    elif side == "B":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return np.ascontiguousarray(t).reshape(rho.size, rho.size)


def negativity_from_spectrum(mu: np.ndarray, npt_tol: float = NPT_TOL) -> NegativityReport:
    trace_norm = math.fsum(np.abs(mu))
    lo = float(mu.min())
    return NegativityReport(
        log_negativity=max(math.log2(trace_norm), 0.0),
        trace_norm=trace_norm,
        min_pt_eigenvalue=lo,
        is_npt=bool(lo < -npt_tol),
    )


def log_negativity(
    rho: TwoModeDensity, side: Literal["A", "B"] = "A", method: str = "lapack"
) -> NegativityReport:
    """Logarithmic negativity (bits) from the full partial-transpose spectrum.

    ``log_negativity`` is clamped at 0: for PPT states the trace norm is 1 up
    to rounding, and a value of ``log2(1 - 1e-16)`` is noise.
    """
    return negativity_from_spectrum(symmetric_eigenvalues(partial_transpose(rho, side), method))


def pure_state_log_negativity(coeffs: np.ndarray) -> float:
    """``2 log2(sum |c|)`` for a Schmidt-form pure state ``sum_M c_M |M, N - M>``."""
    return 2.0 * math.log2(math.fsum(np.abs(coeffs)))


def pure_state_density(coeffs: np.ndarray, dim: int) -> TwoModeDensity:
    """Density of ``sum_M c_M |M, N - M>`` on a ``dim x dim`` grid, ``N = len(c) - 1``."""
    coeffs = np.asarray(coeffs, dtype=float)
    N = coeffs.size - 1
    psi = np.zeros(dim * dim)
    M = np.arange(N + 1)
    psi[M * dim + (N - M)] = coeffs
    return TwoModeDensity(dim, dim, np.outer(psi, psi))
