"""Truncated thermal inputs and two-mode density matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Literal, Union

import numpy as np

from .linalg import symmetric_eigenvalues

NORM_TOL = 1e-9
TRACE_TOL = 1e-10
PSD_TOL = 1e-9


@dataclass(frozen=True)
class SpinDim:
    """Truncation of one mode, stored as the integer ``2S``."""

    two_s: int

    def __post_init__(self) -> None:
        if self.two_s < 0:
            raise ValueError(f"2S must be >= 0, got {self.two_s}")

    @property
    def d(self) -> int:
        return self.two_s + 1

    @property
    def spin(self) -> float:
        return self.two_s / 2


@dataclass(frozen=True)
class ThermalSpec:
    """Truncated thermal state on ``2S + 1`` levels.

    ``x`` is the Boltzmann ratio ``exp(-hbar*omega / kT)``: 1 is infinite
    temperature (maximally mixed), 0 is the ground state.
    """

    spin: SpinDim
    x: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.x <= 1.0:
            raise ValueError(f"Boltzmann ratio x must lie in [0, 1], got {self.x}")

    @classmethod
    def from_beta(cls, spin: SpinDim, beta: float) -> "ThermalSpec":
        """Build from the dimensionless ``beta = hbar*omega / kT >= 0``."""
        if beta < 0:
            raise ValueError(f"beta must be >= 0, got {beta}")
        return cls(spin, math.exp(-beta))


def thermal_diagonal(spec: ThermalSpec) -> np.ndarray:
    """Level populations ``x**n / Z`` for ``n = 0 .. 2S``."""
    w = spec.x ** np.arange(spec.spin.d, dtype=float)
    return w / w.sum()


def maximally_mixed(spin: SpinDim) -> np.ndarray:
    return np.full(spin.d, 1.0 / spin.d)


class TwoModeDensity:
    """Real symmetric density matrix on a ``dim_a x dim_b`` Fock grid.

    Basis index of ``|a, b>`` is ``a * dim_b + b``.  Entries are symmetrized on
    construction and stored read-only.
    """

    __slots__ = ("dim_a", "dim_b", "entries")

    def __init__(self, dim_a: int, dim_b: int, entries: Any, *, check: bool = True):
        mat = np.array(entries, dtype=float)
        size = dim_a * dim_b
        if mat.shape != (size, size):
            raise ValueError(f"entries have shape {mat.shape}, expected {(size, size)}")
        if check:
            asym = np.abs(mat - mat.T).max() if size else 0.0
            if asym > 1e-10:
                raise ValueError(f"density is not symmetric (max deviation {asym:.3e})")
            if abs(np.trace(mat) - 1.0) > TRACE_TOL:
                raise ValueError(f"density trace {np.trace(mat)!r} differs from 1")
        mat = 0.5 * (mat + mat.T)
        mat.setflags(write=False)
        self.dim_a = dim_a
        self.dim_b = dim_b
        self.entries = mat

    def __repr__(self) -> str:
        return f"TwoModeDensity(dim_a={self.dim_a}, dim_b={self.dim_b})"

    @property
    def size(self) -> int:
        return self.dim_a * self.dim_b

    def index(self, a: int, b: int) -> int:
        return a * self.dim_b + b

    def tensor(self) -> np.ndarray:
        """View with axes ``(a, b, a', b')``."""
        return self.entries.reshape(self.dim_a, self.dim_b, self.dim_a, self.dim_b)

    def trace(self) -> float:
        return float(np.trace(self.entries))

    def is_diagonal(self) -> bool:
        return not np.any(self.entries - np.diag(np.diag(self.entries)))

    def min_eigenvalue(self) -> float:
        return float(symmetric_eigenvalues(self.entries)[0])

    def check_psd(self, tol: float = PSD_TOL) -> None:
        lo = self.min_eigenvalue()
        if lo < -tol:
            raise ValueError(f"density is not positive semidefinite (min eigenvalue {lo:.3e})")

    def to_dict(self) -> dict:
        return {
            "dim_a": self.dim_a,
            "dim_b": self.dim_b,
            "entries": self.entries.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TwoModeDensity":
        dim_a, dim_b = int(data["dim_a"]), int(data["dim_b"])
        size = dim_a * dim_b
        return cls(dim_a, dim_b, np.asarray(data["entries"], dtype=float).reshape(size, size))


def _check_weights(w: Any, name: str) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError(f"{name} must be a non-empty vector")
    if np.any(w < 0):
        raise ValueError(f"{name} has negative entries")
    if abs(w.sum() - 1.0) > NORM_TOL:
        raise ValueError(f"{name} sums to {w.sum()!r}, not 1")
    return w


def product_input(a: Any, b: Any) -> TwoModeDensity:
    """Fock-diagonal product state with populations ``a[m] * b[n]``."""
    a = _check_weights(a, "weights a")
    b = _check_weights(b, "weights b")
    return TwoModeDensity(a.size, b.size, np.diag(np.outer(a, b).ravel()))


def _entropy_from_spectrum(lam: np.ndarray) -> float:
    if lam.size and lam.min() < -PSD_TOL:
        raise ValueError(f"state has negative eigenvalue {lam.min():.3e}")
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam))) + 0.0


def von_neumann_entropy(state: Union[TwoModeDensity, np.ndarray, list]) -> float:
    """Entropy in bits of a weight vector, a density matrix, or a TwoModeDensity.

    Diagonal matrices use their diagonal directly; anything else goes through
    the symmetric eigensolver.
    """
    if isinstance(state, TwoModeDensity):
        state = state.entries
    arr = np.asarray(state, dtype=float)
    if arr.ndim == 1:
        return _entropy_from_spectrum(arr)
    if not np.any(arr - np.diag(np.diag(arr))):
        return _entropy_from_spectrum(np.diag(arr).copy())
    return _entropy_from_spectrum(symmetric_eigenvalues(arr))


def reduced_state(rho: TwoModeDensity, keep: Literal["A", "B"] = "A") -> np.ndarray:
    """Partial trace over the other mode."""
    t = rho.tensor()
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
