"""Beam-splitter matrix elements on two-mode Fock states.

The splitter is parameterized by its reflectivity ``r2 = R**2`` with real,
non-negative amplitudes ``R = sqrt(r2)`` and ``T = sqrt(1 - r2)``.  Under this
convention an input ``|m, n>`` is mapped to

    sum_M f(m, n, M) |M, m + n - M>

with ``f`` given by a finite alternating sum over an index ``p``.  Three
evaluation routes exist:

* :func:`splitter_coefficient`: the closed-form sum with log-factorials in
  double precision, signs tracked separately, summands accumulated with
  :func:`math.fsum`.  Accurate to ~1e-13 up to ``m + n`` around 16.
* :func:`block_unitary` / :func:`coefficient_table`: whole blocks of fixed
  total number from the exponentiated generator.  This is what the sweeps use.
* :func:`exact_coefficient`, the oracle: every summand is an exact rational
  (``r2`` is a binary float and hence rational), so only one square root is
  taken, at the very end.  :func:`dense_unitary` is built on this route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping

import numpy as np
from scipy.linalg import expm

from .errors import ConsistencyError

UNITARITY_TOL = 1e-9

_LOG_FACTORIALS: list[float] = [0.0]


def log_factorial(k: int) -> float:
    """Return ``ln(k!)``.

    Values are prefix sums of ``ln(i)`` computed with :func:`math.fsum` and
    cached, so each entry carries a single final rounding.
    """
    if k < 0:
        raise ValueError(f"log_factorial needs k >= 0, got {k}")
    table = _LOG_FACTORIALS
    if k >= len(table):
        logs = [math.log(i) for i in range(1, k + 1)]
        for j in range(len(table), k + 1):
            table.append(math.fsum(logs[:j]))
    return table[k]


@dataclass(frozen=True)
class FockPair:
    """Occupation numbers ``(m, n)`` of the two modes."""

    m: int
    n: int

    def __post_init__(self) -> None:
        if self.m < 0 or self.n < 0:
            raise ValueError(f"occupations must be non-negative, got ({self.m}, {self.n})")

    @property
    def total(self) -> int:
        return self.m + self.n


@dataclass(frozen=True)
class SplitterParams:
    """Real splitter amplitudes derived from the reflectivity ``r2 = R**2``."""

    r2: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.r2 <= 1.0:
            raise ValueError(f"reflectivity r2 must lie in [0, 1], got {self.r2}")

    @property
    def R(self) -> float:
        return math.sqrt(self.r2)

    @property
    def T(self) -> float:
        return math.sqrt(1.0 - self.r2)


def _check_index(m: int, n: int, M: int) -> None:
    if m < 0 or n < 0:
        raise ValueError(f"occupations must be non-negative, got ({m}, {n})")
    if not 0 <= M <= m + n:
        raise ValueError(f"output index M={M} outside [0, {m + n}]")


def splitter_coefficient(
    m: int, n: int, M: int, params: SplitterParams, *, literal: bool = False
) -> float:
    """Amplitude ``<M, m+n-M| U |m, n>`` for a real splitter.

    Args:
        m, n: input occupations.
        M: occupation of output mode A, ``0 <= M <= m + n``.
        params: splitter amplitudes.
        literal: use the unnormalized ``m! n!`` prefactor instead of
            ``sqrt(m! n!)``.  Diagnostic only: the result is not unitary
            (e.g. the squared row for ``(2, 0)`` sums to 2).

    Raises:
        ValueError: if ``M`` is out of range.
    """
    _check_index(m, n, M)
    N = m + n
    T, R = params.T, params.R
    scale = 1.0 if literal else 0.5
    log_pre = scale * (log_factorial(m) + log_factorial(n)) + 0.5 * (
        log_factorial(M) + log_factorial(N - M)
    )
    terms = []
    for p in range(max(0, M - n), min(m, M) + 1):
        log_mag = log_pre - (
            log_factorial(p)
            + log_factorial(p - M + n)
            + log_factorial(m - p)
            + log_factorial(M - p)
        )
        # 0.0 ** 0 == 1.0, which is what the extremal splitters need
        amp = math.exp(log_mag) * T ** (2 * p - M + n) * R ** (m + M - 2 * p)
        terms.append(-amp if (M - p) % 2 else amp)
    return math.fsum(terms) + 0.0


def coefficient_row(m: int, n: int, params: SplitterParams) -> np.ndarray:
    """All amplitudes ``[f(m, n, 0), ..., f(m, n, m + n)]``."""
    return np.array([splitter_coefficient(m, n, M, params) for M in range(m + n + 1)])


def block_unitary(N: int, params: SplitterParams) -> np.ndarray:
    """Splitter restricted to total number ``N``; ``[M, m]`` is ``f(m, N - m, M)``.

    Exponentiates the number-conserving generator, which is tridiagonal in the
    ``|M, N - M>`` basis.  Stays accurate to ~1e-14 for ``N`` in the tens, where
    the closed-form alternating sum loses up to eight digits at ``r2 = 0.5``.
    """
    k = np.arange(N)
    hop = np.sqrt((k + 1) * (N - k))
    gen = np.zeros((N + 1, N + 1))
    gen[k, k + 1] = hop
    gen[k + 1, k] = -hop
    return expm(math.asin(params.R) * gen)


def _exact_parts(m: int, n: int, M: int, r2: Fraction) -> tuple[Fraction, Fraction]:
    """Split an amplitude as ``sign(s) * sqrt(radicand * s**2)``.

    The amplitude equals ``sqrt(radicand) * s`` where both factors are exact
    rationals: the odd leftover powers of ``T`` and ``R`` plus the factorials
    go under the root, even powers stay in the sum ``s``.
    """
    N = m + n
    t2 = 1 - r2
    odd_t = (n - M) % 2
    odd_r = (m + M) % 2
    s = Fraction(0)
    for p in range(max(0, M - n), min(m, M) + 1):
        a = 2 * p - M + n
        b = m + M - 2 * p
        denom = (
            math.factorial(p)
            * math.factorial(p - M + n)
            * math.factorial(m - p)
            * math.factorial(M - p)
        )
        term = t2 ** ((a - odd_t) // 2) * r2 ** ((b - odd_r) // 2) / denom
        s += -term if (M - p) % 2 else term
    radicand = (
        Fraction(math.factorial(m) * math.factorial(n) * math.factorial(M) * math.factorial(N - M))
        * t2**odd_t
        * r2**odd_r
    )
    return radicand, s


def exact_coefficient(m: int, n: int, M: int, params: SplitterParams) -> float:
    """Oracle amplitude: exact rational summation, one square root at the end."""
    _check_index(m, n, M)
    radicand, s = _exact_parts(m, n, M, Fraction(params.r2))
    if s == 0:
        return 0.0
    value = math.sqrt(radicand * s * s)
    return value if s > 0 else -value


def exact_row_norm(m: int, n: int, params: SplitterParams) -> Fraction:
    """Exact ``sum_M f(m, n, M)**2`` as a rational."""
    r2 = Fraction(params.r2)
    total = Fraction(0)
    for M in range(m + n + 1):
        radicand, s = _exact_parts(m, n, M, r2)
        total += radicand * s * s
    return total


@dataclass(frozen=True)
class CoefficientTable:
    """Amplitude rows for every ``(m, n)`` with ``m + n <= max_total``.

    Immutable after construction; rows are read-only arrays.
    """

    params: SplitterParams
    max_total: int
    entries: Mapping[tuple[int, int], np.ndarray] = field(repr=False)

    def row(self, m: int, n: int) -> np.ndarray:
        return self.entries[(m, n)]

    def verify(self, tol: float = UNITARITY_TOL) -> None:
        """Check row normalization and same-N orthogonality.

        Raises:
            ConsistencyError: on any violation beyond ``tol``.
        """
        for N in range(self.max_total + 1):
            block = np.array([self.entries[(m, N - m)] for m in range(N + 1)])
            gram = block @ block.T
            err = np.abs(gram - np.eye(N + 1)).max()
            if err > tol:
                raise ConsistencyError(
                    f"splitter coefficients not unitary in block N={N} "
                    f"(r2={self.params.r2}): deviation {err:.3e}"
                )


def coefficient_table(max_total: int, params: SplitterParams, *, check: bool = True) -> CoefficientTable:
    """Build and (by default) verify the amplitude table up to ``max_total``.

    Rows come from :func:`block_unitary`; they agree with
    :func:`splitter_coefficient` where the latter is accurate.
    """
    if max_total < 0:
        raise ValueError(f"max_total must be >= 0, got {max_total}")
    entries = {}
    for N in range(max_total + 1):
        block = block_unitary(N, params)
        for m in range(N + 1):
            row = np.ascontiguousarray(block[:, m])
            row.setflags(write=False)
            entries[(m, N - m)] = row
    table = CoefficientTable(params, max_total, MappingProxyType(entries))
    if check:
        table.verify()
    return table


@lru_cache(maxsize=256)
def cached_table(max_total: int, r2: float) -> CoefficientTable:
    """Process-wide memo of :func:`coefficient_table`; tables are immutable."""
    return coefficient_table(max_total, SplitterParams(r2))


def fock_basis(max_total: int) -> list[tuple[int, int]]:
    """Two-mode basis ordered by total number ``N``, then by ``a`` ascending."""
    return [(a, N - a) for N in range(max_total + 1) for a in range(N + 1)]


def dense_unitary(max_total: int, params: SplitterParams) -> np.ndarray:
    """Splitter matrix on the subspace of total number ``<= max_total``.

    Rows and columns follow :func:`fock_basis`; the result is block diagonal in
    ``N``.  Entries come from :func:`exact_coefficient`, never from the fast
    path, so the matrix can serve as an oracle for it.
    """
    basis = fock_basis(max_total)
    index = {state: i for i, state in enumerate(basis)}
    U = np.zeros((len(basis), len(basis)))
    for (m, n), col in index.items():
        for M in range(m + n + 1):
            U[index[(M, m + n - M)], col] = exact_coefficient(m, n, M, params)
    return U
