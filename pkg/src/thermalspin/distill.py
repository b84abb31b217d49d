"""Local projection onto the extremal levels ``{|0>, |top>}`` of each output arm.

``top`` is the highest reachable output level: ``4S`` when both inputs are
thermal on ``2S + 1`` levels, ``2S`` when one port carries the vacuum.

If the projected two-qubit state has a negative partial transpose, the
pre-projection state holds distillable entanglement.  Outcomes outside the
projected subspace are discarded; their cost shows up as
``success_probability``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .entanglement import NPT_TOL, log_negativity, partial_transpose
from .linalg import symmetric_eigenvalues
from .states import SpinDim, TwoModeDensity

DEGENERATE_PROB = 1e-12


@dataclass(frozen=True)
class DistillOutcome:
    success_probability: float
    projected_state: Optional[np.ndarray]
    fidelity_f: Optional[float]
    min_pt_eigenvalue: Optional[float]
    is_npt: bool

    @property
    def degenerate(self) -> bool:
        return self.projected_state is None

    def to_dict(self) -> dict:
        return {
            "success_probability": self.success_probability,
            "projected_state": None if self.projected_state is None else self.projected_state.tolist(),
            "fidelity_f": self.fidelity_f,
            "min_pt_eigenvalue": self.min_pt_eigenvalue,
            "is_npt": self.is_npt,
        }


def _min_pt_eigenvalue(projected: TwoModeDensity) -> float:
    pt = partial_transpose(projected)
    if pt.shape == (4, 4):
        # splitter outputs conserve photon number, so the PT splits into the
        # |0,top>, |top,0> diagonal and a 2x2 block on |0,0>, |top,top>
        coupled = pt[np.ix_([0, 3], [0, 3])]
        rest = pt.copy()
        rest[np.ix_([0, 3], [0, 3])] = 0.0
        if not np.any(rest - np.diag(np.diag(rest))):
            a, b, c = coupled[0, 0], coupled[1, 1], coupled[0, 1]
            upper = 0.5 * (a + b) + math.hypot(0.5 * (a - b), c)
            # product form avoids cancellation when the lower eigenvalue is tiny
            lower = (a * b - c * c) / upper if upper > 0 else 0.5 * (a + b) - math.hypot(0.5 * (a - b), c)
            return float(min(lower, pt[1, 1], pt[2, 2]))
    return float(symmetric_eigenvalues(pt)[0])


def top_level(spin: SpinDim, x_a: float, x_b: float) -> int:
    """Highest output level reachable from thermal inputs with ratios ``x_a``, ``x_b``."""
    return spin.two_s * ((x_a > 0) + (x_b > 0))


def project_extremal(rho: TwoModeDensity, spin: SpinDim, top: Optional[int] = None) -> DistillOutcome:
    """Apply ``P (x) P`` with ``P = |0><0| + |top><top|`` and test the result for NPT.

    Args:
        rho: splitter output for inputs truncated at ``2S`` (``4S + 1`` levels per mode).
        spin: input truncation.
        top: upper retained level, default ``4S``.  When it equals 0 only the
            vacuum is kept and the outcome is trivially PPT.

    Raises:
        ValueError: on a grid mismatch or ``top`` outside the output grid.
    """
    dim = 2 * spin.two_s + 1
    if rho.dim_a != dim or rho.dim_b != dim:
        raise ValueError(
            f"expected an output state with {dim} levels per mode, got {rho.dim_a}x{rho.dim_b}"
        )
    if top is None:
        top = 2 * spin.two_s
    if not 0 <= top < dim:
        raise ValueError(f"top level {top} outside [0, {dim - 1}]")
    levels = sorted({0, top})
    idx = np.array([a * dim + b for a in levels for b in levels])
    block = rho.entries[np.ix_(idx, idx)]
    prob = float(np.trace(block))
    if prob < DEGENERATE_PROB:
        return DistillOutcome(max(prob, 0.0), None, None, None, False)
    k = len(levels)
    projected = TwoModeDensity(k, k, block / prob, check=False)
    lo = _min_pt_eigenvalue(projected)
    return DistillOutcome(
        success_probability=prob,
        projected_state=np.array(projected.entries),
        fidelity_f=float(projected.entries[0, 0]),
        min_pt_eigenvalue=lo,
        is_npt=bool(lo < -NPT_TOL),
    )


def distill_verdict(outcome: DistillOutcome) -> bool:
    """True when the projected 2x2 state is NPT, certifying distillability."""
    return outcome.is_npt


def projected_log_negativity(outcome: DistillOutcome) -> float:
    if outcome.projected_state is None:
        return 0.0
    k = outcome.projected_state.shape[0]
    side = int(round(np.sqrt(k)))
    return log_negativity(TwoModeDensity(side, side, outcome.projected_state, check=False)).log_negativity
