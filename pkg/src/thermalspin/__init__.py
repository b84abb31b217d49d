"""Entanglement generated by truncated thermal states at a beam splitter."""

__version__ = "0.1.0"

from .distill import DistillOutcome, distill_verdict, project_extremal, top_level
from .entanglement import NegativityReport, log_negativity, partial_transpose
from .errors import ConsistencyError
from .evolve import apply_splitter_dense, apply_splitter_diagonal
from .fock_core import (
    CoefficientTable,
    FockPair,
    SplitterParams,
    coefficient_table,
    dense_unitary,
    log_factorial,
    splitter_coefficient,
)
from .linalg import symmetric_eigenvalues
from .states import (
    SpinDim,
    ThermalSpec,
    TwoModeDensity,
    maximally_mixed,
    product_input,
    reduced_state,
    thermal_diagonal,
    von_neumann_entropy,
)

__all__ = [
    "CoefficientTable",
    "ConsistencyError",
    "DistillOutcome",
    "FockPair",
    "NegativityReport",
    "SpinDim",
    "SplitterParams",
    "ThermalSpec",
    "TwoModeDensity",
    "apply_splitter_dense",
    "apply_splitter_diagonal",
    "coefficient_table",
    "dense_unitary",
    "distill_verdict",
    "log_factorial",
    "log_negativity",
    "maximally_mixed",
    "partial_transpose",
    "product_input",
    "project_extremal",
    "reduced_state",
    "splitter_coefficient",
    "symmetric_eigenvalues",
    "thermal_diagonal",
    "top_level",
    "von_neumann_entropy",
]
