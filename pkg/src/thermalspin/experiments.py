"""Parameter sweeps over spin, reflectivity and port configuration.

Every grid point is evaluated independently by :func:`evaluate_point`; sweeps
map it over the grid (optionally in worker processes) and keep results in
deterministic key order.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, is_dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .distill import project_extremal, top_level
from .entanglement import log_negativity
from .errors import ConsistencyError
from .evolve import apply_splitter_diagonal, block_eigenvalues, off_block_weight
from .fock_core import SplitterParams
from .states import (
    PSD_TOL,
    SpinDim,
    ThermalSpec,
    product_input,
    reduced_state,
    thermal_diagonal,
    von_neumann_entropy,
)

log = logging.getLogger(__name__)

ENTROPY_SLACK = 1e-9
CONSERVATION_TOL = 1e-8
FIG3_TEMPERATURES = (0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class SweepRecord:
    two_s: int
    r2: float
    x_a: float
    x_b: float
    log_negativity: float
    trace_norm: float
    entropy_in_total: float
    entropy_out_a: float
    entropy_out_b: float
    distill_npt: bool
    success_probability: float

    def __post_init__(self) -> None:
        if self.entropy_out_a + self.entropy_out_b < self.entropy_in_total - ENTROPY_SLACK:
            raise ConsistencyError(
                f"marginal entropies {self.entropy_out_a:.12g} + {self.entropy_out_b:.12g} "
                f"fall below input entropy {self.entropy_in_total:.12g} "
                f"(2S={self.two_s}, r2={self.r2}, x=({self.x_a}, {self.x_b}))"
            )


@dataclass(frozen=True)
class SweepSpec:
    """Grid definition.

    Temperature configurations are ``(x_a, x_b)`` pairs: with ``vacuum_b`` port B
    is the ground state (``x_b = 0``); otherwise ``x_b=None`` ties port B to
    port A and an explicit ``x_b`` tuple forms the product with ``x_a``.
    """

    spins: tuple[int, ...]
    r2_grid: tuple[float, ...]
    x_a: tuple[float, ...] = (1.0,)
    x_b: Optional[tuple[float, ...]] = None
    vacuum_b: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "spins", tuple(int(s) for s in self.spins))
        object.__setattr__(self, "r2_grid", tuple(float(r) for r in self.r2_grid))
        object.__setattr__(self, "x_a", tuple(float(x) for x in self.x_a))
        if self.x_b is not None:
            object.__setattr__(self, "x_b", tuple(float(x) for x in self.x_b))
        if not self.spins or not self.r2_grid or not self.x_a or self.x_b == ():
            raise ValueError("sweep grids must be non-empty")
        if any(s < 0 for s in self.spins):
            raise ValueError("2S values must be >= 0")
        if any(not 0.0 <= r <= 1.0 for r in self.r2_grid):
            raise ValueError("reflectivities must lie in [0, 1]")
        if any(not 0.0 <= x <= 1.0 for x in self.x_a + (self.x_b or ())):
            raise ValueError("Boltzmann ratios must lie in [0, 1]")

    def configs(self) -> list[tuple[float, float]]:
        if self.vacuum_b:
            pairs = [(x, 0.0) for x in self.x_a]
        elif self.x_b is None:
            pairs = [(x, x) for x in self.x_a]
        else:
            pairs = [(xa, xb) for xa in self.x_a for xb in self.x_b]
        return sorted(set(pairs))

    def points(self) -> list[tuple[int, float, float, float]]:
        """Grid points ``(2S, r2, x_a, x_b)`` in deterministic order."""
        return [
            (s, r2, xa, xb)
            for s in sorted(set(self.spins))
            for xa, xb in self.configs()
            for r2 in sorted(set(self.r2_grid))
        ]


def evaluate_point(two_s: int, r2: float, x_a: float, x_b: float) -> SweepRecord:
    """Evolve a thermal product input and collect every diagnostic.

    Raises:
        ConsistencyError: if the output breaks trace, positivity, block
            structure or entropy conservation.
    """
    spin = SpinDim(two_s)
    a = thermal_diagonal(ThermalSpec(spin, x_a))
    b = thermal_diagonal(ThermalSpec(spin, x_b))
    rho = apply_splitter_diagonal(product_input(a, b), SplitterParams(r2))

    if off_block_weight(rho) != 0.0:
        raise ConsistencyError("output couples different total photon numbers")
    spectrum = block_eigenvalues(rho)
    if spectrum[0] < -PSD_TOL:
        raise ConsistencyError(f"output not positive semidefinite (min eigenvalue {spectrum[0]:.3e})")
    s_a, s_b = von_neumann_entropy(a), von_neumann_entropy(b)
    s_out = von_neumann_entropy(np.clip(spectrum, 0.0, None))
    if abs(s_out - (s_a + s_b)) > CONSERVATION_TOL:
        raise ConsistencyError(
            f"global entropy not conserved: in {s_a + s_b:.12g}, out {s_out:.12g}"
        )

    report = log_negativity(rho)
    outcome = project_extremal(rho, spin, top_level(spin, x_a, x_b))
    return SweepRecord(
        two_s=two_s,
        r2=r2,
        x_a=x_a,
        x_b=x_b,
        log_negativity=report.log_negativity,
        trace_norm=report.trace_norm,
        entropy_in_total=s_a + s_b,
        entropy_out_a=von_neumann_entropy(reduced_state(rho, "A")),
        entropy_out_b=von_neumann_entropy(reduced_state(rho, "B")),
        distill_npt=outcome.is_npt,
        success_probability=outcome.success_probability,
    )


def _evaluate(point: tuple[int, float, float, float]) -> SweepRecord:
    return evaluate_point(*point)


def default_workers() -> int:
    return os.cpu_count() or 1


def run_points(points: Sequence[tuple[int, float, float, float]], workers: Optional[int] = None) -> list[SweepRecord]:
    """Evaluate points in the given order; results do not depend on ``workers``."""
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise ValueError("workers must be >= 1")
    log.debug("evaluating %d points on %d worker(s)", len(points), workers)
    if workers == 1 or len(points) < 2:
        return [_evaluate(p) for p in points]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate, points, chunksize=max(1, len(points) // (4 * workers))))


def sweep_over_spin(spec: SweepSpec, workers: Optional[int] = None) -> list[SweepRecord]:
    """Records ordered by ``(2S, x_a, x_b)`` at the single reflectivity of ``spec``."""
    if len(set(spec.r2_grid)) != 1:
        raise ValueError("sweep_over_spin needs exactly one reflectivity")
    return run_points(spec.points(), workers)


@dataclass(frozen=True)
class ReflectivityPeaks:
    """Interior maxima of ``E_N(r2)`` for one spin and temperature configuration."""

    two_s: int
    x_a: float
    x_b: float
    n_maxima: int
    maxima_r2: tuple[float, ...]
    maxima_value: tuple[float, ...]
    tie: bool
    argmax_r2: float
    max_value: float


def interior_maxima(
    xs: Sequence[float], ys: Sequence[float], tie_tol: float = 1e-12
) -> tuple[list[tuple[float, float]], bool]:
    """Local maxima strictly above both neighbours; grid ends never count.

    A plateau (consecutive values within ``tie_tol``) standing above both
    flanks counts once, at its smallest ``x``, and sets the tie flag.
    """
    found, tie = [], False
    i, n = 1, len(ys)
    while i < n - 1:
        j = i
        while j + 1 < n and abs(ys[j + 1] - ys[i]) <= tie_tol:
            j += 1
        if j < n - 1 and ys[i] > ys[i - 1] + tie_tol and ys[j] > ys[j + 1] + tie_tol:
            found.append((xs[i], ys[i]))
            tie = tie or j > i
        i = j + 1
    return found, tie


def reflectivity_peaks(records: Iterable[SweepRecord]) -> list[ReflectivityPeaks]:
    groups: dict[tuple[int, float, float], list[SweepRecord]] = {}
    for rec in records:
        groups.setdefault((rec.two_s, rec.x_a, rec.x_b), []).append(rec)
    peaks = []
    for key in sorted(groups):
        rows = sorted(groups[key], key=lambda r: r.r2)
        xs = [r.r2 for r in rows]
        ys = [r.log_negativity for r in rows]
        found, tie = interior_maxima(xs, ys)
        # near-ties (mirror-image points) resolve toward the smaller r2
        best = next(i for i, y in enumerate(ys) if y >= max(ys) - 1e-12)
        peaks.append(
            ReflectivityPeaks(
                *key,
                n_maxima=len(found),
                maxima_r2=tuple(x for x, _ in found),
                maxima_value=tuple(y for _, y in found),
                tie=tie,
                argmax_r2=xs[best],
                max_value=ys[best],
            )
        )
    return peaks


def sweep_over_reflectivity(
    spec: SweepSpec, workers: Optional[int] = None
) -> tuple[list[SweepRecord], list[ReflectivityPeaks]]:
    """Records over the ``2S x r2`` grid plus per-spin maxima diagnostics."""
    records = run_points(spec.points(), workers)
    return records, reflectivity_peaks(records)


def r2_grid(step: float = 0.01) -> tuple[float, ...]:
    """Inclusive grid on [0, 1]; values rounded so they print cleanly."""
    count = int(round(1.0 / step))
    if not math.isclose(count * step, 1.0):
        raise ValueError(f"step {step} does not divide [0, 1]")
    return tuple(round(k * step, 12) for k in range(count + 1))


@dataclass(frozen=True)
class PortComparison:
    two_s: int
    x: float
    r2: float
    log_negativity_vacuum: float
    log_negativity_both: float
    difference: float


def compare_port_configs(
    spins: Sequence[int], x: Sequence[float], r2: float, workers: Optional[int] = None
) -> list[PortComparison]:
    """Thermal-vs-vacuum against thermal-vs-thermal at matching temperatures."""
    vac = sweep_over_spin(SweepSpec(tuple(spins), (r2,), tuple(x), vacuum_b=True), workers)
    both = sweep_over_spin(SweepSpec(tuple(spins), (r2,), tuple(x)), workers)
    return [
        PortComparison(v.two_s, v.x_a, r2, v.log_negativity, t.log_negativity, v.log_negativity - t.log_negativity)
        for v, t in zip(vac, both)
    ]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return f"{value + 0.0:.12g}"
    if isinstance(value, tuple):
        return ";".join(_fmt(v) for v in value)
    return str(value)


def json_safe(value):
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, float):
        return float(f"{value + 0.0:.12g}")
    if isinstance(value, (tuple, list)):
        return [json_safe(v) for v in value]
    return value


def _rows(records: Sequence) -> tuple[list[str], list[dict]]:
    first = records[0]
    if not is_dataclass(first):
        raise TypeError("records must be dataclass instances")
    names = [f.name for f in fields(first)]
    rows = []
    for rec in records:
        if type(rec) is not type(first):
            raise TypeError("records must share one type")
        rows.append({name: getattr(rec, name) for name in names})
    return names, rows


def render(records: Sequence, fmt: str = "csv") -> str:
    """Serialize records; CSV header follows the dataclass field order."""
    if not records:
        raise ValueError("no records to emit")
    names, rows = _rows(records)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(names)
        for row in rows:
            writer.writerow([_fmt(row[n]) for n in names])
        return buf.getvalue()
    if fmt == "json":
        data = [{n: json_safe(row[n]) for n in names} for row in rows]
        return json.dumps(data, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}; expected csv or json")


class EmitError(OSError):
    pass


def emit(records: Sequence, fmt: str = "csv", destination=None) -> str:
    """Write records as CSV or JSON (12 significant digits).

    ``destination`` may be a path, an open text stream, or None (return only).
    Nothing is created when ``records`` is empty.

    Raises:
        ValueError: on empty records or an unknown format.
        EmitError: if the destination cannot be written.
    """
    text = render(records, fmt)
    if destination is None:
        return text
    if hasattr(destination, "write"):
        destination.write(text)
        return text
    path = Path(destination)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise EmitError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return text


def _write(outdir: Path, name: str, records: Sequence, fmt: str) -> Path:
    path = outdir / f"{name}.{fmt}"
    emit(records, fmt, path)
    return path


def fig1(outdir, max_two_s: int = 24, workers: Optional[int] = None, fmt: str = "csv") -> list[Path]:
    """Maximally mixed inputs on both ports, balanced splitter, ``2S = 1..max``."""
    outdir = Path(outdir)
    spec = SweepSpec(tuple(range(1, max_two_s + 1)), (0.5,), (1.0,))
    return [_write(outdir, "fig1_mixed", sweep_over_spin(spec, workers), fmt)]


def fig2(
    outdir, max_two_s: int = 12, step: float = 0.01, workers: Optional[int] = None, fmt: str = "csv"
) -> list[Path]:
    """Maximally mixed inputs over the ``2S x r2`` grid, with maxima per spin."""
    outdir = Path(outdir)
    spec = SweepSpec(tuple(range(1, max_two_s + 1)), r2_grid(step), (1.0,))
    records, peaks = sweep_over_reflectivity(spec, workers)
    return [_write(outdir, "fig2_grid", records, fmt), _write(outdir, "fig2_maxima", peaks, fmt)]


def fig3(
    outdir,
    max_two_s: int = 24,
    temperatures: Sequence[float] = FIG3_TEMPERATURES,
    workers: Optional[int] = None,
    fmt: str = "csv",
) -> list[Path]:
    """Thermal inputs at several temperatures, with and without a vacuum port."""
    outdir = Path(outdir)
    spins = tuple(range(1, max_two_s + 1))
    vac = sweep_over_spin(SweepSpec(spins, (0.5,), tuple(temperatures), vacuum_b=True), workers)
    both = sweep_over_spin(SweepSpec(spins, (0.5,), tuple(temperatures)), workers)
    return [_write(outdir, "fig3_vacuum", vac, fmt), _write(outdir, "fig3_thermal", both, fmt)]
