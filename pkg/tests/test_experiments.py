import csv
import io
import json
import math

import numpy as np
import pytest

from thermalspin.entanglement import log_negativity
from thermalspin.errors import ConsistencyError
from thermalspin.evolve import apply_splitter_dense
from thermalspin.experiments import (
    EmitError,
    PortComparison,
    SweepRecord,
    SweepSpec,
    compare_port_configs,
    emit,
    evaluate_point,
    fig1,
    fig2,
    fig3,
    interior_maxima,
    r2_grid,
    render,
    run_points,
    sweep_over_reflectivity,
    sweep_over_spin,
)
from thermalspin.fock_core import SplitterParams
from thermalspin.states import SpinDim, ThermalSpec, product_input, thermal_diagonal

FLAGSHIP = math.log2((3 + math.sqrt(2)) / 4)
FIELDS = [
    "two_s",
    "r2",
    "x_a",
    "x_b",
    "log_negativity",
    "trace_norm",
    "entropy_in_total",
    "entropy_out_a",
    "entropy_out_b",
    "distill_npt",
    "success_probability",
]


def test_flagship_record():
    (rec,) = sweep_over_spin(SweepSpec((1,), (0.5,), (1.0,)), workers=1)
    assert rec.log_negativity == pytest.approx(FLAGSHIP, abs=1e-12)
    assert rec.entropy_in_total == 2.0
    assert rec.entropy_out_a == pytest.approx(1.2987949406953985, abs=1e-12)
    assert rec.distill_npt
    assert rec.success_probability == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("x", [0.0, 0.5, 1.0])
def test_zero_spin_is_vacuum(x):
    (rec,) = sweep_over_spin(SweepSpec((0,), (0.3,), (x,)), workers=1)
    assert rec.log_negativity == 0.0
    assert rec.entropy_out_a == 0.0


def test_record_rejects_entropy_violation():
    with pytest.raises(ConsistencyError):
        SweepRecord(1, 0.5, 1.0, 1.0, 0.1, 1.1, 2.0, 0.5, 0.5, True, 0.5)


def test_spec_validation_and_ordering():
    with pytest.raises(ValueError):
        SweepSpec((), (0.5,))
    with pytest.raises(ValueError):
        SweepSpec((1,), (1.5,))
    with pytest.raises(ValueError):
        SweepSpec((1,), (0.5,), (2.0,))
    with pytest.raises(ValueError):
        sweep_over_spin(SweepSpec((1,), (0.2, 0.5)))
    spec = SweepSpec((3, 1), (0.5,), (1.0, 0.5), vacuum_b=True)
    assert spec.points() == [(1, 0.5, 0.5, 0.0), (1, 0.5, 1.0, 0.0), (3, 0.5, 0.5, 0.0), (3, 0.5, 1.0, 0.0)]
    assert SweepSpec((1,), (0.5,), (0.5,), (1.0, 0.25)).configs() == [(0.5, 0.25), (0.5, 1.0)]


def test_worker_count_does_not_change_results():
    points = SweepSpec((1, 2, 3), (0.3, 0.5), (0.5, 1.0)).points()
    assert run_points(points, workers=1) == run_points(points, workers=3)
    with pytest.raises(ValueError):
        run_points(points, workers=0)


def test_interior_maxima_rules():
    xs = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6]
    found, tie = interior_maxima(xs, [0, 1, 0, 2, 2, 1, 3])
    assert found == [(0.1, 1), (0.3, 2)]
    assert tie
    found, tie = interior_maxima(xs[:3], [3, 2, 1])
    assert found == [] and not tie
    assert interior_maxima([0, 1, 2], [1, 1, 1]) == ([], False)


def test_reflectivity_sweep_is_mirror_symmetric():
    grid = r2_grid(0.05)
    records, peaks = sweep_over_reflectivity(SweepSpec((1, 2), grid, (1.0,)), workers=1)
    for s in (1, 2):
        ys = [r.log_negativity for r in records if r.two_s == s]
        np.testing.assert_allclose(ys, ys[::-1], atol=1e-9)
    assert [p.two_s for p in peaks] == [1, 2]
    assert all(p.n_maxima == len(p.maxima_r2) for p in peaks)


def test_r2_grid():
    g = r2_grid(0.01)
    assert len(g) == 101 and g[0] == 0.0 and g[-1] == 1.0 and g[50] == 0.5
    with pytest.raises(ValueError):
        r2_grid(0.03)


def test_compare_port_configs():
    rows = compare_port_configs([1], [1.0], 0.5, workers=1)
    assert len(rows) == 1 and isinstance(rows[0], PortComparison)
    assert rows[0].log_negativity_vacuum > rows[0].log_negativity_both
    assert rows[0].difference == pytest.approx(rows[0].log_negativity_vacuum - rows[0].log_negativity_both)
    zero = compare_port_configs([1, 2], [0.0], 0.5, workers=1)
    assert all(r.log_negativity_vacuum == 0 and r.log_negativity_both == 0 for r in zero)


def test_temperature_ordering_at_two_s_two():
    rows = compare_port_configs([2], [0.5, 1.0], 0.5, workers=1)
    assert rows[1].log_negativity_vacuum >= rows[0].log_negativity_vacuum
    assert rows[1].log_negativity_both >= rows[0].log_negativity_both


def test_fast_path_matches_dense_oracle_on_records():
    for two_s, r2, xa, xb in [(1, 0.5, 1.0, 1.0), (3, 0.3, 0.5, 0.0), (4, 0.8, 0.75, 0.25)]:
        rec = evaluate_point(two_s, r2, xa, xb)
        spin = SpinDim(two_s)
        rho = product_input(thermal_diagonal(ThermalSpec(spin, xa)), thermal_diagonal(ThermalSpec(spin, xb)))
        dense = log_negativity(apply_splitter_dense(rho, SplitterParams(r2))).log_negativity
        assert rec.log_negativity == pytest.approx(dense, abs=1e-9)


def test_emit_csv_layout(tmp_path):
    recs = sweep_over_spin(SweepSpec((1,), (0.5,), (1.0,)), workers=1)
    path = tmp_path / "one.csv"
    text = emit(recs, "csv", path)
    assert path.read_text() == text
    lines = text.splitlines()
    assert len(lines) == 2
    assert lines[0].split(",") == FIELDS
    row = next(csv.DictReader(io.StringIO(text)))
    assert row["log_negativity"] == f"{FLAGSHIP:.12g}"
    assert row["distill_npt"] == "true"


def test_emit_json(tmp_path):
    recs = sweep_over_spin(SweepSpec((1, 2), (0.5,), (1.0,)), workers=1)
    data = json.loads(emit(recs, "json", tmp_path / "r.json"))
    assert [list(d) for d in data] == [FIELDS, FIELDS]
    assert data[0]["log_negativity"] == float(f"{FLAGSHIP:.12g}")


def test_emit_errors(tmp_path):
    target = tmp_path / "none.csv"
    with pytest.raises(ValueError):
        emit([], "csv", target)
    assert not target.exists()
    recs = sweep_over_spin(SweepSpec((1,), (0.5,), (1.0,)), workers=1)
    with pytest.raises(ValueError):
        render(recs, "xml")
    with pytest.raises(EmitError, match="missing"):
        emit(recs, "csv", tmp_path / "missing" / "x.csv")


def test_recipes_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir()
    b.mkdir()
    paths_a = fig1(a, max_two_s=4, workers=1) + fig2(a, max_two_s=3, step=0.05, workers=1)
    paths_a += fig3(a, max_two_s=3, workers=1)
    paths_b = fig1(b, max_two_s=4, workers=2) + fig2(b, max_two_s=3, step=0.05, workers=2)
    paths_b += fig3(b, max_two_s=3, workers=2)
    assert [p.name for p in paths_a] == [
        "fig1_mixed.csv",
        "fig2_grid.csv",
        "fig2_maxima.csv",
        "fig3_vacuum.csv",
        "fig3_thermal.csv",
    ]
    for pa, pb in zip(paths_a, paths_b):
        assert pa.read_bytes() == pb.read_bytes()
