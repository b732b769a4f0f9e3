import csv
import io
import math

import numpy as np
import pytest

from netlocal.experiments import (
    DENSE_GRID_POINTS,
    EJM_HEADER,
    GRID_HEADER,
    SWEEP_HEADER,
    BracketError,
    SweepRecord,
    critical_visibility,
    dense_grid,
    ejm_cardinality_triples,
    ejm_table_csv,
    grid_csv,
    grid_sweep,
    point_seed,
    record_rmse,
    slope_fit,
    sweep_csv,
    visibility_sweep,
)
from netlocal.network import NetworkTopology
from netlocal.optimizer import SolverSettings
from netlocal.targets import FamilyDomainError, bilocal_ij, bilocal_xy, ghz, w_dist

TRIANGLE = NetworkTopology.triangle()
BILOCAL = NetworkTopology.bilocal()


def rec(v, rmse, success=False):
    return SweepRecord((v,), (2, 2, 2), rmse, rmse * rmse * 8, success, 0)


def test_visibility_sweep_low_ghz_succeeds():
    recs = visibility_sweep("ghz", [0.1, 0.2, 0.3], TRIANGLE, (3, 3, 3), SolverSettings(restarts=10))
    assert [r.v for r in recs] == [0.1, 0.2, 0.3]
    assert all(r.success for r in recs)
    for r in recs:
        assert r.best_rmse == math.sqrt(r.best_cost / 8)
        assert abs(record_rmse(r, ghz(r.v)) - r.best_rmse) <= 1e-12


def test_w_at_zero_visibility_is_trivial():
    (r,) = visibility_sweep("w", [0.0], TRIANGLE, (2, 2, 2), SolverSettings(restarts=2))
    assert r.success


def test_sweep_rejects_out_of_range_visibility():
    with pytest.raises(ValueError):
        visibility_sweep("ghz", [1.2], TRIANGLE, (2, 2, 2))
    with pytest.raises(ValueError):
        visibility_sweep("nope", [0.2], TRIANGLE, (2, 2, 2))


def test_sweep_deterministic_and_order_preserving():
    vs = [0.5, 0.1, 0.3]
    s = SolverSettings(restarts=3, master_seed=7)
    a = visibility_sweep(w_dist, vs, TRIANGLE, (2, 2, 2), s)
    b = visibility_sweep(w_dist, vs, TRIANGLE, (2, 2, 2), SolverSettings(restarts=3, master_seed=7, workers=2))
    assert [r.v for r in b] == vs
    assert sweep_csv(a, wall=False) == sweep_csv(b, wall=False)
    assert [r.seed for r in a] == [point_seed(7, i) for i in range(3)]


def test_grid_examples():
    s = SolverSettings(restarts=10, master_seed=1)
    recs = grid_sweep("bilocal-ij", [0.0, 0.8], [0.0, 0.8], BILOCAL, (4, 4), s)
    assert [r.params for r in recs] == [(0.0, 0.0), (0.0, 0.8), (0.8, 0.0), (0.8, 0.8)]
    assert recs[0].success and not recs[3].success
    (xy,) = grid_sweep("bilocal-xy", [0.7], [0.7], BILOCAL, (4, 4), s)
    assert not xy.success
    for r in recs:
        if r.success:
            assert abs(record_rmse(r, bilocal_ij(*r.params)) - r.best_rmse) <= 1e-12


def test_grid_records_skipped_points():
    def family(x, y):
        if x + y > 1:
            raise FamilyDomainError("outside")
        return bilocal_xy(x, y)

    recs = grid_sweep(family, [0.0, 0.9], [0.0, 0.9], BILOCAL, (2, 2), SolverSettings(restarts=1))
    assert len(recs) == 4
    assert [r.skipped for r in recs] == [False, False, False, True]
    assert math.isnan(recs[3].best_rmse) and not recs[3].success
    rows = list(csv.reader(io.StringIO(grid_csv(recs))))
    assert rows[0] == GRID_HEADER and rows[4][5] == "1" and rows[4][2] == "nan"


def test_dense_grid_preset():
    g = dense_grid()
    assert g[0] == -1 and g[-1] == 1 and len(g) == DENSE_GRID_POINTS
    assert len(g) ** 2 / 4 == pytest.approx(420, rel=0.01)


def test_critical_visibility_bracket_errors():
    s = SolverSettings(restarts=5)
    with pytest.raises(BracketError, match="lower"):
        critical_visibility("ghz", TRIANGLE, (2, 2, 2), 1e-6, 0.3, 0.4, 0.01, s)
    with pytest.raises(BracketError, match="upper"):
        critical_visibility("ghz", TRIANGLE, (2, 2, 2), 1e-6, 0.0, 0.2, 0.01, s)
    with pytest.raises(BracketError):
        critical_visibility("ghz", TRIANGLE, (2, 2, 2), 1e-6, 0.3, 0.3, 0.01, s)


@pytest.mark.slow
def test_critical_visibility_symmetric_under_card_permutation():
    s = SolverSettings(restarts=25, master_seed=2)
    values = [critical_visibility("ghz", TRIANGLE, cards, 1e-6, 0.3, 0.37, 0.01, s)
              for cards in [(3, 2, 2), (2, 3, 2), (2, 2, 3)]]
    assert max(values) - min(values) <= 0.01 + 1e-12
    assert all(abs(v - 1 / 3) <= 0.01 for v in values)


def test_ejm_triples():
    assert ejm_cardinality_triples(3) == [(2, 2, 2), (3, 2, 2), (3, 3, 2), (3, 3, 3)]
    triples = ejm_cardinality_triples(3, c_min=1)
    assert len(triples) == 10 and len(set(triples)) == 10
    assert all(a >= b >= c for a, b, c in triples)
    with pytest.raises(ValueError):
        ejm_cardinality_triples(1)


def test_slope_fit_line_and_constant():
    recs = [rec(v, 0.2 * v - 0.05) for v in (0.4, 0.45, 0.5, 0.55)]
    slope, intercept, r2 = slope_fit(recs, 0.4, 0.55)
    assert slope == pytest.approx(0.2) and intercept == pytest.approx(-0.05) and r2 == pytest.approx(1)
    slope, intercept, r2 = slope_fit([rec(v, 0.01) for v in (0.1, 0.2, 0.3)], 0, 1)
    assert slope == 0 and intercept == pytest.approx(0.01)


def test_slope_fit_needs_three_failures_in_range():
    recs = [rec(0.1, 0.0, True), rec(0.2, 0.01), rec(0.3, 0.02), rec(0.9, 0.1)]
    with pytest.raises(ValueError):
        slope_fit(recs, 0.0, 0.5)
    assert slope_fit(recs, 0.0, 1.0)[0] > 0


def test_csv_formats(tmp_path):
    recs = [SweepRecord((0.1,), (2, 2, 2), 1 / 3, 0.5, True, 42, 3, 12.5)]
    text = sweep_csv(recs, tmp_path / "s.csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == SWEEP_HEADER
    assert rows[1] == ["0.10000000000000001", "0.33333333333333331", "0.50000000000000000", "1", "3", "42",
                       "12.500000000000000"]
    assert (tmp_path / "s.csv").read_text() == text
    table = ejm_table_csv([{"c_alpha": 3, "c_beta": 2, "c_gamma": 2, "v_critical": 0.25, "threshold": 1e-4,
                            "v_tol": 0.01}])
    rows = list(csv.reader(io.StringIO(table)))
    assert rows[0] == EJM_HEADER and rows[1][:3] == ["3", "2", "2"]
    assert float(rows[1][4]) == 1e-4
