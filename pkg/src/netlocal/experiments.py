"""Sweeps over target families, critical-visibility bisection and slope fits."""
from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence, Union

import numpy as np

from .network import Behaviour, LocalModel, NetworkTopology, evaluate_model
from .optimizer import SolverSettings, fit, restart_seed, rmse_of
from .targets import PLANE_FAMILIES, VISIBILITY_FAMILIES, FamilyDomainError, ejm

log = logging.getLogger(__name__)

Family = Union[str, Callable[[float], Behaviour]]
PlaneFamily = Union[str, Callable[[float, float], Behaviour]]


class BracketError(ValueError):
    """Raised when the success predicate does not change sign over the bracket."""


@dataclass(frozen=True, eq=False)
class SweepRecord:
    params: tuple
    cardinalities: tuple
    best_rmse: float
    best_cost: float
    success: bool
    seed: int
    restarts: int = 0
    wall_ms: float = 0.0
    skipped: bool = False
    model: LocalModel | None = field(default=None, repr=False)

    @property
    def v(self) -> float:
        return self.params[0]


def _resolve(family: Family):
    if callable(family):
        return family
    try:
        return VISIBILITY_FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown visibility family {family!r}") from None


def _resolve_plane(family: PlaneFamily):
    if callable(family):
        return family
    try:
        return PLANE_FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown two-parameter family {family!r}") from None


def point_seed(master_seed: int, index: int) -> int:
    """Master seed for the fit at sweep position ``index``."""
    return restart_seed(master_seed, index)


def _fit_point(args):
    params, build, topology, cards, settings = args
    start = time.perf_counter()
    try:
        target = build(*params)
    except FamilyDomainError:
        return SweepRecord(params, cards, math.nan, math.nan, False, settings.master_seed,
                           0, 0.0, skipped=True)
    res = fit(target, topology, cards, settings)
    wall = (time.perf_counter() - start) * 1e3
    return SweepRecord(params, cards, res.best_rmse, res.best_cost, res.success,
                       settings.master_seed, len(res.per_restart), wall, model=res.best_model)


def _run_points(points, build, topology, cards, settings):
    cards = tuple(int(c) for c in cards)
    jobs = []
    for i, params in enumerate(points):
        s = replace(settings, master_seed=point_seed(settings.master_seed, i),
                    workers=1 if settings.workers > 1 else settings.workers)
        jobs.append((tuple(params), build, topology, cards, s))
    if settings.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=settings.workers) as pool:
            return list(pool.map(_fit_point, jobs))
    return [_fit_point(job) for job in jobs]


def visibility_sweep(family: Family, v_values: Sequence[float], topology: NetworkTopology,
                     cardinalities, settings: SolverSettings = SolverSettings()) -> list[SweepRecord]:
    """One multi-start fit per visibility, returned in input order."""
    v_values = [float(v) for v in v_values]
    if any(not 0 <= v <= 1 for v in v_values):
        raise ValueError("visibilities must lie in [0, 1]")
    return _run_points([(v,) for v in v_values], _resolve(family), topology, cardinalities, settings)


def grid_sweep(family2d: PlaneFamily, x_values, y_values, topology: NetworkTopology,
               cardinalities, settings: SolverSettings = SolverSettings()) -> list[SweepRecord]:
    """One fit per grid point, x-major order; invalid family points come back skipped."""
    points = [(float(x), float(y)) for x in x_values for y in y_values]
    return _run_points(points, _resolve_plane(family2d), topology, cardinalities, settings)


#: points per axis giving about 420 points per unit area on [-1, 1]^2
DENSE_GRID_POINTS = int(round(math.sqrt(420 * 4)))


def dense_grid(n: int = DENSE_GRID_POINTS) -> np.ndarray:
    return np.linspace(-1.0, 1.0, n)


def critical_visibility(family: Family, topology: NetworkTopology, cardinalities,
                        rmse_threshold: float, v_lo: float = 0.0, v_hi: float = 1.0,
                        v_tol: float = 0.01, settings: SolverSettings = SolverSettings()) -> float:
    """Bisection for the largest visibility that still fits below ``rmse_threshold``.

    Every predicate evaluation is a full multi-start fit that stops at the
    first successful restart. Success is assumed monotone in ``v``.
    """
    build = _resolve(family)
    cards = tuple(int(c) for c in cardinalities)
    s = replace(settings, threshold=rmse_threshold, stop_on_success=True)

    def ok(v):
        res = fit(build(v), topology, cards, s)
        log.info("v=%.6f cards=%s rmse=%.3e success=%s", v, cards, res.best_rmse, res.success)
        return res.success

    if not v_lo < v_hi:
        raise BracketError(f"empty bracket [{v_lo}, {v_hi}]")
    if not ok(v_lo):
        raise BracketError(f"no model found at the lower end v={v_lo}")
    if ok(v_hi):
        raise BracketError(f"a model was found at the upper end v={v_hi}")
    while v_hi - v_lo > v_tol:
        mid = 0.5 * (v_lo + v_hi)
        if ok(mid):
            v_lo = mid
        else:
            v_hi = mid
    return 0.5 * (v_lo + v_hi)


def ejm_cardinality_triples(c_max: int, c_min: int = 2):
    """Triples with ``c_alpha >= c_beta >= c_gamma``, grouped by ``c_gamma``."""
    if c_max < 2 or c_min < 1 or c_min > c_max:
        raise ValueError("need 1 <= c_min <= c_max and c_max >= 2")
    return [(a, b, g) for g in range(c_min, c_max + 1)
            for b in range(g, c_max + 1) for a in range(b, c_max + 1)]


def ejm_cardinality_table(c_max: int, settings: SolverSettings = SolverSettings(), c_min: int = 2,
                          threshold: float = 1e-4, v_tol: float = 0.01,
                          v_lo: float = 0.0, v_hi: float = 1.0) -> list[dict]:
    """Critical EJM visibility for every ordered cardinality triple up to ``c_max``."""
    top = NetworkTopology.triangle(4)
    rows = []
    for cards in ejm_cardinality_triples(c_max, c_min):
        vc = critical_visibility(ejm, top, cards, threshold, v_lo, v_hi, v_tol, settings)
        rows.append({"c_alpha": cards[0], "c_beta": cards[1], "c_gamma": cards[2],
                     "v_critical": vc, "threshold": threshold, "v_tol": v_tol})
    return rows


def slope_fit(records: Sequence[SweepRecord], v_min: float, v_max: float):
    """Least-squares line ``rmse ~ slope * v + intercept`` over failed fits in ``[v_min, v_max]``.

    Returns ``(slope, intercept, r_squared)``.
    """
    pts = [(r.v, r.best_rmse) for r in records
           if not r.skipped and not r.success and v_min <= r.v <= v_max]
    if len(pts) < 3:
        raise ValueError(f"slope_fit needs at least 3 failed records in range, got {len(pts)}")
    v, e = np.array(pts).T
    slope, intercept = np.polyfit(v, e, 1)
    resid = e - (slope * v + intercept)
    ss_tot = float(np.sum((e - e.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(resid @ resid) / ss_tot
    if ss_tot == 0:
        slope, intercept = 0.0, float(e.mean())
    return float(slope), float(intercept), r2


def record_rmse(record: SweepRecord, target: Behaviour) -> float:
    """RMSE of a record's stored model against ``target``, recomputed from scratch."""
    diff = evaluate_model(record.model).data - target.data
    return rmse_of(float(np.sum(diff ** 2)), target.size)


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------

SWEEP_HEADER = ["v", "rmse", "cost", "success", "restarts", "seed", "wall_ms"]
GRID_HEADER = ["x", "y", "rmse", "cost", "success", "skipped", "seed", "wall_ms"]
EJM_HEADER = ["c_alpha", "c_beta", "c_gamma", "v_critical", "threshold", "v_tol"]


def _f(x) -> str:
    return format(float(x), "#.17g") if math.isfinite(x) else str(float(x))


def _write(header, rows, out=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    text = buf.getvalue()
    if out is not None:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    return text


def sweep_csv(records, out=None, wall=True) -> str:
    rows = [[_f(r.v), _f(r.best_rmse), _f(r.best_cost), int(r.success), r.restarts, r.seed,
             _f(r.wall_ms if wall else 0.0)] for r in records]
    return _write(SWEEP_HEADER, rows, out)


def grid_csv(records, out=None, wall=True) -> str:
    rows = [[_f(r.params[0]), _f(r.params[1]), _f(r.best_rmse), _f(r.best_cost), int(r.success),
             int(r.skipped), r.seed, _f(r.wall_ms if wall else 0.0)] for r in records]
    return _write(GRID_HEADER, rows, out)


def ejm_table_csv(rows, out=None) -> str:
    body = [[r["c_alpha"], r["c_beta"], r["c_gamma"], _f(r["v_critical"]), _f(r["threshold"]),
             _f(r["v_tol"])] for r in rows]
    return _write(EJM_HEADER, body, out)
