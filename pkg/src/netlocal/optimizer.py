"""Least-squares fitting of finite local models to a target behaviour.

The cost is the sum of squared differences between the model's behaviour
and the target. Every simplex block (a source distribution, or a response
function for one input and one hidden-value tuple) stays feasible at every
iterate.

``solve_single`` is a projected Levenberg-Marquardt method. In each block
the largest entry is treated as the dependent coordinate, so the remaining
coordinates are only bound-constrained locally; coordinates sitting on
their bound with an outward gradient get a scaled gradient step, the rest
a damped Gauss-Newton step (two-metric projection). Steps are shortened so
that no source probability covers more than ``source_step_fraction`` of its
distance to zero in one iteration; response entries may hit their bounds
directly.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .network import (
    STRUCTURE_TOL,
    Behaviour,
    LocalModel,
    NetworkTopology,
    ParameterLayout,
    StructureError,
    dumps,
)


@dataclass(frozen=True)
class SolverSettings:
    restarts: int = 50
    max_iterations: int = 2000
    gtol: float = 1e-10
    threshold: float = 1e-6
    master_seed: int = 0
    feasibility_tol: float = STRUCTURE_TOL
    #: relative cost decrease over ``stall_window`` iterations below which a restart stops
    ftol: float = 1e-9
    stall_window: int = 25
    #: stop the batch at the first restart that reaches ``threshold``
    stop_on_success: bool = False
    workers: int = 1
    #: largest fraction of the distance to the boundary a source coordinate may cover per step
    source_step_fraction: float = 0.05

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if not 0 < self.source_step_fraction <= 1:
            raise ValueError("source_step_fraction must lie in (0, 1]")
        for name in ("gtol", "threshold", "feasibility_tol", "ftol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class RestartRecord:
    index: int
    seed: int
    cost: float
    iterations: int
    reason: str


@dataclass(frozen=True, eq=False)
class FitResult:
    best_model: LocalModel
    best_cost: float
    best_rmse: float
    per_restart: list = field(default_factory=list)
    success: bool = False
    best_index: int = 0

    def to_dict(self) -> dict:
        return {
            "success": bool(self.success),
            "best_rmse": float(self.best_rmse),
            "best_cost": float(self.best_cost),
            "model": self.best_model.to_dict(),
            "restarts": [
                {"seed": int(r.seed), "cost": float(r.cost), "iterations": int(r.iterations),
                 "reason": r.reason}
                for r in self.per_restart
            ],
        }

    def to_json(self, indent=1) -> str:
        return dumps(self.to_dict(), indent=indent)


def rmse_of(cost: float, n_entries: int) -> float:
    if cost < 0:
        raise ValueError("cost must be non-negative")
    if n_entries < 1:
        raise ValueError("n_entries must be >= 1")
    return math.sqrt(cost / n_entries)


# --------------------------------------------------------------------------
# cost and gradient in stored coordinates
# --------------------------------------------------------------------------

def _target_vector(layout: ParameterLayout, target: Behaviour) -> np.ndarray:
    shape = layout.contraction.behaviour_shape
    if target.data.shape != shape:
        raise StructureError(f"target shape {target.data.shape} does not match topology {shape}")
    return target.data.ravel()


def _full_from_vector(vector, layout, tol=STRUCTURE_TOL):
    layout.check_feasible(vector, tol)
    return layout.to_full(np.asarray(vector, dtype=float))


def cost(vector, layout: ParameterLayout, target: Behaviour) -> float:
    """Sum of squared errors between the model's behaviour and ``target``."""
    t = _target_vector(layout, target)
    full = _full_from_vector(vector, layout)
    c = layout.contraction
    r = c.behaviour(c.split(full)).ravel() - t
    return float(r @ r)


def _stored_gradient(layout, full_grad):
    out = np.empty(layout.n_stored)
    for _, fidx, sidx in layout.groups:
        out[sidx] = full_grad[fidx[:, :-1]] - full_grad[fidx[:, -1:]]
    return out


def cost_gradient(vector, layout: ParameterLayout, target: Behaviour) -> np.ndarray:
    """Exact gradient of :func:`cost` w.r.t. the stored coordinates.

    The dropped last coordinate of a block equals one minus the others, so
    each stored coordinate also picks up minus the last entry's derivative.
    """
    t = _target_vector(layout, target)
    full = _full_from_vector(vector, layout)
    c = layout.contraction
    arrays = c.split(full)
    r = c.behaviour(arrays).ravel() - t
    return _stored_gradient(layout, 2.0 * c.vjp(arrays, r))


# --------------------------------------------------------------------------
# projections
# --------------------------------------------------------------------------

def project_simplex_rows(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of every row onto ``{p >= 0, sum(p) = 1}``."""
    v = np.atleast_2d(v)
    n = v.shape[1]
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    k = np.arange(1, n + 1)
    cond = u - css / k > 0
    rho = n - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(len(v)), rho] / (rho + 1)
    return np.maximum(v - theta[:, None], 0.0)


def _project_corner_rows(y: np.ndarray) -> np.ndarray:
    """Projection of every row onto ``{y >= 0, sum(y) <= 1}``."""
    clipped = np.maximum(y, 0.0)
    over = clipped.sum(axis=1) > 1.0
    if over.any():
        clipped[over] = project_simplex_rows(y[over])
    return clipped


def project_feasible(vector, layout: ParameterLayout) -> np.ndarray:
    """Nearest feasible stored vector, block by block."""
    vector = np.asarray(vector, dtype=float)
    out = vector.copy()
    for _, _, sidx in layout.groups:
        if sidx.shape[1]:
            out[sidx] = _project_corner_rows(vector[sidx])
    return out


def projected_gradient_norm(vector, grad, layout: ParameterLayout) -> float:
    step = vector - project_feasible(vector - grad, layout)
    return float(np.max(np.abs(step))) if step.size else 0.0


# --------------------------------------------------------------------------
# single local solve
# --------------------------------------------------------------------------

_TINY = np.finfo(float).tiny


@dataclass(frozen=True, eq=False)
class SingleResult:
    vector: np.ndarray
    cost: float
    iterations: int
    reason: str
    history: list = field(default_factory=list, repr=False)


class _Problem:
    def __init__(self, layout: ParameterLayout, target: Behaviour):
        self.layout = layout
        self.c = layout.contraction
        self.t = _target_vector(layout, target)
        self.groups = [(f, s) for _, f, s in layout.groups if f.shape[1] > 1]
        self.n_source = int(self.c.offsets[layout.topology.source_count])

    def residual(self, full):
        return self.c.behaviour(self.c.split(full)).ravel() - self.t

    def jacobian(self, full):
        return self.c.jacobian(self.c.split(full))

    def reduced(self, full, jac):
        """Pivot-eliminated coordinates, their Jacobian and bookkeeping."""
        zs, jcols, free_pos, piv_pos = [], [], [], []
        for fidx, _ in self.groups:
            nb, L = fidx.shape
            vals = full[fidx]
            piv = np.argmax(vals, axis=1)
            mask = np.ones((nb, L), dtype=bool)
            mask[np.arange(nb), piv] = False
            pos = fidx[mask].reshape(nb, L - 1)
            ppos = fidx[np.arange(nb), piv]
            jcols.append((jac[:, pos] - jac[:, ppos][:, :, None]).reshape(jac.shape[0], -1))
            zs.append(full[pos].ravel())
            free_pos.append(pos.ravel())
            piv_pos.append(np.repeat(ppos, L - 1))
        return (np.concatenate(zs), np.concatenate(jcols, axis=1),
                np.concatenate(free_pos), np.concatenate(piv_pos))

    def stationarity(self, full, jac, r):
        grad = 2.0 * (jac.T @ r)
        vector = self.layout.to_stored(full)
        return projected_gradient_norm(vector, _stored_gradient(self.layout, grad), self.layout)

    def repair(self, full):
        """Renormalize blocks whose dependent entry went negative."""
        for fidx, _ in self.groups:
            vals = full[fidx]
            bad = (vals.min(axis=1) < 0) | (np.abs(vals.sum(axis=1) - 1.0) > 1e-13)
            if bad.any():
                full[fidx[bad]] = project_simplex_rows(vals[bad])
        return full


def solve_single(start, layout: ParameterLayout, target: Behaviour,
                 settings: SolverSettings = SolverSettings(), record_history: bool = False) -> SingleResult:
    """Locally minimize the cost starting from a feasible stored vector.

    Stops when the projected gradient (unit step, max-norm) is at most
    ``settings.gtol``, when the cost stalls, when no damped step decreases
    the cost any more, or after ``settings.max_iterations`` iterations.
    Accepted iterates never increase the cost.
    """
    problem = _Problem(layout, target)
    full = problem.repair(_full_from_vector(start, layout, settings.feasibility_tol))
    r = problem.residual(full)
    f = float(r @ r)
    history = [f]
    if not np.isfinite(f):
        return SingleResult(layout.to_stored(full), f, 0, "numerical_failure", history)
    mu = None
    nu = 2.0
    reason = "max_iterations"
    it = 0
    window = [f]
    while it < settings.max_iterations:
        jac = problem.jacobian(full)
        if not np.all(np.isfinite(jac)):
            reason = "numerical_failure"
            break
        if f == 0.0 or problem.stationarity(full, jac, r) <= settings.gtol:
            reason = "gtol"
            break
        z, jr, free_pos, piv_pos = problem.reduced(full, jac)
        is_src = free_pos < problem.n_source
        g = jr.T @ r
        h = jr.T @ jr
        diag = np.diag(h).copy()
        eps = min(1e-6, float(np.max(np.abs(z - np.maximum(z - g, 0.0)))))
        active = (z <= eps) & (g > 0)
        free = ~active
        h_ff = h[np.ix_(free, free)]
        g_f = g[free]
        if mu is None:
            mu = 1e-3 * max(float(diag.max()), 1e-12)
        it += 1
        accepted = False
        while True:
            d = np.zeros_like(z)
            try:
                d[free] = -np.linalg.solve(h_ff + mu * np.eye(h_ff.shape[0]), g_f)
            except np.linalg.LinAlgError:
                # a zero diagonal entry means a zero Jacobian column, hence zero gradient
                scale = np.diag(h_ff) + mu
                d[free] = -np.divide(g_f, scale, out=np.zeros_like(g_f), where=scale > 0)
            d[active] = -g[active] / (diag[active] + mu)
            # sources approach their bounds geometrically; this keeps random
            # starts from collapsing a hidden variable onto fewer values early
            shrinking = free & is_src & (d < 0) & (z > eps)
            if shrinking.any():
                alpha = settings.source_step_fraction * float(np.min(z[shrinking] / -d[shrinking]))
                if alpha < 1:
                    d[free] *= alpha
            z_new = np.maximum(z + d, 0.0)
            step = z_new - z
            trial = full.copy()
            trial[free_pos] = z_new
            np.subtract.at(trial, piv_pos, step)
            trial = problem.repair(trial)
            r_new = problem.residual(trial)
            f_new = float(r_new @ r_new)
            if not np.isfinite(f_new):
                reason = "numerical_failure"
                break
            lin = r + jac @ (trial - full)
            predicted = f - float(lin @ lin)
            if f_new < f and predicted > 0:
                rho = (f - f_new) / predicted
                mu *= max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0) ** 3)
                nu = 2.0
                accepted = True
                break
            mu = max(mu, _TINY) * nu
            nu *= 2.0
            if mu > 1e20 * max(float(diag.max()), 1e-300) or not np.any(step):
                reason = "no_progress"
                break
        if not accepted:
            break
        full, r, f = trial, r_new, f_new
        if record_history:
            history.append(f)
        window.append(f)
        if len(window) > settings.stall_window:
            old = window.pop(0)
            if old - f <= settings.ftol * f:
                reason = "stalled"
                break
    return SingleResult(layout.to_stored(full), f, it, reason, history)


# --------------------------------------------------------------------------
# multi-start
# --------------------------------------------------------------------------

def restart_seed(master_seed: int, index: int) -> int:
    """64-bit seed of restart ``index``, independent of every other restart."""
    ss = np.random.SeedSequence(int(master_seed) % 2**64, spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def random_start(layout: ParameterLayout, rng: np.random.Generator) -> np.ndarray:
    """Uniform (flat Dirichlet) sample on every simplex block."""
    full = np.empty(layout.n_full)
    for _, fidx, _ in layout.groups:
        e = rng.standard_exponential(fidx.shape)
        full[fidx] = e / e.sum(axis=1, keepdims=True)
    return layout.to_stored(full)


def _run_restart(args):
    index, seed, layout_spec, target, settings = args
    layout = ParameterLayout.build(*layout_spec)
    start = random_start(layout, np.random.default_rng(seed))
    try:
        res = solve_single(start, layout, target, settings)
    except (FloatingPointError, np.linalg.LinAlgError):
        return index, seed, start, math.inf, 0, "numerical_failure"
    c = res.cost if np.isfinite(res.cost) else math.inf
    return index, seed, res.vector, c, res.iterations, res.reason


def fit(target: Behaviour, topology: NetworkTopology, cardinalities, settings: SolverSettings = SolverSettings()) -> FitResult:
    """Best of ``settings.restarts`` local solves from random feasible starts.

    Restart ``i`` draws its start from a stream seeded by
    :func:`restart_seed` ``(master_seed, i)``, so the result does not depend
    on ``settings.workers``. Equal costs resolve to the lowest restart index.
    With ``stop_on_success`` the batch ends at the first (lowest-index)
    restart that reaches the RMSE threshold.
    """
    cards = tuple(int(c) for c in cardinalities)
    layout = ParameterLayout.build(topology, cards)
    _target_vector(layout, target)
    n = target.size
    threshold_cost = settings.threshold ** 2 * n
    jobs = [(i, restart_seed(settings.master_seed, i), (topology, cards), target, settings)
            for i in range(settings.restarts)]
    results = []
    if settings.workers > 1:
        with ProcessPoolExecutor(max_workers=settings.workers) as pool:
            chunk = settings.workers if settings.stop_on_success else len(jobs)
            for lo in range(0, len(jobs), chunk):
                batch = list(pool.map(_run_restart, jobs[lo:lo + chunk]))
                results.extend(batch)
                if settings.stop_on_success and any(b[3] <= threshold_cost for b in batch):
                    break
    else:
        for job in jobs:
            results.append(_run_restart(job))
            if settings.stop_on_success and results[-1][3] <= threshold_cost:
                break
    if settings.stop_on_success:
        hits = [k for k, res in enumerate(results) if res[3] <= threshold_cost]
        if hits:
            results = results[:hits[0] + 1]
    best = 0
    for k, res in enumerate(results):
        if res[3] < results[best][3]:
            best = k
    records = [RestartRecord(i, s, c, it, why) for i, s, _, c, it, why in results]
    best_vec, best_cost = results[best][2], results[best][3]
    model = layout.model(layout.to_full(best_vec))
    rmse = rmse_of(best_cost, n) if np.isfinite(best_cost) else math.inf
    return FitResult(model, best_cost, rmse, records, rmse <= settings.threshold, results[best][0])


def with_settings(settings: SolverSettings, **changes) -> SolverSettings:
    return replace(settings, **changes)
