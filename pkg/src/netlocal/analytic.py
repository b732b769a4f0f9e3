"""Closed-form local models and the quartics behind the critical visibilities.

These are used as oracles for the numerical fitter. Triangle arrays follow
the package convention (hidden axes in increasing source index), so Bob's
matrices, usually written with ``gamma`` as rows and ``alpha`` as columns,
are stored transposed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .network import Behaviour, LocalModel, NetworkTopology, StructureError


class RootSelectionError(ValueError):
    """Raised when a root selection rule does not single out exactly one root."""


class ModelDomainError(ValueError):
    """Raised when an analytic model is requested outside its parameter range."""


# --------------------------------------------------------------------------
# root isolation
# --------------------------------------------------------------------------

def _horner(coeffs, x):
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def _derivative(coeffs):
    n = len(coeffs) - 1
    return [c * (n - i) for i, c in enumerate(coeffs[:-1])]


def _bisect(coeffs, lo, hi, tol):
    flo = _horner(coeffs, lo)
    if flo == 0:
        return lo
    if _horner(coeffs, hi) == 0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = _horner(coeffs, mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def real_roots(coeffs: Sequence[float], tol: float = 1e-14) -> list[float]:
    """Simple real roots of a polynomial (highest degree first), ascending.

    Roots of the derivative split the real line into monotone pieces; every
    piece with a sign change holds exactly one root, found by bisection.
    """
    coeffs = [float(c) for c in coeffs]
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    if len(coeffs) < 2:
        return []
    if len(coeffs) == 2:
        return [-coeffs[1] / coeffs[0]]
    bound = 1.0 + max(abs(c / coeffs[0]) for c in coeffs[1:])
    knots = [-bound] + [x for x in real_roots(_derivative(coeffs), tol) if -bound < x < bound] + [bound]
    roots = []
    for lo, hi in zip(knots, knots[1:]):
        flo, fhi = _horner(coeffs, lo), _horner(coeffs, hi)
        if flo == 0:
            if not roots or roots[-1] != lo:
                roots.append(lo)
        elif fhi != 0 and (flo < 0) != (fhi < 0):
            roots.append(_bisect(coeffs, lo, hi, tol))
    if _horner(coeffs, knots[-1]) == 0:
        roots.append(knots[-1])
    return roots


@dataclass(frozen=True)
class QuarticSpec:
    """A degree-4 polynomial and the rule that picks one of its real roots.

    ``rule`` is ``"largest"`` (largest real root) or ``"interval"`` (the
    unique root in ``interval``; ``[0, 1]`` by default).
    """

    coefficients: tuple[float, float, float, float, float]
    rule: str = "interval"
    interval: tuple[float, float] = (0.0, 1.0)
    name: str = ""

    def __post_init__(self):
        if len(self.coefficients) != 5:
            raise ValueError("a quartic needs exactly 5 coefficients")
        if self.coefficients[0] == 0:
            raise ValueError("leading coefficient must be non-zero")
        if self.rule not in ("largest", "interval"):
            raise ValueError(f"unknown selection rule {self.rule!r}")

    def __call__(self, x: float) -> float:
        return _horner(self.coefficients, x)


def poly_root(spec: QuarticSpec, tol: float = 1e-12) -> float:
    roots = real_roots(spec.coefficients, tol=min(tol, 1e-14))
    if spec.rule == "largest":
        if not roots:
            raise RootSelectionError(f"{spec.name or spec.coefficients}: no real root")
        return roots[-1]
    lo, hi = spec.interval
    inside = [x for x in roots if lo <= x <= hi]
    if len(inside) != 1:
        raise RootSelectionError(
            f"{spec.name or spec.coefficients}: {len(inside)} roots in [{lo}, {hi}]")
    # confirm the bracket on the original polynomial
    if spec(lo) * spec(hi) > 0 and spec(lo) != 0 and spec(hi) != 0:
        raise RootSelectionError(f"{spec.name}: endpoint signs do not differ on [{lo}, {hi}]")
    return inside[0]


GHZ_A = QuarticSpec((12.0, -8.0, 6.0, 0.0, -1.0), name="ghz source weight a")
GHZ_B = QuarticSpec((4.0, 0.0, 0.0, -8.0, 3.0), name="ghz source weight b")
GHZ_VC = QuarticSpec((3.0, 28.0, 66.0, -36.0, 3.0), rule="largest", name="ghz critical visibility")
W_VC = QuarticSpec((4.0, -30.0, 63.0, 108.0, -81.0), name="w critical visibility")


def ghz_critical_visibility() -> float:
    """Critical GHZ visibility for (3,3,3) models, from the source weight ``b``."""
    b = poly_root(GHZ_B)
    return 2 * b - 3 + 1 / b


def w_critical_visibility() -> float:
    return poly_root(W_VC)


CRITICAL_VISIBILITY = {
    ("ghz", (2, 2, 2)): 0.25,
    ("ghz", (3, 2, 2)): 1 / 3,
}


def known_critical_visibility(family: str, cardinalities: Sequence[int] = (3, 3, 3)) -> float:
    """Critical visibility of the analytic model for ``family`` at these cardinalities."""
    key = (family, tuple(sorted(cardinalities, reverse=True)))
    if key in CRITICAL_VISIBILITY:
        return CRITICAL_VISIBILITY[key]
    if family == "ghz":
        return ghz_critical_visibility()
    if family == "w":
        return w_critical_visibility()
    raise KeyError(f"no analytic critical visibility for {family!r}")


# --------------------------------------------------------------------------
# triangle models
# --------------------------------------------------------------------------

def _binary_response(p0: np.ndarray) -> np.ndarray:
    """Response array ``[output, input, ...]`` from the probability of output 0."""
    p0 = np.asarray(p0, dtype=float)
    return np.stack([p0, 1.0 - p0])[:, None]


def _triangle(sources, alice, bob_gamma_alpha, charlie):
    top = NetworkTopology.triangle(2)
    responses = [
        _binary_response(alice),
        _binary_response(np.asarray(bob_gamma_alpha, dtype=float).T),
        _binary_response(charlie),
    ]
    return LocalModel(top, sources, responses)


def ghz_model_222() -> LocalModel:
    """Uniform bits and a shared 'output 0 only on disagreement' rule; gives GHZ at v = 1/4."""
    half = [0.5, 0.5]
    resp = [[0.0, 0.5], [0.5, 1.0]]
    return _triangle([half] * 3, resp, resp, resp)


def ghz_model_322(v: float) -> LocalModel:
    if not 0 <= v <= 1 / 3:
        raise ModelDomainError(f"ghz_model_322 is valid for 0 <= v <= 1/3, got {v}")
    alpha = [v / 2, 1 - v, v / 2]
    half = [0.5, 0.5]
    alice = [[(1 - 3 * v) / (2 * (1 - v)), 0.5], [0.5, (1 + v) / (2 * (1 - v))]]
    bob = [[1, 0, 0], [1, 1, 0]]
    charlie = [[1, 1], [0, 1], [0, 0]]
    return _triangle([alpha, half, half], alice, bob, charlie)


def ghz_model_333_parameters() -> tuple[float, float, float]:
    """Source weights ``(a, b)`` and the visibility ``2b - 3 + 1/b`` they produce."""
    a = poly_root(GHZ_A)
    b = poly_root(GHZ_B)
    return a, b, 2 * b - 3 + 1 / b


def ghz_model_333() -> LocalModel:
    a, b, _ = ghz_model_333_parameters()
    src = [a, b, 1 - a - b]
    resp = np.array([[0, 1, 0], [1, 1, 0], [0, 0, 0]], dtype=float)
    return _triangle([src] * 3, resp, resp, resp)


def w_model(v: float) -> LocalModel:
    vc = w_critical_visibility()
    if not 0 <= v <= vc:
        raise ModelDomainError(f"w_model is valid for 0 <= v <= {vc:.6f}, got {v}")
    u = math.sqrt(3 * (1 - v) / (3 + v))
    edge = (3 + v) / 12 - (1 - v) / (4 * u)
    alpha = [edge, (1 - v) / 4 * (1 + 1 / u) ** 2, edge]
    bg = [u / (1 + u), 1 / (1 + u)]
    off = (3 + v) / 6 + u * v * (9 - v) / (18 * (1 - v))
    alice = [[0.5, off], [off, 3 * (1 - v) / (2 * (3 + v))]]
    bob = [[1, 0, 0], [1, 1, 0]]
    charlie = [[0, 0], [0, 1], [1, 1]]
    model = _triangle([alpha, bg, bg], alice, bob, charlie)
    if off > 1:
        # rounding at v = v_c only
        model = _triangle([alpha, bg, bg], np.minimum(alice, 1.0), bob, charlie)
    return model


def w_model_off_diagonal(v: float) -> float:
    """Alice's off-diagonal response entry in the W model (reaches 1 at the critical visibility)."""
    u = math.sqrt(3 * (1 - v) / (3 + v))
    return (3 + v) / 6 + u * v * (9 - v) / (18 * (1 - v))


# --------------------------------------------------------------------------
# bilocal models
# --------------------------------------------------------------------------

def bilocal_boundary_model(X: float) -> LocalModel:
    """Model for the bilocal XY-slice behaviour on the edge ``X + Y = 1``, ``X`` in [0, 1]."""
    if not 0 <= X <= 1:
        raise ModelDomainError(f"bilocal_boundary_model needs 0 <= X <= 1, got {X}")
    Y = 1 - X
    top = NetworkTopology.bilocal()
    lam = [0.75, 0.25]
    mu = [Y / 2, X / 2, Y / 2, X / 2]
    a0 = np.array([[1, 0], [1, 0]], dtype=float)                  # [x, lambda]
    b0 = np.array([
        [[0.5, 1, 0.5, 0], [0.5, 0, 0.5, 1]],                   # y = 0, [lambda, mu]
        [[1, 0.5, 0, 0.5], [0, 0.5, 1, 0.5]],                   # y = 1
    ])
    c0 = np.array([[1, 1, 0, 0], [0, 1, 1, 0]], dtype=float)      # [z, mu]
    responses = [np.stack([r, 1 - r]) for r in (a0, b0, c0)]
    return LocalModel(top, [lam, mu], responses)


def bilocal_edge_model(X: float, Y: float, tol: float = 1e-12) -> LocalModel:
    """Model for any point with ``|X| + |Y| = 1`` via output/input relabelling."""
    if abs(abs(X) + abs(Y) - 1) > tol:
        raise ModelDomainError(f"|X| + |Y| must equal 1, got {abs(X) + abs(Y)}")
    model = bilocal_boundary_model(min(abs(X), 1.0))
    flip, keep = [1, 0], [0, 1]
    outputs = [keep, flip if X < 0 else keep, keep]
    # flipping Bob's output negates both terms; flipping z then restores the Y term
    negate_y = (X < 0) != (Y < 0)
    inputs = [keep, keep, flip if negate_y else keep]
    return relabel_model(model, outputs, inputs)


# --------------------------------------------------------------------------
# relabelling and slopes
# --------------------------------------------------------------------------

def _check_perms(perms, sizes, what):
    if len(perms) != len(sizes):
        raise StructureError(f"{len(perms)} {what} permutations for {len(sizes)} parties")
    out = []
    for i, (p, n) in enumerate(zip(perms, sizes)):
        p = list(range(n)) if p is None else [int(j) for j in p]
        if sorted(p) != list(range(n)):
            raise StructureError(f"party {i}: {p} is not a permutation of range({n})")
        out.append(np.array(p))
    return out


def relabel(b: Behaviour, output_perms, input_perms=None) -> Behaviour:
    """Behaviour ``q(o | x) = p(sigma(o) | tau(x))`` for per-party permutations."""
    n = len(b.outputs)
    if input_perms is None:
        input_perms = [None] * n
    sig = _check_perms(output_perms, b.outputs, "output")
    tau = _check_perms(input_perms, b.inputs, "input")
    return Behaviour(b.outputs, b.inputs, b.data[np.ix_(*sig, *tau)])


def invert_permutation(perm) -> list[int]:
    inv = np.empty(len(perm), dtype=int)
    inv[np.asarray(perm)] = np.arange(len(perm))
    return inv.tolist()


def relabel_model(model: LocalModel, output_perms, input_perms=None) -> LocalModel:
    """Apply the same relabelling to a model's response functions."""
    top = model.topology
    if input_perms is None:
        input_perms = [None] * top.party_count
    sig = _check_perms(output_perms, top.outputs, "output")
    tau = _check_perms(input_perms, top.inputs, "input")
    responses = [r[sig[i]][:, tau[i]] for i, r in enumerate(model.responses)]
    return LocalModel(top, model.sources, responses)


def error_slope(p1: Behaviour, p0: Behaviour) -> float:
    """Slope of the RMSE beyond the critical visibility, ``sqrt(mean((p0 - p1)^2))``."""
    if p1.data.shape != p0.data.shape:
        raise StructureError(f"shape mismatch {p1.data.shape} vs {p0.data.shape}")
    return float(np.sqrt(np.mean((p0.data - p1.data) ** 2)))
