"""Target behaviour families: bilocal slices, GHZ, W and EJM with white noise."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .network import STRUCTURE_TOL, Behaviour, InputDataError, dumps


class FamilyDomainError(ValueError):
    """Raised when a family parameter gives an invalid distribution."""


_BILOCAL = ((2, 2, 2), (2, 2, 2))


def _bilocal_grid():
    a, b, c, x, y, z = np.indices((2,) * 6)
    return a, b, c, x, y, z


def _combine(name, coefficients, tables):
    data = sum(w * t for w, t in zip(coefficients, tables))
    lowest = float(data.min())
    if lowest < -STRUCTURE_TOL:
        raise FamilyDomainError(f"{name}: most negative entry {lowest:.6g}")
    return Behaviour(*_BILOCAL, np.clip(data, 0.0, None) if lowest < 0 else data)


def bilocal_ij(I: float, J: float) -> Behaviour:
    """``I p_I + J p_J + (1 - I - J) p_0`` on the binary bilocal scenario."""
    if abs(I) > 1 or abs(J) > 1:
        raise FamilyDomainError(f"bilocal_ij requires |I|, |J| <= 1, got ({I}, {J})")
    a, b, c, x, y, z = _bilocal_grid()
    p_i = (1 + (y == 0) * (-1.0) ** (a + b + c)) / 8
    p_j = (1 + (y == 1) * (-1.0) ** (x + z + a + b + c)) / 8
    p_0 = np.full(p_i.shape, 1 / 8)
    return _combine("bilocal_ij", (I, J, 1 - I - J), (p_i, p_j, p_0))


def bilocal_xy(X: float, Y: float) -> Behaviour:
    """Second bilocal slice, where Alice's marginal is biased towards 0."""
    if abs(X) > 1 or abs(Y) > 1:
        raise FamilyDomainError(f"bilocal_xy requires X, Y in [-1, 1], got ({X}, {Y})")
    a, b, c, x, y, z = _bilocal_grid()
    bias = (0.5 + (a == 0)) / 8
    p_x = bias * (1 + (y == 0) * (-1.0) ** (a + b + c))
    p_y = bias * (1 + (y == 1) * (-1.0) ** (z + a + b + c))
    return _combine("bilocal_xy", (X, Y, 1 - X - Y), (p_x, p_y, bias))


def brgp_satisfied(I: float, J: float) -> bool:
    return math.sqrt(abs(I)) + math.sqrt(abs(J)) <= 1


def _check_visibility(v):
    if not 0 <= v <= 1:
        raise FamilyDomainError(f"visibility must lie in [0, 1], got {v}")


def uniform(outputs, inputs=None) -> Behaviour:
    outputs = tuple(outputs)
    inputs = tuple(inputs) if inputs is not None else (1,) * len(outputs)
    return Behaviour(outputs, inputs, np.full(outputs + inputs, 1.0 / math.prod(outputs)))


def mix_with_uniform(p1: Behaviour, v: float) -> Behaviour:
    _check_visibility(v)
    noise = uniform(p1.outputs, p1.inputs)
    return Behaviour(p1.outputs, p1.inputs, v * p1.data + (1 - v) * noise.data)


def ghz(v: float) -> Behaviour:
    _check_visibility(v)
    a, b, c = np.indices((2, 2, 2))
    data = np.where((a == b) & (b == c), v / 2 + (1 - v) / 8, (1 - v) / 8)
    return Behaviour((2, 2, 2), (1, 1, 1), data)


def w_dist(v: float) -> Behaviour:
    _check_visibility(v)
    a, b, c = np.indices((2, 2, 2))
    data = np.where(a + b + c == 1, v / 3 + (1 - v) / 8, (1 - v) / 8)
    return Behaviour((2, 2, 2), (1, 1, 1), data)


# The EJM triangle distribution, in units of 1/256:
# all outputs equal -> 25, all distinct -> 5, exactly two equal -> 1.
EJM_WEIGHTS = {"equal": 25, "distinct": 5, "pair": 1}


def ejm_table() -> np.ndarray:
    a, b, c = np.indices((4, 4, 4))
    n_distinct = (a != b).astype(int) + (b != c) + (a != c)
    table = np.where(n_distinct == 0, EJM_WEIGHTS["equal"],
                     np.where(n_distinct == 3, EJM_WEIGHTS["distinct"], EJM_WEIGHTS["pair"]))
    return table / 256.0


def ejm(v: float) -> Behaviour:
    _check_visibility(v)
    return Behaviour((4, 4, 4), (1, 1, 1), v * ejm_table() + (1 - v) / 64)


def load_behaviour(path) -> Behaviour:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputDataError(f"cannot read behaviour from {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise InputDataError(f"{path}: expected a JSON object")
    b = Behaviour.from_dict(raw)
    b.check()
    return b


def save_behaviour(b: Behaviour, path) -> None:
    Path(path).write_text(dumps(b.to_dict()))


# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilySpec:
    """A named target family and its parameters.

    ``kind`` is one of ``bilocal-ij``, ``bilocal-xy``, ``ghz``, ``w``, ``ejm``
    or ``file``. One-parameter families read ``params["v"]``, the bilocal
    slices read ``params["x"]`` and ``params["y"]``, ``file`` reads ``path``.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def build(self) -> Behaviour:
        p = self.params
        if self.kind == "bilocal-ij":
            return bilocal_ij(p["x"], p["y"])
        if self.kind == "bilocal-xy":
            return bilocal_xy(p["x"], p["y"])
        if self.kind == "file":
            return load_behaviour(p["path"])
        return VISIBILITY_FAMILIES[self.kind](p["v"])

    def with_params(self, **params) -> "FamilySpec":
        return FamilySpec(self.kind, {**self.params, **params})


VISIBILITY_FAMILIES = {"ghz": ghz, "w": w_dist, "ejm": ejm}
PLANE_FAMILIES = {"bilocal-ij": bilocal_ij, "bilocal-xy": bilocal_xy}
