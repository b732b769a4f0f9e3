"""Network topologies, finite hidden-variable models and their behaviours.

Array conventions used throughout the package:

* a behaviour table has shape ``(m_1, ..., m_n, M_1, ..., M_n)``
  (all outputs first, then all inputs);
* a response function of party ``i`` has shape ``(m_i, M_i, c_k1, ..., c_kr)``
  where ``k1 < ... < kr`` are the sources wired to that party;
* a party without an input choice has ``M_i = 1``.
"""
from __future__ import annotations

import json
import math
import string
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

#: tolerance for simplex constraints on sources, responses and parameter blocks
STRUCTURE_TOL = 1e-12
#: tolerance for normalization of a behaviour table
BEHAVIOUR_TOL = 1e-9


class StructureError(ValueError):
    """Raised when arrays do not match a topology's cardinalities or wiring."""


class FeasibilityError(ValueError):
    """Raised when a parameter vector leaves the product of simplices."""


class InputDataError(ValueError):
    """Raised for malformed or non-normalized behaviour data."""


# --------------------------------------------------------------------------
# topology
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class NetworkTopology:
    """Bipartite wiring of independent sources to parties.

    Parameters
    ----------
    outputs : sequence of int
        Output cardinality ``m_i >= 2`` of every party.
    inputs : sequence of int, optional
        Input cardinality ``M_i >= 1`` of every party (default: all 1).
    wiring : sequence of sequence of int
        For every source, the strictly increasing party indices it feeds.
    """

    outputs: tuple[int, ...]
    inputs: tuple[int, ...]
    wiring: tuple[tuple[int, ...], ...]

    def __init__(self, outputs, inputs=None, wiring=()):
        outputs = tuple(int(m) for m in outputs)
        inputs = tuple(1 for _ in outputs) if inputs is None else tuple(int(m) for m in inputs)
        wiring = tuple(tuple(int(p) for p in parties) for parties in wiring)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "wiring", wiring)
        self._check()

    def _check(self):
        if not self.outputs:
            raise StructureError("a topology needs at least one party")
        if len(self.inputs) != len(self.outputs):
            raise StructureError(
                f"{len(self.outputs)} output cardinalities but {len(self.inputs)} input cardinalities")
        if not self.wiring:
            raise StructureError("a topology needs at least one source")
        for i, (m, M) in enumerate(zip(self.outputs, self.inputs)):
            if m < 2:
                raise StructureError(f"party {i}: output cardinality {m} < 2")
            if M < 1:
                raise StructureError(f"party {i}: input cardinality {M} < 1")
        for k, parties in enumerate(self.wiring):
            if not parties:
                raise StructureError(f"source {k} is not connected to any party")
            if any(b <= a for a, b in zip(parties, parties[1:])):
                raise StructureError(f"source {k}: party list {list(parties)} is not strictly increasing")
            if parties[0] < 0 or parties[-1] >= self.party_count:
                raise StructureError(f"source {k}: party index out of range in {list(parties)}")

    @property
    def party_count(self) -> int:
        return len(self.outputs)

    @property
    def source_count(self) -> int:
        return len(self.wiring)

    @cached_property
    def party_sources(self) -> tuple[tuple[int, ...], ...]:
        """Sources connected to each party, in increasing source index."""
        return tuple(
            tuple(k for k, parties in enumerate(self.wiring) if i in parties)
            for i in range(self.party_count)
        )

    def behaviour_shape(self) -> tuple[int, ...]:
        return self.outputs + self.inputs

    def response_shape(self, party: int, cardinalities: Sequence[int]) -> tuple[int, ...]:
        hidden = tuple(int(cardinalities[k]) for k in self.party_sources[party])
        return (self.outputs[party], self.inputs[party]) + hidden

    # named scenarios -----------------------------------------------------

    @classmethod
    def bilocal(cls, outputs=(2, 2, 2), inputs=(2, 2, 2)):
        """Alice and Charles each share one source with Bob (sources lambda, mu)."""
        return cls(outputs, inputs, wiring=((0, 1), (1, 2)))

    @classmethod
    def triangle(cls, outputs=2):
        """Triangle without inputs; source alpha feeds (b, c), beta (a, c), gamma (a, b)."""
        if np.ndim(outputs) == 0:
            outputs = (outputs,) * 3
        return cls(outputs, (1, 1, 1), wiring=((1, 2), (0, 2), (0, 1)))

    @classmethod
    def from_dict(cls, data: dict) -> "NetworkTopology":
        try:
            return cls(data["outputs"], data.get("inputs"), data["wiring"])
        except (KeyError, TypeError) as exc:
            raise StructureError(f"malformed topology description: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "outputs": list(self.outputs),
            "inputs": list(self.inputs),
            "wiring": [list(p) for p in self.wiring],
        }


# --------------------------------------------------------------------------
# behaviours and models
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Behaviour:
    """Conditional probability table ``p(outputs | inputs)``."""

    outputs: tuple[int, ...]
    inputs: tuple[int, ...]
    data: np.ndarray

    def __init__(self, outputs, inputs, data):
        outputs = tuple(int(m) for m in outputs)
        inputs = tuple(int(m) for m in inputs)
        data = np.array(data, dtype=float).reshape(outputs + inputs)
        data.setflags(write=False)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "data", data)

    @property
    def size(self) -> int:
        return self.data.size

    def normalization_error(self) -> float:
        n = len(self.outputs)
        sums = self.data.sum(axis=tuple(range(n)))
        return float(np.max(np.abs(sums - 1.0)))

    def check(self, tol: float = BEHAVIOUR_TOL) -> None:
        """Raise :class:`InputDataError` unless the table is a valid behaviour."""
        if not np.all(np.isfinite(self.data)):
            raise InputDataError("behaviour contains non-finite entries")
        lowest = float(self.data.min())
        if lowest < -tol:
            raise InputDataError(f"behaviour has a negative entry {lowest:.3g}")
        err = self.normalization_error()
        if err > tol:
            raise InputDataError(f"behaviour is not normalized (max deviation {err:.3g})")

    def to_dict(self) -> dict:
        return {"outputs": list(self.outputs), "inputs": list(self.inputs),
                "data": self.data.ravel().tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Behaviour":
        try:
            outputs, inputs, values = data["outputs"], data["inputs"], data["data"]
            b = cls(outputs, inputs, values)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputDataError(f"malformed behaviour: {exc}") from exc
        return b

    def __repr__(self):
        return f"Behaviour(outputs={self.outputs}, inputs={self.inputs})"


@dataclass(frozen=True, eq=False)
class LocalModel:
    """Source distributions and response functions on a topology.

    ``sources[k]`` is a 1-d probability vector and ``responses[i]`` is an array
    of shape ``topology.response_shape(i, cardinalities)``.
    """

    topology: NetworkTopology
    sources: tuple[np.ndarray, ...]
    responses: tuple[np.ndarray, ...]

    def __init__(self, topology, sources, responses):
        sources = tuple(_frozen(s) for s in sources)
        responses = tuple(_frozen(r) for r in responses)
        object.__setattr__(self, "topology", topology)
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "responses", responses)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(s.shape[0] for s in self.sources)

    def to_dict(self) -> dict:
        return {
            "topology": self.topology.to_dict(),
            "sources": [{"cardinality": int(s.shape[0]), "probabilities": s.tolist()}
                        for s in self.sources],
            "responses": [{"party": i, "shape": list(r.shape), "data": r.ravel().tolist()}
                          for i, r in enumerate(self.responses)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LocalModel":
        try:
            topology = NetworkTopology.from_dict(data["topology"])
            sources = []
            for s in data["sources"]:
                probs = np.asarray(s["probabilities"], dtype=float)
                if probs.shape != (int(s["cardinality"]),):
                    raise StructureError("source cardinality does not match its probability list")
                sources.append(probs)
            responses = [None] * topology.party_count
            for r in data["responses"]:
                i = int(r["party"])
                responses[i] = np.asarray(r["data"], dtype=float).reshape(r["shape"])
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            if isinstance(exc, StructureError):
                raise
            raise StructureError(f"malformed model description: {exc}") from exc
        model = cls(topology, sources, responses)
        _check_shapes(model)
        return model

    def __repr__(self):
        return f"LocalModel(cardinalities={self.cardinalities}, outputs={self.topology.outputs})"


def _frozen(a) -> np.ndarray:
    if a is None:
        raise StructureError("missing array in model")
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_shapes(model: LocalModel) -> None:
    top = model.topology
    if len(model.sources) != top.source_count:
        raise StructureError(f"model has {len(model.sources)} sources, topology has {top.source_count}")
    if len(model.responses) != top.party_count:
        raise StructureError(f"model has {len(model.responses)} responses, topology has {top.party_count}")
    for k, s in enumerate(model.sources):
        if s.ndim != 1 or s.shape[0] < 1:
            raise StructureError(f"source {k}: expected a non-empty vector, got shape {s.shape}")
    cards = model.cardinalities
    for i, r in enumerate(model.responses):
        expected = top.response_shape(i, cards)
        if r.shape != expected:
            raise StructureError(f"party {i}: response shape {r.shape}, expected {expected}")


def validate(model: LocalModel, tol: float = STRUCTURE_TOL) -> list[str]:
    """List every violated invariant of ``model`` (empty when valid)."""
    try:
        _check_shapes(model)
    except StructureError as exc:
        return [str(exc)]
    problems = []
    for k, s in enumerate(model.sources):
        lowest = float(s.min())
        if lowest < -tol:
            problems.append(f"source {k}: negative probability {lowest:.3g}")
        dev = abs(float(s.sum()) - 1.0)
        if dev > tol:
            problems.append(f"source {k}: probabilities sum to 1{'+' if s.sum() > 1 else '-'}{dev:.3g}")
    for i, r in enumerate(model.responses):
        lowest = float(r.min())
        if lowest < -tol:
            idx = np.unravel_index(np.argmin(r), r.shape)
            problems.append(f"party {i}: negative response entry {lowest:.3g} at {tuple(map(int, idx))}")
        dev = np.abs(r.sum(axis=0) - 1.0)
        if dev.max() > tol:
            idx = (slice(None),) + tuple(int(j) for j in np.unravel_index(np.argmax(dev), dev.shape))
            problems.append(
                f"party {i}: response row {idx[1:]} is not normalized (deviation {dev.max():.3g})")
    return problems


# --------------------------------------------------------------------------
# contraction
# --------------------------------------------------------------------------

class Contraction:
    """Precomputed einsum programs for a topology with fixed cardinalities.

    Evaluates the behaviour of a model, its Jacobian with respect to every
    source and response entry, and vector-Jacobian products. Operands are
    plain arrays ordered as ``sources + responses``.
    """

    def __init__(self, topology: NetworkTopology, cardinalities: Sequence[int]):
        self.topology = topology
        self.cardinalities = tuple(int(c) for c in cardinalities)
        if len(self.cardinalities) != topology.source_count:
            raise StructureError(
                f"{len(self.cardinalities)} cardinalities for {topology.source_count} sources")
        if any(c < 1 for c in self.cardinalities):
            raise StructureError(f"hidden cardinalities must be >= 1, got {self.cardinalities}")
        n, S = topology.party_count, topology.source_count
        letters = iter(string.ascii_letters)
        self._out = [next(letters) for _ in range(n)]
        self._in = [next(letters) for _ in range(n)]
        self._hid = [next(letters) for _ in range(S)]
        self._out2 = [next(letters) for _ in range(n)]
        self._in2 = [next(letters) for _ in range(n)]
        self.shapes = [(c,) for c in self.cardinalities] + [
            topology.response_shape(i, self.cardinalities) for i in range(n)]
        self.subs = [self._hid[k] for k in range(S)] + [
            self._out[i] + self._in[i] + "".join(self._hid[k] for k in topology.party_sources[i])
            for i in range(n)]
        self.behaviour_sub = "".join(self._out) + "".join(self._in)
        self.behaviour_shape = topology.behaviour_shape()
        self.n_entries = math.prod(self.behaviour_shape)
        self.sizes = [math.prod(s) for s in self.shapes]
        self.offsets = np.concatenate([[0], np.cumsum(self.sizes)]).astype(int)
        self.n_full = int(self.offsets[-1])
        self._paths: dict = {}

    def split(self, full: np.ndarray) -> list[np.ndarray]:
        """Views of a flat full-coordinate vector as source/response arrays."""
        return [full[a:b].reshape(s) for a, b, s in zip(self.offsets[:-1], self.offsets[1:], self.shapes)]

    def join(self, arrays) -> np.ndarray:
        return np.concatenate([np.asarray(a, dtype=float).ravel() for a in arrays])

    def _einsum(self, key, subs, out, operands):
        expr = ",".join(subs) + "->" + out
        path = self._paths.get(key)
        if path is None:
            path = np.einsum_path(expr, *operands, optimize="greedy")[0]
            self._paths[key] = path
        return np.einsum(expr, *operands, optimize=path)

    def behaviour(self, arrays) -> np.ndarray:
        return self._einsum("p", self.subs, self.behaviour_sub, arrays)

    def environment(self, j: int, arrays) -> np.ndarray:
        """Contraction of every operand except ``j``.

        For a source the result is indexed ``(outputs, inputs, h_j)``; for a
        party ``i`` it is ``(outputs without o_i, inputs without x_i, hidden of i)``.
        """
        subs = self.subs[:j] + self.subs[j + 1:]
        ops = list(arrays[:j]) + list(arrays[j + 1:])
        return self._einsum(("env", j), subs, self._env_sub(j), ops)

    def _env_sub(self, j):
        S = self.topology.source_count
        if j < S:
            return self.behaviour_sub + self._hid[j]
        i = j - S
        return ("".join(o for p, o in enumerate(self._out) if p != i)
                + "".join(x for p, x in enumerate(self._in) if p != i)
                + "".join(self._hid[k] for k in self.topology.party_sources[i]))

    def jacobian(self, arrays) -> np.ndarray:
        """Derivative of every behaviour entry w.r.t. every full coordinate, shape ``(N, n_full)``."""
        S = self.topology.source_count
        cols = []
        for j in range(len(self.shapes)):
            env = self.environment(j, arrays)
            if j < S:
                cols.append(env.reshape(self.n_entries, -1))
                continue
            i = j - S
            m, M = self.shapes[j][:2]
            hid = "".join(self._hid[k] for k in self.topology.party_sources[i])
            out = self.behaviour_sub + self._out2[i] + self._in2[i] + hid
            full = np.einsum(f"{self._env_sub(j)},{self._out[i]}{self._out2[i]},{self._in[i]}{self._in2[i]}->{out}",
                             env, np.eye(m), np.eye(M))
            cols.append(full.reshape(self.n_entries, -1))
        return np.concatenate(cols, axis=1)

    def vjp(self, arrays, weights: np.ndarray) -> np.ndarray:
        """Gradient of ``sum(weights * behaviour)`` w.r.t. every full coordinate."""
        weights = np.asarray(weights).reshape(self.behaviour_shape)
        grads = []
        for j in range(len(self.shapes)):
            subs = self.subs[:j] + self.subs[j + 1:] + [self.behaviour_sub]
            ops = list(arrays[:j]) + list(arrays[j + 1:]) + [weights]
            grads.append(self._einsum(("vjp", j), subs, self.subs[j], ops).ravel())
        return np.concatenate(grads)


def evaluate_model(model: LocalModel) -> Behaviour:
    """Exact behaviour of a finite model (sum over all hidden-value tuples)."""
    _check_shapes(model)
    top = model.topology
    contraction = Contraction(top, model.cardinalities)
    data = contraction.behaviour(list(model.sources) + list(model.responses))
    return Behaviour(top.outputs, top.inputs, data)


# --------------------------------------------------------------------------
# counting
# --------------------------------------------------------------------------

def collins_gisin_dimension(outputs: Sequence[int], inputs: Sequence[int]) -> int:
    """Dimension of the no-signalling behaviour space of the given parties."""
    if len(outputs) == 0:
        raise StructureError("collins_gisin_dimension needs at least one party")
    if len(outputs) != len(inputs):
        raise StructureError("outputs and inputs must have the same length")
    if any(m < 1 for m in outputs) or any(M < 1 for M in inputs):
        raise StructureError("cardinalities must be >= 1")
    return math.prod(M * (m - 1) + 1 for m, M in zip(outputs, inputs)) - 1


def cardinality_upper_bound(topology: NetworkTopology, source: int) -> int:
    """Sufficient hidden-variable cardinality for ``source``.

    Minimum of the dimension-difference bound and the number of deterministic
    strategies of every party that only sees this source.
    """
    if not 0 <= source < topology.source_count:
        raise StructureError(f"source index {source} out of range")
    connected = set(topology.wiring[source])
    full = collins_gisin_dimension(topology.outputs, topology.inputs)
    rest = [i for i in range(topology.party_count) if i not in connected]
    rest_dim = 0 if not rest else collins_gisin_dimension(
        [topology.outputs[i] for i in rest], [topology.inputs[i] for i in rest])
    bounds = [full - rest_dim]
    for i in connected:
        if topology.party_sources[i] == (source,):
            bounds.append(topology.outputs[i] ** topology.inputs[i])
    return min(bounds)


def num_free_parameters(topology: NetworkTopology, cardinalities: Sequence[int]) -> int:
    if len(cardinalities) != topology.source_count:
        raise StructureError("one cardinality per source is required")
    total = sum(int(c) - 1 for c in cardinalities)
    for i in range(topology.party_count):
        hidden = math.prod(int(cardinalities[k]) for k in topology.party_sources[i])
        total += (topology.outputs[i] - 1) * topology.inputs[i] * hidden
    return total


# --------------------------------------------------------------------------
# flat parameters
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ParameterLayout:
    """Simplex blocks of a model in a fixed order.

    Blocks are the sources (in order) followed by, for every party, one block
    per ``(input, hidden tuple)`` in row-major order. A block of full length
    ``L`` keeps its first ``L - 1`` coordinates in the stored vector.
    """

    topology: NetworkTopology
    cardinalities: tuple[int, ...]
    owners: tuple = field(repr=False)
    full_index: tuple[np.ndarray, ...] = field(repr=False)
    stored_offsets: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, topology: NetworkTopology, cardinalities: Sequence[int]) -> "ParameterLayout":
        contraction = Contraction(topology, cardinalities)
        owners, index = [], []
        S = topology.source_count
        for k in range(S):
            owners.append(("source", k))
            index.append(np.arange(contraction.offsets[k], contraction.offsets[k + 1]))
        for i in range(topology.party_count):
            shape = contraction.shapes[S + i]
            base = contraction.offsets[S + i]
            local = np.arange(math.prod(shape)).reshape(shape)
            rest = shape[1:]
            for tail in np.ndindex(*rest):
                owners.append(("party", i, tail[0], tail[1:]))
                index.append(base + local[(slice(None),) + tail])
        lengths = [len(ix) - 1 for ix in index]
        offsets = np.concatenate([[0], np.cumsum(lengths)]).astype(int)
        layout = cls(topology, contraction.cardinalities, tuple(owners), tuple(index), offsets)
        object.__setattr__(layout, "_contraction", contraction)
        return layout

    @property
    def contraction(self) -> Contraction:
        return self._contraction

    @property
    def n_stored(self) -> int:
        return int(self.stored_offsets[-1])

    @property
    def n_full(self) -> int:
        return self._contraction.n_full

    @cached_property
    def groups(self) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
        """Blocks grouped by length: ``(block ids, full index [nb, L], stored index [nb, L-1])``."""
        by_len: dict[int, list[int]] = {}
        for b, ix in enumerate(self.full_index):
            by_len.setdefault(len(ix), []).append(b)
        out = []
        for L, blocks in sorted(by_len.items()):
            blocks = np.array(blocks)
            full = np.stack([self.full_index[b] for b in blocks])
            stored = self.stored_offsets[blocks][:, None] + np.arange(L - 1)[None, :]
            out.append((blocks, full, stored))
        return out

    def describe(self, block: int) -> str:
        owner = self.owners[block]
        if owner[0] == "source":
            return f"source {owner[1]}"
        return f"party {owner[1]} input {owner[2]} hidden {owner[3]}"

    def to_full(self, vector: np.ndarray) -> np.ndarray:
        """Expand stored coordinates into all source and response entries."""
        vector = np.asarray(vector, dtype=float)
        full = np.empty(self.n_full)
        for _, fidx, sidx in self.groups:
            vals = vector[sidx]
            full[fidx[:, :-1]] = vals
            full[fidx[:, -1]] = 1.0 - vals.sum(axis=1)
        return full

    def to_stored(self, full: np.ndarray) -> np.ndarray:
        vector = np.empty(self.n_stored)
        for _, fidx, sidx in self.groups:
            vector[sidx] = full[fidx[:, :-1]]
        return vector

    def check_feasible(self, vector: np.ndarray, tol: float = STRUCTURE_TOL) -> None:
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (self.n_stored,):
            raise FeasibilityError(f"expected {self.n_stored} stored coordinates, got shape {vector.shape}")
        if not np.all(np.isfinite(vector)):
            raise FeasibilityError("parameter vector has non-finite entries")
        for blocks, _, sidx in self.groups:
            vals = vector[sidx]
            low = vals.min(axis=1) if vals.shape[1] else np.zeros(len(blocks))
            excess = vals.sum(axis=1) - 1.0
            bad = np.flatnonzero((low < -tol) | (excess > tol))
            if bad.size:
                b = bad[0]
                raise FeasibilityError(
                    f"{self.describe(int(blocks[b]))}: min coordinate {low[b]:.3g}, "
                    f"sum exceeds 1 by {excess[b]:.3g}")

    def model(self, full: np.ndarray) -> LocalModel:
        arrays = self._contraction.split(np.asarray(full, dtype=float).copy())
        S = self.topology.source_count
        return LocalModel(self.topology, arrays[:S], arrays[S:])


def pack_parameters(model: LocalModel) -> tuple[np.ndarray, ParameterLayout]:
    """Flatten a model into its free coordinates (last entry of every simplex dropped)."""
    _check_shapes(model)
    layout = ParameterLayout.build(model.topology, model.cardinalities)
    full = layout.contraction.join(list(model.sources) + list(model.responses))
    return layout.to_stored(full), layout


def unpack_parameters(vector, layout: ParameterLayout) -> LocalModel:
    layout.check_feasible(vector)
    return layout.model(layout.to_full(vector))


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------

_FLOAT_MARK = "\u0000f:"


def _mark_floats(obj):
    if isinstance(obj, float):
        return _FLOAT_MARK + format(obj, "#.17g")
    if isinstance(obj, dict):
        return {k: _mark_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_mark_floats(v) for v in obj]
    return obj


def dumps(obj, indent=None) -> str:
    """``json.dumps`` writing every float with 17 significant digits."""
    text = json.dumps(_mark_floats(obj), indent=indent)
    mark = json.dumps(_FLOAT_MARK)[1:-1]

    def fix(token: str) -> str:
        value = token[len(mark) + 1:-1]
        if value in ("inf", "-inf", "nan"):
            return {"inf": "Infinity", "-inf": "-Infinity", "nan": "NaN"}[value]
        return value

    out, pos = [], 0
    needle = '"' + mark
    while True:
        start = text.find(needle, pos)
        if start < 0:
            out.append(text[pos:])
            break
        end = text.index('"', start + 1) + 1
        out.append(text[pos:start])
        out.append(fix(text[start:end]))
        pos = end
    return "".join(out)


def save_model(model: LocalModel, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(model.to_dict(), indent=1))


def load_model(path) -> LocalModel:
    with open(path) as fh:
        return LocalModel.from_dict(json.load(fh))
