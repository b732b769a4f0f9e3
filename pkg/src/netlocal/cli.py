"""Command-line front end: ``netlocal <subcommand> [flags]``.

Exit codes: 0 success, 1 usage error, 2 a fit or verification missed its
threshold, 3 invalid input data, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analytic, experiments, optimizer
from .network import (
    Behaviour,
    InputDataError,
    NetworkTopology,
    StructureError,
    cardinality_upper_bound,
    dumps,
    evaluate_model,
    load_model,
    validate,
)
from .targets import PLANE_FAMILIES, VISIBILITY_FAMILIES, FamilyDomainError, load_behaviour

EXIT_OK, EXIT_USAGE, EXIT_THRESHOLD, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3, 4
SEED_ENV = "NETLOCAL_SEED"
FAMILY_OUTPUTS = {"ghz": 2, "w": 2, "ejm": 4}
TRIANGLE_WIRING = ((1, 2), (0, 2), (0, 1))


class UsageError(Exception):
    pass


class ThresholdFailure(Exception):
    pass


class NumericalFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# flag parsing helpers
# --------------------------------------------------------------------------

def _ints(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("values must be >= 1")
    return vals


def _floats(text: str) -> list[float]:
    """``a,b,c`` or an inclusive range ``lo:hi:n``."""
    try:
        if ":" in text:
            lo, hi, n = text.split(":")
            return [float(x) for x in np.linspace(float(lo), float(hi), int(n))]
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a,b,...' or 'lo:hi:n', got {text!r}") from None


def _visibility(text: str):
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = _Parser(prog="netlocal", formatter_class=fmt,
                description="Fit finite network-local models to target behaviours.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, target=True, network=True, solver=True, cards=True):
        if network:
            sp.add_argument("--network", choices=("bilocal", "triangle"), default=None,
                            help="named network; inferred from the target when omitted")
            sp.add_argument("--topology", type=Path, default=None,
                            help="topology JSON file, overrides --network")
        if target:
            sp.add_argument("--target", required=True,
                            help=f"family ({', '.join([*VISIBILITY_FAMILIES, *PLANE_FAMILIES])}) "
                                 "or a behaviour JSON file")
        if solver and cards:
            sp.add_argument("--cards", type=_ints, default=None,
                            help="hidden-variable cardinality per source, e.g. 3,3,3")
        if solver:
            sp.add_argument("--restarts", type=int, default=50, help="random restarts per fit")
            sp.add_argument("--max-iterations", type=int, default=2000, help="iterations per restart")
            sp.add_argument("--seed", type=int, default=None,
                            help=f"master seed; None means ${SEED_ENV} or 0")
            sp.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                            help="worker processes; results do not depend on it")
        sp.add_argument("--out", type=Path, default=None, help="output file; None means stdout")

    sp = sub.add_parser("fit", formatter_class=fmt, help="multi-start fit of one target")
    common(sp)
    sp.add_argument("--v", type=float, default=None, help="visibility for ghz, w, ejm")
    sp.add_argument("--x", type=float, default=None, help="first parameter of a bilocal slice")
    sp.add_argument("--y", type=float, default=None, help="second parameter of a bilocal slice")
    sp.add_argument("--threshold", type=float, default=1e-6, help="RMSE success threshold")

    sp = sub.add_parser("sweep", formatter_class=fmt, help="fits along a visibility list (CSV)")
    common(sp)
    sp.add_argument("--v", type=_floats, required=True, help="visibilities, 'a,b,...' or 'lo:hi:n'")
    sp.add_argument("--threshold", type=float, default=1e-6, help="RMSE success threshold")
    sp.add_argument("--no-wall-time", action="store_true", help="write wall_ms as 0")

    sp = sub.add_parser("grid", formatter_class=fmt, help="fits on a bilocal slice grid (CSV)")
    common(sp)
    sp.add_argument("--x", type=_floats, default=None,
                    help="x values, 'a,b,...' or 'lo:hi:n' (default: --n points on [-1, 1])")
    sp.add_argument("--y", type=_floats, default=None, help="y values, as --x")
    sp.add_argument("--n", type=int, default=9, help="points per axis when --x/--y are omitted")
    sp.add_argument("--threshold", type=float, default=1e-6, help="RMSE success threshold")
    sp.add_argument("--no-wall-time", action="store_true", help="write wall_ms as 0")

    sp = sub.add_parser("critical-v", formatter_class=fmt,
                        help="bisection for the largest visibility that fits")
    common(sp)
    sp.add_argument("--threshold", type=float, default=1e-6, help="RMSE success threshold")
    sp.add_argument("--v-lo", type=float, default=0.0, help="lower end of the bracket")
    sp.add_argument("--v-hi", type=float, default=1.0, help="upper end of the bracket")
    sp.add_argument("--v-tol", type=float, default=0.01, help="final bracket width")

    sp = sub.add_parser("ejm-table", formatter_class=fmt,
                        help="critical EJM visibility per cardinality triple (CSV)")
    common(sp, target=False, network=False, cards=False)
    sp.add_argument("--c-max", type=int, required=True, help="largest cardinality")
    sp.add_argument("--c-min", type=int, default=2, help="smallest cardinality")
    sp.add_argument("--threshold", type=float, default=1e-4, help="RMSE success threshold")
    sp.add_argument("--v-tol", type=float, default=0.01, help="final bracket width")

    sp = sub.add_parser("bound", formatter_class=fmt,
                        help="sufficient hidden-variable cardinality per source")
    common(sp, target=False, solver=False)
    sp.add_argument("--outputs", type=_ints, default=None,
                    help="output cardinality, one value or one per party (default 2)")
    sp.add_argument("--inputs", type=_ints, default=None,
                    help="input cardinality, one value or one per party "
                         "(default: 2 for bilocal, 1 for triangle)")
    sp.add_argument("--source", type=int, default=None, help="only this source index")

    sp = sub.add_parser("verify", formatter_class=fmt, help="check a stored model against a target")
    sp.add_argument("--model", type=Path, required=True, help="model JSON file")
    sp.add_argument("--target", required=True, help="family name or behaviour JSON file")
    sp.add_argument("--v", type=_visibility, default=None,
                    help="visibility, or 'auto' for the family's known critical value")
    sp.add_argument("--x", type=float, default=None, help="first parameter of a bilocal slice")
    sp.add_argument("--y", type=float, default=None, help="second parameter of a bilocal slice")
    sp.add_argument("--threshold", type=float, default=1e-10, help="RMSE acceptance threshold")
    sp.add_argument("--out", type=Path, default=None, help="output file; None means stdout")
    return p


# --------------------------------------------------------------------------
# command resolution
# --------------------------------------------------------------------------

@dataclass
class CommandSpec:
    """Parsed flags resolved into library inputs."""

    command: str
    args: argparse.Namespace

    def settings(self) -> optimizer.SolverSettings:
        a = self.args
        if a.restarts < 1:
            raise UsageError("--restarts must be >= 1")
        if a.threads < 1:
            raise UsageError("--threads must be >= 1")
        if a.max_iterations < 0:
            raise UsageError("--max-iterations must be >= 0")
        if not a.threshold > 0:
            raise UsageError("--threshold must be positive")
        seed = a.seed if a.seed is not None else _default_seed()
        return optimizer.SolverSettings(restarts=a.restarts, max_iterations=a.max_iterations,
                                        threshold=a.threshold, master_seed=seed,
                                        workers=a.threads)

    def is_file_target(self) -> bool:
        t = self.args.target
        return t not in VISIBILITY_FAMILIES and t not in PLANE_FAMILIES

    def target_shape(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        t = self.args.target
        if t in VISIBILITY_FAMILIES:
            return (FAMILY_OUTPUTS[t],) * 3, (1, 1, 1)
        if t in PLANE_FAMILIES:
            return (2, 2, 2), (2, 2, 2)
        b = load_behaviour(t)
        return b.outputs, b.inputs

    def topology(self) -> NetworkTopology:
        a = self.args
        if a.topology is not None:
            try:
                with open(a.topology) as fh:
                    return NetworkTopology.from_dict(json.load(fh))
            except (OSError, json.JSONDecodeError) as exc:
                raise InputDataError(f"cannot read topology {a.topology}: {exc}") from exc
        outputs, inputs = self.target_shape()
        network = a.network
        if network is None:
            if self.is_file_target():
                raise UsageError("--network or --topology is required with a behaviour file target")
            network = "triangle" if a.target in VISIBILITY_FAMILIES else "bilocal"
        wiring = TRIANGLE_WIRING if network == "triangle" else ((0, 1), (1, 2))
        return NetworkTopology(outputs, inputs, wiring)

    def cards(self, topology: NetworkTopology) -> tuple[int, ...]:
        cards = self.args.cards
        if cards is None:
            raise UsageError("--cards is required")
        if len(cards) != topology.source_count:
            raise UsageError(f"--cards needs {topology.source_count} values, got {len(cards)}")
        return cards

    def check_network_matches(self, topology: NetworkTopology):
        outputs, inputs = self.target_shape()
        if topology.outputs != outputs or topology.inputs != inputs:
            raise InputDataError(
                f"target shape {outputs}+{inputs} does not match topology "
                f"{topology.outputs}+{topology.inputs}")

    def visibility_family(self):
        t = self.args.target
        if t not in VISIBILITY_FAMILIES:
            raise UsageError(f"{self.command} needs a visibility family ({', '.join(VISIBILITY_FAMILIES)})")
        return t

    def single_target(self, v=None) -> Behaviour:
        a = self.args
        t = a.target
        if t in VISIBILITY_FAMILIES:
            if v is None:
                raise UsageError(f"--v is required for target {t}")
            return VISIBILITY_FAMILIES[t](v)
        if a.v is not None:
            raise UsageError(f"--v does not apply to target {t}")
        if t in PLANE_FAMILIES:
            if a.x is None or a.y is None:
                raise UsageError(f"--x and --y are required for target {t}")
            return PLANE_FAMILIES[t](a.x, a.y)
        return load_behaviour(t)


def _emit(text: str, out):
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _check_numerical(result: optimizer.FitResult):
    if not math.isfinite(result.best_cost):
        raise NumericalFailure("every restart ended in a numerical failure")


def cmd_fit(spec: CommandSpec) -> int:
    settings = spec.settings()
    topology = spec.topology()
    cards = spec.cards(topology)
    target = spec.single_target(spec.args.v)
    spec.check_network_matches(topology)
    result = optimizer.fit(target, topology, cards, settings)
    _check_numerical(result)
    _emit(result.to_json(), spec.args.out)
    if not result.success:
        raise ThresholdFailure(f"best rmse {result.best_rmse:.3e} above threshold {settings.threshold:g}")
    return EXIT_OK


def cmd_sweep(spec: CommandSpec) -> int:
    family = spec.visibility_family()
    settings = spec.settings()
    topology = spec.topology()
    cards = spec.cards(topology)
    spec.check_network_matches(topology)
    if any(not 0 <= v <= 1 for v in spec.args.v):
        raise UsageError("visibilities must lie in [0, 1]")
    records = experiments.visibility_sweep(family, spec.args.v, topology, cards, settings)
    _emit(experiments.sweep_csv(records, wall=not spec.args.no_wall_time), spec.args.out)
    return EXIT_OK


def cmd_grid(spec: CommandSpec) -> int:
    a = spec.args
    if a.target not in PLANE_FAMILIES:
        raise UsageError(f"grid needs a two-parameter family ({', '.join(PLANE_FAMILIES)})")
    if a.n < 1:
        raise UsageError("--n must be >= 1")
    settings = spec.settings()
    topology = spec.topology()
    cards = spec.cards(topology)
    spec.check_network_matches(topology)
    xs = a.x if a.x is not None else list(np.linspace(-1, 1, a.n))
    ys = a.y if a.y is not None else list(np.linspace(-1, 1, a.n))
    records = experiments.grid_sweep(a.target, xs, ys, topology, cards, settings)
    _emit(experiments.grid_csv(records, wall=not a.no_wall_time), a.out)
    return EXIT_OK


def cmd_critical_v(spec: CommandSpec) -> int:
    a = spec.args
    family = spec.visibility_family()
    if not a.v_tol > 0:
        raise UsageError("--v-tol must be positive")
    settings = spec.settings()
    topology = spec.topology()
    cards = spec.cards(topology)
    spec.check_network_matches(topology)
    try:
        vc = experiments.critical_visibility(family, topology, cards, a.threshold,
                                             a.v_lo, a.v_hi, a.v_tol, settings)
    except experiments.BracketError as exc:
        raise ThresholdFailure(str(exc)) from exc
    out = {"target": family, "cardinalities": list(cards), "v_critical": vc,
           "threshold": a.threshold, "v_lo": a.v_lo, "v_hi": a.v_hi, "v_tol": a.v_tol,
           "restarts": settings.restarts, "seed": settings.master_seed}
    _emit(dumps(out, indent=1), a.out)
    return EXIT_OK


def cmd_ejm_table(spec: CommandSpec) -> int:
    a = spec.args
    if a.c_max < 2 or a.c_min < 1 or a.c_min > a.c_max:
        raise UsageError("need 1 <= --c-min <= --c-max and --c-max >= 2")
    settings = spec.settings()
    try:
        rows = experiments.ejm_cardinality_table(a.c_max, settings, a.c_min, a.threshold, a.v_tol)
    except experiments.BracketError as exc:
        raise ThresholdFailure(str(exc)) from exc
    _emit(experiments.ejm_table_csv(rows), a.out)
    return EXIT_OK


def _per_party(values, n, default, flag):
    if values is None:
        return (default,) * n
    if len(values) == 1:
        return values * n
    if len(values) != n:
        raise UsageError(f"{flag} needs 1 or {n} values, got {len(values)}")
    return values


def cmd_bound(spec: CommandSpec) -> int:
    a = spec.args
    if a.topology is not None:
        if a.outputs is not None or a.inputs is not None:
            raise UsageError("--outputs/--inputs cannot be combined with --topology")
        topology = spec.topology()
    else:
        if a.network is None:
            raise UsageError("--network or --topology is required")
        outputs = _per_party(a.outputs, 3, 2, "--outputs")
        if a.network == "bilocal":
            topology = NetworkTopology.bilocal(outputs, _per_party(a.inputs, 3, 2, "--inputs"))
        else:
            topology = NetworkTopology(outputs, _per_party(a.inputs, 3, 1, "--inputs"), TRIANGLE_WIRING)
    if a.source is not None:
        if not 0 <= a.source < topology.source_count:
            raise UsageError(f"--source must lie in [0, {topology.source_count - 1}]")
        bounds = [cardinality_upper_bound(topology, a.source)]
    else:
        bounds = [cardinality_upper_bound(topology, k) for k in range(topology.source_count)]
    text = str(bounds[0]) if len(set(bounds)) == 1 else ",".join(map(str, bounds))
    _emit(text, a.out)
    return EXIT_OK


def cmd_verify(spec: CommandSpec) -> int:
    a = spec.args
    if not a.threshold > 0:
        raise UsageError("--threshold must be positive")
    try:
        model = load_model(a.model)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputDataError(f"cannot read model {a.model}: {exc}") from exc
    v = a.v
    if v == "auto":
        if a.target not in VISIBILITY_FAMILIES:
            raise UsageError("--v auto needs a visibility family")
        try:
            v = analytic.known_critical_visibility(a.target, model.cardinalities)
        except KeyError as exc:
            raise UsageError(str(exc)) from exc
    target = spec.single_target(v)
    violations = validate(model)
    if violations:
        raise InputDataError("model is not feasible: " + "; ".join(violations))
    produced = evaluate_model(model)
    if produced.data.shape != target.data.shape:
        raise InputDataError(f"model produces shape {produced.data.shape}, target has {target.data.shape}")
    diff = produced.data - target.data
    rmse = optimizer.rmse_of(float(np.sum(diff ** 2)), target.size)
    ok = rmse <= a.threshold
    out = {"target": a.target, "v": v, "cardinalities": list(model.cardinalities), "rmse": rmse,
           "max_abs_error": float(np.max(np.abs(diff))), "threshold": a.threshold, "success": ok}
    _emit(dumps(out, indent=1), a.out)
    if not ok:
        raise ThresholdFailure(f"rmse {rmse:.3e} above threshold {a.threshold:g}")
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "sweep": cmd_sweep, "grid": cmd_grid, "critical-v": cmd_critical_v,
            "ejm-table": cmd_ejm_table, "bound": cmd_bound, "verify": cmd_verify}


def run(argv=None) -> int:
    """Execute one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](CommandSpec(args.command, args))
    except SystemExit as exc:
        # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ThresholdFailure as exc:
        print(f"threshold not met: {exc}", file=sys.stderr)
        return EXIT_THRESHOLD
    except (InputDataError, StructureError, FamilyDomainError, analytic.ModelDomainError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalFailure, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main():
    sys.exit(run())
