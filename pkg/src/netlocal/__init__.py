"""Finite local hidden-variable models on network scenarios.

The core objects are :class:`NetworkTopology` (which source feeds which
party), :class:`Behaviour` (a conditional probability table) and
:class:`LocalModel` (source distributions plus response functions).
:func:`fit` searches for a model reproducing a target behaviour.
"""
from .network import (
    Behaviour,
    FeasibilityError,
    InputDataError,
    LocalModel,
    NetworkTopology,
    ParameterLayout,
    StructureError,
    cardinality_upper_bound,
    collins_gisin_dimension,
    evaluate_model,
    load_model,
    num_free_parameters,
    pack_parameters,
    save_model,
    unpack_parameters,
    validate,
)
from .optimizer import FitResult, SolverSettings, fit
from .targets import bilocal_ij, bilocal_xy, ejm, ghz, load_behaviour, mix_with_uniform, save_behaviour, w_dist
from .experiments import critical_visibility, ejm_cardinality_table, grid_sweep, slope_fit, visibility_sweep

__all__ = [
    "Behaviour", "FeasibilityError", "InputDataError", "LocalModel", "NetworkTopology",
    "ParameterLayout", "StructureError", "cardinality_upper_bound", "collins_gisin_dimension",
    "evaluate_model", "load_model", "num_free_parameters", "pack_parameters", "save_model",
    "unpack_parameters", "validate", "FitResult", "SolverSettings", "fit", "bilocal_ij",
    "bilocal_xy", "ejm", "ghz", "load_behaviour", "mix_with_uniform", "save_behaviour", "w_dist",
    "critical_visibility", "ejm_cardinality_table", "grid_sweep", "slope_fit", "visibility_sweep",
]
