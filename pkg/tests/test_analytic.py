import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from netlocal import analytic
from netlocal.analytic import (
    GHZ_A,
    GHZ_B,
    GHZ_VC,
    W_VC,
    ModelDomainError,
    QuarticSpec,
    RootSelectionError,
    bilocal_boundary_model,
    bilocal_edge_model,
    error_slope,
    ghz_model_222,
    ghz_model_322,
    ghz_model_333,
    invert_permutation,
    poly_root,
    real_roots,
    relabel,
    relabel_model,
    w_model,
)
from netlocal.network import Behaviour, StructureError, evaluate_model, validate
from netlocal.targets import bilocal_xy, ghz, uniform, w_dist

from conftest import brute_behaviour


def numpy_real_roots(coeffs):
    r = np.roots(coeffs)
    return np.sort(r[np.abs(r.imag) < 1e-9].real)


# roots -----------------------------------------------------------------------

@pytest.mark.parametrize("spec,expected", [
    (GHZ_A, 0.454), (GHZ_B, 0.386), (GHZ_VC, 0.362), (W_VC, 0.5966),
])
def test_quartic_roots(spec, expected):
    x = poly_root(spec)
    assert abs(spec(x)) <= 1e-9
    assert x == pytest.approx(expected, abs=5e-4)
    candidates = numpy_real_roots(spec.coefficients)
    assert np.min(np.abs(candidates - x)) <= 1e-9
    if spec.rule == "largest":
        assert x == pytest.approx(candidates.max(), abs=1e-9)
    else:
        assert 0 <= x <= 1


def test_ghz_critical_visibility_two_ways():
    _, b, v = analytic.ghz_model_333_parameters()
    assert abs(v - poly_root(GHZ_VC)) <= 1e-9
    assert abs(GHZ_VC(v)) <= 1e-9
    assert analytic.ghz_critical_visibility() == v


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=4, unique=True))
def test_real_roots_of_products(roots):
    roots = sorted(roots)
    if min(np.diff(roots), default=1) < 1e-3:
        return
    coeffs = np.poly(roots)
    found = real_roots(coeffs)
    assert len(found) == len(roots)
    assert np.allclose(found, roots, atol=1e-7)


def test_root_selection_errors():
    with pytest.raises(RootSelectionError):
        poly_root(QuarticSpec((1.0, 0.0, 0.0, 0.0, 1.0), rule="largest"))
    # x^4 - 1: no root strictly inside (2, 3)
    with pytest.raises(RootSelectionError):
        poly_root(QuarticSpec((1.0, 0.0, 0.0, 0.0, -1.0), interval=(2.0, 3.0)))
    # two roots in [-2, 2]
    with pytest.raises(RootSelectionError):
        poly_root(QuarticSpec((1.0, 0.0, 0.0, 0.0, -1.0), interval=(-2.0, 2.0)))
    with pytest.raises(ValueError):
        QuarticSpec((0.0, 1.0, 0.0, 0.0, 0.0))


# models ----------------------------------------------------------------------

def assert_reproduces(model, target, tol=1e-10):
    assert validate(model) == []
    got = evaluate_model(model).data
    assert np.max(np.abs(got - target.data)) <= tol
    assert np.max(np.abs(brute_behaviour(model) - target.data)) <= tol


def test_ghz_222():
    assert_reproduces(ghz_model_222(), ghz(0.25), 1e-15)
    d = evaluate_model(ghz_model_222()).data[..., 0, 0, 0]
    assert d[0, 0, 0] == pytest.approx(7 / 32)
    for perm in [(1, 0, 2), (2, 1, 0), (0, 2, 1)]:
        assert np.allclose(np.transpose(d, perm), d, atol=1e-16)


@pytest.mark.parametrize("v", np.linspace(0, 1 / 3, 21))
def test_ghz_322_family(v):
    assert_reproduces(ghz_model_322(v), ghz(v), 1e-12)


def test_ghz_322_edges():
    assert ghz_model_322(1 / 3).responses[0][0, 0, 0, 0] == pytest.approx(0, abs=1e-15)
    assert np.allclose(evaluate_model(ghz_model_322(0)).data, 1 / 8)
    for v in (-0.01, 0.34, 1.0):
        with pytest.raises(ModelDomainError):
            ghz_model_322(v)


def test_ghz_333():
    model = ghz_model_333()
    a, b, v = analytic.ghz_model_333_parameters()
    assert 0 <= 1 - a - b <= 1
    assert v == pytest.approx(0.362, abs=5e-4)
    assert_reproduces(model, ghz(v))


@pytest.mark.parametrize("v", list(np.linspace(0, 0.59, 20)) + [analytic.w_critical_visibility()])
def test_w_family(v):
    assert_reproduces(w_model(v), w_dist(v), 1e-12)


def test_w_model_saturates_at_critical_visibility():
    vc = analytic.w_critical_visibility()
    assert analytic.w_model_off_diagonal(vc) == pytest.approx(1, abs=1e-9)
    assert analytic.w_model_off_diagonal(0.5) < 1
    with pytest.raises(ModelDomainError):
        w_model(vc + 1e-3)


@pytest.mark.parametrize("X", np.linspace(0, 1, 21))
def test_bilocal_boundary(X):
    assert_reproduces(bilocal_boundary_model(X), bilocal_xy(X, 1 - X), 1e-12)


@pytest.mark.parametrize("X,Y", [(0.3, 0.7), (-0.3, 0.7), (0.3, -0.7), (-0.3, -0.7), (-1, 0), (0, -1)])
def test_bilocal_edge_quadrants(X, Y):
    assert_reproduces(bilocal_edge_model(X, Y), bilocal_xy(X, Y), 1e-12)


def test_bilocal_model_domain():
    with pytest.raises(ModelDomainError):
        bilocal_boundary_model(1.2)
    with pytest.raises(ModelDomainError):
        bilocal_edge_model(0.3, 0.3)


def test_known_critical_visibilities():
    assert analytic.known_critical_visibility("ghz", (2, 2, 2)) == 0.25
    assert analytic.known_critical_visibility("ghz", (2, 3, 2)) == pytest.approx(1 / 3)
    assert analytic.known_critical_visibility("ghz", (3, 3, 3)) == pytest.approx(0.3621, abs=1e-4)
    assert analytic.known_critical_visibility("w", (3, 2, 2)) == pytest.approx(0.5966, abs=1e-4)
    with pytest.raises(KeyError):
        analytic.known_critical_visibility("ejm", (4, 4, 4))


# relabelling -----------------------------------------------------------------

def test_relabel_examples():
    b = bilocal_xy(0.3, 0.2)
    assert np.array_equal(relabel(b, [None] * 3).data, b.data)
    flip = [1, 0]
    g = ghz(0.4)
    assert np.array_equal(relabel(g, [flip] * 3).data, g.data)
    assert np.allclose(relabel(b, [None, flip, None]).data, bilocal_xy(-0.3, -0.2).data, atol=1e-16)
    with pytest.raises(StructureError):
        relabel(g, [[0, 0], None, None])


@given(st.integers(0, 2**32 - 1))
def test_relabel_composes_with_inverse(seed):
    rng = np.random.default_rng(seed)
    data = rng.random((3, 2, 4, 2, 1, 3))
    b = Behaviour((3, 2, 4), (2, 1, 3), data)
    sig = [rng.permutation(m).tolist() for m in b.outputs]
    tau = [rng.permutation(M).tolist() for M in b.inputs]
    back = relabel(relabel(b, sig, tau), [invert_permutation(p) for p in sig],
                   [invert_permutation(p) for p in tau])
    assert np.array_equal(back.data, b.data)


def test_relabel_model_commutes_with_evaluation(rng):
    model = ghz_model_322(0.2)
    sig = [[1, 0], [0, 1], [1, 0]]
    assert np.allclose(evaluate_model(relabel_model(model, sig)).data,
                       relabel(evaluate_model(model), sig).data, atol=1e-16)


# error slope -----------------------------------------------------------------

def test_error_slopes():
    p0 = uniform((2, 2, 2))
    assert error_slope(ghz(1), p0) == pytest.approx(math.sqrt(3) / 8, abs=1e-15)
    assert error_slope(w_dist(1), p0) == pytest.approx(math.sqrt(15) / 24, abs=1e-15)
    assert error_slope(p0, p0) == 0
    with pytest.raises(StructureError):
        error_slope(ghz(1), uniform((2, 2)))
