import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from netlocal.network import InputDataError
from netlocal.targets import (
    EJM_WEIGHTS,
    _combine,
    FamilyDomainError,
    FamilySpec,
    bilocal_ij,
    bilocal_xy,
    brgp_satisfied,
    ejm,
    ejm_table,
    ghz,
    load_behaviour,
    mix_with_uniform,
    save_behaviour,
    uniform,
    w_dist,
)

unit = st.floats(0, 1)
signed = st.floats(-1, 1)


def party_permutations(data, n=3):
    for perm in itertools.permutations(range(n)):
        yield np.transpose(data, perm)


def test_bilocal_ij_examples():
    assert np.allclose(bilocal_ij(0, 0).data, 1 / 8)
    d = bilocal_ij(1, 0).data
    for a, b, c, x, z in itertools.product(range(2), repeat=5):
        assert d[a, b, c, x, 0, z] == (1 / 4 if (a + b + c) % 2 == 0 else 0)
        assert d[a, b, c, x, 1, z] == 1 / 8
    d = bilocal_ij(0, 1).data
    for a, b, c, x, z in itertools.product(range(2), repeat=5):
        assert d[a, b, c, x, 1, z] == (1 / 4 if (x + z + a + b + c) % 2 == 0 else 0)


def test_bilocal_xy_examples():
    d = bilocal_xy(0, 0).data
    assert np.allclose(d[0], 3 / 16) and np.allclose(d[1], 1 / 16)
    # factorizes into p(a|x) p(b|y) p(c|z)
    pa = np.array([3 / 4, 1 / 4])
    assert np.allclose(d, np.einsum("a,b,c,x,y,z->abcxyz", pa, [0.5, 0.5], [0.5, 0.5], *[np.ones(2)] * 3))
    assert bilocal_xy(1, 0).data[0, 0, 0, 0, 0, 0] == pytest.approx(3 / 8)
    assert bilocal_xy(1, 0).data[0, 0, 0, 1, 0, 1] == pytest.approx(3 / 8)


def test_out_of_domain_points_are_rejected():
    with pytest.raises(FamilyDomainError):
        bilocal_ij(1.2, 0)
    with pytest.raises(FamilyDomainError):
        bilocal_xy(0, -1.01)
    with pytest.raises(FamilyDomainError):
        ghz(-0.1)


def test_negative_combination_reports_most_negative_entry():
    p = bilocal_ij(1, 0).data
    with pytest.raises(FamilyDomainError, match="-0.375"):
        _combine("test", (1.0, -2.0), (np.full(p.shape, 1 / 8), p))


def test_corners_of_the_square_are_valid():
    for x, y in itertools.product((-1, 1), repeat=2):
        bilocal_ij(x, y).check(1e-15)
        bilocal_xy(x, y).check(1e-15)


@given(signed, signed)
def test_bilocal_ij_affine(i, j):
    try:
        plus, minus = bilocal_ij(i, j), bilocal_ij(-i, -j)
    except FamilyDomainError:
        return
    assert np.max(np.abs(plus.data + minus.data - 2 * bilocal_ij(0, 0).data)) <= 1e-15
    assert plus.normalization_error() <= 1e-12 and plus.data.min() >= 0


@given(signed, signed)
def test_bilocal_xy_valid_when_constructed(x, y):
    try:
        b = bilocal_xy(x, y)
    except FamilyDomainError:
        return
    b.check()


@given(unit)
def test_visibility_families_valid(v):
    for b in (ghz(v), w_dist(v), ejm(v)):
        b.check(1e-12)


def test_ghz_examples():
    assert np.allclose(ghz(0).data, 1 / 8)
    d = ghz(1).data.ravel()
    assert d[0] == d[-1] == 0.5 and not d[1:-1].any()
    d = ghz(0.25).data
    assert d[0, 0, 0] == pytest.approx(7 / 32) and d[0, 0, 1] == pytest.approx(3 / 32)


def test_w_examples():
    assert np.allclose(w_dist(0).data, 1 / 8)
    d = w_dist(1).data[..., 0, 0, 0]
    assert d[0, 0, 1] == d[0, 1, 0] == d[1, 0, 0] == pytest.approx(1 / 3)
    assert d.sum() == pytest.approx(1)
    assert np.count_nonzero(w_dist(0.4).data == 0.4 / 3 + 0.6 / 8) == 3


def test_ejm_examples():
    assert np.allclose(ejm(0).data, 1 / 64)
    d = ejm(1).data[..., 0, 0, 0]
    assert d[0, 0, 0] == 25 / 256 and d[0, 1, 2] == 5 / 256 and d[0, 0, 1] == 1 / 256
    assert 4 * EJM_WEIGHTS["equal"] + 24 * EJM_WEIGHTS["distinct"] + 36 * EJM_WEIGHTS["pair"] == 256
    assert ejm_table().sum() == pytest.approx(1, abs=1e-15)


@given(unit)
def test_party_symmetries(v):
    for fam in (ghz, w_dist):
        d = fam(v).data[..., 0, 0, 0]
        for p in party_permutations(d):
            assert np.array_equal(p, d)
    g = ghz(v).data[..., 0, 0, 0]
    assert np.array_equal(g[::-1, ::-1, ::-1], g)


def test_ejm_output_relabelling_symmetry(rng):
    d = ejm(0.7).data[..., 0, 0, 0]
    for p in party_permutations(d):
        assert np.array_equal(p, d)
    for _ in range(5):
        sigma = rng.permutation(4)
        assert np.array_equal(d[np.ix_(sigma, sigma, sigma)], d)


def test_brgp_examples():
    assert brgp_satisfied(0, 0)
    assert brgp_satisfied(1, 0) and brgp_satisfied(0, -1)
    assert not brgp_satisfied(0.5, 0.5)


def test_mix_with_uniform():
    p1 = ghz(1)
    assert np.array_equal(mix_with_uniform(p1, 1).data, p1.data)
    assert np.allclose(mix_with_uniform(p1, 0).data, uniform((2, 2, 2)).data)
    assert np.allclose(mix_with_uniform(p1, 0.37).data, ghz(0.37).data, atol=1e-16)
    with pytest.raises(FamilyDomainError):
        mix_with_uniform(p1, 1.5)


def test_behaviour_file_round_trip(tmp_path):
    path = tmp_path / "b.json"
    save_behaviour(ghz(0.3), path)
    assert np.max(np.abs(load_behaviour(path).data - ghz(0.3).data)) <= 1e-15


@pytest.mark.parametrize("data", [
    [0.1] * 7 + [0.2],
    [0.2, -0.05] + [0.85 / 6] * 6,
])
def test_defective_files_rejected(tmp_path, data):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"outputs": [2, 2, 2], "inputs": [1, 1, 1], "data": data}))
    with pytest.raises(InputDataError):
        load_behaviour(path)


def test_malformed_files_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(InputDataError):
        load_behaviour(path)
    path.write_text(json.dumps({"outputs": [2], "data": [1, 0]}))
    with pytest.raises(InputDataError):
        load_behaviour(path)
    with pytest.raises(InputDataError):
        load_behaviour(tmp_path / "missing.json")


def test_family_spec(tmp_path):
    assert np.array_equal(FamilySpec("ghz", {"v": 0.2}).build().data, ghz(0.2).data)
    spec = FamilySpec("bilocal-xy", {"x": 0.3, "y": 0.1})
    assert np.array_equal(spec.with_params(y=0.2).build().data, bilocal_xy(0.3, 0.2).data)
    save_behaviour(w_dist(0.5), tmp_path / "w.json")
    assert np.allclose(FamilySpec("file", {"path": tmp_path / "w.json"}).build().data, w_dist(0.5).data)
