import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alloycode.decomp import (
    LinearCombMap,
    TensorDecomposition,
    matmul_tensor,
    strassen,
    suspect_terms,
    trivial,
    verify,
)
from alloycode.field import ScalarMode


def flip_t5(d):
    data = d.to_dict()
    data["terms"][4]["D"] = {k: -v for k, v in data["terms"][4]["D"].items()}
    return TensorDecomposition.from_dict(data)


def test_strassen_has_seven_terms():
    assert strassen().r == 7
    assert trivial(2, 2, 2).r == 8


def test_strassen_coefficient_tensor_is_matmul():
    assert np.array_equal(strassen().coefficient_tensor(), matmul_tensor(2, 2, 2))


def test_matmul_tensor_against_loops(rng):
    # oracle: contracting the structure tensor with vec(A), vec(B) gives vec(AB)
    T = matmul_tensor(2, 3, 4)
    A = rng.integers(-5, 5, (2, 4))
    B = rng.integers(-5, 5, (4, 3))
    assert np.array_equal(np.einsum("ijk,i,j->k", T, A.ravel(), B.ravel()), (A @ B).ravel())


@pytest.mark.parametrize("q", [7, 101])
def test_verify_strassen_finite(q):
    res = verify(strassen(), 100, ScalarMode.finite(q), np.random.default_rng(q))
    assert res.passed and res.failures == 0 and res.trials == 100


def test_verify_strassen_real():
    res = verify(strassen(), 100, ScalarMode.real(), np.random.default_rng(1), block_size=64)
    assert res.passed and res.max_deviation <= 1e-10


@pytest.mark.parametrize("shape", [(2, 2, 2), (1, 1, 1), (1, 3, 2)])
def test_verify_trivial(shape):
    assert verify(trivial(*shape), 20, rng=np.random.default_rng(0)).passed


def test_sign_flipped_t5_fails_and_is_named():
    res = verify(flip_t5(strassen()), 100, ScalarMode.finite(7), np.random.default_rng(2))
    assert not res.passed
    assert res.suspect_terms == [4]
    assert "T5" in str(res)


@pytest.mark.parametrize("t", range(7))
def test_single_corrupted_weight_is_located(t):
    data = strassen().to_dict()
    key = next(iter(data["terms"][t]["E"][0]))
    data["terms"][t]["E"][0][key] *= -1
    assert t in suspect_terms(TensorDecomposition.from_dict(data))


def test_json_round_trip(tmp_path):
    d = strassen()
    path = tmp_path / "s.json"
    d.save(path)
    raw = json.loads(path.read_text())
    assert raw["rank"] == 7
    assert raw["shapes"] == {"A": [2, 2], "B": [2, 2], "C": [2, 2]}
    assert raw["terms"][0]["E"][0] == {"1,1": 1, "2,2": 1}
    e = TensorDecomposition.load(path)
    assert e.to_dict() == d.to_dict()
    assert verify(e, 10, rng=np.random.default_rng(0)).passed


def test_from_dict_rejects_bad_data():
    data = strassen().to_dict()
    data["rank"] = 6
    with pytest.raises(ValueError):
        TensorDecomposition.from_dict(data)
    data = strassen().to_dict()
    data["shapes"]["B"] = [3, 2]
    with pytest.raises(ValueError):
        TensorDecomposition.from_dict(data)


def test_evaluate_shape_mismatch(F101):
    with pytest.raises(ValueError):
        strassen().evaluate(np.zeros((3, 2, 2, 2), dtype=np.int64), np.zeros((2, 2, 2, 2), dtype=np.int64), F101)


def test_empty_map_applies_to_zero(F101):
    out = LinearCombMap({}).apply(np.ones((2, 2, 3, 3), dtype=np.int64), F101)
    assert out.shape == (3, 3) and not out.any()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 6), st.integers(-50, 50), st.integers(-50, 50), st.integers(0, 2**32 - 1))
def test_maps_are_linear(t, a, b, seed):
    F = ScalarMode.finite(101)
    rng = np.random.default_rng(seed)
    X = F.random((2, 2, 3, 3), rng)
    Y = F.random((2, 2, 3, 3), rng)
    comb = F.add(F.scale(a, X), F.scale(b, Y))
    term = strassen().terms[t]
    for m in (term.ea, term.eb, term.d):
        lhs = m.apply(comb, F)
        rhs = F.add(F.scale(a, m.apply(X, F)), F.scale(b, m.apply(Y, F)))
        assert np.array_equal(lhs, rhs)
