import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cflab.errors import InvalidMatrix, NotContraction
from cflab.linalg import block_toeplitz_upper, operator_norm, random_contraction
from cflab.parrott import (ParrottData, completion_norm, contraction_3x3, equal_modulus_threshold,
                           matrix_3x3, minimal_completion, parrott_solve, toeplitz_extend_step, toeplitz_split)


def _random_data(rng, shapes=(2, 3, 2, 2)):
    r1, r2, c1, c2 = shapes
    M = random_contraction(r1 + r2, rng, c1 + c2, scale=rng.uniform(0.5, 1.0))
    return ParrottData.build(M[:r1, :c1], M[r1:, :c1], M[r1:, c1:])


def test_minimal_completion_attains_parrott_bound(rng):
    for _ in range(20):
        d = _random_data(rng)
        col = operator_norm(np.vstack([d.A, d.C]))
        row = operator_norm(np.hstack([d.C, d.D]))
        X, m = minimal_completion(d)
        assert m == pytest.approx(max(col, row))
        assert completion_norm(d, X) == pytest.approx(m, abs=1e-8)
        # the unscaled central solution is contractive, but not minimal in general
        assert completion_norm(d, parrott_solve(d)) <= 1 + 1e-8


def test_every_contractive_V_gives_contraction(rng):
    d = _random_data(rng)
    for _ in range(10):
        V = random_contraction(2, rng)
        assert completion_norm(d, parrott_solve(d, V)) <= 1 + 1e-8


def test_scalar_brute_force_interval():
    # 𝒯(ω, α, X) is contractive exactly for X in an interval; brute-force it
    om, a = 0.4, 0.5
    xs = np.linspace(-1, 1, 20001)
    ok = [x for x in xs if operator_norm(block_toeplitz_upper([om, a, x])) <= 1 + 1e-12]
    lo, hi = min(ok), max(ok)
    assert lo == pytest.approx(-0.6614, abs=2e-4) and hi == pytest.approx(0.4233, abs=2e-4)
    centre = toeplitz_extend_step([om, a]).real
    assert centre == pytest.approx(-om * a * a / (1 - om * om), abs=1e-12)
    assert toeplitz_extend_step([om, a], V=[[1.0]]).real == pytest.approx(0.42333, abs=1e-5)
    assert toeplitz_extend_step([om, a], V=[[-1.0]]).real == pytest.approx(lo, abs=2e-4)


def test_counterexample_step_value():
    # derived: -b² conj(a) / (1 - |a|²) at a = 1/√2, b = 1/2
    X = toeplitz_extend_step([1 / np.sqrt(2), 0.5])
    assert X[0, 0] == pytest.approx(-np.sqrt(2) / 4, abs=1e-12)
    assert toeplitz_extend_step([1.0, 0.0])[0, 0] == pytest.approx(0.0, abs=1e-12)


def test_matrix_extension_step(rng):
    A1 = random_contraction(2, rng, scale=0.6)
    A2 = 0.3 * random_contraction(2, rng)
    if operator_norm(block_toeplitz_upper([A1, A2])) <= 1:
        X = toeplitz_extend_step([A1, A2])
        assert operator_norm(block_toeplitz_upper([A1, A2, X])) <= 1 + 1e-8


def test_split_shapes():
    A, C, D = toeplitz_split([np.eye(2), np.zeros((2, 2))])
    assert A.shape == (2, 4) and C.shape == (4, 4) and D.shape == (4, 2)


def test_input_validation():
    with pytest.raises(NotContraction):
        ParrottData.build([[1.0]], [[1.0]], [[0.0]])
    with pytest.raises(InvalidMatrix):
        ParrottData.build(np.zeros((1, 2)), np.zeros((1, 3)), np.zeros((1, 1)))
    with pytest.raises(NotContraction):
        toeplitz_extend_step([0.9, 0.9])
    d = ParrottData.build([[0.1]], [[0.1]], [[0.1]])
    with pytest.raises(NotContraction):
        parrott_solve(d, V=[[2.0]])
    with pytest.raises(InvalidMatrix):
        parrott_solve(d, V=np.zeros((2, 2)))


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 0.999), st.floats(0, 1), st.floats(0, 1),
       st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
def test_3x3_closed_form_matches_norm(w, a, b, ta, tb):
    al, be = a * np.exp(1j * ta), b * np.exp(1j * tb)
    nrm = operator_norm(matrix_3x3(w, al, be))
    if abs(nrm - 1) > 1e-9:
        assert contraction_3x3(w, al, be) == (nrm < 1)


@pytest.mark.parametrize("w", [0.0, 0.3, 0.7, 0.95])
def test_equal_modulus_threshold_is_sharp(w):
    r = equal_modulus_threshold(w)
    assert operator_norm(matrix_3x3(w, r, r)) == pytest.approx(1.0, abs=1e-10)
    assert contraction_3x3(w, 0.999 * r, 0.999 * r)
    assert not contraction_3x3(w, 1.001 * r, 1.001 * r)


def test_minimum_against_numerical_optimizer(rng):
    from scipy.optimize import minimize

    d = _random_data(rng, (1, 2, 2, 1))
    _, m = minimal_completion(d)
    res = minimize(lambda v: completion_norm(d, [[v[0] + 1j * v[1]]]), [0.3, -0.2],
                   method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12})
    assert res.fun >= m - 1e-8
    assert res.fun == pytest.approx(m, abs=1e-6)
