import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cflab.errors import DimensionCap, InvalidMatrix, NotContraction, NotHermitian, NotPSD
from cflab.linalg import (DEFAULT_TOL, Tolerance, block_toeplitz_upper, defect, is_contraction,
                          kron, matrix_from_json, matrix_to_json, operator_norm, psd_check,
                          psd_sqrt, random_contraction, random_unitary, unitary_dilation)


def test_tolerance_ordering():
    assert DEFAULT_TOL.as_dict() == {"algebraic": 1e-10, "spectral": 1e-8, "grid": 1e-3}
    with pytest.raises(ValueError):
        Tolerance(1e-6, 1e-8, 1e-3)
    with pytest.raises(ValueError):
        Tolerance(0.0, 1e-8, 1e-3)


@pytest.mark.parametrize("bad", [[], [[np.nan]], np.zeros((2, 2, 2)), [[1, 2], [3]]])
def test_as_matrix_rejects(bad):
    with pytest.raises((InvalidMatrix, ValueError)):
        operator_norm(bad)


def test_operator_norm_matches_svd_and_power(rng):
    A = rng.standard_normal((600, 40)) + 1j * rng.standard_normal((600, 40))
    # above the SVD limit, the power branch is used
    assert operator_norm(A) == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-10)
    B = rng.standard_normal((5, 3))
    assert operator_norm(B) == pytest.approx(np.linalg.svd(B, compute_uv=False)[0], rel=1e-14)


def test_contraction_boundary():
    assert is_contraction(np.eye(3) * (1 + 5e-9))
    assert not is_contraction(np.eye(3) * (1 + 1e-7))


def test_psd_helpers():
    H = np.array([[1, 1j], [-1j, 1]])
    assert psd_check(H)
    R = psd_sqrt(H)
    assert np.allclose(R @ R, H, atol=1e-12)
    with pytest.raises(NotPSD):
        psd_sqrt(np.diag([1.0, -1e-3]))
    with pytest.raises(NotHermitian):
        psd_check(np.array([[0, 1], [0, 0]]))
    # rounding-level negatives are clipped
    assert np.allclose(psd_sqrt(np.diag([4.0, -1e-12])), np.diag([2.0, 0.0]))


def test_kron_cap():
    with pytest.raises(DimensionCap):
        kron(np.eye(100), np.eye(100))
    assert kron(np.eye(2), np.ones((1, 3))).shape == (2, 6)


def test_defect_and_dilation(rng):
    T = random_contraction(4, rng, scale=0.9)
    D = defect(T)
    assert np.allclose(D @ D, np.eye(4) - T.conj().T @ T, atol=1e-12)
    U = unitary_dilation(T)
    assert np.allclose(U.conj().T @ U, np.eye(8), atol=1e-10)
    with pytest.raises(NotContraction):
        defect(2 * np.eye(2))


def test_block_toeplitz_layout():
    T = block_toeplitz_upper([1, 2, 3])
    assert np.array_equal(T, np.array([[1, 2, 3], [0, 1, 2], [0, 0, 1]]))
    with pytest.raises(InvalidMatrix):
        block_toeplitz_upper([np.eye(2), np.eye(3)])


def test_random_unitary(rng):
    U = random_unitary(5, rng)
    assert np.allclose(U @ U.conj().T, np.eye(5), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_json_round_trip(r, c, seed):
    g = np.random.default_rng(seed)
    A = g.standard_normal((r, c)) + 1j * g.standard_normal((r, c))
    assert np.array_equal(matrix_from_json(matrix_to_json(A)), A)


def test_json_malformed():
    with pytest.raises(InvalidMatrix):
        matrix_from_json({"rows": 2, "cols": 2, "data": [[1, 0]]})
    with pytest.raises(InvalidMatrix):
        matrix_from_json({"data": []})
