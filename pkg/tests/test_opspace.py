import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cflab.errors import ArityMismatch, NotContraction, SpectrumTooSparse
from cflab.linalg import kron, operator_norm
from cflab.opspace import (finite_embedding_refuter, min_norm, min_norm_search,
                           parrott_oss_demo, parrott_unitaries, roots_diagonal, spectral_gap,
                           tensor_embedding, tensor_embedding_isometry_probe)


def test_unitaries():
    U, V = parrott_unitaries()
    for M in (U, V):
        assert np.allclose(M @ M.conj().T, np.eye(2))
    I2 = np.eye(2)
    assert operator_norm(kron(I2, I2) + kron(U, U) + kron(V, V)) == pytest.approx(3.0, abs=1e-12)


def test_min_norm_value_and_brute_force():
    U, V = parrott_unitaries()
    mn, z = min_norm_search([np.eye(2), U, V], 360)
    # derived closed form 1 + √3
    assert mn == pytest.approx(1 + np.sqrt(3), abs=1e-9)
    assert operator_norm(z[0] * np.eye(2) + z[1] * U + z[2] * V) == pytest.approx(mn)
    t = 2 * np.pi * np.arange(120) / 120
    brute = max(operator_norm(np.eye(2) + np.exp(1j * a) * U + np.exp(1j * b) * V)
                for a in t for b in t)
    assert brute <= mn + 1e-12 and brute >= mn - 1e-3


def test_min_norm_commuting_is_l1():
    D = [np.diag([1, 1j]), np.diag([1, -1]), np.eye(2)]
    assert min_norm(D, 120) == pytest.approx(3.0, abs=1e-9)
    with pytest.raises(ArityMismatch):
        min_norm([np.eye(2), np.eye(3)])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=0, max_size=30))
def test_refuter_always_finds_a_gap(thetas):
    r = finite_embedding_refuter(thetas)
    assert abs(r.a1) == pytest.approx(1.0) and abs(r.a2) == pytest.approx(1.0)
    worst = max((abs(r.a1 + np.exp(1j * t) * r.a2) for t in thetas), default=0.0)
    assert worst < 2
    assert r.gap == pytest.approx(2 - worst)


def test_refuter_gap_is_optimal_for_roots():
    # N equispaced angles: best possible worst case is |1 + e^{iπ/N}|
    N = 7
    r = finite_embedding_refuter(2 * np.pi * np.arange(N) / N)
    assert 2 - r.gap == pytest.approx(2 * np.cos(np.pi / (2 * N)), abs=1e-12)


@pytest.mark.parametrize("N", [4, 16, 50])
def test_spectral_gap_of_roots(N):
    assert spectral_gap(roots_diagonal(N), 8192) == pytest.approx(2 * np.sin(np.pi / (2 * N)), abs=1e-3)


def test_tensor_embedding_commutes():
    D = roots_diagonal(3)
    R = np.array([[0, 1], [1, 0]])
    T = tensor_embedding([D, R])
    assert T[0].shape == (6, 6)
    assert np.allclose(T[0] @ T[1], T[1] @ T[0])
    assert np.allclose(T[1], np.kron(np.eye(3), R))


def test_isometry_probe_improves_with_N():
    devs = [tensor_embedding_isometry_probe([roots_diagonal(N)] * 3, trials=60) for N in (8, 32)]
    assert devs[1] < devs[0]
    # a ∈ C³ loses at most ‖a‖₁ (1 - cos(π/N)) per coordinate
    assert devs[1] < 0.01
    # the dense path agrees with the diagonal fast path
    small = [roots_diagonal(8)] * 2
    U = np.linalg.qr(np.arange(1, 65).reshape(8, 8) + 1j)[0]
    conj = [U @ D @ U.conj().T for D in small]
    assert tensor_embedding_isometry_probe(conj, 20) == pytest.approx(
        tensor_embedding_isometry_probe(small, 20), abs=1e-9)


def test_isometry_probe_rejects():
    with pytest.raises(SpectrumTooSparse):
        tensor_embedding_isometry_probe([roots_diagonal(2)] * 2)
    with pytest.raises(NotContraction):
        tensor_embedding_isometry_probe([2 * roots_diagonal(8)])


def test_demo():
    rep = parrott_oss_demo()
    assert rep.tensor_norm == pytest.approx(3.0, abs=1e-12)
    assert rep.min_norm == pytest.approx(1 + np.sqrt(3), abs=1e-9)
    assert rep.distinct
    assert rep.stand_in_norm == pytest.approx(3.0, abs=1e-9)
    assert rep.h_normalized_norm == pytest.approx(1.0)


@pytest.mark.parametrize("thetas, psi, gap", [([0.0], np.pi, 2.0), ([0.0, np.pi], np.pi / 2, 2 - np.sqrt(2))])
def test_refuter_examples(thetas, psi, gap):
    r = finite_embedding_refuter(thetas)
    assert r.psi == pytest.approx(psi) and r.gap == pytest.approx(gap)
