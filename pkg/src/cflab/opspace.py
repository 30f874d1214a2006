"""Operator-space structures on l1(n)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArityMismatch, NotContraction, SpectrumTooSparse
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, kron, operator_norm
from .poly import torus_maximize


def parrott_unitaries() -> tuple[np.ndarray, np.ndarray]:
    s = np.sqrt(3) / 2
    U = np.array([[0.5, s], [s, -0.5]], dtype=complex)
    V = np.array([[0.5, -s], [s, 0.5]], dtype=complex)
    return U, V


def _stack(A_list) -> np.ndarray:
    mats = [as_matrix(A) for A in A_list]
    if not mats:
        raise ArityMismatch("need at least one matrix")
    if any(m.shape != mats[0].shape for m in mats):
        raise ArityMismatch("matrices must share their shape")
    return np.array(mats)


def min_norm_search(A_list, grid: int = 360, refine_iters: int = 3):
    """sup over 𝕋^n of ‖sum z_i A_i‖ with z_1 pinned to 1, plus the maximizer."""
    S = _stack(A_list)
    n = len(S)

    def f(angles):
        z = np.concatenate([np.ones((len(angles), 1)), np.exp(1j * angles)], axis=1)
        M = np.einsum("mi,ijk->mjk", z, S)
        return np.linalg.norm(M, ord=2, axis=(1, 2))

    val, ang = torus_maximize(f, n - 1, grid, refine_iters, max_points=20_000_000)
    return val, np.concatenate([[1.0 + 0j], np.exp(1j * ang)])


def min_norm(A_list, grid: int = 360, refine_iters: int = 3) -> float:
    return min_norm_search(A_list, grid, refine_iters)[0]


@dataclass(frozen=True)
class Refutation:
    a1: complex
    a2: complex
    gap: float
    psi: float


def finite_embedding_refuter(thetas) -> Refutation:
    """a = (1, e^{iψ}) with max_j |1 + e^{i(θ_j + ψ)}| < 2.

    ψ is the midpoint of the largest gap of {-θ_j}, so every θ_j + ψ stays
    as far from 0 as possible.
    """
    th = np.sort(np.mod(-np.asarray(thetas, dtype=float), 2 * np.pi))
    if th.size == 0:
        psi = 0.0
    else:
        nxt = np.append(th[1:], th[0] + 2 * np.pi)
        gaps = nxt - th
        k = int(np.argmax(gaps))
        psi = float(np.mod(th[k] + gaps[k] / 2, 2 * np.pi))
    a2 = np.exp(1j * psi)
    worst = max((abs(1 + np.exp(1j * t) * a2) for t in np.asarray(thetas, float)), default=0.0)
    return Refutation(1.0 + 0j, complex(a2), float(2 - worst), psi)


def roots_diagonal(N: int) -> np.ndarray:
    return np.diag(np.exp(2j * np.pi * np.arange(N) / N))


def spectral_gap(T, samples: int = 4096) -> float:
    """max over ζ on a fine grid of 𝕋 of the distance from ζ to the spectrum of T."""
    ev = np.linalg.eigvals(as_matrix(T))
    zeta = np.exp(2j * np.pi * np.arange(samples) / samples)
    return float(np.abs(zeta[:, None] - ev[None, :]).min(axis=1).max())


def tensor_embedding(T_list) -> list[np.ndarray]:
    """T̃_i = I ⊗ ... ⊗ T_i ⊗ ... ⊗ I with T_i in slot i."""
    mats = [as_matrix(T) for T in T_list]
    out = []
    for i in range(len(mats)):
        M = np.eye(1, dtype=complex)
        for j, T in enumerate(mats):
            M = kron(M, T if i == j else np.eye(T.shape[0]))
        out.append(M)
    return out


def tensor_embedding_isometry_probe(T_list, trials: int = 100, eps_spec: float | None = None,
                                    seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> float:
    """max over random a of |‖sum a_i T̃_i‖ - ‖a‖_1|."""
    mats = [as_matrix(T) for T in T_list]
    for i, T in enumerate(mats):
        if operator_norm(T) > 1 + tol.spectral:
            raise NotContraction(f"T{i + 1} is not a contraction")
        gap = spectral_gap(T)
        limit = eps_spec if eps_spec is not None else 2 * np.pi / max(T.shape[0], 8)
        if gap > limit + 1e-12:
            raise SpectrumTooSparse(f"T{i + 1} leaves a gap of {gap:.3g} on the circle")
    rng = np.random.default_rng(seed)
    diag = all(np.allclose(T, np.diag(np.diag(T))) for T in mats)
    if diag:
        # the embedding of diagonal matrices is diagonal; work with eigenvalues
        grids = np.meshgrid(*[np.diag(T) for T in mats], indexing="ij")
        vals = np.stack([g.ravel() for g in grids], axis=1)
    else:
        emb = tensor_embedding(mats)
    worst = 0.0
    for t in range(trials):
        a = rng.standard_normal(len(mats)) + 1j * rng.standard_normal(len(mats))
        if t % 5 == 4:
            a[rng.integers(len(mats))] = 0
        if diag:
            nrm = float(np.abs(vals @ a).max())
        else:
            nrm = operator_norm(sum(ai * M for ai, M in zip(a, emb)))
        worst = max(worst, abs(nrm - np.abs(a).sum()))
    return worst


@dataclass(frozen=True)
class DemoReport:
    tensor_norm: float
    min_norm: float
    distinct: bool
    min_norm_point: tuple
    stand_in_norm: float
    stand_in_size: int
    h_normalized_norm: float


def parrott_oss_demo(grid: int = 360, N: int = 6, tol: Tolerance = DEFAULT_TOL) -> DemoReport:
    """Compare ‖I⊗I + U⊗U + V⊗V‖ with the MIN norm of (I, U, V)."""
    U, V = parrott_unitaries()
    I2 = np.eye(2)
    tensor = operator_norm(kron(I2, I2) + kron(U, U) + kron(V, V))
    mn, z = min_norm_search([I2, U, V], grid)
    # finite stand-ins: S_j = T̂_j ⊕ (I, U, V)_j with T̂_j the tensor
    # embedding of a roots-of-unity diagonal
    D = roots_diagonal(N)
    hats = tensor_embedding([D, D, D])
    S = [np.block([[h, np.zeros((h.shape[0], 2))], [np.zeros((2, h.shape[1])), B]])
         for h, B in zip(hats, (I2, U, V))]
    big = kron(S[0], I2) + kron(S[1], U) + kron(S[2], V)
    stand_in = operator_norm(big)
    h = (z[0] * I2 + z[1] * U + z[2] * V) / mn
    return DemoReport(tensor, mn, bool(tensor - mn > tol.grid), tuple(complex(c) for c in z),
                      stand_in, S[0].shape[0], operator_norm(h))
