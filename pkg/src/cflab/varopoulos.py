"""Varopoulos operators of types I and II and the homomorphisms they induce.

Type I layout. For x, y in C^n the matrix acts on C ⊕ C^n ⊕ C with
basis (e, h_1..h_n, f):

    T_{x,y} e = sum_j y_j h_j,    T_{x,y} h = (sum_j x_j h_j) f,    T f = 0.

So column 0 carries y and the last row carries x, and
T_{x_j,y_j} T_{x_k,y_k} has the single entry x_j·y_k in the bottom-left
corner. The pairing x·y = sum x_i y_i is bilinear, not an inner product.
"""
from __future__ import annotations

import itertools
from typing import Mapping, Sequence

import numpy as np

from .errors import ArityMismatch, NonCommuting, PreconditionFailed
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, operator_norm
from .poly import (
    CommutingTuple,
    MultiPoly,
    functional_calculus,
    jet_at_zero,
    quadratic_form_poly,
)


def _vec(v) -> np.ndarray:
    return np.asarray(v, dtype=complex).ravel()


def build_type1(x, y) -> np.ndarray:
    x, y = _vec(x), _vec(y)
    if x.size != y.size:
        raise ArityMismatch(f"len(x)={x.size} but len(y)={y.size}")
    n = x.size
    T = np.zeros((n + 2, n + 2), dtype=complex)
    T[1:n + 1, 0] = y
    T[n + 1, 1:n + 1] = x
    return T


def build_type2(X, k: int) -> np.ndarray:
    """(k+1)x(k+1) block matrix with X on the first block superdiagonal."""
    X = as_matrix(X)
    if X.shape[0] != X.shape[1]:
        raise ArityMismatch("X must be square")
    if k < 1:
        raise ValueError("order k must be at least 1")
    return np.kron(np.eye(k + 1, k=1), X)


def pairing_matrix(xs, ys) -> np.ndarray:
    """A_{x,y}[j, k] = x_j · y_k (bilinear)."""
    X = np.array([_vec(x) for x in xs])
    Y = np.array([_vec(y) for y in ys])
    if X.shape != Y.shape:
        raise ArityMismatch("xs and ys must have matching shapes")
    return X @ Y.T


def commuting_type1_tuple(xs, ys, tol: Tolerance = DEFAULT_TOL) -> CommutingTuple:
    P = pairing_matrix(xs, ys)
    asym = np.abs(P - P.T).max()
    if asym > tol.algebraic * (1 + np.abs(P).max()):
        raise NonCommuting(f"pairing matrix asymmetric by {asym:.3e}")
    return CommutingTuple.from_matrices([build_type1(x, y) for x, y in zip(xs, ys)], tol)


def rho_eval(p: MultiPoly, omega, xs, ys, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """p(omega I + T) assembled from the Taylor jet of p at omega.

    The result is cross-checked against the functional calculus of the
    shifted tuple.
    """
    omega = _vec(omega)
    if not (p.nvars == len(xs) == len(ys) == omega.size):
        raise ArityMismatch("p, omega, xs and ys must share the number of variables")
    tup = commuting_type1_tuple(xs, ys, tol)
    q = p.shift(omega)
    grad, hess = jet_at_zero(q)
    X = np.array([_vec(x) for x in xs])
    Y = np.array([_vec(y) for y in ys])
    n = X.shape[1]
    out = q.coeff((0,) * p.nvars) * np.eye(n + 2, dtype=complex)
    out[1:n + 1, 0] = grad @ Y
    out[n + 1, 1:n + 1] = grad @ X
    out[n + 1, 0] = 0.5 * np.sum(hess * pairing_matrix(xs, ys))
    shifted = [omega[j] * np.eye(n + 2) + M for j, M in enumerate(tup.matrices)]
    direct = functional_calculus(p, shifted, tol)
    scale = 1 + np.abs(direct).max()
    if np.abs(direct - out).max() > 1e3 * tol.algebraic * scale:
        raise ArithmeticError("Taylor re-centering disagrees with the direct functional calculus")
    return out


def rho_reduced_matrix(df_x: float, df_y: float, corner: complex) -> np.ndarray:
    """[[corner, ‖Df·x‖], [‖Df·y‖, 0]].

    rho(f) - f(omega) I is unitarily equivalent to this matrix padded with
    zeros, so both have the same norm.
    """
    return np.array([[corner, abs(df_x)], [abs(df_y), 0.0]], dtype=complex)


def rho_contractive_iff(df_x, df_y, corner: complex) -> bool:
    """|corner|^2 <= (1 - ‖Df·x‖^2)(1 - ‖Df·y‖^2) with both norms at most 1."""
    a = float(np.linalg.norm(_vec(df_x)))
    b = float(np.linalg.norm(_vec(df_y)))
    if a > 1 or b > 1:
        return False
    return abs(corner) ** 2 <= (1 - a * a) * (1 - b * b)


def grothendieck_construction(A, xs, ys, tol: Tolerance = DEFAULT_TOL, grid: int = 72):
    """Type I tuple realizing |sum a_jk <x_j, y_k>| as ‖p(T)‖.

    Returns ``(tuple, value)``. ``<x, y>`` is the inner product linear in x.
    """
    from .bounds import norm_linf_to_l1

    A = as_matrix(A)
    n = A.shape[0]
    if A.shape != (n, n) or len(xs) != n or len(ys) != n:
        raise ArityMismatch("A must be n x n with n vectors in xs and ys")
    for v in list(xs) + list(ys):
        if abs(np.linalg.norm(_vec(v)) - 1) > tol.spectral:
            raise PreconditionFailed("xs and ys must be unit vectors")
    l1 = norm_linf_to_l1(A, grid)
    if l1 > 1 + tol.grid:
        raise PreconditionFailed(f"‖A‖_(l∞→l1) >= {l1:.6g} > 1")
    At = 0.5 * np.block([[np.zeros((n, n)), A], [A.T, np.zeros((n, n))]])
    vecs = [_vec(x) for x in xs] + [np.conj(_vec(y)) for y in ys]
    tup = commuting_type1_tuple(vecs, vecs, tol)
    P = functional_calculus(quadratic_form_poly(At), tup, tol)
    value = operator_norm(P)
    expected = abs(sum(A[j, k] * np.vdot(_vec(ys[k]), _vec(xs[j]))
                       for j in range(n) for k in range(n)))
    if abs(value - expected) > tol.algebraic * (1 + expected) * 10:
        raise ArithmeticError(f"construction value {value} differs from {expected}")
    return tup, value


# -- classical example data --------------------------------------------------

def vk_vectors():
    """The unit vectors x_i, y_i used for the classical p_V counterexample."""
    s = 1 / np.sqrt(3)
    xs = [s * np.array([1, -1, -1.0]), s * np.array([-1, 1, -1.0]), s * np.array([-1, -1, 1.0])]
    ys = list(np.eye(3))
    return xs, ys


def vk_triple() -> CommutingTuple:
    xs, ys = vk_vectors()
    return commuting_type1_tuple(xs, ys)


def centroid_vectors():
    """Three unit vectors in R^2 summing to zero."""
    return [np.array([1.0, 0.0]),
            np.array([-0.5, np.sqrt(3) / 2]),
            np.array([-0.5, -np.sqrt(3) / 2])]


# -- matrix-valued polynomials -------------------------------------------------

MatrixPoly = Mapping[tuple, np.ndarray]


def matrix_poly_eval(P: MatrixPoly, T) -> np.ndarray:
    """sum_a A_a ⊗ T^a for matrix coefficients A_a and a commuting tuple T."""
    if not isinstance(T, CommutingTuple):
        T = CommutingTuple.from_matrices(T)
    d = T.dim
    out = None
    for exp, Acoef in P.items():
        if len(exp) != len(T):
            raise ArityMismatch("exponent length does not match the tuple")
        M = np.eye(d, dtype=complex)
        for j, a in enumerate(exp):
            M = M @ np.linalg.matrix_power(T.matrices[j], a)
        term = np.kron(as_matrix(Acoef), M)
        out = term if out is None else out + term
    return out


def matrix_poly_sup_torus(P: MatrixPoly, nvars: int, grid: int = 64) -> float:
    """Grid lower bound on sup over T^n of ‖sum_a A_a z^a‖."""
    from .poly import torus_maximize

    exps = np.array(list(P), dtype=float).reshape(-1, nvars)
    mats = np.array([as_matrix(A) for A in P.values()])

    def f(angles):
        ph = np.exp(1j * angles @ exps.T)
        S = np.einsum("mt,tij->mij", ph, mats)
        return np.linalg.norm(S, ord=2, axis=(1, 2))

    val, _ = torus_maximize(f, nvars, grid, refine_iters=2)
    return val


def random_matrix_poly(nvars: int, degree: int, size: int, rng) -> dict:
    out = {}
    for exp in itertools.product(range(degree + 1), repeat=nvars):
        if sum(exp) <= degree:
            out[exp] = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return out
