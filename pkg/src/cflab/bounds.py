"""Quantitative experiments around degree-two von Neumann inequalities."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, DegreeTooHigh, NotContraction
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, operator_norm
from .poly import (
    A_V,
    CommutingTuple,
    MultiPoly,
    functional_calculus,
    p_V,
    sup_norm_torus,
    torus_maximize,
)

SECOND_DERIVATIVE_BOUND = 3 * np.sqrt(3) / 2


@dataclass(frozen=True)
class L1Search:
    value: float
    z: np.ndarray
    w: np.ndarray
    sign_value: float | None


def linf_to_l1_search(A, grid: int = 360, refine_iters: int = 3,
                      max_points: int = 50_000_000) -> L1Search:
    """sup over unimodular z, w of |z^t A w|, with its maximizing phases.

    For fixed z the best w gives ‖A^t z‖_1, so only z is searched, with
    z_1 pinned to 1.
    """
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("A must be square")
    if n > 6:
        raise BudgetExceeded("phase grids are limited to n <= 6")
    g = grid
    while g ** (n - 1) > max_points and g > 8:
        g //= 2
    At = A.T

    def f(angles):
        z = np.concatenate([np.ones((len(angles), 1)), np.exp(1j * angles)], axis=1)
        return np.abs(z @ A).sum(axis=1)

    val, ang = torus_maximize(f, n - 1, g, refine_iters, max_points=max_points)
    z = np.concatenate([[1.0], np.exp(1j * ang)])
    u = At @ z
    w = np.where(np.abs(u) > 0, np.conj(u) / np.where(np.abs(u) > 0, np.abs(u), 1), 1.0)
    sign_val = None
    if np.all(np.abs(A.imag) == 0):
        sign_val = max(
            float(np.abs(np.array((1,) + s) @ A.real).sum())
            for s in itertools.product((1.0, -1.0), repeat=n - 1)
        )
    return L1Search(max(val, sign_val or 0.0), z, w, sign_val)


def norm_linf_to_l1(A, grid: int = 360, refine_iters: int = 3) -> float:
    """Lower bound on ‖A‖ as a map from l∞(n) to l1(n)."""
    return linf_to_l1_search(A, grid, refine_iters).value


def bilinear_value(A, z, w) -> float:
    return float(abs(np.asarray(z) @ as_matrix(A) @ np.asarray(w)))


@dataclass(frozen=True)
class C2Experiment:
    ratio_best: float
    ratio_vk: float
    ratio_orthonormal: float
    pV_supnorm: float
    value_best: float
    value_vk: float
    value_orthonormal: float


def rho_norm_real_family(p: MultiPoly, xs) -> float:
    """‖p(T)‖ for the type I tuple with x_j = y_j."""
    from .varopoulos import commuting_type1_tuple

    return operator_norm(functional_calculus(p, commuting_type1_tuple(xs, xs)))


def c2_lower_experiment(grid: int = 360) -> C2Experiment:
    from .varopoulos import centroid_vectors, vk_triple

    p = p_V()
    sup = sup_norm_torus(p, grid)
    best = rho_norm_real_family(p, centroid_vectors())
    vk = operator_norm(functional_calculus(p, vk_triple()))
    ortho = rho_norm_real_family(p, list(np.eye(3)))
    return C2Experiment(best / sup, vk / sup, ortho / sup, sup, best, vk, ortho)


def min_inner_product_sum(m: int, n: int, restarts: int = 10, seed: int = 0,
                          iters: int = 2000, step: float = 0.1) -> float:
    """Minimize sum_{i<j} <x_i, x_j> over m unit vectors in R^n."""
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(restarts):
        X = rng.standard_normal((m, n))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        for _ in range(iters):
            G = X.sum(axis=0) - X
            X = X - step * G
            X /= np.linalg.norm(X, axis=1, keepdims=True)
        s = X.sum(axis=0)
        best = min(best, 0.5 * (s @ s - m))
    return float(best)


# -- second derivative probe ---------------------------------------------------

def hessian_fd(f, n: int, h: float = 1e-4) -> np.ndarray:
    """Complex Hessian at 0 of a holomorphic f by central differences.

    For holomorphic f the real-direction second differences equal the
    complex second derivatives. One Richardson step removes the h^2 term.
    """
    def raw(h):
        H = np.zeros((n, n), dtype=complex)
        E = np.eye(n)
        f0 = f(np.zeros(n, dtype=complex))
        for j in range(n):
            H[j, j] = (f(h * E[j]) - 2 * f0 + f(-h * E[j])) / h ** 2
            for k in range(j + 1, n):
                H[j, k] = H[k, j] = (
                    f(h * (E[j] + E[k])) - f(h * (E[j] - E[k]))
                    - f(h * (E[k] - E[j])) + f(-h * (E[j] + E[k]))
                ) / (4 * h * h)
        return H

    return (4 * raw(h / 2) - raw(h)) / 3


def _mobius(a, theta):
    return lambda z: np.exp(1j * theta) * (z - a) / (1 - np.conj(a) * z)


def _random_disc(rng, r=0.95):
    return r * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())


def random_disc_function(n: int, rng):
    """A holomorphic map from the polydisc into the closed disc."""
    kind = rng.integers(3)
    if kind == 0:
        # product of Möbius maps, possibly repeated per variable
        facs = []
        for j in range(n):
            for _ in range(rng.integers(0, 3)):
                facs.append((j, _mobius(_random_disc(rng), 2 * np.pi * rng.uniform())))
        return lambda z: np.prod([m(z[j]) for j, m in facs]) if facs else 1.0 + 0j
    if kind == 1:
        # convex combination of Möbius products
        parts = [random_disc_function_product(n, rng) for _ in range(rng.integers(2, 4))]
        wts = rng.dirichlet(np.ones(len(parts)))
        return lambda z: sum(w * g(z) for w, g in zip(wts, parts))
    # degree two polynomial scaled by a certified upper bound of its sup norm
    p = random_quadratic(n, rng)
    bound = certified_sup_upper(p)
    return lambda z: p(z) / bound


def random_disc_function_product(n: int, rng):
    facs = [(j, _mobius(_random_disc(rng), 2 * np.pi * rng.uniform()))
            for j in range(n) if rng.uniform() < 0.8]
    return lambda z: np.prod([m(z[j]) for j, m in facs]) if facs else 1.0 + 0j


def random_quadratic(n: int, rng) -> MultiPoly:
    terms = {}
    for exp in itertools.product(range(3), repeat=n):
        if 1 <= sum(exp) <= 2 or (sum(exp) == 0 and rng.uniform() < 0.5):
            terms[exp] = complex(rng.standard_normal(), rng.standard_normal())
    return MultiPoly(n, terms)


def certified_sup_upper(p: MultiPoly, grid: int = 32) -> float:
    """Upper bound for sup over T^n of |p| from a grid maximum.

    A trigonometric polynomial of degree d in one angle sampled at M
    equispaced points satisfies sup <= max_grid / cos(pi d / M); applying
    this once per coordinate gives a certified bound.
    """
    n = p.nvars
    degs = [max((e[j] for e in p.terms), default=0) for j in range(n)]
    if p.is_zero():
        return 0.0
    # values on the grid are a scaled inverse FFT of the coefficient array
    C = np.zeros((grid,) * n, dtype=complex)
    for exp, c in p.terms.items():
        C[tuple(e % grid for e in exp)] += c
    gmax = float(np.abs(np.fft.ifftn(C)).max()) * grid ** n
    factor = np.prod([1 / np.cos(np.pi * d / grid) for d in degs])
    return min(gmax * factor, p.coeff_l1())


@dataclass(frozen=True)
class ProbeResult:
    max_norm: float
    fraction_of_bound: float
    witness_norm: float
    samples: int


def second_derivative_bound_probe(samples: int = 2000, seed: int = 0, grid: int = 24,
                                  tol: Tolerance = DEFAULT_TOL) -> ProbeResult:
    """Largest ‖D²f(0)‖_(l∞→l1) over random f from the polydisc to the disc."""
    rng = np.random.default_rng(seed)
    # p_V / 5 is a known extremal-type witness; its norm uses the exact grid.
    witness = norm_linf_to_l1(2 * A_V() / 5, 360)
    best = witness
    for _ in range(max(samples - 1, 0)):
        n = int(rng.integers(2, 5))
        f = random_disc_function(n, rng)
        H = hessian_fd(f, n)
        best = max(best, norm_linf_to_l1(H, grid, refine_iters=2))
    if best > SECOND_DERIVATIVE_BOUND + tol.grid:
        raise AssertionError(f"second derivative bound violated: {best}")
    return ProbeResult(best, best / SECOND_DERIVATIVE_BOUND, witness, samples)


# -- scaffolding for the K_G inequality ----------------------------------------

def degree2_vn_bound_check(p: MultiPoly, T, k_bracket: float = 1.6,
                           k_is_upper: bool = True, grid: int = 120,
                           tol: Tolerance = DEFAULT_TOL):
    """Return (‖p(T)‖, (3√3/4)·K·sup|p|) for a commuting tuple of contractions."""
    if p.degree > 2:
        raise DegreeTooHigh(f"degree {p.degree} > 2")
    if not isinstance(T, CommutingTuple):
        T = CommutingTuple.from_matrices(T, tol)
    for i, M in enumerate(T.matrices):
        if operator_norm(M) > 1 + tol.spectral:
            raise NotContraction(f"T{i + 1} is not a contraction")
    lhs = operator_norm(functional_calculus(p, T, tol))
    rhs = 3 * np.sqrt(3) / 4 * k_bracket * (sup_norm_torus(p, grid) if not p.is_zero() else 0.0)
    if k_is_upper and lhs > rhs + tol.grid:
        raise AssertionError(f"‖p(T)‖ = {lhs} exceeds {rhs}")
    return lhs, rhs
