"""Two-variable Hankel operators and the Nehari bracket at truncation scale.

L²(𝕋²) is split into slices: z1^j g(λ) with λ = z2/z1 and j ∈ ℤ. The
multiplication operator by φ then acts blockwise, block (i, j) being
multiplication by the slice function f_{i-j}. The outer index is
truncated as a compression; each inner block is the periodic realization
on the λ-window.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.optimize import linprog

from .cf import CFProblem2D, TruncatedMultOp
from .errors import WindowTooSmall
from .linalg import DEFAULT_TOL, Tolerance, operator_norm

Symbol2D = Mapping[tuple[int, int], complex]


def clean_symbol(phi: Symbol2D, atol: float = 0.0) -> dict[tuple[int, int], complex]:
    return {(int(m), int(n)): complex(c) for (m, n), c in phi.items() if abs(c) > atol}


def slice_functions(phi: Symbol2D) -> dict[int, dict[int, complex]]:
    """k -> f_k(λ) = sum_{m+n=k} a_{m,n} λ^n (as a Laurent dict)."""
    out: dict[int, dict[int, complex]] = {}
    for (m, n), c in clean_symbol(phi).items():
        out.setdefault(m + n, {})[n] = c
    return out


def evaluate_symbol(phi: Symbol2D, z1, z2) -> np.ndarray:
    z1, z2 = np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex)
    out = np.zeros(np.broadcast(z1, z2).shape, dtype=complex)
    for (m, n), c in phi.items():
        out = out + c * z1 ** m * z2 ** n
    return out


def _inner_window(slices, window: int) -> int:
    deg = max((abs(n) for f in slices.values() for n in f), default=0)
    return max(window, 2 * deg, 1)


def _check_window(slices, window: int):
    kmax = max((abs(k) for k in slices), default=0)
    if window < 2 * kmax:
        raise WindowTooSmall(f"window {window} < 2·{kmax}")


def mult_op_2d_matrix(phi: Symbol2D, window: int = 16) -> np.ndarray:
    """Block Laurent–Toeplitz truncation of M_φ on outer indices -W..W."""
    sl = slice_functions(phi)
    _check_window(sl, window)
    Ni = _inner_window(sl, window)
    d = 2 * Ni + 1
    blocks = {k: TruncatedMultOp(f, Ni).matrix() for k, f in sl.items()}
    W = 2 * window + 1
    M = np.zeros((W * d, W * d), dtype=complex)
    for i in range(W):
        for j in range(W):
            B = blocks.get(i - j)
            if B is not None:
                M[i * d:(i + 1) * d, j * d:(j + 1) * d] = B
    return M


def mult_op_2d_norm(phi: Symbol2D, window: int = 16) -> float:
    if not clean_symbol(phi):
        return 0.0
    return operator_norm(mult_op_2d_matrix(phi, window))


def hankel_2d(phi: Symbol2D, window: int = 16) -> np.ndarray:
    """W x W block Hankel matrix with (i, j) block M_{f_{-(i+j-1)}}, i, j >= 1."""
    sl = slice_functions(phi)
    _check_window(sl, window)
    Ni = _inner_window(sl, window)
    d = 2 * Ni + 1
    W = window
    H = np.zeros((W * d, W * d), dtype=complex)
    for i in range(1, W + 1):
        for j in range(1, W + 1):
            f = sl.get(-(i + j - 1))
            if f:
                H[(i - 1) * d:i * d, (j - 1) * d:j * d] = TruncatedMultOp(f, Ni).matrix()
    return H


def hankel_norm(phi: Symbol2D, window: int = 16) -> float:
    if not any(k < 0 for k in slice_functions(phi)):
        return 0.0
    return operator_norm(hankel_2d(phi, window))


def certified_sup(phi: Symbol2D, grid: int = 256) -> float:
    """Upper bound on sup over 𝕋² of |φ| from an FFT grid and a Bernstein factor."""
    phi = clean_symbol(phi)
    if not phi:
        return 0.0
    d1 = max(abs(m) for m, _ in phi)
    d2 = max(abs(n) for _, n in phi)
    while grid <= 4 * max(d1, d2):
        grid *= 2
    C = np.zeros((grid, grid), dtype=complex)
    for (m, n), c in phi.items():
        C[m % grid, n % grid] += c
    gmax = float(np.abs(np.fft.ifft2(C)).max()) * grid * grid
    return gmax / (np.cos(np.pi * d1 / grid) * np.cos(np.pi * d2 / grid))


def h1_family(budget: int) -> list[tuple[int, int]]:
    """Monomials z1^m z2^n with m + n >= 0 and |m|, |n|, m + n <= budget."""
    return [(m, n) for m in range(-budget, budget + 1) for n in range(-budget, budget + 1)
            if 0 <= m + n <= budget]


def _best_h1(phi: Symbol2D, family, grid: int, sides: int = 16) -> dict:
    """Minimize max_grid |φ - g| over g spanned by ``family``, as an LP.

    The modulus is bounded through ``sides`` supporting half-planes, so the
    LP value is within a factor 1/cos(π/sides) of the true grid optimum.
    The returned g is judged afterwards by ``certified_sup``.
    """
    th = 2 * np.pi * np.arange(grid) / grid
    Z1, Z2 = np.meshgrid(np.exp(1j * th), np.exp(1j * th), indexing="ij")
    z1, z2 = Z1.ravel(), Z2.ravel()
    target = evaluate_symbol(phi, z1, z2)
    B = np.stack([z1 ** m * z2 ** n for m, n in family], axis=1)
    K = len(family)
    rows, rhs = [], []
    for s in range(sides):
        u = np.exp(-2j * np.pi * s / sides)
        # Re(u (φ - B x)) <= t  with x = xr + i xi
        Bu = u * B
        rows.append(np.hstack([-Bu.real, Bu.imag, -np.ones((len(z1), 1))]))
        rhs.append(-(u * target).real)
    A_ub = np.vstack(rows)
    b_ub = np.concatenate(rhs)
    cost = np.zeros(2 * K + 1)
    cost[-1] = 1.0
    bounds = [(None, None)] * (2 * K) + [(0, None)]
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        return {}
    x = res.x[:K] + 1j * res.x[K:2 * K]
    return {e: c for e, c in zip(family, x)}


@dataclass
class NehariBracket:
    lower: float
    upper: float
    window: int
    budget: int
    trace: list = field(default_factory=list)
    g: dict = field(default_factory=dict)


def nehari_gap(phi: Symbol2D, window: int = 16, search_budget: int | None = None,
               grid: int = 48, tol: Tolerance = DEFAULT_TOL) -> NehariBracket:
    """Bracket dist(φ, H1) between ‖H_φ‖ and the best certified sup of φ - g.

    The trace lists the upper bound reached at each degree budget.
    """
    phi = clean_symbol(phi)
    budget = window // 2 if search_budget is None else search_budget
    lower = hankel_norm(phi, window)
    # the H1 part of φ is always a candidate
    g0 = {e: c for e, c in phi.items() if sum(e) >= 0}
    resid0 = {e: c for e, c in phi.items() if sum(e) < 0}
    best_g, upper = g0, certified_sup(resid0)
    trace = [(0, upper)]
    for b in range(1, budget + 1):
        g = _best_h1(resid0, h1_family(b), grid)
        if g:
            diff = dict(resid0)
            for e, c in g.items():
                diff[e] = diff.get(e, 0) - c
            u = certified_sup(diff)
            if u < upper:
                upper = u
                best_g = {e: g0.get(e, 0) + g.get(e, 0) for e in set(g0) | set(g)}
        trace.append((b, upper))
    if lower > upper + tol.grid:
        raise ArithmeticError(f"Hankel norm {lower} exceeds the distance bound {upper}")
    return NehariBracket(lower, upper, window, budget, trace, best_g)


def cf_symbol(prob: CFProblem2D) -> dict[tuple[int, int], complex]:
    """φ = conj(z1)^3 p on 𝕋²."""
    p = prob.poly()
    return {(m - 3, n): c for (m, n), c in p.terms.items()}


def cf_hankel_necessary(prob: CFProblem2D, window: int = 16,
                        tol: Tolerance = DEFAULT_TOL) -> bool:
    return hankel_norm(cf_symbol(prob), window) <= 1 + tol.spectral
