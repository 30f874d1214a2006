"""Carathéodory–Fejér problems in one and two variables.

One-variable symbols on L²(𝕋) are stored as Laurent dicts ``{k: c_k}``.
``TruncatedMultOp`` realizes multiplication by such a symbol on the Fourier
modes -N..N, either periodically (a circulant, the default) or as the
banded Toeplitz compression.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DegreeOverflow,
    Infeasible,
    NotInClass,
    WindowMismatch,
    WindowTooSmall,
)
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    block_toeplitz_upper,
    hermitian_part,
    operator_norm,
    psd_check,
)
from .parrott import toeplitz_extend_step
from .poly import MultiPoly

Laurent = Mapping[int, complex]


def _clean(sym: Mapping[int, complex], atol: float = 0.0) -> dict[int, complex]:
    return {int(k): complex(c) for k, c in sym.items() if abs(c) > atol}


def laurent_mul(a: Laurent, b: Laurent) -> dict[int, complex]:
    out: dict[int, complex] = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return _clean(out)


def laurent_add(a: Laurent, b: Laurent, s: complex = 1.0) -> dict[int, complex]:
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0) + s * c
    return _clean(out)


def laurent_conj(a: Laurent) -> dict[int, complex]:
    """Symbol of the adjoint: conj(q(λ)) on 𝕋."""
    return {-k: complex(c).conjugate() for k, c in a.items()}


def laurent_eval(a: Laurent, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=complex)
    out = np.zeros_like(lam)
    for k, c in a.items():
        out = out + c * lam ** k
    return out


def laurent_sup(a: Laurent, grid: int = 4096) -> float:
    lam = np.exp(2j * np.pi * np.arange(grid) / grid)
    return float(np.abs(laurent_eval(a, lam)).max(initial=0.0))


def poly_to_laurent(q) -> dict[int, complex]:
    if isinstance(q, MultiPoly):
        return {k: c for (k,), c in q.terms.items()}
    if isinstance(q, Mapping):
        return _clean(q)
    return _clean(dict(enumerate(np.atleast_1d(np.asarray(q, dtype=complex)))))


def format_laurent(a: Laurent, digits: int = 10) -> str:
    if not a:
        return "0"
    parts = []
    for k in sorted(a):
        c = a[k]
        cs = f"{c.real:.{digits}g}" if abs(c.imag) < 1e-14 else f"({c.real:.{digits}g}{c.imag:+.{digits}g}i)"
        parts.append(cs if k == 0 else f"{cs} z" if k == 1 else f"{cs} z^{k}")
    return " + ".join(parts)


@dataclass(frozen=True, eq=False)
class TruncatedMultOp:
    """Multiplication by a Laurent symbol on the Fourier window -N..N."""

    symbol: Mapping[int, complex]
    window: int = 16
    mode: str = "periodic"

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be positive")
        if self.mode not in ("periodic", "toeplitz"):
            raise ValueError("mode must be 'periodic' or 'toeplitz'")
        object.__setattr__(self, "symbol", _clean(self.symbol))

    @classmethod
    def of(cls, q, window: int = 16, mode: str = "periodic") -> "TruncatedMultOp":
        return cls(poly_to_laurent(q), window, mode)

    @property
    def size(self) -> int:
        return 2 * self.window + 1

    def matrix(self) -> np.ndarray:
        n, N = self.size, self.window
        M = np.zeros((n, n), dtype=complex)
        idx = np.arange(n)
        for k, c in self.symbol.items():
            if self.mode == "periodic":
                M[(idx + k) % n, idx] += c
            else:
                ok = (idx + k >= 0) & (idx + k < n)
                M[idx[ok] + k, idx[ok]] += c
        return M

    def norm(self) -> float:
        return operator_norm(self.matrix())

    def _same(self, other: "TruncatedMultOp"):
        if (self.window, self.mode) != (other.window, other.mode):
            raise WindowMismatch(
                f"window/mode {self.window}/{self.mode} vs {other.window}/{other.mode}"
            )

    def __mul__(self, other: "TruncatedMultOp") -> "TruncatedMultOp":
        self._same(other)
        return TruncatedMultOp(laurent_mul(self.symbol, other.symbol), self.window, self.mode)

    def __add__(self, other: "TruncatedMultOp") -> "TruncatedMultOp":
        self._same(other)
        return TruncatedMultOp(laurent_add(self.symbol, other.symbol), self.window, self.mode)

    def adjoint(self) -> "TruncatedMultOp":
        return TruncatedMultOp(laurent_conj(self.symbol), self.window, self.mode)

    def degree_range(self) -> tuple[int, int]:
        if not self.symbol:
            return 0, 0
        return min(self.symbol), max(self.symbol)


def symbol_from_matrix(X: np.ndarray, window: int, mode: str = "periodic",
                       band: int | None = None) -> tuple[dict[int, complex], float]:
    """Read a Laurent symbol off a (near) Toeplitz matrix on the window.

    Periodic matrices are read from the first column. Toeplitz compressions
    are read on the central sub-band of half-width ``band`` (default N/4),
    averaging along each diagonal. Also returns the largest deviation from
    constancy along the sampled diagonals.
    """
    n = 2 * window + 1
    X = np.asarray(X)
    if mode == "periodic":
        col = X[:, 0]
        sym = {}
        for r in range(n):
            k = r if r <= window else r - n
            sym[k] = col[r]
        # deviation from being a circulant
        C = np.array([np.roll(col, j) for j in range(n)]).T
        return sym, float(np.abs(C - X).max())
    h = window // 4 if band is None else band
    c = window
    sym, dev = {}, 0.0
    for k in range(-2 * h, 2 * h + 1):
        vals = np.array([X[c + m + k, c + m] for m in range(-h, h + 1)])
        sym[k] = complex(vals.mean())
        dev = max(dev, float(np.abs(vals - vals.mean()).max()))
    return sym, dev


# -- one variable --------------------------------------------------------------

@dataclass(frozen=True)
class CFProblem1D:
    a1: complex
    a2: complex


def cf1_feasible(prob: CFProblem1D, tol: Tolerance = DEFAULT_TOL) -> bool:
    return abs(prob.a2) + abs(prob.a1) ** 2 <= 1 + tol.algebraic


@dataclass(frozen=True, eq=False)
class RationalMap:
    """f = num / den with one-variable polynomials."""

    num: MultiPoly
    den: MultiPoly

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        n = laurent_eval(poly_to_laurent(self.num), z)
        d = laurent_eval(poly_to_laurent(self.den), z)
        return n / d

    def taylor(self, order: int) -> list[complex]:
        """Power-series coefficients c_0..c_order."""
        a = self.num.coeff_list() + [0j] * (order + 1)
        b = self.den.coeff_list() + [0j] * (order + 1)
        c = []
        for k in range(order + 1):
            s = a[k] - sum(b[j] * c[k - j] for j in range(1, k + 1))
            c.append(s / b[0])
        return c

    def sup_norm(self, grid: int = 4096) -> float:
        lam = np.exp(2j * np.pi * np.arange(grid) / grid)
        return float(np.abs(self(lam)).max())


def cf1_construct(prob: CFProblem1D, theta: float = 0.0,
                  tol: Tolerance = DEFAULT_TOL) -> RationalMap:
    """Extremal f with f(0) = 0, f'(0) = a1, f''(0)/2 = a2 and sup |f| <= 1.

    On the boundary |a2| + |a1|^2 = 1 the map is z(uz + a1)/(1 + conj(a1) u z)
    with u = a2 / (1 - |a1|^2). Interior data (a1, a2) = t (b1, b2) is
    scaled from a boundary point (b1, b2), which exists because the
    feasible set is balanced.
    """
    if not cf1_feasible(prob, tol):
        raise Infeasible(f"|a2| + |a1|^2 = {abs(prob.a2) + abs(prob.a1) ** 2:.12g} > 1")
    a1, a2 = complex(prob.a1), complex(prob.a2)
    r1, r2 = abs(a1), abs(a2)
    t = (r2 + math.sqrt(r2 * r2 + 4 * r1 * r1)) / 2
    if t == 0:
        return RationalMap(MultiPoly.zero(1), MultiPoly.constant(1.0, 1))
    t = min(t, 1.0)
    b1, b2 = a1 / t, a2 / t
    rest = 1 - abs(b1) ** 2
    if rest <= tol.algebraic:
        # |b1| = 1: the Blaschke factor collapses to the constant b1
        b1 = b1 / abs(b1)
        return RationalMap(MultiPoly.from_coeffs([0, t * b1]), MultiPoly.constant(1.0, 1))
    u = b2 / rest if abs(b2) > 0 else cmath.exp(1j * theta)
    u = u / abs(u)
    num = MultiPoly.from_coeffs([0, t * b1, t * u])
    den = MultiPoly.from_coeffs([1, np.conj(b1) * u])
    return RationalMap(num, den)


def cayley_coeffs_1d(a: Sequence[complex], n: int) -> list[complex]:
    """c_0 = 1/2 and c_k = a_k + sum_{j=1}^{k-1} a_j c_{k-j}."""
    a = [0j] + [complex(x) for x in a] + [0j] * (n + 1)
    c = [0.5 + 0j]
    for k in range(1, n + 1):
        c.append(a[k] + sum(a[j] * c[k - j] for j in range(1, k)))
    return c


def kp_matrices(a: Sequence[complex], n: int):
    """(P_n, C_n, A_n) for the identity P_n C_n^t P_n^* = (I - A_n A_n^*) ⊕ 1."""
    coeffs = list(a)[:n] + [0j] * max(0, n - len(a))
    c = cayley_coeffs_1d(coeffs, n)
    C = np.zeros((n + 1, n + 1), dtype=complex)
    for j in range(n + 1):
        for k in range(n + 1):
            if j == k:
                C[j, k] = 1.0
            elif j > k:
                C[j, k] = c[j - k]
            else:
                C[j, k] = np.conj(c[k - j])
    P = block_toeplitz_upper([1.0] + [-complex(x) for x in coeffs])
    A = block_toeplitz_upper(coeffs) if n else np.zeros((0, 0))
    return P, C, A


def kp_identity_check(a: Sequence[complex], n: int) -> float:
    P, C, A = kp_matrices(a, n)
    rhs = np.zeros((n + 1, n + 1), dtype=complex)
    rhs[:n, :n] = np.eye(n) - A @ A.conj().T
    rhs[n, n] = 1.0
    return operator_norm(P @ C.T @ P.conj().T - rhs)


# -- D-slice ordering ----------------------------------------------------------

@dataclass(frozen=True, order=True)
class DSliceIndex:
    diagonal: int
    x: int
    y: int = field(compare=True)

    @classmethod
    def at(cls, x: int, y: int) -> "DSliceIndex":
        return cls(x + y, x, y)

    @property
    def point(self) -> tuple[int, int]:
        return self.x, self.y


def dslice_enumerate(window: int) -> list[DSliceIndex]:
    """All (x, y) with |x + y| <= W and |x| <= W, in D-slice order."""
    if window < 0:
        raise ValueError("window must be non-negative")
    pts = [DSliceIndex.at(x, k - x)
           for k in range(-window, window + 1)
           for x in range(-window, window + 1)]
    return sorted(pts)


# -- two variables -------------------------------------------------------------

def kp_matrix_2d(C_blocks: Sequence[TruncatedMultOp], m: int | None = None) -> np.ndarray:
    """Block Toeplitz-Hermitian matrix with I on the diagonal, C_j below and C_j^* above."""
    blocks = list(C_blocks)
    m = len(blocks) if m is None else m
    if m > len(blocks):
        raise ValueError(f"need {m} blocks, got {len(blocks)}")
    blocks = blocks[:m]
    for b in blocks[1:]:
        blocks[0]._same(b)
    if not blocks:
        return np.eye(1, dtype=complex)
    d = blocks[0].size
    mats = [b.matrix() for b in blocks]
    K = np.zeros(((m + 1) * d, (m + 1) * d), dtype=complex)
    for i in range(m + 1):
        K[i * d:(i + 1) * d, i * d:(i + 1) * d] = np.eye(d)
        for j in range(i):
            M = mats[i - j - 1]
            K[i * d:(i + 1) * d, j * d:(j + 1) * d] = M
            K[j * d:(j + 1) * d, i * d:(i + 1) * d] = M.conj().T
    return K


def cayley_coeffs_2d(A_blocks: Sequence[TruncatedMultOp], n: int | None = None) -> list[TruncatedMultOp]:
    """C_k = A_k + sum_{j=1}^{k-1} A_j C_{k-j}, computed on symbols."""
    A = list(A_blocks)
    n = len(A) if n is None else n
    if not A:
        return []
    ref = A[0]
    zero = TruncatedMultOp({}, ref.window, ref.mode)
    A = A + [zero] * max(0, n - len(A))
    C: list[TruncatedMultOp] = []
    for k in range(1, n + 1):
        ck = A[k - 1]
        for j in range(1, k):
            ck = ck + A[j - 1] * C[k - j - 1]
        lo, hi = ck.degree_range()
        if ck.symbol and (lo < 0 or hi > k):
            raise DegreeOverflow(f"C_{k} has degree range [{lo}, {hi}]")
        C.append(ck)
    return C


@dataclass(frozen=True)
class CFProblem2D:
    a10: complex
    a01: complex
    a20: complex
    a11: complex
    a02: complex

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "CFProblem2D":
        from .poly import slice_polynomials

        slice_polynomials(p)  # validates degree and constant term
        g = p.coeff
        return cls(g((1, 0)), g((0, 1)), g((2, 0)), g((1, 1)), g((0, 2)))

    @property
    def p1(self) -> dict[int, complex]:
        return _clean({0: self.a10, 1: self.a01})

    @property
    def p2(self) -> dict[int, complex]:
        return _clean({0: self.a20, 1: self.a11, 2: self.a02})

    def poly(self) -> MultiPoly:
        return MultiPoly(2, {(1, 0): self.a10, (0, 1): self.a01, (2, 0): self.a20,
                             (1, 1): self.a11, (0, 2): self.a02})


def _nodes(grid: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(grid) / grid)


def pointwise_defect_max(prob: CFProblem2D, grid: int = 4096) -> float:
    lam = _nodes(grid)
    return float((np.abs(laurent_eval(prob.p2, lam)) + np.abs(laurent_eval(prob.p1, lam)) ** 2).max())


@dataclass(frozen=True)
class NecessaryReport:
    pointwise_max: float
    operator_norm: float
    feasible: bool
    agree: bool


def cf2_necessary_report(prob: CFProblem2D, grid: int = 4096, window: int = 16,
                         tol: Tolerance = DEFAULT_TOL) -> NecessaryReport:
    pmax = pointwise_defect_max(prob, grid)
    feasible = pmax <= 1 + tol.grid
    T = block_toeplitz_upper([TruncatedMultOp(prob.p1, window).matrix(),
                              TruncatedMultOp(prob.p2, window).matrix()])
    nrm = operator_norm(T)
    # The operator test samples fewer nodes, so it can only be looser.
    agree = (nrm <= 1 + tol.grid) or not feasible
    return NecessaryReport(pmax, nrm, feasible, agree)


def cf2_necessary(prob: CFProblem2D, grid: int = 4096, window: int = 16,
                  tol: Tolerance = DEFAULT_TOL) -> bool:
    rep = cf2_necessary_report(prob, grid, window, tol)
    if not rep.agree:
        raise ArithmeticError("pointwise and operator forms of the necessary condition disagree")
    return rep.feasible


@dataclass
class CF2Result:
    status: str
    blocks: list = field(default_factory=list)
    violation_k: int | None = None
    forced_symbol: dict | None = None
    norms: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    caveat: str | None = None
    degenerate: bool = False

    @property
    def extended(self) -> bool:
        return self.status == "Extended"


def _is_degenerate(prob: CFProblem2D, grid: int = 4096, atol: float = 1e-9) -> bool:
    lam = _nodes(grid)
    p1 = laurent_eval(prob.p1, lam)
    p2 = laurent_eval(prob.p2, lam)
    return bool(np.abs((1 - np.abs(p1) ** 2) ** 2 - np.abs(p2) ** 2).max() <= atol)


def cf2_extend(prob: CFProblem2D, max_degree: int = 4, window: int = 16,
               mode: str = "periodic", tol: Tolerance = DEFAULT_TOL) -> CF2Result:
    """Grow p_3, p_4, ... by Parrott steps with V = 0 and check each is a polynomial."""
    if max_degree >= window / 2:
        raise WindowTooSmall(f"max_degree {max_degree} needs window > {2 * max_degree}")
    if not cf2_necessary(prob, window=window, tol=tol):
        raise Infeasible("|p1|^2 + |p2| exceeds 1 somewhere on the circle")
    ops = [TruncatedMultOp(prob.p1, window, mode), TruncatedMultOp(prob.p2, window, mode)]
    mats = [o.matrix() for o in ops]
    res = CF2Result("Extended", blocks=[dict(prob.p1), dict(prob.p2)],
                    degenerate=_is_degenerate(prob))
    shift = TruncatedMultOp({1: 1.0}, window, mode).matrix()
    for k in range(3, max_degree + 1):
        X = toeplitz_extend_step(mats, tol=tol)
        sym, dev = symbol_from_matrix(X, window, mode)
        res.norms.append(operator_norm(block_toeplitz_upper(mats + [X])))
        if mode == "periodic":
            res.residuals.append(float(np.abs(X @ shift - shift @ X).max()))
        else:
            res.residuals.append(dev)
        bad = {j: c for j, c in sym.items() if (j < 0 or j > k) and abs(c) > tol.spectral}
        if bad or dev > np.sqrt(tol.spectral):
            res.status = "DegreeViolation"
            res.violation_k = k
            res.forced_symbol = _clean(sym, tol.spectral)
            if not res.degenerate:
                res.caveat = ("V = 0 was used at every step; another Parrott "
                              "solution might still extend this instance")
            return res
        clean = _clean(sym, tol.spectral)
        res.blocks.append(clean)
        # rebuild from the cleaned symbol so rounding does not accumulate
        mats.append(TruncatedMultOp(clean, window, mode).matrix())
    return res


def assemble_polynomial(blocks: Sequence[Laurent]) -> MultiPoly:
    """f = sum_k sum_j c_{k,j} z1^{k-j} z2^j from slices p_k(λ) = sum_j c_{k,j} λ^j."""
    terms = {}
    for k, sym in enumerate(blocks, start=1):
        for j, c in sym.items():
            if not 0 <= j <= k:
                raise DegreeOverflow(f"slice {k} has power {j}")
            terms[(k - j, j)] = c
    return MultiPoly(2, terms)


# -- sufficiency class ---------------------------------------------------------

def _mobius_series(w: complex, u: complex, order: int) -> list[complex]:
    """Taylor coefficients of (u z + w) / (1 + conj(w) u z)."""
    out = [w]
    r = -np.conj(w) * u
    # (uz + w) * sum (r z)^k
    for k in range(1, order + 1):
        out.append(u * r ** (k - 1) + w * r ** k)
    return out


def _extend_affine(c0: complex, c1: complex, order: int):
    """Series and sup norm of an extremal extension of c0 + c1 z.

    The extension has the form s * Möbius with s = ‖𝒯(c0, c1)‖.
    """
    s = operator_norm(np.array([[c0, c1], [0, c0]], dtype=complex))
    if s == 0:
        return [0j] * (order + 1), 0.0, (lambda z: 0 * z)
    w, v = c0 / s, c1 / s
    rest = 1 - abs(w) ** 2
    if rest <= 1e-14 or abs(v) == 0:
        ser = [c0] + [0j] * order
        return ser, abs(c0), (lambda z: c0 + 0 * z)
    u = v / rest
    u = u / abs(u)
    ser = [s * c for c in _mobius_series(w, u, order)]
    return ser, s, (lambda z: s * (u * z + w) / (1 + np.conj(w) * u * z))


@dataclass
class SufficiencyReport:
    case: int
    coefficients: MultiPoly
    sup_norm: float
    norm_bound: float
    jet_residual: float
    split_a: float | None = None
    lam: float | None = None


def _arg_condition(alpha, beta, gamma, delta, atol=1e-9) -> bool:
    if alpha * beta * gamma * delta == 0:
        return True
    d = cmath.phase(alpha) - cmath.phase(beta) - cmath.phase(gamma) + cmath.phase(delta)
    return abs(cmath.exp(1j * d) - 1) <= atol


def cf2_sufficient_class(alpha: complex, beta: complex, gamma: complex, delta: complex,
                         max_degree: int = 8, grid: int = 256,
                         tol: Tolerance = DEFAULT_TOL) -> SufficiencyReport:
    """Constructive extension for p1 = γ + δz, p2 = (α + βz)(γ + δz)."""
    if not _arg_condition(alpha, beta, gamma, delta):
        raise NotInClass("need αβγδ = 0 or arg α - arg β = arg γ - arg δ")
    p1 = {0: gamma, 1: delta}
    p2 = laurent_mul({0: alpha, 1: beta}, p1)
    prob = CFProblem2D(gamma, delta, p2.get(0, 0), p2.get(1, 0), p2.get(2, 0))
    if pointwise_defect_max(prob) > 1 + tol.grid:
        raise Infeasible("|p1|^2 + |p2| exceeds 1 on the circle")
    L = MultiPoly(2, {(1, 0): gamma, (0, 1): delta})
    order = max_degree
    split_a = lam = None
    if beta == 0:
        case = 1
        ser, s, g = _extend_affine(1.0, alpha, order)
        S = MultiPoly(2, {(k, 0): c for k, c in enumerate(ser)})
        F = lambda z1, z2: (gamma * z1 + delta * z2) * g(z1)
        bound = (abs(gamma) + abs(delta)) * s
    elif alpha == 0:
        case = 2
        ser, s, g = _extend_affine(1.0, beta, order)
        S = MultiPoly(2, {(0, k): c for k, c in enumerate(ser)})
        F = lambda z1, z2: (gamma * z1 + delta * z2) * g(z2)
        bound = (abs(gamma) + abs(delta)) * s
    else:
        case = 3
        lam = abs(alpha) / abs(beta)
        split_a = lam / (1 + lam)
        ser1, s1, g1 = _extend_affine(split_a, alpha, order)
        ser2, s2, g2 = _extend_affine(1 - split_a, beta, order)
        terms = {(k, 0): c for k, c in enumerate(ser1)}
        for k, c in enumerate(ser2):
            terms[(0, k)] = terms.get((0, k), 0) + c
        S = MultiPoly(2, terms)
        F = lambda z1, z2: (gamma * z1 + delta * z2) * (g1(z1) + g2(z2))
        bound = (abs(gamma) + abs(delta)) * (s1 + s2)
    full = L * S
    coeffs = MultiPoly(2, {e: c for e, c in full.terms.items() if sum(e) <= max_degree})
    target = prob.poly()
    jet = max(abs(coeffs.coeff(e) - target.coeff(e))
              for e in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)])
    th = 2 * np.pi * np.arange(grid) / grid
    Z1, Z2 = np.meshgrid(np.exp(1j * th), np.exp(1j * th), indexing="ij")
    sup = float(np.abs(F(Z1, Z2)).max())
    if sup > 1 + tol.grid or bound > 1 + tol.grid:
        raise ArithmeticError(f"constructed extension has norm {sup} (bound {bound})")
    return SufficiencyReport(case, coeffs, sup, bound, float(jet), split_a, lam)


# -- extremal value ------------------------------------------------------------

@dataclass(frozen=True)
class ExtremalValue:
    value: float
    scalar_sup: float
    window: int


def extremal_value(prob: CFProblem2D, window: int = 16, grid: int = 4096,
                   tol: Tolerance = DEFAULT_TOL) -> ExtremalValue:
    """‖𝒯(M_p1, M_p2)‖ at the window, with the pointwise form sup_λ ‖𝒯(p1(λ), p2(λ))‖."""
    T = block_toeplitz_upper([TruncatedMultOp(prob.p1, window).matrix(),
                              TruncatedMultOp(prob.p2, window).matrix()])
    val = operator_norm(T)
    lam = _nodes(grid)
    a = laurent_eval(prob.p1, lam)
    b = laurent_eval(prob.p2, lam)
    # norm of [[a, b], [0, a]] in closed form
    s = np.abs(a) ** 2 + np.abs(b) ** 2 / 2
    scalar = float(np.sqrt(s + np.sqrt(np.maximum(s * s - np.abs(a) ** 4, 0))).max())
    if val > scalar + tol.grid:
        raise ArithmeticError(f"truncated value {val} exceeds the pointwise sup {scalar}")
    return ExtremalValue(val, scalar, window)
