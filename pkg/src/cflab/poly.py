"""Sparse multivariate complex polynomials and torus optimization."""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ArityMismatch,
    BudgetExceeded,
    DegreeTooHigh,
    NonCommuting,
    NonzeroConstant,
    ParseError,
)
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, operator_norm

Exponent = tuple[int, ...]

MAX_GRID_POINTS = 200_000_000
_CHUNK = 1 << 17


@dataclass(frozen=True, eq=False)
class MultiPoly:
    """p(z) = sum_a c_a z^a with exponents stored as tuples of length ``nvars``."""

    nvars: int
    terms: Mapping[Exponent, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.nvars < 1:
            raise ValueError("nvars must be at least 1")
        clean: dict[Exponent, complex] = {}
        for exp, c in dict(self.terms).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != self.nvars:
                raise ArityMismatch(f"exponent {exp} does not have length {self.nvars}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent {exp}")
            c = complex(c)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError("non-finite coefficient")
            if c != 0:
                clean[exp] = clean.get(exp, 0) + c
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if c != 0})

    # construction ---------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars, {})

    @classmethod
    def constant(cls, c: complex, nvars: int) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, j: int, nvars: int) -> "MultiPoly":
        exp = [0] * nvars
        exp[j] = 1
        return cls(nvars, {tuple(exp): 1.0})

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[complex]) -> "MultiPoly":
        """One-variable polynomial from c0, c1, c2, ..."""
        return cls(1, {(k,): c for k, c in enumerate(coeffs)})

    # queries --------------------------------------------------------------
    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def coeff(self, exp: Iterable[int]) -> complex:
        return self.terms.get(tuple(exp), 0j)

    def coeff_l1(self) -> float:
        return float(sum(abs(c) for c in self.terms.values()))

    def coeff_list(self) -> list[complex]:
        """Dense coefficient list of a one-variable polynomial."""
        if self.nvars != 1:
            raise ArityMismatch("coeff_list needs a one-variable polynomial")
        out = [0j] * (self.degree + 1)
        for (k,), c in self.terms.items():
            out[k] = c
        return out

    def _arrays(self):
        exps = np.array(list(self.terms), dtype=float).reshape(-1, self.nvars)
        cs = np.array(list(self.terms.values()), dtype=complex)
        return exps, cs

    # arithmetic -----------------------------------------------------------
    def _check(self, other: "MultiPoly"):
        if other.nvars != self.nvars:
            raise ArityMismatch(f"{self.nvars} vs {other.nvars} variables")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(other, self.nvars)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return MultiPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: dict[Exponent, complex] = {}
        for (e1, c1), (e2, c2) in itertools.product(self.terms.items(), other.terms.items()):
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / complex(c))

    def __pow__(self, k: int):
        out = MultiPoly.constant(1.0, self.nvars)
        for _ in range(int(k)):
            out = out * self
        return out

    def allclose(self, other: "MultiPoly", atol: float = 1e-12) -> bool:
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.coeff(k) - other.coeff(k)) <= atol for k in keys)

    def __eq__(self, other):
        return isinstance(other, MultiPoly) and self.nvars == other.nvars and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {format_poly(self)!r})"

    # evaluation -----------------------------------------------------------
    def __call__(self, *z):
        if len(z) == 1 and np.ndim(z[0]) >= 1:
            z = z[0]
        return evaluate(self, z)

    def shift(self, omega: Sequence[complex]) -> "MultiPoly":
        """Taylor re-centering: returns q with q(z) = p(z + omega)."""
        omega = np.asarray(omega, dtype=complex).ravel()
        if omega.size != self.nvars:
            raise ArityMismatch(f"shift needs {self.nvars} numbers")
        out: dict[Exponent, complex] = {}
        for exp, c in self.terms.items():
            factors = [
                [(k, math.comb(a, k) * omega[j] ** (a - k)) for k in range(a + 1)]
                for j, a in enumerate(exp)
            ]
            for combo in itertools.product(*factors):
                e = tuple(k for k, _ in combo)
                w = c
                for _, f in combo:
                    w *= f
                out[e] = out.get(e, 0) + w
        return MultiPoly(self.nvars, out)

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [
                {"exp": list(e), "re": float(c.real), "im": float(c.imag)}
                for e, c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MultiPoly":
        try:
            return cls(int(obj["nvars"]), {
                tuple(t["exp"]): complex(t.get("re", 0.0), t.get("im", 0.0))
                for t in obj["terms"]
            })
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed polynomial JSON: {exc}") from None


def evaluate(p: MultiPoly, z) -> complex:
    z = np.asarray(z, dtype=complex).ravel()
    if z.size != p.nvars:
        raise ArityMismatch(f"expected {p.nvars} arguments, got {z.size}")
    total = 0j
    for exp, c in p.terms.items():
        total += c * np.prod(z ** np.array(exp))
    return complex(total)


def evaluate_many(p: MultiPoly, Z: np.ndarray) -> np.ndarray:
    """Evaluate at the rows of Z (shape (m, nvars))."""
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim != 2 or Z.shape[1] != p.nvars:
        raise ArityMismatch(f"points must have shape (m, {p.nvars})")
    out = np.zeros(Z.shape[0], dtype=complex)
    for exp, c in p.terms.items():
        out += c * np.prod(Z ** np.array(exp), axis=1)
    return out


def evaluate_torus(p: MultiPoly, angles: np.ndarray) -> np.ndarray:
    """Evaluate at exp(i*angles) for angles of shape (m, nvars)."""
    if p.is_zero():
        return np.zeros(len(angles), dtype=complex)
    exps, cs = p._arrays()
    return np.exp(1j * (angles @ exps.T)) @ cs


# -- the Varopoulos–Kaijser polynomial ----------------------------------------

def p_V() -> MultiPoly:
    """z1^2 + z2^2 + z3^2 - 2 z1 z2 - 2 z2 z3 - 2 z3 z1."""
    return MultiPoly(3, {
        (2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): 1,
        (1, 1, 0): -2, (0, 1, 1): -2, (1, 0, 1): -2,
    })


def A_V() -> np.ndarray:
    """Symmetric coefficient matrix of p_V, so p_V(z) = z^t A_V z."""
    return 2 * np.eye(3) - np.ones((3, 3))


def quadratic_form_poly(A) -> MultiPoly:
    """p_A(z) = sum_{jk} a_jk z_j z_k."""
    A = as_matrix(A)
    n = A.shape[0]
    terms: dict[Exponent, complex] = {}
    for j in range(n):
        for k in range(n):
            e = [0] * n
            e[j] += 1
            e[k] += 1
            terms[tuple(e)] = terms.get(tuple(e), 0) + A[j, k]
    return MultiPoly(n, terms)


# -- torus optimization --------------------------------------------------------

def _golden_max(g: Callable[[float], float], a: float, b: float, iters: int = 40):
    inv = (math.sqrt(5) - 1) / 2
    c, d = b - inv * (b - a), a + inv * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(iters):
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - inv * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + inv * (b - a)
            gd = g(d)
    return (c, gc) if gc >= gd else (d, gd)


def torus_maximize(f: Callable[[np.ndarray], np.ndarray], dim: int, grid: int,
                   refine_iters: int = 3, max_points: int = MAX_GRID_POINTS,
                   grid_max: Callable[[], tuple] | None = None):
    """Maximize a real function of ``dim`` angles over a uniform grid, then refine.

    ``f`` maps an (m, dim) array of angles to m real values. Refinement is
    coordinate-wise golden-section search in a window of one grid step
    around the incumbent, and only ever accepts improvements. Returns
    ``(value, angles)``. ``grid_max``, if given, replaces the grid scan and
    must return ``(value, index_tuple)``.
    """
    if dim == 0:
        return float(f(np.zeros((1, 0)))[0]), np.zeros(0)
    total = grid ** dim
    if total > max_points:
        raise BudgetExceeded(f"{grid}^{dim} grid points exceeds budget {max_points}")
    ticks = 2 * np.pi * np.arange(grid) / grid
    if grid_max is not None:
        best_val, best_ij = grid_max()
    else:
        best_val, best_idx = -np.inf, 0
        for start in range(0, total, _CHUNK):
            idx = np.arange(start, min(start + _CHUNK, total))
            vals = f(ticks[np.stack(np.unravel_index(idx, (grid,) * dim), axis=1)])
            k = int(np.argmax(vals))
            if vals[k] > best_val:
                best_val, best_idx = float(vals[k]), int(idx[k])
        best_ij = np.unravel_index(best_idx, (grid,) * dim)
    x = ticks[np.array(best_ij)]
    h = 2 * np.pi / grid
    for _ in range(refine_iters):
        for j in range(dim):
            def g(t, j=j):
                y = x.copy()
                y[j] = t
                return float(f(y[None, :])[0])
            t, val = _golden_max(g, x[j] - h, x[j] + h)
            if val > best_val:
                best_val = val
                x = x.copy()
                x[j] = t
        h /= 2
    return best_val, np.mod(x, 2 * np.pi)


def poly_grid_max(exps: np.ndarray, cs: np.ndarray, grid: int):
    """Max of |p| over the uniform grid on T^dim, with its grid index.

    The values on the last dim-1 axes come from inverse FFTs, one per power
    of the first variable; the first axis is then swept slice by slice.
    """
    E = np.asarray(exps, dtype=np.int64) % grid
    dim = E.shape[1]
    if dim == 1:
        C = np.zeros(grid, dtype=complex)
        np.add.at(C, E[:, 0], cs)
        vals = np.abs(np.fft.ifft(C)) * grid
        k = int(np.argmax(vals))
        return float(vals[k]), (k,)
    firsts = np.unique(E[:, 0])
    rest = (grid,) * (dim - 1)
    layers = []
    for a in firsts:
        C = np.zeros(rest, dtype=complex)
        sel = E[:, 0] == a
        np.add.at(C, tuple(E[sel, 1:].T), cs[sel])
        layers.append(np.fft.ifftn(C) * grid ** (dim - 1))
    layers = np.array(layers)
    roots = np.exp(2j * np.pi * np.arange(grid) / grid)
    best, arg = -np.inf, (0,) * dim
    for k in range(grid):
        v = np.abs(np.tensordot(roots[(firsts * k) % grid], layers, axes=1))
        j = int(np.argmax(v))
        if v.flat[j] > best:
            best, arg = float(v.flat[j]), (k,) + np.unravel_index(j, rest)
    return best, arg


@dataclass(frozen=True)
class TorusSup:
    lower: float
    upper: float
    angles: np.ndarray


def sup_norm_bracket(p: MultiPoly, grid_per_dim: int = 360, refine_iters: int = 3) -> TorusSup:
    """Grid lower bound on sup_{T^n} |p| plus the coefficient l1 upper bound."""
    if grid_per_dim < 8:
        raise ValueError("grid_per_dim must be at least 8")
    if p.nvars > 4 and grid_per_dim > 256:
        raise BudgetExceeded("more than 4 variables needs grid_per_dim <= 256")
    if p.is_zero():
        return TorusSup(0.0, 0.0, np.zeros(p.nvars))
    exps, cs = p._arrays()
    # |p| is invariant under a common rotation when p is homogeneous,
    # so the first angle can be pinned to zero.
    pin = p.is_homogeneous() and p.nvars > 1
    free = exps[:, 1:] if pin else exps

    def f(angles):
        return np.abs(np.exp(1j * (angles @ free.T)) @ cs)

    val, ang = torus_maximize(f, free.shape[1], grid_per_dim, refine_iters,
                              grid_max=lambda: poly_grid_max(free, cs, grid_per_dim))
    if pin:
        ang = np.concatenate([[0.0], ang])
    return TorusSup(val, p.coeff_l1(), ang)


def sup_norm_torus(p: MultiPoly, grid_per_dim: int = 360, refine_iters: int = 3) -> float:
    return sup_norm_bracket(p, grid_per_dim, refine_iters).lower


# -- jets and slices -----------------------------------------------------------

def jet_at_zero(p: MultiPoly):
    """Gradient and true Hessian at the origin."""
    n = p.nvars
    grad = np.zeros(n, dtype=complex)
    hess = np.zeros((n, n), dtype=complex)
    for j in range(n):
        e = [0] * n
        e[j] = 1
        grad[j] = p.coeff(e)
        e[j] = 2
        hess[j, j] = 2 * p.coeff(e)
        for k in range(j + 1, n):
            e = [0] * n
            e[j] = e[k] = 1
            hess[j, k] = hess[k, j] = p.coeff(e)
    return grad, hess


def slice_polynomials(p: MultiPoly):
    """p1 = a10 + a01 z and p2 = a20 + a11 z + a02 z^2 for a two-variable p."""
    if p.nvars != 2:
        raise ArityMismatch("slice_polynomials needs two variables")
    if p.degree > 2:
        raise DegreeTooHigh(f"degree {p.degree} > 2")
    if abs(p.coeff((0, 0))) > 0:
        raise NonzeroConstant("p(0) must vanish")
    p1 = MultiPoly.from_coeffs([p.coeff((1, 0)), p.coeff((0, 1))])
    p2 = MultiPoly.from_coeffs([p.coeff((2, 0)), p.coeff((1, 1)), p.coeff((0, 2))])
    return p1, p2


# -- commuting tuples and functional calculus ---------------------------------

@dataclass(frozen=True, eq=False)
class CommutingTuple:
    matrices: tuple
    commutation_residual: float

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    def __len__(self):
        return len(self.matrices)

    @classmethod
    def from_matrices(cls, mats, tol: Tolerance = DEFAULT_TOL) -> "CommutingTuple":
        ms = tuple(as_matrix(m) for m in mats)
        if not ms:
            raise ArityMismatch("empty tuple")
        d = ms[0].shape
        if d[0] != d[1] or any(m.shape != d for m in ms):
            raise ArityMismatch("matrices must be square and of equal size")
        norms = [operator_norm(m) for m in ms]
        worst = 0.0
        for i in range(len(ms)):
            for j in range(i + 1, len(ms)):
                r = operator_norm(ms[i] @ ms[j] - ms[j] @ ms[i])
                bound = tol.algebraic * (1 + norms[i] * norms[j])
                if r > bound:
                    raise NonCommuting(f"T{i + 1}, T{j + 1} commutator norm {r:.3e}")
                worst = max(worst, r)
        return cls(ms, worst)

    def sup_norm(self) -> float:
        return max(operator_norm(m) for m in self.matrices)


def functional_calculus(p: MultiPoly, T, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """p(T1, ..., Tn) for a commuting tuple."""
    if not isinstance(T, CommutingTuple):
        T = CommutingTuple.from_matrices(T, tol)
    if len(T) != p.nvars:
        raise ArityMismatch(f"polynomial has {p.nvars} variables, tuple has {len(T)}")
    d = T.dim
    maxexp = [max((e[j] for e in p.terms), default=0) for j in range(p.nvars)]
    powers = []
    for j, M in enumerate(T.matrices):
        pw = [np.eye(d, dtype=complex)]
        for _ in range(maxexp[j]):
            pw.append(pw[-1] @ M)
        powers.append(pw)
    out = np.zeros((d, d), dtype=complex)
    for exp, c in p.terms.items():
        term = np.eye(d, dtype=complex)
        for j, a in enumerate(exp):
            if a:
                term = term @ powers[j][a]
        out += c * term
    return out


# -- inline grammar ------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?P<imag>[ij](?![A-Za-z0-9]))?"
    r"|(?P<var>z(?P<idx>\d+))|(?P<unit>[ij])(?![A-Za-z0-9])|(?P<func>sqrt)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(s: str):
    pos, toks = 0, []
    s = s.rstrip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at {pos}: {s[pos:pos + 10]!r}")
        pos = m.end()
        if m.group("num") is not None:
            v = float(m.group("num"))
            toks.append(("num", 1j * v if m.group("imag") else complex(v)))
        elif m.group("var"):
            toks.append(("var", int(m.group("idx"))))
        elif m.group("unit"):
            toks.append(("num", 1j))
        elif m.group("func"):
            toks.append(("func", "sqrt"))
        else:
            toks.append(("op", m.group("op")))
    return toks


class _Parser:
    def __init__(self, toks, nvars):
        self.toks, self.i, self.n = toks, 0, nvars

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        t = self.peek()
        if t[0] is None or (kind and t[0] != kind) or (val and t[1] != val):
            raise ParseError(f"expected {val or kind}, got {t[1]!r}")
        self.i += 1
        return t

    def expr(self):
        out = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            out = out + t if op == "+" else out - t
        return out

    def term(self):
        out = self.power()
        while True:
            t = self.peek()
            if t == ("op", "*"):
                self.take()
                out = out * self.power()
            elif t == ("op", "/"):
                self.take()
                d = self.power()
                if d.degree > 0 or d.is_zero():
                    raise ParseError("division only by non-zero constants")
                out = out / d.coeff((0,) * self.n)
            elif t[0] in ("num", "var", "func") or t == ("op", "("):
                # implicit multiplication
                out = out * self.power()
            else:
                return out

    def power(self):
        if self.peek() in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
            return sign * self.power()
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            k = self.take("num")[1]
            if k.imag != 0 or k.real != int(k.real) or k.real < 0:
                raise ParseError("exponents must be non-negative integers")
            base = base ** int(k.real)
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return MultiPoly.constant(val, self.n)
        if kind == "var":
            self.take()
            if not 1 <= val <= self.n:
                raise ParseError(f"variable z{val} outside z1..z{self.n}")
            return MultiPoly.variable(val - 1, self.n)
        if kind == "func":
            self.take()
            self.take("op", "(")
            arg = self.expr()
            self.take("op", ")")
            if arg.degree > 0:
                raise ParseError("sqrt takes a constant")
            return MultiPoly.constant(np.sqrt(arg.coeff((0,) * self.n)), self.n)
        if (kind, val) == ("op", "("):
            self.take()
            out = self.expr()
            self.take("op", ")")
            return out
        raise ParseError(f"unexpected token {val!r}")


def parse_poly(s: str, nvars: int | None = None) -> MultiPoly:
    """Parse strings such as ``"z1^2 - 2 z1 z2 + (0.5+0.5i) z2"``."""
    toks = _tokenize(s)
    if not toks:
        raise ParseError("empty polynomial")
    used = max((v for k, v in toks if k == "var"), default=1)
    n = nvars if nvars is not None else used
    parser = _Parser(toks, n)
    out = parser.expr()
    if parser.i != len(toks):
        raise ParseError(f"trailing input at token {parser.i}")
    return out


def _fmt_coeff(c: complex) -> str:
    if abs(c.imag) < 1e-15:
        return f"{c.real:.12g}"
    if abs(c.real) < 1e-15:
        return f"{c.imag:.12g}i"
    return f"({c.real:.12g}{c.imag:+.12g}i)"


def format_poly(p: MultiPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for exp, c in sorted(p.terms.items(), key=lambda t: (sum(t[0]), [-e for e in t[0]])):
        mono = " ".join(
            f"z{j + 1}" + (f"^{a}" if a > 1 else "") for j, a in enumerate(exp) if a
        )
        sign = "-" if (c.real < 0 and abs(c.imag) < 1e-15) or (c.real == 0 and c.imag < 0) else "+"
        c = -c if sign == "-" else c
        body = f"{_fmt_coeff(c)} {mono}".strip() if mono else _fmt_coeff(c)
        parts.append((sign, body))
    head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    return head + "".join(f" {s} {b}" for s, b in parts[1:])
