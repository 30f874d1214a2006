"""Parrott completions, one-step Toeplitz extension and the 3x3 criterion."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FactorizationFailed, InvalidMatrix, NotContraction
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    block_toeplitz_upper,
    operator_norm,
    psd_sqrt,
)


@dataclass(frozen=True, eq=False)
class ParrottData:
    """Known blocks of the 2x2 operator matrix (A X; C D) with X unknown.

    A: H1 -> K1, C: H1 -> K2, D: H2 -> K2.
    """

    A: np.ndarray
    C: np.ndarray
    D: np.ndarray

    @classmethod
    def build(cls, A, C, D, tol: Tolerance = DEFAULT_TOL) -> "ParrottData":
        A, C, D = as_matrix(A), as_matrix(C), as_matrix(D)
        if A.shape[1] != C.shape[1] or C.shape[0] != D.shape[0]:
            raise InvalidMatrix(
                f"non-conformal blocks A{A.shape}, C{C.shape}, D{D.shape}"
            )
        col = operator_norm(np.vstack([A, C]))
        row = operator_norm(np.hstack([C, D]))
        if max(col, row) > 1 + tol.spectral:
            raise NotContraction(f"column norm {col:.12g}, row norm {row:.12g}")
        return cls(A, C, D)

    @property
    def corner_shape(self) -> tuple[int, int]:
        return self.A.shape[0], self.D.shape[1]

    def complete(self, X) -> np.ndarray:
        return np.block([[self.A, as_matrix(X)], [self.C, self.D]])


def _factor(S: np.ndarray, B: np.ndarray, side: str, tol: Tolerance) -> np.ndarray:
    """Solve S Y = B (side='left') or Z S = B (side='right') with S PSD."""
    rcond = tol.spectral
    Sp = np.linalg.pinv(S, rcond=rcond, hermitian=True)
    sol = Sp @ B if side == "left" else B @ Sp
    resid = S @ sol - B if side == "left" else sol @ S - B
    r = np.abs(resid).max() if resid.size else 0.0
    # Degenerate defects make the factor equation consistent only up to the
    # square-root accuracy, which is roughly sqrt(spectral).
    if r > np.sqrt(tol.spectral) * (1 + np.abs(B).max(initial=0.0)):
        raise FactorizationFailed(f"{side} factor residual {r:.3e}")
    return sol


def parrott_solve(data: ParrottData, V=None, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """X = (I - ZZ*)^{1/2} V (I - Y*Y)^{1/2} - Z C* Y.

    Y and Z solve D = (I - CC*)^{1/2} Y and A = Z (I - C*C)^{1/2}.
    """
    A, C, D = data.A, data.C, data.D
    rows, cols = data.corner_shape
    if V is None:
        V = np.zeros((rows, cols), dtype=complex)
    V = as_matrix(V)
    if V.shape != (rows, cols):
        raise InvalidMatrix(f"V has shape {V.shape}, corner is {(rows, cols)}")
    if operator_norm(V) > 1 + tol.spectral:
        raise NotContraction("V must be a contraction")
    DCs = psd_sqrt(np.eye(C.shape[0]) - C @ C.conj().T, tol)
    DC = psd_sqrt(np.eye(C.shape[1]) - C.conj().T @ C, tol)
    Y = _factor(DCs, D, "left", tol)
    Z = _factor(DC, A, "right", tol)
    X = -Z @ C.conj().T @ Y
    if np.any(V):
        # Y and Z are contractions up to rounding; clip before the square roots.
        lz = psd_sqrt(_clip_psd(np.eye(rows) - Z @ Z.conj().T), tol)
        ry = psd_sqrt(_clip_psd(np.eye(cols) - Y.conj().T @ Y), tol)
        X = X + lz @ V @ ry
    return X


def _clip_psd(H: np.ndarray) -> np.ndarray:
    H = (H + H.conj().T) / 2
    w, Q = np.linalg.eigh(H)
    return (Q * np.clip(w, 0, None)) @ Q.conj().T


def minimal_completion(data: ParrottData, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """X minimizing ‖(A X; C D)‖, and the minimum max(‖(A; C)‖, ‖(C D)‖)."""
    m = max(operator_norm(np.vstack([data.A, data.C])), operator_norm(np.hstack([data.C, data.D])))
    if m == 0:
        return np.zeros(data.corner_shape, dtype=complex), 0.0
    scaled = ParrottData(data.A / m, data.C / m, data.D / m)
    return m * parrott_solve(scaled, None, tol), m


def completion_norm(data: ParrottData, X) -> float:
    return operator_norm(data.complete(X))


# -- the 3x3 criterion ---------------------------------------------------------

def matrix_3x3(omega: complex, alpha: complex, beta: complex) -> np.ndarray:
    """[[w, a, 0], [0, w, b], [0, 0, w]]."""
    return np.array([[omega, alpha, 0], [0, omega, beta], [0, 0, omega]], dtype=complex)


def contraction_3x3(omega: complex, alpha: complex, beta: complex) -> bool:
    """Closed-form contractivity test for ``matrix_3x3``."""
    w2 = abs(omega) ** 2
    s = 1.0 - w2
    a, b = abs(alpha), abs(beta)
    if s < 0 or a > s or b > s:
        return False
    return (a * b) ** 2 * w2 <= (s * s - a * a) * (s * s - b * b)


def equal_modulus_threshold(omega_abs: float) -> float:
    """Largest |alpha| = |beta| keeping ``matrix_3x3`` contractive."""
    return (1.0 - omega_abs) * np.sqrt(1.0 + omega_abs)


# -- Toeplitz extension --------------------------------------------------------

def toeplitz_split(blocks, next_block=None):
    """Arrange 𝒯(A1, ..., A_{n+1}) as (A X; C D) with X = A_{n+1} unknown.

    Rows split as (first block row | rest), columns as (first n | last).
    """
    mats = [np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks]
    n, d = len(mats), mats[0].shape[0]
    corner = np.zeros((d, d)) if next_block is None else next_block
    full = block_toeplitz_upper(mats + [corner])
    A = full[:d, : n * d]
    C = full[d:, : n * d]
    D = full[d:, n * d:]
    return A, C, D


def toeplitz_extend_step(blocks, V=None, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Next Toeplitz block A_{n+1} from the Parrott solution (V = 0 by default)."""
    mats = [np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks]
    if not mats:
        raise InvalidMatrix("need at least one block")
    if operator_norm(block_toeplitz_upper(mats)) > 1 + tol.spectral:
        raise NotContraction("𝒯(A1, ..., An) is not a contraction")
    A, C, D = toeplitz_split(mats)
    data = ParrottData(A, C, D)
    X = parrott_solve(data, V, tol)
    extended = block_toeplitz_upper(mats + [X])
    nrm = operator_norm(extended)
    if nrm > 1 + np.sqrt(tol.spectral):
        raise FactorizationFailed(f"extended Toeplitz matrix has norm {nrm:.12g}")
    return X
