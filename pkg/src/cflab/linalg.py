"""Dense complex linear algebra: norms, positivity, square roots, defects.

Every function accepts anything ``numpy.asarray`` understands and returns
fresh arrays; nothing is mutated in place.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionCap,
    InvalidMatrix,
    NotContraction,
    NotHermitian,
    NotPSD,
)

SVD_DIM_LIMIT = 512
KRON_DIM_CAP = 8192


@dataclass(frozen=True)
class Tolerance:
    """Three tolerance scales used for decisions at different precisions.

    algebraic
        residuals of identities that hold exactly in exact arithmetic.
    spectral
        norm and eigenvalue boundary decisions.
    grid
        answers produced by optimizing over a torus grid.
    """

    algebraic: float = 1e-10
    spectral: float = 1e-8
    grid: float = 1e-3

    def __post_init__(self):
        if not (0 < self.algebraic <= self.spectral <= self.grid):
            raise ValueError(
                "tolerances must satisfy 0 < algebraic <= spectral <= grid"
            )

    def as_dict(self) -> dict:
        return {"algebraic": self.algebraic, "spectral": self.spectral, "grid": self.grid}


DEFAULT_TOL = Tolerance()


def as_matrix(M) -> np.ndarray:
    """Validate and convert to a 2-D complex array."""
    A = np.asarray(M, dtype=complex)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise InvalidMatrix(f"expected a non-empty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidMatrix("matrix has non-finite entries")
    return A


def _power_norm(A: np.ndarray, iters: int = 500, rtol: float = 1e-13) -> float:
    # Power iteration on A*A; restarted from a fixed seed so it is deterministic.
    rng = np.random.default_rng(0)
    v = rng.standard_normal(A.shape[1]) + 1j * rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(iters):
        w = A.conj().T @ (A @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        new = float(np.sqrt(nw))
        if abs(new - sigma) <= rtol * new:
            sigma = new
            break
        sigma = new
    return float(np.linalg.norm(A @ v))


def operator_norm(M) -> float:
    """Largest singular value."""
    A = as_matrix(M)
    if max(A.shape) <= SVD_DIM_LIMIT:
        return float(np.linalg.norm(A, 2))
    return _power_norm(A)


def is_contraction(M, tol: Tolerance = DEFAULT_TOL) -> bool:
    return operator_norm(M) <= 1.0 + tol.spectral


def hermitian_part(H, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Return (H+H*)/2 after checking H is Hermitian up to ``tol.algebraic``."""
    A = as_matrix(H)
    if A.shape[0] != A.shape[1]:
        raise NotHermitian(f"matrix is not square: {A.shape}")
    skew = np.abs(A - A.conj().T).max()
    if skew > tol.algebraic * (1.0 + np.abs(A).max()):
        raise NotHermitian(f"anti-Hermitian part has size {skew:.3e}")
    return (A + A.conj().T) / 2


def min_eigenvalue(H, tol: Tolerance = DEFAULT_TOL) -> float:
    return float(np.linalg.eigvalsh(hermitian_part(H, tol))[0])


def psd_check(H, tol: Tolerance = DEFAULT_TOL) -> bool:
    return min_eigenvalue(H, tol) >= -tol.spectral


def psd_sqrt(H, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Positive square root of a PSD matrix.

    Eigenvalues in ``[-tol.spectral, 0)`` are treated as rounding and
    clipped to zero.
    """
    S = hermitian_part(H, tol)
    w, Q = np.linalg.eigh(S)
    if w[0] < -tol.spectral:
        raise NotPSD(f"minimum eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    R = (Q * np.sqrt(w)) @ Q.conj().T
    return (R + R.conj().T) / 2


def kron(A, B, cap: int = KRON_DIM_CAP) -> np.ndarray:
    A, B = as_matrix(A), as_matrix(B)
    rows, cols = A.shape[0] * B.shape[0], A.shape[1] * B.shape[1]
    if max(rows, cols) > cap:
        raise DimensionCap(f"Kronecker product would be {rows}x{cols} (cap {cap})")
    return np.kron(A, B)


def defect(T, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """D_T = (I - T*T)^{1/2}."""
    A = as_matrix(T)
    nrm = operator_norm(A)
    if nrm > 1.0 + tol.spectral:
        raise NotContraction(f"norm {nrm:.12g} exceeds 1")
    return psd_sqrt(np.eye(A.shape[1]) - A.conj().T @ A, tol)


def unitary_dilation(T, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Halmos dilation [[T, D_{T*}], [D_T, -T*]] of a square contraction."""
    A = as_matrix(T)
    return np.block([[A, defect(A.conj().T, tol)], [defect(A, tol), -A.conj().T]])


def block_toeplitz_upper(blocks) -> np.ndarray:
    """𝒯(A1, ..., An): A1 on the diagonal, Aj on the (j-1)-th block superdiagonal.

    Blocks may be scalars or equal-size square matrices.
    """
    mats = [np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks]
    if not mats:
        raise InvalidMatrix("need at least one block")
    shape = mats[0].shape
    if any(m.shape != shape for m in mats) or shape[0] != shape[1]:
        raise InvalidMatrix("blocks must be square and of equal size")
    n, d = len(mats), shape[0]
    out = np.zeros((n * d, n * d), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            out[i * d:(i + 1) * d, j * d:(j + 1) * d] = mats[j - i]
    return out


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_contraction(n: int, rng: np.random.Generator, m: int | None = None,
                       scale: float = 1.0) -> np.ndarray:
    m = n if m is None else m
    Z = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
    return scale * Z / np.linalg.norm(Z, 2)


# -- JSON ----------------------------------------------------------------------

def matrix_to_json(M) -> dict:
    A = as_matrix(M)
    return {
        "rows": A.shape[0],
        "cols": A.shape[1],
        "data": [[float(z.real), float(z.imag)] for z in A.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidMatrix(f"malformed matrix JSON: {exc}") from None
    if len(data) != rows * cols:
        raise InvalidMatrix(f"expected {rows * cols} entries, got {len(data)}")
    vals = np.array([complex(re, im) for re, im in data], dtype=complex)
    return as_matrix(vals.reshape(rows, cols))
