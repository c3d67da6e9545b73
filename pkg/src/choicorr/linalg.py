"""Dense complex linear algebra primitives.

Every bipartite reshape in the package uses row-major order: the pair
``(i, k)`` of ``C^n (x) C^m`` maps to the flat index ``i*m + k``, and a matrix
is vectorized by stacking its rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "NotHermitianError",
    "as_matrix",
    "tensor",
    "pairing",
    "hermitian_eig",
    "PsdVerdict",
    "psd_verdict",
    "numeric_rank",
    "vec_row",
    "unvec_row",
    "SchmidtDecomposition",
    "schmidt_decompose",
    "matrix_unit",
    "omega_vector",
    "swap_matrix",
    "phase_normalize",
]


class NotHermitianError(ValueError):
    """Raised when a matrix that must be Hermitian is not, beyond tolerance."""


@dataclass(frozen=True)
class ToleranceConfig:
    eig_residual: float = 1e-10
    psd_slack: float = 1e-9
    rank_rel: float = 1e-8
    equality_rel: float = 1e-10

    def __post_init__(self):
        for name in ("eig_residual", "psd_slack", "rank_rel", "equality_rel"):
            value = getattr(self, name)
            if not (0.0 <= value < 1.0):
                raise ValueError(f"{name} must lie in [0, 1), got {value!r}")

    def scaled(self, equality_rel: float) -> "ToleranceConfig":
        """Return a config with ``equality_rel`` replaced and the rest scaled by the same factor."""
        if not (0.0 < equality_rel < 1.0):
            raise ValueError(f"tolerance must lie in (0, 1), got {equality_rel!r}")
        factor = equality_rel / self.equality_rel
        return ToleranceConfig(
            eig_residual=min(self.eig_residual * factor, 0.5),
            psd_slack=min(self.psd_slack * factor, 0.5),
            rank_rel=min(self.rank_rel * factor, 0.5),
            equality_rel=equality_rel,
        )


DEFAULT_TOL = ToleranceConfig()


def as_matrix(a, *, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex array."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or 0 in arr.shape:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def _as_vector(v, *, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=complex)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.reshape(-1)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def _require_square(a: np.ndarray, name: str = "matrix"):
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")


def tensor(a, b) -> np.ndarray:
    """Kronecker product; entry ``((i,k),(j,l))`` is ``a[i,j] * b[k,l]``."""
    return np.kron(as_matrix(a, name="a"), as_matrix(b, name="b"))


def pairing(x, y) -> complex:
    """Bilinear pairing ``Tr(x y^T)``.

    This is the plain transpose, not the adjoint, so the pairing is symmetric
    and complex-bilinear: it equals the entrywise sum ``sum_ij x_ij y_ij``.
    """
    x = as_matrix(x, name="x")
    y = as_matrix(y, name="y")
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    _require_square(x, "x")
    return complex(np.trace(x @ y.T))


def _hermitian_part(a: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    _require_square(a)
    skew = np.linalg.norm(a - a.conj().T)
    if skew > tol.equality_rel * np.linalg.norm(a):
        raise NotHermitianError(
            f"matrix is not Hermitian: ||a - a^H||_F = {skew:.3e} exceeds "
            f"{tol.equality_rel:.1e} * ||a||_F"
        )
    return 0.5 * (a + a.conj().T)


def hermitian_eig(a, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix."""
    h = _hermitian_part(as_matrix(a), tol)
    w, v = np.linalg.eigh(h)
    return w, v


class PsdVerdict(NamedTuple):
    is_psd: bool
    min_eigenvalue: float
    negative_witness: Optional[np.ndarray]


def psd_verdict(a, tol: ToleranceConfig = DEFAULT_TOL) -> PsdVerdict:
    """Decide positive semidefiniteness relative to the spectral scale.

    The verdict is ``lambda_min >= -psd_slack * max(1, lambda_max)``. When it
    fails, the eigenvector of ``lambda_min`` is returned as a witness ``v`` with
    ``<v|a|v> < 0``.
    """
    w, v = hermitian_eig(a, tol)
    lo, hi = float(w[0]), float(w[-1])
    if lo >= -tol.psd_slack * max(1.0, hi):
        return PsdVerdict(True, lo, None)
    return PsdVerdict(False, lo, v[:, 0].copy())


def numeric_rank(a, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Number of singular values above ``rank_rel * sigma_max``."""
    sv = np.linalg.svd(as_matrix(a), compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > tol.rank_rel * sv[0]))


def vec_row(a) -> np.ndarray:
    """Stack rows: component ``i*cols + j`` is ``a[i, j]``."""
    return as_matrix(a).reshape(-1).copy()


def unvec_row(v, rows: int, cols: int) -> np.ndarray:
    v = _as_vector(v)
    if v.size != rows * cols:
        raise ValueError(f"cannot reshape length {v.size} into {rows}x{cols}")
    return v.reshape(rows, cols).copy()


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left_vectors: np.ndarray  # columns
    right_vectors: np.ndarray  # columns
    schmidt_rank: int

    def reconstruct(self) -> np.ndarray:
        out = 0
        for k, c in enumerate(self.coefficients):
            out = out + c * np.kron(self.left_vectors[:, k], self.right_vectors[:, k])
        return np.asarray(out, dtype=complex)


def schmidt_decompose(v, n: Optional[int] = None, tol: ToleranceConfig = DEFAULT_TOL) -> SchmidtDecomposition:
    """Schmidt decomposition of ``v`` in ``C^n (x) C^n`` via the SVD of its row reshape."""
    v = _as_vector(v)
    if n is None:
        n = int(round(np.sqrt(v.size)))
    if n < 1 or n * n != v.size:
        raise ValueError(f"vector length {v.size} is not n^2 for n={n}")
    u, s, vh = np.linalg.svd(unvec_row(v, n, n))
    if s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(s > tol.rank_rel * s[0]))
    return SchmidtDecomposition(
        coefficients=s,
        left_vectors=u,
        right_vectors=vh.T.copy(),
        schmidt_rank=rank,
    )


def matrix_unit(i: int, j: int, n: int, m: Optional[int] = None) -> np.ndarray:
    """The matrix unit ``|i><j|`` (zero-based) of shape ``n x m``."""
    e = np.zeros((n, n if m is None else m), dtype=complex)
    e[i, j] = 1.0
    return e


def omega_vector(n: int) -> np.ndarray:
    """The unnormalized maximally entangled vector ``sum_i |i>|i>``."""
    return np.eye(n, dtype=complex).reshape(-1)


def swap_matrix(n: int) -> np.ndarray:
    """The flip operator ``|i>|k> -> |k>|i>`` on ``C^n (x) C^n``."""
    f = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for k in range(n):
            f[k * n + i, i * n + k] = 1.0
    return f


def phase_normalize(a: np.ndarray) -> np.ndarray:
    """Multiply by the unit phase that makes the largest-magnitude entry real positive."""
    flat = a.reshape(-1)
    idx = int(np.argmax(np.abs(flat)))
    if flat[idx] == 0:
        return a.copy()
    return a * (abs(flat[idx]) / flat[idx])
