"""Linear maps ``M_n -> M_m`` and their Choi and Kraus representations.

A :class:`LinearMap` is stored by its transfer matrix ``T`` (shape ``m^2 x n^2``)
with ``vec_row(phi(x)) = T @ vec_row(x)``. The Kraus convention is
``Ad_s(x) = s^* x s``, so a Kraus operator of a map ``M_n -> M_m`` is ``n x m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_matrix,
    numeric_rank,
    pairing,
    phase_normalize,
    psd_verdict,
    hermitian_eig,
    unvec_row,
    vec_row,
)

__all__ = [
    "LinearMap",
    "ChoiLikeMatrix",
    "KrausSet",
    "CpVerdict",
    "choi_of_map",
    "map_of_choi",
    "apply_map",
    "compose",
    "adjoint_map",
    "inverse_map",
    "ad_map",
    "tilde_vector",
    "generalized_choi",
    "kraus_from_choi",
    "choi_from_kraus",
    "cp_verdict",
    "map_pairing",
    "identity_map",
    "transpose_map",
]


def _perfect_square_root(k: int, what: str) -> int:
    r = int(round(np.sqrt(k)))
    if r < 1 or r * r != k:
        raise ValueError(f"{what} {k} is not a perfect square")
    return r


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class LinearMap:
    n: int
    m: int
    transfer: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = as_matrix(self.transfer, name="transfer")
        if t.shape != (self.m * self.m, self.n * self.n):
            raise ValueError(
                f"transfer of a map M_{self.n} -> M_{self.m} must be "
                f"{self.m**2}x{self.n**2}, got {t.shape}"
            )
        object.__setattr__(self, "transfer", _frozen(t))

    @classmethod
    def from_transfer(cls, transfer) -> "LinearMap":
        """Build a map, inferring ``n`` and ``m`` from the transfer shape."""
        t = as_matrix(transfer, name="transfer")
        return cls(
            _perfect_square_root(t.shape[1], "column count"),
            _perfect_square_root(t.shape[0], "row count"),
            t,
        )

    def __call__(self, x) -> np.ndarray:
        return apply_map(self, x)


@dataclass(frozen=True, eq=False)
class ChoiLikeMatrix:
    """An element of ``M_n (x) M_m`` with the bipartite index ``(i, k) -> i*m + k``."""

    n: int
    m: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = as_matrix(self.matrix)
        if a.shape != (self.n * self.m, self.n * self.m):
            raise ValueError(
                f"matrix in M_{self.n} (x) M_{self.m} must be "
                f"{self.n * self.m}x{self.n * self.m}, got {a.shape}"
            )
        object.__setattr__(self, "matrix", _frozen(a))

    @classmethod
    def square(cls, matrix) -> "ChoiLikeMatrix":
        """Wrap an ``n^2 x n^2`` matrix as an element of ``M_n (x) M_n``."""
        a = as_matrix(matrix)
        if a.shape[0] != a.shape[1]:
            raise ValueError(f"matrix must be square, got {a.shape}")
        n = _perfect_square_root(a.shape[0], "dimension")
        return cls(n, n, a)

    def block(self, i: int, j: int) -> np.ndarray:
        """The ``m x m`` block at block position ``(i, j)``."""
        m = self.m
        return np.array(self.matrix[i * m:(i + 1) * m, j * m:(j + 1) * m])


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Operators ``s_k`` (each ``n x m``) of the map ``x -> sum_k s_k^* x s_k``."""

    operators: tuple
    n: int
    m: int

    def __post_init__(self):
        ops = tuple(_frozen(as_matrix(s, name="Kraus operator")) for s in self.operators)
        if not ops:
            raise ValueError("a Kraus set needs at least one operator")
        for s in ops:
            if s.shape != (self.n, self.m):
                raise ValueError(f"Kraus operator must be {self.n}x{self.m}, got {s.shape}")
        object.__setattr__(self, "operators", ops)

    @classmethod
    def of(cls, operators: Sequence) -> "KrausSet":
        ops = [as_matrix(s, name="Kraus operator") for s in operators]
        if not ops:
            raise ValueError("a Kraus set needs at least one operator")
        return cls(tuple(ops), *ops[0].shape)

    def __len__(self):
        return len(self.operators)

    def to_map(self) -> "LinearMap":
        t = sum(ad_map(s).transfer for s in self.operators)
        return LinearMap(self.n, self.m, t)


@dataclass(frozen=True, eq=False)
class CpVerdict:
    is_cp: bool
    min_choi_eigenvalue: float
    kraus: Optional[KrausSet] = None
    negative_witness: Optional[np.ndarray] = None


def choi_of_map(phi: LinearMap) -> ChoiLikeMatrix:
    """``C_phi = sum_ij e_ij (x) phi(e_ij)``; block ``(i, j)`` is ``phi(e_ij)``."""
    n, m = phi.n, phi.m
    # transfer[(k,l),(i,j)] = phi(e_ij)[k,l] = C[(i,k),(j,l)]
    c = phi.transfer.reshape(m, m, n, n).transpose(2, 0, 3, 1).reshape(n * m, n * m)
    return ChoiLikeMatrix(n, m, c)


def map_of_choi(choi: ChoiLikeMatrix) -> LinearMap:
    """Inverse of :func:`choi_of_map`: ``phi(x) = sum_ij x_ij * block_ij(C)``."""
    n, m = choi.n, choi.m
    t = np.asarray(choi.matrix).reshape(n, m, n, m).transpose(1, 3, 0, 2).reshape(m * m, n * n)
    return LinearMap(n, m, t)


def apply_map(phi: LinearMap, x) -> np.ndarray:
    x = as_matrix(x, name="x")
    if x.shape != (phi.n, phi.n):
        raise ValueError(f"input must be {phi.n}x{phi.n}, got {x.shape}")
    return unvec_row(phi.transfer @ vec_row(x), phi.m, phi.m)


def compose(phi: LinearMap, sigma: LinearMap) -> LinearMap:
    """The composition ``phi o sigma`` (apply ``sigma`` first)."""
    if sigma.m != phi.n:
        raise ValueError(
            f"cannot compose: sigma maps into M_{sigma.m} but phi acts on M_{phi.n}"
        )
    return LinearMap(sigma.n, phi.m, phi.transfer @ sigma.transfer)


def adjoint_map(phi: LinearMap) -> LinearMap:
    """The dual map for the bilinear pairing, ``<phi*(x), y> = <x, phi(y)>``.

    With ``<X, Y> = Tr(X Y^T)`` the pairing of vectorized matrices is a plain dot
    product, so the dual is the transpose of the transfer matrix.
    """
    return LinearMap(phi.m, phi.n, phi.transfer.T)


def inverse_map(phi: LinearMap, tol: ToleranceConfig = DEFAULT_TOL) -> Optional[LinearMap]:
    """Inverse of a bijective map, or ``None`` if the transfer matrix is singular."""
    if phi.n != phi.m or numeric_rank(phi.transfer, tol) < phi.n * phi.n:
        return None
    return LinearMap(phi.n, phi.n, np.linalg.inv(phi.transfer))


def ad_map(s) -> LinearMap:
    """``Ad_s(x) = s^* x s``; an ``n x m`` matrix gives a map ``M_n -> M_m``."""
    s = as_matrix(s, name="s")
    n, m = s.shape
    # vec_row(A X B) = (A (x) B^T) vec_row(X)
    return LinearMap(n, m, np.kron(s.conj().T, s.T))


def tilde_vector(s) -> np.ndarray:
    """The vector with ``<s~| = sum_ij s_ij <i|<j|``, i.e. component ``i*m + j`` is ``conj(s_ij)``."""
    return as_matrix(s, name="s").conj().reshape(-1)


def generalized_choi(sigma: ChoiLikeMatrix, phi: LinearMap) -> ChoiLikeMatrix:
    """``(id_n (x) phi)(Sigma)``: apply ``phi`` to every ``n x n`` block of ``Sigma``."""
    if sigma.n != sigma.m:
        raise ValueError(f"Sigma must lie in M_n (x) M_n, got n={sigma.n}, m={sigma.m}")
    n = sigma.n
    if phi.n != n:
        raise ValueError(f"phi acts on M_{phi.n} but Sigma has blocks of size {n}")
    m = phi.m
    # rows (i,j) of `blocks` hold vec_row of block (i,j)
    blocks = np.asarray(sigma.matrix).reshape(n, n, n, n).transpose(0, 2, 1, 3).reshape(n * n, n * n)
    images = blocks @ phi.transfer.T
    out = images.reshape(n, n, m, m).transpose(0, 2, 1, 3).reshape(n * m, n * m)
    return ChoiLikeMatrix(n, m, out)


def kraus_from_choi(choi: ChoiLikeMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> KrausSet:
    """Kraus operators of a map with PSD Choi matrix.

    Eigenpairs with ``lambda > rank_rel * lambda_max`` contribute the operator
    ``conj(unvec_row(sqrt(lambda) v))``; each is phase-fixed so that its
    largest-magnitude entry is real positive.
    """
    verdict = psd_verdict(choi.matrix, tol)
    if not verdict.is_psd:
        raise ValueError(
            f"Choi matrix is not positive semidefinite (min eigenvalue {verdict.min_eigenvalue:.3e})"
        )
    w, v = hermitian_eig(choi.matrix, tol)
    lam_max = float(w[-1])
    ops = []
    if lam_max > 0:
        for k in range(w.size - 1, -1, -1):
            if w[k] <= tol.rank_rel * lam_max:
                break
            s = unvec_row(np.sqrt(w[k]) * v[:, k], choi.n, choi.m).conj()
            ops.append(phase_normalize(s))
    if not ops:
        ops.append(np.zeros((choi.n, choi.m), dtype=complex))
    return KrausSet(tuple(ops), choi.n, choi.m)


def choi_from_kraus(kraus: KrausSet) -> ChoiLikeMatrix:
    """``sum_k C_{Ad_{s_k}}``, always positive semidefinite."""
    total = sum(np.asarray(choi_of_map(ad_map(s)).matrix) for s in kraus.operators)
    return ChoiLikeMatrix(kraus.n, kraus.m, total)


def cp_verdict(phi: LinearMap, tol: ToleranceConfig = DEFAULT_TOL) -> CpVerdict:
    """Complete positivity via positivity of the Choi matrix."""
    choi = choi_of_map(phi)
    verdict = psd_verdict(choi.matrix, tol)
    if verdict.is_psd:
        return CpVerdict(True, verdict.min_eigenvalue, kraus=kraus_from_choi(choi, tol))
    return CpVerdict(False, verdict.min_eigenvalue, negative_witness=verdict.negative_witness)


def map_pairing(phi: LinearMap, psi: LinearMap) -> complex:
    """``<phi, psi> = <C_phi, C_psi>``."""
    if (phi.n, phi.m) != (psi.n, psi.m):
        raise ValueError("maps must share domain and codomain")
    return pairing(choi_of_map(phi).matrix, choi_of_map(psi).matrix)


def identity_map(n: int) -> LinearMap:
    return LinearMap(n, n, np.eye(n * n, dtype=complex))


def transpose_map(n: int) -> LinearMap:
    t = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            t[j * n + i, i * n + j] = 1.0
    return LinearMap(n, n, t)
