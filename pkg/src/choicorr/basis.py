"""Choi matrices built from a substitute basis ``B = {b_ij}`` of ``M_n``.

``C^B_phi = sum_ij b_ij (x) phi(b_ij)`` is the generalized Choi matrix of
``Sigma_B = sum_ij b_ij (x) b_ij``, which is also the Choi matrix of the map
``M_B`` with transfer matrix ``[C_B][C_B]^T``. The correspondence holds for
``B`` exactly when ``M_B = Ad_s``.

``Sigma_B`` does not determine ``B``: replacing ``[C_B]`` by ``[C_B] O`` for a
complex orthogonal ``O`` leaves it unchanged. The literal form
``b_ij = |zeta_i><zeta_j|`` is therefore checked separately and reported in
``BasisReport.zeta_form``; a basis can pass the verdict without it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .correspondence import SigmaReport, WitnessRecord, identity_witness, sigma_correspondence
from .linalg import (
    DEFAULT_TOL,
    NotHermitianError,
    ToleranceConfig,
    as_matrix,
    hermitian_eig,
    numeric_rank,
    phase_normalize,
    psd_verdict,
    vec_row,
)
from .maps import ChoiLikeMatrix, LinearMap, choi_of_map

__all__ = [
    "ZETA_RESIDUAL",
    "ZetaRecoveryError",
    "OrderedBasis",
    "BasisReport",
    "c_basis_matrix",
    "m_basis_map",
    "sigma_of_basis",
    "basis_correspondence",
    "recover_zeta",
    "basis_from_zeta",
    "matrix_unit_basis",
    "pauli_basis",
]

# relative residual allowed when checking b_ij = |zeta_i><zeta_j|
ZETA_RESIDUAL = 1e-8


class ZetaRecoveryError(ValueError):
    """The family is not of the form ``b_ij = |zeta_i><zeta_j|``."""


@dataclass(frozen=True, eq=False)
class OrderedBasis:
    """``n^2`` matrices of size ``n x n``, element ``b_ij`` at flat position ``i*n + j``."""

    n: int
    elements: tuple

    def __post_init__(self):
        els = []
        for b in self.elements:
            b = np.array(as_matrix(b, name="basis element"))
            if b.shape != (self.n, self.n):
                raise ValueError(f"basis element must be {self.n}x{self.n}, got {b.shape}")
            b.flags.writeable = False
            els.append(b)
        if len(els) != self.n * self.n:
            raise ValueError(f"an ordered basis of M_{self.n} has {self.n**2} elements, got {len(els)}")
        object.__setattr__(self, "elements", tuple(els))

    @classmethod
    def of(cls, elements: Sequence) -> "OrderedBasis":
        """Accept a flat list of ``n^2`` matrices or an ``n x n`` nested list ``[[b_11, ...], ...]``."""
        flat = list(elements)
        if flat and isinstance(flat[0], (list, tuple)) and np.asarray(flat[0][0]).ndim == 2:
            flat = [b for row in flat for b in row]
        if not flat:
            raise ValueError("empty family")
        n = np.asarray(flat[0]).shape[0]
        return cls(n, tuple(flat))

    def __getitem__(self, ij) -> np.ndarray:
        i, j = ij
        return self.elements[i * self.n + j]

    def is_basis(self, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        return numeric_rank(c_basis_matrix(self), tol) == self.n * self.n


@dataclass(frozen=True, eq=False)
class BasisReport:
    sigma_b: ChoiLikeMatrix
    is_basis: bool
    sigma_b_hermitian: bool
    mb_choi_psd: bool
    mb_choi_rank: int
    verdict: bool
    two_path_residual: float
    sigma_report: Optional[SigmaReport] = None  # absent when Sigma_B is not Hermitian
    s_certificate: Optional[np.ndarray] = None
    zeta: Optional[np.ndarray] = None
    witness: Optional[WitnessRecord] = None

    @property
    def zeta_form(self) -> bool:
        """Whether ``b_ij = |zeta_i><zeta_j|`` holds literally."""
        return self.zeta is not None


def c_basis_matrix(basis: OrderedBasis) -> np.ndarray:
    """``[C_B]``: column ``j`` is ``vec_row(b_j)``."""
    return np.stack([vec_row(b) for b in basis.elements], axis=1)


def m_basis_map(basis: OrderedBasis) -> LinearMap:
    """``M_B`` with transfer ``[C_B][C_B]^T`` (plain transpose)."""
    c = c_basis_matrix(basis)
    return LinearMap(basis.n, basis.n, c @ c.T)


def sigma_of_basis(basis: OrderedBasis) -> ChoiLikeMatrix:
    """``Sigma_B = sum_ij b_ij (x) b_ij``, summed directly."""
    total = sum(np.kron(b, b) for b in basis.elements)
    return ChoiLikeMatrix(basis.n, basis.n, total)


def recover_zeta(basis: OrderedBasis, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Vectors ``zeta_i`` (as columns) with ``b_ij = |zeta_i><zeta_j|``.

    ``zeta_1`` comes from the principal eigenpair of ``b_11``; the others from
    ``<zeta_j| = <zeta_1| b_1j / ||zeta_1||^2``. One global phase is fixed by
    making the largest-magnitude component of ``zeta_1`` real positive. All
    ``n^2`` products are re-verified; failure raises :class:`ZetaRecoveryError`.
    """
    n = basis.n
    b11 = basis[0, 0]
    try:
        psd = psd_verdict(b11, tol)
    except ValueError as exc:
        raise ZetaRecoveryError(f"b_11 is not Hermitian: {exc}") from exc
    if not psd.is_psd or numeric_rank(b11, tol) != 1:
        raise ZetaRecoveryError("b_11 is not a positive rank-one matrix")
    w, v = hermitian_eig(b11, tol)
    z1 = phase_normalize(np.sqrt(w[-1]) * v[:, -1])
    norm2 = float(np.vdot(z1, z1).real)
    zeta = np.empty((n, n), dtype=complex)
    for j in range(n):
        zeta[:, j] = basis[0, j].conj().T @ z1 / norm2
    zeta[:, 0] = z1

    scale = max(np.linalg.norm(b) for b in basis.elements)
    for i in range(n):
        for j in range(n):
            err = np.linalg.norm(basis[i, j] - np.outer(zeta[:, i], zeta[:, j].conj()))
            if err > ZETA_RESIDUAL * scale:
                raise ZetaRecoveryError(
                    f"b_{i + 1}{j + 1} differs from |zeta_{i + 1}><zeta_{j + 1}| by {err:.3e}"
                )
    return zeta


def basis_correspondence(
    basis: OrderedBasis,
    tol: ToleranceConfig = DEFAULT_TOL,
    *,
    witness: bool = False,
    seed: int = 0,
) -> BasisReport:
    """Decide whether ``phi`` is CP exactly when ``C^B_phi`` is positive.

    The verdict is that the Choi matrix of ``M_B`` (equal to ``Sigma_B``) is
    positive of rank one with a nonsingular ``s``, i.e. ``M_B = Ad_s``.
    Families that are not bases are analyzed too; ``is_basis`` records it.
    A non-Hermitian ``Sigma_B`` is not positive, so its verdict is false and
    the identity map is the witness.
    """
    sigma_b = sigma_of_basis(basis)
    via_map = choi_of_map(m_basis_map(basis))
    two_path = float(
        np.linalg.norm(np.asarray(sigma_b.matrix) - via_map.matrix)
        / max(1.0, np.linalg.norm(sigma_b.matrix))
    )
    try:
        rep = sigma_correspondence(sigma_b, tol, witness=witness, seed=seed)
    except NotHermitianError:
        return BasisReport(
            sigma_b=sigma_b,
            is_basis=basis.is_basis(tol),
            sigma_b_hermitian=False,
            mb_choi_psd=False,
            mb_choi_rank=numeric_rank(sigma_b.matrix, tol),
            verdict=False,
            two_path_residual=two_path,
            witness=identity_witness(sigma_b, tol) if witness else None,
        )
    zeta = None
    if rep.verdict:
        try:
            zeta = recover_zeta(basis, tol)
        except ZetaRecoveryError:
            zeta = None
    return BasisReport(
        sigma_b=sigma_b,
        is_basis=basis.is_basis(tol),
        sigma_b_hermitian=True,
        mb_choi_psd=rep.is_psd,
        mb_choi_rank=rep.rank,
        verdict=rep.verdict,
        two_path_residual=two_path,
        sigma_report=rep,
        s_certificate=rep.certificate_s,
        zeta=zeta,
        witness=rep.witness,
    )


def basis_from_zeta(zeta) -> OrderedBasis:
    """The family ``b_ij = |zeta_i><zeta_j|`` for ``zeta`` given as columns."""
    zeta = as_matrix(zeta, name="zeta")
    n = zeta.shape[1]
    return OrderedBasis(n, tuple(np.outer(zeta[:, i], zeta[:, j].conj()) for i in range(n) for j in range(n)))


def matrix_unit_basis(n: int) -> OrderedBasis:
    return basis_from_zeta(np.eye(n, dtype=complex))


def pauli_basis() -> OrderedBasis:
    """``{I, X, Y, Z} / sqrt(2)`` in that order."""
    paulis = [
        np.eye(2),
        np.array([[0, 1], [1, 0]]),
        np.array([[0, -1j], [1j, 0]]),
        np.array([[1, 0], [0, -1]]),
    ]
    return OrderedBasis(2, tuple(np.asarray(p, dtype=complex) / np.sqrt(2) for p in paulis))
