"""When does a substitute matrix Sigma preserve the Choi correspondence?

``Sigma`` in ``M_n (x) M_n`` satisfies the correspondence when, for every ``m``,
a map ``phi: M_n -> M_m`` is completely positive exactly when
``(id_n (x) phi)(Sigma)`` is positive. The decision rests on a finite check:
``Sigma`` must be a positive rank-one matrix whose range vector has full
Schmidt rank. The equivalent statement that ``sigma = map_of_choi(Sigma)`` is a
complete order isomorphism is evaluated alongside as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    NotHermitianError,
    ToleranceConfig,
    as_matrix,
    hermitian_eig,
    numeric_rank,
    phase_normalize,
    psd_verdict,
    schmidt_decompose,
    unvec_row,
    vec_row,
)
from .maps import (
    ChoiLikeMatrix,
    LinearMap,
    compose,
    cp_verdict,
    generalized_choi,
    identity_map,
    inverse_map,
    map_of_choi,
)

__all__ = [
    "CP_MAP_WITH_NONPOSITIVE_IMAGE",
    "NONCP_MAP_WITH_POSITIVE_IMAGE",
    "WITNESS_MARGIN",
    "DEFAULT_WITNESS_BUDGET",
    "WitnessRecord",
    "SigmaReport",
    "CoiVerdict",
    "EtaExpansion",
    "sigma_correspondence",
    "extract_s",
    "eta_for_xi",
    "find_witness",
    "identity_witness",
    "validate_witness",
    "coi_verdict",
]

CP_MAP_WITH_NONPOSITIVE_IMAGE = "cp_map_with_nonpositive_image"
NONCP_MAP_WITH_POSITIVE_IMAGE = "noncp_map_with_positive_image"

# a non-CP witness must have a Choi eigenvalue at least this far below zero
WITNESS_MARGIN = 1e-6
DEFAULT_WITNESS_BUDGET = 200


@dataclass(frozen=True, eq=False)
class WitnessRecord:
    map: LinearMap
    kind: str
    validated: bool


@dataclass(frozen=True, eq=False)
class SigmaReport:
    n: int
    eigenvalues: np.ndarray
    is_psd: bool
    rank: int
    schmidt_rank_of_range: Optional[int]
    sigma_is_cp: bool
    sigma_invertible: bool
    sigma_inverse_is_cp: Optional[bool]
    verdict: bool
    certificate_s: Optional[np.ndarray] = None
    witness: Optional[WitnessRecord] = None

    @property
    def is_coi(self) -> bool:
        return bool(self.sigma_is_cp and self.sigma_invertible and self.sigma_inverse_is_cp)

    @property
    def conditions_agree(self) -> bool:
        return self.verdict == self.is_coi


class CoiVerdict(NamedTuple):
    is_coi: bool
    inverse: Optional[LinearMap]


class EtaExpansion(NamedTuple):
    eta: np.ndarray  # columns eta_i
    is_basis: bool
    residual: float


def _as_sigma(sigma: Union[ChoiLikeMatrix, np.ndarray]) -> ChoiLikeMatrix:
    if isinstance(sigma, ChoiLikeMatrix):
        if sigma.n != sigma.m:
            raise ValueError(f"Sigma must lie in M_n (x) M_n, got n={sigma.n}, m={sigma.m}")
        return sigma
    return ChoiLikeMatrix.square(sigma)


def _range_vector(sigma: ChoiLikeMatrix, tol: ToleranceConfig) -> np.ndarray:
    """``sqrt(lambda) v`` for a rank-one PSD ``Sigma = lambda |v><v|``, phase-fixed."""
    verdict = psd_verdict(sigma.matrix, tol)
    if not verdict.is_psd:
        raise ValueError(f"Sigma is not positive (min eigenvalue {verdict.min_eigenvalue:.3e})")
    rank = numeric_rank(sigma.matrix, tol)
    if rank != 1:
        raise ValueError(f"Sigma must have rank one, got rank {rank}")
    w, v = hermitian_eig(sigma.matrix, tol)
    return phase_normalize(np.sqrt(w[-1]) * v[:, -1])


def extract_s(sigma, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """The matrix ``s`` with ``|s~><s~| = Sigma`` for a rank-one positive ``Sigma``.

    The phase is fixed by making the largest-magnitude entry of ``s`` real positive.
    """
    sigma = _as_sigma(sigma)
    v = _range_vector(sigma, tol)
    return unvec_row(v, sigma.n, sigma.n).conj()


def eta_for_xi(sigma, xi, tol: ToleranceConfig = DEFAULT_TOL) -> EtaExpansion:
    """Expand the range vector of ``Sigma`` as ``sum_i xi_i (x) eta_i``.

    ``xi`` holds the basis vectors as columns. With the dual family of ``xi``,
    ``eta_i = (<xi^i| (x) I) v``, which gives
    ``Sigma = sum_ij |xi_i><xi_j| (x) |eta_i><eta_j|``.
    """
    sigma = _as_sigma(sigma)
    n = sigma.n
    xi = as_matrix(xi, name="xi")
    if xi.shape != (n, n):
        raise ValueError(f"xi must hold {n} vectors of length {n} as columns, got {xi.shape}")
    if numeric_rank(xi, tol) < n:
        raise ValueError("xi is not a basis")
    v = _range_vector(sigma, tol)
    # unvec_row(v) = Xi @ Eta^T
    eta = np.linalg.solve(xi, unvec_row(v, n, n)).T
    target = np.asarray(sigma.matrix)
    rebuilt = np.zeros_like(target)
    for i in range(n):
        for j in range(n):
            rebuilt += np.kron(np.outer(xi[:, i], xi[:, j].conj()), np.outer(eta[:, i], eta[:, j].conj()))
    residual = float(np.linalg.norm(rebuilt - target) / max(1.0, np.linalg.norm(target)))
    return EtaExpansion(eta, numeric_rank(eta, tol) == n, residual)


def coi_verdict(sigma_map: LinearMap, tol: ToleranceConfig = DEFAULT_TOL) -> CoiVerdict:
    """Is ``sigma_map`` a bijection with ``sigma`` and ``sigma^-1`` both completely positive?"""
    if sigma_map.n != sigma_map.m:
        return CoiVerdict(False, None)
    inv = inverse_map(sigma_map, tol)
    if inv is None:
        return CoiVerdict(False, None)
    ok = cp_verdict(sigma_map, tol).is_cp and cp_verdict(inv, tol).is_cp
    return CoiVerdict(bool(ok), inv)


def sigma_correspondence(
    sigma,
    tol: ToleranceConfig = DEFAULT_TOL,
    *,
    witness: bool = True,
    budget: int = DEFAULT_WITNESS_BUDGET,
    seed: int = 0,
) -> SigmaReport:
    """Decide whether ``Sigma`` satisfies the Choi correspondence.

    Raises :class:`~choicorr.linalg.NotHermitianError` for non-Hermitian input.
    When the verdict is false and ``witness`` is set, a validated counterexample
    map is searched for and attached if found.
    """
    sigma = _as_sigma(sigma)
    n = sigma.n
    w, v = hermitian_eig(sigma.matrix, tol)
    psd = psd_verdict(sigma.matrix, tol)
    rank = numeric_rank(sigma.matrix, tol)

    schmidt_rank = None
    if psd.is_psd and rank == 1:
        schmidt_rank = schmidt_decompose(np.sqrt(w[-1]) * v[:, -1], n, tol).schmidt_rank

    sigma_map = map_of_choi(sigma)
    inv = inverse_map(sigma_map, tol)
    inverse_is_cp = None if inv is None else cp_verdict(inv, tol).is_cp

    verdict = bool(psd.is_psd and rank == 1 and schmidt_rank == n)
    report = SigmaReport(
        n=n,
        eigenvalues=w,
        is_psd=psd.is_psd,
        rank=rank,
        schmidt_rank_of_range=schmidt_rank,
        sigma_is_cp=cp_verdict(sigma_map, tol).is_cp,
        sigma_invertible=inv is not None,
        sigma_inverse_is_cp=inverse_is_cp,
        verdict=verdict,
        certificate_s=extract_s(sigma, tol) if verdict else None,
    )
    if verdict or not witness:
        return report
    found = find_witness(sigma, report, budget=budget, seed=seed, tol=tol)
    return SigmaReport(**{**report.__dict__, "witness": found})


def _is_positive(a, tol: ToleranceConfig) -> bool:
    try:
        return psd_verdict(a, tol).is_psd
    except NotHermitianError:
        return False


def validate_witness(sigma, record: WitnessRecord, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Recompute both sides of a witness from scratch.

    A non-Hermitian image counts as not positive.
    """
    sigma = _as_sigma(sigma)
    phi = record.map
    cp = cp_verdict(phi, tol)
    image_positive = _is_positive(generalized_choi(sigma, phi).matrix, tol)
    if record.kind == CP_MAP_WITH_NONPOSITIVE_IMAGE:
        return bool(cp.is_cp and not image_positive)
    if record.kind == NONCP_MAP_WITH_POSITIVE_IMAGE:
        return bool(not cp.is_cp and cp.min_choi_eigenvalue <= -WITNESS_MARGIN and image_positive)
    raise ValueError(f"unknown witness kind {record.kind!r}")


def _checked(sigma, phi, kind, tol) -> Optional[WitnessRecord]:
    record = WitnessRecord(phi, kind, True)
    if validate_witness(sigma, record, tol):
        return record
    return None


def _rank_one_update(n: int, functional: np.ndarray, coeff: complex) -> LinearMap:
    """``x -> x - coeff * f(x) e_11`` where ``f(x) = sum_ij F_ij x_ij``."""
    t = np.eye(n * n, dtype=complex)
    t[0, :] -= coeff * functional
    return LinearMap(n, n, t)


def _annihilator_witness(sigma: ChoiLikeMatrix, sigma_map: LinearMap, tol) -> Optional[LinearMap]:
    """Non-CP map that acts as the identity on the range of a singular ``sigma``.

    A Hermitian functional ``H`` vanishing on the range gives
    ``phi(x) = x - c <H, x> e_11`` with ``phi o sigma = sigma``; ``c = 2/mu`` for
    the largest-magnitude eigenvalue ``mu`` of ``H`` pushes
    ``C_phi = |omega><omega| - c H (x) e_11`` to an expectation of at most -1.
    """
    n = sigma.n
    t = sigma_map.transfer
    _, sv, vh = np.linalg.svd(t.T)
    r = numeric_rank(t, tol)
    if r == n * n:
        return None
    a = vh[r].conj()  # t.T @ a = 0
    f = unvec_row(a, n, n)
    h = f + f.conj().T
    if np.linalg.norm(h) < 1e-3 * np.linalg.norm(f):
        h = 1j * (f - f.conj().T)
    mu_all, _ = np.linalg.eigh(h)
    mu = mu_all[np.argmax(np.abs(mu_all))]
    return _rank_one_update(n, vec_row(h), 2.0 / mu)


def identity_witness(sigma, tol: ToleranceConfig = DEFAULT_TOL) -> Optional[WitnessRecord]:
    """The identity map as a witness: it is CP and its image is ``Sigma`` itself."""
    sigma = _as_sigma(sigma)
    return _checked(sigma, identity_map(sigma.n), CP_MAP_WITH_NONPOSITIVE_IMAGE, tol)


def find_witness(
    sigma,
    report: Optional[SigmaReport] = None,
    *,
    budget: int = DEFAULT_WITNESS_BUDGET,
    seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> Optional[WitnessRecord]:
    """Construct a map on which the correspondence for ``Sigma`` fails.

    * ``Sigma`` not positive: the identity map is CP but its image is ``Sigma``.
    * ``Sigma = |s~><s~|`` with singular ``s``: for a unit ``u`` in the kernel of
      ``s``, ``phi(x) = x - 2 <u|x|u> e_11`` fixes the image while ``C_phi`` has
      expectation ``<= -1`` on ``|conj u>|1>``.
    * otherwise, if ``sigma`` is invertible, ``phi = tau o sigma^-1`` has image
      ``C_tau``; ``tau = id`` is tried first, then random CP maps up to ``budget``.
      If ``sigma`` is singular, a functional vanishing on its range is used.

    Every returned record has passed :func:`validate_witness`. ``None`` is a
    legitimate outcome of the randomized search.
    """
    sigma = _as_sigma(sigma)
    if report is None:
        report = sigma_correspondence(sigma, tol, witness=False)
    if report.verdict:
        return None
    n = sigma.n
    if not report.is_psd:
        return identity_witness(sigma, tol)

    if report.rank == 1:
        s = extract_s(sigma, tol)
        _, _, vh = np.linalg.svd(s)
        u = vh[-1].conj()  # s @ u = 0
        functional = np.kron(u.conj(), u)
        phi = _rank_one_update(n, functional, 2.0)
        return _checked(sigma, phi, NONCP_MAP_WITH_POSITIVE_IMAGE, tol)

    sigma_map = map_of_choi(sigma)
    inv = inverse_map(sigma_map, tol)
    if inv is None:
        phi = _annihilator_witness(sigma, sigma_map, tol)
        if phi is None:
            return None
        return _checked(sigma, phi, NONCP_MAP_WITH_POSITIVE_IMAGE, tol)

    from .harness import random_cp_map

    for trial in range(budget):
        if trial == 0:
            tau = identity_map(n)
        else:
            rng = np.random.default_rng([seed, trial])
            tau = random_cp_map(n, n, rng, kraus_count_range=(1, n * n))
        found = _checked(sigma, compose(tau, inv), NONCP_MAP_WITH_POSITIVE_IMAGE, tol)
        if found is not None:
            return found
    return None
