"""Seeded random instances and brute-force oracles for cross-validation.

Randomness for trial ``t`` on stream ``k`` of a run with seed ``S`` always
comes from ``numpy.random.default_rng([S, k, t])``, so a run is reproducible
bit for bit and trials can be evaluated in any order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .linalg import DEFAULT_TOL, ToleranceConfig, numeric_rank, pairing, psd_verdict
from .maps import (
    ChoiLikeMatrix,
    KrausSet,
    LinearMap,
    apply_map,
    choi_of_map,
    cp_verdict,
    generalized_choi,
    map_of_choi,
)

__all__ = [
    "TrialConfig",
    "MAX_EXEMPLARS",
    "random_complex",
    "random_unitary",
    "random_nonsingular",
    "random_singular",
    "random_kraus_set",
    "random_cp_map",
    "random_noncp_map",
    "random_map",
    "random_psd",
    "random_hermitian_nonpsd",
    "SIGMA_CLASSES",
    "random_sigma",
    "choi_bruteforce",
    "Discrepancy",
    "DiscrepancyReport",
    "equivalence_trial",
    "dual_cone_trial",
]

MAX_EXEMPLARS = 5
MAX_DIM = 4


@dataclass(frozen=True)
class TrialConfig:
    seed: int = 0
    n: int = 2
    m: int = 2
    trials: int = 100
    kraus_count_range: tuple = (1, 4)

    def __post_init__(self):
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not (1 <= self.n <= MAX_DIM and 1 <= self.m <= MAX_DIM):
            raise ValueError(f"dimensions must lie in 1..{MAX_DIM}")
        lo, hi = self.kraus_count_range
        if not (1 <= lo <= hi):
            raise ValueError(f"bad Kraus count range {self.kraus_count_range}")

    def rng(self, trial: int, stream: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream, trial])


def random_complex(shape, rng: np.random.Generator) -> np.ndarray:
    """Entries with independent standard normal real and imaginary parts."""
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(random_complex((d, d), rng))
    d_ = np.diag(r)
    return q * (d_ / np.abs(d_))


def random_nonsingular(n: int, rng: np.random.Generator, max_cond: float = 1e6) -> np.ndarray:
    while True:
        s = random_complex((n, n), rng)
        if numeric_rank(s) == n and np.linalg.cond(s) < max_cond:
            return s


def random_singular(n: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    """Random ``n x n`` matrix of exact rank ``rank`` (default ``n - 1``)."""
    r = n - 1 if rank is None else rank
    return random_complex((n, r), rng) @ random_complex((r, n), rng)


def random_kraus_set(n: int, m: int, k: int, rng: np.random.Generator) -> KrausSet:
    return KrausSet(tuple(random_complex((n, m), rng) for _ in range(k)), n, m)


def random_cp_map(
    n: int,
    m: int,
    rng: np.random.Generator,
    *,
    kraus_count: Optional[int] = None,
    kraus_count_range: tuple = (1, 4),
) -> LinearMap:
    """Sum of ``Ad_s`` over Gaussian Kraus operators; CP by construction."""
    if kraus_count is None:
        lo, hi = kraus_count_range
        kraus_count = int(rng.integers(lo, hi + 1))
    return random_kraus_set(n, m, kraus_count, rng).to_map()


def random_noncp_map(n: int, m: int, rng: np.random.Generator, *, gap: float = 0.1) -> LinearMap:
    """Hermiticity-preserving map whose Choi matrix has an eigenvalue below ``-gap``."""
    d = n * m
    if d < 2:
        raise ValueError("need n*m >= 2")
    lam = rng.standard_normal(d)
    k = int(rng.integers(d))
    lam[k] = -(gap + abs(lam[k]))
    v = random_unitary(d, rng)
    return map_of_choi(ChoiLikeMatrix(n, m, (v * lam) @ v.conj().T))


def random_map(n: int, m: int, rng: np.random.Generator) -> LinearMap:
    """Arbitrary map with Gaussian transfer matrix."""
    return LinearMap(n, m, random_complex((m * m, n * n), rng))


def random_psd(d: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    g = random_complex((d, rank), rng)
    return g @ g.conj().T


def random_hermitian_nonpsd(d: int, rng: np.random.Generator, *, gap: float = 0.1) -> np.ndarray:
    lam = rng.standard_normal(d)
    k = int(rng.integers(d))
    lam[k] = -(gap + abs(lam[k]))
    v = random_unitary(d, rng)
    return (v * lam) @ v.conj().T


SIGMA_CLASSES = (
    "nonsingular_rank_one",
    "singular_rank_one",
    "psd_higher_rank",
    "hermitian_nonpsd",
)


def random_sigma(kind: str, n: int, rng: np.random.Generator) -> ChoiLikeMatrix:
    """Random element of ``M_n (x) M_n`` from one of :data:`SIGMA_CLASSES`."""
    d = n * n
    if kind == "nonsingular_rank_one":
        t = random_nonsingular(n, rng).conj().reshape(-1)
        a = np.outer(t, t.conj())
    elif kind == "singular_rank_one":
        t = random_singular(n, rng).conj().reshape(-1)
        a = np.outer(t, t.conj())
    elif kind == "psd_higher_rank":
        a = random_psd(d, int(rng.integers(2, d + 1)), rng)
    elif kind == "hermitian_nonpsd":
        a = random_hermitian_nonpsd(d, rng)
    else:
        raise ValueError(f"unknown class {kind!r}")
    return ChoiLikeMatrix(n, n, a)


def choi_bruteforce(phi: LinearMap) -> ChoiLikeMatrix:
    """``sum_ij e_ij (x) phi(e_ij)`` by the literal double loop."""
    n = phi.n
    total = np.zeros((n * phi.m, n * phi.m), dtype=complex)
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1.0
            total += np.kron(e, apply_map(phi, e))
    return ChoiLikeMatrix(n, phi.m, total)


@dataclass(frozen=True)
class Discrepancy:
    m: int
    trial: int
    source: str
    is_cp: bool
    image_is_psd: bool
    min_choi_eigenvalue: float
    min_image_eigenvalue: float


@dataclass
class DiscrepancyReport:
    n: int
    maps_tested: int = 0
    discrepancies: int = 0
    exemplars: list = field(default_factory=list)

    def record(self, d: Discrepancy):
        self.discrepancies += 1
        if len(self.exemplars) < MAX_EXEMPLARS:
            self.exemplars.append(d)

    def merge(self, other: "DiscrepancyReport") -> "DiscrepancyReport":
        out = DiscrepancyReport(self.n, self.maps_tested + other.maps_tested,
                                self.discrepancies + other.discrepancies)
        out.exemplars = (self.exemplars + other.exemplars)[:MAX_EXEMPLARS]
        return out


def _probe(report, sigma, phi, m, trial, source, tol):
    cp = cp_verdict(phi, tol)
    image = psd_verdict(generalized_choi(sigma, phi).matrix, tol)
    report.maps_tested += 1
    if cp.is_cp != image.is_psd:
        report.record(Discrepancy(m, trial, source, cp.is_cp, image.is_psd,
                                  cp.min_choi_eigenvalue, image.min_eigenvalue))


def equivalence_trial(
    sigma: ChoiLikeMatrix,
    cfg: TrialConfig,
    *,
    probe_maps: Iterable[LinearMap] = (),
    tol: ToleranceConfig = DEFAULT_TOL,
) -> DiscrepancyReport:
    """Sample maps ``M_n -> M_m`` for ``m = 1..cfg.m`` and compare CP with positivity of the image.

    Half of the ``cfg.trials`` maps per ``m`` are CP, half are not. Extra
    ``probe_maps`` (e.g. constructed witnesses) are checked after the sample.
    """
    n = sigma.n
    report = DiscrepancyReport(n)
    half = cfg.trials // 2
    for m in range(1, cfg.m + 1):
        for t in range(cfg.trials):
            rng = cfg.rng(t, stream=m)
            if t < half or n * m < 2:
                phi = random_cp_map(n, m, rng, kraus_count_range=cfg.kraus_count_range)
                source = "cp"
            else:
                phi = random_noncp_map(n, m, rng)
                source = "noncp"
            _probe(report, sigma, phi, m, t, source, tol)
    for k, phi in enumerate(probe_maps):
        _probe(report, sigma, phi, phi.m, k, "probe", tol)
    return report


def dual_cone_trial(cfg: TrialConfig) -> float:
    """Smallest real part of ``<C_phi, C_psi>`` over pairs of random CP maps."""
    lo = np.inf
    for t in range(cfg.trials):
        rng = cfg.rng(t, stream=99)
        phi = random_cp_map(cfg.n, cfg.m, rng, kraus_count_range=cfg.kraus_count_range)
        psi = random_cp_map(cfg.n, cfg.m, rng, kraus_count_range=cfg.kraus_count_range)
        value = pairing(choi_of_map(phi).matrix, choi_of_map(psi).matrix)
        lo = min(lo, value.real)
    return float(lo)
