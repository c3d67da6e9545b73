import numpy as np
import pytest
from scipy.linalg import sqrtm

from choicorr.basis import (
    OrderedBasis,
    ZetaRecoveryError,
    basis_correspondence,
    basis_from_zeta,
    c_basis_matrix,
    m_basis_map,
    matrix_unit_basis,
    pauli_basis,
    recover_zeta,
    sigma_of_basis,
)
from choicorr.correspondence import find_witness, validate_witness
from choicorr.harness import TrialConfig, equivalence_trial, random_complex, random_nonsingular
from choicorr.linalg import numeric_rank
from choicorr.maps import choi_of_map, identity_map

from conftest import X, Y, Z, omega_projector, swap_by_loop


def test_ordered_basis_accepts_nested_and_flat():
    units = matrix_unit_basis(2)
    nested = OrderedBasis.of([[units[0, 0], units[0, 1]], [units[1, 0], units[1, 1]]])
    flat = OrderedBasis.of(list(units.elements))
    for a, b in zip(nested.elements, flat.elements):
        np.testing.assert_array_equal(a, b)
    with pytest.raises(ValueError):
        OrderedBasis(2, (np.eye(2),) * 3)
    with pytest.raises(ValueError):
        OrderedBasis(2, (np.eye(3),) * 4)


def test_c_basis_matrix_examples():
    np.testing.assert_array_equal(c_basis_matrix(matrix_unit_basis(3)), np.eye(9))
    c = c_basis_matrix(pauli_basis())
    for j, p in enumerate([np.eye(2), X, Y, Z]):
        np.testing.assert_allclose(c[:, j], p.reshape(-1) / np.sqrt(2))
    assert numeric_rank(c) == 4
    assert pauli_basis().is_basis()
    repeated = OrderedBasis(2, (np.eye(2), np.eye(2), X, Z))
    assert not repeated.is_basis()


def test_m_basis_map_examples(rng):
    np.testing.assert_array_equal(m_basis_map(matrix_unit_basis(2)).transfer, np.eye(4))
    np.testing.assert_allclose(choi_of_map(m_basis_map(pauli_basis())).matrix, swap_by_loop(2), atol=1e-15)
    basis = OrderedBasis(3, tuple(random_complex((3, 3), rng) for _ in range(9)))
    expected = sum(np.kron(b, b) for b in basis.elements)
    got = choi_of_map(m_basis_map(basis)).matrix
    assert np.linalg.norm(got - expected) <= 1e-12 * np.linalg.norm(expected)


def test_m_basis_map_uses_plain_transpose():
    c = c_basis_matrix(pauli_basis())
    wrong = c @ c.conj().T  # = identity for an orthonormal basis
    assert not np.allclose(wrong, m_basis_map(pauli_basis()).transfer)


def test_sigma_of_basis_examples(rng):
    np.testing.assert_array_equal(sigma_of_basis(matrix_unit_basis(3)).matrix, omega_projector(3))
    sigma = sigma_of_basis(pauli_basis()).matrix
    np.testing.assert_allclose(sigma, swap_by_loop(2), atol=1e-15)
    np.testing.assert_allclose(np.linalg.eigvalsh(sigma), [-1, 1, 1, 1], atol=1e-10)
    zeta = random_nonsingular(3, rng)
    w = sum(np.kron(zeta[:, i], zeta[:, i]) for i in range(3))
    np.testing.assert_allclose(sigma_of_basis(basis_from_zeta(zeta)).matrix, np.outer(w, w.conj()), atol=1e-10)


def test_two_path_equality_random_families():
    for t in range(30):
        rng = np.random.default_rng([5, t])
        n = 1 + t % 4
        basis = OrderedBasis(n, tuple(random_complex((n, n), rng) for _ in range(n * n)))
        direct = sigma_of_basis(basis).matrix
        via_map = choi_of_map(m_basis_map(basis)).matrix
        assert np.linalg.norm(direct - via_map) <= 1e-12 * np.linalg.norm(direct)


def test_basis_correspondence_matrix_units():
    rep = basis_correspondence(matrix_unit_basis(3))
    assert rep.verdict and rep.is_basis and rep.zeta_form
    np.testing.assert_allclose(rep.zeta, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(rep.s_certificate, np.eye(3), atol=1e-12)


def test_basis_correspondence_pauli():
    rep = basis_correspondence(pauli_basis())
    assert not rep.verdict and rep.is_basis and not rep.mb_choi_psd
    assert rep.zeta is None


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_rank_one_bases_pass(n, rng):
    zeta = random_nonsingular(n, rng)
    basis = basis_from_zeta(zeta)
    rep = basis_correspondence(basis)
    assert rep.verdict and rep.is_basis and rep.zeta_form
    assert rep.mb_choi_rank == 1 and numeric_rank(rep.s_certificate) == n
    scale = max(np.linalg.norm(b) for b in basis.elements)
    for i in range(n):
        for j in range(n):
            err = np.linalg.norm(basis[i, j] - np.outer(rep.zeta[:, i], rep.zeta[:, j].conj()))
            assert err <= 1e-8 * scale


def test_recover_zeta_up_to_global_phase(rng):
    for n in (2, 3, 4):
        zeta = random_nonsingular(n, rng)
        got = recover_zeta(basis_from_zeta(zeta))
        phase = np.vdot(got[:, 0], zeta[:, 0])
        phase /= abs(phase)
        np.testing.assert_allclose(got * phase, zeta, atol=1e-10)


def test_recover_zeta_errors():
    with pytest.raises(ZetaRecoveryError):
        recover_zeta(pauli_basis())
    units = list(matrix_unit_basis(2).elements)
    units[1] = 2 * units[1]
    with pytest.raises(ZetaRecoveryError):
        recover_zeta(OrderedBasis(2, tuple(units)))


def test_verdict_true_basis_need_not_be_rank_one():
    # remixing [C_B] by a real rotation O (O O^T = I) leaves Sigma_B unchanged
    units = list(matrix_unit_basis(2).elements)
    c, s = np.cos(0.7), np.sin(0.7)
    units[0], units[3] = c * units[0] + s * units[3], -s * units[0] + c * units[3]
    rep = basis_correspondence(OrderedBasis(2, tuple(units)))
    np.testing.assert_allclose(rep.sigma_b.matrix, omega_projector(2), atol=1e-14)
    assert rep.verdict and rep.is_basis and not rep.zeta_form


def test_singlet_basis_passes_without_zeta_form():
    # [C_B] = symmetric square root of the realigned singlet projector
    w = np.array([0, 1, -1, 0], dtype=complex)
    g = np.outer(w, w).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    cb = sqrtm(g)
    basis = OrderedBasis(2, tuple(cb[:, j].reshape(2, 2) for j in range(4)))
    rep = basis_correspondence(basis)
    np.testing.assert_allclose(rep.sigma_b.matrix, np.outer(w, w), atol=1e-12)
    assert rep.verdict and rep.is_basis and not rep.zeta_form
    # a zeta family always gives a flip-symmetric range vector; the singlet is antisymmetric
    assert np.allclose(rep.s_certificate, -rep.s_certificate.T)


def test_non_basis_family_is_analyzed():
    family = OrderedBasis(2, (np.eye(2), np.eye(2), X, Z))
    rep = basis_correspondence(family)
    assert not rep.is_basis and not rep.verdict


def test_relabeling_does_not_change_verdict(rng):
    perm = np.eye(3)[[2, 0, 1]]
    for basis in (basis_from_zeta(random_nonsingular(3, rng)), matrix_unit_basis(3),
                  OrderedBasis(3, tuple(random_complex((3, 3), rng) for _ in range(9)))):
        relabeled = OrderedBasis(3, tuple(perm @ b @ perm.T for b in basis.elements))
        order = rng.permutation(9)
        reordered = OrderedBasis(3, tuple(basis.elements[k] for k in order))
        verdicts = {basis_correspondence(b).verdict for b in (basis, relabeled, reordered)}
        assert len(verdicts) == 1


def test_sampled_correspondence_for_bases(rng):
    good = basis_from_zeta(random_nonsingular(2, rng))
    rep = equivalence_trial(sigma_of_basis(good), TrialConfig(seed=9, n=2, m=4, trials=20))
    assert rep.discrepancies == 0

    sigma = sigma_of_basis(pauli_basis())
    witness = find_witness(sigma)
    assert validate_witness(sigma, witness)
    np.testing.assert_array_equal(witness.map.transfer, identity_map(2).transfer)
    rep = equivalence_trial(sigma, TrialConfig(seed=9, n=2, m=2, trials=4), probe_maps=[witness.map])
    assert rep.discrepancies >= 1


def test_non_hermitian_sigma_b_has_identity_witness(rng):
    basis = OrderedBasis(2, tuple(random_complex((2, 2), rng) for _ in range(4)))
    rep = basis_correspondence(basis, witness=True)
    assert not rep.sigma_b_hermitian and not rep.verdict and rep.sigma_report is None
    assert rep.witness is not None and rep.witness.validated
    np.testing.assert_array_equal(rep.witness.map.transfer, np.eye(4))
