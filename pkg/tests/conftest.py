import numpy as np
import pytest

from choicorr.linalg import omega_vector

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def unit(i, j, n):
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1
    return e


def swap_by_loop(n):
    """SWAP = sum_ij e_ij (x) e_ji, written out entrywise."""
    f = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            for a in range(n * n):
                for b in range(n * n):
                    # (e_ij (x) e_ji)[(p,q),(r,s)] = d_ip d_jr d_jq d_is
                    p, q = divmod(a, n)
                    r, s = divmod(b, n)
                    f[a, b] += (p == i) * (r == j) * (q == j) * (s == i)
    return f


def omega_projector(n):
    w = omega_vector(n)
    return np.outer(w, w.conj())


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
