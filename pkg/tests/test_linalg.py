import logging

import numpy as np
import pytest

from hambif.linalg import (
    EigenError,
    SymmetricMatrix,
    block_diag,
    build_gj,
    build_qj,
    conjugator_X,
    jacobi_eigen,
    morse_indices,
    pair_eigenvalues,
    sym_eigen,
    symplectic_J,
)


def random_sym(rng, n, scale=3.0):
    a = rng.normal(scale=scale, size=(n, n))
    return 0.5 * (a + a.T)


def test_symmetric_matrix_rejects_asymmetry():
    with pytest.raises(ValueError):
        SymmetricMatrix([[1.0, 2.0], [2.1, 1.0]])
    with pytest.raises(ValueError):
        SymmetricMatrix([[1.0, 2.0, 3.0]])
    m = SymmetricMatrix([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(ValueError):
        m.entries[0, 0] = 5.0


def test_jacobi_against_lapack():
    rng = np.random.default_rng(11)
    for n in (1, 2, 5, 12):
        a = random_sym(rng, n)
        w, v = jacobi_eigen(a)
        assert np.allclose(sorted(w), np.linalg.eigvalsh(a), atol=1e-12 * (1 + np.abs(a).max()))
        assert np.allclose(v.T @ v, np.eye(n), atol=1e-12)
        assert np.allclose(a @ v, v * w, atol=1e-11 * (1 + np.abs(a).max()))


def test_jacobi_sweep_cap():
    rng = np.random.default_rng(1)
    with pytest.raises(EigenError):
        jacobi_eigen(random_sym(rng, 8), max_sweeps=1)


def test_symplectic_J():
    J = symplectic_J(2)
    assert np.array_equal(J @ J, -np.eye(4))
    assert np.array_equal(J.T, -J)


def test_q0_is_minus_k():
    K = np.diag([1.0, -2.0])
    assert np.array_equal(build_qj(K, 0).entries, -K)


def test_qj_rejects_odd_dimension():
    with pytest.raises(ValueError):
        build_qj(np.eye(3), 1)


def test_conjugation_by_X():
    rng = np.random.default_rng(2)
    n = 3
    C, D = random_sym(rng, n), random_sym(rng, n)
    X = conjugator_X(n)
    assert np.allclose(X.T @ X, np.eye(4 * n))
    for j in (1, 2, 5):
        q = build_qj(block_diag(C, D), j).entries
        g = build_gj(C, D, j).entries
        assert np.allclose(X.T @ q @ X, block_diag(g, g) / (1 + j * j), atol=1e-12)


def test_morse_counts_and_degenerate_warning(caplog):
    m = morse_indices(np.diag([-1.0, 2.0, 3.0]))
    assert (m.m_minus, m.m_plus, m.m_zero) == (1, 2, 0)
    with caplog.at_level(logging.WARNING):
        m = morse_indices(np.diag([0.0, 1.0]))
    assert m.m_zero == 1
    assert "degenerate" in caplog.text


def test_pair_eigenvalues():
    assert pair_eigenvalues([1.0, 1.0, -2.0, -2.0]) == [-2.0, 1.0]
    with pytest.raises(ValueError):
        pair_eigenvalues([1.0, 2.0])
    with pytest.raises(ValueError):
        pair_eigenvalues([1.0])


def test_sym_eigen_sorted():
    assert sym_eigen(np.diag([3.0, -1.0, 2.0])) == [-1.0, 2.0, 3.0]
