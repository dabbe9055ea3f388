import numpy as np
import pytest

from dirac_threshold.axial import AxialGrid
from dirac_threshold.core import ModelParams, PotentialSpec, validate_potential
from dirac_threshold.dirac_op import (TruncationScheme, assemble_free, assemble_potential, channel_operator,
                                      channel_symbol, cluster_eigenvalues, direct_spectrum,
                                      numerical_range_distance, projectors, representation_check)

PARAMS = ModelParams()


def small(n_levels=2, M=2, L=3.0, N=16):
    return TruncationScheme(n_levels, M, AxialGrid(L, N))


def test_channel_count_and_dim():
    tr = small(3, 2)
    assert tr.n_channels == 10
    assert tr.dim == 10 * 2 * 16
    assert len(list(tr.labels())) == tr.dim


def test_free_operator_hermitian():
    D = np.asarray(assemble_free(PARAMS, small()))
    assert np.allclose(D, D.conj().T)


def test_free_gap_small_grid():
    ev = np.linalg.eigvalsh(np.asarray(assemble_free(PARAMS, small(3, 1, 6.0, 32))))
    assert np.min(np.abs(ev)) == pytest.approx(1.0, abs=1e-12)


def test_free_square_levels():
    # D^2 on a channel pair is m^2 + Lambda + xi^2
    tr = small(2, 1, 3.0, 8)
    D = np.asarray(assemble_free(PARAMS, tr))
    ev = np.sort(np.linalg.eigvalsh(D @ D))
    xi = tr.grid.frequencies()
    expect = np.sort(np.concatenate([np.repeat(1 + lam + xi**2, 1) for lam in tr.level_shifts(PARAMS.b0)]))
    assert np.allclose(ev, expect, atol=1e-10)


def test_projector_commutes():
    tr = small()
    P, Q = projectors(tr, assemble_free(PARAMS, tr))
    P = np.asarray(P)
    assert np.allclose(P @ P, P)
    assert np.allclose(P + np.asarray(Q), np.eye(tr.dim))


def test_representation_check_zero():
    assert representation_check(PARAMS, small()) < 1e-12


def test_symbol_matches_operator():
    tr = small(2, 1, 3.0, 9)
    xi = tr.grid.frequencies()
    sym = channel_symbol(PARAMS, tr, xi)
    F = np.exp(1j * np.outer(tr.grid.nodes, xi))  # plane waves
    A = channel_operator(PARAMS, tr, tr.grid.p3_matrix())
    C, N = tr.n_channels, tr.grid.N
    for i in range(N):
        v = np.kron(np.eye(C), F[:, i:i + 1])
        lhs = A @ v
        rhs = v @ sym[i]
        assert np.allclose(lhs, rhs, atol=1e-10)


def test_potential_zero_coupling():
    V = np.asarray(assemble_potential(validate_potential(PotentialSpec(phi=1j, epsilon=0.0)), small(), PARAMS))
    assert np.all(V == 0)


def test_hermitian_potential_gives_real_spectrum():
    tr = small(1, 2, 3.0, 16)
    spec = validate_potential(PotentialSpec(phi=1.0, epsilon=0.3))
    H = np.asarray(assemble_free(PARAMS, tr)) + np.asarray(assemble_potential(spec, tr, PARAMS))
    for z, _ in direct_spectrum(H, 1.0, 0.5):
        assert abs(z.imag) < 1e-8


def test_cluster_multiplicities():
    out = cluster_eigenvalues(np.array([1.0, 1.0 + 1e-12, 2.0]), 1e-8)
    assert sorted(m for _, m in out) == [1, 2]


def test_numerical_range_distance_diagonal():
    A = np.diag([0.0, 1.0, 1j])
    assert numerical_range_distance(A, 2.0) == pytest.approx(1.0, abs=1e-8)
    assert numerical_range_distance(A, 0.2 + 0.2j) <= 0.0


def test_cap_enforced():
    with pytest.raises(ValueError):
        TruncationScheme(3, 10, AxialGrid(5.0, 400), cap=20000)
