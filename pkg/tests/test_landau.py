import numpy as np
import pytest

from dirac_threshold.core import PotentialSpec, TransverseProfile
from dirac_threshold.landau import (gap_radii, gaussian_toeplitz_eigenvalues, lll_basis, toeplitz_matrix,
                                    vm_profile)


def test_gram_is_identity():
    basis = lll_basis(2.0, 8)
    assert np.max(np.abs(basis.gram() - np.eye(8))) < 1e-10


def test_gaussian_toeplitz_closed_form():
    basis = lll_basis(2.0, 12)
    mu = np.sort(np.linalg.eigvalsh(toeplitz_matrix(TransverseProfile("gaussian", 1.0), basis)))[::-1]
    ref = gaussian_toeplitz_eigenvalues(2.0, 1.0, 12)
    assert np.max(np.abs(mu - ref) / ref) < 1e-8


def test_toeplitz_of_constant_is_identity():
    basis = lll_basis(2.0, 5)
    T = toeplitz_matrix(lambda x1, x2: np.ones(np.shape(x1)), basis)
    assert np.allclose(T, np.eye(5), atol=1e-10)


def test_gap_radii_geometric():
    mu = 0.5 ** (np.arange(6) + 1)
    tsp = gap_radii(mu, 0.3)
    assert tsp.radii.size == 5
    assert tsp.radii[0] == pytest.approx(np.sqrt(mu[0] * mu[1]))
    assert tsp.band_count(tsp.radii[1], tsp.radii[0]) == 1
    assert tsp.trace_above(tsp.radii[2]) == 3


def test_gap_radii_strict_gap_rejected():
    tsp = gap_radii(0.5 ** (np.arange(4) + 1), 0.9)
    assert tsp.radii.size == 0


def test_single_state_no_radii():
    with pytest.warns(UserWarning):
        tsp = gap_radii([0.4], 0.3)
    assert tsp.radii.size == 0


def test_vm_profile_factor():
    spec = PotentialSpec(phi=2j, epsilon=0.1)
    prof = vm_profile(spec, 1)
    assert prof.factor == pytest.approx(0.5 * 0.1 * 2 * np.sqrt(np.pi))
    assert vm_profile(spec, 1, use_abs_w=True).factor == pytest.approx(0.5 * np.sqrt(np.pi))
