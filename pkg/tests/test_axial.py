import numpy as np
import pytest

from dirac_threshold.axial import (AxialGrid, BranchSqrt, branch_sqrt, limiting_kernel, rank_one_a, resolvent_kernel,
                                   s_function, s_kernel)
from dirac_threshold.core import AxialProfile


def test_resolvent_kernel_at_minus_one():
    x = np.linspace(-5, 5, 41)
    K = resolvent_kernel(-1.0, x[:, None], x[None, :])
    ref = np.exp(-np.abs(x[:, None] - x[None, :])) / 2
    assert np.max(np.abs(K - ref)) < 1e-12


def test_branch_sqrt_cuts():
    assert branch_sqrt(-4.0).imag == pytest.approx(2.0)
    assert branch_sqrt(4.0 + 1e-9j).imag > 0
    assert branch_sqrt(4.0 - 1e-9j).imag > 0
    with pytest.raises(ValueError):
        branch_sqrt(2.0)
    with pytest.raises(ValueError):
        branch_sqrt(-2.0, cut="negative")


def test_limiting_kernel_is_boundary_value():
    x, y = 0.3, -1.1
    lim = limiting_kernel(2.0, x, y)
    near = resolvent_kernel(2.0 + 1e-10j, x, y)
    assert abs(lim - near) < 1e-8


def test_s_function_small_argument():
    d = np.array([0.0, 0.5, 2.0])
    assert np.allclose(s_function(0.0, d), -d / 2)
    w = 1e-3 + 1e-3j
    exact = (1 - np.exp(1j * w * d[1:])) / (2j * w)
    assert np.allclose(s_function(w, d)[1:], exact, rtol=1e-12)


def test_s_kernel_limit_linear_rate():
    grid = AxialGrid(3.0, 16)
    d = np.abs(grid.nodes[:, None] - grid.nodes[None, :])
    ks = [1e-2, 1e-3, 1e-4, 1e-5]
    errs = [np.max(np.abs(s_kernel(k * np.exp(0.7j), 1, grid) / grid.h + d / 2)) for k in ks]
    rates = [e / k for e, k in zip(errs, ks)]
    assert errs[-1] < 20 * ks[-1]
    assert max(rates) / min(rates) < 1.5


def test_rank_one_factorization():
    grid = AxialGrid(4.0, 20)
    a, c, cs = rank_one_a(grid, AxialProfile())
    assert np.allclose(-2j * a, cs @ c)
    assert np.linalg.matrix_rank(a) == 1


def test_grid_padding_keeps_spacing():
    grid = AxialGrid(2.0, 10)
    box, sl = grid.padded(7)
    assert box.N % 2 == 1
    assert box.h == pytest.approx(grid.h)
    assert np.allclose(box.nodes[sl] - box.nodes[sl][0], grid.nodes - grid.nodes[0])


def test_p3_hermitian():
    P = AxialGrid(2.0, 9).p3_matrix()
    assert np.allclose(P, P.conj().T)


def test_branch_sqrt_object():
    f = BranchSqrt()
    z = np.array([-1.0, 2.0 + 1e-3j, -3.0 - 4.0j])
    w = f(z)
    assert np.all(w.imag > 0)
    assert np.allclose(w * w, z)
