import numpy as np
import pytest

from dirac_threshold.det_index import (Contour, ContourUnsafe, calibrate_jensen_constant, det_commute_check,
                                       det_reg, det_reg_eigen, jensen_constant, jensen_count_bound,
                                       lipschitz_bound, log_det_reg, operator_index, operator_index_result,
                                       scalar_index, scalar_index_result, schatten_norm)


def rand(n, seed, scale=0.3):
    rng = np.random.default_rng(seed)
    return scale * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(n)


def test_det_identity_exact():
    for q in (1, 2, 3, 2.5):
        assert det_reg(np.zeros((5, 5)), q) == 1.0


@pytest.mark.parametrize("q", [1, 2, 3])
def test_det_matches_eigen_product(q):
    T = rand(6, q)
    assert abs(det_reg(T, q) - det_reg_eigen(T, q)) < 1e-12
    assert abs(np.exp(log_det_reg(T, q)) - det_reg(T, q)) < 1e-12


def test_commutation():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(4, 6)) * 0.3
    B = rng.normal(size=(6, 4)) * 0.3
    for q in (1, 2, 3):
        a, b = det_commute_check(A, B, q)
        assert abs(a - b) < 1e-10


def test_schatten_norms():
    T = np.diag([3.0, 4.0])
    assert schatten_norm(T, 2) == pytest.approx(5.0)
    assert schatten_norm(T, np.inf) == pytest.approx(4.0)
    assert schatten_norm(T, 1) == pytest.approx(7.0)


def test_lipschitz_random_pairs():
    for i in range(20):
        T1, T2 = rand(5, 2 * i, 0.5), rand(5, 2 * i + 1, 0.5)
        for q in (1, 2):
            assert abs(det_reg(T1, q) - det_reg(T2, q)) <= lipschitz_bound(T1, T2, q)


@pytest.mark.parametrize("n", [1, 3, 10])
def test_power_winding(n):
    res = scalar_index_result(lambda k: k**n, Contour.circle(0, 1.0))
    assert res.index == n
    assert res.residual < 1e-6


def test_winding_with_multiplicity():
    f = lambda k: (k - 0.2) * (k - 0.3) ** 2
    assert scalar_index(f, Contour.circle(0, 1.0)) == 3
    assert scalar_index(f, Contour.circle(0.2, 0.05)) == 1


def test_rectangle_and_polyline_orientation():
    f = lambda k: k - (0.1 + 0.1j)
    assert scalar_index(f, Contour.rectangle(0, 1, 0, 1)) == 1
    clockwise = [(0, 0), (0, 1), (1, 1), (1, 0)]
    assert scalar_index(f, Contour.polyline([complex(*p) for p in clockwise])) == 1


def test_operator_index_matches_det_winding():
    rng = np.random.default_rng(7)
    A0 = rng.normal(size=(4, 4))
    A = lambda z: A0 - z * np.eye(4)
    ev = np.linalg.eigvals(A0)
    R = float(np.sort(np.abs(ev))[1] + np.sort(np.abs(ev))[2]) / 2
    c = Contour.circle(0, R)
    res = operator_index_result(A, c)
    assert res.index == int(np.sum(np.abs(ev) < R))
    assert res.residual < 1e-6
    assert res.index == scalar_index(lambda z: np.linalg.det(A(z)), c)
    assert operator_index(A, c) == res.index


def test_zero_on_contour_detected():
    with pytest.raises(ContourUnsafe):
        scalar_index(lambda k: k - 1.0, Contour.circle(0, 1.0))


def test_jensen_bound_two_zeros():
    g = lambda w: (w - 0.1) * (w + 0.15j)
    C = calibrate_jensen_constant(1.0, 0.5)
    assert 0 < C <= jensen_constant(1.0, 0.5) + 1e-12
    assert jensen_count_bound(g, 0.02, 1.0, 0.5) >= 2
    assert jensen_count_bound(g, 0.02, 1.0, 0.5, C_prime=C) >= 2 - 1e-9
