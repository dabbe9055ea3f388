"""Regularized determinants, Schatten norms, contour indices and the Jensen zero-count bound."""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

import numpy as np
from scipy import linalg


class ContourUnsafe(RuntimeError):
    """The integrand vanishes (or nearly so) on the contour."""


# --- determinants ----------------------------------------------------------------


def _order(q: float) -> int:
    return max(1, int(ceil(q)))


def det_reg(T, q: float = 1) -> complex:
    """det_q(I - T) = prod (1 - mu) exp(sum_{k < ceil q} mu^k / k) over eigenvalues mu of T."""
    T = np.asarray(T, dtype=complex)
    n = T.shape[0]
    if n == 0:
        return 1.0 + 0j
    d = linalg.det(np.eye(n) - T)
    p = _order(q)
    if p == 1:
        return complex(d)
    acc, P = 0j, np.eye(n, dtype=complex)
    for k in range(1, p):
        P = P @ T
        acc += np.trace(P) / k
    return complex(d * np.exp(acc))


def log_det_reg(T, q: float = 1) -> complex:
    """A logarithm of det_q(I - T) (branch of the imaginary part arbitrary)."""
    T = np.asarray(T, dtype=complex)
    n = T.shape[0]
    sign, logabs = np.linalg.slogdet(np.eye(n) - T)
    if sign == 0:
        return complex(-np.inf)
    out = logabs + 1j * np.angle(sign)
    p = _order(q)
    if p > 1:
        P = np.eye(n, dtype=complex)
        for k in range(1, p):
            P = P @ T
            out += np.trace(P) / k
    return complex(out)


def det_reg_eigen(T, q: float = 1) -> complex:
    """Same quantity through the eigenvalue product; used as an independent check."""
    mu = linalg.eigvals(np.asarray(T, dtype=complex))
    p = _order(q)
    corr = sum(mu**k / k for k in range(1, p)) if p > 1 else 0.0
    return complex(np.prod((1 - mu) * np.exp(corr)))


def det_commute_check(A, B, q: float = 1) -> tuple[complex, complex]:
    """(det_q(I - AB), det_q(I - BA))."""
    A, B = np.asarray(A, dtype=complex), np.asarray(B, dtype=complex)
    return det_reg(A @ B, q), det_reg(B @ A, q)


def schatten_norm(T, q: float) -> float:
    """(sum of s_j^q)^(1/q) over singular values; q = inf gives the operator norm."""
    sv = linalg.svdvals(np.asarray(T))
    if sv.size == 0:
        return 0.0
    if np.isinf(q):
        return float(sv[0])
    return float(np.sum(sv**q) ** (1.0 / q))


def lipschitz_bound(T1, T2, q: float = 1, gamma_q: float = 1.0) -> float:
    """||T1 - T2||_q exp(gamma_q (||T1||_q + ||T2||_q + 1)^ceil(q))."""
    d = schatten_norm(np.asarray(T1) - np.asarray(T2), q)
    s = schatten_norm(T1, q) + schatten_norm(T2, q) + 1.0
    return float(d * np.exp(gamma_q * s ** _order(q)))


# --- contours ------------------------------------------------------------------------


@dataclass(frozen=True)
class Contour:
    """Closed, positively oriented contour parametrized by t in [0, 1)."""

    kind: str
    center: complex = 0j
    radius: float = 1.0
    vertices: tuple = ()

    @staticmethod
    def circle(center: complex, radius: float) -> "Contour":
        return Contour("circle", center=complex(center), radius=float(radius))

    @staticmethod
    def rectangle(x0: float, x1: float, y0: float, y1: float) -> "Contour":
        if not (x1 > x0 and y1 > y0):
            raise ValueError("degenerate rectangle")
        v = (complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1))
        return Contour("rectangle", vertices=v)

    @staticmethod
    def polyline(vertices) -> "Contour":
        v = tuple(complex(p) for p in vertices)
        if len(v) < 3:
            raise ValueError("polyline contour needs at least 3 vertices")
        area = 0.5 * sum((a.conjugate() * b).imag for a, b in zip(v, v[1:] + v[:1]))
        if area < 0:
            v = v[::-1]
        return Contour("polyline", vertices=v)

    @property
    def pieces(self) -> int:
        return 4 if self.kind == "circle" else len(self.vertices)

    def breakpoints(self) -> np.ndarray:
        return np.arange(self.pieces + 1) / self.pieces

    def point(self, t):
        t = np.asarray(t, dtype=float) % 1.0
        if self.kind == "circle":
            return self.center + self.radius * np.exp(2j * np.pi * t)
        v = np.array(self.vertices + self.vertices[:1])
        n = len(self.vertices)
        s = t * n
        i = np.minimum(np.floor(s).astype(int), n - 1)
        f = s - i
        return v[i] + f * (v[i + 1] - v[i])

    def tangent(self, t):
        t = np.asarray(t, dtype=float) % 1.0
        if self.kind == "circle":
            return 2j * np.pi * self.radius * np.exp(2j * np.pi * t)
        v = np.array(self.vertices + self.vertices[:1])
        n = len(self.vertices)
        i = np.minimum(np.floor(t * n).astype(int), n - 1)
        return n * (v[i + 1] - v[i])

    def diameter(self) -> float:
        if self.kind == "circle":
            return 2 * self.radius
        v = np.array(self.vertices)
        return float(np.max(np.abs(v[:, None] - v[None, :])))

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.kind == "circle":
            return np.abs(z - self.center) < self.radius
        v = np.array(self.vertices)
        inside = np.zeros(z.shape, dtype=bool)
        x, y = z.real, z.imag
        for a, b in zip(v, np.roll(v, -1)):
            cond = (a.imag > y) != (b.imag > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xc = a.real + (y - a.imag) * (b.real - a.real) / (b.imag - a.imag)
            inside ^= cond & (x < xc)
        return inside


@dataclass
class IndexResult:
    index: int
    value: float
    residual: float
    n_evals: int


def _wrap(a):
    return (np.asarray(a) + np.pi) % (2 * np.pi) - np.pi


def track_phase(log_f, contour: Contour, n_init: int = 8, max_jump: float = np.pi / 4,
                min_dt: float = 1e-12, zero_tol: float = -700.0, max_log_jump: float = 1.0) -> IndexResult:
    """Winding number of f along the contour from the phase of log f, bisecting large jumps.

    ``log_f(w)`` returns a complex logarithm of f(w) (any branch of the imaginary part). Segments are
    also bisected when ln|f| jumps by more than max_log_jump, which guards against phase aliasing.
    """
    ts = []
    for a, b in zip(contour.breakpoints()[:-1], contour.breakpoints()[1:]):
        ts.extend(np.linspace(a, b, n_init, endpoint=False))
    ts.append(1.0)
    ts = list(ts)
    vals = [complex(log_f(contour.point(t))) for t in ts[:-1]]
    vals.append(vals[0])
    n_evals = len(vals) - 1
    total = 0.0
    # stack-based refinement from the start of the contour
    i = 0
    while i < len(ts) - 1:
        if vals[i].real < zero_tol or vals[i + 1].real < zero_tol or not np.isfinite(vals[i].real):
            raise ContourUnsafe(f"integrand vanishes near {contour.point(ts[i])}")
        d = float(_wrap((vals[i + 1] - vals[i]).imag))
        if abs(d) > max_jump or abs((vals[i + 1] - vals[i]).real) > max_log_jump:
            if ts[i + 1] - ts[i] < min_dt:
                raise ContourUnsafe(f"phase jump unresolved near {contour.point(ts[i])}")
            tm = 0.5 * (ts[i] + ts[i + 1])
            vm = complex(log_f(contour.point(tm)))
            n_evals += 1
            ts.insert(i + 1, tm)
            vals.insert(i + 1, vm)
            continue
        total += d
        i += 1
    w = total / (2 * np.pi)
    k = int(round(w))
    return IndexResult(index=k, value=w, residual=abs(w - k), n_evals=n_evals)


def scalar_index(f, contour: Contour, tol: float = 1e-3, **kw) -> int:
    """(1 / 2 pi i) closed integral of f'/f by adaptive phase tracking."""
    res = scalar_index_result(f, contour, **kw)
    if res.residual > tol:
        raise ContourUnsafe(f"winding {res.value} not within {tol} of an integer")
    return res.index


def scalar_index_result(f, contour: Contour, **kw) -> IndexResult:
    def log_f(w):
        v = complex(f(w))
        if v == 0:
            return complex(-np.inf)
        return np.log(v)

    return track_phase(log_f, contour, **kw)


def _gauss_legendre(n: int = 10):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def operator_index_result(A_of_z, contour: Contour, rel_step: float = 1e-5, tol: float = 1e-8,
                          max_depth: int = 12, cond_max: float = 1e12) -> IndexResult:
    """(1 / 2 pi i) Tr closed integral of A'(z) A(z)^{-1} dz with adaptive Gauss-Legendre panels.

    A' comes from a Richardson-extrapolated central difference with step rel_step * diameter.
    """
    h = rel_step * contour.diameter()
    xg, wg = _gauss_legendre(10)
    n_evals = [0]

    def integrand(t):
        z = complex(contour.point(t))
        A = np.asarray(A_of_z(z), dtype=complex)
        if np.linalg.cond(A) > cond_max:
            raise ContourUnsafe(f"A(z) singular on the contour near {z}")

        def diff(step):
            return (np.asarray(A_of_z(z + step)) - np.asarray(A_of_z(z - step))) / (2 * step)

        dA = (4 * diff(h / 2) - diff(h)) / 3
        n_evals[0] += 5
        return np.trace(np.linalg.solve(A, dA)) * complex(contour.tangent(t))

    def panel(a, b):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        return half * sum(wi * integrand(mid + half * xi) for xi, wi in zip(xg, wg))

    def adapt(a, b, whole, depth):
        m = 0.5 * (a + b)
        left, right = panel(a, m), panel(m, b)
        if abs(left + right - whole) < tol or depth >= max_depth:
            return left + right
        return adapt(a, m, left, depth + 1) + adapt(m, b, right, depth + 1)

    total = 0j
    bp = contour.breakpoints()
    for a, b in zip(bp[:-1], bp[1:]):
        total += adapt(a, b, panel(a, b), 0)
    val = total / (2j * np.pi)
    k = int(round(val.real))
    return IndexResult(index=k, value=val.real, residual=float(abs(val - k)), n_evals=n_evals[0])


def operator_index(A_of_z, contour: Contour, tol: float = 1e-3, **kw) -> int:
    res = operator_index_result(A_of_z, contour, **kw)
    if res.residual > tol:
        raise ContourUnsafe(f"operator index {res.value} not within {tol} of an integer")
    return res.index


# --- Jensen bound ---------------------------------------------------------------------


def jensen_constant(R: float, r: float) -> float:
    """C' = 1 / ln(R / r): zeros in the disc of radius r each contribute at least ln(R / r)."""
    if not R > r > 0:
        raise ValueError("need R > r > 0")
    return 1.0 / np.log(R / r)


def jensen_count_bound(g, center: complex, R: float, r: float, C_prime: float | None = None,
                       n_nodes: int = 512, floor: float = 1e-300) -> float:
    """C' (mean of ln|g| over |w - center| = R  -  ln|g(center)|) bounds the zeros in |w - center| < r."""
    g0 = abs(complex(g(center)))
    if g0 < floor:
        raise ValueError("g vanishes at the interior point")
    th = 2 * np.pi * np.arange(n_nodes) / n_nodes
    vals = np.abs(np.array([complex(g(center + R * np.exp(1j * t))) for t in th]))
    if np.any(vals < floor):
        raise ContourUnsafe("g vanishes on the boundary circle")
    mean = float(np.mean(np.log(vals)))
    C = jensen_constant(R, r) if C_prime is None else C_prime
    return C * (mean - np.log(g0))


def calibrate_jensen_constant(R: float, r: float, n_trials: int = 200, max_degree: int = 6, seed: int = 0) -> float:
    """Smallest C' making the bound hold on random polynomials with zeros in |w| < R."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_trials):
        deg = int(rng.integers(1, max_degree + 1))
        rad = R * np.sqrt(rng.uniform(0.0, 0.95, deg))
        roots = rad * np.exp(2j * np.pi * rng.uniform(size=deg))
        lam0 = 0.05 * r * np.exp(2j * np.pi * rng.uniform())
        inner = int(np.sum(np.abs(roots - lam0) < r))
        if inner == 0 or np.min(np.abs(roots - lam0)) < 1e-6:
            continue

        def g(w, roots=roots):
            return np.prod(w - roots)

        base = jensen_count_bound(g, lam0, R, r, C_prime=1.0)
        worst = max(worst, inner / base)
    return worst
