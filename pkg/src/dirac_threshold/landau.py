"""Landau levels of a constant field in the symmetric gauge, Toeplitz compressions and gap radii.

States are psi_{n,mu} = (a^dagger)^n psi_{0,mu} / sqrt(n!) with psi_{0,mu} = c_mu z^mu e^{-b|z|^2/4},
z = x1 + i x2. Each is stored as a polynomial in (z, conj z) times the Gaussian factor.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import lgamma, log, pi, sqrt

import numpy as np
from scipy.integrate import quad

from .core import PotentialSpec


def _lll_coefficient(mu: int, b0: float) -> float:
    # 1 / sqrt(pi mu! (2/b)^(mu+1))
    return float(np.exp(-0.5 * (log(pi) + lgamma(mu + 1) + (mu + 1) * log(2.0 / b0))))


def _raise(poly: dict, b0: float, n: int) -> dict:
    """Apply a^dagger / sqrt(n + 1) to F, where a^dagger F = (-2i / sqrt(2b)) (d_z F - (b/2) conj(z) F)."""
    pref = -2j / sqrt(2 * b0) / sqrt(n + 1)
    out: dict = {}
    for (p, q), c in poly.items():
        if p > 0:
            out[(p - 1, q)] = out.get((p - 1, q), 0) + pref * p * c
        out[(p, q + 1)] = out.get((p, q + 1), 0) - pref * 0.5 * b0 * c
    return out


def landau_polynomials(b0: float, M: int, n_levels: int) -> list[list[dict]]:
    """polys[n][mu] maps (p, q) to the coefficient of z^p conj(z)^q in psi_{n,mu}."""
    polys = []
    level = [{(mu, 0): complex(_lll_coefficient(mu, b0))} for mu in range(M)]
    for n in range(n_levels):
        polys.append(level)
        level = [_raise(P, b0, n) for P in level]
    return polys


@dataclass(frozen=True)
class TransverseQuadrature:
    """Composite Gauss-Legendre in r on [0, R] times the trapezoid rule in the angle."""

    r: np.ndarray
    theta: np.ndarray
    weights: np.ndarray  # includes the Jacobian r, flattened in (r, theta) order

    @property
    def x1(self) -> np.ndarray:
        return (self.r[:, None] * np.cos(self.theta)[None, :]).ravel()

    @property
    def x2(self) -> np.ndarray:
        return (self.r[:, None] * np.sin(self.theta)[None, :]).ravel()


def make_quadrature(b0: float, top_degree: int, n_theta: int, panels: int = 48, order: int = 16) -> TransverseQuadrature:
    # |psi|^2 ~ t^deg e^{-t}, t = b r^2 / 2; go well past the peak
    t_max = top_degree + 45.0 + 12.0 * sqrt(top_degree + 1.0)
    R = sqrt(2.0 * t_max / b0)
    xg, wg = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, R, panels + 1)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
    r = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    wr = (half[:, None] * wg[None, :]).ravel()
    theta = 2 * pi * np.arange(n_theta) / n_theta
    w = (r * wr)[:, None] * np.full(n_theta, 2 * pi / n_theta)[None, :]
    return TransverseQuadrature(r=r, theta=theta, weights=w.ravel())


@dataclass(frozen=True)
class LandauBasis:
    """Levels n < n_levels, guiding-centre labels mu < M, on a transverse quadrature."""

    b0: float
    M: int
    n_levels: int = 1
    n_theta: int | None = None
    gram_tol: float = 1e-10
    quadrature: TransverseQuadrature = field(init=False, repr=False)
    values: np.ndarray = field(init=False, repr=False)  # (n_levels * M, n_nodes)

    def __post_init__(self):
        if not self.b0 > 0 or self.M < 1 or self.n_levels < 1:
            raise ValueError("need b0 > 0, M >= 1, n_levels >= 1")
        top = self.M - 1 + 2 * (self.n_levels - 1)
        n_theta = self.n_theta or 2 * (self.M + self.n_levels) + 32
        quadr = make_quadrature(self.b0, top, n_theta)
        object.__setattr__(self, "quadrature", quadr)
        polys = landau_polynomials(self.b0, self.M, self.n_levels)
        vals = np.array([self._evaluate(P, quadr) for level in polys for P in level])
        object.__setattr__(self, "values", vals)
        err = float(np.max(np.abs(self.gram() - np.eye(len(vals)))))
        if not err <= self.gram_tol:
            raise ValueError(
                f"transverse quadrature cannot resolve {self.M} states x {self.n_levels} levels "
                f"(Gram defect {err:.2e} > {self.gram_tol:.0e}); reduce M or raise n_theta"
            )

    def _evaluate(self, poly: dict, q: TransverseQuadrature) -> np.ndarray:
        r, th = q.r, q.theta
        logr = np.log(np.where(r > 0, r, 1e-300))
        out = np.zeros((r.size, th.size), dtype=complex)
        for (p, qq), c in poly.items():
            radial = np.exp((p + qq) * logr - 0.25 * self.b0 * r * r)
            if p + qq == 0:
                radial = np.exp(-0.25 * self.b0 * r * r)
            out += c * radial[:, None] * np.exp(1j * (p - qq) * th)[None, :]
        return out.ravel()

    @property
    def size(self) -> int:
        return self.n_levels * self.M

    def index(self, n: int, mu: int) -> int:
        return n * self.M + mu

    def gram(self) -> np.ndarray:
        w = self.quadrature.weights
        return (self.values.conj() * w) @ self.values.T

    def galerkin(self, profile) -> np.ndarray:
        """Matrix <psi_a, f psi_b> over all retained states; ``profile`` is f(x1, x2)."""
        q = self.quadrature
        f = np.asarray(profile(q.x1, q.x2))
        G = (self.values.conj() * (q.weights * f)) @ self.values.T
        return 0.5 * (G + G.conj().T)

    def lll(self) -> "LandauBasis":
        return self if self.n_levels == 1 else lll_basis(self.b0, self.M)

    def kernel_diagonal(self, x1: float, x2: float) -> float:
        """Sum over retained LLL states of |psi_mu(x)|^2."""
        z = complex(x1, x2)
        total = 0.0
        for mu in range(self.M):
            total += _lll_coefficient(mu, self.b0) ** 2 * abs(z) ** (2 * mu) * np.exp(-0.5 * self.b0 * abs(z) ** 2)
        return total


# the lowest-level basis is the n_levels = 1 case
LLLBasis = LandauBasis


def lll_basis(b0: float, M: int, n_theta: int | None = None) -> LandauBasis:
    """Normalized lowest-Landau-level states mu = 0 .. M-1 with their quadrature."""
    return LandauBasis(b0=b0, M=M, n_levels=1, n_theta=n_theta)


def toeplitz_matrix(profile, basis: LandauBasis) -> np.ndarray:
    """Compression p f p on the retained LLL states."""
    return basis.lll().galerkin(profile)


# --- projected profiles V_{+-m}, W_{+-m} ----------------------------------------


def abs_matrix(A: np.ndarray) -> np.ndarray:
    """|A| = sqrt(A* A) for a stack of square matrices."""
    H = np.swapaxes(A.conj(), -1, -2) @ A
    ev, U = np.linalg.eigh(H)
    ev = np.sqrt(np.clip(ev, 0.0, None))
    return (U * ev[..., None, :]) @ np.swapaxes(U.conj(), -1, -2)


def vm_profile(spec: PotentialSpec, sign_m: int = 1, use_abs_w: bool = False):
    """Transverse function x -> (1/2) int |V|_{11} dx3 (sign +1) or |V|_{33} (sign -1).

    With ``use_abs_w`` the matrix |W| replaces |V| (W = V / (eps phi)).
    """
    entry = 0 if sign_m > 0 else 2
    S = np.asarray(spec.spinor_factor, dtype=complex)
    scale = 1.0 if use_abs_w else spec.epsilon * spec.abs_phi
    if scale == 0:
        return lambda x1, x2: np.zeros(np.shape(np.asarray(x1) + np.asarray(x2)))
    # |V(x)| = eps |phi| w(x_perp) g(x3) |S| for scalar profiles; the spinor entry is taken from |S|
    s_entry = float(abs_matrix(S[None])[0][entry, entry].real)
    g = spec.g_axial
    val, err = quad(lambda t: float(g(t)), -np.inf, np.inf, epsabs=1e-14, epsrel=1e-13, limit=400)
    if not np.isfinite(val) or err > 1e-8 * max(abs(val), 1.0):
        raise ValueError("axial integral of the potential profile did not converge")
    factor = 0.5 * scale * s_entry * val

    def profile(x1, x2):
        return factor * np.asarray(spec.w_perp(x1, x2), dtype=float)

    profile.axial_integral = val
    profile.factor = factor
    return profile


# --- gap radii -------------------------------------------------------------------


@dataclass(frozen=True)
class ToeplitzSpectrum:
    mu: np.ndarray
    radii: np.ndarray
    nu_gap: float

    def trace_above(self, r: float) -> int:
        """Tr 1_(r, inf)(T)."""
        return int(np.sum(self.mu > r))

    def band_count(self, lo: float, hi: float) -> int:
        """Tr 1_(lo, hi)(T)."""
        return int(np.sum((self.mu > lo) & (self.mu < hi)))


def gap_radii(mu, nu_gap: float, count: int | None = None) -> ToeplitzSpectrum:
    """Radii r_l placed at geometric means of consecutive eigenvalues separated by a relative gap.

    A gap (mu_j, mu_{j+1}) qualifies when mu_j - mu_{j+1} > nu_gap mu_j; the radius r = sqrt(mu_j mu_{j+1})
    is kept only when dist(r, spectrum) >= nu_gap r / 2.
    """
    if not 0 < nu_gap < 1:
        raise ValueError("nu_gap must lie in (0, 1)")
    mu = np.sort(np.asarray(mu, dtype=float))[::-1]
    pos = mu[mu > 0]
    distinct = np.unique(pos)
    radii: list[float] = []
    if distinct.size < 2:
        warnings.warn("fewer than two distinct positive eigenvalues: no gap radii", stacklevel=2)
        return ToeplitzSpectrum(mu=mu, radii=np.array([]), nu_gap=nu_gap)
    d = distinct[::-1]
    for hi, lo in zip(d[:-1], d[1:]):
        if hi - lo > nu_gap * hi:
            r = sqrt(hi * lo)
            if np.min(np.abs(mu - r)) >= 0.5 * nu_gap * r:
                radii.append(r)
        if count is not None and len(radii) >= count:
            break
    return ToeplitzSpectrum(mu=mu, radii=np.array(radii), nu_gap=nu_gap)


def gaussian_toeplitz_eigenvalues(b0: float, c: float, M: int) -> np.ndarray:
    """(b0 / (b0 + 2c))^(mu + 1), mu = 0 .. M-1: LLL compression of exp(-c |x|^2)."""
    kappa = b0 / (b0 + 2 * c)
    return kappa ** (np.arange(M) + 1.0)
