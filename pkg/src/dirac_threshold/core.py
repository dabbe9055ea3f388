"""Dirac algebra, model parameters, potential specification and k-plane domains."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np


class AssumptionError(ValueError):
    """Raised when a potential or parameter set violates a model assumption."""


PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class DiracAlgebra:
    alpha1: np.ndarray
    alpha2: np.ndarray
    alpha3: np.ndarray
    beta: np.ndarray

    @property
    def alphas(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.alpha1, self.alpha2, self.alpha3)


def dirac_matrices() -> DiracAlgebra:
    """Standard (Pauli-Dirac) representation with beta = diag(1, 1, -1, -1)."""
    zero = np.zeros((2, 2), dtype=complex)
    eye = np.eye(2, dtype=complex)
    alphas = [np.block([[zero, s], [s, zero]]) for s in PAULI]
    beta = np.block([[eye, zero], [zero, -eye]])
    return DiracAlgebra(alphas[0], alphas[1], alphas[2], beta)


def anticommutator_defects(alg: DiracAlgebra) -> float:
    """Largest entry of all defects in the Clifford relations (0 for an exact representation)."""
    mats = list(alg.alphas) + [alg.beta]
    eye = np.eye(4)
    worst = 0.0
    for i, a in enumerate(mats):
        for j, b in enumerate(mats):
            target = 2 * eye if i == j else 0 * eye
            worst = max(worst, float(np.max(np.abs(a @ b + b @ a - target))))
    return worst


@dataclass(frozen=True)
class ModelParams:
    mass: float = 1.0
    b0: float = 2.0

    def __post_init__(self):
        if not self.mass > 0:
            raise AssumptionError("mass must be positive")
        if not self.b0 > 0:
            raise AssumptionError("field strength b0 must be positive")

    @property
    def zeta(self) -> float:
        # Constant field: first nonzero transverse level.
        return 2.0 * self.b0


# --- profiles ---------------------------------------------------------------


@dataclass(frozen=True)
class TransverseProfile:
    """Radial transverse profile: ``gaussian`` exp(-c r^2) or ``bump`` supported in r < c."""

    kind: str = "gaussian"
    c: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "bump"):
            raise AssumptionError(f"unknown transverse profile kind {self.kind!r}")
        if not self.c > 0:
            raise AssumptionError("transverse profile parameter c must be positive")

    def __call__(self, x1, x2):
        r2 = np.asarray(x1) ** 2 + np.asarray(x2) ** 2
        if self.kind == "gaussian":
            return np.exp(-self.c * r2)
        t = r2 / self.c**2
        out = np.zeros(np.shape(t))
        inside = t < 1
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside]))
        return out

    def max_value(self) -> float:
        return 1.0


@dataclass(frozen=True)
class AxialProfile:
    """Axial profile: ``gaussian`` exp(-x^2 / scale^2) or ``polynomial`` <x/scale>^(-beta)."""

    kind: str = "gaussian"
    beta: float | None = None
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "polynomial"):
            raise AssumptionError(f"unknown axial profile kind {self.kind!r}")
        if self.kind == "polynomial" and self.beta is None:
            raise AssumptionError("polynomial axial profile needs a decay exponent beta")
        if not self.scale > 0:
            raise AssumptionError("axial scale must be positive")

    def __call__(self, x3):
        y = np.asarray(x3, dtype=float) / self.scale
        if self.kind == "gaussian":
            return np.exp(-y * y)
        return (1.0 + y * y) ** (-self.beta / 2.0)

    def max_value(self) -> float:
        return 1.0

    def halfwidth_for(self, tol: float = 1e-12) -> float:
        """Half-width beyond which the profile (Gaussian) or its tail mass (polynomial) is below tol."""
        if self.kind == "gaussian":
            return self.scale * float(np.sqrt(-np.log(tol)))
        # tail mass 2 * int_L^inf x^-beta dx = 2 L^(1-beta) / (beta - 1)
        b = float(self.beta)
        return self.scale * float((tol * (b - 1) / 2.0) ** (1.0 / (1.0 - b)))


@dataclass(frozen=True)
class PotentialSpec:
    """V = epsilon * phi * w_perp(x1, x2) * g_axial(x3) * spinor_factor."""

    phi: complex = 1j
    epsilon: float = 0.1
    w_perp: Callable = field(default_factory=TransverseProfile)
    g_axial: Callable = field(default_factory=AxialProfile)
    spinor_factor: np.ndarray = field(default_factory=lambda: np.eye(4, dtype=complex))
    J: int = 1

    @property
    def arg_phi(self) -> float:
        return float(np.angle(self.phi))

    @property
    def abs_phi(self) -> float:
        return float(abs(self.phi))

    def with_coupling(self, epsilon: float) -> "PotentialSpec":
        return replace(self, epsilon=float(epsilon))

    def sup_norm(self) -> float:
        """Upper bound eps |phi| max|W| for the operator norm of V."""
        wmax = getattr(self.w_perp, "max_value", lambda: 1.0)()
        gmax = getattr(self.g_axial, "max_value", lambda: 1.0)()
        smax = float(np.max(np.abs(np.linalg.eigvalsh(self.spinor_factor))))
        return self.epsilon * self.abs_phi * wmax * gmax * smax

    def values(self, x1, x2, x3) -> np.ndarray:
        """Pointwise 4x4 matrices V(x) with shape (..., 4, 4)."""
        scal = self.epsilon * self.phi * np.asarray(self.w_perp(x1, x2)) * np.asarray(self.g_axial(x3))
        return scal[..., None, None] * self.spinor_factor


def validate_potential(spec: PotentialSpec, n_samples: int = 64) -> PotentialSpec:
    """Check the admissibility assumptions and return the spec with its sign J normalized."""
    if spec.phi == 0:
        raise AssumptionError("phi must be nonzero")
    if spec.epsilon < 0:
        raise AssumptionError("coupling epsilon must be non-negative")
    S = np.asarray(spec.spinor_factor, dtype=complex)
    if S.shape != (4, 4):
        raise AssumptionError("spinor factor must be a 4x4 matrix")
    if np.max(np.abs(S - S.conj().T)) > 1e-12:
        raise AssumptionError("spinor factor is not Hermitian")
    ev = np.linalg.eigvalsh(S)
    tol = 1e-12 * max(1.0, float(np.max(np.abs(ev))))
    if np.all(ev >= -tol):
        J = 1
    elif np.all(ev <= tol):
        J = -1
    else:
        raise AssumptionError("spinor factor is indefinite")
    g = spec.g_axial
    if getattr(g, "kind", None) == "polynomial" and not g.beta > 3:
        raise AssumptionError(f"axial decay exponent beta = {g.beta} must exceed 3")
    x = np.linspace(-10.0, 10.0, n_samples)
    if np.any(np.asarray(g(x)) <= 0):
        raise AssumptionError("axial profile must be positive")
    X1, X2 = np.meshgrid(x, x)
    if np.any(np.asarray(spec.w_perp(X1, X2)) < 0):
        raise AssumptionError("transverse profile must be non-negative")
    if J == spec.J and S is spec.spinor_factor:
        return spec
    return replace(spec, spinor_factor=S, J=J)


@dataclass(frozen=True)
class KDomainParams:
    eta: float = 0.5
    gamma: float = 0.5
    eps_k: float = 0.12
    delta: float = 0.2
    nu_gap: float = 0.3

    def check(self, mass: float) -> "KDomainParams":
        if not 0 < self.eta < mass:
            raise AssumptionError("eta must lie in (0, m)")
        if not 0 < self.gamma < 1:
            raise AssumptionError("gamma must lie in (0, 1)")
        bound = min(self.gamma, self.eta * (1 - self.gamma) / (2 * mass))
        if not 0 < self.eps_k < bound:
            raise AssumptionError(f"eps_k must lie in (0, {bound:.6g})")
        if not self.delta > 0:
            raise AssumptionError("delta must be positive")
        if not 0 < self.nu_gap < 1:
            raise AssumptionError("nu_gap must lie in (0, 1)")
        return self


# --- threshold parametrization --------------------------------------------


def z_of_k(k, sign_m: int = 1, mass: float = 1.0):
    """z = sign_m * m (1 + k^2) / (1 - k^2)."""
    k = np.asarray(k, dtype=complex)
    if np.any(np.abs(k * k - 1.0) == 0):
        raise ValueError("k = +-1 is a pole of the parametrization")
    out = sign_m * mass * (1 + k * k) / (1 - k * k)
    return out[()] if out.ndim == 0 else out


def half_plane_of(k) -> int:
    """+1 for Im k > 0, -1 for Im k < 0."""
    im = float(np.imag(k))
    if im == 0:
        raise ValueError("k on the real axis belongs to neither half-disc")
    return 1 if im > 0 else -1


def threshold_root(k, sign_m: int = 1, mass: float = 1.0, half_plane: int | None = None) -> complex:
    """The root s of s^2 = z^2 - m^2 with Im s > 0, written through k.

    Near +m it is +-k (z + m) on the upper/lower half-disc, near -m it is -+k (z - m).
    """
    k = complex(k)
    if half_plane is None:
        half_plane = half_plane_of(k)
    z = z_of_k(k, sign_m, mass)
    if sign_m > 0:
        return half_plane * k * (z + mass)
    return -half_plane * k * (z - mass)
