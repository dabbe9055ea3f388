"""Discretized free Dirac operator, potential matrix, threshold projectors and direct spectra.

Basis ordering is (channel, mu, j): channel = (spinor component s, Landau level n), mu the
guiding-centre label, j the axial node. Spin-up components s = 0, 2 keep levels n < n_levels,
spin-down components s = 1, 3 keep levels n < n_levels - 1, so that every ladder coupling is
retained and D^2 is exactly diagonal in the channels.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg
from scipy.optimize import minimize_scalar

from .axial import AxialGrid
from .core import ModelParams, PotentialSpec, dirac_matrices
from .landau import LandauBasis

SPIN_UP = (0, 2)


class RepresentationError(RuntimeError):
    """The threshold projector does not reduce the discretized free operator."""


@dataclass(frozen=True)
class TruncationScheme:
    n_levels: int
    M: int
    grid: AxialGrid
    cap: int = 20000
    n_theta: int | None = None

    def __post_init__(self):
        if self.n_levels < 1 or self.M < 1:
            raise ValueError("need n_levels >= 1 and M >= 1")
        if self.dim > self.cap:
            raise ValueError(f"total dimension {self.dim} exceeds the cap {self.cap}")

    @cached_property
    def channels(self) -> tuple[tuple[int, int], ...]:
        out = []
        for s in range(4):
            top = self.n_levels if s in SPIN_UP else self.n_levels - 1
            out.extend((s, n) for n in range(top))
        return tuple(out)

    @property
    def n_channels(self) -> int:
        return 4 * self.n_levels - 2

    @property
    def dim(self) -> int:
        return self.n_channels * self.M * self.grid.N

    def channel_index(self, s: int, n: int) -> int:
        return self.channels.index((s, n))

    def landau_basis(self, b0: float) -> LandauBasis:
        return _basis_cache(b0, self.M, self.n_levels, self.n_theta)

    def level_shifts(self, b0: float) -> np.ndarray:
        """Transverse eigenvalue Lambda_c of (sigma.pi_perp)^2 on each channel."""
        return np.array([2 * b0 * (n if s in SPIN_UP else n + 1) for s, n in self.channels], dtype=float)

    def labels(self):
        """Yield (s, n, mu, j) for every basis index in order."""
        for s, n in self.channels:
            for mu in range(self.M):
                for j in range(self.grid.N):
                    yield (s, n, mu, j)


_BASES: dict = {}


def _basis_cache(b0, M, n_levels, n_theta) -> LandauBasis:
    key = (float(b0), int(M), int(n_levels), n_theta)
    if key not in _BASES:
        _BASES[key] = LandauBasis(b0=b0, M=M, n_levels=n_levels, n_theta=n_theta)
    return _BASES[key]


@dataclass(frozen=True)
class OperatorMatrix:
    matrix: np.ndarray
    trunc: TruncationScheme
    role: str

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


# --- channel structure -----------------------------------------------------------


def free_channel_entries(params: ModelParams, trunc: TruncationScheme) -> list[tuple[int, int, str, float]]:
    """Entries (row channel, column channel, kind, coefficient) of D_m(b0, 0).

    kind is "const" (multiple of the axial identity) or "p3" (multiple of -i d/dx3).
    """
    idx = {ch: i for i, ch in enumerate(trunc.channels)}
    m, b = params.mass, params.b0
    out = []
    for (s, n), i in idx.items():
        out.append((i, i, "const", m if s in (0, 1) else -m))
    for n in range(trunc.n_levels):
        out.append((idx[(0, n)], idx[(2, n)], "p3", 1.0))
        out.append((idx[(2, n)], idx[(0, n)], "p3", 1.0))
        if n < trunc.n_levels - 1:
            out.append((idx[(1, n)], idx[(3, n)], "p3", -1.0))
            out.append((idx[(3, n)], idx[(1, n)], "p3", -1.0))
        if n >= 1:
            c = np.sqrt(2 * b * n)
            # Pi_- raises (3, n-1) -> (0, n) and (1, n-1) -> (2, n); Pi_+ lowers back
            for hi, lo in (((0, n), (3, n - 1)), ((2, n), (1, n - 1))):
                out.append((idx[hi], idx[lo], "const", c))
                out.append((idx[lo], idx[hi], "const", c))
    return out


def channel_operator(params: ModelParams, trunc: TruncationScheme, p3: np.ndarray, shift: complex = 0.0) -> np.ndarray:
    """(C N) x (C N) matrix of D_m(b0, 0) + shift on one guiding-centre sector."""
    C, N = trunc.n_channels, p3.shape[0]
    D = np.zeros((C, N, C, N), dtype=complex)
    eye = np.eye(N)
    for i, j, kind, coef in free_channel_entries(params, trunc):
        D[i, :, j, :] += coef * (eye if kind == "const" else p3)
    for i in range(C):
        D[i, :, i, :] += shift * eye
    return D.reshape(C * N, C * N)


def channel_symbol(params: ModelParams, trunc: TruncationScheme, xi: np.ndarray, shift: complex = 0.0) -> np.ndarray:
    """C x C symbols of D_m(b0, 0) + shift at axial frequencies xi, shape (len(xi), C, C)."""
    xi = np.asarray(xi, dtype=float)
    C = trunc.n_channels
    S = np.zeros((xi.size, C, C), dtype=complex)
    for i, j, kind, coef in free_channel_entries(params, trunc):
        S[:, i, j] += coef * (1.0 if kind == "const" else xi)
    S[:, np.arange(C), np.arange(C)] += shift
    return S


def expand_sectors(block: np.ndarray, trunc: TruncationScheme) -> np.ndarray:
    """Lift a (C N) x (C N) channel matrix to the full basis (identity in mu)."""
    C, M = trunc.n_channels, trunc.M
    N = block.shape[0] // C
    B4 = block.reshape(C, N, C, N)
    full = np.einsum("cjdk,mn->cmjdnk", B4, np.eye(M))
    return full.reshape(C * M * N, C * M * N)


def assemble_free(params: ModelParams, trunc: TruncationScheme) -> OperatorMatrix:
    """Matrix of alpha.(-i grad - A) + m beta with Fourier-spectral p3 on the periodic axial grid."""
    block = channel_operator(params, trunc, trunc.grid.p3_matrix())
    return OperatorMatrix(expand_sectors(block, trunc), trunc, "free")


def spinor_embedding(trunc: TruncationScheme) -> np.ndarray:
    """4 x C matrix E with E[s, c] = 1 when channel c carries spinor component s."""
    E = np.zeros((4, trunc.n_channels))
    for c, (s, _) in enumerate(trunc.channels):
        E[s, c] = 1.0
    return E


def transverse_galerkin(spec: PotentialSpec, trunc: TruncationScheme, b0: float, spinor: np.ndarray | None = None) -> np.ndarray:
    """(C M) x (C M) matrix S[s, s'] <psi_{n mu}, w_perp psi_{n' mu'}> on the retained channels."""
    basis = trunc.landau_basis(b0)
    Wt = basis.galerkin(spec.w_perp)
    S = np.asarray(spec.spinor_factor if spinor is None else spinor, dtype=complex)
    M = trunc.M
    rows = []
    for s, n in trunc.channels:
        cols = []
        for s2, n2 in trunc.channels:
            cols.append(S[s, s2] * Wt[n * M:(n + 1) * M, n2 * M:(n2 + 1) * M])
        rows.append(cols)
    G = np.block(rows)
    return 0.5 * (G + G.conj().T)


def assemble_potential(spec: PotentialSpec, trunc: TruncationScheme, params: ModelParams) -> OperatorMatrix:
    """Matrix of eps phi W(x) in the product basis (Galerkin in x_perp, nodal in x3)."""
    G = transverse_galerkin(spec, trunc, params.b0)
    g = np.asarray(spec.g_axial(trunc.grid.nodes), dtype=float)
    V = spec.epsilon * spec.phi * np.kron(G, np.diag(g))
    return OperatorMatrix(V, trunc, "potential")


def projectors(trunc: TruncationScheme, free: OperatorMatrix | None = None, tol: float = 1e-8) -> tuple[OperatorMatrix, OperatorMatrix]:
    """P = identity on the LLL channels of the spin-up components, Q = I - P.

    When ``free`` is given, the commutator [P, D] is checked.
    """
    mask = np.zeros(trunc.n_channels)
    mask[trunc.channel_index(0, 0)] = 1.0
    mask[trunc.channel_index(2, 0)] = 1.0
    diag = np.repeat(mask, trunc.M * trunc.grid.N)
    P = np.diag(diag).astype(complex)
    Q = np.eye(trunc.dim) - P
    if free is not None:
        D = np.asarray(free)
        comm = float(np.max(np.abs(P @ D - D @ P)))
        if comm > tol:
            raise RepresentationError(
                f"threshold projector does not commute with the free operator (defect {comm:.2e}); "
                "the Dirac representation does not give the expected block form"
            )
    return OperatorMatrix(P, trunc, "projector"), OperatorMatrix(Q, trunc, "projector")


def representation_check(params: ModelParams, trunc: TruncationScheme) -> float:
    """Max deviation between the channel operator and alpha.pi + m beta built from the Dirac matrices.

    Ladder operators act on the level index; Pi_+ = sqrt(2b) a, Pi_- = sqrt(2b) a^dagger.
    """
    alg = dirac_matrices()
    nl = trunc.n_levels
    # level space 0 .. nl-1 (spin-down of the top level dropped below)
    a = np.diag(np.sqrt(np.arange(1, nl)), 1)
    pi_plus = np.sqrt(2 * params.b0) * a
    pi_minus = pi_plus.T
    pi1, pi2 = 0.5 * (pi_plus + pi_minus), (pi_plus - pi_minus) / 2j
    p3 = np.array([[0.7]])  # any axial symbol
    eye_l = np.eye(nl)
    full = (np.kron(alg.alpha1, np.kron(pi1, p3 ** 0)) + np.kron(alg.alpha2, np.kron(pi2, p3 ** 0))
            + np.kron(alg.alpha3, np.kron(eye_l, p3)) + params.mass * np.kron(alg.beta, np.kron(eye_l, p3 ** 0)))
    keep = [s * nl + n for s, n in trunc.channels]
    ref = full[np.ix_(keep, keep)]
    ours = channel_operator(params, TruncationScheme(nl, 1, AxialGrid(1.0, 2)), np.array([[0.7, 0], [0, 0.7]]))
    ours = ours.reshape(trunc.n_channels, 2, trunc.n_channels, 2)[:, 0, :, 0]
    return float(np.max(np.abs(ref - ours)))


# --- spectra ---------------------------------------------------------------------


def cluster_eigenvalues(vals: np.ndarray, tol: float) -> list[tuple[complex, int]]:
    """Group eigenvalues closer than tol; return (mean, multiplicity) pairs."""
    vals = list(np.asarray(vals, dtype=complex))
    out = []
    used = np.zeros(len(vals), dtype=bool)
    arr = np.array(vals)
    for i in range(len(vals)):
        if used[i]:
            continue
        members = [i]
        used[i] = True
        frontier = [i]
        while frontier:
            j = frontier.pop()
            near = np.where((~used) & (np.abs(arr - arr[j]) < tol))[0]
            used[near] = True
            members.extend(near.tolist())
            frontier.extend(near.tolist())
        out.append((complex(np.mean(arr[members])), len(members)))
    return out


def direct_spectrum(matrix, center: complex, radius: float, cluster_tol: float = 1e-8, nonreal_tol: float = 0.0):
    """Eigenvalues of a dense matrix inside the disc |z - center| < radius, with multiplicities.

    Eigenvalues with |Im z| <= nonreal_tol are dropped when nonreal_tol > 0.
    """
    A = np.asarray(matrix)
    try:
        vals = linalg.eigvals(A, check_finite=True)
    except linalg.LinAlgError as exc:  # pragma: no cover
        raise RuntimeError(f"dense eigensolve failed: {exc}") from exc
    inside = vals[np.abs(vals - center) < radius]
    if nonreal_tol > 0:
        inside = inside[np.abs(inside.imag) > nonreal_tol]
    return cluster_eigenvalues(inside, cluster_tol)


def numerical_range_distance(matrix, z: complex, n_theta: int = 360) -> float:
    """Lower bound for dist(z, numerical range) from supporting half-planes.

    For each angle t the numerical range lies in Re(e^{it}(w - z)) <= lambda_max(Hermitian part of
    e^{it}(A - z)); a negative maximum separates z by its absolute value.
    """
    A = np.asarray(matrix, dtype=complex)
    Az = A - z * np.eye(A.shape[0])

    def support(t):
        B = np.exp(1j * t) * Az
        return float(linalg.eigvalsh(0.5 * (B + B.conj().T), subset_by_index=[A.shape[0] - 1, A.shape[0] - 1])[0])

    thetas = 2 * np.pi * np.arange(n_theta) / n_theta
    vals = np.array([support(t) for t in thetas])
    i = int(np.argmin(vals))
    step = 2 * np.pi / n_theta
    res = minimize_scalar(support, bounds=(thetas[i] - step, thetas[i] + step), method="bounded",
                          options={"xatol": 1e-12})
    best = min(vals[i], res.fun)
    return max(0.0, -best)
