"""One-dimensional axial kernels and the axial grid.

All matrices use the weighted nodal representation: a function u is stored as
sqrt(w_j) u(x_j), so an integral operator with kernel K(x, y) becomes the matrix
sqrt(w_i) K(x_i, x_j) sqrt(w_j) and the inner product is Euclidean.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import toeplitz
from scipy.special import exp1

from .core import threshold_root


@dataclass(frozen=True)
class AxialGrid:
    """Uniform midpoint grid x_j = -L + (j + 1/2) h on [-L, L], h = 2L / N."""

    L: float
    N: int

    def __post_init__(self):
        if not self.L > 0 or self.N < 2:
            raise ValueError("axial grid needs L > 0 and N >= 2")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @cached_property
    def nodes(self) -> np.ndarray:
        return -self.L + (np.arange(self.N) + 0.5) * self.h

    @cached_property
    def weights(self) -> np.ndarray:
        return np.full(self.N, self.h)

    @property
    def cutoff(self) -> float:
        """Largest resolved axial frequency pi / h."""
        return np.pi / self.h

    def frequencies(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.N, d=self.h)

    def p3_matrix(self) -> np.ndarray:
        """Fourier-spectral -i d/dx on the periodic grid (Hermitian)."""
        F = np.fft.fft(np.eye(self.N), axis=0)
        return np.fft.ifft(self.frequencies()[:, None] * F, axis=0)

    def padded(self, pad: int) -> tuple["AxialGrid", slice]:
        """Grid with the same spacing, extended by about ``pad`` nodes per side, with odd size.

        Returns the box grid and the slice selecting a translate of the original nodes; only
        translation-invariant operators are built on the box.
        """
        left = int(pad)
        right = int(pad) + (1 - (self.N + 2 * int(pad)) % 2)
        n_box = self.N + left + right
        box = AxialGrid(L=0.5 * n_box * self.h, N=n_box)
        return box, slice(left, left + self.N)

    def offsets(self) -> np.ndarray:
        return np.arange(self.N) * self.h


def branch_sqrt(z, cut: str = "positive"):
    """Square root with a prescribed cut.

    ``cut="positive"``: defined off [0, inf) with Im > 0 (argument taken in (0, 2 pi)).
    ``cut="negative"``: defined off (-inf, 0], principal root.
    """
    z = np.asarray(z, dtype=complex)
    if cut == "positive":
        if np.any((z.imag == 0) & (z.real >= 0)):
            raise ValueError("argument on the cut [0, +inf) of the resolvent square root")
        out = 1j * np.sqrt(-z)
    elif cut == "negative":
        if np.any((z.imag == 0) & (z.real <= 0)):
            raise ValueError("argument on the cut (-inf, 0] of the principal square root")
        out = np.sqrt(z)
    else:
        raise ValueError(f"unknown cut {cut!r}")
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class BranchSqrt:
    """branch_sqrt as a function object with its cut fixed."""

    cut: str = "positive"

    def __call__(self, z):
        return branch_sqrt(z, self.cut)


def resolvent_kernel(z, x, y):
    """Kernel of (-d^2/dx^2 - z)^-1 on the line: -exp(i sqrt(z) |x - y|) / (2 i sqrt(z))."""
    if np.imag(z) == 0 and np.real(z) >= 0:
        raise ValueError("z on [0, inf): use limiting_kernel for boundary values")
    s = branch_sqrt(z)
    d = np.abs(np.asarray(x) - np.asarray(y))
    return -np.exp(1j * s * d) / (2j * s)


def limiting_kernel(lam: float, x, y):
    """Boundary value from above on the positive axis: i exp(i sqrt(lam) |x - y|) / (2 sqrt(lam))."""
    if not lam > 0:
        raise ValueError("limiting kernel needs lambda > 0")
    s = np.sqrt(lam)
    d = np.abs(np.asarray(x) - np.asarray(y))
    return 1j * np.exp(1j * s * d) / (2 * s)


def rank_one_a(grid: AxialGrid, g_axial) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """a = (i/2) |G+><G+| with G+ = g^(1/2), and the factors c = <., G+>, c*.

    Returns (a, c, c_star) as N x N, 1 x N and N x 1 matrices, with -2i a = c* c.
    """
    v = np.sqrt(grid.weights * np.asarray(g_axial(grid.nodes), dtype=float))
    c = v[None, :].astype(complex)
    c_star = c.conj().T
    a = 0.5j * (c_star @ c)
    return a, c, c_star


# --- regular remainder s_{+-m}(k) --------------------------------------------


def s_function(w, d):
    """(1 - exp(i w d)) / (2 i w) for d >= 0, continued by -d/2 at w = 0."""
    w = complex(w)
    d = np.asarray(d, dtype=float)
    x = 1j * w * d
    small = np.abs(x) < 1e-4
    ratio = np.empty(d.shape, dtype=complex)
    xs = x[small]
    ratio[small] = 1 + xs / 2 + xs * xs / 6 + xs**3 / 24
    xl = x[~small]
    ratio[~small] = np.expm1(xl) / xl
    return -0.5 * d * ratio


def s_kernel(k, sign_m: int, grid: AxialGrid, mass: float = 1.0, half_plane: int | None = None) -> np.ndarray:
    """Weighted matrix of the regular remainder kernel (1 - e^{i s |x-y|}) / (2 i s).

    Here s = +-k(z + m) near +m and -+k(z - m) near -m, i.e. the root of z^2 - m^2 with
    Im s > 0 on the chosen half-disc. At k = 0 the limit -|x - y| / 2 is returned.
    """
    d = np.abs(grid.nodes[:, None] - grid.nodes[None, :])
    if k == 0:
        w = 0.0
    else:
        w = threshold_root(k, sign_m, mass, half_plane)
    return grid.h * s_function(w, d)


# --- band-limited whole-line kernels -----------------------------------------


def _tail_H(a: complex, dist: np.ndarray, K: float) -> np.ndarray:
    """(1/2pi) int_{|xi| > K} e^{i xi d} / (xi - a) dxi for d >= 0 (principal value at d = 0)."""
    out = np.empty(dist.shape, dtype=complex)
    zero = dist == 0
    out[zero] = np.log((K + a) / (K - a)) / (2 * np.pi)
    d = dist[~zero]
    out[~zero] = np.exp(1j * a * d) * (exp1(-1j * d * (K - a)) - exp1(1j * d * (K + a))) / (2 * np.pi)
    return out


def resolvent_root(lam) -> complex:
    """s with s^2 = lam and Im s > 0."""
    return complex(branch_sqrt(complex(lam)))


def line_kernels(lam, dist: np.ndarray, s: complex | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Whole-line kernels of (p^2 - lam)^-1 and p (p^2 - lam)^-1 at signed offsets ``dist``."""
    s = resolvent_root(lam) if s is None else s
    e = np.exp(1j * s * np.abs(dist))
    return 1j * e / (2 * s), 0.5j * np.sign(dist) * e


def bandlimited_tails(lam, dist: np.ndarray, K: float, s: complex | None = None):
    """High-frequency tails (|xi| > K) of the two kernels at offsets dist >= 0."""
    s = resolvent_root(lam) if s is None else s
    if abs(s.real) >= 0.5 * K:
        raise ValueError("resolvent root not resolved by the axial grid; refine h")
    hp = _tail_H(s, dist, K)
    hm = _tail_H(-s, dist, K)
    return (hp - hm) / (2 * s), 0.5 * (hp + hm)


def bandlimited_kernel_matrices(lam, grid: AxialGrid, s: complex | None = None):
    """Weighted matrices of (p^2 - lam)^-1 and p (p^2 - lam)^-1 for the band-limited line model.

    The axial space is the span of sinc functions on the grid lattice (frequencies |xi| < pi/h),
    extended to the whole line; entries are h times the band-limited kernels.
    """
    s = resolvent_root(lam) if s is None else s
    dist = grid.offsets()
    full_r, full_p = line_kernels(lam, dist, s)
    tail_r, tail_p = bandlimited_tails(lam, dist, grid.cutoff, s)
    r = grid.h * (full_r - tail_r)
    p = grid.h * (full_p - tail_p)
    # p kernel is odd: entry (i, j) depends on x_i - x_j
    return toeplitz(r, r), toeplitz(p, -p)


def regular_kernel_matrix(w: complex, lam, grid: AxialGrid, s: complex | None = None) -> np.ndarray:
    """Weighted matrix of the band-limited regular part: s-kernel minus the resolvent tail."""
    dist = grid.offsets()
    tail_r, _ = bandlimited_tails(lam, dist, grid.cutoff, s)
    col = grid.h * (s_function(w, dist) - tail_r)
    return toeplitz(col, col)
