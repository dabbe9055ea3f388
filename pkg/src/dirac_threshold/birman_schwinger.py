"""Sandwiched resolvent T_V(z), its singular split near the thresholds, and Schatten diagnostics.

T_V(z) = J |V|^{1/2} (D - z)^{-1} |V|^{1/2} with V = eps phi W. In the product basis
|V|^{1/2} = sqrt(eps |phi|) (|G|^{1/2} (x) diag(g^{1/2})), where G is the transverse Galerkin matrix of
the spinor-weighted profile, and J = e^{i arg phi} sign(W) times the projection onto its range.

Two realizations share the basis:
  * ``matrix``: dense solve with the discretized free operator on a periodic axial box;
  * ``kernel``: closed-form axial kernels of the band-limited whole-line model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma as gamma_fn

import numpy as np
from scipy import linalg

from .axial import bandlimited_kernel_matrices, regular_kernel_matrix, resolvent_root
from .core import ModelParams, PotentialSpec, threshold_root, validate_potential, z_of_k
from .det_index import schatten_norm
from .dirac_op import (
    TruncationScheme,
    channel_operator,
    channel_symbol,
    expand_sectors,
    free_channel_entries,
    transverse_galerkin,
)
from .landau import toeplitz_matrix, vm_profile


@dataclass(frozen=True)
class PolarFactors:
    """Pointwise polar data: V(x) = J(x) |V(x)|, with |V|^{1/2} and J on given sample points."""

    j_tilde: np.ndarray
    sqrt_abs_v: np.ndarray
    abs_v: np.ndarray


def polar_factors(values: np.ndarray, tol: float = 1e-14) -> PolarFactors:
    """Polar decomposition of a stack of 4x4 matrices; J := 0 on ker |V|."""
    V = np.asarray(values, dtype=complex)
    H = np.swapaxes(V.conj(), -1, -2) @ V
    ev, U = np.linalg.eigh(H)
    sv = np.sqrt(np.clip(ev, 0.0, None))
    Uh = np.swapaxes(U.conj(), -1, -2)
    absV = (U * sv[..., None, :]) @ Uh
    sqrt_absV = (U * np.sqrt(sv)[..., None, :]) @ Uh
    scale = np.max(sv, axis=-1, keepdims=True)
    inv = np.where(sv > tol * np.maximum(scale, 1e-300), 1.0 / np.where(sv > 0, sv, 1.0), 0.0)
    pinv_abs = (U * inv[..., None, :]) @ Uh
    J = V @ pinv_abs
    return PolarFactors(j_tilde=J, sqrt_abs_v=sqrt_absV, abs_v=absV)


@dataclass
class BSOperator:
    z: complex
    T: np.ndarray
    backend: str
    k: complex | None = None
    sign_m: int | None = None
    half_plane: int | None = None
    B: np.ndarray | None = None
    A: np.ndarray | None = None
    singular_coefficient: complex | None = None
    flags: list = field(default_factory=list)

    def split_residual(self) -> float:
        """||T - (c J B + A)|| / ||T|| for the stored split."""
        if self.B is None:
            raise ValueError("no split stored")
        rec = self.singular_coefficient * self.B + self.A
        return float(np.linalg.norm(self.T - rec) / np.linalg.norm(self.T))


class BSModel:
    """Precomputed factors of |V|^{1/2} and J for one potential and truncation."""

    def __init__(self, params: ModelParams, spec: PotentialSpec, trunc: TruncationScheme, range_tol: float = 1e-13):
        spec = validate_potential(spec)
        self.params, self.spec, self.trunc = params, spec, trunc
        G = spec.J * transverse_galerkin(spec, trunc, params.b0)
        ev, U = np.linalg.eigh(G)
        top = max(float(np.max(np.abs(ev))), 1e-300)
        ev = np.where(ev > range_tol * top, ev, 0.0)
        self.sqrtG = (U * np.sqrt(ev)) @ U.conj().T
        self.range_proj = (U[:, ev > 0]) @ U[:, ev > 0].conj().T
        self.abs_galerkin = G
        grid = trunc.grid
        self.g = np.asarray(spec.g_axial(grid.nodes), dtype=float)
        self.sqrt_g = np.sqrt(self.g)
        self.scale2 = spec.epsilon * spec.abs_phi
        self.jphase = np.exp(1j * spec.arg_phi) * spec.J
        self._entries = free_channel_entries(params, trunc)
        self.shifts = trunc.level_shifts(params.b0)

    # -- operator pieces --------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.trunc.dim

    def sqrt_abs_v(self) -> np.ndarray:
        return np.sqrt(self.scale2) * np.kron(self.sqrtG, np.diag(self.sqrt_g))

    def j_tilde(self) -> np.ndarray:
        return self.jphase * np.kron(self.range_proj, np.eye(self.trunc.grid.N))

    def potential(self) -> np.ndarray:
        B = self.sqrt_abs_v()
        return self.j_tilde() @ B @ B

    def sandwich(self, R4: np.ndarray) -> np.ndarray:
        """J |V|^{1/2} R |V|^{1/2} for a channel resolvent R4[c, c', j, l] (identity in mu)."""
        C, M, N = self.trunc.n_channels, self.trunc.M, self.trunc.grid.N
        S4 = self.sqrtG.reshape(C, M, C * M)
        Y = np.einsum("cdjl,dmb->cmjbl", R4, S4, optimize=True)
        T = np.einsum("acm,cmibl->aibl", self.sqrtG.reshape(C * M, C, M), Y, optimize=True)
        T = T * (self.sqrt_g[None, :, None, None] * self.sqrt_g[None, None, None, :])
        return (self.jphase * self.scale2) * T.reshape(C * M * N, C * M * N)

    # -- channel resolvents --------------------------------------------------------

    def kernel_resolvent(self, z: complex, lll_root: complex | None = None) -> np.ndarray:
        """R4 of (D - z)^{-1} = (D + z)(D^2 - z^2)^{-1} from band-limited axial kernels."""
        grid, m = self.trunc.grid, self.params.mass
        C, N = self.trunc.n_channels, grid.N
        cache: dict = {}

        def kernels(c):
            lam_shift = float(self.shifts[c])
            if lam_shift not in cache:
                lam = z * z - m * m - lam_shift
                s = lll_root if (lam_shift == 0 and lll_root is not None) else resolvent_root(lam)
                cache[lam_shift] = bandlimited_kernel_matrices(lam, grid, s)
            return cache[lam_shift]

        R4 = np.zeros((C, C, N, N), dtype=complex)
        for i, j, kind, coef in self._entries:
            Ir, Ip = kernels(j)
            R4[i, j] += coef * (Ir if kind == "const" else Ip)
        for c in range(C):
            R4[c, c] += z * kernels(c)[0]
        return R4

    def matrix_resolvent(self, z: complex, pad: int = 0, method: str = "fft") -> np.ndarray:
        """R4 of the discretized free operator on a periodic box (inner block only).

        ``fft`` inverts the C x C symbol at each box frequency (p3 is circulant); ``dense`` solves the
        full system. Both give the same matrix inverse.
        """
        grid = self.trunc.grid
        if pad > 0:
            box, sl = grid.padded(pad)
        else:
            box, sl = grid, slice(0, grid.N)
        C = self.trunc.n_channels
        if method == "fft":
            sym = channel_symbol(self.params, self.trunc, box.frequencies(), shift=-z)
            inv = np.linalg.inv(sym)  # (Nb, C, C)
            # circulant column: r[c, d, j] = (1/Nb) sum_xi inv[xi, c, d] e^{i xi x_j}
            col = np.fft.ifft(np.transpose(inv, (1, 2, 0)), axis=-1)
            idx = np.arange(box.N)[sl]
            diff = (idx[:, None] - idx[None, :]) % box.N
            return col[:, :, diff]
        if method != "dense":
            raise ValueError(f"unknown method {method!r}")
        A = channel_operator(self.params, self.trunc, box.p3_matrix(), shift=-z)
        cols = (np.arange(C)[:, None] * box.N + np.arange(box.N)[sl][None, :]).ravel()
        rhs = np.zeros((A.shape[0], cols.size), dtype=complex)
        rhs[cols, np.arange(cols.size)] = 1.0
        R = linalg.solve(A, rhs).reshape(C, box.N, C, grid.N)[:, sl]
        return np.transpose(R, (0, 2, 1, 3))

    def T(self, z: complex, backend: str = "kernel", pad: int = 0) -> np.ndarray:
        if backend == "kernel":
            return self.sandwich(self.kernel_resolvent(z))
        if backend == "matrix":
            return self.sandwich(self.matrix_resolvent(z, pad))
        raise ValueError(f"unknown backend {backend!r}")

    # -- threshold factorization -------------------------------------------------------

    def K(self, sign_m: int) -> np.ndarray:
        """K_{+-m} = (1/sqrt 2) (p (x) c) E |V|^{1/2}: an M x dim matrix."""
        tr = self.trunc
        c0 = tr.channel_index(0 if sign_m > 0 else 2, 0)
        M = tr.M
        rows = self.sqrtG[c0 * M:(c0 + 1) * M, :]
        K = np.einsum("mb,l->mbl", rows, self.sqrt_g * np.sqrt(tr.grid.weights))
        return np.sqrt(0.5 * self.scale2) * K.reshape(M, -1)

    def split(self, k: complex, sign_m: int = 1, half_plane: int | None = None) -> BSOperator:
        """T(z(k)) together with c J B_{+-m} + A_{+-m}(k), B = K* K, c = +-i/k or -+i/k."""
        m = self.params.mass
        hp = (1 if k.imag > 0 else -1) if half_plane is None else half_plane
        z = complex(z_of_k(k, sign_m, m))
        s = threshold_root(k, sign_m, m, hp)
        flags = []
        if s.imag <= 0:
            flags.append("k outside the open half-disc: branch sensitive")
        if abs(k.real) < 1e-12 or abs(k.imag) < 1e-12:
            flags.append("k on an axis: branch sensitive")
        sigma = sign_m * hp
        tr = self.trunc
        grid = tr.grid
        c_plus, c_minus = tr.channel_index(0, 0), tr.channel_index(2, 0)
        # full T through the kernel backend, with the LLL root fixed by the half-disc convention
        R4 = self.kernel_resolvent(z, lll_root=s)
        T = self.sandwich(R4)
        # regular remainder
        R_reg = R4.copy()
        lam0 = z * z - m * m
        reg = regular_kernel_matrix(s, lam0, grid, s)
        R_reg[c_plus, c_plus] = (z + m) * reg
        R_reg[c_minus, c_minus] = (z - m) * reg
        A = self.sandwich(R_reg)
        Ks, Kp = (self.K(1), self.K(-1)) if sign_m > 0 else (self.K(-1), self.K(1))
        A = A + sigma * 1j * k * self.jphase * (Kp.conj().T @ Kp)
        B = Ks.conj().T @ Ks
        coef = sigma * 1j / k * self.jphase
        return BSOperator(z=z, T=T, backend="kernel", k=k, sign_m=sign_m, half_plane=hp, B=B, A=A,
                          singular_coefficient=coef, flags=flags)


def bs_operator(z: complex, spec: PotentialSpec, trunc: TruncationScheme, params: ModelParams,
                backend: str = "kernel", pad: int = 0, cross_check_tol: float | None = None) -> BSOperator:
    """Assemble T_V(z) with the chosen backend; optionally cross-check against the other one."""
    m = params.mass
    if abs(z.imag) < 1e-10 and abs(z.real) >= m - 1e-10:
        raise ValueError("z within 1e-10 of the essential spectrum rays")
    model = BSModel(params, spec, trunc)
    T = model.T(z, backend, pad)
    out = BSOperator(z=z, T=T, backend=backend)
    if cross_check_tol is not None:
        other = "matrix" if backend == "kernel" else "kernel"
        T2 = model.T(z, other, pad)
        rel = float(np.linalg.norm(T - T2) / max(np.linalg.norm(T), 1e-300))
        if rel > cross_check_tol:
            out.flags.append(f"backend disagreement {rel:.2e}")
    return out


def singular_split(k: complex, sign_m: int, spec: PotentialSpec, trunc: TruncationScheme,
                   params: ModelParams, half_plane: int | None = None) -> BSOperator:
    return BSModel(params, spec, trunc).split(k, sign_m, half_plane)


def kk_star_check(spec: PotentialSpec, trunc: TruncationScheme, params: ModelParams, sign_m: int = 1):
    """Return (K K*, Toeplitz matrix of V_{+-m}, max difference of sorted nonzero eigenvalues)."""
    model = BSModel(params, spec, trunc)
    K = model.K(sign_m)
    KK = K @ K.conj().T
    ref = toeplitz_matrix(vm_profile(model.spec, sign_m), trunc.landau_basis(params.b0))
    a = np.sort(np.linalg.eigvalsh(KK))
    b = np.sort(np.linalg.eigvalsh(ref))
    return KK, ref, float(np.max(np.abs(a - b))) if a.size else 0.0


def cross_backend_pad(model: BSModel, z: complex, tol: float = 1e-12, min_pad: int = 4096) -> int:
    """Padding for the periodic box.

    The exponential part of the kernel is damped below tol; the band-limited part has 1/|x| tails,
    so images only decay like 1/pad and a floor min_pad is applied.
    """
    m = model.params.mass
    s = resolvent_root(z * z - m * m)
    return max(int(np.ceil(np.log(1.0 / tol) / s.imag / model.trunc.grid.h)) + 1, int(min_pad))


# --- Schatten diagnostics ------------------------------------------------------------


def _sup_ratio(w: complex, s_min: float) -> float:
    """sup_{s >= s_min} |(s + 1) / (s - w)| from the critical point of the squared ratio."""
    a, b = w.real, w.imag

    def f(s):
        return abs((s + 1) / (s - w))

    cands = [s_min]
    if abs(a + 1) > 0:
        sc = a + b * b / (a + 1)
        if sc > s_min:
            cands.append(sc)
    vals = [f(s) for s in cands] + [1.0]
    return float(max(vals))


def bracket_weight_norm(q: float, tau: float) -> float:
    """||<x>^{-tau}||_{L^q(R)} = (sqrt(pi) Gamma((q tau - 1)/2) / Gamma(q tau / 2))^{1/q}."""
    if not q * tau > 1:
        raise ValueError("need q tau > 1")
    return float((np.sqrt(np.pi) * gamma_fn(0.5 * (q * tau - 1)) / gamma_fn(0.5 * q * tau)) ** (1.0 / q))


def majorant_P(z: complex, m: float, q: float, tau: float) -> float:
    w = z * z - m * m
    s = resolvent_root(w)
    return (bracket_weight_norm(q, tau) * (abs(z + m) + abs(z - m)) * _sup_ratio(w, 0.0)
            + bracket_weight_norm(2.0, tau) / np.sqrt(s.imag))


def majorant_Q(z: complex, m: float, zeta: float) -> float:
    first = np.sqrt(max((zeta + 1) / (zeta + m * m), 1.0))
    return float(first + (abs(z) + abs(z) ** 2) * _sup_ratio(z * z - m * m, zeta))


def schatten_diagnostics(z: complex, spec: PotentialSpec, trunc: TruncationScheme, params: ModelParams,
                         q: float = 2.0, tau: float = 1.0, q_Q: float = 4.0) -> dict:
    """S_q norms of the weighted resolvent pieces and the corresponding majorants."""
    if q < 2 or q_Q < 4 or tau <= 0.5:
        raise ValueError("need q >= 2, q_Q >= 4 and tau > 1/2")
    m = params.mass
    model = BSModel(params, spec, trunc)
    grid = trunc.grid
    R = expand_sectors(np.transpose(model.kernel_resolvent(z), (0, 2, 1, 3)).reshape(
        trunc.n_channels * grid.N, trunc.n_channels * grid.N), trunc)
    Gu = transverse_galerkin(spec, trunc, params.b0, spinor=np.eye(4))
    weight = (1 + grid.nodes**2) ** (-tau / 2)
    mult = np.kron(Gu, np.diag(weight))
    p_mask = np.zeros(trunc.n_channels)
    p_mask[[trunc.channel_index(0, 0), trunc.channel_index(2, 0)]] = 1.0
    pdiag = np.repeat(p_mask, trunc.M * grid.N)
    lhs_P = schatten_norm(mult @ (R * pdiag[None, :]), q)
    lhs_Q = schatten_norm(mult @ (R * (1 - pdiag)[None, :]), q_Q)
    M_val = majorant_P(z, m, q, tau)
    Mt_val = majorant_Q(z, m, params.zeta)
    basis = trunc.landau_basis(params.b0)
    qd = basis.quadrature
    u_lq = float(np.sum(qd.weights * np.abs(spec.w_perp(qd.x1, qd.x2)) ** q) ** (1 / q))
    return {
        "z": [z.real, z.imag],
        "q": q,
        "tau": tau,
        "lhs_P": lhs_P,
        "M_value": M_val,
        "U_Lq": u_lq,
        "ratio_P": lhs_P / (u_lq * M_val),
        "lhs_Q": lhs_Q,
        "M_tilde_value": Mt_val,
        "ratio_Q": lhs_Q / Mt_val,
    }
