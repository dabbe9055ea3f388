"""The k-plane engine: z <-> k, sector geometry, determinant-zero search and the localization checks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .axial import branch_sqrt
from .birman_schwinger import BSModel
from .core import KDomainParams, ModelParams, PotentialSpec, half_plane_of, threshold_root, z_of_k
from .det_index import ContourUnsafe, _order as _order_of, log_det_reg
from .dirac_op import TruncationScheme, channel_operator
from .landau import ToeplitzSpectrum, gap_radii, toeplitz_matrix, vm_profile

__all__ = [
    "z_of_k", "k_of_z", "KPoint", "ZeroRecord", "ZeroList", "SectorSpec", "sector_contains",
    "DeterminantField", "KSector", "domain_sector", "find_zeros_of", "find_zeros", "counting_function", "thm21_scan",
    "thm23_check", "thm24_check",
]


def k_of_z(z, sign_m: int = 1, mass: float = 1.0) -> complex:
    """Inverse of z_of_k: k^2 = (z -+ m) / (z +- m), the root reflected to Re k > 0."""
    z = complex(z)
    if z + sign_m * mass == 0:
        raise ValueError("z = -+m is the pole of the inverse parametrization")
    lam = (z - sign_m * mass) / (z + sign_m * mass)
    k = complex(branch_sqrt(lam, "positive"))
    return -k if k.real < 0 else k


@dataclass(frozen=True)
class KPoint:
    k: complex
    sign_m: int = 1
    mass: float = 1.0

    @property
    def z(self) -> complex:
        return complex(z_of_k(self.k, self.sign_m, self.mass))

    @property
    def half_plane(self) -> int:
        return half_plane_of(self.k)

    def consistent(self) -> bool:
        """sign(Im z) agrees with the half-disc of k (Re k > 0 assumed)."""
        s = np.sign(self.z.imag)
        return bool(s == self.sign_m * self.half_plane)


@dataclass(frozen=True)
class ZeroRecord:
    point: KPoint
    multiplicity: int
    residual: float
    contour: tuple  # (x0, x1, y0, y1) of the isolating box

    @property
    def k(self) -> complex:
        return self.point.k

    @property
    def z(self) -> complex:
        return self.point.z


class ZeroList(list):
    """List of ZeroRecord with the search bookkeeping attached."""

    def __init__(self, records=(), unresolved=(), total_winding: int = 0, n_evals: int = 0):
        super().__init__(records)
        self.unresolved = list(unresolved)
        self.total_winding = total_winding
        self.n_evals = n_evals

    @property
    def total_multiplicity(self) -> int:
        return int(sum(r.multiplicity for r in self))


# --- sectors ------------------------------------------------------------------------


@dataclass(frozen=True)
class SectorSpec:
    """Membership data. ``rotation`` maps the reference set onto the k-plane set (k = rotation * k')."""

    kind: str
    delta: float = 0.2
    J: int = 1
    rotation: complex = 1.0
    r: float = 0.0
    r0: float = np.inf
    nu: float | None = None

    def __post_init__(self):
        if self.kind not in ("C_delta_J", "Gamma_delta", "Lambda_ell", "annulus_Delta"):
            raise ValueError(f"unknown sector kind {self.kind!r}")


def _reduced(spec: SectorSpec, k):
    return np.asarray(k, dtype=complex) / spec.rotation


def sector_contains(spec: SectorSpec, k):
    """Literal evaluation of the defining inequalities."""
    kk = _reduced(spec, k)
    x, y = kk.real, kk.imag
    if spec.kind == "C_delta_J":
        out = -spec.delta * spec.J * y <= np.abs(x)
    elif spec.kind == "Gamma_delta":
        out = (spec.r < x) & (x < spec.r0) & (-spec.delta * x < y) & (y < spec.delta * x)
    elif spec.kind == "Lambda_ell":
        out = (spec.r <= x) & (x <= spec.r0)
    else:
        ka = np.asarray(k, dtype=complex)
        nu = spec.r**2 / 100 if spec.nu is None else spec.nu
        a = np.abs(ka)
        out = (spec.r < a) & (a < 2 * spec.r) & (np.abs(ka.real) > np.sqrt(nu)) & (np.abs(ka.imag) > np.sqrt(nu))
    return bool(out) if np.ndim(out) == 0 else out


def sector_margin(spec: SectorSpec, k) -> float:
    """Slack of the cone inequality (|Re k'| + delta J Im k'), for boundary flagging."""
    kk = complex(_reduced(spec, k))
    return abs(kk.real) + spec.delta * spec.J * kk.imag


# --- determinant field -------------------------------------------------------------------


class DeterminantField:
    """k -> log det_q(I + T_V(z(k))) with memoized evaluations.

    For the matrix backend (q = 1) ``remove_free_poles`` adds log det(D_box - z), which cancels the
    poles at the real eigenvalues of the free box operator without moving any zero off the real axis.
    """

    def __init__(self, model: BSModel, sign_m: int = 1, half_plane: int = 1, q: float = 1,
                 backend: str = "kernel", pad: int = 0, remove_free_poles: bool = False):
        self.model, self.sign_m, self.half_plane = model, sign_m, half_plane
        self.q, self.backend, self.pad = q, backend, pad
        self.cache: dict = {}
        self.free_eigenvalues = None
        if remove_free_poles:
            if backend != "matrix" or _order_of(q) != 1:
                raise ValueError("pole removal needs the matrix backend with q = 1")
            grid = model.trunc.grid
            box = grid.padded(pad)[0] if pad > 0 else grid
            A = channel_operator(model.params, model.trunc, box.p3_matrix())
            self.free_eigenvalues = np.linalg.eigvalsh(0.5 * (A + A.conj().T))

    def z(self, k: complex) -> complex:
        return complex(z_of_k(k, self.sign_m, self.model.params.mass))

    def T(self, k: complex) -> np.ndarray:
        z = self.z(k)
        if self.backend == "kernel":
            s = threshold_root(k, self.sign_m, self.model.params.mass, self.half_plane)
            return self.model.sandwich(self.model.kernel_resolvent(z, lll_root=s))
        return self.model.T(z, self.backend, self.pad)

    def bs_log(self, k: complex) -> complex:
        """log det_q(I + T_V) without the pole-removal factor."""
        return log_det_reg(-self.T(complex(k)), self.q)

    def __call__(self, k: complex) -> complex:
        key = complex(k)
        if key not in self.cache:
            val = log_det_reg(-self.T(key), self.q)
            if self.free_eigenvalues is not None:
                # each channel eigenvalue is M-fold (identity in the guiding-centre label)
                val += self.model.trunc.M * np.sum(np.log(self.free_eigenvalues - self.z(key)))
            self.cache[key] = val
        return self.cache[key]


# --- zero search ----------------------------------------------------------------------------


def _wrap(a: float) -> float:
    return (a + np.pi) % (2 * np.pi) - np.pi


class _PhaseTracker:
    def __init__(self, log_f, n_init: int, max_jump: float, min_len: float, singular=(), rel_step: float = 0.25):
        self.log_f, self.n_init, self.max_jump, self.min_len = log_f, n_init, max_jump, min_len
        self.singular, self.rel_step = tuple(singular), rel_step
        self.max_log_jump = 1.0
        self.edges: dict = {}

    def _initial_points(self, a: complex, b: complex) -> list:
        ts = list(np.linspace(0.0, 1.0, self.n_init + 1))
        if not self.singular:
            return [a + (b - a) * t for t in ts]
        # near a singular point the integrand varies on the scale of the distance to it
        out, i = [ts[0]], 0
        while i < len(ts) - 1:
            t0, t1 = out[-1], ts[i + 1]
            p0 = a + (b - a) * t0
            dist = min(abs(p0 - s) for s in self.singular)
            step = self.rel_step * dist / abs(b - a)
            if t1 - t0 > step:
                out.append(t0 + step)
            else:
                out.append(t1)
                i += 1
        return [a + (b - a) * t for t in out]

    def edge(self, a: complex, b: complex) -> tuple[float, complex]:
        """(phase change, first moment sum of k d log f) along the segment a -> b."""
        key = (a, b)
        if key in self.edges:
            return self.edges[key]
        if (b, a) in self.edges:
            ph, mom = self.edges[(b, a)]
            return -ph, -mom
        pts = self._initial_points(a, b)
        vals = [self.log_f(p) for p in pts]
        total, moment, i = 0.0, 0j, 0
        while i < len(pts) - 1:
            if not (np.isfinite(vals[i].real) and np.isfinite(vals[i + 1].real)):
                raise ContourUnsafe(f"determinant vanishes near {pts[i]}")
            d = _wrap((vals[i + 1] - vals[i]).imag)
            # a large modulus change hints at a nearby zero or pole that can alias the phase
            if abs(d) > self.max_jump or abs((vals[i + 1] - vals[i]).real) > self.max_log_jump:
                if abs(pts[i + 1] - pts[i]) < self.min_len:
                    raise ContourUnsafe(f"unresolved phase jump near {pts[i]}")
                mid = 0.5 * (pts[i] + pts[i + 1])
                pts.insert(i + 1, mid)
                vals.insert(i + 1, self.log_f(mid))
                continue
            total += d
            moment += 0.5 * (pts[i] + pts[i + 1]) * complex((vals[i + 1] - vals[i]).real, d)
            i += 1
        self.edges[key] = (total, moment)
        return total, moment

    def _corners(self, box):
        x0, x1, y0, y1 = box
        return [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]

    def winding(self, box) -> float:
        c = self._corners(box)
        return sum(self.edge(c[i], c[(i + 1) % 4])[0] for i in range(4)) / (2 * np.pi)

    def centroid(self, box) -> complex:
        """(1 / 2 pi i) closed integral of k d log f: the zero location when the winding is 1."""
        c = self._corners(box)
        return sum(self.edge(c[i], c[(i + 1) % 4])[1] for i in range(4)) / (2j * np.pi)


def _int_winding(w: float, tol: float = 1e-3) -> int:
    n = int(round(w))
    if abs(w - n) > tol:
        raise ContourUnsafe(f"winding {w} not integral")
    return n


def _newton(log_f, k0: complex, box, tol: float, max_iter: int = 15):
    """Newton on log f (step -1 / (log f)') started at k0; None unless it settles inside the box."""
    x0, x1, y0, y1 = box
    size = max(x1 - x0, y1 - y0)
    k, prev = k0, np.inf
    for _ in range(max_iter):
        # the difference step must stay well below the distance to the zero
        h = max(1e-4 * min(size, prev), 1e-12 * (1.0 + abs(k)))
        dp, dm = log_f(k + h), log_f(k - h)
        dl = complex((dp - dm).real, _wrap((dp - dm).imag)) / (2 * h)
        if dl == 0 or not np.isfinite(dl):
            return None
        step = -1.0 / dl
        k = k + step
        a = abs(step)
        if a > size or not (x0 - size <= k.real <= x1 + size and y0 - size <= k.imag <= y1 + size):
            return None
        if a < 1e-3 * tol or (a < tol and a >= 0.5 * prev):
            return k if (x0 <= k.real <= x1 and y0 <= k.imag <= y1) else None
        prev = a
    return None


def find_zeros_of(log_f, region, tol: float = 1e-8, w_max: int = 4, n_init: int = 8,
                  max_jump: float = np.pi / 4, max_boxes: int = 20000, singular=()):
    """Zeros of f inside the rectangle region = (x0, x1, y0, y1) from the boundary winding of log f.

    Returns (records, unresolved, total_winding) with records (k, multiplicity, box).
    """
    tracker = _PhaseTracker(log_f, n_init, max_jump, 1e-3 * tol, singular)
    records, unresolved = [], []
    x0, x1, y0, y1 = region
    box = tuple(region)
    total = None
    for attempt in range(4):
        try:
            total = _int_winding(tracker.winding(box))
            break
        except ContourUnsafe:
            d = (attempt + 1) * tol / 10
            box = (x0 - d, x1 + d, y0 - d, y1 + d)
    if total is None:
        return records, [tuple(region)], 0
    stack = [(box, total)]
    n_boxes = 0
    fractions = (0.47, 0.53, 0.41, 0.59)
    while stack:
        box, w = stack.pop()
        n_boxes += 1
        if w == 0:
            continue
        if w < 0 or n_boxes > max_boxes:
            unresolved.append(box)
            continue
        bx0, bx1, by0, by1 = box
        size = max(bx1 - bx0, by1 - by0)
        if w == 1:
            guess = tracker.centroid(box)
            if not (bx0 <= guess.real <= bx1 and by0 <= guess.imag <= by1):
                guess = complex(0.5 * (bx0 + bx1), 0.5 * (by0 + by1))
            k = _newton(log_f, guess, box, tol)
            if k is not None:
                records.append((k, 1, box))
                continue
        if size < tol:
            if w <= w_max:
                records.append((complex(0.5 * (bx0 + bx1), 0.5 * (by0 + by1)), w, box))
            else:
                unresolved.append(box)
            continue
        children = None
        for f in fractions:
            xm, ym = bx0 + f * (bx1 - bx0), by0 + f * (by1 - by0)
            cand = [(bx0, xm, by0, ym), (xm, bx1, by0, ym), (xm, bx1, ym, by1), (bx0, xm, ym, by1)]
            # split the long side only when the box is elongated
            if bx1 - bx0 > 2 * (by1 - by0):
                cand = [(bx0, xm, by0, by1), (xm, bx1, by0, by1)]
            elif by1 - by0 > 2 * (bx1 - bx0):
                cand = [(bx0, bx1, by0, ym), (bx0, bx1, ym, by1)]
            try:
                ws = [_int_winding(tracker.winding(c)) for c in cand]
            except ContourUnsafe:
                continue
            if sum(ws) == w:
                children = list(zip(cand, ws))
                break
        if children is None:
            unresolved.append(box)
            continue
        stack.extend(children)
    return records, unresolved, total


@dataclass(frozen=True)
class KSector:
    """Annular sector r_min < |k| < r_max, theta_min < arg k < theta_max, searched in u = ln k."""

    r_min: float
    r_max: float
    theta_min: float
    theta_max: float

    def __post_init__(self):
        if not (0 < self.r_min < self.r_max and self.theta_min < self.theta_max):
            raise ValueError("degenerate annular sector")
        if not (-np.pi / 2 <= self.theta_min and self.theta_max <= np.pi / 2):
            raise ValueError("annular sector must lie in Re k >= 0")
        if self.theta_min < 0 < self.theta_max:
            raise ValueError("annular sector must lie in one quadrant")

    def u_box(self) -> tuple:
        return (np.log(self.r_min), np.log(self.r_max), self.theta_min, self.theta_max)

    @property
    def half_plane(self) -> int:
        return 1 if self.theta_max > 0 else -1

    def contains(self, k) -> bool:
        k = complex(k)
        return bool(self.r_min < abs(k) < self.r_max and self.theta_min < np.angle(k) < self.theta_max)


def domain_sector(half_plane: int, eps_k: float, inner: float, angle_margin: float = 1e-6) -> KSector:
    """D_+*(eps_k) (half_plane = 1) or D_-*(eps_k) (half_plane = -1) with |k| > inner."""
    if half_plane > 0:
        return KSector(inner, eps_k, angle_margin, np.pi / 2 - angle_margin)
    return KSector(inner, eps_k, -np.pi / 2 + angle_margin, -angle_margin)


def find_zeros(region, spec: PotentialSpec, trunc: TruncationScheme, params: ModelParams | None = None,
               sign_m: int = 1, tol: float = 1e-8, q: float = 1, backend: str = "kernel", pad: int = 0,
               w_max: int = 4, model: BSModel | None = None, remove_free_poles: bool = False) -> ZeroList:
    """Zeros of k -> det_q(I + T_V(z(k))) in one open quadrant with Re k > 0.

    ``region`` is a KSector (subdivided in ln k, tol relative) or a rectangle (x0, x1, y0, y1) in k.
    """
    params = params or ModelParams()
    if isinstance(region, KSector):
        hp = region.half_plane
    else:
        x0, x1, y0, y1 = region
        if x0 <= 0 or y0 * y1 <= 0:
            raise ValueError("rectangle must lie in an open quadrant with Re k > 0")
        hp = 1 if y0 > 0 else -1
    if spec.epsilon == 0:
        return ZeroList()
    model = model or BSModel(params, spec, trunc)
    field_ = DeterminantField(model, sign_m, hp, q, backend, pad, remove_free_poles)
    if isinstance(region, KSector):
        recs, unresolved, total = find_zeros_of(lambda u: field_(np.exp(u)), region.u_box(), tol=tol, w_max=w_max)
        recs = [(complex(np.exp(u)), mult, ("log", box)) for u, mult, box in recs]
        unresolved = [("log", box) for box in unresolved]
    else:
        recs, unresolved, total = find_zeros_of(field_, tuple(region), tol=tol, w_max=w_max)
        recs = [(k, mult, ("k", box)) for k, mult, box in recs]
        unresolved = [("k", box) for box in unresolved]
    out = []
    for k, mult, box in recs:
        res = float(np.exp(field_.bs_log(k).real))
        out.append(ZeroRecord(KPoint(k, sign_m, params.mass), mult, res, box))
    out.sort(key=lambda r: abs(r.k))
    return ZeroList(out, unresolved, total, len(field_.cache))


def scan_domain(spec: PotentialSpec, trunc: TruncationScheme, params: ModelParams, kdom: KDomainParams,
                sign_m: int, half_plane: int, tol: float = 1e-8, inner: float | None = None, **kw) -> ZeroList:
    """Zeros in D_+*(eps_k) (half_plane = 1) or D_-*(eps_k) (half_plane = -1), |k| > inner."""
    inner = 1e-3 * kdom.eps_k if inner is None else inner
    return find_zeros(domain_sector(half_plane, kdom.eps_k, inner), spec, trunc, params, sign_m, tol, **kw)


def counting_function(zeros, omega) -> int:
    """Sum of multiplicities of zeros whose z lies in omega (callable z -> bool or object with contains)."""
    test = omega.contains if hasattr(omega, "contains") else omega
    return int(sum(r.multiplicity for r in zeros if bool(test(r.z))))


def numerical_range_violations(zeros, spec: PotentialSpec, tol: float = 1e-8) -> list:
    bound = spec.sup_norm() + tol
    return [r for r in zeros if abs(r.z.imag) > bound]


# --- localization checks ----------------------------------------------------------------------


def _toeplitz_spectrum(spec: PotentialSpec, trunc: TruncationScheme, params: ModelParams, sign_m: int,
                       use_abs_w: bool, nu_gap: float) -> ToeplitzSpectrum:
    basis = trunc.landau_basis(params.b0)
    T = toeplitz_matrix(vm_profile(spec, sign_m, use_abs_w=use_abs_w), basis)
    return gap_radii(np.linalg.eigvalsh(T), nu_gap)


@dataclass
class Thm21Row:
    r: float
    count: int
    trace: int
    trace_log: float
    bound: float
    holds: bool


def thm21_scan(r_values, spec: PotentialSpec, trunc: TruncationScheme, params: ModelParams | None = None,
               sign_m: int = 1, half_plane: int = 1, kdom: KDomainParams | None = None, nu: float | None = None,
               zeros=None, tol: float = 1e-8):
    """Counts in the annuli r < |k| < 2r against Tr 1_(r, inf)(p V_m p) |ln r|, with a constant fitted at the largest r."""
    params = params or ModelParams()
    kdom = kdom or KDomainParams()
    if zeros is None:
        zeros = scan_domain(spec, trunc, params, kdom, sign_m, half_plane, tol)
    tsp = _toeplitz_spectrum(spec, trunc, params, sign_m, False, kdom.nu_gap)
    rs = sorted((float(r) for r in r_values), reverse=True)
    rows, c_fit = [], None
    for r in rs:
        sec = SectorSpec("annulus_Delta", r=r, nu=nu)
        cnt = int(sum(z.multiplicity for z in zeros if sector_contains(sec, z.k)))
        tr = tsp.trace_above(r)
        tl = tr * abs(np.log(r))
        if c_fit is None:
            c_fit = max(cnt / (tl + 1.0), 1.0)
        bound = c_fit * (tl + 1.0)
        rows.append(Thm21Row(r, cnt, tr, tl, bound, cnt <= bound))
    return {"rows": rows, "c_fit": c_fit, "zeros": zeros}


def _thm23_setting(spec: PotentialSpec, sign_m: int, delta: float):
    """(half-plane of the scanned domain, cone in the k-plane) for the two ranges of Arg phi."""
    a = spec.arg_phi
    if 0 < a < np.pi:
        hp = 1 if sign_m > 0 else -1
        rot = spec.phi / abs(spec.phi)
    elif -np.pi < a < 0:
        hp = -1 if sign_m > 0 else 1
        rot = -spec.phi / abs(spec.phi)
    else:
        raise ValueError("Arg phi must lie in (0, pi) or -(0, pi)")
    return hp, SectorSpec("C_delta_J", delta=delta, J=spec.J, rotation=rot)


@dataclass
class Thm23Report:
    eps0: float
    eps_checked: float
    count: int
    passed: bool
    inconclusive: bool
    zeros: list
    flagged: list
    history: list = field(default_factory=list)


def thm23_check(spec: PotentialSpec, trunc: TruncationScheme, params: ModelParams | None = None,
                delta: float = 0.2, sign_m: int = 1, kdom: KDomainParams | None = None,
                eps_max: float | None = None, n_bisect: int = 4, tol: float = 1e-8,
                boundary_tol: float = 1e-6) -> Thm23Report:
    """Zero count in Phi C_delta(J) on the physical half-disc; eps0 bisected, final check at eps0 / 2."""
    from .core import validate_potential

    params = params or ModelParams()
    kdom = (kdom or KDomainParams()).check(params.mass)
    spec = validate_potential(spec)
    hp, cone = _thm23_setting(spec, sign_m, delta)
    if eps_max is None:
        wmax = spec.sup_norm() / max(spec.epsilon * spec.abs_phi, 1e-300)
        eps_max = 0.95 * params.mass / (spec.abs_phi * wmax)
    history = []

    def run(eps):
        if eps == 0:
            return 0, ZeroList()
        zs = scan_domain(spec.with_coupling(eps), trunc, params, kdom, sign_m, hp, tol)
        inside = [z for z in zs if sector_contains(cone, z.k)]
        n = int(sum(z.multiplicity for z in inside))
        history.append((eps, n, len(zs.unresolved)))
        return n, zs

    n, zs = run(eps_max)
    if n == 0 and not zs.unresolved:
        eps0 = eps_max
    else:
        lo, hi = 0.0, eps_max
        for _ in range(n_bisect):
            mid = 0.5 * (lo + hi)
            n_mid, zs_mid = run(mid)
            if n_mid == 0 and not zs_mid.unresolved:
                lo = mid
            else:
                hi = mid
        eps0 = lo
    eps_c = 0.5 * eps0
    n, zs = run(eps_c)
    flagged = [z for z in zs if abs(sector_margin(cone, z.k)) < boundary_tol]
    inconclusive = bool(zs.unresolved) or eps0 == 0
    return Thm23Report(eps0=eps0, eps_checked=eps_c, count=n, passed=(n == 0 and not inconclusive),
                       inconclusive=inconclusive, zeros=list(zs), flagged=flagged, history=history)


@dataclass
class Thm24Row:
    ell: int
    r_hi: float
    r_lo: float
    count: int
    toeplitz_count: int
    holds: bool
    inconclusive: bool


def _thm24_setting(spec: PotentialSpec, sign_m: int):
    """(half-plane, mirror factor for k, axis direction of z -+ m) for the two ranges of Arg phi."""
    a = spec.arg_phi
    lo = np.pi / 2 if sign_m > 0 else 0.0
    if lo < a < lo + np.pi / 2:
        hp = 1 if sign_m > 0 else -1
        return hp, 1, sign_m * np.exp(1j * (2 * a - np.pi))
    if -(lo + np.pi / 2) < a < -lo:
        hp = -1 if sign_m > 0 else 1
        return hp, -1, sign_m * np.exp(1j * (2 * a + np.pi))
    raise ValueError("Arg phi outside the ranges covered by the cluster check at this threshold")


def thm24_check(spec: PotentialSpec, trunc: TruncationScheme, params: ModelParams | None = None,
                delta: float = 0.2, ell_max: int = 2, sign_m: int = 1, kdom: KDomainParams | None = None,
                tol: float = 1e-8, zeros=None) -> dict:
    """Per band: zeros (with multiplicity) in -iJ phi eps Gamma^delta(r_{l+1}, r_l) against Tr 1_(r_{l+1}, r_l)(p W_m p)."""
    from .core import validate_potential

    params = params or ModelParams()
    kdom = (kdom or KDomainParams()).check(params.mass)
    spec = validate_potential(spec)
    hp, mirror, axis = _thm24_setting(spec, sign_m)
    if zeros is None:
        zeros = scan_domain(spec, trunc, params, kdom, sign_m, hp, tol)
    tsp = _toeplitz_spectrum(spec, trunc, params, sign_m, True, kdom.nu_gap)
    radii = tsp.radii
    rot = -1j * spec.J * spec.phi * spec.epsilon
    inconclusive = bool(zeros.unresolved) if hasattr(zeros, "unresolved") else False
    rows = []
    for ell in range(min(ell_max + 1, len(radii) - 1)):
        r_hi, r_lo = float(radii[ell]), float(radii[ell + 1])
        sec = SectorSpec("Gamma_delta", delta=delta, J=spec.J, rotation=rot, r=r_lo, r0=r_hi)
        cnt = int(sum(z.multiplicity for z in zeros if sector_contains(sec, mirror * z.k)))
        ref = tsp.band_count(r_lo, r_hi)
        rows.append(Thm24Row(ell, r_hi, r_lo, cnt, ref, (cnt >= ref) and not inconclusive, inconclusive))
    m = sign_m * params.mass
    ang = np.array([np.angle((z.z - m) / axis) for z in zeros])
    median = float(np.median(ang)) if ang.size else float("nan")
    return {
        "rows": rows,
        "radii": radii,
        "axis_angle": float(np.angle(axis)),
        "median_offset": median,
        "angle_ok": bool(ang.size and abs(median) <= 2 * delta),
        "zeros": zeros,
        "passed": bool(rows) and all(r.holds for r in rows) and bool(ang.size and abs(median) <= 2 * delta),
    }
