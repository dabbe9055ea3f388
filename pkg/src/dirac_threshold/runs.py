"""Command bodies for the CLI: configuration to model objects, runs, and tabular results."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .axial import AxialGrid
from .birman_schwinger import schatten_diagnostics
from .core import (AxialProfile, KDomainParams, ModelParams, PotentialSpec, TransverseProfile,
                   validate_potential, z_of_k)
from .dirac_op import TruncationScheme, assemble_free, assemble_potential, cluster_eigenvalues
from .landau import gap_radii, gaussian_toeplitz_eigenvalues, toeplitz_matrix, vm_profile
from .localization import (KSector, domain_sector, find_zeros, numerical_range_violations,
                           thm23_check, thm24_check)

SECTIONS = ("model", "potential", "truncation", "kdomain", "search", "spectrum", "toeplitz", "checks", "bounds")


class ConfigError(ValueError):
    """Malformed or inadmissible configuration."""


@dataclass
class Setting:
    params: ModelParams
    spec: PotentialSpec
    trunc: TruncationScheme
    kdom: KDomainParams
    raw: dict


@dataclass
class RunResult:
    """Tables to write, plot data, per-check verdicts and an exit status."""

    tables: dict = field(default_factory=dict)  # name -> (header, rows)
    plot: dict = field(default_factory=dict)
    report: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)  # name -> "pass" | "fail" | "inconclusive"
    notes: list = field(default_factory=list)

    @property
    def status(self) -> int:
        v = set(self.checks.values())
        if "fail" in v:
            return 3
        if "inconclusive" in v:
            return 2
        return 0


# --- configuration -------------------------------------------------------------------------


def _section(cfg: dict, name: str, allowed: tuple) -> dict:
    sec = cfg.get(name) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    extra = set(sec) - set(allowed)
    if extra:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(extra)}")
    return sec


def _complex(v, what: str) -> complex:
    if isinstance(v, dict):
        if set(v) != {"abs", "arg"}:
            raise ConfigError(f"{what} mapping needs exactly the keys abs and arg")
        return complex(float(v["abs"]) * np.exp(1j * float(v["arg"])))
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"{what} as a list must be [re, im]")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise ConfigError(f"cannot read {what} from {v!r}")


def _spinor(v) -> np.ndarray:
    if v is None or v == "identity":
        return np.eye(4, dtype=complex)
    if v == "minus_identity":
        return -np.eye(4, dtype=complex)
    try:
        rows = [[_complex(x, "spinor entry") for x in row] for row in v]
    except TypeError as exc:
        raise ConfigError("spinor must be identity, minus_identity or a 4x4 list") from exc
    S = np.array(rows, dtype=complex)
    if S.shape != (4, 4):
        raise ConfigError("spinor matrix must be 4x4")
    return S


def build_setting(cfg: dict) -> Setting:
    """Validate a configuration mapping and build the model objects."""
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a mapping")
    unknown = set(cfg) - set(SECTIONS)
    if unknown:
        raise ConfigError(f"unknown sections: {sorted(unknown)}")
    try:
        model = _section(cfg, "model", ("mass", "b0"))
        params = ModelParams(float(model.get("mass", 1.0)), float(model.get("b0", 2.0)))
        pot = _section(cfg, "potential", ("phi", "epsilon", "transverse", "axial", "spinor"))
        tr = pot.get("transverse") or {}
        ax = pot.get("axial") or {}
        spec = PotentialSpec(
            phi=_complex(pot.get("phi", [0.0, 1.0]), "phi"),
            epsilon=float(pot.get("epsilon", 0.1)),
            w_perp=TransverseProfile(tr.get("kind", "gaussian"), float(tr.get("c", 1.0))),
            g_axial=AxialProfile(ax.get("kind", "gaussian"), ax.get("beta"), float(ax.get("scale", 1.0))),
            spinor_factor=_spinor(pot.get("spinor")),
        )
        spec = validate_potential(spec)
        t = _section(cfg, "truncation", ("n_levels", "M", "L", "N", "cap"))
        grid = AxialGrid(float(t.get("L", 5.0)), int(t.get("N", 25)))
        trunc = TruncationScheme(int(t.get("n_levels", 1)), int(t.get("M", 3)), grid, int(t.get("cap", 20000)))
        kd = _section(cfg, "kdomain", ("eta", "gamma", "eps_k", "delta", "nu_gap"))
        kdom = KDomainParams(**{k: float(v) for k, v in kd.items()}).check(params.mass)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    for name, keys in (("search", ("sign_m", "half_plane", "backend", "pad", "q", "tol", "w_max",
                                   "remove_free_poles", "region", "inner")),
                       ("spectrum", ("thresholds", "radius", "cluster_tol", "real_tol")),
                       ("toeplitz", ("sign_m", "use_abs_w", "nu_gap")),
                       ("checks", ("delta", "ell_max", "eps_max", "n_bisect", "sign_m")),
                       ("bounds", ("q", "tau", "q_Q", "z_points", "random_points"))):
        _section(cfg, name, keys)
    return Setting(params, spec, trunc, kdom, cfg)


def _list(v, default):
    if v is None:
        return list(default)
    if v == "both":
        return [1, -1]
    return [int(x) for x in (v if isinstance(v, (list, tuple)) else [v])]


def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


# --- commands ------------------------------------------------------------------------------


def run_spectrum(st: Setting, tol: float | None = None, seed: int = 0) -> RunResult:
    """Direct dense eigensolve of the truncated operator in discs |z -+ m| < radius."""
    sp = st.raw.get("spectrum") or {}
    radius = float(sp.get("radius", st.kdom.eta))
    cluster_tol = float(sp.get("cluster_tol", 1e-8))
    real_tol = float(sp.get("real_tol", 1e-8))
    H = np.asarray(assemble_free(st.params, st.trunc)) + np.asarray(assemble_potential(st.spec, st.trunc, st.params))
    vals = np.linalg.eigvals(H)
    res = RunResult()
    rows, nonreal = [], []
    for s in _list(sp.get("thresholds"), (1, -1)):
        c = s * st.params.mass
        for z, mult in cluster_eigenvalues(vals[np.abs(vals - c) < radius], cluster_tol):
            rows.append((z.real, z.imag, mult))
            if abs(z.imag) > real_tol:
                nonreal.append((z.real, z.imag, mult))
    rows.sort()
    nonreal.sort()
    res.tables["spectrum"] = (("re", "im", "mult"), rows)
    res.tables["spectrum_nonreal"] = (("re", "im", "mult"), nonreal)
    bound = st.spec.sup_norm() + 1e-8
    worst = float(np.max(np.abs(vals.imag))) if vals.size else 0.0
    res.checks["numerical_range"] = "pass" if worst <= bound else "fail"
    res.report = {"n_eigenvalues": int(vals.size), "n_in_discs": len(rows), "n_nonreal": len(nonreal),
                  "max_abs_imag": worst, "numerical_range_bound": bound, "radius": radius}
    res.plot = {"z_points": [[r[0], r[1]] for r in rows],
                "boundaries": {f"disc_{s:+d}": [_c(s * st.params.mass + radius * np.exp(1j * t))
                                                for t in np.linspace(0, 2 * np.pi, 129)]
                               for s in _list(sp.get("thresholds"), (1, -1))}}
    return res


def _sector_polyline(sec: KSector, n: int = 64) -> list:
    th = np.linspace(sec.theta_min, sec.theta_max, n)
    outer = sec.r_max * np.exp(1j * th)
    inner = sec.r_min * np.exp(1j * th[::-1])
    ring = np.concatenate([outer, inner, outer[:1]])
    return ring


def _zero_rows(zeros) -> list:
    return [(r.k.real, r.k.imag, r.z.real, r.z.imag, r.multiplicity, r.residual) for r in zeros]


ZERO_HEADER = ("k_re", "k_im", "z_re", "z_im", "mult", "residual")


def run_zeros(st: Setting, tol: float | None = None, seed: int = 0) -> RunResult:
    """Argument-principle zero search of the regularized determinant on the configured regions."""
    se = st.raw.get("search") or {}
    tol = float(se.get("tol", 1e-8)) if tol is None else tol
    kw = dict(q=float(se.get("q", 1)), backend=se.get("backend", "kernel"), pad=int(se.get("pad", 0)),
              w_max=int(se.get("w_max", 4)), remove_free_poles=bool(se.get("remove_free_poles", False)))
    if kw["backend"] not in ("kernel", "matrix"):
        raise ConfigError("search.backend must be kernel or matrix")
    inner = float(se.get("inner", 1e-3 * st.kdom.eps_k))
    region = se.get("region")
    res = RunResult()
    rows, unresolved, bounds_k, bounds_z = [], [], {}, {}
    all_zeros = []
    for s in _list(se.get("sign_m"), (1,)):
        for hp in _list(se.get("half_plane"), (1, -1)):
            if region is None:
                sec = domain_sector(hp, st.kdom.eps_k, inner)
            else:
                try:
                    r_min, r_max = float(region["r_min"]), float(region["r_max"])
                    t0, t1 = float(region["theta_min"]), float(region["theta_max"])
                except (KeyError, TypeError) as exc:
                    raise ConfigError("search.region needs r_min, r_max, theta_min, theta_max") from exc
                sec = KSector(r_min, r_max, t0, t1) if hp > 0 else KSector(r_min, r_max, -t1, -t0)
            zs = find_zeros(sec, st.spec, st.trunc, st.params, s, tol, **kw)
            all_zeros.extend(zs)
            rows.extend(_zero_rows(zs))
            unresolved.extend({"sign_m": s, "half_plane": hp, "box": [float(b) for b in box[1]],
                               "coords": box[0]} for box in zs.unresolved)
            ring = _sector_polyline(sec)
            tag = f"m{s:+d}_hp{hp:+d}"
            bounds_k[tag] = [_c(k) for k in ring]
            bounds_z[tag] = [_c(z) for z in z_of_k(ring, s, st.params.mass)]
    res.tables["zeros"] = (ZERO_HEADER, rows)
    viol = numerical_range_violations(all_zeros, st.spec)
    res.checks["numerical_range"] = "pass" if not viol else "fail"
    res.checks["resolved"] = "inconclusive" if unresolved else "pass"
    res.report = {"n_zeros": len(rows), "total_multiplicity": int(sum(r[4] for r in rows)),
                  "unresolved": unresolved, "tol": tol}
    res.plot = {"k_points": [[r[0], r[1]] for r in rows], "z_points": [[r[2], r[3]] for r in rows],
                "k_boundaries": bounds_k, "z_boundaries": bounds_z}
    return res


def run_toeplitz(st: Setting, tol: float | None = None, seed: int = 0) -> RunResult:
    """Eigenvalues of the LLL Toeplitz operator of the transverse profile and the gap radii."""
    tp = st.raw.get("toeplitz") or {}
    sign_m = int(tp.get("sign_m", 1))
    nu_gap = float(tp.get("nu_gap", st.kdom.nu_gap))
    prof = vm_profile(st.spec, sign_m, use_abs_w=bool(tp.get("use_abs_w", True)))
    basis = st.trunc.landau_basis(st.params.b0).lll()
    mu = np.sort(np.linalg.eigvalsh(toeplitz_matrix(prof, basis)))[::-1]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        tsp = gap_radii(mu, nu_gap)
    closed = None
    w = st.spec.w_perp
    if getattr(w, "kind", None) == "gaussian":
        closed = prof.factor * gaussian_toeplitz_eigenvalues(st.params.b0, w.c, mu.size)
    header = ("index", "mu", "r_ell") + (("closed_form",) if closed is not None else ())
    rows = []
    for i, m in enumerate(mu):
        r = float(tsp.radii[i]) if i < tsp.radii.size else ""
        rows.append((i, float(m), r) + ((float(closed[i]),) if closed is not None else ()))
    res = RunResult()
    res.tables["toeplitz"] = (header, rows)
    res.report = {"n_states": int(mu.size), "radii": tsp.radii.tolist(), "nu_gap": nu_gap,
                  "profile_factor": float(prof.factor)}
    if closed is not None:
        err = float(np.max(np.abs(mu - closed) / np.abs(closed)))
        res.report["closed_form_rel_err"] = err
        res.checks["closed_form"] = "pass" if err < 1e-8 else "fail"
    res.plot = {"mu": mu.tolist(), "radii": tsp.radii.tolist()}
    return res


def _checks_cfg(st: Setting):
    ck = st.raw.get("checks") or {}
    se = st.raw.get("search") or {}
    return ck, se


def run_sector_check(st: Setting, tol: float | None = None, seed: int = 0) -> RunResult:
    """Cone emptiness at half the bisected coupling threshold."""
    ck, se = _checks_cfg(st)
    tol = float(se.get("tol", 1e-8)) if tol is None else tol
    eps_max = ck.get("eps_max")
    rep = thm23_check(st.spec, st.trunc, st.params, delta=float(ck.get("delta", 0.2)),
                      sign_m=int(ck.get("sign_m", 1)), kdom=st.kdom,
                      eps_max=None if eps_max is None else float(eps_max),
                      n_bisect=int(ck.get("n_bisect", 4)), tol=tol)
    res = RunResult()
    res.tables["zeros"] = (ZERO_HEADER, _zero_rows(rep.zeros))
    res.report = {"eps0": rep.eps0, "eps_checked": rep.eps_checked, "count": rep.count,
                  "flagged_boundary": [_c(z.k) for z in rep.flagged],
                  "history": [list(h) for h in rep.history]}
    res.checks["sector_empty"] = "inconclusive" if rep.inconclusive else ("pass" if rep.passed else "fail")
    res.plot = {"k_points": [_c(z.k) for z in rep.zeros], "z_points": [_c(z.z) for z in rep.zeros]}
    return res


def run_cluster_check(st: Setting, tol: float | None = None, seed: int = 0) -> RunResult:
    """Per-band zero counts against the Toeplitz counts and the angular position of the cloud."""
    ck, se = _checks_cfg(st)
    tol = float(se.get("tol", 1e-8)) if tol is None else tol
    out = thm24_check(st.spec, st.trunc, st.params, delta=float(ck.get("delta", 0.2)),
                      ell_max=int(ck.get("ell_max", 2)), sign_m=int(ck.get("sign_m", 1)), kdom=st.kdom, tol=tol)
    res = RunResult()
    res.tables["bands"] = (("ell", "r_hi", "r_lo", "count", "toeplitz_count", "holds"),
                           [(r.ell, r.r_hi, r.r_lo, r.count, r.toeplitz_count, int(r.holds)) for r in out["rows"]])
    zs = out["zeros"]
    res.tables["zeros"] = (ZERO_HEADER, _zero_rows(zs))
    inconclusive = bool(getattr(zs, "unresolved", [])) or not out["rows"]
    res.report = {"radii": np.asarray(out["radii"]).tolist(), "axis_angle": out["axis_angle"],
                  "median_offset": out["median_offset"], "angle_ok": out["angle_ok"]}
    res.checks["bands"] = "inconclusive" if inconclusive else ("pass" if all(r.holds for r in out["rows"]) else "fail")
    res.checks["angle"] = "pass" if out["angle_ok"] else ("inconclusive" if not len(zs) else "fail")
    res.plot = {"k_points": [_c(z.k) for z in zs], "z_points": [_c(z.z) for z in zs]}
    return res


def _bounds_points(st: Setting, bd: dict, seed: int) -> list:
    m, eta = st.params.mass, st.kdom.eta
    if bd.get("z_points") is not None:
        return [_complex(p, "z point") for p in bd["z_points"]]
    n_rand = int(bd.get("random_points", 0))
    if n_rand:
        rng = np.random.default_rng(seed)
        r = eta * rng.uniform(0.1, 0.9, n_rand)
        t = rng.uniform(0.05, np.pi - 0.05, n_rand) * rng.choice([-1, 1], n_rand)
        return list(m + r * np.exp(1j * t))
    t = np.linspace(0.1, np.pi - 0.1, 10)
    return list(m + 0.5 * eta * np.exp(1j * t))


def run_bounds(st: Setting, tol: float | None = None, seed: int = 0) -> RunResult:
    """Weighted-resolvent Schatten norms against their majorants on a z-grid."""
    bd = st.raw.get("bounds") or {}
    q, tau, qQ = float(bd.get("q", 2.0)), float(bd.get("tau", 1.0)), float(bd.get("q_Q", 4.0))
    cols = ("z_re", "z_im", "lhs_P", "M_value", "U_Lq", "ratio_P", "lhs_Q", "M_tilde_value", "ratio_Q")
    rows = []
    for z in _bounds_points(st, bd, seed):
        if abs(z.imag) == 0:
            raise ConfigError("bounds z points must be non-real")
        d = schatten_diagnostics(complex(z), st.spec, st.trunc, st.params, q=q, tau=tau, q_Q=qQ)
        rows.append(tuple([z.real, z.imag] + [float(d[c]) for c in cols[2:]]))
    arr = np.array([r[2:] for r in rows], dtype=float)
    finite = bool(np.all(np.isfinite(arr)))
    res = RunResult()
    res.tables["bounds"] = (cols, rows)
    res.report = {"C_P": float(np.max(arr[:, 3])), "C_Q": float(np.max(arr[:, 6])), "n_points": len(rows)}
    res.checks["finite_constants"] = "pass" if finite else "fail"
    res.plot = {"z_points": [[r[0], r[1]] for r in rows]}
    return res


COMMANDS = {
    "spectrum": run_spectrum,
    "zeros": run_zeros,
    "toeplitz": run_toeplitz,
    "sector-check": run_sector_check,
    "cluster-check": run_cluster_check,
    "bounds": run_bounds,
}

__all__ = ["ConfigError", "Setting", "RunResult", "build_setting", "COMMANDS"]
