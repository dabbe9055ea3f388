"""Command-line front end.

Exit codes: 0 pass, 1 configuration error, 2 numerically inconclusive, 3 assertion failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from . import __version__

EXIT_OK, EXIT_CONFIG, EXIT_INCONCLUSIVE, EXIT_ASSERT = 0, 1, 2, 3
COMMAND_NAMES = ("spectrum", "zeros", "toeplitz", "sector-check", "cluster-check", "bounds")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dirac-threshold", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMAND_NAMES)
    p.add_argument("--config", type=Path, required=True, help="YAML or JSON configuration")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--threads", type=int, default=None, help="BLAS threads")
    p.add_argument("--tol", type=float, default=None, help="zero-search tolerance override")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized presets")
    return p


def load_config(path: Path) -> dict:
    text = Path(path).read_text()
    cfg = json.loads(text) if Path(path).suffix == ".json" else yaml.safe_load(text)
    return {} if cfg is None else cfg


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def write_json(path: Path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not serializable: {type(o).__name__}")


@dataclass
class RunManifest:
    command: str
    version: str
    config: dict
    seed: int
    threads: int | None
    tolerances: dict
    truncation: dict
    outputs: dict  # file name -> sha256
    checks: dict
    exit_code: int
    timings: dict = field(default_factory=dict)

    def run_hash(self) -> str:
        """Hash of everything except timings."""
        body = {k: v for k, v in asdict(self).items() if k != "timings"}
        return hashlib.sha256(json.dumps(body, sort_keys=True, default=_jsonable).encode()).hexdigest()

    def write(self, path: Path) -> None:
        write_json(path, dict(asdict(self), run_hash=self.run_hash()))


def execute(command: str, config, out: Path, threads: int | None = None, tol: float | None = None,
            seed: int = 0) -> int:
    """Run one command on a config mapping or file and write its outputs; returns the exit code."""
    if threads is not None:
        # effective only before the numerical libraries are loaded
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(threads)
    from .core import AssumptionError
    from .runs import COMMANDS, ConfigError, build_setting

    t0 = time.perf_counter()
    try:
        cfg = config if isinstance(config, dict) else load_config(config)
        setting = build_setting(cfg)
    except (OSError, yaml.YAMLError, json.JSONDecodeError, ConfigError, AssumptionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    t1 = time.perf_counter()
    try:
        result = COMMANDS[command](setting, tol=tol, seed=seed)
    except (ConfigError, AssumptionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    t2 = time.perf_counter()

    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for name, (header, rows) in result.tables.items():
        write_csv(out / f"{name}.csv", header, rows)
        files.append(f"{name}.csv")
    write_json(out / "report.json", result.report)
    write_json(out / "plot_data.json", result.plot)
    files += ["report.json", "plot_data.json"]
    trunc = setting.trunc
    RunManifest(
        command=command, version=__version__, config=cfg, seed=seed, threads=threads, tolerances={"tol": tol},
        truncation={"n_levels": trunc.n_levels, "M": trunc.M, "L": trunc.grid.L, "N": trunc.grid.N, "dim": trunc.dim},
        outputs={f: sha256(out / f) for f in sorted(files)}, checks=result.checks, exit_code=result.status,
        timings={"setup_s": t1 - t0, "run_s": t2 - t1},
    ).write(out / "manifest.json")

    for name, verdict in result.checks.items():
        print(f"{name}: {verdict}")
    if result.status == EXIT_INCONCLUSIVE and result.report.get("unresolved"):
        print("unresolved regions:", file=sys.stderr)
        for reg in result.report["unresolved"]:
            print(f"  {reg}", file=sys.stderr)
    return result.status


def cmd_spectrum(config, out, **kw) -> int:
    return execute("spectrum", config, out, **kw)


def cmd_zeros(config, out, **kw) -> int:
    return execute("zeros", config, out, **kw)


def cmd_toeplitz(config, out, **kw) -> int:
    return execute("toeplitz", config, out, **kw)


def cmd_sector_check(config, out, **kw) -> int:
    return execute("sector-check", config, out, **kw)


def cmd_cluster_check(config, out, **kw) -> int:
    return execute("cluster-check", config, out, **kw)


def cmd_bounds(config, out, **kw) -> int:
    return execute("bounds", config, out, **kw)


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    return execute(args.command, args.config, args.out, args.threads, args.tol, args.seed)


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
