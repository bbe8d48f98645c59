"""Command-line entry point: ``fbannulus <command> [options]``.

Exit codes: 0 success, 1 failed verification, 2 usage error, 3 numerical
non-convergence, 4 inconclusive spectral report.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, degree, jacobi, rotprofile, spectrum, verify
from .capmetric import DomainError
from .config import Config, ConfigError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NONCONVERGENCE, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    params: dict
    version: str = __version__
    wall_time: float = 0.0
    outputs: list[str] = field(default_factory=list)
    digest: str = ""

    def seal(self, paths: list[Path]):
        """Record output paths and a sha256 over their bytes, in order."""
        h = hashlib.sha256()
        for p in paths:
            h.update(p.name.encode())
            h.update(p.read_bytes())
        self.outputs = [str(p) for p in paths]
        self.digest = h.hexdigest()


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _clean(obj):
    # JSON has no NaN; failed rows carry null instead
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def write_json(path: Path, data) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_clean(json.loads(json.dumps(data, default=_json_default))), indent=2, sort_keys=True)
    path.write_text(text + "\n")
    return path


def write_csv(path: Path, header: list[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    path.write_text(buf.getvalue(), newline="")
    return path


def _fmt_t(t: float) -> str:
    return f"{t:+.4f}".replace("+", "p").replace("-", "m").replace(".", "_")


# --- commands -------------------------------------------------------------------


def cmd_constants(args, cfg: Config):
    c = rotprofile.critical_constants()
    rb = jacobi.riccati_bound_check()
    data = {
        "t0": c.t0,
        "r0": c.r0,
        "coth_residual": c.residual,
        "margin": rb.margin,
        "flags": {"r0_gt_t0": c.r0 > c.t0, "t0_gt_1": c.t0 > 1.0, "margin_positive": rb.margin > 0},
    }
    print(json.dumps(data, indent=2))
    return [write_json(Path(cfg.output_dir) / "constants.json", data)], EXIT_OK


def cmd_catenoid(args, cfg: Config):
    try:
        sol = rotprofile.solve_critical_catenoid(args.t, tol=cfg.newton_tol, step=cfg.ode_step)
    except (rotprofile.ConvergenceError, rotprofile.IntegrationError, DomainError) as exc:
        diag = {"error": str(exc), "t": args.t, "history": getattr(exc, "history", [])}
        print(json.dumps(_clean(diag), default=_json_default), file=sys.stderr)
        return [], EXIT_NONCONVERGENCE
    every = max(1, len(sol.profile.s) // 200)
    samples = sol.profile.samples[::every]
    summary = {
        "t": sol.t,
        "a": sol.a,
        "b": sol.b,
        "theta_plus": sol.theta_plus,
        "theta_minus": sol.theta_minus,
        "iters": sol.iterations,
        "max_abs_h": sol.max_mean_curvature,
    }
    base = Path(args.out) if args.out else Path(cfg.output_dir) / f"catenoid_{_fmt_t(args.t)}.{args.format}"
    if args.format == "json":
        paths = [write_json(base, {**summary, "profile": samples.tolist()})]
    else:
        paths = [
            write_csv(base, list(summary), [list(summary.values())]),
            write_csv(base.with_name(base.stem + "_profile.csv"), ["s", "rho", "drho"], samples.tolist()),
        ]
    print(json.dumps(summary))
    return paths, EXIT_OK


def cmd_sweep(args, cfg: Config):
    t_min = cfg.sweep_t_min if args.t_min is None else args.t_min
    t_max = cfg.sweep_t_max if args.t_max is None else args.t_max
    steps = cfg.sweep_steps if args.steps is None else args.steps
    if steps < 1 or t_min > t_max or (steps > 1 and t_min == t_max):
        raise UsageError("empty sweep range")
    ts = np.linspace(t_min, t_max, steps)
    rows = rotprofile.sweep(ts, tol=cfg.newton_tol, step=cfg.ode_step)
    header = ["t", "a", "b", "theta_plus", "theta_minus", "iters", "ok", "error"]
    path = write_csv(
        Path(args.out) if args.out else Path(cfg.output_dir) / "sweep.csv",
        header,
        [[r.t, r.a, r.b, r.theta_plus, r.theta_minus, r.iters, int(r.ok), r.error] for r in rows],
    )
    failed = sum(not r.ok for r in rows)
    print(f"{len(rows)} rows, {failed} failed")
    return [path], EXIT_NONCONVERGENCE if failed else EXIT_OK


def _spectrum_paths(cfg: Config, surface: str) -> tuple[Path, Path]:
    out = Path(cfg.output_dir)
    return out / f"spectrum_{surface}.json", out / f"spectrum_{surface}_refinement.csv"


def cmd_spectrum(args, cfg: Config):
    rep = spectrum.nullity_and_index(args.surface, cfg.spectrum_levels, cfg.zero_tol)
    jpath, cpath = _spectrum_paths(cfg, args.surface)
    paths = [
        write_json(jpath, rep.to_dict()),
        write_csv(
            cpath,
            ["grid_size", "nullity", "index", "smallest_abs", "zero_tol", "n_max"],
            [list(asdict(r).values()) for r in rep.refinement],
        ),
    ]
    print(f"{args.surface}: nullity {rep.nullity}, index {rep.index}, stable {rep.stable}")
    return paths, EXIT_INCONCLUSIVE if rep.inconclusive else EXIT_OK


def cmd_degree(args, cfg: Config):
    reports = {}
    if args.topology != "other":
        surface = "disk" if args.topology == "disk" else "catenoid"
        jpath, _ = _spectrum_paths(cfg, surface)
        if jpath.exists():
            data = json.loads(jpath.read_text())
            if data.get("inconclusive"):
                print(f"stored {surface} report is inconclusive", file=sys.stderr)
                return [], EXIT_INCONCLUSIVE
            reports[surface] = int(data["index"])
        else:
            rep = spectrum.nullity_and_index(surface, cfg.spectrum_levels, cfg.zero_tol)
            if rep.inconclusive:
                return [], EXIT_INCONCLUSIVE
            reports[surface] = rep.index
    ledger = degree.assemble_degree(args.topology, reports)
    path = write_json(Path(cfg.output_dir) / f"degree_{args.topology}.json", ledger.to_dict())
    print(f"{args.topology}: degree {ledger.total}")
    return [path], EXIT_OK


def cmd_verify(args, cfg: Config):
    ctx = verify.Context(cfg, t0_offset=args.inject_t0_offset)
    results = verify.run_suite(args.suite, ctx)
    for r in results:
        print(f"{'PASS' if r['passed'] else 'FAIL'} {r['name']}")
    data = {"suite": args.suite, "passed": all(r["passed"] for r in results), "checks": results}
    path = write_json(Path(cfg.output_dir) / f"verify_{args.suite}.json", data)
    return [path], EXIT_OK if data["passed"] else EXIT_FAIL


COMMANDS = {
    "constants": cmd_constants,
    "catenoid": cmd_catenoid,
    "sweep": cmd_sweep,
    "spectrum": cmd_spectrum,
    "degree": cmd_degree,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fbannulus", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("constants", help="t0, r0 and the Riccati margin")
    c = sub.add_parser("catenoid", help="critical catenoid in g_t")
    c.add_argument("--t", type=float, required=True)
    c.add_argument("--format", choices=("json", "csv"), default="json")
    c.add_argument("--out")
    s = sub.add_parser("sweep", help="continuation in t")
    s.add_argument("--t-min", type=float)
    s.add_argument("--t-max", type=float)
    s.add_argument("--steps", type=int)
    s.add_argument("--out")
    sp = sub.add_parser("spectrum", help="nullity and index with refinement table")
    sp.add_argument("--surface", choices=("disk", "catenoid"), required=True)
    d = sub.add_parser("degree", help="degree ledger for a topology")
    d.add_argument("--topology", choices=degree.TOPOLOGIES, required=True)
    v = sub.add_parser("verify", help="run invariant suites")
    v.add_argument("--suite", choices=("all", "fast"), default="fast")
    v.add_argument("--inject-t0-offset", type=float, default=0.0, help="mutation check: shift t0")
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = Config.load(args.config)
    except (ConfigError, OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    params = {k: v for k, v in vars(args).items() if k != "config"}
    params["config"] = cfg.to_dict()
    manifest = RunManifest(args.command, params)
    start = time.perf_counter()
    try:
        paths, code = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    manifest.wall_time = time.perf_counter() - start
    manifest.seal(paths)
    write_json(Path(cfg.output_dir) / f"manifest_{args.command}.json", asdict(manifest))
    return code


if __name__ == "__main__":
    sys.exit(main())
