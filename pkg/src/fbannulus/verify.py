"""Invariant suites driven by ``fbannulus verify``.

Each check returns ``(passed, detail)``; ``detail`` must be JSON-serializable
and free of timing data so that reports are reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import capmetric, degree, jacobi, oracles, rotprofile, spectrum
from .config import Config


@dataclass
class Context:
    config: Config
    t0_offset: float = 0.0


@dataclass(frozen=True)
class Check:
    name: str
    suite: str
    fn: Callable[[Context], tuple[bool, dict]]


def check_constants(ctx: Context):
    c = rotprofile.critical_constants()
    t0 = c.t0 + ctx.t0_offset
    r0 = t0 * math.cosh(t0)
    oracle = oracles.t0_by_bisection()
    res = abs(t0 - 1.0 / math.tanh(t0))
    ok = res < 1e-12 and 1.19 < t0 < 1.21 and r0 > t0 > 1 and abs(t0 - oracle) < 1e-12
    return ok, {"t0": t0, "r0": r0, "residual": res, "oracle_gap": abs(t0 - oracle)}


def check_metric(ctx: Context):
    pts = capmetric.sample_ball(n_radii=5, n_dirs=25, r_max=0.95)[:100]
    worst = 0.0
    for t in (0.2, 0.5, 0.8):
        for x in pts:
            worst = max(worst, float(np.max(np.abs(capmetric.ricci_at(t, x) - 2 * t * t * capmetric.metric_at(t, x)))))
    return worst < 1e-6, {"max_ricci_error": worst, "points": len(pts)}


def check_riccati(ctx: Context):
    rb = jacobi.riccati_bound_check()
    return rb.margin > 0.4, {"bound": rb.bound, "inv_t0": rb.inv_t0, "margin": rb.margin}


def check_modes(ctx: Context):
    flags = {n: jacobi.mode_report(n)["kernel_flag"] for n in range(-8, 9)}
    kernel_modes = sorted(n for n, f in flags.items() if f)
    ode = jacobi.ode_residual(jacobi.kernel_profile, 1, jacobi.mode_grid(1))
    robin = jacobi.robin_residual(jacobi.kernel_profile)
    ok = kernel_modes == [-1, 1] and ode < 1e-8 and robin < 1e-10
    return ok, {"kernel_modes": kernel_modes, "ode_residual": ode, "robin_residual": robin}


def check_catenoid_t0(ctx: Context):
    sol = rotprofile.solve_critical_catenoid(0.0, tol=ctx.config.newton_tol, step=ctx.config.ode_step)
    r0 = rotprofile.critical_constants().r0
    ok = abs(sol.a - r0) < 1e-8 and abs(sol.b) < 1e-8 and max(abs(sol.theta_plus), abs(sol.theta_minus)) < 1e-10
    return ok, {"a": sol.a, "b": sol.b, "a_minus_r0": sol.a - r0, "max_abs_h": sol.max_mean_curvature}


def check_degree_arithmetic(ctx: Context):
    ok = all(
        degree.family_contribution(i, m) == (-1) ** i * degree.EULER[m] for i in range(6) for m in degree.EULER
    )
    totals = {
        "disk": [degree.assemble_degree("disk", {"disk": i}).total for i in range(4)],
        "annulus": [degree.assemble_degree("annulus", {"catenoid": i}).total for i in range(4)],
        "other": degree.assemble_degree("other").total,
    }
    ok = ok and all(abs(v) == 2 for v in totals["disk"] + totals["annulus"]) and totals["other"] == 0
    return ok, totals


def check_kernels(ctx: Context):
    worst = {}
    for kind, basis in jacobi.kernel_bases().items():
        op_h = jacobi.disk_jacobi_h if kind == "disk" else jacobi.cat_jacobi_h
        errs = []
        for f in basis:
            phi = jacobi.SurfaceFunction.sample(kind, f, 256, 16)
            th = jacobi.disk_jacobi_theta(phi) if kind == "disk" else np.concatenate(jacobi.cat_jacobi_theta(phi))
            errs.append(max(float(np.max(np.abs(op_h(phi, order=4).values))), float(np.max(np.abs(th)))))
        worst[kind] = max(errs)
    return all(v < 1e-4 for v in worst.values()), worst


def _spectrum_check(surface):
    def run(ctx: Context):
        rep = spectrum.nullity_and_index(surface, ctx.config.spectrum_levels, ctx.config.zero_tol)
        ok = rep.nullity == 2 and rep.stable and all(c > 0.999 for c in rep.correlations)
        return ok, {"nullity": rep.nullity, "index": rep.index, "stable": rep.stable}

    return run


def check_sweep(ctx: Context):
    ts = np.linspace(ctx.config.sweep_t_min, ctx.config.sweep_t_max, ctx.config.sweep_steps)
    rows = rotprofile.sweep(ts, tol=ctx.config.newton_tol, step=ctx.config.ode_step)
    ok = all(r.ok for r in rows) and all(abs(r.b) < 1e-8 for r in rows)
    return ok, {"rows": len(rows), "a": [r.a for r in rows]}


def _test_fields():
    return [
        capmetric.AmbientScalar(lambda X: np.sin(X[..., 0] + 2 * X[..., 2]) + X[..., 1] ** 2, name="trig"),
        capmetric.AmbientScalar(lambda X: np.exp(0.5 * X[..., 2]) * (1 + X[..., 0]), name="exp"),
        capmetric.AmbientScalar(lambda X: X[..., 2] * (1 + X[..., 0] ** 2) + X[..., 1] * X[..., 2] ** 2, name="poly"),
    ]


def check_conformal(ctx: Context):
    worst = 0.0
    for kind in jacobi.SURFACES:
        for f in _test_fields():
            ex = jacobi.conformal_h_variation(kind, f).values
            fd = jacobi.conformal_h_fd(kind, f, 5e-3).values
            m = ~np.isnan(fd)
            worst = max(worst, float(np.max(np.abs(fd[m] - ex[m])) / np.max(np.abs(ex[m]))))
    return worst < 1e-3, {"max_rel_error": worst}


def check_normal_perturbation(ctx: Context):
    worst, kernel = 0.0, 0.0
    for kind, basis in jacobi.kernel_bases().items():
        phi = jacobi.SurfaceFunction.sample(kind, lambda c, th: 1.0 + 0 * c, 64, 32)
        rep = jacobi.normal_perturbation_fd_check(phi)
        worst = max(worst, rep.error_h / max(1.0, float(np.max(np.abs(rep.jh_formula)))))
        for f in basis:
            rep = jacobi.normal_perturbation_fd_check(jacobi.SurfaceFunction.sample(kind, f, 64, 32))
            kernel = max(kernel, float(np.max(np.abs(rep.jh_fd))))
    return worst < 1e-3 and kernel < 1e-4, {"constant_rel_error": worst, "kernel_fd": kernel}


def check_morse(ctx: Context):
    n = ctx.config.morse_trials
    values = {m: degree.morse_euler_oracle(m, n, ctx.config.seed) for m in ("S2", "RP2")}
    return values == {"S2": 2, "RP2": 1}, values


def check_semicontinuity(ctx: Context):
    rows = spectrum.semicontinuity_probe(ctx.config.probe_t)
    counts = {str(r.t): r.near_zero for r in rows}
    return all(r.ok for r in rows), counts


CHECKS = [
    Check("constants", "fast", check_constants),
    Check("metric", "fast", check_metric),
    Check("riccati", "fast", check_riccati),
    Check("modes", "fast", check_modes),
    Check("kernels", "fast", check_kernels),
    Check("catenoid_t0", "fast", check_catenoid_t0),
    Check("degree_arithmetic", "fast", check_degree_arithmetic),
    Check("spectrum_disk", "all", _spectrum_check("disk")),
    Check("spectrum_catenoid", "all", _spectrum_check("catenoid")),
    Check("sweep", "all", check_sweep),
    Check("conformal", "all", check_conformal),
    Check("normal_perturbation", "all", check_normal_perturbation),
    Check("morse", "all", check_morse),
    Check("semicontinuity", "all", check_semicontinuity),
]


def run_suite(suite: str, ctx: Context) -> list[dict]:
    if suite not in ("fast", "all"):
        raise ValueError(f"unknown suite {suite!r}")
    results = []
    for chk in CHECKS:
        if suite == "fast" and chk.suite != "fast":
            continue
        try:
            ok, detail = chk.fn(ctx)
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
        results.append({"name": chk.name, "passed": bool(ok), "detail": detail})
    return results
