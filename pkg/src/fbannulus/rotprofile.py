"""Rotationally symmetric minimal surfaces in the cap metrics.

Surfaces of revolution about the x3 axis are written as graphs
``rho = rho(s)`` over the axial coordinate ``s = x3``. In g_t the rotational
area of such a surface is ``2 pi * int rho sqrt(Q) ds`` with::

    Q = 1 + rho'^2 + c (s + rho rho')^2,   c = t^2 / (1 - t^2 (rho^2 + s^2))

so minimal profiles are the geodesics of ``rho^2 h`` where ``h`` is g_t
restricted to the half-plane {x2 = 0}. Writing the geodesic equation as a graph
and using the closed form Christoffels ``t^2 x_k g_ij`` of g_t gives::

    rho'' = Q * (1/rho - 2 t^2 (rho - s rho'))

which reduces to the catenary equation rho rho'' = 1 + rho'^2 at t = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .capmetric import DomainError, metric_at
from .geometry import CapMetric, mean_curvature

ODE_STEP = 1e-4
NEWTON_TOL = 1e-10
SOLVER_RANGE = 0.35


class IntegrationError(RuntimeError):
    def __init__(self, message: str, last_state: tuple[float, float, float]):
        super().__init__(message)
        self.last_state = last_state


class NoExitError(IntegrationError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, history: list[dict]):
        super().__init__(message)
        self.history = history


@dataclass(frozen=True)
class CriticalConstants:
    t0: float
    r0: float

    @property
    def residual(self) -> float:
        return abs(self.t0 - 1.0 / math.tanh(self.t0))


def solve_t0(tol: float = 1e-15) -> CriticalConstants:
    """Positive root of t = coth t, by bisection on [1, 2] and a Newton polish."""

    def f(t):
        return t - 1.0 / math.tanh(t)

    lo, hi = 1.0, 2.0
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    for _ in range(8):
        # f'(t) = 1 + 1/sinh^2 t
        step = f(t) / (1.0 + 1.0 / math.sinh(t) ** 2)
        t -= step
        if abs(step) < tol:
            break
    return CriticalConstants(t0=t, r0=t * math.cosh(t))


_CONSTANTS: Optional[CriticalConstants] = None


def critical_constants() -> CriticalConstants:
    global _CONSTANTS
    if _CONSTANTS is None:
        _CONSTANTS = solve_t0()
    return _CONSTANTS


def euclid_catenoid(a: float, b: float, s):
    """Catenary profile a^{-1} cosh(a s + b) and its derivative."""
    if a <= 0:
        raise ValueError("scale parameter a must be positive")
    arg = a * np.asarray(s, dtype=float) + b
    return np.cosh(arg) / a, np.sinh(arg)


def profile_rhs(t: float, s: float, rho: float, p: float) -> float:
    """rho'' for a minimal surface of revolution in g_t (scalar, hot path)."""
    t2 = t * t
    c = t2 / (1.0 - t2 * (rho * rho + s * s))
    w = s + rho * p
    q = 1.0 + p * p + c * w * w
    return q * (1.0 / rho - 2.0 * t2 * (rho - p * s))


def profile_rhs_array(t: float, s, rho, p) -> np.ndarray:
    t2 = t * t
    s, rho, p = (np.asarray(v, dtype=float) for v in (s, rho, p))
    c = t2 / (1.0 - t2 * (rho * rho + s * s))
    q = 1.0 + p * p + c * (s + rho * p) ** 2
    return q * (1.0 / rho - 2.0 * t2 * (rho - p * s))


def _rk4(t, s, y, p, h):
    f = profile_rhs
    k1y, k1p = p, f(t, s, y, p)
    h2 = 0.5 * h
    k2y, k2p = p + h2 * k1p, f(t, s + h2, y + h2 * k1y, p + h2 * k1p)
    k3y, k3p = p + h2 * k2p, f(t, s + h2, y + h2 * k2y, p + h2 * k2p)
    k4y, k4p = p + h * k3p, f(t, s + h, y + h * k3y, p + h * k3p)
    return (
        y + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y),
        p + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p),
    )


def _integrate_to_exit(t, s0, y0, p0, step, direction, max_length=4.0):
    """March with fixed RK4 steps until |(rho, s)| = 1, localized by bisection."""
    h = direction * step
    s, y, p = s0, y0, p0
    ss, ys, ps = [s], [y], [p]
    n_max = int(max_length / step) + 1
    for _ in range(n_max):
        y1, p1 = _rk4(t, s, y, p, h)
        s1 = s + h
        if not (y1 > 0.0 and math.isfinite(y1) and math.isfinite(p1)):
            raise IntegrationError("profile left the half-plane rho > 0", (s, y, p))
        if s1 * s1 + y1 * y1 >= 1.0:
            lo, hi = 0.0, 1.0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                ym, _ = _rk4(t, s, y, p, mid * h)
                sm = s + mid * h
                if sm * sm + ym * ym >= 1.0:
                    hi = mid
                else:
                    lo = mid
                if hi - lo < 1e-16:
                    break
            frac = 0.5 * (lo + hi)
            ye, pe = _rk4(t, s, y, p, frac * h)
            ss.append(s + frac * h)
            ys.append(ye)
            ps.append(pe)
            return ss, ys, ps
        s, y, p = s1, y1, p1
        ss.append(s)
        ys.append(y)
        ps.append(p)
    raise NoExitError("profile did not leave the unit ball", (s, y, p))


@dataclass
class Profile:
    a: float
    b: float
    t: float
    s: np.ndarray
    rho: np.ndarray
    drho: np.ndarray
    step: float = ODE_STEP

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.s[0]), float(self.s[-1])

    @property
    def ddrho(self) -> np.ndarray:
        return profile_rhs_array(self.t, self.s, self.rho, self.drho)

    @property
    def samples(self) -> np.ndarray:
        return np.column_stack([self.s, self.rho, self.drho])


def minimal_profile_ode(t: float, a: float, b: float, step: float = ODE_STEP) -> Profile:
    """Integrate the minimal-profile ODE in g_t from the apex ``s = -b/a``.

    The apex data are rho = 1/a and rho' = 0. Integration runs in both directions
    until the revolution surface meets the unit sphere.
    """
    if a <= 0:
        raise ValueError("scale parameter a must be positive")
    if not abs(t) < 1:
        raise DomainError(f"|t| < 1 required, got {t}")
    s0, y0 = -b / a, 1.0 / a
    if s0 * s0 + y0 * y0 >= 1.0:
        raise NoExitError("apex lies outside the unit ball", (s0, y0, 0.0))
    fs, fy, fp = _integrate_to_exit(t, s0, y0, 0.0, step, +1)
    bs, by, bp = _integrate_to_exit(t, s0, y0, 0.0, step, -1)
    s = np.array(bs[:0:-1] + fs)
    rho = np.array(by[:0:-1] + fy)
    drho = np.array(bp[:0:-1] + fp)
    return Profile(a=a, b=b, t=t, s=s, rho=rho, drho=drho, step=step)


def revolution_jets(s, rho, drho, ddrho):
    """Position and partials of (rho cos th, rho sin th, s) at th = 0."""
    s, rho, drho, ddrho = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (s, rho, drho, ddrho)))
    zero = np.zeros_like(s)
    X = np.stack([rho, zero, s], axis=-1)
    Xs = np.stack([drho, zero, np.ones_like(s)], axis=-1)
    Xt = np.stack([zero, rho, zero], axis=-1)
    Xss = np.stack([ddrho, zero, zero], axis=-1)
    Xst = np.stack([zero, drho, zero], axis=-1)
    Xtt = np.stack([-rho, zero, zero], axis=-1)
    return X, Xs, Xt, Xss, Xst, Xtt


def mean_curvature_rot(t: float, s, rho, drho, ddrho):
    """Mean curvature in g_t of the revolution surface of a profile point.

    The normal points away from the axis; H is evaluated with the Christoffel
    symbols of g_t, independently of the profile ODE.
    """
    s = np.asarray(s, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if np.any(rho * rho + s * s > 1.0 + 1e-12):
        raise DomainError("profile point lies outside the unit ball")
    X, Xs, Xt, Xss, Xst, Xtt = revolution_jets(s, rho, drho, ddrho)
    hint = np.zeros_like(X)
    hint[..., 0] = 1.0
    H, _ = mean_curvature(CapMetric(t), X, Xs, Xt, Xss, Xst, Xtt, hint=hint)
    return H


def profile_mean_curvature(profile: Profile) -> np.ndarray:
    return mean_curvature_rot(profile.t, profile.s, profile.rho, profile.drho, profile.ddrho)


def boundary_normal_angle(t: float, s: float, rho: float, drho: float) -> float:
    """g_t(nu, N) at a point of the revolution surface (theta = 0 slice)."""
    x = np.array([rho, 0.0, s])
    g = metric_at(t, x)
    ginv = np.linalg.inv(g)
    omega = np.array([1.0, 0.0, -drho])
    N = ginv @ omega / math.sqrt(omega @ ginv @ omega)
    nu = ginv @ x / math.sqrt(x @ ginv @ x)
    return float(nu @ g @ N)


@dataclass(frozen=True)
class BoundaryHit:
    s_star: float
    rho: float
    drho: float
    theta: float
    side: str

    @property
    def radius(self) -> float:
        return math.hypot(self.s_star, self.rho)


def boundary_hit(t: float, profile: Profile) -> dict[str, BoundaryHit]:
    """Boundary contact data on the upper (s > apex) and lower ends of a profile."""
    out = {}
    for side, idx in (("upper", -1), ("lower", 0)):
        s, rho, p = float(profile.s[idx]), float(profile.rho[idx]), float(profile.drho[idx])
        if abs(math.hypot(s, rho) - 1.0) > 1e-9:
            raise NoExitError(f"profile does not reach the sphere on the {side} side", (s, rho, p))
        out[side] = BoundaryHit(s, rho, p, boundary_normal_angle(t, s, rho, p), side)
    return out


def angle_residuals(t: float, a: float, b: float, step: float = ODE_STEP) -> np.ndarray:
    hits = boundary_hit(t, minimal_profile_ode(t, a, b, step))
    return np.array([hits["upper"].theta, hits["lower"].theta])


@dataclass
class CatenoidSolution:
    t: float
    a: float
    b: float
    profile: Profile
    theta_plus: float
    theta_minus: float
    iterations: int
    history: list[dict] = field(default_factory=list)

    @property
    def max_mean_curvature(self) -> float:
        return float(np.max(np.abs(profile_mean_curvature(self.profile))))


def solve_critical_catenoid(
    t: float,
    guess: tuple[float, float] | None = None,
    tol: float = NEWTON_TOL,
    max_iter: int = 30,
    fd_step: float = 1e-6,
    step: float = ODE_STEP,
    solver_range: float = SOLVER_RANGE,
) -> CatenoidSolution:
    """Damped Newton on the two boundary angles over the apex data (a, b)."""
    if not abs(t) < solver_range:
        raise ConvergenceError(
            f"|t| = {abs(t)} is outside the working range {solver_range}",
            [{"reason": "out_of_range", "t": t}],
        )
    if guess is None:
        guess = (critical_constants().r0, 0.0)
    z = np.array(guess, dtype=float)
    history: list[dict] = []

    def residual(v):
        return angle_residuals(t, v[0], v[1], step)

    F = residual(z)
    for it in range(max_iter + 1):
        history.append({"iter": it, "a": z[0], "b": z[1], "theta_plus": F[0], "theta_minus": F[1]})
        if np.max(np.abs(F)) < tol:
            prof = minimal_profile_ode(t, z[0], z[1], step)
            return CatenoidSolution(t, float(z[0]), float(z[1]), prof, float(F[0]), float(F[1]), it, history)
        if it == max_iter:
            break
        J = np.empty((2, 2))
        for k in range(2):
            e = np.zeros(2)
            e[k] = fd_step
            J[:, k] = (residual(z + e) - residual(z - e)) / (2 * fd_step)
        delta = np.linalg.solve(J, -F)
        lam = 1.0
        for _ in range(9):
            try:
                trial = z + lam * delta
                Ft = residual(trial)
                if np.linalg.norm(Ft) < np.linalg.norm(F) or lam < 1.0 / 256:
                    break
            except IntegrationError:
                pass
            lam *= 0.5
        else:
            raise ConvergenceError("line search failed", history)
        z, F = trial, Ft
    raise ConvergenceError(f"Newton did not converge in {max_iter} iterations", history)


@dataclass(frozen=True)
class SweepRow:
    t: float
    a: float
    b: float
    theta_plus: float
    theta_minus: float
    iters: int
    ok: bool
    error: str = ""


def sweep(t_grid: Sequence[float], **kwargs) -> list[SweepRow]:
    """Warm-started continuation of the critical catenoid along ``t_grid``."""
    rows: list[SweepRow] = []
    guess = None
    for t in t_grid:
        try:
            sol = solve_critical_catenoid(float(t), guess=guess, **kwargs)
        except (ConvergenceError, IntegrationError) as exc:
            rows.append(SweepRow(float(t), math.nan, math.nan, math.nan, math.nan, 0, False, str(exc)))
            continue
        rows.append(SweepRow(sol.t, sol.a, sol.b, sol.theta_plus, sol.theta_minus, sol.iterations, True))
        guess = (sol.a, sol.b)
    return rows
