"""Finite-difference and brute-force oracles.

These routines deliberately avoid the analytic code paths they are used to
check: metric partials come from centered differences of ``metric_at``,
roots come from plain bisection, and so on.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy import special
from scipy.integrate import solve_ivp

from .capmetric import DIM, AmbientScalar, conformal_ricci, embed_sphere, metric_at


def bisect(fn: Callable[[float], float], lo: float, hi: float, tol: float = 1e-15,
           max_iter: int = 200) -> float:
    flo = fn(lo)
    if flo * fn(hi) > 0:
        raise ValueError("root is not bracketed")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0 or hi - lo < tol:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def t0_by_bisection() -> float:
    return bisect(lambda t: t - math.cosh(t) / math.sinh(t), 1.0, 2.0)


def fd_metric_partials(metric: Callable[[np.ndarray], np.ndarray], x, step: float) -> np.ndarray:
    """``dg[k, i, j]`` by centered differences of a metric callable."""
    x = np.asarray(x, dtype=float)
    out = np.empty((DIM, DIM, DIM))
    for k in range(DIM):
        e = np.zeros(DIM)
        e[k] = step
        out[k] = (metric(x + e) - metric(x - e)) / (2 * step)
    return out


def fd_christoffel(metric: Callable[[np.ndarray], np.ndarray], x, step: float = 1e-5) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    dg = fd_metric_partials(metric, x, step)
    lowered = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    return np.einsum("kl,lij->kij", np.linalg.inv(metric(x)), lowered)


def fd_ricci(metric: Callable[[np.ndarray], np.ndarray], x, step: float = 1e-3) -> np.ndarray:
    """Ricci tensor from nested centered differences (second order in ``step``)."""
    x = np.asarray(x, dtype=float)
    gamma = fd_christoffel(metric, x, step)
    dgamma = np.empty((DIM, DIM, DIM, DIM))
    for m in range(DIM):
        e = np.zeros(DIM)
        e[m] = step
        dgamma[m] = (fd_christoffel(metric, x + e, step) - fd_christoffel(metric, x - e, step)) / (
            2 * step
        )
    return (
        np.einsum("kkij->ij", dgamma)
        - np.einsum("jkik->ij", dgamma)
        + np.einsum("kkl,lij->ij", gamma, gamma)
        - np.einsum("kjl,lik->ij", gamma, gamma)
    )


def cap_ricci_fd(t: float, x, step: float = 1e-3) -> np.ndarray:
    return fd_ricci(lambda y: metric_at(t, y), x, step)


def pullback_metric(t: float, x, step: float = 1e-5) -> np.ndarray:
    """J^T J for the centered-difference Jacobian of the cap embedding."""
    x = np.asarray(x, dtype=float)
    jac = np.empty((DIM + 1, DIM))
    for k in range(DIM):
        e = np.zeros(DIM)
        e[k] = step
        jac[:, k] = (embed_sphere(t, x + e) - embed_sphere(t, x - e)) / (2 * step)
    return jac.T @ jac


def conformal_ricci_derivative_fd(h: AmbientScalar, t: float, x, ds: float) -> np.ndarray:
    """Centered difference in s of Ric(exp(-2 s h) g_t) at s = 0."""
    return (conformal_ricci(h, t, x, ds) - conformal_ricci(h, t, x, -ds)) / (2 * ds)


def disk_bessel_negative_eigs(n: int, k_max: float = 40.0, samples: int = 4000) -> list[float]:
    """Negative Robin eigenvalues of -Laplace on the unit disk in mode n.

    A negative eigenvalue -k^2 has eigenfunction I_n(k r); the Robin condition
    phi = d_r phi at r = 1 becomes I_n(k) = k I_n'(k). Roots in k are found by a
    sign scan followed by bisection.
    """

    def boundary(k: float) -> float:
        return float(special.iv(n, k) - k * special.ivp(n, k))

    ks = np.linspace(1e-6, k_max, samples)
    vals = np.array([boundary(k) for k in ks])
    roots = []
    for a, b, fa, fb in zip(ks[:-1], ks[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(bisect(boundary, a, b, tol=1e-14))
    # k -> 0 is the trivial root of mode 1 (eigenvalue zero, eigenfunction r)
    return sorted(-k * k for k in roots if k > 1e-4)


def riccati_even_decay(t0: float) -> float:
    """Root k of k tanh(k t0) = 1/t0, giving the bottom of -d^2 + m^2 with the Robin ends.

    The lowest eigenvalue of -phi'' + m^2 phi on [-t0, t0] with
    phi'(+-t0) = +-phi(+-t0)/t0 is m^2 - k^2.
    """
    return bisect(lambda k: k * math.tanh(k * t0) - 1.0 / t0, 1e-9, 10.0)


def conformal_ricci_derivative_spatial_fd(h: AmbientScalar, t: float, x, step: float,
                                          ds: float = 1e-2) -> np.ndarray:
    """Same s-derivative with every Ricci tensor taken by nested centered differences in x.

    Ric(exp(-2 s h) g) is a quadratic polynomial in s, so the s-difference is
    exact and the remaining error is the O(step^2) spatial truncation.
    """

    def metric(sig):
        return lambda y: np.exp(-2.0 * sig * h(y)) * metric_at(t, y)

    return (fd_ricci(metric(ds), x, step) - fd_ricci(metric(-ds), x, step)) / (2 * ds)


def catenoid_shooting_eigs(n: int, t0: float, r0: float, lam_min: float = -20.0,
                           lam_max: float = 20.0, samples: int = 400) -> list[float]:
    """Eigenvalues of -phi'' - (2/cosh^2 - n^2) phi = lam r0^-2 cosh^2 phi with Robin ends.

    Shoots from -t0 with data satisfying the left condition and locates sign
    changes of the right-end Robin functional in lam, refined by bisection.
    """

    def miss(lam: float) -> float:
        def rhs(t, y):
            q = 2.0 / math.cosh(t) ** 2 - n * n + lam * math.cosh(t) ** 2 / r0**2
            return [y[1], -q * y[0]]

        sol = solve_ivp(rhs, (-t0, t0), [t0, -1.0], method="DOP853", rtol=1e-12, atol=1e-12)
        y, dy = sol.y[:, -1]
        return float(y - t0 * dy)

    lams = np.linspace(lam_min, lam_max, samples)
    vals = [miss(v) for v in lams]
    roots = []
    for a, b, fa, fb in zip(lams[:-1], lams[1:], vals[:-1], vals[1:]):
        if fa * fb < 0:
            roots.append(bisect(miss, a, b, tol=1e-12))
    return roots
