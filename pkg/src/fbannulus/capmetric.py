"""Spherical-cap metrics on the unit ball.

For ``|t| < 1`` the ball carries the pullback of the round metric of
curvature ``t**2`` through the cap embedding into R^4::

    g_t(x) = I + t^2 / (1 - t^2 |x|^2) * x x^T

Everything here is closed form: the metric, its first and second coordinate
partials, the Christoffel symbols and the Ricci tensor are obtained from hand
differentiated expressions. Finite differences live in :mod:`fbannulus.oracles`
and are only used to check these routines.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import eigh

DIM = 3


class DomainError(ValueError):
    """Raised when a point lies outside the chart of the cap metric."""


def _as_point(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (DIM,):
        raise ValueError(f"expected a point in R^3, got shape {x.shape}")
    return x


def _cap_coefficient(t: float, x: np.ndarray) -> float:
    """Return c = t^2 / (1 - t^2 |x|^2), raising outside the chart."""
    if not abs(t) < 1.0:
        raise DomainError(f"curvature parameter must satisfy |t| < 1, got {t}")
    t2 = t * t
    denom = 1.0 - t2 * float(x @ x)
    if denom <= 0.0:
        raise DomainError(f"t^2 |x|^2 >= 1 at t={t}, x={x}")
    return t2 / denom


def metric_at(t: float, x) -> np.ndarray:
    x = _as_point(x)
    c = _cap_coefficient(t, x)
    return np.eye(DIM) + c * np.outer(x, x)


def metric_jet(t: float, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Metric together with its first and second coordinate partials.

    Returns ``(g, dg, ddg)`` with ``dg[k, i, j] = d_k g_ij`` and
    ``ddg[l, k, i, j] = d_l d_k g_ij``. Uses dc/d|x|^2 = c^2.
    """
    x = _as_point(x)
    c = _cap_coefficient(t, x)
    eye = np.eye(DIM)
    xx = np.outer(x, x)
    g = eye + c * xx

    xxx = np.einsum("k,i,j->kij", x, x, x)
    dx_sym = np.einsum("ik,j->kij", eye, x) + np.einsum("jk,i->kij", eye, x)
    dg = 2.0 * c**2 * xxx + c * dx_sym

    xxxx = np.einsum("l,k,i,j->lkij", x, x, x, x)
    ddg = 8.0 * c**3 * xxxx
    ddg += 2.0 * c**2 * (
        np.einsum("lk,i,j->lkij", eye, x, x)
        + np.einsum("li,k,j->lkij", eye, x, x)
        + np.einsum("lj,k,i->lkij", eye, x, x)
    )
    ddg += 2.0 * c**2 * np.einsum("l,kij->lkij", x, dx_sym)
    ddg += c * (np.einsum("ik,jl->lkij", eye, eye) + np.einsum("jk,il->lkij", eye, eye))
    return g, dg, ddg


def christoffel_from_jet(g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Levi-Civita symbols ``gamma[k, i, j]`` from a metric and its partials."""
    lowered = 0.5 * (
        np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg
    )
    return np.einsum("kl,lij->kij", np.linalg.inv(g), lowered)


def ricci_from_jet(g: np.ndarray, dg: np.ndarray, ddg: np.ndarray) -> np.ndarray:
    """Ricci tensor R_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik."""
    ginv = np.linalg.inv(g)
    lowered = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    gamma = np.einsum("kl,lij->kij", ginv, lowered)

    # d_m of the lowered symbols, indexed [m, l, i, j]
    dlowered = 0.5 * (
        np.einsum("mijl->mlij", ddg) + np.einsum("mjil->mlij", ddg) - ddg
    )
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    dgamma = np.einsum("mkl,lij->mkij", dginv, lowered) + np.einsum(
        "kl,mlij->mkij", ginv, dlowered
    )
    return (
        np.einsum("kkij->ij", dgamma)
        - np.einsum("jkik->ij", dgamma)
        + np.einsum("kkl,lij->ij", gamma, gamma)
        - np.einsum("kjl,lik->ij", gamma, gamma)
    )


def christoffel(t: float, x) -> np.ndarray:
    g, dg, _ = metric_jet(t, x)
    return christoffel_from_jet(g, dg)


def ricci_at(t: float, x) -> np.ndarray:
    return ricci_from_jet(*metric_jet(t, x))


def sphere_center(t: float) -> np.ndarray:
    if t == 0:
        raise DomainError("the cap sphere is undefined at t = 0")
    return np.array([0.0, 0.0, 0.0, -1.0 / t])


def embed_sphere(t: float, x) -> np.ndarray:
    """Cap embedding of the ball into the sphere of radius 1/|t| in R^4."""
    x = _as_point(x)
    if t == 0:
        raise DomainError("use embed_flat for the t = 0 branch")
    r2 = float(x @ x)
    if r2 > 1.0 + 1e-14:
        raise DomainError(f"point outside the closed unit ball: |x|^2 = {r2}")
    w = -1.0 / t + np.sign(t) * np.sqrt(1.0 / (t * t) - r2)
    return np.append(x, w)


def embed_flat(x) -> np.ndarray:
    return np.append(_as_point(x), 0.0)


@dataclass(frozen=True)
class MetricSample:
    t: float
    x: np.ndarray
    g: np.ndarray
    dg: np.ndarray
    gamma: np.ndarray
    ric: np.ndarray

    @classmethod
    def at(cls, t: float, x) -> "MetricSample":
        x = _as_point(x)
        g, dg, ddg = metric_jet(t, x)
        return cls(t, x, g, dg, christoffel_from_jet(g, dg), ricci_from_jet(g, dg, ddg))


@dataclass
class AmbientScalar:
    """Scalar field on the ball with gradient and Hessian access.

    Missing derivatives are taken by centered differences with ``step``.
    """

    fn: Callable[[np.ndarray], float]
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hess: Optional[Callable[[np.ndarray], np.ndarray]] = None
    step: float = 1e-5
    name: str = field(default="phi")

    def __call__(self, x) -> float:
        return float(self.fn(np.asarray(x, dtype=float)))

    def values(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.broadcast_to(np.asarray(self.fn(X), dtype=float), X.shape[:-1])

    def gradient(self, x) -> np.ndarray:
        """Gradient at a point or, for vectorized ``fn``, at an array of points ``(..., 3)``."""
        x = np.asarray(x, dtype=float)
        if self.grad is not None:
            return np.asarray(self.grad(x), dtype=float)
        h = self.step
        out = np.empty(x.shape)
        for k in range(DIM):
            e = np.zeros(DIM)
            e[k] = h
            out[..., k] = (self.fn(x + e) - self.fn(x - e)) / (2 * h)
        return out

    def hessian(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.hess is not None:
            return np.asarray(self.hess(x), dtype=float)
        h = self.step
        if self.grad is not None:
            cols = []
            for k in range(DIM):
                e = np.zeros(DIM)
                e[k] = h
                cols.append((self.gradient(x + e) - self.gradient(x - e)) / (2 * h))
            out = np.array(cols)
            return 0.5 * (out + out.T)
        # second differences of the value; step scaled up to limit cancellation
        h = max(h, 1e-4)
        out = np.empty((DIM, DIM))
        f0 = self.fn(x)
        for i in range(DIM):
            ei = np.zeros(DIM)
            ei[i] = h
            out[i, i] = (self.fn(x + ei) - 2 * f0 + self.fn(x - ei)) / h**2
            for j in range(i + 1, DIM):
                ej = np.zeros(DIM)
                ej[j] = h
                v = (
                    self.fn(x + ei + ej)
                    - self.fn(x + ei - ej)
                    - self.fn(x - ei + ej)
                    + self.fn(x - ei - ej)
                ) / (4 * h * h)
                out[i, j] = out[j, i] = v
        return out


def squared_norm_field() -> AmbientScalar:
    return AmbientScalar(
        fn=lambda x: float(x @ x),
        grad=lambda x: 2.0 * x,
        hess=lambda x: 2.0 * np.eye(DIM),
        name="|x|^2",
    )


def hessian_g(h: AmbientScalar, t: float, x) -> np.ndarray:
    """Covariant Hessian of ``h`` in g_t."""
    x = _as_point(x)
    gamma = christoffel(t, x)
    return h.hessian(x) - np.einsum("kij,k->ij", gamma, h.gradient(x))


def laplacian_g(h: AmbientScalar, t: float, x) -> float:
    x = _as_point(x)
    return float(np.einsum("ij,ij->", np.linalg.inv(metric_at(t, x)), hessian_g(h, t, x)))


def conformal_ricci_derivative(h: AmbientScalar, t: float, x) -> np.ndarray:
    """s-derivative at s = 0 of Ric(exp(-2 s h) g_t), equal to (n-2) Hess h + (lap h) g."""
    x = _as_point(x)
    g = metric_at(t, x)
    hess = hessian_g(h, t, x)
    lap = float(np.einsum("ij,ij->", np.linalg.inv(g), hess))
    return (DIM - 2) * hess + lap * g


def conformal_metric_jet(h: AmbientScalar, t: float, x, s: float):
    """Jet of exp(-2 s h) g_t, built from the analytic jet of g_t."""
    x = _as_point(x)
    g, dg, ddg = metric_jet(t, x)
    u = -2.0 * s * h(x)
    du = -2.0 * s * h.gradient(x)
    ddu = -2.0 * s * h.hessian(x)
    w = np.exp(u)
    gs = w * g
    dgs = w * (dg + np.einsum("k,ij->kij", du, g))
    ddgs = w * (
        ddg
        + np.einsum("l,kij->lkij", du, dg)
        + np.einsum("k,lij->lkij", du, dg)
        + np.einsum("lk,ij->lkij", ddu + np.outer(du, du), g)
    )
    return gs, dgs, ddgs


def conformal_ricci(h: AmbientScalar, t: float, x, s: float) -> np.ndarray:
    """Ricci tensor of exp(-2 s h) g_t at x."""
    return ricci_from_jet(*conformal_metric_jet(h, t, x, s))


def sample_ball(n_radii: int = 9, n_dirs: int = 64, r_max: float = 1.0) -> np.ndarray:
    """Deterministic sample of the closed ball: radial shells times Fibonacci directions."""
    k = np.arange(n_dirs) + 0.5
    polar = np.arccos(1.0 - 2.0 * k / n_dirs)
    azim = np.pi * (1.0 + 5.0**0.5) * k
    dirs = np.stack(
        [np.sin(polar) * np.cos(azim), np.sin(polar) * np.sin(azim), np.cos(polar)], axis=1
    )
    radii = np.linspace(0.0, r_max, n_radii)
    pts = [np.zeros(DIM)] + [r * d for r in radii[1:] for d in dirs]
    return np.array(pts)


def convexity_margin(t: float, points: Optional[np.ndarray] = None) -> float:
    """Smallest eigenvalue of Hess_{g_t}(|x|^2) relative to g_t over a sample grid.

    A positive value certifies strict convexity of |x|^2 on the sample. The
    test function is fixed, so the margin turns negative for |t| near 1
    (2 - 4 t^2 at the rim) even though the cap stays convex.
    """
    if points is None:
        points = sample_ball()
    h = squared_norm_field()
    margin = np.inf
    for x in points:
        lam = eigh(hessian_g(h, t, x), metric_at(t, x), eigvals_only=True)
        margin = min(margin, float(lam[0]))
    return margin
