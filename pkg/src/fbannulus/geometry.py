"""Batched ambient metric fields and extrinsic geometry of parametrized surfaces.

Sign conventions used throughout the package:

* ``H = tr(I^{-1} II)`` with ``II_ab = -g(D_a X_b, N)``, i.e. ``H = div N``.
  A sphere of radius R with outward normal has ``H = +2/R``.
* The boundary angle is ``Theta = g(nu, N)`` with ``nu`` the outward g-unit
  normal of the unit sphere.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .capmetric import DomainError


class MetricField:
    """Metric and Christoffel symbols evaluated on arrays of points ``(..., 3)``."""

    def metric(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def christoffel(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class CapMetric(MetricField):
    t: float

    def _coeff(self, X):
        t2 = self.t * self.t
        denom = 1.0 - t2 * np.einsum("...i,...i->...", X, X)
        if np.any(denom <= 0):
            raise DomainError("point outside the chart of g_t")
        return t2 / denom

    def metric(self, X):
        X = np.asarray(X, dtype=float)
        c = self._coeff(X)
        return np.eye(3) + c[..., None, None] * np.einsum("...i,...j->...ij", X, X)

    def christoffel(self, X):
        # analytic partials d_k g_ij = 2 c^2 x_k x_i x_j + c (delta_ik x_j + delta_jk x_i)
        X = np.asarray(X, dtype=float)
        c = self._coeff(X)[..., None, None, None]
        eye = np.eye(3)
        dg = 2.0 * c**2 * np.einsum("...k,...i,...j->...kij", X, X, X) + c * (
            np.einsum("ik,...j->...kij", eye, X) + np.einsum("jk,...i->...kij", eye, X)
        )
        lowered = 0.5 * (
            np.einsum("...ijl->...lij", dg) + np.einsum("...jil->...lij", dg) - dg
        )
        return np.einsum("...kl,...lij->...kij", np.linalg.inv(self.metric(X)), lowered)


@dataclass(frozen=True)
class ConformalMetric(MetricField):
    """``exp(s * phi) * base`` for a scalar field with gradient access."""

    base: MetricField
    phi: Callable[[np.ndarray], np.ndarray]
    grad_phi: Callable[[np.ndarray], np.ndarray]
    s: float

    def metric(self, X):
        return np.exp(self.s * self.phi(X))[..., None, None] * self.base.metric(X)

    def christoffel(self, X):
        g = self.base.metric(X)
        dphi = self.grad_phi(X)
        up = np.einsum("...kl,...l->...k", np.linalg.inv(g), dphi)
        eye = np.eye(3)
        corr = (
            np.einsum("ki,...j->...kij", eye, dphi)
            + np.einsum("kj,...i->...kij", eye, dphi)
            - np.einsum("...ij,...k->...kij", g, up)
        )
        return self.base.christoffel(X) + 0.5 * self.s * corr


def cross_covector(Xu: np.ndarray, Xv: np.ndarray) -> np.ndarray:
    """Euclidean cross product, read as a covector annihilating both tangents."""
    return np.cross(Xu, Xv)


def unit_normal(metric: MetricField, X, Xu, Xv, hint: Optional[np.ndarray] = None):
    """g-unit normal from the annihilating covector; oriented along ``hint`` if given."""
    g = metric.metric(X)
    omega = cross_covector(Xu, Xv)
    vec = np.einsum("...ij,...j->...i", np.linalg.inv(g), omega)
    norm = np.sqrt(np.einsum("...i,...i->...", vec, omega))
    N = vec / norm[..., None]
    if hint is not None:
        sign = np.sign(np.einsum("...i,...i->...", N, hint))
        sign = np.where(sign == 0, 1.0, sign)
        N = N * sign[..., None]
    return N


def mean_curvature(metric: MetricField, X, Xu, Xv, Xuu, Xuv, Xvv,
                   hint: Optional[np.ndarray] = None):
    """Mean curvature and unit normal of a parametrized surface, batched over ``...``."""
    X = np.asarray(X, dtype=float)
    g = metric.metric(X)
    gamma = metric.christoffel(X)
    N = unit_normal(metric, X, Xu, Xv, hint)

    def gdot(a, b):
        return np.einsum("...i,...ij,...j->...", a, g, b)

    def accel(Xab, Xa, Xb):
        return Xab + np.einsum("...kij,...i,...j->...k", gamma, Xa, Xb)

    E, F, G = gdot(Xu, Xu), gdot(Xu, Xv), gdot(Xv, Xv)
    L = -gdot(accel(Xuu, Xu, Xu), N)
    M = -gdot(accel(Xuv, Xu, Xv), N)
    Nn = -gdot(accel(Xvv, Xv, Xv), N)
    H = (G * L - 2 * F * M + E * Nn) / (E * G - F * F)
    return H, N


def sphere_normal(metric: MetricField, X) -> np.ndarray:
    """Outward g-unit normal of the level sets of |x|, extended off the sphere."""
    X = np.asarray(X, dtype=float)
    g = metric.metric(X)
    vec = np.einsum("...ij,...j->...i", np.linalg.inv(g), X)
    norm = np.sqrt(np.einsum("...i,...i->...", vec, X))
    return vec / norm[..., None]


def boundary_angle(metric: MetricField, X, N) -> np.ndarray:
    nu = sphere_normal(metric, X)
    return np.einsum("...i,...ij,...j->...", nu, metric.metric(X), N)
