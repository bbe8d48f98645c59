"""Jacobi operators of the critical disk and the critical catenoid (Euclidean ball).

Grid functions live on a polar grid ``(r, theta)`` for the disk and on the
conformal cylinder ``(t, theta)`` for the catenoid, where the catenoid is
parametrized by ``(cosh t cos th, cosh t sin th, t) / r0`` on ``[-t0, t0]``.
Azimuthal derivatives are spectral; derivatives in the other coordinate use
explicit finite-difference stencils of selectable order.

Orientation: the disk normal is ``e3``, the catenoid normal points away from
the axis, and the boundary angle is measured against the outward normal of
the unit sphere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import simpson, solve_ivp

from .capmetric import AmbientScalar
from .geometry import CapMetric, ConformalMetric, boundary_angle, mean_curvature
from .rotprofile import critical_constants

BASE_COORD = 16
BASE_THETA = 8
DETERMINANT_TOL = 1e-7
SURFACES = ("disk", "catenoid")


class ResolutionError(ValueError):
    pass


def _is_pow2_multiple(n: int, base: int) -> bool:
    if n < base or n % base:
        return False
    q = n // base
    return q & (q - 1) == 0


@dataclass
class SurfaceFunction:
    """Samples of a function on the disk or catenoid grid.

    ``values[i, j]`` is the value at ``(coord[i], theta[j])``. ``coord`` is
    uniform and includes both endpoints; ``theta`` is uniform on [0, 2 pi).
    """

    kind: str
    coord: np.ndarray
    theta: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in SURFACES:
            raise ValueError(f"unknown surface {self.kind!r}")
        self.values = np.asarray(self.values)
        if self.values.shape != (len(self.coord), len(self.theta)):
            raise ValueError("values do not match the grid")
        if not _is_pow2_multiple(len(self.coord) - 1, BASE_COORD) or not _is_pow2_multiple(
            len(self.theta), BASE_THETA
        ):
            raise ResolutionError(
                f"grid {len(self.coord) - 1}x{len(self.theta)} is not a power-of-two "
                f"multiple of the base {BASE_COORD}x{BASE_THETA}"
            )

    @staticmethod
    def grid(kind: str, n_coord: int, n_theta: int) -> tuple[np.ndarray, np.ndarray]:
        if kind == "disk":
            coord = np.linspace(0.0, 1.0, n_coord + 1)
        elif kind == "catenoid":
            t0 = critical_constants().t0
            coord = np.linspace(-t0, t0, n_coord + 1)
        else:
            raise ValueError(f"unknown surface {kind!r}")
        theta = 2 * np.pi * np.arange(n_theta) / n_theta
        return coord, theta

    @classmethod
    def sample(cls, kind: str, fn: Callable, n_coord: int = 64, n_theta: int = 32) -> "SurfaceFunction":
        coord, theta = cls.grid(kind, n_coord, n_theta)
        C, T = np.meshgrid(coord, theta, indexing="ij")
        return cls(kind, coord, theta, np.broadcast_to(fn(C, T), C.shape).astype(float))

    def like(self, values) -> "SurfaceFunction":
        return SurfaceFunction(self.kind, self.coord, self.theta, values)

    @property
    def h(self) -> float:
        return float(self.coord[1] - self.coord[0])

    def mesh(self):
        return np.meshgrid(self.coord, self.theta, indexing="ij")


# --- stencils -----------------------------------------------------------------


def _fd_weights(offsets: Sequence[int], m: int) -> np.ndarray:
    """Weights w with sum w_j f(x + o_j h) ~ h^m f^(m)(x)."""
    offsets = np.asarray(offsets, dtype=float)
    n = len(offsets)
    V = np.vander(offsets, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[m] = math.factorial(m)
    return np.linalg.solve(V, rhs)


@lru_cache(maxsize=64)
def _diff_matrix(n: int, m: int, order: int) -> np.ndarray:
    half = (order + m - 1) // 2
    npts = order + m
    D = np.zeros((n, n))
    for i in range(n):
        if i - half >= 0 and i + half <= n - 1:
            idx = np.arange(i - half, i + half + 1)
        elif i - half < 0:
            idx = np.arange(0, npts)
        else:
            idx = np.arange(n - npts, n)
        D[i, idx] = _fd_weights(idx - i, m)
    return D


def diff_coord(values: np.ndarray, h: float, m: int = 1, order: int = 2) -> np.ndarray:
    """m-th derivative along axis 0 (uniform spacing h), one-sided at the ends."""
    D = _diff_matrix(values.shape[0], m, order)
    return np.tensordot(D, values, axes=(1, 0)) / h**m


def diff_theta(values: np.ndarray, m: int = 1) -> np.ndarray:
    """Spectral m-th azimuthal derivative along axis 1."""
    n = values.shape[1]
    k = np.fft.fftfreq(n, 1.0 / n)
    mult = (1j * k) ** m
    if m % 2 and n % 2 == 0:
        mult[n // 2] = 0.0
    out = np.fft.ifft(np.fft.fft(values, axis=1) * mult, axis=1)
    return out.real if np.isrealobj(values) else out


# --- closed-form operators ----------------------------------------------------


def _require(phi: SurfaceFunction, kind: str):
    if phi.kind != kind:
        raise ValueError(f"expected a {kind} function, got {phi.kind}")


def disk_laplacian(phi: SurfaceFunction, order: int = 2) -> np.ndarray:
    _require(phi, "disk")
    r, h, v = phi.coord, phi.h, phi.values
    vr = diff_coord(v, h, 1, order)
    vrr = diff_coord(v, h, 2, order)
    vtt = diff_theta(v, 2)
    lap = np.empty_like(vrr)
    lap[1:] = vrr[1:] + vr[1:] / r[1:, None] + vtt[1:] / r[1:, None] ** 2
    # circle-mean formula at the origin: mean_{|x|=h} phi = phi(0) + h^2 lap/4 + O(h^4)
    lap[0] = 4.0 * (v[1].mean() - v[0].mean()) / h**2
    return lap


def disk_jacobi_h(phi: SurfaceFunction, order: int = 2) -> SurfaceFunction:
    """-Laplace(phi) on the flat unit disk."""
    return phi.like(-disk_laplacian(phi, order))


def disk_jacobi_theta(phi: SurfaceFunction) -> np.ndarray:
    """phi - d_r phi on the rim, with a 5-point one-sided radial derivative."""
    _require(phi, "disk")
    dr = diff_coord(phi.values[-5:], phi.h, 1, 4)[-1]
    return phi.values[-1] - dr


def cat_conformal_factor(t) -> np.ndarray:
    r0 = critical_constants().r0
    return r0**2 / np.cosh(t) ** 2


def cat_jacobi_h(phi: SurfaceFunction, order: int = 2) -> SurfaceFunction:
    """-(2 r0^2/cosh^4 t) phi - (r0^2/cosh^2 t) Laplace_flat(phi) on the cylinder."""
    _require(phi, "catenoid")
    t, v = phi.coord[:, None], phi.values
    lap = diff_coord(v, phi.h, 2, order) + diff_theta(v, 2)
    factor = cat_conformal_factor(t)
    return phi.like(-factor * (2.0 / np.cosh(t) ** 2 * v + lap))


def cat_jacobi_theta(phi: SurfaceFunction) -> tuple[np.ndarray, np.ndarray]:
    """Robin values phi(+-t0) -+ t0 d_t phi(+-t0); returns (plus end, minus end)."""
    _require(phi, "catenoid")
    t0 = critical_constants().t0
    top = diff_coord(phi.values[-5:], phi.h, 1, 4)[-1]
    bottom = diff_coord(phi.values[:5], phi.h, 1, 4)[0]
    return phi.values[-1] - t0 * top, phi.values[0] + t0 * bottom


# --- Fourier modes ------------------------------------------------------------


@dataclass
class ModeDecomposition:
    coord: np.ndarray
    n: np.ndarray
    coeffs: np.ndarray
    parseval_residual: float

    def mode(self, n: int) -> np.ndarray:
        idx = np.flatnonzero(self.n == n)
        if not len(idx):
            raise KeyError(f"mode {n} not resolved on this grid")
        return self.coeffs[:, idx[0]]

    def reconstruct(self) -> np.ndarray:
        return np.fft.ifft(self.coeffs * len(self.n), axis=1)


def mode_reduce(phi: SurfaceFunction) -> ModeDecomposition:
    """phi(c, th) = sum_n phi_n(c) exp(i n th), by a DFT in theta per row."""
    n_theta = len(phi.theta)
    coeffs = np.fft.fft(phi.values, axis=1) / n_theta
    n = np.fft.fftfreq(n_theta, 1.0 / n_theta).astype(int)
    lhs = np.mean(np.abs(phi.values) ** 2, axis=1)
    rhs = np.sum(np.abs(coeffs) ** 2, axis=1)
    residual = float(np.max(np.abs(lhs - rhs)) / max(1.0, float(np.max(lhs))))
    return ModeDecomposition(phi.coord, n, coeffs, residual)


def mode_potential(n: int, t) -> np.ndarray:
    return 2.0 / np.cosh(t) ** 2 - n * n


def mode_operator(n: int, phi_n: np.ndarray, t: np.ndarray, order: int = 2) -> np.ndarray:
    """Per-mode catenoid Jacobi operator -(r0^2/cosh^2 t)(phi_n'' + f_n phi_n)."""
    h = float(t[1] - t[0])
    return -cat_conformal_factor(t) * (diff_coord(phi_n, h, 2, order) + mode_potential(n, t) * phi_n)


@dataclass(frozen=True)
class FourierModeProblem:
    n: int
    t0: float

    @classmethod
    def for_mode(cls, n: int) -> "FourierModeProblem":
        return cls(n, critical_constants().t0)

    @property
    def domain(self) -> tuple[float, float]:
        return -self.t0, self.t0

    def potential(self, t):
        return mode_potential(self.n, t)

    def robin(self, fn: Callable) -> tuple[float, float]:
        """Robin functionals (plus end, minus end) of a function returning (y, y')."""
        yp, dp = fn(np.array(self.t0))
        ym, dm = fn(np.array(-self.t0))
        return float(yp - self.t0 * dp), float(ym + self.t0 * dm)


@dataclass
class FundamentalPair:
    """Two solutions of phi'' + f_n phi = 0; each callable maps t to (phi, phi')."""

    n: int
    functions: tuple[Callable, Callable]
    source: str

    def wronskian(self, t=0.0) -> float:
        (y1, d1), (y2, d2) = self.functions[0](np.asarray(t)), self.functions[1](np.asarray(t))
        return float(y1 * d2 - d1 * y2)


def _n0_u(t):
    t = np.asarray(t, dtype=float)
    return 1.0 - t * np.tanh(t), -np.tanh(t) - t / np.cosh(t) ** 2


def _n0_v(t):
    t = np.asarray(t, dtype=float)
    return np.tanh(t), 1.0 / np.cosh(t) ** 2


def kernel_profile(t):
    """sinh t + t / cosh t and its derivative (mode +-1 kernel)."""
    t = np.asarray(t, dtype=float)
    sech = 1.0 / np.cosh(t)
    return np.sinh(t) + t * sech, np.cosh(t) + sech - t * sech * np.tanh(t)


def _n1_v(t):
    t = np.asarray(t, dtype=float)
    sech = 1.0 / np.cosh(t)
    return sech, -sech * np.tanh(t)


@lru_cache(maxsize=32)
def _integrated_pair(n: int, t0: float) -> FundamentalPair:
    n2 = float(n * n)

    def rhs(t, y):
        # both canonical solutions at once: (c, c', s, s')
        f = 2.0 / math.cosh(t) ** 2 - n2
        return [y[1], -f * y[0], y[3], -f * y[2]]

    opts = dict(method="DOP853", rtol=1e-13, atol=1e-14, max_step=0.01 / max(1, n), dense_output=True)
    y0 = [1.0, 0.0, 0.0, 1.0]
    fwd = solve_ivp(rhs, (0.0, t0), y0, **opts).sol
    bwd = solve_ivp(rhs, (0.0, -t0), y0, **opts).sol

    def make(k):
        def fn(t):
            t = np.asarray(t, dtype=float)
            tf = np.clip(t, -t0, t0).ravel()
            out = np.empty((2, tf.size))
            pos = tf >= 0
            if pos.any():
                out[:, pos] = fwd(tf[pos])[2 * k : 2 * k + 2]
            if (~pos).any():
                out[:, ~pos] = bwd(tf[~pos])[2 * k : 2 * k + 2]
            return out[0].reshape(t.shape), out[1].reshape(t.shape)

        return fn

    return FundamentalPair(n, (make(0), make(1)), "integrated")


def mode_fundamental_solutions(n: int, integrate: bool = False) -> FundamentalPair:
    """Fundamental system of phi'' + (2/cosh^2 t - n^2) phi = 0.

    Closed forms for n = 0 and |n| = 1; otherwise (or with ``integrate``) the
    canonical pair with unit Wronskian at t = 0 is integrated numerically.
    """
    n = abs(int(n))
    if not integrate:
        if n == 0:
            return FundamentalPair(0, (_n0_u, _n0_v), "closed-form")
        if n == 1:
            return FundamentalPair(1, (kernel_profile, _n1_v), "closed-form")
    return _integrated_pair(n, critical_constants().t0)


def ode_residual(fn: Callable, n: int, t: np.ndarray, h: Optional[float] = None, normalize: bool = True) -> float:
    """max |phi'' + f_n phi| with phi'' from a 7-point sixth-order central stencil.

    With ``normalize`` the function is first scaled to unit sup-norm on ``t``;
    the default step shrinks like 1/|n| to follow the growth rate of the solutions.
    """
    if h is None:
        h = 0.02 / max(1, abs(n))
    w = np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90])
    t = np.asarray(t, dtype=float)
    shifted = fn(t[None, :] + h * np.arange(-3, 4)[:, None])[0]
    y = shifted[3]
    second = w @ shifted / h**2
    scale = float(np.max(np.abs(y))) if normalize else 1.0
    return float(np.max(np.abs(second + mode_potential(n, t) * y))) / scale


def robin_residual(fn: Callable, n: int = 1) -> float:
    prob = FourierModeProblem.for_mode(n)
    return max(abs(v) for v in prob.robin(fn))


def mode_bvp_determinant(n: int, integrate: bool = False) -> float:
    """Robin determinant of the fundamental system divided by its Wronskian.

    The ratio does not depend on which fundamental system is used, and it
    vanishes exactly when mode n carries a kernel element.
    """
    prob = FourierModeProblem.for_mode(n)
    pair = mode_fundamental_solutions(n, integrate)
    R = np.array([prob.robin(f) for f in pair.functions]).T
    return float(np.linalg.det(R) / pair.wronskian(0.0))


def mode_grid(n: int, points: int = 201) -> np.ndarray:
    """Fine grid on [-t0, t0] kept clear of the ends by the residual stencil width."""
    t0 = critical_constants().t0
    pad = 3 * 0.02 / max(1, abs(n))
    return np.linspace(-t0 + pad, t0 - pad, points)


def mode_report(n: int) -> dict:
    prob = FourierModeProblem.for_mode(n)
    pair = mode_fundamental_solutions(n)
    det = mode_bvp_determinant(n)
    residuals = {
        "ode": max(ode_residual(f, n, mode_grid(n)) for f in pair.functions),
        "wronskian_drift": abs(pair.wronskian(prob.t0) - pair.wronskian(0.0)),
    }
    return {"n": int(n), "det": det, "kernel_flag": bool(abs(det) < DETERMINANT_TOL), "residuals": residuals}


@dataclass(frozen=True)
class RiccatiBound:
    bound: float
    inv_t0: float

    @property
    def margin(self) -> float:
        return self.bound - self.inv_t0


def riccati_bound_check() -> RiccatiBound:
    """Compare the comparison solution sqrt2 tanh(sqrt2 t0) with the Robin value 1/t0."""
    t0 = critical_constants().t0
    r2 = math.sqrt(2.0)
    return RiccatiBound(r2 * math.tanh(r2 * t0), 1.0 / t0)


# --- kernels ------------------------------------------------------------------


def kernel_bases() -> dict[str, list[Callable]]:
    """Closed-form kernel bases as functions of the grid coordinates (c, theta)."""
    return {
        "disk": [lambda r, th: r * np.cos(th), lambda r, th: r * np.sin(th)],
        "catenoid": [
            lambda t, th: kernel_profile(t)[0] * np.cos(th),
            lambda t, th: kernel_profile(t)[0] * np.sin(th),
        ],
    }


def area_weight(kind: str, coord) -> np.ndarray:
    """Induced area density in grid coordinates."""
    if kind == "disk":
        return np.asarray(coord, dtype=float)
    return np.cosh(coord) ** 2 / critical_constants().r0 ** 2


def induced_inner(f: SurfaceFunction, g: SurfaceFunction) -> float:
    """L2 product in the induced metric: Simpson in the coordinate, trapezoid in theta."""
    integrand = (f.values * g.values).mean(axis=1) * 2 * np.pi * area_weight(f.kind, f.coord)
    return float(simpson(integrand, x=f.coord))


def gram_matrix(kind: str, basis: Sequence[Callable], n_quad: int = 64, n_theta: int = 64) -> np.ndarray:
    if kind == "disk":
        lo, hi = 0.0, 1.0
    else:
        t0 = critical_constants().t0
        lo, hi = -t0, t0
    x, w = np.polynomial.legendre.leggauss(n_quad)
    c = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    wc = 0.5 * (hi - lo) * w * area_weight(kind, c)
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    C, T = np.meshgrid(c, th, indexing="ij")
    vals = [f(C, T) for f in basis]
    G = np.empty((len(basis), len(basis)))
    for i, fi in enumerate(vals):
        for j, fj in enumerate(vals):
            G[i, j] = np.sum(wc[:, None] * fi * fj) * 2 * np.pi / n_theta
    return G


def robin_project(phi: SurfaceFunction) -> SurfaceFunction:
    """Remove the Robin-violating part of phi with smooth boundary correctors.

    Catenoid: per azimuth, subtract a combination of 1 and t^3 fixing both ends.
    Disk: per Fourier mode n, subtract a multiple of r^(|n|+2) e^{i n theta}.
    The correctors are evaluated with the same discrete Robin functionals.
    """
    C, T = phi.mesh()
    if phi.kind == "catenoid":
        plus, minus = cat_jacobi_theta(phi)
        w1 = phi.like(np.ones_like(C))
        w2 = phi.like(C**3)
        A = np.array([[cat_jacobi_theta(w)[k][0] for w in (w1, w2)] for k in (0, 1)])
        coef = np.linalg.solve(A, np.vstack([plus, minus]))
        return phi.like(phi.values - coef[0] * w1.values - coef[1] * w2.values)
    b = np.fft.fft(disk_jacobi_theta(phi)) / len(phi.theta)
    n = np.fft.fftfreq(len(phi.theta), 1.0 / len(phi.theta)).astype(int)
    corr = np.zeros(C.shape, dtype=complex)
    for k, nk in enumerate(n):
        w = phi.like(C ** (abs(nk) + 2))
        bw = disk_jacobi_theta(w)[0]
        corr += (b[k] / bw) * w.values * np.exp(1j * nk * T)
    return phi.like(phi.values - corr.real)


# --- embeddings and variations ------------------------------------------------


def surface_jets(kind: str, C: np.ndarray, T: np.ndarray) -> dict[str, np.ndarray]:
    """Embedding, its partials, and the unit normal with its partials."""
    zero = np.zeros_like(C)
    cos, sin = np.cos(T), np.sin(T)

    def vec(a, b, c):
        return np.stack(np.broadcast_arrays(a, b, c), axis=-1)

    if kind == "disk":
        r = C
        e3 = vec(zero, zero, np.ones_like(C))
        return {
            "X": vec(r * cos, r * sin, zero),
            "Xu": vec(cos, sin, zero),
            "Xv": vec(-r * sin, r * cos, zero),
            "Xuu": vec(zero, zero, zero),
            "Xuv": vec(-sin, cos, zero),
            "Xvv": vec(-r * cos, -r * sin, zero),
            "N": e3,
            "Nu": vec(zero, zero, zero),
            "Nv": vec(zero, zero, zero),
            "Nuu": vec(zero, zero, zero),
            "Nuv": vec(zero, zero, zero),
            "Nvv": vec(zero, zero, zero),
        }
    r0 = critical_constants().r0
    t = C
    ch, sh = np.cosh(t), np.sinh(t)
    sech, tanh = 1.0 / ch, np.tanh(t)
    dsech = -sech * tanh
    ddsech = sech * tanh**2 - sech**3
    return {
        "X": vec(ch * cos, ch * sin, t) / r0,
        "Xu": vec(sh * cos, sh * sin, np.ones_like(t)) / r0,
        "Xv": vec(-ch * sin, ch * cos, zero) / r0,
        "Xuu": vec(ch * cos, ch * sin, zero) / r0,
        "Xuv": vec(-sh * sin, sh * cos, zero) / r0,
        "Xvv": vec(-ch * cos, -ch * sin, zero) / r0,
        "N": vec(sech * cos, sech * sin, -tanh),
        "Nu": vec(dsech * cos, dsech * sin, -(sech**2)),
        "Nv": vec(-sech * sin, sech * cos, zero),
        "Nuu": vec(ddsech * cos, ddsech * sin, 2 * sech**2 * tanh),
        "Nuv": vec(-dsech * sin, dsech * cos, zero),
        "Nvv": vec(-sech * cos, -sech * sin, zero),
    }


def _regular_rows(kind: str, coord: np.ndarray) -> np.ndarray:
    # polar parametrization degenerates at r = 0
    return coord > 0 if kind == "disk" else np.ones(len(coord), dtype=bool)


def conformal_h_variation(kind: str, phi: AmbientScalar, n_coord: int = 32, n_theta: int = 16) -> SurfaceFunction:
    """d phi(N) - phi H / 2 on the surface, for the metric variation exp(s phi) delta."""
    coord, theta = SurfaceFunction.grid(kind, n_coord, n_theta)
    C, T = np.meshgrid(coord, theta, indexing="ij")
    jets = surface_jets(kind, C, T)
    X, N = jets["X"], jets["N"]
    H = np.zeros(C.shape)
    rows = _regular_rows(kind, coord)
    H[rows], _ = mean_curvature(
        CapMetric(0.0), X[rows], jets["Xu"][rows], jets["Xv"][rows],
        jets["Xuu"][rows], jets["Xuv"][rows], jets["Xvv"][rows], hint=N[rows],
    )
    dphi_N = np.einsum("...i,...i->...", phi.gradient(X), N)
    return SurfaceFunction(kind, coord, theta, dphi_N - 0.5 * phi.values(X) * H)


def _conformal_metric(phi: AmbientScalar, s: float) -> ConformalMetric:
    return ConformalMetric(CapMetric(0.0), phi.values, phi.gradient, s)


def conformal_h_fd(kind: str, phi: AmbientScalar, s: float, n_coord: int = 32, n_theta: int = 16) -> SurfaceFunction:
    """Centered difference in s of H under exp(s phi) delta (disk center row left as NaN)."""
    coord, theta = SurfaceFunction.grid(kind, n_coord, n_theta)
    C, T = np.meshgrid(coord, theta, indexing="ij")
    jets = surface_jets(kind, C, T)
    rows = _regular_rows(kind, coord)
    args = [jets[k][rows] for k in ("X", "Xu", "Xv", "Xuu", "Xuv", "Xvv")]
    out = np.full(C.shape, np.nan)
    Hp, _ = mean_curvature(_conformal_metric(phi, s), *args, hint=jets["N"][rows])
    Hm, _ = mean_curvature(_conformal_metric(phi, -s), *args, hint=jets["N"][rows])
    out[rows] = (Hp - Hm) / (2 * s)
    return SurfaceFunction(kind, coord, theta, out)


def _boundary_rows(kind: str, n_coord: int) -> list[int]:
    return [n_coord] if kind == "disk" else [n_coord, 0]


def conformal_theta_variation(kind: str, phi: AmbientScalar, n_theta: int = 16) -> np.ndarray:
    """Conformal changes leave angles unchanged: the variation of Theta vanishes."""
    return np.zeros((len(_boundary_rows(kind, 1)), n_theta))


def conformal_theta_fd(kind: str, phi: AmbientScalar, s: float, n_theta: int = 16) -> np.ndarray:
    """Forward difference (Theta_s - Theta_0)/s on each boundary circle."""
    coord, theta = SurfaceFunction.grid(kind, BASE_COORD, n_theta)
    C, T = np.meshgrid(coord, theta, indexing="ij")
    jets = surface_jets(kind, C, T)
    out = []
    for row in _boundary_rows(kind, len(coord) - 1):
        args = [jets[k][row] for k in ("X", "Xu", "Xv", "Xuu", "Xuv", "Xvv")]
        vals = []
        for ss in (0.0, s):
            metric = _conformal_metric(phi, ss)
            _, N = mean_curvature(metric, *args, hint=jets["N"][row])
            vals.append(boundary_angle(metric, args[0], N))
        out.append((vals[1] - vals[0]) / s)
    return np.array(out)


@dataclass
class NormalPerturbationReport:
    kind: str
    eps: float
    jh_fd: np.ndarray
    jh_formula: np.ndarray
    jtheta_fd: np.ndarray
    jtheta_formula: np.ndarray
    rows: np.ndarray = field(repr=False)

    @staticmethod
    def _rel(a, b):
        scale = float(np.max(np.abs(b)))
        err = float(np.max(np.abs(a - b)))
        return err / scale if scale > 0 else err

    @property
    def error_h(self) -> float:
        return float(np.max(np.abs(self.jh_fd - self.jh_formula)))

    @property
    def rel_error_h(self) -> float:
        return self._rel(self.jh_fd, self.jh_formula)

    @property
    def error_theta(self) -> float:
        return float(np.max(np.abs(self.jtheta_fd - self.jtheta_formula)))

    @property
    def rel_error_theta(self) -> float:
        return self._rel(self.jtheta_fd, self.jtheta_formula)


def normal_perturbation_fd_check(phi: SurfaceFunction, eps: float = 1e-4, order: int = 4) -> NormalPerturbationReport:
    """Compare the closed-form Jacobi operators with centered differences of (H, Theta).

    The surface is displaced to ``e + eps * phi * N``; grid derivatives of phi
    are shared by both sides so the comparison isolates the geometry.
    """
    kind = phi.kind
    C, T = phi.mesh()
    jets = surface_jets(kind, C, T)
    v = phi.values
    pu = diff_coord(v, phi.h, 1, order)
    puu = diff_coord(v, phi.h, 2, order)
    pv = diff_theta(v, 1)
    pvv = diff_theta(v, 2)
    puv = diff_theta(pu, 1)

    N, Nu, Nv = jets["N"], jets["Nu"], jets["Nv"]
    ex = lambda a: a[..., None]  # noqa: E731
    dX = {
        "X": ex(v) * N,
        "Xu": ex(pu) * N + ex(v) * Nu,
        "Xv": ex(pv) * N + ex(v) * Nv,
        "Xuu": ex(puu) * N + 2 * ex(pu) * Nu + ex(v) * jets["Nuu"],
        "Xuv": ex(puv) * N + ex(pu) * Nv + ex(pv) * Nu + ex(v) * jets["Nuv"],
        "Xvv": ex(pvv) * N + 2 * ex(pv) * Nv + ex(v) * jets["Nvv"],
    }
    rows = _regular_rows(kind, phi.coord)
    metric = CapMetric(0.0)
    keys = ("X", "Xu", "Xv", "Xuu", "Xuv", "Xvv")
    H, theta = {}, {}
    brows = _boundary_rows(kind, len(phi.coord) - 1)
    for sgn in (1, -1):
        args = [jets[k] + sgn * eps * dX[k] for k in keys]
        Hs, Ns = mean_curvature(metric, *[a[rows] for a in args], hint=N[rows])
        H[sgn] = Hs
        Nfull = np.zeros_like(N)
        Nfull[rows] = Ns
        theta[sgn] = np.array([boundary_angle(metric, args[0][b], Nfull[b]) for b in brows])
    jh_fd = (H[1] - H[-1]) / (2 * eps)
    jt_fd = (theta[1] - theta[-1]) / (2 * eps)

    if kind == "disk":
        r = phi.coord[:, None]
        lap = puu[rows] + pu[rows] / r[rows] + pvv[rows] / r[rows] ** 2
        jh = -lap
        jt = np.array([v[-1] - pu[-1]])
    else:
        t0 = critical_constants().t0
        t = phi.coord[:, None]
        jh = -cat_conformal_factor(t) * (2.0 / np.cosh(t) ** 2 * v + puu + pvv)
        jt = np.array([v[-1] - t0 * pu[-1], v[0] + t0 * pu[0]])
    return NormalPerturbationReport(kind, eps, jh_fd, jh, jt_fd, jt, rows)
