"""Robin eigenproblems for the critical disk and catenoid, mode by mode.

Each Fourier mode reduces to a Sturm-Liouville problem on an interval. The
problems are discretized by continuous piecewise-linear finite elements, so the
Robin conditions enter as natural boundary terms and the discrete problem
stays symmetric in the induced-metric inner product.

Near-zero eigenvalues are counted against ``zero_tol * (h / h_ref)**2``; the
reference spacing is that of the finest default grid.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import linalg
from scipy.interpolate import CubicHermiteSpline

from . import jacobi
from .geometry import CapMetric, boundary_angle, mean_curvature
from .oracles import riccati_even_decay
from .rotprofile import (
    ConvergenceError,
    critical_constants,
    profile_rhs_array,
    solve_critical_catenoid,
)

ZERO_TOL = 1e-6
REF_GRID = 1025
DEFAULT_LEVELS = (257, 513, 1025)
EIG_CAP = 200.0
MODE_LIMIT = 32
N_GAUSS = 8


class DiscretizationError(RuntimeError):
    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


def _check_grid(grid_size: int):
    if not jacobi._is_pow2_multiple(grid_size - 1, jacobi.BASE_COORD):
        raise jacobi.ResolutionError(
            f"grid_size - 1 must be a power-of-two multiple of {jacobi.BASE_COORD}, got {grid_size}"
        )


def _assemble(x: np.ndarray, p: Callable, q: Callable, m: Callable):
    """P1 matrices of  int p u'v' + q u v  and  int m u v  with Gauss quadrature."""
    gx, gw = np.polynomial.legendre.leggauss(N_GAUSS)
    a, b = x[:-1], x[1:]
    h = b - a
    pts = 0.5 * (a[:, None] + b[:, None]) + 0.5 * h[:, None] * gx[None, :]
    w = 0.5 * h[:, None] * gw[None, :]
    N2 = (pts - a[:, None]) / h[:, None]
    N1 = 1.0 - N2
    shape = (N1, N2)
    P, Q, Mw = p(pts) * w, q(pts) * w, m(pts) * w
    n = len(x)
    A = np.zeros((n, n))
    M = np.zeros((n, n))
    idx = np.arange(len(a))
    for i in range(2):
        for j in range(2):
            di = (-1) ** (i + 1) / h
            dj = (-1) ** (j + 1) / h
            ke = np.sum(P, axis=1) * di * dj + np.sum(Q * shape[i] * shape[j], axis=1)
            me = np.sum(Mw * shape[i] * shape[j], axis=1)
            np.add.at(A, (idx + i, idx + j), ke)
            np.add.at(M, (idx + i, idx + j), me)
    return A, M


def _solve(A, M, cap: float) -> tuple[np.ndarray, np.ndarray]:
    try:
        lam, vec = linalg.eigh(A, M, subset_by_value=(-np.inf, cap))
    except (linalg.LinAlgError, ValueError) as exc:
        raise DiscretizationError(
            "generalized eigensolve failed",
            {"cond_mass": float(np.linalg.cond(M)), "size": int(A.shape[0])},
        ) from exc
    return lam, vec


@dataclass
class ModeSolution:
    n: int
    nodes: np.ndarray
    eigenvalues: np.ndarray
    vectors: np.ndarray
    mass: np.ndarray = field(repr=False)

    def correlation(self, profile: np.ndarray, k: int) -> float:
        """Normalized M-inner product of eigenvector k with nodal samples."""
        v = self.vectors[:, k]
        if len(v) != len(profile):
            profile = profile[len(profile) - len(v):]
        num = abs(v @ self.mass @ profile)
        return float(num / math.sqrt((v @ self.mass @ v) * (profile @ self.mass @ profile)))


def catenoid_mode_problem(n: int, grid_size: int) -> ModeSolution:
    """-phi'' - f_n phi = lam r0^-2 cosh^2(t) phi on [-t0, t0] with Robin ends."""
    _check_grid(grid_size)
    consts = critical_constants()
    t0, r0 = consts.t0, consts.r0
    x = np.linspace(-t0, t0, grid_size)
    A, M = _assemble(
        x,
        p=np.ones_like,
        q=lambda t: -jacobi.mode_potential(n, t),
        m=lambda t: np.cosh(t) ** 2 / r0**2,
    )
    # phi'(+-t0) = +-phi/t0 turns the boundary terms into -phi^2/t0 at each end
    A[0, 0] -= 1.0 / t0
    A[-1, -1] -= 1.0 / t0
    lam, vec = _solve(A, M, EIG_CAP)
    return ModeSolution(n, x, lam, vec, M)


def disk_mode_problem(n: int, grid_size: int) -> ModeSolution:
    """-(r phi')' + n^2 phi / r = lam r phi on (0, 1], phi = d_r phi at r = 1.

    Mode 0 keeps the origin node (the natural condition there is regularity);
    modes n >= 1 pin phi(0) = 0.
    """
    _check_grid(grid_size)
    x = np.linspace(0.0, 1.0, grid_size)
    n2 = float(n * n)
    A, M = _assemble(x, p=lambda r: r, q=lambda r: n2 / r, m=lambda r: r)
    A[-1, -1] -= 1.0
    if n != 0:
        A, M, x_used = A[1:, 1:], M[1:, 1:], x[1:]
    else:
        x_used = x
    lam, vec = _solve(A, M, EIG_CAP)
    return ModeSolution(n, x_used, lam, vec, M)


def catenoid_mode_eigs(n: int, grid_size: int = REF_GRID) -> np.ndarray:
    return catenoid_mode_problem(abs(n), grid_size).eigenvalues


def disk_mode_eigs(n: int, grid_size: int = REF_GRID) -> np.ndarray:
    return disk_mode_problem(abs(n), grid_size).eigenvalues


def catenoid_rayleigh_bound(n: int) -> float:
    """Lower bound for the smallest eigenvalue of catenoid mode n.

    The quadratic form dominates (n^2 - 2 - k^2) times the flat L2 norm, where
    -k^2 bottoms the Robin problem for -d^2/dt^2; converting to the weighted
    norm uses r0^-2 cosh^2 t in [r0^-2, t0^-2].
    """
    consts = critical_constants()
    k = riccati_even_decay(consts.t0)
    c = n * n - 2.0 - k * k
    return c * consts.t0**2 if c >= 0 else c * consts.r0**2


SOLVERS = {"disk": disk_mode_problem, "catenoid": catenoid_mode_problem}


def zero_tolerance(grid_size: int, zero_tol: float = ZERO_TOL) -> float:
    return zero_tol * ((REF_GRID - 1) / (grid_size - 1)) ** 2


def _kernel_profile(surface: str, nodes: np.ndarray) -> np.ndarray:
    return nodes.copy() if surface == "disk" else jacobi.kernel_profile(nodes)[0]


@dataclass
class RefinementRow:
    grid_size: int
    nullity: int
    index: int
    smallest_abs: float
    zero_tol: float
    n_max: int


@dataclass
class SpectralReport:
    surface: str
    modes: dict[int, list[float]]
    nullity: int
    index: int
    refinement: list[RefinementRow]
    stable: bool
    h2_constant: float
    correlations: list[float]
    zero_tol: float

    @property
    def inconclusive(self) -> bool:
        return not self.stable

    def to_dict(self) -> dict:
        return {
            "surface": self.surface,
            "nullity": self.nullity,
            "index": self.index,
            "stable": self.stable,
            "inconclusive": self.inconclusive,
            "zero_tol": self.zero_tol,
            "h2_constant": self.h2_constant,
            "kernel_correlations": self.correlations,
            "modes": {str(n): v for n, v in sorted(self.modes.items())},
            "refinement": [asdict(r) for r in self.refinement],
        }


def _count_level(surface: str, grid_size: int, zero_tol: float):
    tol = zero_tolerance(grid_size, zero_tol)
    solver = SOLVERS[surface]
    nullity = index = 0
    smallest = math.inf
    quiet = 0
    sols = {}
    n = 0
    while quiet < 2:
        if n > MODE_LIMIT:
            raise DiscretizationError("mode search did not terminate", {"mode_limit": MODE_LIMIT})
        sol = solver(n, grid_size)
        sols[n] = sol
        lam = sol.eigenvalues
        mult = 1 if n == 0 else 2
        z = int(np.sum(np.abs(lam) < tol))
        neg = int(np.sum(lam < -tol))
        nullity += mult * z
        index += mult * neg
        if len(lam):
            smallest = min(smallest, float(np.min(np.abs(lam))))
        quiet = quiet + 1 if np.all(lam > tol) else 0
        n += 1
    return RefinementRow(grid_size, nullity, index, smallest, tol, n - 1), sols


def nullity_and_index(surface: str, levels: Sequence[int] = DEFAULT_LEVELS, zero_tol: float = ZERO_TOL) -> SpectralReport:
    """Nullity and index summed over Fourier modes at several refinement levels."""
    if surface not in SOLVERS:
        raise ValueError(f"unknown surface {surface!r}")
    if len(levels) < 2:
        raise ValueError("at least two refinement levels are needed")
    rows, finest = [], None
    for g in sorted(levels):
        row, sols = _count_level(surface, g, zero_tol)
        rows.append(row)
        finest = sols
    stable = len({(r.nullity, r.index) for r in rows}) == 1

    # smallest |lam| ~ C h^2 (least squares through the origin)
    h2 = np.array([(1.0 / (r.grid_size - 1)) ** 2 for r in rows])
    lam = np.array([r.smallest_abs for r in rows])
    C = float(h2 @ lam / (h2 @ h2))

    tol = rows[-1].zero_tol
    correlations = []
    for n, sol in finest.items():
        for k in np.flatnonzero(np.abs(sol.eigenvalues) < tol):
            correlations.append(sol.correlation(_kernel_profile(surface, sol.nodes), int(k)) if n == 1 else 0.0)

    modes = {n: [float(v) for v in sol.eigenvalues[:12]] for n, sol in finest.items()}
    return SpectralReport(
        surface, modes, rows[-1].nullity, rows[-1].index, rows, stable, C, correlations, zero_tol
    )


# --- semicontinuity probe ---------------------------------------------------------


@dataclass
class ProbeRow:
    t: float
    near_zero: int
    per_mode: dict[int, int]
    singular_values: dict[int, list[float]]
    ok: bool
    error: str = ""


def _chebyshev_basis(x: np.ndarray, K: int):
    """T_k(x) and its first two x-derivatives, k < K."""
    V = np.polynomial.chebyshev.chebvander(x, K - 1)
    eye = np.eye(K)
    d1 = np.stack([np.polynomial.chebyshev.chebval(x, np.polynomial.chebyshev.chebder(eye[k])) for k in range(K)], axis=1)
    d2 = np.stack([np.polynomial.chebyshev.chebval(x, np.polynomial.chebyshev.chebder(eye[k], 2)) for k in range(K)], axis=1)
    return V, d1, d2


def _profile_interpolant(profile):
    s, rho, drho = profile.s, profile.rho, profile.drho
    keep = np.concatenate([[True], np.diff(s) > 1e-12])
    return CubicHermiteSpline(s[keep], rho[keep], drho[keep]), CubicHermiteSpline(
        s[keep], drho[keep], profile.ddrho[keep]
    )


def probe_matrix(t: float, profile, n: int, K: int = 32, eps: float = 1e-4) -> np.ndarray:
    """Collocation matrix of the linearized (H, Theta) for mode-n displacements.

    Columns are Chebyshev displacements psi_k(s) cos(n th) (cos th, sin th, alpha(s));
    alpha is linear and makes the field tangent to the sphere at both ends, so
    the variations respect the free-boundary constraint to first order. Rows are
    the centered eps-differences of H at interior Gauss-Lobatto points and of
    Theta at the two ends, all on the th = 0 meridian.
    """
    s_lo, s_hi = float(profile.s[0]), float(profile.s[-1])
    rho_f, drho_f = _profile_interpolant(profile)
    x = np.cos(np.pi * np.arange(K - 1, -1, -1) / (K - 1))
    s = 0.5 * (s_hi - s_lo) * x + 0.5 * (s_hi + s_lo)
    ds = 2.0 / (s_hi - s_lo)
    V, d1, d2 = _chebyshev_basis(x, K)
    d1, d2 = d1 * ds, d2 * ds**2

    rho, p = rho_f(s), drho_f(s)
    rho[[0, -1]] = profile.rho[[0, -1]]
    p[[0, -1]] = profile.drho[[0, -1]]
    pp = profile_rhs_array(t, s, rho, p)
    a_lo, a_hi = -profile.rho[0] / s_lo, -profile.rho[-1] / s_hi
    alpha = a_lo + (a_hi - a_lo) * (s - s_lo) / (s_hi - s_lo)
    dalpha = (a_hi - a_lo) / (s_hi - s_lo)

    zero = np.zeros_like(s)
    one = np.ones_like(s)

    def v3(a, b, c):
        return np.stack(np.broadcast_arrays(a, b, c), axis=-1)

    # base jets at th = 0 (u = s, v = th)
    X = v3(rho, zero, s)
    Xu, Xv = v3(p, zero, one), v3(zero, rho, zero)
    Xuu, Xuv, Xvv = v3(pp, zero, zero), v3(zero, p, zero), v3(-rho, zero, zero)
    # W(th) = cos(n th)(cos th, sin th, alpha) and th-derivatives at th = 0
    W = v3(one, zero, alpha)
    Ws = v3(zero, zero, dalpha * one)
    Wv = v3(zero, one, zero)
    Wsv = v3(zero, zero, zero)
    Wvv = v3(-(1.0 + n * n) * one, zero, -n * n * alpha)

    metric = CapMetric(t)
    hint = v3(one, zero, zero)
    cols = []
    for k in range(K):
        psi, dpsi, ddpsi = V[:, k], d1[:, k], d2[:, k]
        e = lambda a: a[:, None]  # noqa: E731
        dX = e(psi) * W
        dXu = e(dpsi) * W + e(psi) * Ws
        dXv = e(psi) * Wv
        dXuu = e(ddpsi) * W + 2 * e(dpsi) * Ws
        dXuv = e(dpsi) * Wv + e(psi) * Wsv
        dXvv = e(psi) * Wvv
        out = []
        for sgn in (1.0, -1.0):
            se = sgn * eps
            args = (X + se * dX, Xu + se * dXu, Xv + se * dXv, Xuu + se * dXuu, Xuv + se * dXuv, Xvv + se * dXvv)
            H, N = mean_curvature(metric, *args, hint=hint)
            th = boundary_angle(metric, args[0][[0, -1]], N[[0, -1]])
            out.append(np.concatenate([H[1:-1], th]))
        cols.append((out[0] - out[1]) / (2 * eps))
    return np.array(cols).T


@dataclass(frozen=True)
class ProbeConfig:
    K: int = 32
    eps: float = 1e-4
    rel_threshold: float = 1e-6
    n_modes: int = 4


def semicontinuity_probe(t_list: Sequence[float], config: ProbeConfig = ProbeConfig()) -> list[ProbeRow]:
    """Count near-zero singular values of the FD-assembled Jacobi form per t.

    A singular value is near zero when it is below ``rel_threshold`` times the
    median singular value of its mode block. Modes n >= 1 count twice: the
    sin(n th) block is the cos(n th) block rotated by pi/(2n).
    """
    rows = []
    guess = None
    for t in t_list:
        try:
            sol = solve_critical_catenoid(t, guess=guess)
            guess = (sol.a, sol.b)
        except ConvergenceError as exc:
            rows.append(ProbeRow(float(t), -1, {}, {}, False, str(exc)))
            continue
        per_mode, svals = {}, {}
        total = 0
        for n in range(config.n_modes):
            sv = linalg.svdvals(probe_matrix(t, sol.profile, n, config.K, config.eps))
            scale = float(np.median(sv))
            count = int(np.sum(sv < config.rel_threshold * scale))
            per_mode[n] = count
            svals[n] = [float(v) for v in np.sort(sv)[:3]]
            total += count if n == 0 else 2 * count
        rows.append(ProbeRow(float(t), total, per_mode, svals, total == 2))
    return rows
