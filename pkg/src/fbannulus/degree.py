"""Degree bookkeeping for non-degenerate families.

A non-degenerate family Z contributes ``(-1)**index * chi(Z)``. Euler
characteristics are tabulated; :func:`morse_euler_oracle` recomputes them by
counting critical points of random functions, as an executable cross-check.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Mapping, Optional, Union

import numpy as np

EULER = {"S2": 2, "RP2": 1, "RP2_pair": 2}
TOPOLOGIES = ("disk", "annulus", "other")


class MissingReportError(KeyError):
    pass


class OracleDisagreement(RuntimeError):
    pass


def _check_manifold(manifold: str):
    if manifold not in EULER:
        raise ValueError(f"unknown manifold tag {manifold!r}; expected one of {sorted(EULER)}")


def family_contribution(index: int, manifold: str) -> int:
    _check_manifold(manifold)
    if index < 0:
        raise ValueError("index must be nonnegative")
    return (-1) ** int(index) * EULER[manifold]


@dataclass(frozen=True)
class FamilyRecord:
    manifold: str
    index: int
    euler: int = 0
    contribution: int = 0

    def __post_init__(self):
        _check_manifold(self.manifold)
        object.__setattr__(self, "euler", EULER[self.manifold])
        object.__setattr__(self, "contribution", family_contribution(self.index, self.manifold))


@dataclass
class DegreeLedger:
    topology: str
    records: list[FamilyRecord] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(r.contribution for r in self.records)

    def to_dict(self) -> dict:
        return {
            "topology": self.topology,
            "records": [asdict(r) for r in self.records],
            "total": self.total,
            "abs_total": abs(self.total),
        }


IndexSource = Union[int, "object"]


def _index_of(report) -> int:
    return int(report if isinstance(report, (int, np.integer)) else report.index)


def assemble_degree(topology: str, reports: Optional[Mapping[str, IndexSource]] = None) -> DegreeLedger:
    """Ledger for a topology; ``reports`` maps 'disk'/'catenoid' to an index or a SpectralReport.

    The annulus family consists of the two orientations of the critical catenoid
    (two copies of RP^2); both share one spectrum and hence one index.
    """
    if topology not in TOPOLOGIES:
        raise ValueError(f"unknown topology {topology!r}")
    reports = reports or {}
    if topology == "other":
        return DegreeLedger("other")
    key, manifold = ("disk", "S2") if topology == "disk" else ("catenoid", "RP2_pair")
    if key not in reports:
        raise MissingReportError(f"{topology} degree needs the {key} index")
    return DegreeLedger(topology, [FamilyRecord(manifold, _index_of(reports[key]))])


# --- Morse oracle -------------------------------------------------------------


def fibonacci_sphere(n: int) -> np.ndarray:
    k = np.arange(n) + 0.5
    polar = np.arccos(1.0 - 2.0 * k / n)
    azim = np.pi * (1.0 + 5.0**0.5) * k
    return np.stack([np.sin(polar) * np.cos(azim), np.sin(polar) * np.sin(azim), np.cos(polar)], axis=1)


def _monomials(degrees) -> np.ndarray:
    return np.array([(i, j, d - i - j) for d in degrees for i in range(d + 1) for j in range(d + 1 - i)])


@dataclass
class PolynomialField:
    """f(x) = sum_k c_k x^(e_k) restricted to the unit sphere."""

    exponents: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        E = np.asarray(self.exponents, dtype=int)
        eye = np.eye(3, dtype=int)
        # d_i x^e = e_i x^(e - e_i); negative exponents only occur with a zero factor
        self._gE = np.maximum(E[None] - eye[:, None], 0)
        self._gC = E.T * self.coeffs[None]
        self._hE = np.maximum(E[None, None] - eye[:, None, None] - eye[None, :, None], 0)
        self._hC = self._gC[:, None] * np.maximum(E.T[None] - eye[:, :, None], 0)

    @staticmethod
    def _mono(X, E):
        # gather from a table of powers instead of raising to an exponent array
        P = X[:, :, None] ** np.arange(int(E.max()) + 1)
        return P[:, 0, E[..., 0]] * P[:, 1, E[..., 1]] * P[:, 2, E[..., 2]]

    def value(self, X):
        return self._mono(X, np.asarray(self.exponents)) @ self.coeffs

    def grad_hess(self, X):
        G = np.einsum("nik,ik->ni", self._mono(X, self._gE), self._gC)
        H = np.einsum("nijk,ijk->nij", self._mono(X, self._hE), self._hC)
        return G, H


def random_field(manifold: str, rng: np.random.Generator) -> PolynomialField:
    """Random low-degree polynomial; only even degrees for RP^2 so it descends."""
    degrees = (1, 2, 3) if manifold == "S2" else (2, 4)
    E = _monomials(degrees)
    return PolynomialField(E, rng.standard_normal(len(E)))


def height_field() -> PolynomialField:
    return PolynomialField(np.array([[0, 0, 1]]), np.array([1.0]))


@dataclass
class CriticalPoint:
    x: np.ndarray
    index: int
    min_abs_eig: float


def critical_points(f: PolynomialField, n_seeds: int = 800, iters: int = 30,
                    tol: float = 1e-11) -> list[CriticalPoint]:
    """Critical points on S^2 by Newton on grad f = mu x, |x|^2 = 1 from a Fibonacci mesh."""
    X = fibonacci_sphere(n_seeds)
    G, _ = f.grad_hess(X)
    mu = np.einsum("ni,ni->n", G, X)
    for _ in range(iters):
        G, H = f.grad_hess(X)
        F = np.concatenate([G - mu[:, None] * X, (np.einsum("ni,ni->n", X, X) - 1.0)[:, None]], axis=1)
        J = np.zeros((len(X), 4, 4))
        J[:, :3, :3] = H - mu[:, None, None] * np.eye(3)
        J[:, :3, 3] = -X
        J[:, 3, :3] = 2 * X
        ok = np.abs(np.linalg.det(J)) > 1e-14
        step = np.zeros_like(F)
        step[ok] = np.linalg.solve(J[ok], F[ok][..., None])[..., 0]
        X = X - step[:, :3]
        mu = mu - step[:, 3]
        X /= np.linalg.norm(X, axis=1, keepdims=True)
    G, H = f.grad_hess(X)
    tang = G - np.einsum("ni,ni->n", G, X)[:, None] * X
    good = np.linalg.norm(tang, axis=1) < tol * max(1.0, float(np.abs(f.coeffs).max()))
    found: list[CriticalPoint] = []
    for x, h, m in zip(X[good], H[good], mu[good]):
        if any(np.linalg.norm(x - c.x) < 1e-6 for c in found):
            continue
        # tangent-plane Hessian of f restricted to the sphere: P (Hess f - mu I) P
        basis = np.linalg.svd(np.eye(3) - np.outer(x, x))[0][:, :2]
        eig = np.linalg.eigvalsh(basis.T @ (h - m * np.eye(3)) @ basis)
        found.append(CriticalPoint(x, int(np.sum(eig < 0)), float(np.min(np.abs(eig)))))
    return found


def _canonical(x: np.ndarray) -> np.ndarray:
    """Representative of {x, -x}: first coordinate of size > 1e-9 made positive."""
    for v in x:
        if abs(v) > 1e-9:
            return x if v > 0 else -x
    return x


def euler_from_critical_points(points: list[CriticalPoint], manifold: str) -> int:
    if manifold == "RP2":
        reps: list[CriticalPoint] = []
        for p in points:
            c = _canonical(p.x)
            if not any(np.linalg.norm(c - q.x) < 1e-6 for q in reps):
                reps.append(CriticalPoint(c, p.index, p.min_abs_eig))
        points = reps
    return sum((-1) ** p.index for p in points)


@dataclass
class MorseTrial:
    trial: int
    value: Optional[int]
    n_critical: int
    resamples: int
    discarded: bool


def morse_trial(manifold: str, trial: int, seed: int = 0, max_resample: int = 10,
                degeneracy_tol: float = 1e-4) -> MorseTrial:
    """One seeded trial; degenerate samples are redrawn up to ``max_resample`` times."""
    for attempt in range(max_resample + 1):
        rng = np.random.default_rng([seed, trial, attempt])
        f = random_field(manifold, rng)
        pts = critical_points(f)
        scale = float(np.abs(f.coeffs).max())
        if pts and min(p.min_abs_eig for p in pts) > degeneracy_tol * scale:
            return MorseTrial(trial, euler_from_critical_points(pts, manifold), len(pts), attempt, False)
    return MorseTrial(trial, None, 0, max_resample, True)


def morse_euler_oracle(manifold: str, trial_count: int = 20, seed: int = 0) -> int:
    """Euler characteristic of S2 or RP2 as the common alternating count over trials."""
    if manifold not in ("S2", "RP2"):
        raise ValueError("the Morse oracle handles 'S2' and 'RP2'")
    if trial_count < 1:
        raise ValueError("trial_count must be at least 1")
    trials = [morse_trial(manifold, k, seed) for k in range(trial_count)]
    values = {t.value for t in trials if not t.discarded}
    if not values:
        raise OracleDisagreement("every trial was degenerate")
    if len(values) > 1:
        raise OracleDisagreement(f"trials disagree: {sorted(values)}")
    return values.pop()
