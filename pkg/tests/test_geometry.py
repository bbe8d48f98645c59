import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fbannulus import capmetric as cm
from fbannulus import geometry as geo
from fbannulus import oracles


def sphere_jets(R, u, v):
    """Round sphere of radius R in polar angle u, azimuth v."""
    su, cu, sv, cv = np.sin(u), np.cos(u), np.sin(v), np.cos(v)
    X = R * np.array([su * cv, su * sv, cu])
    Xu = R * np.array([cu * cv, cu * sv, -su])
    Xv = R * np.array([-su * sv, su * cv, 0.0])
    Xuu = -X
    Xuv = R * np.array([-cu * sv, cu * cv, 0.0])
    Xvv = R * np.array([-su * cv, -su * sv, 0.0])
    return X, Xu, Xv, Xuu, Xuv, Xvv


@pytest.mark.parametrize("R", [0.5, 0.8])
def test_round_sphere_mean_curvature_sign(R):
    X, *rest = sphere_jets(R, 0.7, 1.3)
    H, N = geo.mean_curvature(geo.CapMetric(0.0), X, *rest, hint=X)
    assert H == pytest.approx(2 / R, rel=1e-12)
    assert np.allclose(N, X / R)


def test_flat_disk_is_minimal_in_every_cap_metric():
    r, th = 0.6, 0.4
    X = np.array([r * np.cos(th), r * np.sin(th), 0.0])
    Xu = np.array([np.cos(th), np.sin(th), 0.0])
    Xv = np.array([-r * np.sin(th), r * np.cos(th), 0.0])
    zero = np.zeros(3)
    Xvv = -X
    Xuv = np.array([-np.sin(th), np.cos(th), 0.0])
    for t in (0.0, 0.3, 0.7):
        H, N = geo.mean_curvature(geo.CapMetric(t), X, Xu, Xv, zero, Xuv, Xvv, hint=np.array([0, 0, 1.0]))
        assert abs(H) < 1e-13
        rim = np.array([1.0, 0.0, 0.0])
        assert abs(geo.boundary_angle(geo.CapMetric(t), rim, N)) < 1e-14


@given(st.floats(-0.9, 0.9), st.floats(0, 2 * np.pi), st.floats(0.05, 3.0))
def test_unit_normal_is_g_unit_and_orthogonal(t, a, b):
    metric = geo.CapMetric(t)
    X = 0.5 * np.array([np.cos(a), np.sin(a), 0.3])
    Xu = np.array([np.cos(b), 0.2, np.sin(b)])
    Xv = np.array([-0.1, 1.0, 0.4])
    N = geo.unit_normal(metric, X, Xu, Xv)
    g = metric.metric(X)
    assert N @ g @ N == pytest.approx(1.0)
    assert abs(N @ g @ Xu) < 1e-12 and abs(N @ g @ Xv) < 1e-12


def test_batched_cap_metric_matches_pointwise():
    X = cm.sample_ball(3, 8, 0.9)
    metric = geo.CapMetric(0.6)
    for x, g, gam in zip(X, metric.metric(X), metric.christoffel(X)):
        assert np.allclose(g, cm.metric_at(0.6, x))
        assert np.allclose(gam, cm.christoffel(0.6, x))


def test_conformal_christoffel_matches_fd():
    phi = lambda X: np.sin(X[..., 0]) + X[..., 2] ** 2  # noqa: E731
    grad = lambda X: np.stack([np.cos(X[..., 0]), 0 * X[..., 1], 2 * X[..., 2]], axis=-1)  # noqa: E731
    metric = geo.ConformalMetric(geo.CapMetric(0.5), phi, grad, 0.3)
    x = np.array([0.2, -0.1, 0.4])
    fd = oracles.fd_christoffel(metric.metric, x, 1e-5)
    assert np.allclose(metric.christoffel(x), fd, atol=1e-9)


def test_sphere_normal_is_outward_unit():
    metric = geo.CapMetric(0.7)
    x = np.array([0.6, 0.0, 0.8])
    nu = geo.sphere_normal(metric, x)
    g = metric.metric(x)
    assert nu @ g @ nu == pytest.approx(1.0)
    assert nu @ x > 0
    # nu is g-orthogonal to the sphere's tangent vectors
    assert abs(nu @ g @ np.array([0.0, 1.0, 0.0])) < 1e-14
    assert abs(nu @ g @ np.array([0.8, 0.0, -0.6])) < 1e-14
