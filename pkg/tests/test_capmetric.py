import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fbannulus import capmetric as cm
from fbannulus import oracles

ts = st.floats(-0.95, 0.95)


@st.composite
def ball_points(draw, radius=0.99):
    v = np.array([draw(st.floats(-1, 1)) for _ in range(3)])
    r = draw(st.floats(0, radius))
    n = np.linalg.norm(v)
    return v / n * r if n > 1e-3 else np.zeros(3)


def test_flat_at_origin():
    assert np.allclose(cm.metric_at(0.7, np.zeros(3)), np.eye(3))
    assert np.allclose(cm.metric_at(0.0, [0.3, 0.1, -0.5]), np.eye(3))


@given(ts, ball_points())
def test_metric_is_spd_with_closed_form_inverse(t, x):
    g = cm.metric_at(t, x)
    assert np.allclose(g, g.T)
    assert np.linalg.eigvalsh(g).min() > 0
    # g^{-1} = I - t^2 x x^T
    assert np.allclose(g @ (np.eye(3) - t * t * np.outer(x, x)), np.eye(3), atol=1e-10)


@given(ts, ball_points())
def test_christoffel_closed_form(t, x):
    # Gamma^k_ij = t^2 x_k g_ij
    expected = t * t * np.einsum("k,ij->kij", x, cm.metric_at(t, x))
    assert np.allclose(cm.christoffel(t, x), expected, atol=1e-10)


@pytest.mark.parametrize("t", [0.2, 0.5, 0.8])
def test_christoffel_matches_fd(t):
    x = np.array([0.3, -0.2, 0.5])
    fd = oracles.fd_christoffel(lambda y: cm.metric_at(t, y), x, 1e-5)
    assert np.allclose(cm.christoffel(t, x), fd, atol=1e-9)


@given(ts, ball_points(0.95))
def test_ricci_is_einstein(t, x):
    assert np.allclose(cm.ricci_at(t, x), 2 * t * t * cm.metric_at(t, x), atol=1e-9)


def test_fd_ricci_converges_second_order():
    t, x = 0.5, np.array([0.2, 0.4, -0.3])
    exact = 2 * t * t * cm.metric_at(t, x)
    errs = [np.abs(oracles.cap_ricci_fd(t, x, h) - exact).max() for h in (1e-2, 5e-3, 2.5e-3)]
    for e0, e1 in zip(errs, errs[1:]):
        assert e0 / e1 == pytest.approx(4.0, rel=0.1)


def test_pullback_agrees_to_second_order():
    t, x = 0.6, np.array([0.1, -0.5, 0.4])
    g = cm.metric_at(t, x)
    errs = [np.abs(oracles.pullback_metric(t, x, h) - g).max() for h in (1e-2, 5e-3, 2.5e-3)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.1)


@given(st.floats(0.05, 0.95).filter(lambda t: abs(t) > 0.05), ball_points(1.0))
def test_embedding_lands_on_the_sphere(t, x):
    e = cm.embed_sphere(t, x)
    assert np.linalg.norm(e - cm.sphere_center(t)) == pytest.approx(1 / abs(t), rel=1e-12)
    assert np.allclose(e[:3], x)


def test_domain_errors():
    with pytest.raises(cm.DomainError):
        cm.metric_at(1.0, np.zeros(3))
    with pytest.raises(cm.DomainError):
        cm.metric_at(0.9, [1.2, 0.0, 0.0])
    with pytest.raises(cm.DomainError):
        cm.embed_sphere(0.0, np.zeros(3))
    with pytest.raises(cm.DomainError):
        cm.sphere_center(0.0)
    with pytest.raises(ValueError):
        cm.metric_at(0.1, [1.0, 2.0])
    assert np.allclose(cm.embed_flat([1, 2, 3]), [1, 2, 3, 0])


def test_metric_sample_consistency():
    s = cm.MetricSample.at(0.4, [0.1, 0.2, 0.3])
    assert np.allclose(s.ric, 2 * 0.16 * s.g)
    assert np.allclose(s.gamma, cm.christoffel_from_jet(s.g, s.dg))


def test_metric_jet_second_partials_match_fd():
    t, x, h = 0.7, np.array([0.3, 0.1, -0.4]), 1e-5
    _, dg, ddg = cm.metric_jet(t, x)
    for l in range(3):
        e = np.zeros(3)
        e[l] = h
        fd = (cm.metric_jet(t, x + e)[1] - cm.metric_jet(t, x - e)[1]) / (2 * h)
        assert np.allclose(ddg[l], fd, atol=1e-8)


def test_convexity_margin():
    # min over the ball of the Hess(|x|^2) eigenvalue is 2 - 4 t^2 (attained at the rim)
    assert cm.convexity_margin(0.0) == pytest.approx(2.0)
    assert cm.convexity_margin(0.5) == pytest.approx(1.0, abs=1e-12)
    assert cm.convexity_margin(0.8) == pytest.approx(2 - 4 * 0.64, abs=1e-12)


def test_conformal_ricci_derivative_of_squared_norm():
    h = cm.squared_norm_field()
    # (n - 2) * 2 I + 6 I at t = 0
    assert np.allclose(cm.conformal_ricci_derivative(h, 0.0, [0.2, 0.1, 0.3]), 8 * np.eye(3))


def _field():
    return cm.AmbientScalar(lambda x: np.sin(x[0]) + x[1] * x[2] ** 2, name="f")


def test_conformal_ricci_is_quadratic_in_s():
    h, t, x = _field(), 0.5, np.array([0.2, -0.3, 0.4])
    r = [cm.conformal_ricci(h, t, x, s) for s in (-0.2, -0.1, 0.0, 0.1, 0.2)]
    third = r[4] - 2 * r[3] + 2 * r[1] - r[0]
    assert np.abs(third).max() < 1e-12
    exact = cm.conformal_ricci_derivative(h, t, x)
    assert np.abs(oracles.conformal_ricci_derivative_fd(h, t, x, 1e-2) - exact).max() < 1e-6


def test_conformal_ricci_derivative_spatial_fd_second_order():
    h, t, x = _field(), 0.5, np.array([0.2, -0.3, 0.4])
    exact = cm.conformal_ricci_derivative(h, t, x)
    errs = [np.abs(oracles.conformal_ricci_derivative_spatial_fd(h, t, x, s) - exact).max() for s in (2e-2, 1e-2, 5e-3)]
    for e0, e1 in zip(errs, errs[1:]):
        assert e0 / e1 == pytest.approx(4.0, rel=0.05)


def test_ambient_scalar_fd_fallbacks():
    f = cm.AmbientScalar(lambda x: x[..., 0] ** 2 * x[..., 1] + np.exp(x[..., 2]))
    x = np.array([0.3, -0.2, 0.1])
    grad = np.array([2 * x[0] * x[1], x[0] ** 2, np.exp(x[2])])
    hess = np.array([[2 * x[1], 2 * x[0], 0], [2 * x[0], 0, 0], [0, 0, np.exp(x[2])]])
    assert np.allclose(f.gradient(x), grad, atol=1e-8)
    assert np.allclose(f.hessian(x), hess, atol=1e-6)
    X = np.stack([x, -x])
    assert f.values(X).shape == (2,)
    assert np.allclose(f.gradient(X)[0], grad, atol=1e-8)


def test_sample_ball():
    pts = cm.sample_ball(5, 16, 0.9)
    assert pts.shape == (1 + 4 * 16, 3)
    assert np.linalg.norm(pts, axis=1).max() == pytest.approx(0.9)
