import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fbannulus import oracles
from fbannulus import rotprofile as rp

T0 = 1.199678640257734
R0 = 2.171622980887501
# a(t) on t = 0, 0.05, ..., 0.30 from the reference run of the continuation solver
A_SWEEP = [
    2.171622980887502,
    2.1707869028729863,
    2.168271156441891,
    2.1640529066745304,
    2.1580930759693,
    2.1503347130649915,
    2.1407004935023206,
]


@pytest.fixture(scope="module")
def sol0():
    return rp.solve_critical_catenoid(0.0)


def test_constants():
    c = rp.critical_constants()
    assert abs(c.t0 - 1 / math.tanh(c.t0)) < 1e-12
    assert c.t0 == pytest.approx(oracles.t0_by_bisection(), abs=1e-13)
    assert c.t0 == pytest.approx(T0, abs=1e-13)
    assert c.r0 == pytest.approx(c.t0 * math.cosh(c.t0), abs=1e-13)
    assert c.r0 > c.t0 > 1
    assert c.residual < 1e-14


@given(st.floats(-0.6, 0.6), st.floats(0.2, 0.9), st.floats(-2.0, 2.0))
def test_rhs_is_catenary_at_t0(s, rho, p):
    assert rp.profile_rhs(0.0, s, rho, p) == pytest.approx((1 + p * p) / rho, rel=1e-14)


def test_profile_matches_catenary_at_t0():
    prof = rp.minimal_profile_ode(0.0, R0, 0.1)
    rho, _ = rp.euclid_catenoid(R0, 0.1, prof.s)
    assert np.abs(prof.rho - rho).max() < 1e-10


def test_boundary_angle_sign_pattern():
    # off-centre catenary: angles of opposite sign; too-thin catenary: same sign
    th = rp.angle_residuals(0.0, R0, 0.1)
    assert th[0] * th[1] < 0
    th = rp.angle_residuals(0.0, 1.5 * R0, 0.0)
    assert th[0] * th[1] > 0


@given(st.floats(-0.8, 0.8), st.floats(0.05, 1.0).map(lambda a: a * math.pi / 2.2), st.floats(-3, 3))
def test_boundary_angle_closed_form(t, phi, p):
    s, rho = math.sin(phi), math.cos(phi)
    w = rho - p * s
    expected = w * math.sqrt(1 - t * t) / math.sqrt(1 + p * p - t * t * w * w)
    assert rp.boundary_normal_angle(t, s, rho, p) == pytest.approx(expected, abs=1e-12)


def test_critical_catenoid_at_t0(sol0):
    assert sol0.a == pytest.approx(R0, abs=1e-8)
    assert abs(sol0.b) < 1e-8
    hits = rp.boundary_hit(0.0, sol0.profile)
    # the catenoid meets the sphere where r0 s = t0, so rho = 1/t0
    assert hits["upper"].s_star == pytest.approx(T0 / R0, abs=1e-9)
    assert hits["upper"].rho == pytest.approx(1 / T0, abs=1e-9)
    assert hits["lower"].s_star == pytest.approx(-T0 / R0, abs=1e-9)
    assert max(abs(sol0.theta_plus), abs(sol0.theta_minus)) < 1e-10


@pytest.mark.parametrize("t", [0.1, 0.25])
def test_critical_catenoid_in_cap_metric(t):
    sol = rp.solve_critical_catenoid(t)
    assert sol.max_mean_curvature < 1e-7
    assert abs(sol.b) < 1e-8
    assert max(abs(sol.theta_plus), abs(sol.theta_minus)) < 1e-10
    assert sol.a == pytest.approx(A_SWEEP[round(t / 0.05)], abs=1e-8)


def test_sweep_is_even_and_matches_reference():
    rows = rp.sweep([0.0, 0.15, -0.15])
    assert all(r.ok for r in rows)
    assert rows[1].a == pytest.approx(A_SWEEP[3], abs=1e-8)
    assert rows[2].a == pytest.approx(rows[1].a, abs=1e-10)


def test_out_of_range_is_reported():
    with pytest.raises(rp.ConvergenceError) as info:
        rp.solve_critical_catenoid(0.9)
    assert info.value.history[0]["reason"] == "out_of_range"
    rows = rp.sweep([0.9])
    assert not rows[0].ok and rows[0].error


def test_mean_curvature_rot_on_sphere():
    s = np.array([-0.2, 0.0, 0.3])
    R = 0.5
    rho = np.sqrt(R * R - s * s)
    drho = -s / rho
    ddrho = -(R * R) / rho**3
    assert np.allclose(rp.mean_curvature_rot(0.0, s, rho, drho, ddrho), 2 / R)


def test_apex_outside_ball_raises():
    with pytest.raises(rp.NoExitError):
        rp.minimal_profile_ode(0.0, 0.9, 0.0)
    with pytest.raises(ValueError):
        rp.minimal_profile_ode(0.0, -1.0, 0.0)
