import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linekit.kahler import (D_ETA, D_ETABAR, D_XI, D_XIBAR, ConformalFactor, J_apply,
                            J_matrix, angular_momentum, christoffel, curvature_report,
                            kahler_potential, metric_derivatives, metric_form, metric_G,
                            omega, omega_jacobi, omega_matrix, round_sphere_factor,
                            theta, theta_covector)
from linekit.linespace import FLIPPED, OrientedLine, TangentT, direction, jacobi_decompose
from linekit.numerics import FDScheme, jacobian_fd

coord = st.floats(-2.0, 2.0)
lines = st.builds(lambda a, b, c, d: OrientedLine(complex(a, b), complex(c, d)),
                  coord, coord, coord, coord)


def tangent(line, a, b, c, d):
    return TangentT(line, complex(a, b), complex(c, d))


def test_J_example_and_square():
    v = J_apply(TangentT(OrientedLine(0, 0), 1, 0))
    assert (v.xidot, v.etadot) == (1j, 0)
    assert np.allclose(J_matrix() @ J_matrix(), -np.eye(4))


@settings(max_examples=50, deadline=None)
@given(lines, coord, coord, coord, coord)
def test_J_rotates_jacobi_fields(line, a, b, c, d):
    v = tangent(line, a, b, c, d)
    X, Y = jacobi_decompose(v), jacobi_decompose(J_apply(v))
    e0 = direction(line)
    assert np.allclose(Y.X1, np.cross(e0, X.X1), atol=1e-10)
    assert np.allclose(Y.X2, np.cross(e0, X.X2), atol=1e-10)
    w = J_apply(J_apply(v))
    assert np.allclose(w.coords, -v.coords)


def test_omega_at_origin():
    base = OrientedLine(0, 0)
    assert omega(base, TangentT(base, 0, 1), TangentT(base, 1, 0)) == pytest.approx(2.0)


@settings(max_examples=100, deadline=None)
@given(lines)
def test_omega_complex_component(line):
    # complexified component, in the tensor normalisation (twice ours)
    Om = omega_matrix(line)
    xi, eta = line.xi, line.eta
    expected = 4 * (xi * eta.conjugate() - xi.conjugate() * eta) / (1 + abs(xi) ** 2) ** 3
    assert 2 * (D_XI @ Om @ D_XIBAR) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(lines, coord, coord, coord, coord, coord, coord, coord, coord)
def test_kahler_triple(line, a, b, c, d, e, f, g, h):
    v, w = tangent(line, a, b, c, d), tangent(line, e, f, g, h)
    assert abs(omega(line, v, v)) < 1e-12
    assert metric_form(v, w) == pytest.approx(omega(line, J_apply(v), w), abs=1e-10)
    assert omega(line, J_apply(v), J_apply(w)) == pytest.approx(omega(line, v, w), abs=1e-10)
    assert omega_jacobi(v, w) == pytest.approx(omega(line, v, w), abs=1e-9)
    assert angular_momentum(v) == pytest.approx(metric_form(v, v), abs=1e-8)


def test_metric_at_origin():
    G = metric_G(OrientedLine(0, 0))
    rng = np.random.default_rng(3)
    for V in rng.normal(size=(5, 4)):
        assert V @ G @ V == pytest.approx(4 * (V[2] * V[1] - V[3] * V[0]))
    base = OrientedLine(0, 0)
    v = TangentT(base, 1j, 1)
    assert metric_form(v, v) == pytest.approx(4.0)
    assert angular_momentum(v) == pytest.approx(4.0)
    assert angular_momentum(TangentT(base, 0, 1 + 2j)) == 0


@settings(max_examples=200, deadline=None)
@given(lines)
def test_neutral_signature(line):
    ev = np.linalg.eigvalsh(metric_G(line))
    assert np.sum(ev > 0) == 2 and np.sum(ev < 0) == 2


def test_theta_examples():
    line = OrientedLine(0.4 - 0.2j, 0)
    assert theta(line, TangentT(line, 1.5, 2j)) == 0
    line = OrientedLine(0, 1)
    assert theta(line, TangentT(line, 1, 0)) == pytest.approx(4.0)


def test_theta_is_chart_independent():
    line = OrientedLine(0.7 + 0.5j, -0.3 + 1.1j)
    other = line.in_chart(FLIPPED)
    J = jacobian_fd(lambda x: OrientedLine.from_coords(x).in_chart(FLIPPED).coords, line.coords)
    assert np.allclose(theta_covector(other) @ J, theta_covector(line), atol=1e-9)


def _ext_derivative(covector, x):
    dth = jacobian_fd(covector, x)  # dth[j, i] = d_i theta_j
    return 0.5 * (dth - dth.T).T


@settings(max_examples=30, deadline=None)
@given(lines)
def test_d_theta_is_omega(line):
    dth = _ext_derivative(lambda x: theta_covector(OrientedLine.from_coords(x)), line.coords)
    assert np.allclose(dth, omega_matrix(line), atol=1e-6)


@settings(max_examples=20, deadline=None)
@given(lines)
def test_omega_closed(line):
    dOm = jacobian_fd(lambda x: omega_matrix(OrientedLine.from_coords(x)), line.coords)
    cyc = dOm + np.transpose(dOm, (1, 2, 0)) + np.transpose(dOm, (2, 0, 1))
    assert np.max(np.abs(cyc)) < 1e-6


def test_kahler_potential_examples():
    assert kahler_potential(OrientedLine(0.5 + 0.1j, 0)) == 0
    assert kahler_potential(OrientedLine(0, 1 - 1j)) == 0
    assert kahler_potential(OrientedLine(1, 1j)) == pytest.approx(2.0)


@settings(max_examples=20, deadline=None)
@given(lines)
def test_kahler_potential_hessian(line):
    # mixed complex second derivatives equal -2 G(d_a, d_bbar)
    H = jacobian_fd(lambda x: jacobian_fd(lambda y: kahler_potential(OrientedLine.from_coords(y)), x,
                                          FDScheme(1e-3)), line.coords, FDScheme(1e-3))
    G = metric_G(line)
    for da, db in ((D_XI, D_XIBAR), (D_XI, D_ETABAR), (D_ETA, D_XIBAR), (D_ETA, D_ETABAR)):
        h = da @ H @ db
        g = -2 * (da @ G @ db)
        assert abs(h - g) <= 1e-6 * max(1.0, abs(g))


@settings(max_examples=30, deadline=None)
@given(lines)
def test_metric_derivatives_match_fd(line):
    fd = jacobian_fd(lambda x: metric_G(OrientedLine.from_coords(x)), line.coords)
    assert np.allclose(np.moveaxis(fd, -1, 0), metric_derivatives(line), atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(lines)
def test_christoffel_properties(line):
    gam = christoffel(line)
    assert np.allclose(gam, np.transpose(gam, (0, 2, 1)), atol=1e-14)
    g, dg = metric_G(line), metric_derivatives(line)
    # d_k g_ij = Gamma^l_ki g_lj + Gamma^l_kj g_il
    rhs = np.einsum("lki,lj->kij", gam, g) + np.einsum("lkj,il->kij", gam, g)
    assert np.max(np.abs(dg - rhs)) < 1e-9 * max(1.0, np.max(np.abs(dg)))
    assert np.max(np.abs(gam[2:, 2:, 2:])) < 1e-12


def test_christoffel_at_origin():
    gam = christoffel(OrientedLine(0, 0))
    assert np.max(np.abs(gam[:2, :2, :2])) < 1e-15


@pytest.mark.parametrize("xi, eta", [(0.3 - 0.4j, 0.5 + 0.2j), (1.2 + 0.1j, -0.7j)])
def test_round_sphere_curvature(xi, eta):
    rep = curvature_report(round_sphere_factor(), xi, eta)
    D = 1 + abs(xi) ** 2
    assert rep.gauss_base == pytest.approx(2.0)
    assert rep.ricci_xixibar == pytest.approx(4 / D ** 2, rel=1e-12)
    assert rep.ricci_numeric == pytest.approx(4 / D ** 2, rel=1e-6)
    assert abs(rep.scalar) < 1e-6
    assert abs(rep.conformal_component) < 1e-12
    assert rep.weyl_max < 1e-6


def test_flat_factor_is_einstein():
    flat = ConformalFactor(u=lambda z: 0.0, du=lambda z: 0.0, ddbar_u=lambda z: 0.0)
    rep = curvature_report(flat, 0.2 + 0.1j, 0.3 - 0.5j)
    assert rep.gauss_base == 0
    assert rep.ricci_xixibar == 0
    assert abs(rep.ricci_numeric) < 1e-8
    assert abs(rep.scalar) < 1e-6


def test_nonconstant_curvature_is_not_conformally_flat():
    u = ConformalFactor(u=lambda z: abs(z) ** 2)  # derivatives by finite differences
    rep = curvature_report(u, 0.3 + 0.2j, 0.5 - 0.4j)
    assert abs(rep.conformal_component) > 1e-2
    assert abs(rep.conformal_numeric) > 1e-2
    assert abs(rep.scalar) < 1e-6
    at_zero_section = curvature_report(u, 0.3 + 0.2j, 0, numeric=False)
    assert at_zero_section.conformal_component == 0


def test_fd_conformal_factor_matches_analytic():
    analytic = round_sphere_factor()
    numeric = ConformalFactor(u=analytic.u)
    for xi in (0.1 + 0.3j, -0.8 + 0.5j):
        assert numeric.d(xi) == pytest.approx(analytic.d(xi), abs=1e-9)
        assert numeric.ddbar(xi) == pytest.approx(analytic.ddbar(xi), abs=1e-7)
