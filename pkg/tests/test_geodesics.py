import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linekit.errors import NoHelicoid, ParameterSingularity
from linekit.geodesics import (X3_AXIS, GeodesicIVP, GeodesicParams, closed_form_residual,
                               connect_lines, connection_energy, first_integral,
                               g_distance, geodesic_closed_form, geodesic_line,
                               geodesic_rk4, ruled_surface, screw_motion)
from linekit.isometry import EuclideanMotion, act
from linekit.kahler import metric_form
from linekit.linespace import (FLIPPED, OrientedLine, TangentT, line_distance,
                               line_from_point_direction, same_line)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def test_closed_form_starts_on_axis():
    line = geodesic_closed_form(GeodesicParams(C1=0.7, C2=0.4, C5=-1.1, theta=2.0), 0.0)
    assert line.xi == 0 and line.eta == 0


def test_closed_form_plane_example():
    # C1 = 0, C2 = 1, C5 = 1: eta = xi / 2
    p = GeodesicParams(C1=0.0, C2=1.0, C5=1.0)
    for s in (0.2, -0.5, 1.1):
        line = geodesic_closed_form(p, s)
        assert line.eta == pytest.approx(line.xi / 2, abs=1e-14)


def test_closed_form_residual_example():
    p = GeodesicParams(C1=1.0, C2=0.5)
    for s in np.linspace(-2.5, 2.5, 11):
        assert max(closed_form_residual(p, s)) < 1e-8


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(0.05, 2), st.floats(-3, 3), st.floats(0, 2 * np.pi),
       st.floats(-0.9, 0.9))
def test_closed_form_solves_geodesic_equations(C1, C2, C5, theta, frac):
    p = GeodesicParams(C1, C2, C5, theta)
    s = frac * np.pi / (2 * C2)
    assert max(closed_form_residual(p, s)) < 1e-8


def test_parameter_singularity():
    p = GeodesicParams(C1=1.0, C2=0.5)
    with pytest.raises(ParameterSingularity):
        geodesic_closed_form(p, np.pi)
    with pytest.raises(ParameterSingularity):
        geodesic_closed_form(GeodesicParams(C1=1.0, C2=0.0), 1.0)


def test_zero_xi_velocity_gives_plane():
    ivp = GeodesicIVP.from_initial(X3_AXIS, TangentT(X3_AXIS, 0, 0.3 + 0.4j))
    line, vel = geodesic_rk4(ivp, 2.0, 1e-2)
    assert line.xi == 0
    assert line.eta == pytest.approx(2.0 * (0.3 + 0.4j), abs=1e-12)
    assert vel.etadot == pytest.approx(0.3 + 0.4j)


@pytest.mark.parametrize("s_end", [1.0, 2.5, -1.5])
def test_rk4_matches_closed_form(s_end):
    p = GeodesicParams(C1=1.0, C2=0.5, C5=0.3, theta=0.4)
    base = X3_AXIS
    # initial velocity of the closed form
    q = (p.C5 - 1j * p.C1 / (2 * p.C2)) / 2
    v0 = TangentT(base, p.C2 * np.exp(1j * p.theta), q * np.exp(1j * p.theta))
    ivp = GeodesicIVP.from_initial(base, v0)
    got = ivp.params()
    assert np.allclose([got.C1, got.C2, got.C5, got.theta], [p.C1, p.C2, p.C5, p.theta])
    line, vel = geodesic_rk4(ivp, s_end, 1e-3)
    assert line_distance(line, geodesic_closed_form(p, s_end)) < 1e-6
    drift = abs(first_integral(line, vel) - first_integral(base, v0))
    assert drift < 1e-8


def test_rk4_through_chart_switch():
    line0 = OrientedLine(0.3 + 0.1j, -0.2 + 0.5j)
    v0 = TangentT(line0, 0.8 - 0.3j, 0.4 + 0.2j)
    ivp = GeodesicIVP.from_initial(line0, v0)
    s_end = 3.0  # beyond the closed-form pole of the normalised geodesic
    assert abs(ivp.params().C2 * s_end) > np.pi / 2
    line, vel = geodesic_rk4(ivp, s_end, 1e-3)
    assert line_distance(line, ivp.predict(s_end)) < 1e-6
    assert abs(first_integral(line, vel) - metric_form(v0, v0)) < 1e-8


def test_first_integral_examples():
    base = OrientedLine(0, 0)
    assert first_integral(base, TangentT(base, 0, 1 + 1j)) == 0
    assert first_integral(base, TangentT(base, 1j, 1)) == pytest.approx(4.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2),
       st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_first_integral_is_metric_form(a, b, c, d, e, f, g, h):
    line = OrientedLine(complex(a, b), complex(c, d))
    v = TangentT(line, complex(e, f), complex(g, h))
    assert first_integral(line, v) == pytest.approx(metric_form(v, v), abs=1e-10)


def test_screw_continuation_is_smooth():
    p = GeodesicParams(C1=1.0, C2=0.5, C5=0.3, theta=0.4)
    # both branches agree where they overlap
    for s in (0.5, 1.0, 1.4):
        cont = act(screw_motion(p, s), X3_AXIS)
        assert line_distance(cont, geodesic_closed_form(p, s)) < 1e-10
    # past the pole the continued family stays continuous
    ss = np.linspace(2.9, 3.5, 25)
    lines = [geodesic_line(p, s) for s in ss]
    assert all(line_distance(a, b) < 0.2 for a, b in zip(lines, lines[1:]))


def test_helicoid_rulings_are_straight():
    mesh = ruled_surface(GeodesicParams(1.0, 0.5), (-3.0, 3.0), (-1.0, 1.0), 41, 5,
                         continuation=True)
    assert mesh.shape == (41, 5)
    for row in mesh.vertices:
        d = row - row[0]
        assert np.max(np.abs(np.cross(d[1:], d[-1]))) < 1e-9


def test_null_geodesic_surface_is_planar():
    mesh = ruled_surface(GeodesicParams(0.0, 0.7, 1.3, 0.9), (-2.0, 2.0), (-1.0, 1.0), 15, 7)
    pts = mesh.vertices.reshape(-1, 3)
    centred = pts - pts.mean(axis=0)
    assert np.linalg.svd(centred, compute_uv=False)[-1] < 1e-9


def test_degenerate_r_range():
    mesh = ruled_surface(GeodesicParams(1.0, 0.5), (0.0, 1.0), (0.5, 0.5), 3, 2)
    assert np.allclose(mesh.vertices[:, 0], mesh.vertices[:, 1])
    assert mesh.faces.shape == (2, 4)


def test_faces_row_major():
    mesh = ruled_surface(GeodesicParams(1.0, 0.5), (0.0, 1.0), (0.0, 1.0), 3, 4)
    assert mesh.faces.shape == (6, 4)
    assert list(mesh.faces[0]) == [0, 1, 5, 4]
    assert mesh.faces.max() == 11


def _line(p, d):
    return line_from_point_direction(p, unit(d), "auto")[0]


def test_connect_example():
    g1 = _line([0, 0, 0], [0, 0, 1])
    g2 = _line([0, 1, 0], [1, 0, 0])
    c = connect_lines(g1, g2)
    assert c.kind == "helicoid"
    assert c.l == pytest.approx(1.0)
    assert c.d == pytest.approx(np.pi / 2)
    assert same_line(c.line_at(0.0), g1, 1e-9)
    assert same_line(c.line_at(c.s1), g2, 1e-9)
    assert c.params.C1 * c.s1 == pytest.approx(-c.l ** 2 / c.d)
    assert g_distance(g1, g2) == pytest.approx(-2 / np.pi)


def test_connect_random_pairs():
    rng = np.random.default_rng(21)
    for _ in range(10):
        g1 = _line(rng.normal(size=3), rng.normal(size=3))
        g2 = _line(rng.normal(size=3), rng.normal(size=3))
        for turns in (0, 1):
            c = connect_lines(g1, g2, turns)
            assert same_line(c.line_at(0.0), g1, 1e-8)
            assert same_line(c.line_at(c.s1), g2, 1e-8)
            energy, quad = connection_energy(c)
            assert energy == pytest.approx(-c.l ** 2 / c.d, abs=1e-6)
            assert energy == pytest.approx(quad * c.s1, abs=1e-6)


def test_more_turns_shrink_distance():
    g1 = _line([0, 0, 0], [0, 0, 1])
    g2 = _line([0, 2, 0], [1, 1, 0])
    d0, d1 = connect_lines(g1, g2, 0), connect_lines(g1, g2, 1)
    assert d1.d == pytest.approx(d0.d + 2 * np.pi)
    assert abs(d1.l ** 2 / d1.d) < abs(d0.l ** 2 / d0.d)


def test_g_distance_scales_quadratically():
    g1 = _line([0, 0, 0], [0, 0, 1])
    g2 = _line([0, 1, 0], [1, 0, 1])
    g2s = _line([0, 2, 0], [1, 0, 1])
    assert g_distance(g1, g2s) == pytest.approx(4 * g_distance(g1, g2))


def test_g_distance_is_motion_invariant():
    g1 = _line([0.3, 0, 0], [0, 1, 1])
    g2 = _line([0, 1.5, -0.2], [1, 0, 0.3])
    m = EuclideanMotion.rotation_about([1, 2, 3], 0.8, [0.5, -1, 2])
    assert g_distance(act(m, g1), act(m, g2)) == pytest.approx(g_distance(g1, g2), abs=1e-10)


def test_identical_lines():
    g = _line([1, 2, 3], [0.2, 0.3, 0.9])
    c = connect_lines(g, g)
    assert c.kind == "identical" and c.l == 0 and c.d == 0
    assert g_distance(g, g) == 0


def test_intersecting_lines_plane_pencil():
    g1 = _line([1, 1, 1], [1, 0, 0])
    g2 = _line([1, 1, 1], [0, 1, 1])
    c = connect_lines(g1, g2)
    assert c.kind == "plane_pencil"
    assert c.params.C1 == 0
    assert same_line(c.line_at(0.0), g1, 1e-9)
    assert same_line(c.line_at(c.s1), g2, 1e-9)
    assert g_distance(g1, g2) == 0


@pytest.mark.parametrize("d2", [[0, 0, 1], [0, 0, -1]])
def test_parallel_lines_have_no_helicoid(d2):
    with pytest.raises(NoHelicoid):
        connect_lines(_line([0, 0, 0], [0, 0, 1]), _line([1, 0, 0], d2))


def test_antiparallel_coincident_lines_rejected():
    g = _line([0, 0, 0], [0, 0, 1])
    with pytest.raises(NoHelicoid):
        connect_lines(g, _line([0, 0, 0], [0, 0, -1]))


def test_connection_in_flipped_chart():
    g1 = _line([0, 0, 0], [0.1, 0, -1])
    g2 = _line([0, 1, 0], [1, 0, -0.2])
    assert g1.chart == FLIPPED
    c = connect_lines(g1, g2)
    assert same_line(c.line_at(0.0), g1, 1e-9)
    assert same_line(c.line_at(c.s1), g2, 1e-9)
