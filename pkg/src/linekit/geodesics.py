"""Geodesics of the neutral metric: ruled surfaces that are planes or helicoids.

A geodesic through the x3-axis is described by real constants
``(C1, C2, C5, theta)``::

    xi  = tan(C2 s) e^{i theta}
    eta = (C5 sin(2 C2 s) - i C1 s) e^{i theta} / (4 C2 cos^2(C2 s))

Equivalently it is the orbit of the x3-axis under the one-parameter screw
group "rotate by 2 C2 s about x2, then shift by -C1 s / (2 C2) along x2",
conjugated by a rotation by ``theta`` about x3 and a shift by
``-C5 / (2 C2)`` along x3. The screw form has no singularity and is used to
continue a geodesic past ``|C2 s| = pi/2`` where the closed form breaks
down in the standard chart.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import NoHelicoid, ParameterSingularity
from .isometry import EuclideanMotion, act, push_forward
from .kahler import christoffel, metric_form
from .linespace import (FLIPPED, STANDARD, OrientedLine, TangentT, direction,
                        phi_vec)
from .numerics import ODEState, derivative_fd, integrate_rk4

SINGULARITY_MARGIN = 1e-6
X3_AXIS = OrientedLine(0j, 0j)


@dataclass(frozen=True)
class GeodesicParams:
    C1: float
    C2: float
    C5: float = 0.0
    theta: float = 0.0


def _check_guard(p, s):
    if abs(p.C2 * s) >= np.pi / 2 - SINGULARITY_MARGIN:
        raise ParameterSingularity(
            f"|C2 s| = {abs(p.C2 * s):.6g} reaches the cos^2 singularity")


def geodesic_closed_form(p, s):
    """Line at parameter ``s`` on the geodesic leaving the x3-axis."""
    rot = np.exp(1j * p.theta)
    if p.C2 == 0:
        if p.C1 != 0:
            raise ParameterSingularity("C2 = 0 requires C1 = 0 (null geodesic)")
        return OrientedLine(0j, 0.5 * p.C5 * s * rot)
    _check_guard(p, s)
    c = np.cos(p.C2 * s)
    xi = np.tan(p.C2 * s) * rot
    eta = (p.C5 * np.sin(2 * p.C2 * s) - 1j * p.C1 * s) * rot / (4 * p.C2 * c * c)
    return OrientedLine(xi, eta)


def closed_form_derivatives(p, s):
    """``(xi, eta, xi', eta', xi'', eta'')`` of the closed form, analytically."""
    _check_guard(p, s)
    k, C1, C2, C5 = np.exp(1j * p.theta), p.C1, p.C2, p.C5
    t = np.tan(C2 * s)
    sec2 = 1 + t * t
    xi = t * k
    xi1 = C2 * sec2 * k
    xi2 = 2 * C2 ** 2 * sec2 * t * k
    N = C5 * np.sin(2 * C2 * s) - 1j * C1 * s
    N1 = 2 * C2 * C5 * np.cos(2 * C2 * s) - 1j * C1
    N2 = -4 * C2 ** 2 * C5 * np.sin(2 * C2 * s)
    S, S1 = sec2, 2 * C2 * sec2 * t
    S2 = 2 * C2 ** 2 * sec2 * (2 * t * t + sec2)
    f = k / (4 * C2)
    return xi, f * N * S, xi1, f * (N1 * S + N * S1), xi2, f * (N2 * S + 2 * N1 * S1 + N * S2)


def geodesic_equations(xi, eta, dxi, deta, ddxi, ddeta):
    """Residuals of the two complex geodesic equations."""
    xb = np.conj(xi)
    D = 1 + abs(xi) ** 2
    r1 = ddxi - 2 * xb / D * dxi ** 2
    r2 = ddeta - 4 * xb / D * dxi * deta + 2 * (np.conj(eta) + xb ** 2 * eta) / D ** 2 * dxi ** 2
    return r1, r2


def closed_form_residual(p, s):
    """Max residual of the closed form in the complex geodesic equations and
    in the Christoffel form ``x'' + Gamma x' x'``."""
    xi, eta, d1, e1, d2, e2 = closed_form_derivatives(p, s)
    r1, r2 = geodesic_equations(xi, eta, d1, e1, d2, e2)
    vel = np.array([d1.real, d1.imag, e1.real, e1.imag])
    acc = np.array([d2.real, d2.imag, e2.real, e2.imag])
    gam = christoffel(OrientedLine(xi, eta))
    r3 = acc + np.einsum("ijk,j,k->i", gam, vel, vel)
    return max(abs(r1), abs(r2)), float(np.max(np.abs(r3)))


def screw_motion(p, s):
    """Motion carrying the x3-axis to the line at parameter ``s``."""
    base = EuclideanMotion.rotation_about([0, 0, 1], p.theta)
    if p.C2 == 0:
        if p.C1 != 0:
            raise ParameterSingularity("C2 = 0 requires C1 = 0 (null geodesic)")
        return base @ EuclideanMotion.translation_by([p.C5 * s, 0, 0])
    shift = EuclideanMotion.translation_by([0, 0, -p.C5 / (2 * p.C2)])
    screw = EuclideanMotion.rotation_about([0, 1, 0], 2 * p.C2 * s,
                                           [0, -p.C1 * s / (2 * p.C2), 0])
    return base @ shift @ screw @ shift.inverse()


def geodesic_line(p, s, continuation=True):
    """Line at parameter ``s``; past the closed-form singularity the screw
    group is used when ``continuation`` is set."""
    if p.C2 == 0 or abs(p.C2 * s) < np.pi / 2 - SINGULARITY_MARGIN or not continuation:
        if abs(p.C2 * s) < np.pi / 4 or not continuation:
            return geodesic_closed_form(p, s)
    return act(screw_motion(p, s), X3_AXIS)


def first_integral(line, v):
    """Conserved quantity of a geodesic with velocity ``v``, in the displayed
    complex form; equal to the metric quadratic form ``G(v, v)``."""
    xi, eta = line.xi, line.eta
    xb, eb = xi.conjugate(), eta.conjugate()
    D = 1 + abs(xi) ** 2
    dx, de = v.xidot, v.etadot
    val = 2j / D ** 2 * (de * dx.conjugate() - de.conjugate() * dx
                         + 2 * (xi * eb - xb * eta) / D * dx * dx.conjugate())
    return val.real


@dataclass(frozen=True)
class GeodesicIVP:
    """Initial line and velocity, with the motion ``normalization`` carrying
    ``line0`` to the x3-axis (perpendicular foot to the origin)."""

    line0: OrientedLine
    v0: TangentT
    normalization: EuclideanMotion

    @classmethod
    def from_initial(cls, line0, v0):
        foot = phi_vec(line0, 0.0)
        rot = EuclideanMotion.aligning(direction(line0))
        norm = rot @ EuclideanMotion.translation_by(-foot)
        return cls(line0, v0, norm)

    def params(self):
        """Constants of the normalised geodesic."""
        w = push_forward(self.normalization, self.v0)
        if w.base.chart != STANDARD:
            w = push_forward(EuclideanMotion.identity(), w)
        dxi, deta = w.xidot, w.etadot
        if abs(dxi) < 1e-14:
            return GeodesicParams(0.0, 0.0, 2 * abs(deta), float(np.angle(deta) % (2 * np.pi)))
        C2 = abs(dxi)
        th = float(np.angle(dxi) % (2 * np.pi))
        q = deta * np.exp(-1j * th)
        return GeodesicParams(-4 * C2 * q.imag, C2, 2 * q.real, th)

    def predict(self, s):
        """Closed-form (or screw-continued) prediction in world position."""
        return act(self.normalization.inverse(), geodesic_line(self.params(), s),
                   chart=self.line0.chart)


def _geodesic_rhs(s, y):
    xi, eta = complex(y[0], y[1]), complex(y[2], y[3])
    dxi, deta = complex(y[4], y[5]), complex(y[6], y[7])
    xb = xi.conjugate()
    D = 1 + abs(xi) ** 2
    ddxi = 2 * xb / D * dxi ** 2
    ddeta = 4 * xb / D * dxi * deta - 2 * (eta.conjugate() + xb ** 2 * eta) / D ** 2 * dxi ** 2
    return np.array([dxi.real, dxi.imag, deta.real, deta.imag,
                     ddxi.real, ddxi.imag, ddeta.real, ddeta.imag])


def _transition_state(y):
    xi, eta = complex(y[0], y[1]), complex(y[2], y[3])
    dxi, deta = complex(y[4], y[5]), complex(y[6], y[7])
    xi1 = 1 / xi
    eta1 = -eta / xi ** 2
    dxi1 = -dxi / xi ** 2
    deta1 = -deta / xi ** 2 + 2 * eta * dxi / xi ** 3
    return np.array([xi1.real, xi1.imag, eta1.real, eta1.imag,
                     dxi1.real, dxi1.imag, deta1.real, deta1.imag])


def geodesic_rk4(ivp, s_end, step, chart_switch=10.0):
    """Integrate the geodesic equations with fixed-step RK4.

    Returns ``(line, velocity)`` at ``s_end``; the chart is switched whenever
    ``|xi|`` exceeds ``chart_switch`` between steps.
    """
    v0 = ivp.v0
    y = np.concatenate([ivp.line0.coords, v0.coords])
    chart = ivp.line0.chart
    span = float(s_end)
    n = max(1, int(np.ceil(abs(span) / step - 1e-9)))
    h = span / n
    for k in range(n):
        y = integrate_rk4(_geodesic_rhs, ODEState(k * h, y), (k + 1) * h, abs(h)).y
        if np.hypot(y[0], y[1]) > chart_switch:
            y = _transition_state(y)
            chart = FLIPPED if chart == STANDARD else STANDARD
    line = OrientedLine.from_coords(y[:4], chart)
    return line, TangentT.from_coords(line, y[4:])


# ---------------------------------------------------------------------------
# ruled surfaces


@dataclass(frozen=True)
class RuledSurfaceMesh:
    """Grid of points ``vertices[i, j] = phi(line(s_i), r_j)``."""

    vertices: np.ndarray
    s: np.ndarray
    r: np.ndarray

    @property
    def shape(self):
        return self.vertices.shape[:2]

    @property
    def faces(self):
        """Quads as 0-based vertex indices in row-major order."""
        ns, nr = self.shape
        idx = np.arange(ns * nr).reshape(ns, nr)
        quads = [(idx[i, j], idx[i, j + 1], idx[i + 1, j + 1], idx[i + 1, j])
                 for i in range(ns - 1) for j in range(nr - 1)]
        return np.array(quads, dtype=int).reshape(-1, 4)


def ruled_surface(p, s_range, r_range, n_s, n_r, continuation=False):
    s = np.linspace(s_range[0], s_range[1], n_s)
    r = np.linspace(r_range[0], r_range[1], n_r)
    verts = np.empty((n_s, n_r, 3))
    for i, si in enumerate(s):
        line = geodesic_line(p, si, continuation=continuation)
        for j, rj in enumerate(r):
            verts[i, j] = phi_vec(line, rj)
    return RuledSurfaceMesh(verts, s, r)


# ---------------------------------------------------------------------------
# joining two lines


@dataclass(frozen=True)
class Connection:
    """Geodesic joining two lines.

    ``motion`` carries the standard-position geodesic to world position:
    the line at ``s = 0`` is the first input, at ``s = s1`` the second.
    ``kind`` is ``"helicoid"``, ``"plane_pencil"`` (intersecting lines,
    null connection) or ``"identical"``.
    """

    params: GeodesicParams
    motion: EuclideanMotion
    s1: float
    l: float
    d: float
    kind: str = "helicoid"

    def line_at(self, s):
        return act(self.motion, geodesic_line(self.params, s))


def connect_lines(g1, g2, turns=0, tol=1e-12):
    """Geodesic from ``g1`` to ``g2`` whose ruling turns by the principal
    angle plus ``turns`` full turns.

    The affine parameter is normalised so that ``C1 * s1 = -l**2/d``.
    """
    if turns < 0:
        raise ValueError("turns must be >= 0")
    d1, d2 = direction(g1), direction(g2)
    p1, p2 = phi_vec(g1, 0.0), phi_vec(g2, 0.0)
    cross = np.cross(d1, d2)
    sin_a = np.linalg.norm(cross)
    if sin_a < tol:
        gap = (p2 - p1) - np.dot(p2 - p1, d1) * d1
        if np.dot(d1, d2) > 0 and np.linalg.norm(gap) < 1e-10 and turns == 0:
            m = EuclideanMotion.translation_by(p1) @ EuclideanMotion.aligning(d1).inverse()
            return Connection(GeodesicParams(0.0, 0.0), m, 0.0, 0.0, 0.0, "identical")
        raise NoHelicoid("parallel lines are not joined by a helicoid")
    alpha = float(np.arctan2(sin_a, np.dot(d1, d2)))
    n = cross / sin_a
    # closest points Q1 on g1 and Q2 on g2
    b = np.dot(d1, d2)
    w0 = p1 - p2
    dd, ee = np.dot(d1, w0), np.dot(d2, w0)
    t1 = (b * ee - dd) / (1 - b * b)
    t2 = (ee - b * dd) / (1 - b * b)
    q1, q2 = p1 + t1 * d1, p2 + t2 * d2
    h = float(np.dot(q2 - q1, n))
    frame = np.column_stack([np.cross(n, d1), n, d1])
    quat = Rotation.from_matrix(frame).as_quat(scalar_first=True)
    motion = EuclideanMotion(quat, q1)
    d = alpha + 2 * np.pi * turns
    if abs(h) < 1e-12:
        return Connection(GeodesicParams(0.0, d / 2), motion, 1.0, 0.0, d, "plane_pencil")
    s1 = d * d / h
    params = GeodesicParams(C1=-h ** 3 / d ** 3, C2=h / (2 * d))
    return Connection(params, motion, s1, abs(h), d)


def g_distance(g1, g2):
    """``-l**2/d`` for the minimal-turn helicoid; zero for intersecting lines."""
    c = connect_lines(g1, g2, 0)
    if c.kind != "helicoid":
        return 0.0
    return -c.l ** 2 / c.d


def connection_energy(conn, scheme=None):
    """``C1 * s1`` with ``C1`` measured as the first integral of the world
    curve at ``s = 0`` (finite-difference velocity)."""
    start = conn.line_at(0.0)
    chart = start.chart

    def curve(s):
        return act(conn.motion, geodesic_line(conn.params, s), chart=chart).coords

    vel = derivative_fd(curve, 0.0) if scheme is None else derivative_fd(curve, 0.0, scheme)
    v = TangentT.from_coords(start, vel)
    return first_integral(start, v) * conn.s1, metric_form(v, v)
