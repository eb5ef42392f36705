"""Two-parameter families of oriented lines (line congruences).

A congruence is a map ``nu -> OrientedLine`` on a rectangle in the
parameter plane. All derived quantities are computed by central
differences of the sampler; the derivative at ``nu`` is always taken in the
chart of the line at ``nu`` so that chart switches inside a stencil are
harmless.

Optical scalars at the point ``phi(line(nu), r)`` are::

    rho   = -e+ . (grad_{e-} e0)
    sigma = -e+ . (grad_{e+} e0)

with the null frame of the line and a bilinear (non-conjugating) dot.
The twist is ``Im rho``. The pulled-back metric has determinant of the
sign of ``twist**2 - |sigma|**2``, which is independent of ``r``.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P
from numpy.polynomial.legendre import leggauss

from .errors import AmbiguousSignature, Caustic, DomainError, NonFiniteSample, NotClosed
from .kahler import metric_G, omega_matrix, theta_covector
from .linespace import (STANDARD, FLIPPED, OrientedLine,
                        line_from_point_direction, null_frame, direction, phi_vec)
from .numerics import DEFAULT_FD, FDScheme, derivative_fd, jacobian_fd

RIEMANNIAN = "Riemannian"
LORENTZIAN = "Lorentzian"
TOTALLY_NULL = "TotallyNull"


def _inverse_stereographic(xi):
    xi = complex(xi)
    D = 1 + abs(xi) ** 2
    return np.array([2 * xi.real / D, 2 * xi.imag / D, (1 - abs(xi) ** 2) / D])


@dataclass(frozen=True)
class Congruence:
    """Smooth family of lines over a parameter rectangle.

    ``surface_r`` (optional) gives, for normal congruences, the line
    parameter of the point on the generating surface.
    """

    sampler: Callable
    fd: FDScheme = DEFAULT_FD
    domain: tuple = ((-1.0, 1.0), (-1.0, 1.0))
    surface_r: Callable = None
    name: str = "congruence"

    def line_at(self, nu):
        return self.sampler(np.asarray(nu, dtype=float))

    def local_coords(self, nu, chart):
        return self.line_at(nu).in_chart(chart).coords

    def jacobian(self, nu):
        """``(line, J)`` with ``J[:, a]`` the derivative of the real
        coordinates along ``nu[a]``, in the chart of ``line``."""
        nu = np.asarray(nu, dtype=float)
        line = self.line_at(nu)
        J = jacobian_fd(lambda v: self.local_coords(v, line.chart), nu, self.fd)
        return line, J

    def grid(self, n1, n2=None):
        """Rectangular ``n1 x n2`` grid of parameter points (row-major)."""
        n2 = n1 if n2 is None else n2
        (a1, b1), (a2, b2) = self.domain
        g1, g2 = np.linspace(a1, b1, n1), np.linspace(a2, b2, n2)
        return [np.array([u, v]) for u in g1 for v in g2]


# ---------------------------------------------------------------------------
# surface families


@dataclass(frozen=True)
class Sphere:
    """Round sphere; parameter is the stereographic coordinate of the
    outward normal."""

    radius: float = 1.0
    center: tuple = (0.0, 0.0, 0.0)
    domain: tuple = ((-2.0, 2.0), (-2.0, 2.0))

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def surface(self, nu):
        n = _inverse_stereographic(complex(nu[0], nu[1]))
        return np.asarray(self.center, dtype=float) + self.radius * n, n

    def congruence(self, fd=DEFAULT_FD):
        return normal_congruence(self, fd)


@dataclass(frozen=True)
class Ellipsoid:
    """``x**2/a**2 + y**2/b**2 + z**2/c**2 = 1`` parametrised by the
    stereographic coordinate of the outward normal."""

    a: float = 1.0
    b: float = 1.1
    c: float = 1.3
    domain: tuple = ((-3.5, 3.5), (-1.5, 1.5))

    def __post_init__(self):
        if min(self.a, self.b, self.c) <= 0:
            raise ValueError("semi-axes must be positive")

    def surface(self, nu):
        n = _inverse_stereographic(complex(nu[0], nu[1]))
        A2 = np.array([self.a, self.b, self.c]) ** 2
        return A2 * n / np.sqrt(np.dot(n, A2 * n)), n

    def umbilics(self):
        """Analytic umbilic normals (as parameters) for ``a < b < c``."""
        a2, b2, c2 = self.a ** 2, self.b ** 2, self.c ** 2
        if not a2 < b2 < c2:
            raise ValueError("umbilic formula needs a < b < c")
        x = np.sqrt(a2 * (b2 - a2) / (c2 - a2))
        z = np.sqrt(c2 * (c2 - b2) / (c2 - a2))
        out = []
        for sx in (1, -1):
            for sz in (1, -1):
                n = np.array([sx * x / a2, 0.0, sz * z / c2])
                n /= np.linalg.norm(n)
                out.append(np.array([n[0] / (1 + n[2]), 0.0]))
        return out

    def congruence(self, fd=DEFAULT_FD):
        return normal_congruence(self, fd)


@dataclass(frozen=True)
class Torus:
    """Torus of revolution about x3; parameters ``(theta, phi)``."""

    core: float = 2.0
    tube: float = 0.5
    domain: tuple = ((0.0, 2 * np.pi), (0.0, 2 * np.pi))

    def __post_init__(self):
        if self.core <= 0 or self.tube <= 0:
            raise ValueError("radii must be positive")

    def surface(self, nu):
        th, ph = nu
        n = np.array([np.cos(ph) * np.cos(th), np.cos(ph) * np.sin(th), np.sin(ph)])
        center = self.core * np.array([np.cos(th), np.sin(th), 0.0])
        return center + self.tube * n, n

    def congruence(self, fd=DEFAULT_FD):
        return normal_congruence(self, fd, chart="auto")


@dataclass(frozen=True)
class Graph:
    """Graph ``x3 = h(x1, x2)`` of a polynomial with ``coeffs[i][j]`` the
    coefficient of ``x1**i x2**j`` (total degree at most 6)."""

    coeffs: tuple
    domain: tuple = ((-1.0, 1.0), (-1.0, 1.0))

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        for (i, j), v in np.ndenumerate(c):
            if v != 0 and i + j > 6:
                raise ValueError("polynomial degree must be at most 6")
        object.__setattr__(self, "coeffs", c)

    def height(self, x, y):
        return P.polyval2d(x, y, self.coeffs)

    def gradient(self, x, y):
        return (P.polyval2d(x, y, P.polyder(self.coeffs, axis=0)),
                P.polyval2d(x, y, P.polyder(self.coeffs, axis=1)))

    def surface(self, nu):
        x, y = nu
        hx, hy = self.gradient(x, y)
        n = np.array([-hx, -hy, 1.0])
        return np.array([x, y, self.height(x, y)]), n / np.linalg.norm(n)

    def congruence(self, fd=DEFAULT_FD):
        return normal_congruence(self, fd)


@dataclass(frozen=True)
class RotationField:
    """Holomorphic section ``eta = -i b xi``: the lines are the tangent
    lines of circles of rotation about x3 (twisting off the equator)."""

    b: float = 1.0
    domain: tuple = ((-1.5, 1.5), (-1.5, 1.5))

    def congruence(self, fd=DEFAULT_FD):
        b = self.b

        def sampler(nu):
            xi = complex(nu[0], nu[1])
            return OrientedLine(xi, -1j * b * xi)

        return Congruence(sampler, fd, self.domain, name="rotation")


@dataclass(frozen=True)
class TornTorus:
    """Lagrangian torus ``xi = tan(phi) e^{i theta}``,
    ``eta = a (1 - b tan(phi)**2) e^{i theta}``; for ``b = 1`` it is the
    normal congruence of a torus, otherwise the orthogonal surfaces tear."""

    a: float = 2.0
    b: float = 0.5
    domain: tuple = ((0.0, 2 * np.pi), (0.0, np.pi))

    def congruence(self, fd=DEFAULT_FD):
        a, b = self.a, self.b

        def sampler(nu):
            th, ph = nu
            e = np.exp(1j * th)
            if np.cos(2 * ph) >= 0:
                t = np.tan(ph)
                return OrientedLine(t * e, a * (1 - b * t * t) * e)
            ct = 1 / np.tan(ph)
            return OrientedLine(ct / e, -a * (ct * ct - b) / e, FLIPPED)

        return Congruence(sampler, fd, self.domain, name="torn_torus")


CSV_COLUMNS = ("nu1", "nu2", "xi1", "xi2", "eta1", "eta2")


@dataclass(frozen=True)
class CsvGrid:
    """Congruence sampled on a rectangular grid (standard chart), read from
    a CSV file with at least the columns ``nu1,nu2,xi1,xi2,eta1,eta2``;
    evaluated by bicubic spline interpolation."""

    path: str

    def congruence(self, fd=DEFAULT_FD):
        from scipy.interpolate import RectBivariateSpline

        data = np.genfromtxt(self.path, delimiter=",", names=True, dtype=float)
        missing = [c for c in CSV_COLUMNS if c not in (data.dtype.names or ())]
        if missing:
            raise DomainError(f"{self.path}: missing columns {missing}")
        data = np.atleast_1d(data)
        u1, u2 = np.unique(data["nu1"]), np.unique(data["nu2"])
        if len(u1) < 4 or len(u2) < 4 or len(data) != len(u1) * len(u2):
            raise DomainError(f"{self.path}: need a rectangular grid of at least 4x4")
        bad = [c for c in CSV_COLUMNS if not np.all(np.isfinite(data[c]))]
        if bad:
            raise NonFiniteSample(f"{self.path}: non-finite values in {bad}")
        order = np.lexsort((data["nu2"], data["nu1"]))
        data = data[order]
        splines = [RectBivariateSpline(u1, u2, data[c].reshape(len(u1), len(u2)))
                   for c in CSV_COLUMNS[2:]]
        lo = np.array([u1[0], u2[0]]) - 1e-6
        hi = np.array([u1[-1], u2[-1]]) + 1e-6

        def sampler(nu):
            if np.any(nu < lo - 1e-2) or np.any(nu > hi + 1e-2):
                raise DomainError(f"parameter {nu} outside the sampled grid")
            x = [float(s.ev(nu[0], nu[1])) for s in splines]
            return OrientedLine.from_coords(x)

        dom = ((u1[0], u1[-1]), (u2[0], u2[-1]))
        return Congruence(sampler, fd, dom, name="csv")


def normal_congruence(spec, fd=DEFAULT_FD, chart=STANDARD):
    """Lines normal to the surface ``spec.surface``, oriented by its normal."""

    def sampler(nu):
        p, n = spec.surface(nu)
        return line_from_point_direction(p, n, chart)[0]

    def surface_r(nu):
        p, n = spec.surface(np.asarray(nu, dtype=float))
        return float(np.dot(p, n))

    return Congruence(sampler, fd, spec.domain, surface_r, type(spec).__name__.lower())


def congruence_from_spec(spec, fd=DEFAULT_FD):
    return spec.congruence(fd)


# ---------------------------------------------------------------------------
# first-order invariants


@dataclass(frozen=True)
class OpticalScalars:
    rho: complex
    sigma: complex
    r_eval: float

    @property
    def twist(self):
        return self.rho.imag


def spin_coefficients(c, nu, r_eval=0.0, gauge=None):
    """Optical scalars at ``phi(line(nu), r_eval)``.

    ``gauge`` selects the chart whose null frame fixes the phase of sigma
    (default: the chart of the line at ``nu``).
    """
    nu = np.asarray(nu, dtype=float)
    line = c.line_at(nu)

    def pos_dir(v):
        ln = c.line_at(v)
        return np.concatenate([phi_vec(ln, r_eval), direction(ln)])

    jac = jacobian_fd(pos_dir, nu, c.fd)
    dx, de0 = jac[:3], jac[3:]
    e0 = direction(line)
    M = np.column_stack([dx, e0])
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] < 1e-9 * max(1.0, sv[0]):
        raise Caustic(f"lines of the congruence focus at r = {r_eval} near nu = {nu}")
    chart = gauge or line.chart
    frame = null_frame(line.in_chart(chart).xi, chart)
    Minv = np.linalg.inv(M)

    def grad_e0(w):
        return de0 @ (Minv @ w)[:2]

    ep, em = frame.eplus, frame.eminus
    rho = -np.dot(ep, grad_e0(em))
    sigma = -np.dot(ep, grad_e0(ep))
    return OpticalScalars(complex(rho), complex(sigma), float(r_eval))


def pullback_omega(c, nu):
    """``Omega(d/dnu1, d/dnu2)`` of the congruence at ``nu``."""
    line, J = c.jacobian(nu)
    return float(J[:, 0] @ omega_matrix(line) @ J[:, 1])


def pullback_G(c, nu):
    """Induced 2x2 metric in the parameters ``(nu1, nu2)``."""
    line, J = c.jacobian(nu)
    g = J.T @ metric_G(line) @ J
    return 0.5 * (g + g.T)


def classify_signature(c, nu, tol=1e-9, r_eval=0.0):
    """Riemannian, Lorentzian or TotallyNull, from the induced metric.

    A near-zero determinant with a nonzero metric is resolved with the
    optical scalars; if they disagree AmbiguousSignature is raised.
    """
    g = pullback_G(c, nu)
    scale = max(1.0, float(np.max(np.abs(g)))) ** 2
    det = float(np.linalg.det(g))
    if abs(det) > tol * scale:
        if det < 0:
            return LORENTZIAN
        # definite of either sign counts as Riemannian for a neutral ambient
        return RIEMANNIAN
    if np.max(np.abs(g)) < tol:
        return TOTALLY_NULL
    s = spin_coefficients(c, nu, r_eval)
    q = s.twist ** 2 - abs(s.sigma) ** 2
    if abs(q) < np.sqrt(tol):
        return TOTALLY_NULL
    raise AmbiguousSignature(f"det f*G ~ 0 but twist^2 - |sigma|^2 = {q:.3g} at {nu}")


def signature_consistency(c, nu, r_eval=0.0):
    """``(det f*G, twist**2 - |sigma|**2)``; their signs agree."""
    s = spin_coefficients(c, nu, r_eval)
    return float(np.linalg.det(pullback_G(c, nu))), s.twist ** 2 - abs(s.sigma) ** 2


def is_lagrangian(c, grid, tol=1e-10):
    """``(all |f*Omega| < tol, max |f*Omega|)`` over the parameter points."""
    res = max(abs(pullback_omega(c, nu)) for nu in grid)
    return res < tol, res


# ---------------------------------------------------------------------------
# the potential r with dr = f*Theta


def pullback_theta(c, nu):
    """Components of ``f*Theta`` along ``(nu1, nu2)``."""
    line, J = c.jacobian(nu)
    return theta_covector(line) @ J


def _segment_integral(c, a, b, nodes, weights):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if np.allclose(a, b):
        return 0.0
    mid, half = (a + b) / 2, (b - a) / 2
    total = 0.0
    for x, w in zip(nodes, weights):
        total += w * pullback_theta(c, mid + x * half) @ half
    return float(total)


def reconstruct_r(c, nu0, nu, r0=0.0, order="12", quad=24, tol=1e-8):
    """Potential ``r(nu) = r0 + integral of f*Theta`` along a staircase path.

    ``order`` ``"12"`` moves along ``nu1`` first, ``"21"`` along ``nu2``
    first. Raises NotClosed if the congruence twists at the path corners.
    """
    nu0, nu = np.asarray(nu0, dtype=float), np.asarray(nu, dtype=float)
    corner = np.array([nu[0], nu0[1]]) if order == "12" else np.array([nu0[0], nu[1]])
    for p in (nu0, corner, nu):
        w = abs(pullback_omega(c, p))
        if w > tol:
            raise NotClosed(f"f*Omega = {w:.3g} at {p}: no potential")
    x, wts = leggauss(quad)
    return r0 + _segment_integral(c, nu0, corner, x, wts) + _segment_integral(c, corner, nu, x, wts)


def recovered_point(c, nu, r):
    """Point of the orthogonal surface over ``nu`` at line parameter ``r``."""
    return phi_vec(c.line_at(nu), r)


def theta_period(c, curve, samples=256, tol=1e-8):
    """``integral of f*Theta`` around the closed curve ``t -> curve(t)``,
    ``t`` in ``[0, 1]``, by the periodic trapezoid rule."""
    ts = np.arange(samples) / samples
    total = 0.0
    for t in ts:
        nu = np.asarray(curve(t), dtype=float)
        w = abs(pullback_omega(c, nu))
        if w > tol:
            raise NotClosed(f"f*Omega = {w:.3g} on the curve at {nu}")
        line = c.line_at(nu)
        vel = derivative_fd(lambda s: c.local_coords(curve(s), line.chart), t, FDScheme(1e-4))
        total += theta_covector(line) @ vel
    return float(total / samples)
