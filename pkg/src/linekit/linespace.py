"""Oriented lines in R^3 as points of the tangent bundle of the 2-sphere.

A line is stored by a stereographic direction coordinate ``xi`` and a
fibre coordinate ``eta`` (the perpendicular-foot vector seen as a tangent
vector ``eta d/dxi + conj``). Two charts are used:

* ``STANDARD`` -- projection from the south pole, ``xi = (d1 + i d2)/(1 + d3)``;
* ``FLIPPED`` -- the standard coordinates of the line rotated by pi about
  the x1-axis. The transition is ``xi' = 1/xi``, ``eta' = -eta/xi**2``.

Every formula in this package that is written in (xi, eta) holds verbatim in
either chart because the flip is a Euclidean motion and therefore preserves
all of the structures involved.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ChartSingularity

STANDARD = "standard"
FLIPPED = "flipped"
CHART_MAX = 1e6

SQRT2 = np.sqrt(2.0)
# rotation by pi about x1; relates the two charts in R^3
FLIP = np.diag([1.0, -1.0, -1.0])


@dataclass(frozen=True)
class OrientedLine:
    xi: complex
    eta: complex
    chart: str = STANDARD

    def __post_init__(self):
        xi, eta = complex(self.xi), complex(self.eta)
        if not (np.isfinite(xi) and np.isfinite(eta)):
            raise ValueError(f"non-finite line coordinates ({xi}, {eta})")
        if self.chart not in (STANDARD, FLIPPED):
            raise ValueError(f"unknown chart {self.chart!r}")
        if abs(xi) > CHART_MAX:
            raise ChartSingularity(
                f"|xi| = {abs(xi):.3g} exceeds CHART_MAX; use chart_transition")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eta", eta)

    @property
    def coords(self):
        """Real coordinates (xi1, xi2, eta1, eta2)."""
        return np.array([self.xi.real, self.xi.imag, self.eta.real, self.eta.imag])

    @classmethod
    def from_coords(cls, x, chart=STANDARD):
        return cls(complex(x[0], x[1]), complex(x[2], x[3]), chart)

    def in_chart(self, chart):
        if chart == self.chart:
            return self
        return chart_transition(self)

    @property
    def direction(self):
        return direction(self)

    @property
    def foot(self):
        """Point of the line closest to the origin."""
        return phi(self, 0.0).vector


@dataclass(frozen=True)
class EuclideanPoint:
    z: complex
    t: float

    @property
    def vector(self):
        return np.array([self.z.real, self.z.imag, self.t])

    @classmethod
    def from_vector(cls, v):
        return cls(complex(v[0], v[1]), float(v[2]))


@dataclass(frozen=True)
class NullFrame:
    """Frame (e0, e+, e-) with e- = conj(e+), as complex 3-vectors."""

    e0: np.ndarray
    eplus: np.ndarray

    @property
    def eminus(self):
        return np.conj(self.eplus)


@dataclass(frozen=True)
class TangentT:
    """Tangent vector ``xidot d/dxi + etadot d/deta + conj`` at ``base``."""

    base: OrientedLine
    xidot: complex
    etadot: complex

    def __post_init__(self):
        object.__setattr__(self, "xidot", complex(self.xidot))
        object.__setattr__(self, "etadot", complex(self.etadot))

    @property
    def coords(self):
        return np.array([self.xidot.real, self.xidot.imag,
                         self.etadot.real, self.etadot.imag])

    @classmethod
    def from_coords(cls, base, v):
        return cls(base, complex(v[0], v[1]), complex(v[2], v[3]))

    def __add__(self, other):
        return TangentT(self.base, self.xidot + other.xidot, self.etadot + other.etadot)

    def __mul__(self, c):
        return TangentT(self.base, c * self.xidot, c * self.etadot)

    __rmul__ = __mul__


@dataclass(frozen=True)
class JacobiField:
    """Orthogonal Jacobi field X(r) = X1 + r X2 along a line."""

    X1: np.ndarray
    X2: np.ndarray

    def __call__(self, r):
        return self.X1 + r * self.X2


def _to_world(vec, chart):
    return FLIP @ vec if chart == FLIPPED else vec


def _frame_std(xi):
    xi = complex(xi)
    xb = xi.conjugate()
    D = 1 + abs(xi) ** 2
    e0 = np.array([2 * xi.real / D, 2 * xi.imag / D, (1 - abs(xi) ** 2) / D])
    # components of a d/dz + b d/dzbar + c d/dt are ((a+b)/2, i(b-a)/2, c)
    a, b, c = SQRT2 / D, -SQRT2 * xb ** 2 / D, -SQRT2 * xb / D
    eplus = np.array([(a + b) / 2, 1j * (b - a) / 2, c])
    return e0, eplus


def null_frame(xi, chart=STANDARD):
    """Null frame attached to the direction with coordinate ``xi``."""
    e0, ep = _frame_std(xi)
    if chart == FLIPPED:
        e0, ep = FLIP @ e0, FLIP @ ep
    return NullFrame(e0, ep)


def direction(line):
    e0, _ = _frame_std(line.xi)
    return _to_world(e0, line.chart)


def _phi_std(xi, eta, r):
    xb, eb = xi.conjugate(), eta.conjugate()
    D = 1 + (xi * xb).real
    z = (2 * (eta - eb * xi ** 2) + 2 * xi * D * r) / D ** 2
    t = (-2 * (eta * xb + eb * xi).real + (1 - abs(xi) ** 4) * r) / D ** 2
    return np.array([z.real, z.imag, t])


def phi(line, r):
    """Point at signed distance ``r`` from the perpendicular foot."""
    return EuclideanPoint.from_vector(_to_world(_phi_std(line.xi, line.eta, float(r)), line.chart))


def phi_vec(line, r):
    return _to_world(_phi_std(line.xi, line.eta, float(r)), line.chart)


def stereographic(d):
    """Standard-chart coordinate of a unit direction."""
    d = np.asarray(d, dtype=float)
    if 1 + d[2] <= 0 or abs(complex(d[0], d[1]) / (1 + d[2])) > CHART_MAX:
        raise ChartSingularity("direction at the south pole of the standard chart")
    return complex(d[0], d[1]) / (1 + d[2])


def _line_std(p, d):
    xi = stereographic(d)
    pz = complex(p[0], p[1])
    eta = 0.5 * (pz - 2 * p[2] * xi - pz.conjugate() * xi ** 2)
    return xi, eta, float(np.dot(p, d))


def line_from_point_direction(p, d, chart=STANDARD):
    """Line through ``p`` with unit direction ``d`` and the parameter of ``p``.

    ``chart`` may be ``"auto"``: standard when ``d3 >= 0``, flipped otherwise.
    """
    p = np.asarray(p.vector if isinstance(p, EuclideanPoint) else p, dtype=float)
    d = np.asarray(d, dtype=float)
    n = np.linalg.norm(d)
    if abs(n - 1) > 1e-9:
        raise ValueError(f"direction must be a unit vector, |d| = {n}")
    if chart == "auto":
        chart = STANDARD if d[2] >= 0 else FLIPPED
    if chart == FLIPPED:
        xi, eta, r = _line_std(FLIP @ p, FLIP @ d)
    else:
        xi, eta, r = _line_std(p, d)
    return OrientedLine(xi, eta, chart), r


def chart_transition(line):
    """Express the same oriented line in the other chart."""
    if line.xi == 0:
        raise ChartSingularity("xi = 0 has no image under the chart transition")
    other = FLIPPED if line.chart == STANDARD else STANDARD
    return OrientedLine(1 / line.xi, -line.eta / line.xi ** 2, other)


def reverse_orientation(line):
    """Same point set, opposite direction."""
    return line_from_point_direction(phi_vec(line, 0.0), -direction(line), "auto")[0]


def dphi(line, r, v, rdot=0.0):
    """Image of ``(xidot, etadot, rdot)`` under the derivative of phi, in R^3."""
    xi, eta = line.xi, line.eta
    xb, eb = xi.conjugate(), eta.conjugate()
    D = 1 + abs(xi) ** 2
    e0, ep = _frame_std(xi)
    d_xi = (r - 2 * xb * eta / D) * SQRT2 / D * ep - 2 * eb / D ** 2 * e0
    d_eta = SQRT2 / D * ep
    out = 2 * np.real(v.xidot * d_xi + v.etadot * d_eta) + rdot * e0
    return _to_world(out, line.chart)


def jacobi_decompose(v):
    """Orthogonal Jacobi field identified with the tangent vector ``v``."""
    e0 = direction(v.base)
    y0 = dphi(v.base, 0.0, v)
    y1 = dphi(v.base, 1.0, v)
    X1 = y0 - np.dot(y0, e0) * e0
    X2 = y1 - y0
    return JacobiField(X1, X2)


def same_line(a, b, tol=1e-9):
    """Oriented point-set equality, compared through direction and foot."""
    return (np.linalg.norm(direction(a) - direction(b)) < tol
            and np.linalg.norm(phi_vec(a, 0) - phi_vec(b, 0)) < tol)


def line_distance(a, b):
    """Max of direction and foot discrepancies; zero iff the same oriented line."""
    return max(np.linalg.norm(direction(a) - direction(b)),
               np.linalg.norm(phi_vec(a, 0) - phi_vec(b, 0)))
