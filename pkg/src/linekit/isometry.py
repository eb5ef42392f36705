"""Euclidean motions acting on oriented lines, and the Killing algebra.

A rotation with unit quaternion ``(w, x, y, z)`` acts on the standard
coordinate by the SU(2) Moebius map with ``a = w + iz``, ``b = y - ix``,
``c = -conj(b)``, ``d = conj(a)``; the fibre coordinate transforms as a
vector, ``eta -> eta / (c xi + d)^2``. A translation ``T = (Tz, Tt)``
shifts the fibre by::

    eta -> eta + (Tz - 2 Tt xi - conj(Tz) xi^2) / 2

which is obtained by requiring the perpendicular foot to move by the
component of ``T`` orthogonal to the line.
"""

from dataclasses import dataclass

import numpy as np

from .linespace import (FLIPPED, STANDARD, OrientedLine, TangentT)
from .kahler import metric_derivatives, metric_G
from .numerics import DEFAULT_FD, jacobian_fd

# above this modulus the output of ``act`` is expressed in the other chart
CHART_SWITCH = 1e3


def _qmul(p, q):
    w1, x1, y1, z1 = p
    w2, x2, y2, z2 = q
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def _qmatrix(q):
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


@dataclass(frozen=True)
class EuclideanMotion:
    """Rigid motion ``x -> R x + T`` with ``R`` given by a unit quaternion
    ``(w, x, y, z)``. The quaternion and its negative are the two SU(2)
    lifts of the same rotation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.rotation, dtype=float)
        n = np.linalg.norm(q)
        if abs(n - 1) > 1e-12:
            if n == 0:
                raise ValueError("zero quaternion")
            q = q / n
        object.__setattr__(self, "rotation", q)
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float))

    @classmethod
    def identity(cls):
        return cls(np.array([1.0, 0, 0, 0]), np.zeros(3))

    @classmethod
    def rotation_about(cls, axis, angle, translation=(0.0, 0.0, 0.0)):
        axis = np.asarray(axis, dtype=float)
        axis = axis / np.linalg.norm(axis)
        q = np.concatenate([[np.cos(angle / 2)], np.sin(angle / 2) * axis])
        return cls(q, np.asarray(translation, dtype=float))

    @classmethod
    def translation_by(cls, T):
        return cls(np.array([1.0, 0, 0, 0]), np.asarray(T, dtype=float))

    @classmethod
    def aligning(cls, d, target=(0.0, 0.0, 1.0)):
        """Rotation taking unit vector ``d`` to ``target``."""
        d = np.asarray(d, dtype=float)
        t = np.asarray(target, dtype=float)
        c = float(np.clip(np.dot(d, t), -1, 1))
        axis = np.cross(d, t)
        s = np.linalg.norm(axis)
        if s < 1e-14:
            if c > 0:
                return cls.identity()
            # any axis orthogonal to d
            trial = np.eye(3)[np.argmin(np.abs(d))]
            axis = np.cross(d, trial)
            return cls.rotation_about(axis, np.pi)
        return cls.rotation_about(axis, np.arctan2(s, c))

    @property
    def matrix(self):
        return _qmatrix(self.rotation)

    def apply(self, x):
        return self.matrix @ np.asarray(x, dtype=float) + self.translation

    def apply_vector(self, v):
        return self.matrix @ np.asarray(v, dtype=float)

    def __matmul__(self, other):
        """Composition: ``(self @ other)(x) = self(other(x))``."""
        q = _qmul(self.rotation, other.rotation)
        return EuclideanMotion(q, self.apply_vector(other.translation) + self.translation)

    def inverse(self):
        w, x, y, z = self.rotation
        qi = np.array([w, -x, -y, -z])
        return EuclideanMotion(qi, -(_qmatrix(qi) @ self.translation))

    def su2(self):
        w, x, y, z = self.rotation
        a = complex(w, z)
        b = complex(y, -x)
        return a, b, -b.conjugate(), a.conjugate()


FLIP_MOTION = EuclideanMotion(np.array([0.0, 1.0, 0.0, 0.0]), np.zeros(3))


def _act_standard(m, xi, eta):
    a, b, c, d = m.su2()
    den = c * xi + d
    if abs(den) < 1e-150:
        return None
    xi1 = (a * xi + b) / den
    if not np.isfinite(xi1):
        return None
    eta1 = eta / den ** 2
    Tz = complex(m.translation[0], m.translation[1])
    Tt = m.translation[2]
    eta1 += 0.5 * (Tz - 2 * Tt * xi1 - Tz.conjugate() * xi1 ** 2)
    return xi1, eta1


def _chart_motion(chart):
    return FLIP_MOTION if chart == FLIPPED else EuclideanMotion.identity()


def act(m, line, chart=None):
    """Image of ``line`` under the motion ``m``.

    The result is expressed in ``chart`` (default: the input chart), unless
    that would put ``|xi|`` above ``CHART_SWITCH``, in which case the other
    chart is used.
    """
    target = chart or line.chart
    src = _chart_motion(line.chart)
    for out in (target, FLIPPED if target == STANDARD else STANDARD):
        full = _chart_motion(out) @ m @ src
        res = _act_standard(full, line.xi, line.eta)
        if res is not None and (abs(res[0]) <= CHART_SWITCH or chart is not None):
            return OrientedLine(res[0], res[1], out)
    raise AssertionError("unreachable: one chart always has |xi| <= 1")


def act_differential(m, line, scheme=DEFAULT_FD, chart=None):
    """Jacobian of ``act(m, .)`` in real coordinates at ``line`` (central FD).

    ``chart`` fixes the chart of the image; by default it is the one chosen
    by ``act``.
    """
    out_chart = chart or act(m, line).chart

    def f(x):
        return act(m, OrientedLine.from_coords(x, line.chart), chart=out_chart).coords

    return jacobian_fd(f, line.coords, scheme)


def push_forward(m, v, scheme=DEFAULT_FD):
    """Image of the tangent vector ``v`` under ``act(m, .)``."""
    J = act_differential(m, v.base, scheme)
    return TangentT.from_coords(act(m, v.base), J @ v.coords)


# ---------------------------------------------------------------------------
# Killing fields


@dataclass(frozen=True)
class KillingParams:
    alpha: complex = 0j
    a: float = 0.0
    beta: complex = 0j
    b: float = 0.0

    @property
    def vector(self):
        return np.array([self.alpha.real, self.alpha.imag, self.a,
                         self.beta.real, self.beta.imag, self.b])

    @classmethod
    def from_vector(cls, p):
        return cls(complex(p[0], p[1]), float(p[2]), complex(p[3], p[4]), float(p[5]))

    @classmethod
    def from_generator(cls, angular_velocity, velocity):
        """Parameters of the field generated by ``x' = w x x + v``."""
        w1, w2, w3 = angular_velocity
        v1, v2, v3 = velocity
        return cls(complex(w2, -w1) / 2, w3 / 2, complex(v1, v2) / 2, -v3)


KILLING_BASIS = tuple(KillingParams.from_vector(row) for row in np.eye(6))


def killing_field(p, line):
    """Killing vector with parameters ``p`` at ``line`` (standard chart)."""
    xi, eta = line.xi, line.eta
    ab = p.alpha.conjugate()
    kxi = p.alpha + 2j * p.a * xi + ab * xi ** 2
    keta = 2 * (1j * p.a + ab * xi) * eta + p.beta + p.b * xi - p.beta.conjugate() * xi ** 2
    return TangentT(line, kxi, keta)


def _field_coords(field, chart):
    return lambda x: field(OrientedLine.from_coords(x, chart)).coords


def lie_derivative_G(field, line, scheme=DEFAULT_FD):
    """Lie derivative of the metric along ``field`` (callable line -> TangentT)."""
    K = field(line).coords
    dK = jacobian_fd(_field_coords(field, line.chart), line.coords, scheme)  # dK[i, j] = d_j K^i
    g = metric_G(line)
    dg = metric_derivatives(line)
    return np.einsum("i,ijk->jk", K, dg) + g @ dK + (g @ dK).T


def bracket(P, Q, line, scheme=DEFAULT_FD):
    """Lie bracket ``[P, Q]^i = P^j d_j Q^i - Q^j d_j P^i`` of vector fields."""
    dP = jacobian_fd(_field_coords(P, line.chart), line.coords, scheme)
    dQ = jacobian_fd(_field_coords(Q, line.chart), line.coords, scheme)
    out = dQ @ P(line).coords - dP @ Q(line).coords
    return TangentT.from_coords(line, out)


def fit_killing(values):
    """Least-squares Killing parameters matching sampled vectors.

    ``values`` is a list of TangentT. Returns ``(params, max_residual)``.
    """
    rows, rhs = [], []
    for v in values:
        rows.append(np.stack([killing_field(e, v.base).coords for e in KILLING_BASIS], axis=1))
        rhs.append(v.coords)
    A = np.concatenate(rows)
    y = np.concatenate(rhs)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return KillingParams.from_vector(coef), float(np.max(np.abs(A @ coef - y)))
