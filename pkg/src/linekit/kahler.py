"""Complex structure, symplectic form and neutral metric on the line space.

Conventions
-----------
Real coordinates are ordered ``(xi1, xi2, eta1, eta2)``. Symmetric and
exterior products of 1-forms both carry a factor one half::

    a b   = (a (x) b + b (x) a) / 2
    a ^ b = (a (x) b - b (x) a) / 2

and the exterior derivative is normalised to match, so
``d(theta)(v, w) = (v theta(w) - w theta(v)) / 2`` for constant fields.
With these choices ``G(v, w) = Omega(J v, w)``, ``Omega = d(Theta)`` and
``G(v, v)`` is the angular momentum of the Jacobi field of ``v``.

The metric on the total space of the tangent bundle of a surface with
conformal weight ``w = exp(2u)`` is::

    G = i (w deta dxibar - w detabar dxi + (eta dw - etabar dbar w) dxi dxibar)

which for the round factor ``w = 2 / (1 + |xi|^2)^2`` is the metric of the
line space.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteSample
from .linespace import TangentT, direction, jacobi_decompose
from .numerics import FDScheme, derivative_fd, jacobian_fd

# complexified coordinate vectors d/dxi, d/dxibar, d/deta, d/detabar
D_XI = np.array([0.5, -0.5j, 0, 0])
D_XIBAR = np.conj(D_XI)
D_ETA = np.array([0, 0, 0.5, -0.5j])
D_ETABAR = np.conj(D_ETA)

NESTED_FD = FDScheme(step=2e-3, order=4)


def round_weight(xi):
    """Round conformal weight ``2/(1+|xi|^2)^2`` and its d/dxi derivative."""
    D = 1 + abs(xi) ** 2
    return 2 / D ** 2, -4 * np.conj(xi) / D ** 3


def _metric_from_weight(eta, w, dw):
    g = np.zeros((4, 4))
    g[0, 0] = g[1, 1] = -2 * (eta * dw).imag
    g[0, 3] = g[3, 0] = -w
    g[1, 2] = g[2, 1] = w
    return g


def _omega_from_weight(eta, w, dw):
    # Omega = Re(w deta^dxibar + eta dw dxi^dxibar), wedge with factor 1/2
    def form(a, b):
        xa, ea = complex(a[0], a[1]), complex(a[2], a[3])
        xb, eb = complex(b[0], b[1]), complex(b[2], b[3])
        val = w * (ea * xb.conjugate() - eb * xa.conjugate())
        val += eta * dw * (xa * xb.conjugate() - xb * xa.conjugate())
        return val.real

    basis = np.eye(4)
    return np.array([[form(basis[i], basis[j]) for j in range(4)] for i in range(4)])


def J_apply(v):
    """Complex structure: multiplication of both components by i."""
    return TangentT(v.base, 1j * v.xidot, 1j * v.etadot)


def J_matrix():
    """Matrix of J acting on real coordinate vectors."""
    j2 = np.array([[0.0, -1.0], [1.0, 0.0]])
    return np.block([[j2, np.zeros((2, 2))], [np.zeros((2, 2)), j2]])


def metric_G(line):
    """Real 4x4 matrix of the neutral metric at ``line``."""
    w, dw = round_weight(line.xi)
    return _metric_from_weight(line.eta, w, dw)


def omega_matrix(line):
    w, dw = round_weight(line.xi)
    return _omega_from_weight(line.eta, w, dw)


def metric_form(v, w):
    return float(v.coords @ metric_G(v.base) @ w.coords)


def omega(line, v, w):
    """Symplectic form evaluated on two tangent vectors at ``line``."""
    return float(v.coords @ omega_matrix(line) @ w.coords)


def omega_jacobi(v, w):
    """Symplectic form through Jacobi fields: (<X1, Y2> - <Y1, X2>) / 2."""
    X, Y = jacobi_decompose(v), jacobi_decompose(w)
    return 0.5 * (np.dot(X.X1, Y.X2) - np.dot(Y.X1, X.X2))


def angular_momentum(v):
    """Oriented area (X1 x X2) . e0 of the Jacobi field of ``v``."""
    X = jacobi_decompose(v)
    return float(np.dot(np.cross(X.X1, X.X2), direction(v.base)))


def theta_covector(line):
    """Components of Theta = 4 Re(etabar dxi) / (1+|xi|^2)^2."""
    D = 1 + abs(line.xi) ** 2
    e1, e2 = line.eta.real, line.eta.imag
    return 4 / D ** 2 * np.array([e1, e2, 0.0, 0.0])


def theta(line, v):
    return float(theta_covector(line) @ v.coords)


def kahler_potential(line):
    xi, eta = line.xi, line.eta
    return (2j * (xi * eta.conjugate() - xi.conjugate() * eta) / (1 + abs(xi) ** 2)).real


def metric_derivatives(line):
    """Analytic partials; ``out[k]`` is d(G)/dx^k."""
    x1, x2, n1, n2 = line.coords
    D = 1 + x1 * x1 + x2 * x2
    m = x1 * n2 - x2 * n1
    out = np.zeros((4, 4, 4))
    dg00 = [8 * n2 / D ** 3 - 48 * m * x1 / D ** 4,
            -8 * n1 / D ** 3 - 48 * m * x2 / D ** 4,
            -8 * x2 / D ** 3,
            8 * x1 / D ** 3]
    for k in range(4):
        out[k, 0, 0] = out[k, 1, 1] = dg00[k]
    for k, xk in ((0, x1), (1, x2)):
        out[k, 0, 3] = out[k, 3, 0] = 8 * xk / D ** 3
        out[k, 1, 2] = out[k, 2, 1] = -8 * xk / D ** 3
    return out


def _christoffel(g, dg):
    # dg[k, i, j] = d_k g_ij ; returns gamma[i, j, k] = Gamma^i_jk
    ginv = np.linalg.inv(g)
    lower = 0.5 * (np.einsum("jlk->ljk", dg) + np.einsum("klj->ljk", dg) - dg)
    return np.einsum("il,ljk->ijk", ginv, lower)


def christoffel(line):
    """Levi-Civita coefficients ``Gamma[i, j, k]`` = Gamma^i_{jk}."""
    return _christoffel(metric_G(line), metric_derivatives(line))


def geodesic_residual(line, velocity, acceleration):
    """``acc^i + Gamma^i_jk vel^j vel^k`` in real coordinates."""
    gam = christoffel(line)
    return acceleration + np.einsum("ijk,j,k->i", gam, velocity, velocity)


# ---------------------------------------------------------------------------
# curvature of the tangent-bundle metric for a general conformal factor


@dataclass(frozen=True)
class ConformalFactor:
    """Conformal factor ``u`` of a surface metric ``exp(2u)|dxi|^2``.

    ``du`` (d u / d xi) and ``ddbar_u`` (d dbar u) are optional analytic
    derivatives; central differences are used when they are missing.
    """

    u: object
    du: object = None
    ddbar_u: object = None

    def d(self, xi):
        if self.du is not None:
            return complex(self.du(xi))
        ux = derivative_fd(lambda t: self.u(complex(t, xi.imag)), xi.real)
        uy = derivative_fd(lambda t: self.u(complex(xi.real, t)), xi.imag)
        return 0.5 * complex(ux, -uy)

    def ddbar(self, xi):
        if self.ddbar_u is not None:
            return float(np.real(self.ddbar_u(xi)))
        fd = FDScheme(step=1e-3, order=4)
        uxx = derivative_fd(
            lambda t: derivative_fd(lambda s: self.u(complex(s, xi.imag)), t, fd), xi.real, fd)
        uyy = derivative_fd(
            lambda t: derivative_fd(lambda s: self.u(complex(xi.real, s)), t, fd), xi.imag, fd)
        return 0.25 * (uxx + uyy)

    def weight(self, xi):
        w = np.exp(2 * self.u(xi))
        return w, 2 * w * self.d(xi)

    def metric(self, x):
        xi, eta = complex(x[0], x[1]), complex(x[2], x[3])
        w, dw = self.weight(xi)
        return _metric_from_weight(eta, w, dw)

    def gauss_curvature(self, xi):
        w = np.exp(2 * self.u(xi))
        return -4 / w * self.ddbar(xi)


def round_sphere_factor():
    """``exp(2u) = 2 (1+|xi|^2)^-2``."""
    return ConformalFactor(
        u=lambda xi: 0.5 * np.log(2) - np.log(1 + abs(xi) ** 2),
        du=lambda xi: -np.conj(xi) / (1 + abs(xi) ** 2),
        ddbar_u=lambda xi: -1 / (1 + abs(xi) ** 2) ** 2,
    )


def numerical_curvature(metric_fn, x, scheme=NESTED_FD):
    """Riemann, Ricci and scalar curvature of ``metric_fn`` at ``x`` by
    nested central differences.

    Returns ``(riemann_lower, ricci, scalar, g)`` with
    ``riemann_lower[a, b, c, d] = R_abcd`` and Ricci ``R_bd = R^a_bad``.
    """
    x = np.asarray(x, dtype=float)

    def gamma_at(y):
        g = metric_fn(y)
        dg = np.moveaxis(jacobian_fd(metric_fn, y, scheme), -1, 0)
        return _christoffel(g, dg)

    g = metric_fn(x)
    gam = gamma_at(x)
    # dgam[i, j, k, l] = d_l Gamma^i_jk
    dgam = jacobian_fd(gamma_at, x, scheme)
    # R^i_{jkl} = d_k G^i_lj - d_l G^i_kj + G^i_km G^m_lj - G^i_lm G^m_kj
    riem = (np.einsum("iljk->ijkl", dgam) - np.einsum("ikjl->ijkl", dgam)
            + np.einsum("ikm,mlj->ijkl", gam, gam) - np.einsum("ilm,mkj->ijkl", gam, gam))
    if not np.all(np.isfinite(riem)):
        raise NonFiniteSample("non-finite curvature sample")
    ricci = np.einsum("ijil->jl", riem)
    scalar = float(np.einsum("jl,jl->", np.linalg.inv(g), ricci))
    lower = np.einsum("ai,ibcd->abcd", g, riem)
    return lower, ricci, scalar, g


def weyl_tensor(lower, ricci, scalar, g):
    n = g.shape[0]
    gr = (np.einsum("ac,bd->abcd", g, ricci) - np.einsum("ad,bc->abcd", g, ricci)
          - np.einsum("bc,ad->abcd", g, ricci) + np.einsum("bd,ac->abcd", g, ricci))
    gg = np.einsum("ac,bd->abcd", g, g) - np.einsum("ad,bc->abcd", g, g)
    return lower - gr / (n - 2) + scalar * gg / ((n - 1) * (n - 2))


@dataclass(frozen=True)
class CurvatureReport:
    scalar: float
    ricci_xixibar: complex
    conformal_component: complex
    gauss_base: float
    ricci_numeric: complex = None
    conformal_numeric: complex = None
    weyl_max: float = None


def curvature_report(u, xi, eta, numeric=True):
    """Closed-form curvature quantities of the tangent-bundle metric at
    ``(xi, eta)`` for conformal factor ``u``, with an optional numerical
    Riemann-tensor cross-check.
    """
    xi, eta = complex(xi), complex(eta)
    w = np.exp(2 * u.u(xi))
    kappa = u.gauss_curvature(xi)
    dkappa = derivative_fd(lambda t: u.gauss_curvature(complex(t, xi.imag)), xi.real)
    dkappa_y = derivative_fd(lambda t: u.gauss_curvature(complex(xi.real, t)), xi.imag)
    dk = 0.5 * complex(dkappa, -dkappa_y)
    conformal = 0.5 * w * (eta * dk + eta.conjugate() * dk.conjugate())
    ricci = -4 * u.ddbar(xi)
    if not numeric:
        return CurvatureReport(np.nan, ricci, conformal, kappa)
    x = np.array([xi.real, xi.imag, eta.real, eta.imag])
    lower, ric, scalar, g = numerical_curvature(u.metric, x)
    weyl = weyl_tensor(lower, ric, scalar, g)
    ric_c = D_XI @ ric @ D_XIBAR
    # the only independent component in these coordinates
    weyl_c = np.einsum("abcd,a,b,c,d->", weyl, D_XI, D_XIBAR, D_XI, D_XIBAR)
    return CurvatureReport(scalar, ricci, conformal, kappa,
                           ricci_numeric=ric_c, conformal_numeric=weyl_c,
                           weyl_max=float(np.max(np.abs(weyl))))
