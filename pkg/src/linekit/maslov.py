"""Complex (shear-free) points of a Lagrangian congruence and their index.

On a Lagrangian congruence the induced metric is Lorentzian away from the
zeros of the shear; its two null directions make the angle
``psi = arg(sigma)/2`` (mod pi) with the frame. The index of a closed curve
is the winding of this undirected pair, normalised by ``CALIBRATION`` so
that one generic umbilic counts 1.

The shear is evaluated on the generating surface (``surface_r``) when
available, and its phase is always measured in the standard-chart frame
gauge, which is smooth on any parameter disc that avoids the south pole.
"""

from dataclasses import dataclass

import numpy as np

from .congruence import spin_coefficients
from .errors import (Caustic, CurveHitsComplexPoint, NonIsolated,
                     ResolutionLimit)
from .linespace import STANDARD
from .numerics import FDScheme, jacobian_fd, winding_number

# raw null-pair winding (period pi) of one umbilic of Ellipsoid(1, 1.1, 1.3),
# measured counter-clockwise in the parameter plane
CALIBRATION = -1.0
MIN_SAMPLES = 64


@dataclass(frozen=True)
class ComplexPoint:
    nu: np.ndarray
    multiplicity: int
    shear: float


@dataclass(frozen=True)
class IndexResult:
    index: float
    samples: int
    complex_points_enclosed: int
    raw: float


def shear(c, nu):
    """Shear at the surface point over ``nu`` (or at the foot)."""
    r = c.surface_r(nu) if c.surface_r is not None else 0.0
    try:
        return spin_coefficients(c, nu, r, gauge=STANDARD).sigma
    except Caustic:
        return spin_coefficients(c, nu, r + 1.0, gauge=STANDARD).sigma


def circle(center, radius):
    """Counter-clockwise parameter circle ``t -> center + radius e^{2 pi i t}``."""
    cx, cy = center

    def curve(t):
        a = 2 * np.pi * t
        return np.array([cx + radius * np.cos(a), cy + radius * np.sin(a)])

    return curve


def _raw_winding(c, curve, samples, tol):
    ts = np.arange(samples + 1) / samples
    sig = np.array([shear(c, curve(t)) for t in ts[:-1]])
    small = np.min(np.abs(sig))
    if small < tol:
        k = int(np.argmin(np.abs(sig)))
        raise CurveHitsComplexPoint(f"|sigma| = {small:.3g} at {curve(ts[k])}")
    psi = np.angle(np.append(sig, sig[0])) / 2
    return winding_number(psi, np.pi)


def _curve_winding_about(curve, point, samples):
    ts = np.arange(samples + 1) / samples
    z = np.array([complex(*(np.asarray(curve(t)) - point)) for t in ts])
    if np.min(np.abs(z)) == 0:
        return 0
    return int(round(winding_number(np.angle(z))))


def maslov_index(c, curve, samples=256, tol=1e-6, points=()):
    """Calibrated null-direction winding along a closed parameter curve.

    ``points`` (ComplexPoints) are counted, with multiplicity, when the
    curve winds around them; the count is reported alongside the index.
    """
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples")
    raw = _raw_winding(c, curve, samples, tol)
    enclosed = sum(p.multiplicity * _curve_winding_about(curve, p.nu, samples) for p in points)
    return IndexResult(raw / CALIBRATION, samples, enclosed, raw)


def _newton(c, nu, tol, iters=30):
    scheme = FDScheme(1e-4, 2)

    def F(v):
        s = shear(c, v)
        return np.array([s.real, s.imag])

    x = np.asarray(nu, dtype=float)
    f = F(x)
    for _ in range(iters):
        if np.linalg.norm(f) < tol * 1e-3:
            break
        J = jacobian_fd(F, x, scheme)
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        while lam > 1e-3:
            y = x + lam * step
            fy = F(y)
            if np.linalg.norm(fy) < np.linalg.norm(f):
                x, f = y, fy
                break
            lam /= 2
        else:
            break
    return x, float(np.linalg.norm(f))


def find_complex_points(c, grid, tol=1e-6, nonisolated_fraction=0.25):
    """Locate zeros of the shear on the grid ``(nu1_values, nu2_values)``.

    Local minima of ``|sigma|`` are refined by damped Newton; multiplicity
    is the calibrated winding on a circle of radius three grid spacings.
    """
    g1, g2 = (np.asarray(g, dtype=float) for g in grid)
    h = min(np.min(np.diff(g1)), np.min(np.diff(g2)))
    mag = np.array([[abs(shear(c, np.array([u, v]))) for v in g2] for u in g1])
    scale = float(np.max(mag))
    if np.mean(mag < max(tol, 1e-6 * scale)) > nonisolated_fraction:
        raise NonIsolated("shear vanishes on a large part of the grid")
    cands = []
    for i in range(1, len(g1) - 1):
        for j in range(1, len(g2) - 1):
            m = mag[i, j]
            if m <= mag[i - 1:i + 2, j - 1:j + 2].min() and m < 0.5 * scale:
                cands.append((g1[i], g2[j]))
    found = []
    for cand in cands:
        x, res = _newton(c, cand, tol)
        if res >= tol:
            continue
        if not (g1[0] <= x[0] <= g1[-1] and g2[0] <= x[1] <= g2[-1]):
            continue
        if any(np.linalg.norm(x - p) < h for p in found):
            continue
        found.append(x)
    radius = 3 * h
    for a in range(len(found)):
        for b in range(a + 1, len(found)):
            if np.linalg.norm(found[a] - found[b]) <= radius:
                raise ResolutionLimit(
                    f"complex points {found[a]} and {found[b]} inside each other's probe circle")
    out = []
    for x in found:
        raw = _raw_winding(c, circle(x, radius), 128, tol)
        out.append(ComplexPoint(x, int(round(raw / CALIBRATION)), abs(shear(c, x))))
    return out
