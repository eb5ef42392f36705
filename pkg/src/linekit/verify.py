"""Invariant suite shared by ``linekit verify`` and the acceptance tests.

Each check returns a ``CheckResult`` with a one-line deterministic detail
string. Random sampling is seeded; the same seed gives byte-identical
reports.
"""

import inspect
from dataclasses import dataclass

import numpy as np

from . import congruence as cg
from .errors import Caustic
from .geodesics import (GeodesicIVP, GeodesicParams, closed_form_derivatives,
                        closed_form_residual, connect_lines, connection_energy,
                        first_integral, g_distance, geodesic_closed_form,
                        geodesic_rk4, ruled_surface, X3_AXIS)
from .isometry import (KILLING_BASIS, bracket, fit_killing, killing_field,
                       lie_derivative_G)
from .kahler import (ConformalFactor, J_matrix, curvature_report, metric_G,
                     omega_matrix, round_sphere_factor)
from .linespace import (FLIPPED, STANDARD, OrientedLine, TangentT, dphi,
                        direction, line_distance, line_from_point_direction,
                        null_frame, phi_vec)
from .maslov import circle, find_complex_points, maslov_index
from .numerics import derivative_fd

DEFAULT_SEED = 1234


@dataclass(frozen=True)
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.title}: {self.detail}"


def _random_line(rng, chart=None):
    xi = complex(*rng.normal(0, 0.8, 2))
    eta = complex(*rng.normal(0, 1.0, 2))
    chart = chart or (STANDARD if rng.random() < 0.5 else FLIPPED)
    return OrientedLine(xi, eta, chart)


def _random_tangent(rng, line):
    return TangentT(line, complex(*rng.normal(size=2)), complex(*rng.normal(size=2)))


def _unit(rng):
    d = rng.normal(size=3)
    return d / np.linalg.norm(d)


def check_frame_and_map(seed=DEFAULT_SEED, n=1000):
    rng = np.random.default_rng(seed)
    e_frame = e_foot = e_shift = e_dphi = 0.0
    for _ in range(n):
        line = _random_line(rng)
        f = null_frame(line.xi, line.chart)
        e0, ep, em = f.e0, f.eplus, f.eminus
        e_frame = max(e_frame, abs(ep @ em - 1), abs(e0 @ ep), abs(ep @ ep), abs(e0 @ e0 - 1))
        p0 = phi_vec(line, 0.0)
        e_foot = max(e_foot, abs(p0 @ direction(line)))
        r = rng.uniform(-5, 5)
        e_shift = max(e_shift, np.max(np.abs(phi_vec(line, r) - p0 - r * direction(line))))
        v = _random_tangent(rng, line)
        rdot = rng.normal()
        exact = dphi(line, r, v, rdot)
        x0, dv = line.coords, v.coords
        approx = derivative_fd(
            lambda t: phi_vec(OrientedLine.from_coords(x0 + t * dv, line.chart), r + t * rdot), 0.0)
        e_dphi = max(e_dphi, np.max(np.abs(exact - approx)) / max(1.0, np.max(np.abs(exact))))
    ok = e_frame < 1e-12 and e_foot < 1e-10 and e_shift < 1e-10 and e_dphi < 1e-6
    return CheckResult(1, "frame and map identities", ok,
                       f"frame {e_frame:.2e}, foot {e_foot:.2e}, shift {e_shift:.2e}, "
                       f"dphi rel {e_dphi:.2e} over {n} lines")


def check_kahler_triple(seed=DEFAULT_SEED, n=1000):
    rng = np.random.default_rng(seed + 1)
    J = J_matrix()
    e_g = e_inv = 0.0
    bad_sig = 0
    for _ in range(n):
        line = _random_line(rng)
        G, Om = metric_G(line), omega_matrix(line)
        scale = max(1.0, np.max(np.abs(G)))
        e_g = max(e_g, np.max(np.abs(G - J.T @ Om)) / scale)
        e_inv = max(e_inv, np.max(np.abs(J.T @ Om @ J - Om)) / scale)
        ev = np.linalg.eigvalsh(G)
        if not (np.sum(ev > 0) == 2 and np.sum(ev < 0) == 2):
            bad_sig += 1
    ok = e_g < 1e-10 and e_inv < 1e-10 and bad_sig == 0
    return CheckResult(2, "Kahler triple", ok,
                       f"G - Omega(J.,.) {e_g:.2e}, Omega(J.,J.) - Omega {e_inv:.2e}, "
                       f"non-neutral points {bad_sig}/{n}")


def check_curvature(seed=DEFAULT_SEED, n=3):
    rng = np.random.default_rng(seed + 2)
    u = round_sphere_factor()
    test = ConformalFactor(u=lambda z: abs(z) ** 2, du=lambda z: np.conj(z),
                           ddbar_u=lambda z: 1.0)
    e_s = e_ric = e_ricn = e_conf = 0.0
    min_test = np.inf
    for _ in range(n):
        xi = complex(*rng.normal(0, 0.5, 2))
        eta = complex(*rng.normal(0, 0.5, 2))
        rep = curvature_report(u, xi, eta)
        target = 4 / (1 + abs(xi) ** 2) ** 2
        e_s = max(e_s, abs(rep.scalar))
        e_ric = max(e_ric, abs(rep.ricci_xixibar - target) / target)
        e_ricn = max(e_ricn, abs(rep.ricci_numeric - target) / target)
        e_conf = max(e_conf, abs(rep.conformal_component), abs(rep.conformal_numeric))
        if eta != 0:
            tr = curvature_report(test, xi, eta, numeric=False)
            min_test = min(min_test, abs(tr.conformal_component))
    ok = e_s < 1e-6 and e_ric < 1e-6 and e_ricn < 1e-5 and e_conf < 1e-6 and min_test > 1e-3
    return CheckResult(3, "curvature", ok,
                       f"|S| {e_s:.2e}, Ricci rel {e_ric:.2e} (numeric {e_ricn:.2e}), "
                       f"conformal round {e_conf:.2e}, conformal test min {min_test:.3f}")


def _noise_field(line):
    return TangentT(line, abs(line.xi) ** 2, 0.3 * line.eta.conjugate())


def check_killing(seed=DEFAULT_SEED, n=100, n_fit=8):
    rng = np.random.default_rng(seed + 3)
    lines = [_random_line(rng, STANDARD) for _ in range(n)]
    e_lie = 0.0
    for p in KILLING_BASIS:
        for line in lines:
            e_lie = max(e_lie, np.max(np.abs(lie_derivative_G(lambda L: killing_field(p, L), line))))
    control = max(np.max(np.abs(lie_derivative_G(_noise_field, line))) for line in lines[:20])
    e_fit = 0.0
    for i in range(6):
        for j in range(i + 1, 6):
            P, Q = KILLING_BASIS[i], KILLING_BASIS[j]
            vals = [bracket(lambda L: killing_field(P, L), lambda L: killing_field(Q, L), line)
                    for line in lines[:n_fit]]
            e_fit = max(e_fit, fit_killing(vals)[1])
    ok = e_lie < 1e-8 and control > 0.1 and e_fit < 1e-6
    return CheckResult(4, "Killing fields", ok,
                       f"max |L_K G| {e_lie:.2e} (6 x {n} lines), control {control:.3f}, "
                       f"bracket closure {e_fit:.2e}")


def _plane_residual(points):
    pts = points.reshape(-1, 3)
    c = pts - pts.mean(axis=0)
    n = np.linalg.svd(c)[2][-1]
    return float(np.max(np.abs(c @ n)))


def _row_straightness(mesh):
    worst = 0.0
    for row in mesh.vertices:
        d = row[-1] - row[0]
        if np.linalg.norm(d) == 0:
            continue
        d = d / np.linalg.norm(d)
        c = row - row[0]
        worst = max(worst, float(np.max(np.linalg.norm(c - np.outer(c @ d, d), axis=1))))
    return worst


def check_geodesics(seed=DEFAULT_SEED, n=100):
    rng = np.random.default_rng(seed + 4)
    e_res = 0.0
    for _ in range(n):
        C2 = rng.uniform(0.1, 2.0) * rng.choice([-1, 1])
        p = GeodesicParams(rng.normal(), C2, rng.normal(), rng.uniform(0, 2 * np.pi))
        s = rng.uniform(-0.9, 0.9) * (np.pi / 2) / abs(C2)
        e_res = max(e_res, *closed_form_residual(p, s))
    p = GeodesicParams(1.0, 0.5, 0.3, 0.4)
    _, _, dxi, deta, _, _ = closed_form_derivatives(p, 0.0)
    v0 = TangentT(X3_AXIS, dxi, deta)
    ivp = GeodesicIVP.from_initial(X3_AXIS, v0)
    c0 = first_integral(X3_AXIS, v0)
    e_rk = e_fi = 0.0
    for s in (0.25, 0.5, 0.75, 1.0):
        line, vel = geodesic_rk4(ivp, s, 1e-3)
        exact = geodesic_closed_form(p, s)
        e_rk = max(e_rk, np.max(np.abs(line.in_chart(STANDARD).coords - exact.coords)))
        e_fi = max(e_fi, abs(first_integral(line, vel) - c0))
    flat = ruled_surface(GeodesicParams(0.0, 0.7, 0.4, 1.0), (-2, 2), (-1, 1), 21, 5)
    e_plane = _plane_residual(flat.vertices)
    q = GeodesicParams(1.0, 0.5)
    mesh = ruled_surface(q, (-3, 3), (-2, 2), 31, 7)
    s, t = np.meshgrid(mesh.s, mesh.r, indexing="ij")
    helix = np.stack([t * np.sin(2 * q.C2 * s), -q.C1 * s / (2 * q.C2) + 0 * t,
                      t * np.cos(2 * q.C2 * s)], axis=-1)
    e_helix = float(np.max(np.abs(mesh.vertices - helix)))
    e_rows = max(_row_straightness(mesh), _row_straightness(flat))
    ok = (e_res < 1e-8 and e_rk < 1e-6 and e_fi < 1e-8 and e_plane < 1e-9
          and e_helix < 1e-9 and e_rows < 1e-9)
    return CheckResult(5, "geodesics", ok,
                       f"closed-form residual {e_res:.2e}, RK4 {e_rk:.2e}, first integral drift "
                       f"{e_fi:.2e}, plane {e_plane:.2e}, helicoid {e_helix:.2e}, rows {e_rows:.2e}")


def _random_skew_pair(rng):
    while True:
        g1, _ = line_from_point_direction(rng.normal(size=3), _unit(rng), "auto")
        g2, _ = line_from_point_direction(rng.normal(size=3), _unit(rng), "auto")
        c = connect_lines(g1, g2, 0)
        if c.kind == "helicoid" and c.l > 1e-3 and 1e-3 < c.d < np.pi - 1e-3:
            return g1, g2


def check_distance(seed=DEFAULT_SEED, n=20):
    rng = np.random.default_rng(seed + 5)
    g1 = X3_AXIS
    g2, _ = line_from_point_direction([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    c = connect_lines(g1, g2, 0)
    e_ex = abs(g_distance(g1, g2) + 2 / np.pi)
    e_ld = max(abs(c.l - 1), abs(c.d - np.pi / 2))
    e_cross = e_hit = 0.0
    for _ in range(n):
        a, b = _random_skew_pair(rng)
        for k in (0, 1):
            conn = connect_lines(a, b, k)
            energy, _ = connection_energy(conn)
            e_cross = max(e_cross, abs(-conn.l ** 2 / conn.d - energy))
            e_hit = max(e_hit, line_distance(conn.line_at(conn.s1), b), line_distance(conn.line_at(0.0), a))
    ok = e_ex < 1e-12 and e_ld < 1e-12 and e_cross < 1e-6 and e_hit < 1e-8
    return CheckResult(6, "distance", ok,
                       f"example -l^2/d error {e_ex:.2e} (l, d error {e_ld:.2e}), "
                       f"|-l^2/d - C1 s1| {e_cross:.2e} over {n} pairs x 2 turns, endpoints {e_hit:.2e}")


def normal_specs():
    return [
        cg.Sphere(1.0),
        cg.Sphere(1.5, (0.3, -0.2, 0.4)),
        cg.Ellipsoid(1.0, 1.1, 1.3),
        cg.Torus(2.0, 0.5),
        cg.Graph(((0.0, 0.1, 0.5), (0.2, 0.3, 0.0), (0.5, -0.1, 0.0), (0.05, 0.0, 0.0))),
    ]


def check_lagrangian(n=6):
    worst = 0.0
    for spec in normal_specs():
        c = spec.congruence()
        worst = max(worst, cg.is_lagrangian(c, c.grid(n), tol=1e-10)[1])
    torn = cg.TornTorus(2.0, 0.5).congruence()
    period = cg.theta_period(torn, lambda t: (0.7, np.pi * t))
    e_per = abs(period - 2 * np.pi)
    ok = worst < 1e-10 and e_per < 1e-6
    return CheckResult(7, "normal congruences are Lagrangian", ok,
                       f"max |f*Omega| {worst:.2e}, torn-torus period {period:.12f} (error {e_per:.2e})")


def _sgn(x, tol):
    return 0 if abs(x) < tol else int(np.sign(x))


def signature_sweep(n=7):
    """``(points, agree, literal_agree, fallbacks)`` over the test congruences;
    ``agree`` counts sign(det) = sign(twist^2 - |sigma|^2)."""
    cases = [(spec.congruence(), 0.0) for spec in normal_specs() if not isinstance(spec, cg.Sphere)]
    cases += [(cg.Sphere(1.0).congruence(), 1.0),
              (cg.RotationField(1.0).congruence(), 0.0),
              (cg.RotationField(0.3).congruence(), 0.0),
              (cg.TornTorus(2.0, 0.5).congruence(), 0.0)]
    total = agree = literal = fallbacks = 0
    for c, r in cases:
        for nu in c.grid(n):
            try:
                det, q = cg.signature_consistency(c, nu, r)
            except Caustic:
                fallbacks += 1
                det, q = cg.signature_consistency(c, nu, r + 0.5)
            sd, sq = _sgn(det, 1e-9), _sgn(q, 1e-6)
            total += 1
            agree += sd == sq
            literal += sd == -sq
    return total, agree, literal, fallbacks


def check_signature(n=7):
    total, agree, literal, fallbacks = signature_sweep(n)
    c = cg.RotationField(1.0).congruence()
    e_metric = 0.0
    wrong = 0
    rng = np.random.default_rng(7)
    for _ in range(20):
        xi = complex(*rng.uniform(-0.95, 0.95, 2))
        if abs(abs(xi) - 1) < 0.05:
            continue
        nu = np.array([xi.real, xi.imag])
        g = cg.pullback_G(c, nu)
        target = 4 * (1 - abs(xi) ** 2) / (1 + abs(xi) ** 2) ** 3
        e_metric = max(e_metric, np.max(np.abs(g - target * np.eye(2))) / abs(target))
        if abs(xi) < 1 and cg.classify_signature(c, nu) != cg.RIEMANNIAN:
            wrong += 1
    for a in np.linspace(0, 2 * np.pi, 9)[:-1]:
        if cg.classify_signature(c, np.array([np.cos(a), np.sin(a)])) != cg.TOTALLY_NULL:
            wrong += 1
    ok = agree == total and e_metric < 1e-8 and wrong == 0
    return CheckResult(8, "signature of the induced metric", ok,
                       f"sign(det f*G) = sign(twist^2 - |sigma|^2) at {agree}/{total} points "
                       f"(opposite-sign form holds at {literal}/{total}; caustic fallbacks {fallbacks}); "
                       f"rotation-field metric rel {e_metric:.2e}, misclassified {wrong}")


def check_round_sphere(n=7):
    c = cg.Sphere(1.0).congruence()
    e_s = e_g = 0.0
    for nu in c.grid(n):
        s = cg.spin_coefficients(c, nu, 1.0)
        e_s = max(e_s, abs(s.sigma), abs(s.twist))
        e_g = max(e_g, float(np.max(np.abs(cg.pullback_G(c, nu)))))
    ok = e_s < 1e-8 and e_g < 1e-8
    return CheckResult(9, "round-sphere congruence is totally null", ok,
                       f"max |sigma|, |twist| {e_s:.2e}, max |f*G| {e_g:.2e}")


def ellipsoid_grid():
    return np.linspace(-3.2, 3.2, 65), np.linspace(-0.8, 0.8, 17)


def ellipse(center, a, b):
    cx, cy = center
    return lambda t: np.array([cx + a * np.cos(2 * np.pi * t), cy + b * np.sin(2 * np.pi * t)])


def check_maslov():
    spec = cg.Ellipsoid(1.0, 1.1, 1.3)
    c = spec.congruence()
    pts = find_complex_points(c, ellipsoid_grid())
    analytic = spec.umbilics()
    e_loc = max(min(np.linalg.norm(p.nu - u) for u in analytic) for p in pts) if pts else np.inf
    mult_ok = all(p.multiplicity == 1 for p in pts)

    def idx(curve):
        return maslov_index(c, curve, 256, points=pts)

    single = [idx(circle(p.nu, 0.15)) for p in pts]
    single_ok = all(abs(r.index - 1) < 1e-6 and r.complex_points_enclosed == 1 for r in single)
    empty = [idx(circle((0.0, 0.5), 0.2)), idx(circle((1.5, 0.0), 0.5))]
    empty_ok = all(abs(r.index) < 1e-6 for r in empty)
    two = idx(circle((0.0, 0.0), 1.0))
    four = idx(ellipse((0.0, 0.0), 3.0, 0.6))
    add_ok = (abs(two.index - 2) < 1e-6 and abs(four.index - 4) < 1e-6
              and two.complex_points_enclosed == 2 and four.complex_points_enclosed == 4)
    u = pts[-1].nu if pts else np.zeros(2)
    pairs = [
        (circle(u, 0.15), ellipse(u, 0.25, 0.1)),
        (circle((0.0, 0.0), 1.0), circle((0.1, 0.05), 0.8)),
        (circle((1.5, 0.6), 0.3), circle((1.5, -0.6), 0.3)),
    ]
    homo_ok = all(abs(idx(a).index - idx(b).index) < 1e-6 for a, b in pairs)
    rev = maslov_index(c, lambda t: circle(u, 0.15)(1 - t), 256)
    rev_ok = abs(rev.index + 1) < 1e-6
    ok = (len(pts) == 4 and e_loc < 1e-6 and mult_ok and single_ok and empty_ok
          and add_ok and homo_ok and rev_ok)
    return CheckResult(10, "complex points and index", ok,
                       f"{len(pts)} complex points (location error {e_loc:.2e}), single indices "
                       f"{[round(r.index, 6) for r in single]}, empty "
                       f"{[round(r.index, 6) + 0.0 for r in empty]}, two {two.index:.6f}, four "
                       f"{four.index:.6f}, homotopy pairs {'equal' if homo_ok else 'differ'}, "
                       f"reversed {rev.index:.6f}")


CHECKS = (check_frame_and_map, check_kahler_triple, check_curvature, check_killing,
          check_geodesics, check_distance, check_lagrangian, check_signature,
          check_round_sphere, check_maslov)


def run_all(seed=DEFAULT_SEED):
    out = []
    for chk in CHECKS:
        try:
            out.append(chk(seed) if "seed" in inspect.signature(chk).parameters else chk())
        except Exception as exc:  # a crashing check is a failing check
            num = CHECKS.index(chk) + 1
            out.append(CheckResult(num, chk.__name__[6:].replace("_", " "), False,
                                   f"raised {type(exc).__name__}: {exc}"))
    return out


def report(results):
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
