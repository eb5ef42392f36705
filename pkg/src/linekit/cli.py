"""Batch front-end: ``linekit <config>``.

The config is a flat ``key = value`` file with ``#`` comments. ``command``
selects one of ``map``, ``geodesic``, ``connect``, ``congruence``,
``maslov`` or ``verify``; every other key is typed and checked against the
command's schema. Artifacts are written next to ``output`` (a path
prefix). Exit codes: 0 success, 1 config error, 2 domain error,
3 numerical error or failed verification.
"""

import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import congruence as cg
from .errors import Caustic, ConfigError, LinekitError
from .export import emit_csv, emit_obj
from .geodesics import (GeodesicParams, connect_lines, connection_energy,
                        geodesic_line, ruled_surface)
from .linespace import STANDARD, direction, line_from_point_direction, phi_vec
from .maslov import MIN_SAMPLES, circle, find_complex_points, maslov_index
from .verify import DEFAULT_SEED, report, run_all

INT, REAL, STR = "int", "real", "string"

_COMMON = {"command": (STR, None), "output": (STR, "linekit"), "seed": (INT, DEFAULT_SEED)}

_FAMILY = {
    "family": (STR, None),
    "radius": (REAL, 1.0), "a": (REAL, None), "b": (REAL, None), "c": (REAL, None),
    "core": (REAL, 2.0), "tube": (REAL, 0.5), "coeffs": (STR, "0:2:0.5,2:0:0.5"),
    "path": (STR, None),
    "nu1_min": (REAL, None), "nu1_max": (REAL, None),
    "nu2_min": (REAL, None), "nu2_max": (REAL, None),
}

SCHEMAS = {
    "map": {"n": (INT, 16), "chart": (STR, "auto"), "r_max": (REAL, 2.0)},
    "geodesic": {"C1": (REAL, None), "C2": (REAL, None), "C5": (REAL, 0.0), "theta": (REAL, 0.0),
                 "s_min": (REAL, None), "s_max": (REAL, None), "n_s": (INT, 64),
                 "r_min": (REAL, -1.0), "r_max": (REAL, 1.0), "n_r": (INT, 9),
                 "continuation": (INT, 0)},
    "connect": {**{f"p{k}{x}": (REAL, None) for k in (1, 2) for x in "xyz"},
                **{f"d{k}{x}": (REAL, None) for k in (1, 2) for x in "xyz"},
                "turns": (INT, 0)},
    "congruence": {**_FAMILY, "grid": (INT, 16), "r_eval": (REAL, 0.0)},
    "maslov": {**_FAMILY, "grid": (INT, 65), "grid2": (INT, None),
               "center1": (REAL, None), "center2": (REAL, None), "radius_curve": (REAL, None),
               "samples": (INT, 256)},
    "verify": {},
}

# lower bounds on integer keys
MINIMUM = {"n": 1, "n_s": 2, "n_r": 2, "turns": 0, "grid": 2, "grid2": 2, "samples": MIN_SAMPLES}

# keys that must be present per command (others have defaults or are optional)
REQUIRED = {"geodesic": ("C1", "C2"),
            "connect": tuple(f"{v}{k}{x}" for v in "pd" for k in (1, 2) for x in "xyz"),
            "congruence": ("family",), "maslov": ("family",)}


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    output: str = "linekit"

    def get(self, key):
        return self.params.get(key, {**_COMMON, **SCHEMAS[self.command]}[key][1])


def _convert(kind, text, lineno, key):
    try:
        if kind == INT:
            return int(text)
        if kind == REAL:
            v = float(text)
            if not np.isfinite(v):
                raise ValueError
            return v
    except ValueError:
        raise ConfigError(f"{key} expects {kind}, got {text!r}", lineno) from None
    return text


def parse_config(text):
    """Parse and validate a flat ``key = value`` config."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", lineno)
        key, value = (s.strip() for s in body.split("=", 1))
        if not key:
            raise ConfigError("empty key", lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        raw[key] = (value, lineno)
    if "command" not in raw:
        raise ConfigError("missing key 'command'")
    command, cline = raw["command"]
    if command not in SCHEMAS:
        raise ConfigError(f"unknown command {command!r} (expected one of {', '.join(SCHEMAS)})", cline)
    schema = {**_COMMON, **SCHEMAS[command]}
    params = {}
    for key, (value, lineno) in raw.items():
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} for command {command!r}", lineno)
        if key != "command":
            params[key] = _convert(schema[key][0], value, lineno, key)
            if key in MINIMUM and params[key] < MINIMUM[key]:
                raise ConfigError(f"{key} must be at least {MINIMUM[key]}, got {params[key]}", lineno)
    for key in REQUIRED.get(command, ()):
        if key not in params:
            raise ConfigError(f"missing key {key!r} for command {command!r}")
    output = params.pop("output", _COMMON["output"][1])
    return RunConfig(command, params, output)


def _threads():
    val = os.environ.get("LINEKIT_THREADS", "1")
    try:
        n = int(val)
    except ValueError:
        raise ConfigError(f"LINEKIT_THREADS must be a positive integer, got {val!r}") from None
    if n < 1:
        raise ConfigError(f"LINEKIT_THREADS must be a positive integer, got {val!r}")
    return n


def _pmap(fn, items):
    """Order-preserving map, parallel up to LINEKIT_THREADS."""
    n = _threads()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _parse_coeffs(text):
    terms = []
    for part in text.split(","):
        bits = part.strip().split(":")
        if len(bits) != 3:
            raise ConfigError(f"coeffs expects 'i:j:value' terms, got {part.strip()!r}")
        try:
            terms.append((int(bits[0]), int(bits[1]), float(bits[2])))
        except ValueError:
            raise ConfigError(f"bad coefficient term {part.strip()!r}") from None
    deg = max(max(i, j) for i, j, _ in terms)
    c = np.zeros((deg + 1, deg + 1))
    for i, j, v in terms:
        c[i, j] += v
    return c


def build_spec(cfg):
    fam = cfg.get("family")

    def val(key, default):
        v = cfg.get(key)
        return default if v is None else v

    try:
        if fam == "sphere":
            spec = cg.Sphere(val("radius", 1.0))
        elif fam == "ellipsoid":
            spec = cg.Ellipsoid(val("a", 1.0), val("b", 1.1), val("c", 1.3))
        elif fam == "torus":
            spec = cg.Torus(cfg.get("core"), cfg.get("tube"))
        elif fam == "graph":
            spec = cg.Graph(_parse_coeffs(cfg.get("coeffs")))
        elif fam == "rotation":
            spec = cg.RotationField(val("b", 1.0))
        elif fam == "torn_torus":
            spec = cg.TornTorus(val("a", 2.0), val("b", 0.5))
        elif fam == "csv":
            if cfg.get("path") is None:
                raise ConfigError("family 'csv' needs key 'path'")
            return cg.CsvGrid(cfg.get("path"))
        else:
            raise ConfigError(f"unknown family {fam!r}")
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    (a1, b1), (a2, b2) = spec.domain
    dom = ((val("nu1_min", a1), val("nu1_max", b1)), (val("nu2_min", a2), val("nu2_max", b2)))
    return type(spec)(**{**spec.__dict__, "domain": dom})


def _fmt_params(p):
    return f"C1={p.C1:.17g} C2={p.C2:.17g} C5={p.C5:.17g} theta={p.theta:.17g}"


def run_map(cfg, out):
    rng = np.random.default_rng(cfg.get("seed"))
    rows = []
    for _ in range(cfg.get("n")):
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        p = rng.normal(size=3)
        line, r = line_from_point_direction(p, d, cfg.get("chart"))
        back = phi_vec(line, r)
        rows.append([*p, *d, line.chart, *line.coords, r, *back,
                     float(np.max(np.abs(back - p)))])
    schema = ["x1", "x2", "x3", "d1", "d2", "d3", "chart", "xi1", "xi2", "eta1", "eta2",
              "r", "x1_back", "x2_back", "x3_back", "roundtrip_error"]
    emit_csv(rows, schema, f"{out}_map.csv")
    print(f"map: {len(rows)} lines -> {out}_map.csv")
    return 0


def run_geodesic(cfg, out):
    p = GeodesicParams(cfg.get("C1"), cfg.get("C2"), cfg.get("C5"), cfg.get("theta") % (2 * np.pi))
    bound = 0.95 * (np.pi / 2) / abs(p.C2) if p.C2 else 1.0
    s0 = cfg.get("s_min") if cfg.get("s_min") is not None else -bound
    s1 = cfg.get("s_max") if cfg.get("s_max") is not None else bound
    cont = bool(cfg.get("continuation"))
    mesh = ruled_surface(p, (s0, s1), (cfg.get("r_min"), cfg.get("r_max")),
                         cfg.get("n_s"), cfg.get("n_r"), continuation=cont)
    rows = []
    for s in mesh.s:
        line = geodesic_line(p, s, continuation=cont)
        rows.append([s, line.chart, *line.coords, *phi_vec(line, 0.0), *direction(line)])
    emit_csv(rows, ["s", "chart", "xi1", "xi2", "eta1", "eta2", "foot1", "foot2", "foot3",
                    "d1", "d2", "d3"], f"{out}_trajectory.csv")
    emit_obj(mesh, f"{out}_mesh.obj")
    kind = "plane" if p.C1 == 0 else "helicoid"
    print(f"geodesic: {_fmt_params(p)} ({kind})")
    print(f"wrote {out}_trajectory.csv and {out}_mesh.obj ({mesh.vertices.shape[0] * mesh.vertices.shape[1]} vertices)")
    return 0


def _line_from_keys(cfg, k):
    p = np.array([cfg.get(f"p{k}{x}") for x in "xyz"])
    d = np.array([cfg.get(f"d{k}{x}") for x in "xyz"])
    n = np.linalg.norm(d)
    if n == 0:
        raise ConfigError(f"direction d{k} is zero")
    return line_from_point_direction(p, d / n, "auto")[0]


def run_connect(cfg, out):
    g1, g2 = _line_from_keys(cfg, 1), _line_from_keys(cfg, 2)
    conn = connect_lines(g1, g2, cfg.get("turns"))
    print(f"kind: {conn.kind}")
    print(f"params: {_fmt_params(conn.params)}")
    print(f"s1: {conn.s1:.17g}")
    print(f"l: {conn.l:.17g}")
    print(f"d: {conn.d:.17g}")
    if conn.kind == "helicoid":
        energy, _ = connection_energy(conn)
        print(f"-l^2/d: {-conn.l ** 2 / conn.d:.17g}")
        print(f"C1*s1: {energy:.17g}")
    else:
        print("-l^2/d: 0")
    return 0


CONGRUENCE_SCHEMA = ["nu1", "nu2", "xi1", "xi2", "eta1", "eta2", "lambda", "re_sigma",
                     "im_sigma", "det_G", "signature"]


def _congruence_row(c, nu, r_eval):
    line = c.line_at(nu).in_chart(STANDARD)
    det = float(np.linalg.det(cg.pullback_G(c, nu)))
    try:
        s = cg.spin_coefficients(c, nu, r_eval)
        lam, sig = s.twist, s.sigma
    except Caustic:
        lam, sig = np.nan, complex(np.nan, np.nan)
    try:
        kind = cg.classify_signature(c, nu, r_eval=r_eval)
    except LinekitError:
        kind = "Ambiguous"
    return [nu[0], nu[1], *line.coords, lam, sig.real, sig.imag, det, kind]


def run_congruence(cfg, out):
    c = build_spec(cfg).congruence()
    r_eval = cfg.get("r_eval")
    rows = _pmap(lambda nu: _congruence_row(c, nu, r_eval), c.grid(cfg.get("grid")))
    emit_csv(rows, CONGRUENCE_SCHEMA, f"{out}_congruence.csv")
    counts = {}
    for row in rows:
        counts[row[-1]] = counts.get(row[-1], 0) + 1
    print(f"congruence: {c.name}, {len(rows)} points -> {out}_congruence.csv")
    print("signatures: " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items())))
    return 0


def run_maslov(cfg, out):
    c = build_spec(cfg).congruence()
    (a1, b1), (a2, b2) = c.domain
    n1 = cfg.get("grid")
    n2 = cfg.get("grid2") or max(5, n1 // 4)
    pts = find_complex_points(c, (np.linspace(a1, b1, n1), np.linspace(a2, b2, n2)))
    print(f"complex points: {len(pts)}")
    for p in pts:
        print(f"  nu=({p.nu[0]:.12f}, {p.nu[1]:.12f}) multiplicity={p.multiplicity}")
    keys = ("center1", "center2", "radius_curve")
    if all(cfg.get(k) is not None for k in keys):
        curve = circle((cfg.get("center1"), cfg.get("center2")), cfg.get("radius_curve"))
        res = maslov_index(c, curve, cfg.get("samples"), points=pts)
        print(f"index: {res.index:.12f} (enclosed multiplicity {res.complex_points_enclosed})")
    elif any(cfg.get(k) is not None for k in keys):
        raise ConfigError("center1, center2 and radius_curve must be given together")
    return 0


def run_verify(cfg, out):
    results = run_all(cfg.get("seed"))
    text = report(results)
    with open(f"{out}_verify.txt", "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return 0 if all(r.passed for r in results) else 3


COMMANDS = {"map": run_map, "geodesic": run_geodesic, "connect": run_connect,
            "congruence": run_congruence, "maslov": run_maslov, "verify": run_verify}


def run(config):
    """Execute a parsed config; returns the process exit code."""
    _threads()
    return COMMANDS[config.command](config, config.output)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1 or argv[0] in ("-h", "--help"):
        print("usage: linekit <config-path>", file=sys.stderr)
        return 1 if len(argv) != 1 else 0
    try:
        with open(argv[0], encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"linekit: error: cannot read config: {exc.strerror}: {argv[0]}", file=sys.stderr)
        return 1
    try:
        return run(parse_config(text))
    except LinekitError as exc:
        print(f"linekit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"linekit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
