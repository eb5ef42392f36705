import csv

import numpy as np
import pytest

from linekit.cli import CONGRUENCE_SCHEMA, main, parse_config
from linekit.errors import ConfigError
from linekit.export import emit_csv, emit_obj
from linekit.geodesics import GeodesicParams, ruled_surface


def run_cli(tmp_path, text, name="run.cfg"):
    cfg = tmp_path / name
    cfg.write_text(text)
    return main([str(cfg)])


def read_obj(path):
    verts, faces = [], []
    for line in path.read_text().splitlines():
        tag, *rest = line.split()
        if tag == "v":
            verts.append([float(x) for x in rest])
        elif tag == "f":
            faces.append([int(x) for x in rest])
    return np.array(verts), faces


def test_parse_geodesic_defaults():
    cfg = parse_config("command = geodesic\nC1 = 1\nC2 = 0.5  # comment\n")
    assert cfg.command == "geodesic"
    assert cfg.get("C1") == 1.0 and cfg.get("C5") == 0.0
    assert cfg.get("n_s") == 64 and cfg.output == "linekit"


def test_parse_full_congruence_config():
    text = """# ellipsoid normals
command = congruence
family = ellipsoid
a = 1.0
b = 1.1
c = 1.3
grid = 64
r_eval = 0.5
output = out/ell
seed = 7
"""
    cfg = parse_config(text)
    assert cfg.get("grid") == 64 and cfg.get("a") == 1.0 and cfg.output == "out/ell"


@pytest.mark.parametrize("text, line, words", [
    ("command = bogus\n", 1, "unknown command"),
    ("command = geodesic\nC1 = 1\nC2 = 1\nwidth = 3\n", 4, "unknown key"),
    ("command = geodesic\nC1 = 1\nC2 = fast\n", 3, "expects real"),
    ("command = geodesic\n\nn_s = 2.5\nC1 = 1\nC2 = 1\n", 3, "expects int"),
    ("command = geodesic\nC1 = 1\nC1 = 2\n", 3, "duplicate"),
    ("command = geodesic\nC1 1\n", 2, "key = value"),
    ("command = maslov\nfamily = ellipsoid\nsamples = 32\n", 3, "at least 64"),
    ("command = connect\nturns = -1\n", 2, "at least 0"),
])
def test_config_errors_carry_line_numbers(text, line, words):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert str(info.value).startswith(f"line {line}: ")
    assert words in str(info.value)


def test_missing_key():
    with pytest.raises(ConfigError, match="missing key 'C2'"):
        parse_config("command = geodesic\nC1 = 1\n")
    with pytest.raises(ConfigError, match="missing key 'command'"):
        parse_config("C1 = 1\n")


def test_exit_code_config_error(tmp_path, capsys):
    assert run_cli(tmp_path, "command = geodesic\nC1 = x\nC2 = 1\n") == 1
    assert "linekit: ConfigError: line 2:" in capsys.readouterr().err
    assert main([str(tmp_path / "absent.cfg")]) == 1


def test_exit_code_domain_error(tmp_path, capsys):
    out = tmp_path / "g"
    code = run_cli(tmp_path, f"command = geodesic\nC1 = 1\nC2 = 0.5\ns_max = 4\noutput = {out}\n")
    assert code == 2
    assert "ParameterSingularity" in capsys.readouterr().err
    code = run_cli(tmp_path, "command = connect\n" + "".join(
        f"{k} = {v}\n" for k, v in zip(
            ["p1x", "p1y", "p1z", "d1x", "d1y", "d1z", "p2x", "p2y", "p2z", "d2x", "d2y", "d2z"],
            [0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1])))
    assert code == 2
    assert "NoHelicoid" in capsys.readouterr().err


def test_exit_code_numerical_error(tmp_path, capsys):
    rows = [[u, v, 0.1 * u, 0.1 * v, np.nan if u == v == 0 else 0.0, 0.0]
            for u in np.linspace(-1, 1, 5) for v in np.linspace(-1, 1, 5)]
    emit_csv(rows, ["nu1", "nu2", "xi1", "xi2", "eta1", "eta2"], tmp_path / "nan.csv")
    code = run_cli(tmp_path, f"command = congruence\nfamily = csv\npath = {tmp_path / 'nan.csv'}\n"
                             f"output = {tmp_path / 'c'}\n")
    assert code == 3
    assert "NonFiniteSample" in capsys.readouterr().err


def test_geodesic_null_mesh_is_planar(tmp_path):
    out = tmp_path / "null"
    assert run_cli(tmp_path, f"command = geodesic\nC1 = 0\nC2 = 0.7\nC5 = 1.3\n"
                             f"n_s = 12\nn_r = 4\noutput = {out}\n") == 0
    verts, faces = read_obj(tmp_path / "null_mesh.obj")
    assert verts.shape == (48, 3) and len(faces) == 11 * 3
    assert min(min(f) for f in faces) == 1 and max(max(f) for f in faces) == 48
    centred = verts - verts.mean(axis=0)
    assert np.linalg.svd(centred, compute_uv=False)[-1] < 1e-9
    with open(tmp_path / "null_trajectory.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 12


def test_rotation_field_congruence(tmp_path, capsys):
    out = tmp_path / "rot"
    assert run_cli(tmp_path, f"command = congruence\nfamily = rotation\nb = 1\ngrid = 6\n"
                             f"r_eval = 0.5\noutput = {out}\n") == 0
    with open(tmp_path / "rot_congruence.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == CONGRUENCE_SCHEMA
    assert len(rows) == 36
    assert {r["signature"] for r in rows} == {"Riemannian"}
    assert "Riemannian 36" in capsys.readouterr().out


def test_connect_output(tmp_path, capsys):
    keys = ["p1x", "p1y", "p1z", "d1x", "d1y", "d1z", "p2x", "p2y", "p2z", "d2x", "d2y", "d2z"]
    vals = [0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 0]
    assert run_cli(tmp_path, "command = connect\n" + "".join(
        f"{k} = {v}\n" for k, v in zip(keys, vals))) == 0
    out = dict(line.split(": ", 1) for line in capsys.readouterr().out.splitlines())
    assert out["kind"] == "helicoid"
    assert float(out["-l^2/d"]) == pytest.approx(-2 / np.pi)
    assert float(out["C1*s1"]) == pytest.approx(-2 / np.pi, abs=1e-6)


def test_maslov_command(tmp_path, capsys):
    text = ("command = maslov\nfamily = graph\ncoeffs = 0:2:1,2:0:1\ngrid = 11\n"
            "nu1_min = -0.5\nnu1_max = 0.5\nnu2_min = -0.5\nnu2_max = 0.5\ngrid2 = 11\n"
            "center1 = 0\ncenter2 = 0\nradius_curve = 0.3\nsamples = 64\n")
    assert run_cli(tmp_path, text) == 0
    out = capsys.readouterr().out
    assert "complex points: 1" in out and "multiplicity=2" in out
    assert "index: 2.000000000000" in out


def test_emit_csv(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv([], ["a", "b"], path)
    assert path.read_bytes() == b"a,b\n"
    emit_csv([[0.1, True, "x", 3]], ["f", "flag", "s", "n"], path)
    assert path.read_bytes() == b"f,flag,s,n\n0.10000000000000001,true,x,3\n"
    with pytest.raises(ValueError):
        emit_csv([[1, 2, 3]], ["a", "b"], path)


def test_emit_obj(tmp_path):
    mesh = ruled_surface(GeodesicParams(1.0, 0.5), (0.0, 1.0), (0.0, 1.0), 2, 2)
    path = tmp_path / "m.obj"
    emit_obj(mesh, path)
    verts, faces = read_obj(path)
    assert len(verts) == 4 and faces == [[1, 2, 4, 3]]
    assert np.allclose(verts, mesh.vertices.reshape(-1, 3))


def test_congruence_output_is_deterministic(tmp_path, monkeypatch):
    text = "command = congruence\nfamily = ellipsoid\ngrid = 5\nr_eval = 0.5\noutput = {}\n"
    assert run_cli(tmp_path, text.format(tmp_path / "a"), "a.cfg") == 0
    assert run_cli(tmp_path, text.format(tmp_path / "b"), "b.cfg") == 0
    monkeypatch.setenv("LINEKIT_THREADS", "4")
    assert run_cli(tmp_path, text.format(tmp_path / "c"), "c.cfg") == 0
    ref = (tmp_path / "a_congruence.csv").read_bytes()
    assert (tmp_path / "b_congruence.csv").read_bytes() == ref
    assert (tmp_path / "c_congruence.csv").read_bytes() == ref


@pytest.mark.parametrize("value", ["0", "many"])
def test_bad_thread_count(tmp_path, monkeypatch, value):
    monkeypatch.setenv("LINEKIT_THREADS", value)
    assert run_cli(tmp_path, "command = map\nn = 1\n"
                             f"output = {tmp_path / 'm'}\n") == 1


def test_map_roundtrip(tmp_path):
    assert run_cli(tmp_path, f"command = map\nn = 20\noutput = {tmp_path / 'm'}\n") == 0
    with open(tmp_path / "m_map.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 20
    assert max(float(r["roundtrip_error"]) for r in rows) < 1e-12
