"""Deterministic CSV and OBJ writers."""

import numpy as np


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def emit_csv(rows, schema, path):
    """Write ``rows`` (sequences ordered as ``schema``) with a header line.

    Floats use 17 significant digits so that they round-trip exactly.
    """
    schema = list(schema)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(",".join(schema) + "\n")
        for row in rows:
            if len(row) != len(schema):
                raise ValueError(f"row has {len(row)} fields, schema has {len(schema)}")
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def emit_obj(mesh, path):
    """Wavefront OBJ: ``v`` lines in row-major grid order, then quad faces
    with 1-based indices."""
    verts = mesh.vertices.reshape(-1, 3)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        for v in verts:
            fh.write("v " + " ".join(_fmt(x) for x in v) + "\n")
        for f in mesh.faces:
            fh.write("f " + " ".join(str(int(i) + 1) for i in f) + "\n")
