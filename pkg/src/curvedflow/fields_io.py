"""Bit-specified output formats shared with the figures frontend.

FieldFile: 5 ASCII header lines then raw float64 payload.

    MFE1
    <field name>
    <nx> <ny>
    t=<time>
    chart=<kind> alpha=<alpha>

Payload: nx * ny little-endian IEEE doubles, row-major with y as the outer
index (C order of a (ny, nx) array).  Coordinate windows are implied by the
chart kind: sphere fields span lambda in [0, 2pi) x mu in (-1, 1) (cell
centers), torus fields [0, 2pi)^2, disk fields [-1, 1]^2.

SeriesFile: plain CSV, one header row of column names, decimal reals with 17
significant digits, rectangular.

Manifest: manifest.json listing the experiment, the exact resolved config,
and every file written.  Identical configs must produce byte-identical
outputs, so all serialization here is deterministic.
"""

import json
import os

import numpy as np

MAGIC = "MFE1"


class FieldFileError(ValueError):
    """Malformed field file."""


def format_real(x):
    """17-significant-digit decimal (round-trips every float64)."""
    return f"{float(x):.17g}"


def write_field(path, name, values, t, chart_kind, alpha=0.0):
    """Write a (ny, nx) array as a FieldFile."""
    values = np.asarray(values, dtype="<f8")
    if values.ndim != 2:
        raise ValueError("field payload must be 2-D (ny, nx)")
    ny, nx = values.shape
    header = (
        f"{MAGIC}\n{name}\n{nx} {ny}\n"
        f"t={format_real(t)}\n"
        f"chart={chart_kind} alpha={format_real(alpha)}\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(values).tobytes())
    return path


def read_field(path):
    """Parse a FieldFile into (meta dict, (ny, nx) array)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    lines = []
    pos = 0
    for _ in range(5):
        nl = raw.index(b"\n", pos)
        lines.append(raw[pos:nl].decode("ascii"))
        pos = nl + 1
    if lines[0] != MAGIC:
        raise FieldFileError(f"bad magic {lines[0]!r}, expected {MAGIC!r}")
    name = lines[1]
    nx, ny = (int(tok) for tok in lines[2].split())
    if not lines[3].startswith("t="):
        raise FieldFileError("header line 4 must start with 't='")
    t = float(lines[3][2:])
    tokens = dict(tok.split("=", 1) for tok in lines[4].split())
    payload = raw[pos:]
    if len(payload) != 8 * nx * ny:
        raise FieldFileError(
            f"payload length {len(payload)} != 8*{nx}*{ny}"
        )
    values = np.frombuffer(payload, dtype="<f8").reshape(ny, nx).copy()
    meta = {
        "name": name,
        "nx": nx,
        "ny": ny,
        "t": t,
        "chart": tokens.get("chart", ""),
        "alpha": float(tokens.get("alpha", "0")),
    }
    return meta, values


def write_series(path, columns):
    """Write a SeriesFile from an ordered mapping of column name -> values."""
    names = list(columns)
    arrays = [np.asarray(columns[n], dtype=float) for n in names]
    length = len(arrays[0])
    if any(len(a) != length for a in arrays):
        raise ValueError("series columns must share one length")
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(length):
            fh.write(",".join(format_real(a[i]) for a in arrays) + "\n")
    return path


def read_series(path):
    """Parse a SeriesFile into a dict of numpy arrays."""
    with open(path, "r") as fh:
        header = fh.readline().strip()
        names = header.split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if any(len(r) != len(names) for r in rows):
        raise ValueError("ragged series file")
    data = np.array(rows, dtype=float) if rows else np.zeros((0, len(names)))
    return {n: data[:, i] for i, n in enumerate(names)}


def write_manifest(outdir, experiment, config, files):
    """Deterministic manifest.json for the figures frontend and tests."""
    entries = []
    for f in files:
        rel = os.path.relpath(f["path"], outdir)
        entries.append({"path": rel, "kind": f["kind"], "name": f["name"]})
    doc = {
        "experiment": experiment,
        "config": {k: config[k] for k in sorted(config)},
        "files": entries,
    }
    path = os.path.join(outdir, "manifest.json")
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_manifest(path):
    with open(path) as fh:
        return json.load(fh)
