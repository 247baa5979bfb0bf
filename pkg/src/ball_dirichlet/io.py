"""CSV and JSON artifacts.

Every CSV has a header row and prints floats with 17 significant digits, so
values round-trip exactly and identical inputs give byte-identical files.
"""

import json
from pathlib import Path

import numpy as np

FLOAT_FMT = "%.17g"


def write_csv(path, header, rows):
    """Write a numeric table; ``rows`` is anything ``np.asarray`` turns into 2-D floats."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.asarray(rows, dtype=float)
    if data.ndim == 1:
        data = data.reshape(0 if data.size == 0 else -1, len(header))
    np.savetxt(path, data, fmt=FLOAT_FMT, delimiter=",", header=",".join(header), comments="")
    return path


def read_csv(path):
    """Header and float table of a file written by :func:`write_csv`."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return path


PROFILE_HEADER = ("r", "re_alpha", "im_alpha", "re_dalpha", "im_dalpha")


def write_profile(out_dir, profile, stem=None):
    """Profile table plus a JSON sidecar; returns the two paths."""
    stem = stem or f"profile_d{profile.mode.d}_m{profile.mode.m}"
    out_dir = Path(out_dir)
    csv_path = write_csv(out_dir / f"{stem}.csv", PROFILE_HEADER, profile.to_rows())
    json_path = write_json(out_dir / f"{stem}.json", profile.summary())
    return csv_path, json_path


def write_quadrature(path, quadrature):
    """Nodes and weights, one row per node."""
    cols = ["x", "y", "z"][: quadrature.d] + ["weight"]
    return write_csv(path, cols, np.column_stack([quadrature.nodes, quadrature.weights]))


def read_samples(path, expected=None):
    """Complex boundary samples from a CSV with columns ``re[, im]`` in quadrature-node order."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"boundary sample file not found: {path}")
    _, data = read_csv(path)
    vals = data[:, 0] + (1j * data[:, 1] if data.shape[1] > 1 else 0.0)
    if expected is not None and vals.size != expected:
        raise ValueError(f"{path} has {vals.size} samples; the quadrature has {expected} nodes")
    return vals


def complex_columns(values):
    values = np.asarray(values, dtype=complex)
    return values.real, values.imag
