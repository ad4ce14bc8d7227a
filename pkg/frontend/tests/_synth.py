"""Builders for small well-formed (or deliberately damaged) input
files, written with struct/numpy only so the tests exercise the
readers against the byte layout itself."""

import struct

import numpy as np

HEAD = struct.Struct("<6sIQddQ")
HORIZON = struct.Struct("<dI")

CMAP_MAGIC = b"CMAP1\x00"
FLOW_MAGIC = b"FLOW1\x00"


def cmap_bytes(n=8, x_min=-4.0, dx=1.0, n_samples=120, one_body=None,
               pair_tri=None, version=1, magic=CMAP_MAGIC):
    m = n * (n + 1) // 2
    if one_body is None:
        one_body = np.full(n, 5.0)
    if pair_tri is None:
        pair_tri = np.ones(m)
    blob = HEAD.pack(magic, version, n, x_min, dx, n_samples)
    blob += np.ascontiguousarray(one_body, dtype="<f8").tobytes()
    blob += np.ascontiguousarray(pair_tri, dtype="<f8").tobytes()
    return blob


def flow_bytes(n=16, x_min=-8.0, dx=1.0, horizons=((0.5, 0),),
               columns=None, version=1, magic=FLOW_MAGIC):
    if columns is None:
        x = x_min + dx * np.arange(n)
        columns = (x,
                   1.0 + np.abs(np.sin(x)),
                   np.full(n, 250.0),
                   np.linspace(-1.0, 1.0, n),
                   np.full(n, 0.8))
    blob = HEAD.pack(magic, version, n, x_min, dx, len(horizons))
    for col in columns:
        blob += np.ascontiguousarray(col, dtype="<f8").tobytes()
    for xh, kind in horizons:
        blob += HORIZON.pack(xh, kind)
    return blob


def write(path, blob):
    path.write_bytes(blob)
    return str(path)


def tri_with(n, i, j, value):
    """Upper-triangle vector of ones with cell (i, j) replaced."""
    m = n * (n + 1) // 2
    tri = np.ones(m)
    iu, ju = np.triu_indices(n)
    idx = np.flatnonzero((iu == min(i, j)) & (ju == max(i, j)))[0]
    tri[idx] = value
    return tri
