"""Bit-exact binary outputs and CSV exports.

CMAP1 (correlation map), little-endian:
    magic "CMAP1\\0" (6 bytes), u32 version=1, u64 N, f64 x_min,
    f64 dx, u64 n_samples, N f64 G1, N(N+1)/2 f64 g2 upper triangle
    (row-major, diagonal included).

FLOW1 (steady flow profile), little-endian:
    magic "FLOW1\\0" (6 bytes), u32 version=1, u64 N, f64 x_min,
    f64 dx, u64 n_horizons, five N f64 columns (x, |F_p|, n, v, c_B),
    then per horizon f64 x and u32 kind (0 sub-to-super, 1 super-to-sub
    along +x).

Readers validate every header field and the exact payload size; a
truncated or altered file raises FormatError rather than returning a
partial object.  Writers are deterministic: identical inputs give
identical bytes (no timestamps; NaN cells use the canonical quiet NaN).
"""

import struct
from dataclasses import dataclass, field

import numpy as np

from .correlations import CorrelationMap, tri_expand, tri_size

CMAP1_MAGIC = b"CMAP1\x00"
FLOW1_MAGIC = b"FLOW1\x00"
_CMAP1_HEAD = struct.Struct("<6sIQddQ")
_FLOW1_HEAD = struct.Struct("<6sIQddQ")
_HORIZON_REC = struct.Struct("<dI")
HORIZON_KIND_CODES = {"sub_to_super": 0, "super_to_sub": 1}
_KIND_NAMES = {v: k for k, v in HORIZON_KIND_CODES.items()}
_MAX_POINTS = 1 << 24


class FormatError(ValueError):
    pass


def write_cmap1(path, cmap):
    n = cmap.n
    iu, ju = np.triu_indices(n)
    tri = np.ascontiguousarray(cmap.g2[iu, ju], dtype="<f8")
    g1 = np.ascontiguousarray(cmap.G1, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_CMAP1_HEAD.pack(CMAP1_MAGIC, 1, n, float(cmap.x_min),
                                  float(cmap.dx), int(cmap.n_samples)))
        fh.write(g1.tobytes())
        fh.write(tri.tobytes())


def _read_exact(fh, count, what):
    buf = fh.read(count)
    if len(buf) != count:
        raise FormatError(f"truncated file while reading {what}")
    return buf


def read_cmap1(path):
    with open(path, "rb") as fh:
        head = _read_exact(fh, _CMAP1_HEAD.size, "header")
        magic, version, n, x_min, dx, n_samples = _CMAP1_HEAD.unpack(head)
        if magic != CMAP1_MAGIC:
            raise FormatError(f"bad magic {magic!r}")
        if version != 1:
            raise FormatError(f"unsupported version {version}")
        if not 1 <= n <= _MAX_POINTS:
            raise FormatError(f"implausible point count {n}")
        if not (np.isfinite(x_min) and np.isfinite(dx) and dx > 0):
            raise FormatError("bad grid header")
        g1 = np.frombuffer(_read_exact(fh, 8 * n, "G1 column"), dtype="<f8")
        m = tri_size(n)
        tri = np.frombuffer(_read_exact(fh, 8 * m, "g2 triangle"),
                            dtype="<f8")
        if fh.read(1):
            raise FormatError("trailing bytes after payload")
    return CorrelationMap(
        x_min=x_min, dx=dx, n=int(n), g2=tri_expand(int(n), tri),
        G1=g1.copy(), n_samples=int(n_samples),
    )


@dataclass
class FlowRecord:
    """Steady-flow columns plus located horizons (x, kind)."""

    x_min: float
    dx: float
    n: int
    x: np.ndarray
    pump_abs: np.ndarray
    density: np.ndarray
    velocity: np.ndarray
    sound_speed: np.ndarray
    horizons: list = field(default_factory=list)

    @classmethod
    def from_solution(cls, sol, horizons=None):
        grid = sol.grid
        F = sol.pump.evaluate(grid) if hasattr(sol.pump, "evaluate") \
            else sol.pump
        if horizons is None:
            horizons = sol.horizons()
        return cls(
            x_min=float(grid.x[0]),
            dx=float(grid.dx),
            n=grid.n,
            x=grid.x.astype(float),
            pump_abs=np.abs(F).astype(float),
            density=sol.density.astype(float),
            velocity=sol.velocity.astype(float),
            sound_speed=sol.sound_speed.astype(float),
            horizons=[(h.x, h.kind) for h in horizons],
        )

    @property
    def columns(self):
        return (self.x, self.pump_abs, self.density, self.velocity,
                self.sound_speed)


def write_flow1(path, flow):
    cols = [np.ascontiguousarray(c, dtype="<f8") for c in flow.columns]
    for c in cols:
        if c.shape != (flow.n,):
            raise FormatError("column length does not match n")
    with open(path, "wb") as fh:
        fh.write(_FLOW1_HEAD.pack(FLOW1_MAGIC, 1, flow.n, float(flow.x_min),
                                  float(flow.dx), len(flow.horizons)))
        for c in cols:
            fh.write(c.tobytes())
        for xh, kind in flow.horizons:
            fh.write(_HORIZON_REC.pack(float(xh),
                                       HORIZON_KIND_CODES[kind]))


def read_flow1(path):
    with open(path, "rb") as fh:
        head = _read_exact(fh, _FLOW1_HEAD.size, "header")
        magic, version, n, x_min, dx, n_h = _FLOW1_HEAD.unpack(head)
        if magic != FLOW1_MAGIC:
            raise FormatError(f"bad magic {magic!r}")
        if version != 1:
            raise FormatError(f"unsupported version {version}")
        if not 1 <= n <= _MAX_POINTS:
            raise FormatError(f"implausible point count {n}")
        if not (np.isfinite(x_min) and np.isfinite(dx) and dx > 0):
            raise FormatError("bad grid header")
        if n_h > 64:
            raise FormatError(f"implausible horizon count {n_h}")
        cols = [
            np.frombuffer(_read_exact(fh, 8 * n, name), dtype="<f8").copy()
            for name in ("x", "pump", "density", "velocity", "sound_speed")
        ]
        horizons = []
        for i in range(n_h):
            xh, code = _HORIZON_REC.unpack(
                _read_exact(fh, _HORIZON_REC.size, f"horizon {i}")
            )
            if code not in _KIND_NAMES:
                raise FormatError(f"unknown horizon kind code {code}")
            horizons.append((xh, _KIND_NAMES[code]))
        if fh.read(1):
            raise FormatError("trailing bytes after payload")
    return FlowRecord(
        x_min=x_min, dx=dx, n=int(n), x=cols[0], pump_abs=cols[1],
        density=cols[2], velocity=cols[3], sound_speed=cols[4],
        horizons=horizons,
    )


def write_csv_columns(path, names, columns, header_lines=()):
    """Plain CSV with one name row; header_lines go first as comments."""
    columns = [np.asarray(c) for c in columns]
    rows = len(columns[0])
    for c in columns:
        if len(c) != rows:
            raise ValueError("ragged columns")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(names) + "\n")
        for r in range(rows):
            fh.write(",".join(_csv_cell(c[r]) for c in columns) + "\n")


def _csv_cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_cmap_csv(path, cmap):
    """Long-form dump (x, x', g2) of the full map."""
    n = cmap.n
    x = cmap.x
    iu, ju = np.triu_indices(n)
    write_csv_columns(
        path,
        ("x", "x_prime", "g2"),
        (x[iu], x[ju], cmap.g2[iu, ju]),
        header_lines=(f"n_samples={cmap.n_samples}",
                      f"normalization={cmap.normalization}"),
    )
