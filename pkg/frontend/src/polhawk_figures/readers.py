"""Strict readers for the simulator's output files.

The binary layouts are fixed little-endian structures:

CMAP1:  magic "CMAP1\\0" (6 bytes), u32 version=1, u64 N, f64 x_min,
        f64 dx, u64 n_samples, N f64 one-body values, N(N+1)/2 f64
        normalized pair values (upper triangle, row-major, diagonal
        included).
FLOW1:  magic "FLOW1\\0" (6 bytes), u32 version=1, u64 N, f64 x_min,
        f64 dx, u64 n_horizons, five N f64 columns (x, |F_p|, n, v,
        c_B), then per horizon f64 x and u32 kind (0 sub-to-super,
        1 super-to-sub).

Every header field is validated and the payload size must match
exactly; anything else raises FormatError.  Data validation is
separate: NaN cells in a pair map are the mask and pass through, but
any other non-finite value raises RangeError so a half-written or
corrupted array can never be plotted as if it were data.
"""

from dataclasses import dataclass
import struct

import numpy as np

CMAP1_MAGIC = b"CMAP1\x00"
FLOW1_MAGIC = b"FLOW1\x00"
_HEAD = struct.Struct("<6sIQddQ")
_HORIZON = struct.Struct("<dI")
_KINDS = {0: "sub_to_super", 1: "super_to_sub"}
_MAX_POINTS = 1 << 24


class FormatError(ValueError):
    """The bytes do not parse as the declared format."""


class RangeError(ValueError):
    """The file parsed but carries non-finite unmasked data."""


@dataclass
class CorrelationMapFile:
    x_min: float
    dx: float
    n: int
    n_samples: int
    one_body: np.ndarray   # (n,)
    pair: np.ndarray       # (n, n) symmetric, NaN = masked cell

    @property
    def x(self):
        return self.x_min + self.dx * np.arange(self.n)


@dataclass
class FlowFile:
    x_min: float
    dx: float
    n: int
    x: np.ndarray
    pump_abs: np.ndarray
    density: np.ndarray
    velocity: np.ndarray
    sound_speed: np.ndarray
    horizons: tuple = ()  # ((x, kind), ...)


def _read_exact(fh, count, what):
    buf = fh.read(count)
    if len(buf) != count:
        raise FormatError(f"truncated file while reading {what}")
    return buf


def _header(fh, magic):
    got, version, n, x_min, dx, tail = _HEAD.unpack(
        _read_exact(fh, _HEAD.size, "header"))
    if got != magic:
        raise FormatError(f"bad magic {got!r}")
    if version != 1:
        raise FormatError(f"unsupported version {version}")
    if not 1 <= n <= _MAX_POINTS:
        raise FormatError(f"implausible point count {n}")
    if not (np.isfinite(x_min) and np.isfinite(dx) and dx > 0):
        raise FormatError("bad grid header")
    return int(n), float(x_min), float(dx), int(tail)


def load_correlation_map(path):
    """Parse a CMAP1 file into a CorrelationMapFile."""
    with open(path, "rb") as fh:
        n, x_min, dx, n_samples = _header(fh, CMAP1_MAGIC)
        m = n * (n + 1) // 2
        one = np.frombuffer(_read_exact(fh, 8 * n, "one-body column"),
                            dtype="<f8").copy()
        tri = np.frombuffer(_read_exact(fh, 8 * m, "pair triangle"),
                            dtype="<f8").copy()
        if fh.read(1):
            raise FormatError("trailing bytes after payload")

    if not np.isfinite(one).all():
        raise RangeError("non-finite one-body values")
    if np.isinf(tri).any():
        raise RangeError("infinite pair values (only NaN cells may be "
                         "masked)")
    pair = np.empty((n, n))
    iu, ju = np.triu_indices(n)
    pair[iu, ju] = tri
    pair[ju, iu] = tri
    return CorrelationMapFile(x_min=x_min, dx=dx, n=n,
                              n_samples=n_samples, one_body=one,
                              pair=pair)


def load_flow_record(path):
    """Parse a FLOW1 file into a FlowFile."""
    with open(path, "rb") as fh:
        n, x_min, dx, n_h = _header(fh, FLOW1_MAGIC)
        if n_h > 64:
            raise FormatError(f"implausible horizon count {n_h}")
        cols = [
            np.frombuffer(_read_exact(fh, 8 * n, name), dtype="<f8").copy()
            for name in ("x", "pump", "density", "velocity", "sound_speed")
        ]
        horizons = []
        for i in range(n_h):
            xh, code = _HORIZON.unpack(
                _read_exact(fh, _HORIZON.size, f"horizon {i}"))
            if code not in _KINDS:
                raise FormatError(f"unknown horizon kind code {code}")
            horizons.append((float(xh), _KINDS[code]))
        if fh.read(1):
            raise FormatError("trailing bytes after payload")

    for name, c in zip(("x", "pump", "density", "velocity",
                        "sound speed"), cols):
        if not np.isfinite(c).all():
            raise RangeError(f"non-finite {name} column")
    if any(not np.isfinite(xh) for xh, _ in horizons):
        raise RangeError("non-finite horizon position")
    return FlowFile(x_min=x_min, dx=dx, n=n, x=cols[0], pump_abs=cols[1],
                    density=cols[2], velocity=cols[3],
                    sound_speed=cols[4], horizons=tuple(horizons))


def load_csv_columns(path):
    """Parse a column CSV written by the simulator CLI.

    Returns (header_lines, columns) where header_lines is the list of
    leading '# ' comments and columns an ordered {name: array} dict.
    Columns whose every cell parses as a float come back as float
    arrays (finite values enforced); anything else stays a list of
    strings.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    header = []
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        header.append(lines[i][1:].strip())
        i += 1
    if i >= len(lines) or not lines[i].strip():
        raise FormatError("missing column-name row")
    names = lines[i].split(",")
    rows = []
    for line in lines[i + 1:]:
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != len(names):
            raise FormatError(
                f"row with {len(cells)} cells under {len(names)} columns")
        rows.append(cells)

    columns = {}
    for j, name in enumerate(names):
        raw = [r[j] for r in rows]
        try:
            vals = np.array([float(c) for c in raw])
        except ValueError:
            columns[name] = raw
            continue
        if not np.isfinite(vals).all():
            raise RangeError(f"non-finite values in column {name!r}")
        columns[name] = vals
    return header, columns
