"""Plain-text run configuration files.

Sectioned key-value format (UTF-8, configparser dialect): [cavity],
[grid], [pump] with one [pump.N] block per segment, optional [defect],
[mask], and [twa] for the ensemble controls.  All values are in
internal units (µm, ps, angular 1/ps).  Floats are written with repr,
so parse -> serialize -> parse is the identity.
"""

import configparser
import io

from .core import (AbsorbingMask, CavityParams, Grid, PotentialProfile,
                   PumpProfile, PumpSegment)
from .twa import TwaConfig


class ConfigError(ValueError):
    pass


_SCHEMA = {
    "cavity": ("gamma", "g", "mass_ratio", "omega0", "omega_p"),
    "grid": ("x_min", "x_max", "n"),
    "pump": ("smoothing",),
    "defect": ("center", "depth", "sigma"),
    "mask": ("fraction", "strength"),
    "twa": ("dt", "seed", "n_realizations", "burn_in", "sample_interval",
            "samples_per_realization", "batch_size", "n_blocks"),
}
_SEGMENT_KEYS = ("x_start", "x_end", "amplitude", "k_p")


def dumps_config(config):
    """Serialize a full simulation config to the text format."""
    if config.potential is not None and config.potential.custom is not None:
        raise ConfigError("custom potential arrays are not serializable")
    cp = configparser.ConfigParser()
    cp.optionxform = str

    p = config.params
    cp["cavity"] = {
        "gamma": repr(p.gamma),
        "g": repr(p.g),
        "mass_ratio": repr(p.mass_ratio),
        "omega0": repr(p.omega0),
        "omega_p": repr(p.omega_p),
    }
    g = config.grid
    cp["grid"] = {"x_min": repr(g.x_min), "x_max": repr(g.x_max),
                  "n": str(g.n)}
    cp["pump"] = {"smoothing": repr(config.pump.smoothing)}
    for i, seg in enumerate(config.pump.segments):
        cp[f"pump.{i}"] = {
            "x_start": repr(seg.x_start),
            "x_end": repr(seg.x_end),
            "amplitude": repr(seg.amplitude),
            "k_p": repr(seg.k_p),
        }
    d = config.potential
    if d is not None and d.depth != 0.0:
        cp["defect"] = {"center": repr(d.center), "depth": repr(d.depth),
                        "sigma": repr(d.sigma)}
    m = config.mask
    if m is not None and m.fraction > 0.0:
        cp["mask"] = {"fraction": repr(m.fraction),
                      "strength": repr(m.strength)}
    cp["twa"] = {
        "dt": repr(config.dt),
        "seed": str(int(config.seed)),
        "n_realizations": str(config.n_realizations),
        "burn_in": repr(config.burn_in),
        "sample_interval": repr(config.sample_interval),
        "samples_per_realization": str(config.samples_per_realization),
        "batch_size": str(config.batch_size),
        "n_blocks": str(config.n_blocks),
    }
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def save_config(config, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_config(config))


def _require(cp, section, keys):
    if section not in cp:
        raise ConfigError(f"missing section [{section}]")
    got = set(cp[section])
    want = set(keys)
    if got != want:
        extra = got - want
        missing = want - got
        parts = []
        if missing:
            parts.append(f"missing keys {sorted(missing)}")
        if extra:
            parts.append(f"unknown keys {sorted(extra)}")
        raise ConfigError(f"section [{section}]: " + "; ".join(parts))


def _f(cp, section, key):
    try:
        return float(cp[section][key])
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from None


def _i(cp, section, key):
    try:
        return int(cp[section][key])
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from None


def loads_config(text):
    """Parse the text format back into a full simulation config."""
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None

    seg_sections = sorted(
        (s for s in cp.sections() if s.startswith("pump.")),
        key=lambda s: int(s.split(".", 1)[1]),
    )
    known = set(_SCHEMA) | set(seg_sections)
    unknown = [s for s in cp.sections() if s not in known]
    if unknown:
        raise ConfigError(f"unknown sections {unknown}")

    for section, keys in _SCHEMA.items():
        if section in ("defect", "mask") and section not in cp:
            continue
        _require(cp, section, keys)
    for s in seg_sections:
        _require(cp, s, _SEGMENT_KEYS)
    if not seg_sections:
        raise ConfigError("need at least one [pump.N] segment")

    params = CavityParams(
        gamma=_f(cp, "cavity", "gamma"),
        g=_f(cp, "cavity", "g"),
        mass_ratio=_f(cp, "cavity", "mass_ratio"),
        omega0=_f(cp, "cavity", "omega0"),
        omega_p=_f(cp, "cavity", "omega_p"),
    )
    grid = Grid(_f(cp, "grid", "x_min"), _f(cp, "grid", "x_max"),
                _i(cp, "grid", "n"))
    segments = [
        PumpSegment(_f(cp, s, "x_start"), _f(cp, s, "x_end"),
                    _f(cp, s, "amplitude"), _f(cp, s, "k_p"))
        for s in seg_sections
    ]
    pump = PumpProfile(segments, smoothing=_f(cp, "pump", "smoothing"))
    if "defect" in cp:
        potential = PotentialProfile(
            center=_f(cp, "defect", "center"),
            depth=_f(cp, "defect", "depth"),
            sigma=_f(cp, "defect", "sigma"),
        )
    else:
        potential = PotentialProfile.none()
    if "mask" in cp:
        mask = AbsorbingMask(fraction=_f(cp, "mask", "fraction"),
                             strength=_f(cp, "mask", "strength"))
    else:
        mask = AbsorbingMask.none()

    return TwaConfig(
        grid=grid,
        params=params,
        pump=pump,
        potential=potential,
        mask=mask,
        dt=_f(cp, "twa", "dt"),
        seed=_i(cp, "twa", "seed"),
        n_realizations=_i(cp, "twa", "n_realizations"),
        burn_in=_f(cp, "twa", "burn_in"),
        sample_interval=_f(cp, "twa", "sample_interval"),
        samples_per_realization=_i(cp, "twa", "samples_per_realization"),
        batch_size=_i(cp, "twa", "batch_size"),
        n_blocks=_i(cp, "twa", "n_blocks"),
    )


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return loads_config(fh.read())
