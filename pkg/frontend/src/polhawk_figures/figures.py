"""Figure renderers over parsed output files.

Every renderer is a pure display of stored arrays: no physics is
recomputed here, and anything derived (horizon positions, knee drives,
band edges) is read from the file that recorded it.  Rendering is
deterministic for fixed inputs up to image-library metadata.
"""

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .readers import (
    FormatError,
    load_correlation_map,
    load_csv_columns,
    load_flow_record,
)

DEFAULT_VMAX = 1.25e-4

KINDS = ("bistability_loop", "dispersion", "flow_profile",
         "correlation_map", "repulsive_comparison")

_INPUT_COUNT = {
    "bistability_loop": 1,
    "dispersion": 1,
    "flow_profile": 1,
    "correlation_map": 1,
    "repulsive_comparison": 2,
}


@dataclass
class FigureSpec:
    """One rendering job: what to draw, from which files, to where."""

    kind: str
    inputs: tuple
    output: str
    vmax: float = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; "
                             f"expected one of {', '.join(KINDS)}")
        self.inputs = tuple(str(p) for p in self.inputs)
        want = _INPUT_COUNT[self.kind]
        if len(self.inputs) != want:
            raise ValueError(f"{self.kind} takes {want} input file(s), "
                             f"got {len(self.inputs)}")
        if self.vmax is not None and not (np.isfinite(self.vmax)
                                          and self.vmax > 0):
            raise ValueError("vmax must be a positive finite number")


def _new_axes(width=6.0, height=4.2):
    fig, ax = plt.subplots(figsize=(width, height), dpi=150)
    return fig, ax


def _save(fig, output):
    fig.tight_layout()
    fig.savefig(output)
    plt.close(fig)
    return output


def _deviation_image(ax, cmap_file, vmax):
    dev = cmap_file.pair - 1.0
    x = cmap_file.x
    extent = (x[0], x[-1], x[0], x[-1])
    palette = matplotlib.colormaps["RdBu_r"].copy()
    palette.set_bad("0.82")
    im = ax.imshow(dev.T, origin="lower", extent=extent, cmap=palette,
                   vmin=-vmax, vmax=vmax, aspect="equal",
                   interpolation="nearest")
    ax.set_xlabel("x (um)")
    ax.set_ylabel("x' (um)")
    return im


def correlation_map(input_path, output, vmax=None):
    """Two-point map of g2 - 1 on a symmetric diverging scale; masked
    (NaN) cells are light grey."""
    cm = load_correlation_map(input_path)
    vmax = DEFAULT_VMAX if vmax is None else vmax
    fig, ax = _new_axes(6.4, 5.4)
    im = _deviation_image(ax, cm, vmax)
    fig.colorbar(im, ax=ax, label="g2(x, x') - 1")
    ax.set_title(f"{cm.n_samples} samples")
    return _save(fig, output)


def repulsive_comparison(input_a, input_b, output, vmax=None):
    """Two correlation maps side by side on one shared color scale."""
    a = load_correlation_map(input_a)
    b = load_correlation_map(input_b)
    vmax = DEFAULT_VMAX if vmax is None else vmax
    fig, axes = plt.subplots(1, 2, figsize=(11.5, 5.0), dpi=150)
    for ax, cm, path in zip(axes, (a, b), (input_a, input_b)):
        im = _deviation_image(ax, cm, vmax)
        ax.set_title(f"{path}  ({cm.n_samples} samples)", fontsize=9)
    fig.colorbar(im, ax=list(axes), label="g2(x, x') - 1",
                 fraction=0.03)
    fig.savefig(output)
    plt.close(fig)
    return output


def flow_profile(input_path, output):
    """Pump envelope, flow velocity, and excitation speed along the
    wire, with stored horizon positions marked."""
    rec = load_flow_record(input_path)
    fig, ax = _new_axes(7.0, 4.2)
    ax.plot(rec.x, rec.velocity, color="crimson", label="v")
    ax.plot(rec.x, rec.sound_speed, color="royalblue", label="c_B")
    ax.set_xlabel("x (um)")
    ax.set_ylabel("velocity (um/ps)")

    ax2 = ax.twinx()
    ax2.plot(rec.x, rec.pump_abs, color="black", lw=1.0, label="|F_p|")
    ax2.set_ylabel("|F_p|")

    for xh, kind in rec.horizons:
        ax.axvline(xh, color="0.35", ls="--", lw=1.0)
        ax.annotate(kind.replace("_", " "), (xh, ax.get_ylim()[1]),
                    xytext=(3, -12), textcoords="offset points",
                    fontsize=7, rotation=90, va="top")
    handles, labels = ax.get_legend_handles_labels()
    h2, l2 = ax2.get_legend_handles_labels()
    ax.legend(handles + h2, labels + l2, loc="upper right", fontsize=8)
    return _save(fig, output)


def _header_values(header, prefixes):
    """key=value markers from header comments; tokens that carry
    surrounding prose (e.g. inside parentheses) are skipped."""
    values = []
    for line in header:
        for token in line.split():
            if token.startswith(tuple(prefixes)):
                try:
                    values.append(float(token.split("=", 1)[1]))
                except ValueError:
                    continue
    return values


def _numeric(cols, name, table):
    col = cols.get(name)
    if not isinstance(col, np.ndarray):
        raise FormatError(f"not a {table} table; column {name!r} is "
                          "missing or not numeric")
    return col


def bistability_loop(input_path, output):
    """Steady density against drive amplitude, one loop per pump
    wavevector; unstable middle branches dotted, knee drives marked."""
    header, cols = load_csv_columns(input_path)
    needed = {"k_p", "F_abs", "n", "stable", "branch"}
    if not needed.issubset(cols):
        raise FormatError(
            f"not a bistability table; missing "
            f"{sorted(needed - set(cols))}")
    k_col = _numeric(cols, "k_p", "bistability")
    F_col = _numeric(cols, "F_abs", "bistability")
    n_col = _numeric(cols, "n", "bistability")
    stable_col = _numeric(cols, "stable", "bistability")

    fig, ax = _new_axes()
    for k_p in np.unique(k_col):
        sel = k_col == k_p
        stable = stable_col[sel] > 0.5
        F, n = F_col[sel], n_col[sel]
        order = np.lexsort((n, F))
        base, = ax.plot(F[order][stable[order]], n[order][stable[order]],
                        ".", ms=2.5, label=f"k_p = {k_p:g} (stable)")
        ax.plot(F[order][~stable[order]], n[order][~stable[order]], ".",
                ms=1.5, alpha=0.45, color=base.get_color())
    for value in _header_values(header, ("F1=", "F2=")):
        ax.axvline(value, color="0.6", ls=":", lw=0.8)
    ax.set_xlabel("|F_p|")
    ax.set_ylabel("density (1/um)")
    ax.legend(fontsize=8)
    return _save(fig, output)


def dispersion(input_path, output):
    """Excitation branches per region and model, with any band-edge
    frequencies recorded in the header drawn as dotted levels."""
    header, cols = load_csv_columns(input_path)
    needed = {"region", "model", "k", "re_omega_plus", "re_omega_minus"}
    if not needed.issubset(cols):
        raise FormatError(
            f"not a dispersion table; missing "
            f"{sorted(needed - set(cols))}")

    fig, ax = _new_axes(6.8, 4.6)
    models = np.asarray(cols["model"], dtype=object)
    regions = _numeric(cols, "region", "dispersion")
    k_col = _numeric(cols, "k", "dispersion")
    w_plus = _numeric(cols, "re_omega_plus", "dispersion")
    w_minus = _numeric(cols, "re_omega_minus", "dispersion")
    style = {"pumped": "-", "ballistic": "--"}
    for region in np.unique(regions):
        for model in ("pumped", "ballistic"):
            sel = (regions == region) & (models == model)
            if not sel.any():
                continue
            k = k_col[sel]
            order = np.argsort(k)
            base, = ax.plot(k[order], w_plus[sel][order],
                            style[model], lw=1.2,
                            label=f"region {int(region)} {model}")
            ax.plot(k[order], w_minus[sel][order],
                    style[model], lw=1.2, color=base.get_color(),
                    alpha=0.65)
    for value in _header_values(header, ("omega_min=", "omega_max=")):
        ax.axhline(value, color="0.6", ls=":", lw=0.8)
    ax.axhline(0.0, color="0.3", lw=0.6)
    ax.set_xlabel("k (1/um)")
    ax.set_ylabel("Re omega (1/ps)")
    ax.legend(fontsize=7)
    return _save(fig, output)


def render(spec):
    """Dispatch one FigureSpec to its renderer; returns the output
    path."""
    if spec.kind == "correlation_map":
        return correlation_map(spec.inputs[0], spec.output,
                               vmax=spec.vmax)
    if spec.kind == "repulsive_comparison":
        return repulsive_comparison(spec.inputs[0], spec.inputs[1],
                                    spec.output, vmax=spec.vmax)
    if spec.kind == "flow_profile":
        return flow_profile(spec.inputs[0], spec.output)
    if spec.kind == "bistability_loop":
        return bistability_loop(spec.inputs[0], spec.output)
    return dispersion(spec.inputs[0], spec.output)
