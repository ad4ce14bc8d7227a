"""Renderer behavior on synthetic inputs: every figure kind produces a
PNG, masked cells survive to the image stage, and FigureSpec rejects
malformed jobs."""

import numpy as np
import pytest
from _synth import cmap_bytes, flow_bytes, tri_with, write

from polhawk_figures import DEFAULT_VMAX, FigureSpec, render
from polhawk_figures.figures import (
    bistability_loop,
    correlation_map,
    dispersion,
    flow_profile,
    repulsive_comparison,
)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _is_png(path):
    with open(path, "rb") as fh:
        return fh.read(8) == PNG_MAGIC


def _bistability_csv(tmp_path):
    path = tmp_path / "loop.csv"
    lines = ["# k_p=0.25 delta_p=0.62 F1=0.9 F2=1.3",
             "k_p,F_abs,branch,n,c_B,stable,on_up_sweep,on_down_sweep"]
    for F in map(float, np.linspace(0.1, 2.0, 40)):
        lines.append(f"0.25,{F!r},0,{20.0 * F!r},0.4,1,1,0")
        if 0.9 < F < 1.3:
            lines.append(f"0.25,{F!r},1,{60.0 - 20.0 * F!r},0.5,0,0,0")
            lines.append(f"0.25,{F!r},2,{40.0 + 20.0 * F!r},0.6,1,0,1")
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def _dispersion_csv(tmp_path):
    path = tmp_path / "disp.csv"
    lines = ["# region=0 model=pumped n=500.0 v=0.3 "
             "omega_min=0.05 omega_max=0.0",
             "# region=0 model=ballistic n=500.0 v=0.3 "
             "omega_min=0.0 omega_max=0.09",
             "# pair_band empty (omega_min=0.548184 >= omega_max=0)",
             "# pair_band omega_min=0.02 omega_max=0.09",
             "region,model,k,delta_k,re_omega_plus,im_omega_plus,"
             "re_omega_minus,im_omega_minus"]
    for dk in map(float, np.linspace(-2.0, 2.0, 25)):
        w = abs(dk) * 0.5
        for model in ("pumped", "ballistic"):
            lines.append(f"0,{model},{0.25 + dk!r},{dk!r},"
                         f"{w!r},-0.035,{-w!r},-0.035")
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def test_correlation_map_renders_png(tmp_path):
    n = 12
    rng = np.random.default_rng(3)
    tri = 1.0 + 1e-4 * rng.standard_normal(n * (n + 1) // 2)
    src = write(tmp_path / "a.cmap", cmap_bytes(n=n, pair_tri=tri))
    out = tmp_path / "a.png"
    assert correlation_map(src, str(out)) == str(out)
    assert _is_png(out)


def test_uniform_map_and_masked_cells_render(tmp_path):
    # g2 identically 1 with one masked pair: deviation field is flat
    # zero at mid-scale and the NaN cell must not poison the image
    tri = tri_with(10, 2, 7, np.nan)
    src = write(tmp_path / "u.cmap", cmap_bytes(n=10, pair_tri=tri))
    out = tmp_path / "u.png"
    correlation_map(src, str(out), vmax=DEFAULT_VMAX)
    assert _is_png(out)


def test_comparison_two_maps_one_scale(tmp_path):
    a = write(tmp_path / "a.cmap", cmap_bytes(n=8))
    b = write(tmp_path / "b.cmap", cmap_bytes(n=8))
    out = tmp_path / "ab.png"
    repulsive_comparison(a, b, str(out), vmax=3e-4)
    assert _is_png(out)


def test_flow_profile_renders_horizon_markers(tmp_path):
    src = write(tmp_path / "f.flow",
                flow_bytes(horizons=((-2.4, 0), (55.0, 1))))
    out = tmp_path / "f.png"
    flow_profile(src, str(out))
    assert _is_png(out)


def test_bistability_loop_renders(tmp_path):
    out = tmp_path / "loop.png"
    bistability_loop(_bistability_csv(tmp_path), str(out))
    assert _is_png(out)


def test_dispersion_renders(tmp_path):
    out = tmp_path / "disp.png"
    dispersion(_dispersion_csv(tmp_path), str(out))
    assert _is_png(out)


def test_render_dispatch_matches_direct_call(tmp_path):
    src = write(tmp_path / "a.cmap", cmap_bytes())
    out = tmp_path / "via_spec.png"
    spec = FigureSpec(kind="correlation_map", inputs=(src,),
                      output=str(out), vmax=2e-4)
    assert render(spec) == str(out)
    assert _is_png(out)


def test_wrong_table_kind_is_format_error(tmp_path):
    from polhawk_figures import FormatError
    out = tmp_path / "x.png"
    with pytest.raises(FormatError, match="bistability"):
        bistability_loop(_dispersion_csv(tmp_path), str(out))
    with pytest.raises(FormatError, match="dispersion"):
        dispersion(_bistability_csv(tmp_path), str(out))
    assert not out.exists()


def test_spec_validation():
    with pytest.raises(ValueError, match="kind"):
        FigureSpec(kind="heatmap", inputs=("a",), output="b.png")
    with pytest.raises(ValueError, match="input"):
        FigureSpec(kind="correlation_map", inputs=(), output="b.png")
    with pytest.raises(ValueError, match="input"):
        FigureSpec(kind="repulsive_comparison", inputs=("a",),
                   output="b.png")
    with pytest.raises(ValueError, match="vmax"):
        FigureSpec(kind="correlation_map", inputs=("a",),
                   output="b.png", vmax=-1.0)
    with pytest.raises(ValueError, match="vmax"):
        FigureSpec(kind="correlation_map", inputs=("a",),
                   output="b.png", vmax=np.nan)
