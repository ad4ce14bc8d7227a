"""Strict-reader behavior: exact round trips, every header field
checked, damage rejected with FormatError, non-finite payloads
rejected with RangeError."""

import numpy as np
import pytest
from _synth import (
    CMAP_MAGIC,
    FLOW_MAGIC,
    cmap_bytes,
    flow_bytes,
    tri_with,
    write,
)

from polhawk_figures import (
    FormatError,
    RangeError,
    load_correlation_map,
    load_csv_columns,
    load_flow_record,
)


def test_cmap_round_trip(tmp_path):
    n = 8
    rng = np.random.default_rng(5)
    one = rng.uniform(1.0, 9.0, n)
    tri = rng.normal(1.0, 1e-4, n * (n + 1) // 2)
    path = write(tmp_path / "a.cmap",
                 cmap_bytes(n=n, x_min=-4.0, dx=1.0, n_samples=321,
                            one_body=one, pair_tri=tri))
    cm = load_correlation_map(path)
    assert cm.n == n and cm.n_samples == 321
    assert cm.x_min == -4.0 and cm.dx == 1.0
    np.testing.assert_array_equal(cm.one_body, one)
    np.testing.assert_allclose(cm.x, -4.0 + np.arange(n))
    # pair matrix expands the stored triangle symmetrically
    iu, ju = np.triu_indices(n)
    np.testing.assert_array_equal(cm.pair[iu, ju], tri)
    np.testing.assert_array_equal(cm.pair, cm.pair.T)


def test_cmap_nan_cells_stay_masked(tmp_path):
    n = 6
    tri = tri_with(n, 1, 4, np.nan)
    path = write(tmp_path / "m.cmap", cmap_bytes(n=n, pair_tri=tri))
    cm = load_correlation_map(path)
    assert np.isnan(cm.pair[1, 4]) and np.isnan(cm.pair[4, 1])
    assert np.isnan(cm.pair).sum() == 2


def test_flow_round_trip(tmp_path):
    path = write(tmp_path / "f.flow",
                 flow_bytes(horizons=((0.5, 0), (40.0, 1))))
    rec = load_flow_record(path)
    assert rec.n == 16
    assert rec.horizons == ((0.5, "sub_to_super"), (40.0, "super_to_sub"))
    np.testing.assert_allclose(rec.x, -8.0 + np.arange(16))
    assert rec.density.shape == rec.velocity.shape == (16,)
    assert np.all(rec.pump_abs >= 1.0)


@pytest.mark.parametrize("mangle, message", [
    (lambda b: b"XMAP1\x00" + b[6:], "magic"),
    (lambda b: b[:6] + (7).to_bytes(4, "little") + b[10:], "version"),
    (lambda b: b[:-8], "truncated"),
    (lambda b: b + b"\x00" * 8, "trailing"),
    (lambda b: b[:20], "truncated"),
])
def test_cmap_damage_rejected(tmp_path, mangle, message):
    path = tmp_path / "bad.cmap"
    path.write_bytes(mangle(cmap_bytes()))
    with pytest.raises(FormatError, match=message):
        load_correlation_map(str(path))


def test_cmap_rejects_flow_magic(tmp_path):
    path = write(tmp_path / "x.cmap", cmap_bytes(magic=FLOW_MAGIC))
    with pytest.raises(FormatError, match="magic"):
        load_correlation_map(path)


def test_flow_rejects_cmap_magic(tmp_path):
    path = write(tmp_path / "x.flow", flow_bytes(magic=CMAP_MAGIC))
    with pytest.raises(FormatError, match="magic"):
        load_flow_record(path)


def test_cmap_zero_points_rejected(tmp_path):
    path = write(tmp_path / "z.cmap",
                 cmap_bytes(n=0, one_body=np.zeros(0),
                            pair_tri=np.zeros(0)))
    with pytest.raises(FormatError):
        load_correlation_map(path)


def test_cmap_bad_dx_rejected(tmp_path):
    for dx in (0.0, -1.0, np.nan):
        path = write(tmp_path / "d.cmap", cmap_bytes(dx=dx))
        with pytest.raises(FormatError):
            load_correlation_map(path)


def test_cmap_inf_cell_is_range_error(tmp_path):
    tri = tri_with(8, 2, 5, np.inf)
    path = write(tmp_path / "i.cmap", cmap_bytes(pair_tri=tri))
    with pytest.raises(RangeError):
        load_correlation_map(path)


def test_cmap_nonfinite_one_body_is_range_error(tmp_path):
    one = np.full(8, 5.0)
    one[3] = np.nan
    path = write(tmp_path / "o.cmap", cmap_bytes(one_body=one))
    with pytest.raises(RangeError):
        load_correlation_map(path)


def test_flow_nan_column_is_range_error(tmp_path):
    n = 16
    x = -8.0 + np.arange(n, dtype=float)
    cols = [x, np.ones(n), np.ones(n), np.zeros(n), np.ones(n)]
    cols[2][7] = np.nan
    path = write(tmp_path / "n.flow", flow_bytes(columns=cols))
    with pytest.raises(RangeError):
        load_flow_record(path)


def test_flow_bad_horizon_kind_rejected(tmp_path):
    path = write(tmp_path / "k.flow", flow_bytes(horizons=((0.5, 9),)))
    with pytest.raises(FormatError):
        load_flow_record(path)


def test_flow_too_many_horizons_rejected(tmp_path):
    horizons = tuple((float(i), i % 2) for i in range(65))
    path = write(tmp_path / "h.flow", flow_bytes(horizons=horizons))
    with pytest.raises(FormatError):
        load_flow_record(path)


def test_flow_truncated_horizon_rejected(tmp_path):
    blob = flow_bytes(horizons=((0.5, 0),))
    path = tmp_path / "t.flow"
    path.write_bytes(blob[:-4])
    with pytest.raises(FormatError):
        load_flow_record(str(path))


def test_csv_round_trip(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("# alpha=1 beta=2\n"
                    "# note line\n"
                    "a,b,tag\n"
                    "1.0,2.5,up\n"
                    "3.0,-4.5,down\n")
    header, cols = load_csv_columns(str(path))
    assert header == ["alpha=1 beta=2", "note line"]
    np.testing.assert_array_equal(cols["a"], [1.0, 3.0])
    np.testing.assert_array_equal(cols["b"], [2.5, -4.5])
    assert cols["tag"] == ["up", "down"]


def test_csv_ragged_row_rejected(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("a,b\n1.0,2.0\n3.0\n")
    with pytest.raises(FormatError):
        load_csv_columns(str(path))


def test_csv_nonfinite_value_rejected(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("a,b\n1.0,inf\n2.0,3.0\n")
    with pytest.raises(RangeError):
        load_csv_columns(str(path))


def test_csv_empty_file_rejected(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text("")
    with pytest.raises(FormatError):
        load_csv_columns(str(path))


def test_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        load_correlation_map(str(tmp_path / "absent.cmap"))
