"""Command-line behavior: positional jobs with kind aliases, spec-file
batches, and exit code 2 on any bad input."""

import json

import numpy as np
from _synth import cmap_bytes, flow_bytes, write

from polhawk_figures.cli import main

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _is_png(path):
    with open(path, "rb") as fh:
        return fh.read(8) == PNG_MAGIC


def test_positional_cmap_alias(tmp_path):
    src = write(tmp_path / "a.cmap", cmap_bytes())
    out = tmp_path / "a.png"
    assert main(["cmap", src, str(out)]) == 0
    assert _is_png(out)


def test_positional_full_kind_name_and_vmax(tmp_path):
    src = write(tmp_path / "a.cmap", cmap_bytes())
    out = tmp_path / "a.png"
    assert main(["correlation_map", src, str(out),
                 "--vmax", "1.25e-4"]) == 0
    assert _is_png(out)


def test_positional_flow_alias(tmp_path):
    src = write(tmp_path / "f.flow", flow_bytes())
    out = tmp_path / "f.png"
    assert main(["flow", src, str(out)]) == 0
    assert _is_png(out)


def test_positional_compare_takes_two_inputs(tmp_path):
    a = write(tmp_path / "a.cmap", cmap_bytes())
    b = write(tmp_path / "b.cmap", cmap_bytes())
    out = tmp_path / "ab.png"
    assert main(["compare", a, b, str(out)]) == 0
    assert _is_png(out)


def test_spec_file_runs_all_jobs(tmp_path):
    a = write(tmp_path / "a.cmap", cmap_bytes())
    f = write(tmp_path / "f.flow", flow_bytes())
    out1, out2 = tmp_path / "one.png", tmp_path / "two.png"
    spec = [{"kind": "cmap", "inputs": [a], "output": str(out1),
             "vmax": 2e-4},
            {"kind": "flow_profile", "inputs": [f],
             "output": str(out2)}]
    spec_path = tmp_path / "jobs.json"
    spec_path.write_text(json.dumps(spec))
    assert main(["--spec", str(spec_path)]) == 0
    assert _is_png(out1) and _is_png(out2)


def test_spec_file_single_object(tmp_path):
    a = write(tmp_path / "a.cmap", cmap_bytes())
    out = tmp_path / "one.png"
    spec_path = tmp_path / "job.json"
    spec_path.write_text(json.dumps({"kind": "correlation_map",
                                     "inputs": str(a),
                                     "output": str(out)}))
    assert main(["--spec", str(spec_path)]) == 0
    assert _is_png(out)


def test_corrupt_input_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.cmap"
    blob = bytearray(cmap_bytes())
    blob[0] ^= 0xFF
    bad.write_bytes(bytes(blob))
    out = tmp_path / "x.png"
    assert main(["cmap", str(bad), str(out)]) == 2
    assert not out.exists()
    assert "magic" in capsys.readouterr().err


def test_nonfinite_input_exits_2(tmp_path):
    tri = np.ones(8 * 9 // 2)
    tri[5] = np.inf
    bad = write(tmp_path / "inf.cmap", cmap_bytes(pair_tri=tri))
    assert main(["cmap", bad, str(tmp_path / "x.png")]) == 2


def test_missing_file_exits_2(tmp_path):
    assert main(["cmap", str(tmp_path / "absent.cmap"),
                 str(tmp_path / "x.png")]) == 2


def test_unknown_kind_exits_2(tmp_path):
    src = write(tmp_path / "a.cmap", cmap_bytes())
    assert main(["sonogram", src, str(tmp_path / "x.png")]) == 2


def test_too_few_positionals_exits_2():
    assert main(["cmap", "only_one_path"]) == 2


def test_bad_spec_json_exits_2(tmp_path):
    spec_path = tmp_path / "jobs.json"
    spec_path.write_text("{not json")
    assert main(["--spec", str(spec_path)]) == 2


def test_spec_with_unknown_key_exits_2(tmp_path):
    a = write(tmp_path / "a.cmap", cmap_bytes())
    spec_path = tmp_path / "jobs.json"
    spec_path.write_text(json.dumps([{"kind": "cmap", "inputs": [a],
                                      "output": "x.png",
                                      "recompute": True}]))
    assert main(["--spec", str(spec_path)]) == 2


def test_spec_and_positionals_conflict(tmp_path):
    spec_path = tmp_path / "jobs.json"
    spec_path.write_text("[]")
    assert main(["--spec", str(spec_path), "cmap", "a", "b"]) == 2


def test_failed_job_stops_batch(tmp_path):
    good = write(tmp_path / "a.cmap", cmap_bytes())
    out1, out2 = tmp_path / "one.png", tmp_path / "two.png"
    spec = [{"kind": "cmap", "inputs": [str(tmp_path / "absent.cmap")],
             "output": str(out1)},
            {"kind": "cmap", "inputs": [good], "output": str(out2)}]
    spec_path = tmp_path / "jobs.json"
    spec_path.write_text(json.dumps(spec))
    assert main(["--spec", str(spec_path)]) == 2
    assert not out1.exists() and not out2.exists()
