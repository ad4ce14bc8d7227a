"""Timing comparison of the compiled and NumPy kernel backends.

Runs each hot kernel and a full split-step update on matched inputs
through both implementations and prints a table of per-call times with
the speed ratio.  The engine row is the end-to-end number that decides
which backend a long ensemble run should use; on narrow-SIMD machines
the NumPy path can win despite the compiled path's lower call
overhead.

    python3 benchmarks/kernel_bench.py --points 256 --batch 64
"""

import argparse
import importlib
import os
import subprocess
import sys
import time

import numpy as np


def _load_backends():
    from polhawk._kernels import pure

    backends = {"pure": pure}
    try:
        backends["cython"] = importlib.import_module("polhawk._kernels._core")
    except ImportError:
        pass
    return backends


def _time_call(fn, *args, repeats, inner=8):
    """Median over `repeats` of the mean call time in a burst of
    `inner` calls (burst amortizes the clock read)."""
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        samples.append((time.perf_counter() - t0) / inner)
    return float(np.median(samples))


def bench_kernels(n, batch, repeats, seed=0):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=(batch, n)) + 1j * rng.normal(size=(batch, n))
    pref = np.exp(1j * rng.normal(size=n) * 0.01).astype(np.complex128)
    pump = (rng.normal(size=n) * 0.01).astype(np.complex128)
    g_dt = 3e-6
    lo, hi = n // 8, 7 * n // 8

    nvec = np.abs(psi[0]) ** 2
    m = n * (n + 1) // 2

    rows = {}
    for name, impl in _load_backends().items():
        out = np.empty((batch, n))
        sum_n = np.zeros(n)
        comp_n = np.zeros(n)
        sum_nn = np.zeros(m)
        comp_nn = np.zeros(m)
        work = psi.copy()
        rows[name] = {
            "rotate_then_affine": _time_call(
                impl.rotate_then_affine, work, pref, pump, g_dt, lo, hi,
                repeats=repeats),
            "affine_then_rotate": _time_call(
                impl.affine_then_rotate, work, pref, pump, g_dt, lo, hi,
                repeats=repeats),
            "abs2_rows": _time_call(
                impl.abs2_rows, work, out, repeats=repeats),
            "accumulate_tri": _time_call(
                impl.accumulate_tri, nvec, sum_n, comp_n, sum_nn, comp_nn,
                repeats=repeats),
        }
    return rows


_ENGINE_SCRIPT = """\
import time
import numpy as np
import polhawk
from polhawk.core import CavityParams, Grid, PumpProfile
from polhawk.meanfield import make_engine

grid = Grid(-100.0, 100.0, {n})
params = CavityParams.default()
pump = PumpProfile.homogeneous(amplitude=2.0, k_p=0.0)
eng = make_engine(grid, params, pump, None, grid.dt_stable(params, 0.5))
rng = np.random.default_rng(1)
psi = rng.normal(size=({batch}, {n})) + 1j * rng.normal(size=({batch}, {n}))
for _ in range(4):
    eng.run(psi, 16)
t = []
for _ in range({repeats}):
    t0 = time.perf_counter()
    eng.run(psi, 64)
    t.append((time.perf_counter() - t0) / 64)
print(polhawk.BACKEND, np.median(t) / {batch})
"""


def bench_engine(n, batch, repeats):
    """Full split-step update per realization row, each backend forced
    in a fresh subprocess so module-level backend selection is honest."""
    script = _ENGINE_SCRIPT.format(n=n, batch=batch, repeats=repeats)
    out = {}
    for name, env_val in (("pure", "1"), ("cython", "0")):
        env = dict(os.environ, POLHAWK_FORCE_PURE=env_val)
        proc = subprocess.run([sys.executable, "-c", script], env=env,
                              capture_output=True, text=True)
        if proc.returncode != 0:
            raise RuntimeError(proc.stderr)
        got, value = proc.stdout.split()
        if got == name:
            out[name] = float(value)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=256,
                    help="grid points (default 256)")
    ap.add_argument("--batch", type=int, default=64,
                    help="realization rows per call (default 64)")
    ap.add_argument("--repeats", type=int, default=25,
                    help="timing repeats (default 25)")
    args = ap.parse_args(argv)

    rows = bench_kernels(args.points, args.batch, args.repeats)
    names = sorted(rows)
    paired = len(names) == 2
    print(f"kernels: {args.points} points, batch {args.batch}")
    print(f"{'kernel':<22}" + "".join(f"{n:>14}" for n in names)
          + ("    cyt/pure" if paired else ""))
    for kern in ("rotate_then_affine", "affine_then_rotate", "abs2_rows",
                 "accumulate_tri"):
        cells = [rows[n][kern] for n in names]
        line = f"{kern:<22}" + "".join(f"{c * 1e6:>11.2f} us" for c in cells)
        if paired:
            line += f"{cells[0] / cells[1]:>10.2f} x"
        print(line)

    eng = bench_engine(args.points, args.batch, max(args.repeats // 5, 3))
    cells = [eng[n] for n in names if n in eng]
    line = f"{'engine step/row':<22}" + "".join(
        f"{c * 1e6:>11.2f} us" for c in cells)
    if len(cells) == 2:
        line += f"{cells[0] / cells[1]:>10.2f} x"
    print(line)
    if not paired:
        print("compiled backend not built; only the NumPy path timed")


if __name__ == "__main__":
    main()
