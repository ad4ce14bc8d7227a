"""Command-line driver.

Subcommands: bistability (hysteresis curve CSV), dispersion (branch
tables per pumped region), steady (relaxed flow profile, FLOW1 or CSV),
twa (stochastic ensemble, CMAP1 map + quadrant statistics + manifest),
validate (operability checks).

Exit codes: 0 ok, 2 configuration error, 3 numerical failure,
4 constraint violation.
"""

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import tempfile
import time

import numpy as np

from ._kernels import BACKEND
from .bistability import (density_response, drive_for_density,
                          turning_points, waterfall_checks)
from .configio import ConfigError, dumps_config, load_config
from .correlations import InsufficientSamples, g2_map, quadrant_statistics
from .dispersion import (BranchParams, EmptyBand, RootResidualTooLarge,
                         _scan_extremum, dispersion_table, scattering_band)
from .formats import (FlowRecord, write_cmap1, write_cmap_csv,
                      write_csv_columns, write_flow1)
from .meanfield import NotConverged, relax_to_steady
from .scenarios import SCENARIO_NAMES, UnknownScenario, load_scenario
from .twa import NonFinite, load_checkpoint, run_ensemble

from . import __version__ as VERSION

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CONSTRAINT = 4


def _atomic_write(path, writer):
    """Run writer(tmp_path) then rename over path; partial files never
    land under the final name."""
    absdir = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=absdir, suffix=".part")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def _load_config_arg(args):
    if args.scenario is not None:
        return load_scenario(args.scenario)
    return load_config(args.config)


def _add_source_args(sp):
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--config", metavar="PATH",
                     help="simulation config file")
    grp.add_argument("--scenario", metavar="NAME", choices=SCENARIO_NAMES,
                     help="built-in preset: " + ", ".join(SCENARIO_NAMES))


def _driven_segments(pump):
    segs = sorted((s for s in getattr(pump, "segments", [])
                   if s.amplitude > 0), key=lambda s: s.x_start)
    if not segs:
        raise ConfigError("config drives no pump segment")
    return segs


def cmd_bistability(args):
    cfg = _load_config_arg(args)
    p = cfg.params
    seen = []
    for seg in _driven_segments(cfg.pump):
        if seg.k_p not in seen:
            seen.append(seg.k_p)

    names = ("k_p", "F_abs", "branch", "n", "c_B", "stable",
             "on_up_sweep", "on_down_sweep")
    cols = [[] for _ in names]
    header = []
    for k_p in seen:
        dp = p.delta_p(k_p)
        tp = turning_points(dp, p)
        if tp is not None:
            F_max = 1.25 * tp.F1
            header.append(
                f"k_p={k_p!r} delta_p={dp!r} F1={tp.F1!r} F2={tp.F2!r}"
            )
        else:
            n_top = 2.0 * max(abs(dp), p.gamma) / p.g
            F_max = drive_for_density(n_top, dp, p)
            header.append(f"k_p={k_p!r} delta_p={dp!r} single_valued")
        for F in np.linspace(0.0, F_max, args.points):
            roots = density_response(F, dp, p)
            last = len(roots) - 1
            up_i = 0 if (tp is not None and F <= tp.F1) else last
            dn_i = last if (tp is not None and F >= tp.F2) else 0
            for idx, (n, stable) in enumerate(roots):
                row = (k_p, F, idx, n, p.sound_speed(n), stable,
                       idx == up_i, idx == dn_i)
                for c, v in zip(cols, row):
                    c.append(v)
    write_csv_columns(args.output, names, cols, header_lines=header)
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_dispersion(args):
    cfg = _load_config_arg(args)
    p = cfg.params
    segs = _driven_segments(cfg.pump)
    if any(s.amplitude <= 0 for s in cfg.pump.segments):
        raise ConfigError("pump segment with non-positive amplitude "
                          "cannot define a region")

    names = ("region", "model", "k", "delta_k", "re_omega_plus",
             "im_omega_plus", "re_omega_minus", "im_omega_minus")
    cols = [[] for _ in names]
    header = []
    branches = {}
    for i, seg in enumerate(segs):
        dp = p.delta_p(seg.k_p)
        roots = density_response(seg.amplitude, dp, p)
        n = roots[-1][0]
        v = p.flow_velocity(seg.k_p)
        pair = (("pumped", BranchParams.pumped(p, n, seg.k_p)),
                ("ballistic", BranchParams.ballistic(p, n, v)))
        branches[i] = pair[0][1]
        for model, br in pair:
            gn = p.g * br.n
            span = 2.0 * np.sqrt(
                (abs(br.u_eff) + 2 * gn + br.v ** 2 / (2 * p.kinetic)
                 + p.gamma) / p.kinetic
            )
            dk = np.linspace(-span, span, args.points)
            k, rp, ip, rm, im = dispersion_table(br, br.k_ref + dk)
            w_min = _scan_extremum(br, +1)
            w_max = max(0.0, _scan_extremum(br, -1))
            header.append(
                f"region={i} model={model} n={br.n!r} v={br.v!r} "
                f"omega_min={w_min!r} omega_max={w_max!r}"
            )
            rows = (np.full(k.shape, i), [model] * k.size, k, dk,
                    rp, ip, rm, im)
            for c, vals in zip(cols, rows):
                c.extend(vals)
    if len(segs) >= 2:
        # pair the segment feeding the interface (second to last) with
        # the one past it
        try:
            lo, hi = scattering_band(branches[len(segs) - 2],
                                     branches[len(segs) - 1])
            header.append(f"pair_band omega_min={lo!r} omega_max={hi!r}")
        except EmptyBand as exc:
            header.append(f"pair_band empty ({exc})")
    write_csv_columns(args.output, names, cols, header_lines=header)
    print(f"wrote {args.output}")
    return EXIT_OK


def _solve_steady(cfg):
    return relax_to_steady(cfg.grid, cfg.params, cfg.pump, cfg.potential,
                           mask=cfg.mask, dt=cfg.dt, prepare="upper")


def _flow_csv(path, rec):
    header = [f"horizon x={x!r} kind={kind}" for x, kind in rec.horizons]
    write_csv_columns(path, ("x", "F_abs", "n", "v", "c_B"), rec.columns,
                      header_lines=header)


def cmd_steady(args):
    cfg = _load_config_arg(args)
    sol = _solve_steady(cfg)
    rec = FlowRecord.from_solution(sol)
    if args.format == "bin":
        _atomic_write(args.output, lambda t: write_flow1(t, rec))
    else:
        _atomic_write(args.output, lambda t: _flow_csv(t, rec))
    print(f"steady state at t={sol.t_final:.1f} ps, "
          f"residual {sol.residual:.3e}")
    for x, kind in rec.horizons:
        print(f"horizon {kind} at x={x:+.3f} um")
    print(f"wrote {args.output}")
    return EXIT_OK


def _quadrant_csv(path, stats):
    rows = list(stats.quadrants.items()) + [
        ("moustache", stats.moustache),
        ("diagonal", stats.diagonal),
        ("fringe", stats.fringe),
    ]
    write_csv_columns(
        path,
        ("band", "mean_g2_minus_1", "stderr", "n_cells"),
        ([r[0] for r in rows],
         [r[1].mean for r in rows],
         [r[1].se for r in rows],
         [r[1].n_cells for r in rows]),
        header_lines=(f"horizon_x={stats.horizon_x!r}",),
    )


def cmd_twa(args):
    cfg = _load_config_arg(args)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.realizations is not None:
        overrides["n_realizations"] = args.realizations
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)

    t0 = time.perf_counter()
    horizon_x = 0.0
    if cfg.pump.max_amplitude() == 0.0:
        psi_mf = np.zeros(cfg.grid.n, dtype=np.complex128)
    else:
        sol = _solve_steady(cfg)
        psi_mf = sol.psi
        for h in sol.horizons():
            if h.kind == "sub_to_super":
                horizon_x = h.x
                break

    resume_state = None
    if args.resume and os.path.exists(args.resume):
        try:
            resume_state = load_checkpoint(args.resume, cfg)
        except Exception as exc:
            print(f"config error: cannot resume from {args.resume}: {exc}",
                  file=sys.stderr)
            return EXIT_CONFIG
        print(f"resuming: {len(resume_state['blocks_done'])} of "
              f"{cfg.n_blocks} blocks already done", file=sys.stderr)

    def progress(block, total):
        print(f"block {block + 1}/{total} done", file=sys.stderr, flush=True)

    sink, report = run_ensemble(
        cfg,
        n_workers=args.workers,
        checkpoint_path=args.resume,
        resume_state=resume_state,
        psi_mf=psi_mf,
        progress=progress,
    )

    try:
        cmap = g2_map(sink)
    except InsufficientSamples as exc:
        print(f"no correlation map: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    outputs = [args.output]
    if args.format == "bin":
        _atomic_write(args.output, lambda t: write_cmap1(t, cmap))
    else:
        _atomic_write(args.output, lambda t: write_cmap_csv(t, cmap))

    stem = os.path.splitext(args.output)[0]
    stats = quadrant_statistics(cmap, horizon_x, acc=sink)
    qpath = stem + ".quadrants.csv"
    _atomic_write(qpath, lambda t: _quadrant_csv(t, stats))
    outputs.append(qpath)

    manifest = {
        "format": "polhawk-run-manifest",
        "version": VERSION,
        "backend": BACKEND,
        "config_sha256": hashlib.sha256(
            dumps_config(cfg).encode("utf-8")).hexdigest(),
        "seed": int(cfg.seed),
        "n_realizations": int(cfg.n_realizations),
        "n_completed": int(report.n_completed),
        "aborted_realizations": [int(r) for r in report.aborted],
        "samples_accumulated": int(report.samples_accumulated),
        "horizon_x": float(horizon_x),
        "wall_time_s": time.perf_counter() - t0,
        "outputs": [os.path.basename(o) for o in outputs],
    }
    mpath = stem + ".manifest.json"

    def _dump(tmp):
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")

    _atomic_write(mpath, _dump)
    outputs.append(mpath)

    print(f"{report.n_completed}/{cfg.n_realizations} realizations, "
          f"{report.samples_accumulated} samples, "
          f"{len(report.aborted)} aborted")
    for o in outputs:
        print(f"wrote {o}")
    return EXIT_OK


def cmd_validate(args):
    cfg = _load_config_arg(args)
    n_bad = 0
    for name, ok, value, bound, detail in waterfall_checks(cfg):
        tag = "PASS" if ok else "FAIL"
        print(f"{tag} {name}: value={value:.6g} bound={bound:.6g}")
        print(f"     {detail}")
        n_bad += 0 if ok else 1
    if n_bad:
        print(f"{n_bad} constraint violation(s)")
        return EXIT_CONSTRAINT
    print("all operability checks passed")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(
        prog="polhawk",
        description="Driven-dissipative polariton fluid toolkit: "
                    "mean-field flows, excitation spectra, and "
                    "vacuum-seeded density correlations.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bistability",
                       help="drive-density hysteresis curve to CSV")
    _add_source_args(b)
    b.add_argument("--output", metavar="PATH", default="bistability.csv")
    b.add_argument("--points", type=int, default=400,
                   help="sweep points per pump wavevector")
    b.set_defaults(func=cmd_bistability)

    d = sub.add_parser("dispersion",
                       help="excitation branches per driven region to CSV")
    _add_source_args(d)
    d.add_argument("--output", metavar="PATH", default="dispersion.csv")
    d.add_argument("--points", type=int, default=801,
                   help="wavevector samples per branch")
    d.set_defaults(func=cmd_dispersion)

    s = sub.add_parser("steady",
                       help="relax to the driven steady flow (FLOW1/CSV)")
    _add_source_args(s)
    s.add_argument("--output", metavar="PATH", default="steady.flow1")
    s.add_argument("--format", choices=("bin", "csv"), default="bin")
    s.set_defaults(func=cmd_steady)

    t = sub.add_parser("twa",
                       help="stochastic ensemble: correlation map (CMAP1), "
                            "quadrant statistics, run manifest")
    _add_source_args(t)
    t.add_argument("--output", metavar="PATH", default="g2.cmap1")
    t.add_argument("--format", choices=("bin", "csv"), default="bin")
    t.add_argument("--seed", type=int, metavar="U64")
    t.add_argument("--realizations", type=int, metavar="N")
    t.add_argument("--workers", type=int, default=1, metavar="N")
    t.add_argument("--resume", metavar="PATH",
                   help="checkpoint file; created during the run and "
                        "picked up again if present")
    t.set_defaults(func=cmd_twa)

    v = sub.add_parser("validate",
                       help="operability checks for a two-step drive")
    _add_source_args(v)
    v.set_defaults(func=cmd_validate)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UnknownScenario) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotConverged as exc:
        sol = exc.solution
        print(f"numerical failure: {exc} "
              f"(residual {sol.residual:.3e}, change {sol.change_rate:.3e})",
              file=sys.stderr)
        return EXIT_NUMERICAL
    except (NonFinite, RootResidualTooLarge, EmptyBand,
            FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
