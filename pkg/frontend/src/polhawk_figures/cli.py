"""Command line entry for rendering figures from recorded output files.

Two invocation styles:

    render --spec jobs.json
    render KIND INPUT [INPUT2] OUTPUT [--vmax V]

The spec file holds a JSON list of jobs, each an object with "kind",
"inputs" (list of paths), "output", and optional "vmax".  A single
object is accepted as a one-job list.  Exit status is 0 on success and
2 on any input problem (unreadable file, malformed payload, values out
of range, bad arguments).
"""

import argparse
import json
import sys

from .figures import KINDS, FigureSpec, render
from .readers import FormatError, RangeError

EXIT_OK = 0
EXIT_ERROR = 2

ALIASES = {
    "cmap": "correlation_map",
    "flow": "flow_profile",
    "bist": "bistability_loop",
    "disp": "dispersion",
    "compare": "repulsive_comparison",
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="render",
        description="render figures from recorded simulation output",
    )
    parser.add_argument("--spec", metavar="PATH",
                        help="JSON file listing rendering jobs")
    parser.add_argument("args", nargs="*", metavar="KIND INPUT... OUTPUT",
                        help="single job: figure kind, input file(s), "
                             "output image")
    parser.add_argument("--vmax", type=float, default=None,
                        help="symmetric color-scale limit for "
                             "correlation maps")
    return parser


def _specs_from_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list) or not data:
        raise ValueError("spec file must hold a job object or a "
                         "non-empty list of jobs")
    specs = []
    for i, job in enumerate(data):
        if not isinstance(job, dict):
            raise ValueError(f"job {i} is not an object")
        unknown = set(job) - {"kind", "inputs", "output", "vmax"}
        if unknown:
            raise ValueError(f"job {i} has unknown keys "
                             f"{sorted(unknown)}")
        try:
            kind = job["kind"]
            inputs = job["inputs"]
            output = job["output"]
        except KeyError as exc:
            raise ValueError(f"job {i} is missing {exc}") from None
        if isinstance(inputs, str):
            inputs = [inputs]
        kind = ALIASES.get(kind, kind)
        specs.append(FigureSpec(kind=kind, inputs=tuple(inputs),
                                output=str(output),
                                vmax=job.get("vmax")))
    return specs


def _spec_from_args(tokens, vmax):
    if len(tokens) < 3:
        raise ValueError("positional form needs KIND, input file(s), "
                         "and an output path")
    kind = ALIASES.get(tokens[0], tokens[0])
    if kind not in KINDS:
        raise ValueError(f"unknown figure kind {tokens[0]!r}; expected "
                         f"one of {', '.join(sorted(ALIASES))} or "
                         f"{', '.join(KINDS)}")
    return FigureSpec(kind=kind, inputs=tuple(tokens[1:-1]),
                      output=tokens[-1], vmax=vmax)


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)

    try:
        if args.spec is not None:
            if args.args:
                raise ValueError("--spec and positional arguments are "
                                 "mutually exclusive")
            specs = _specs_from_json(args.spec)
            if args.vmax is not None:
                raise ValueError("--vmax belongs inside spec-file jobs")
        else:
            specs = [_spec_from_args(args.args, args.vmax)]
    except (ValueError, TypeError, OSError,
            json.JSONDecodeError) as exc:
        print(f"render: {exc}", file=sys.stderr)
        return EXIT_ERROR

    for spec in specs:
        try:
            path = render(spec)
        except (FormatError, RangeError, OSError, ValueError) as exc:
            print(f"render: {spec.kind} from "
                  f"{', '.join(spec.inputs)}: {exc}", file=sys.stderr)
            return EXIT_ERROR
        print(f"wrote {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
