"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 runtime or numeric error.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import sys

import numpy as np

from . import suites
from .config import ConfigError, RunConfig, load
from .dynamics import SYSTEMS, convert
from .errors import RigidChartError
from .flows import compare_formulations, integrate

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"{self.prog}: error: {message}") from None


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    return f"{float(x):.17g}"


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _writer(fh):
    return csv.writer(fh, delimiter=",", lineterminator="\n")


def write_trajectory(traj, I, fh):
    w = _writer(fh)
    w.writerow(traj.header())
    for row in traj.records(I):
        w.writerow([_fmt(x) for x in row])


def write_records(records, fh):
    w = _writer(fh)
    w.writerow(["check", "point", "residual", "tolerance", "pass"])
    for r in records:
        w.writerow([r.check, " ".join(_fmt(x) for x in np.ravel(r.point)),
                    _fmt(r.residual), _fmt(r.tolerance), _fmt(r.passed)])


def _load_config(args):
    cfg = load(args.config) if args.config else RunConfig()
    if getattr(args, "system", None):
        cfg.system = args.system
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "samples", None) is not None:
        cfg.samples = args.samples
    return cfg


def cmd_simulate(args):
    cfg = _load_config(args)
    I = cfg.inertia()
    state0 = convert(cfg.initial_state(), cfg.system, I)
    traj = integrate(cfg.system, state0, I, cfg.t_end, cfg.step_control(), dt_out=cfg.dt_out,
                     reanchor_threshold=cfg.reanchor_threshold, project=cfg.project)
    with _output(args.out) as fh:
        write_trajectory(traj, I, fh)
    return EXIT_OK


def cmd_verify(args):
    cfg = _load_config(args)
    names = list(suites.SUITES) if args.suite == "all" else args.suite.split(",")
    unknown = [n for n in names if n not in suites.SUITES]
    if unknown:
        print(f"unknown suite(s): {', '.join(unknown)}; available: all, "
              f"{', '.join(suites.SUITES)}", file=sys.stderr)
        return EXIT_USAGE
    records = suites.run(names, cfg)
    with _output(args.out) as fh:
        write_records(records, fh)
    failed = sorted({r.check for r in records if not r.passed})
    for name in failed:
        print(f"FAIL {name}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_compare(args):
    cfg = _load_config(args)
    I = cfg.inertia()
    omega0 = np.asarray(cfg.initial_momentum, dtype=float)
    if cfg.initial_system != "n-omega":
        omega0 = convert(cfg.initial_state(), "n-omega", I).omega
    report = compare_formulations(omega0, I, cfg.t_end, cfg.step_control(), dt_out=cfg.dt_out,
                                  reanchor_threshold=cfg.reanchor_threshold,
                                  lane_omega=cfg.lane_omega)
    tol = cfg.tolerances
    rows = []
    for lane, (dH, dm) in report.drift.items():
        rows.append(["energy-drift", lane, "", dH, tol.conservation, dH < tol.conservation])
        rows.append(["momentum-drift", lane, "", dm, tol.conservation, dm < tol.conservation])
        rows.append(["reanchors", lane, "", report.reanchors[lane], 0, True])
    for (a, b), d in report.divergence.items():
        rows.append(["divergence", a, b, d, tol.divergence, d < tol.divergence])
    for lane, msg in report.failed.items():
        print(f"lane {lane} failed: {msg}", file=sys.stderr)
        rows.append(["lane-failed", lane, "", np.nan, 0, False])
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["quantity", "lane", "other", "value", "tolerance", "pass"])
        for row in rows:
            w.writerow([_fmt(x) for x in row])
    ok = not report.failed and report.max_divergence < tol.divergence
    return EXIT_OK if ok else EXIT_FAIL


def build_parser():
    parser = _Parser(prog="rigidchart", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, config_required):
        p.add_argument("--config", required=config_required, help="dotted-key TOML run config")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--seed", type=int)

    p = sub.add_parser("simulate", help="integrate one trajectory and write it as CSV")
    common(p, True)
    p.add_argument("--system", choices=SYSTEMS)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run verification suites and write a residual report")
    common(p, False)
    p.add_argument("--suite", default="all", help="suite name, comma list, or 'all'")
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="propagate R(0)=1 in all four systems and compare")
    common(p, False)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return EXIT_OK
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RigidChartError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
