"""Command-line interface: scenario analyses, figure recipes, benchmarks.

Every analysis subcommand accepts ``--config`` (YAML scenario file),
repeatable ``--override path=value`` parameter overrides, and ``--out`` for
the artifact directory (default from the DCCHAIN_OUT environment variable,
falling back to ./runs). The subcommand selects which analysis runs; ``run``
executes the full analysis list from the config file.
"""

import argparse
import sys

import yaml

from . import config as _config
from . import runner as _runner
from .params import W_BASE
from .runner import FMT, RunError


def _load_dict(args):
    if getattr(args, "config", None):
        with open(args.config) as fh:
            d = yaml.safe_load(fh) or {}
        if not isinstance(d, dict):
            raise ValueError("config root must be a mapping, got %s"
                             % type(d).__name__)
        return d
    return {}


def _parse_override(text):
    if "=" not in text:
        raise ValueError("override %r must look like path=value" % text)
    path, _, value = text.partition("=")
    return path.strip(), value.strip()


def _merge_common(d, args):
    if getattr(args, "topology", None):
        d["topology"] = args.topology
    for text in getattr(args, "override", None) or []:
        path, value = _parse_override(text)
        d.setdefault("overrides", {})[path] = value
    if getattr(args, "out", None):
        d["out_dir"] = args.out
    return d


def _set_option(d, analysis, key, value):
    if value is not None:
        d.setdefault("options", {}).setdefault(analysis, {})[key] = value


def _run_analysis(args, analysis, extra_options=()):
    d = _merge_common(_load_dict(args), args)
    if analysis is not None:
        d["analyses"] = [analysis]
    for key, value in extra_options:
        _set_option(d, analysis, key, value)
    cfg = _config.from_dict(d)
    artifacts = _runner.run(cfg, out_dir=getattr(args, "out", None) or None)
    return cfg, artifacts


def _print_artifacts(artifacts):
    for key in sorted(artifacts):
        print("wrote %s" % artifacts[key])


def _cat(path):
    with open(path) as fh:
        sys.stdout.write(fh.read())


def _cmd_run(args):
    _, artifacts = _run_analysis(args, None)
    _print_artifacts(artifacts)


def _cmd_equilibrium(args):
    if args.load is not None:
        args.override = (args.override or []) + ["p_load=%s" % args.load]
    _, artifacts = _run_analysis(args, "equilibrium")
    _cat(artifacts["operating_point"])


def _cmd_modes(args):
    _, artifacts = _run_analysis(args, "modes",
                                 [("top_n", args.top_n)])
    _cat(artifacts["modes"])


def _cmd_poa(args):
    _, artifacts = _run_analysis(args, "poa", [
        ("channel", args.channel), ("f_min_hz", args.fmin),
        ("f_max_hz", args.fmax), ("n_points", args.points)])
    _print_artifacts(artifacts)


def _cmd_simulate(args):
    _, artifacts = _run_analysis(args, "simulate", [
        ("input", args.input), ("t_end", args.tend), ("dt", args.dt)])
    _print_artifacts(artifacts)


def _cmd_spectrum(args):
    _, artifacts = _run_analysis(args, "spectrum", [
        ("signal", args.signal), ("t_a", args.ta), ("t_b", args.tb)])
    _print_artifacts(artifacts)


def _cmd_sweep(args):
    values = None
    if args.values:
        values = [float(v) for v in args.values.split(",")]
    _, artifacts = _run_analysis(args, "sweep", [
        ("param", args.param), ("values", values), ("start", args.start),
        ("stop", args.stop), ("num", args.num), ("spacing", args.spacing),
        ("top_k", args.top_k)])
    _print_artifacts(artifacts)


def _cmd_validate(args):
    _, artifacts = _run_analysis(args, "validate-fullorder", [
        ("p_from", args.p_from), ("p_to", args.p_to),
        ("t_step", args.t_step), ("t_end", args.tend), ("dt", args.dt)])
    _cat(artifacts["validate_report"])
    _print_artifacts(artifacts)


def _cmd_tune(args):
    if args.kind:
        from .tuning import tune_pair
        if args.fbw is None or args.zeta is None:
            raise ValueError("tune --kind needs --fbw and --zeta")
        kp, ki = tune_pair(args.kind, args.fbw, args.zeta, W_BASE,
                           l=args.l, r=args.r, c=args.c)
        print("kp %s" % (FMT % kp))
        print("ki %s" % (FMT % ki))
        return
    _, artifacts = _run_analysis(args, "tune")
    _cat(artifacts["gains"])


def _cmd_fig_repro(args):
    out = args.out or _config.ScenarioConfig().out_dir
    params = None
    if args.override:
        d = _merge_common(_load_dict(args), args)
        d["analyses"] = ["equilibrium"]
        cfg = _config.from_dict(d)
        params = _config.build_params(cfg)
    artifacts = _runner.fig_repro(args.figure, out, params=params)
    _print_artifacts(artifacts)


def _cmd_bench(args):
    from .bench import run_bench
    for line in run_bench(n_eval=args.n, with_simulate=not args.quick):
        print(line)


def _add_common(sub, config_arg=True):
    if config_arg:
        sub.add_argument("--config", help="YAML scenario file")
        sub.add_argument("--topology", choices=_config.TOPOLOGIES,
                         help="model topology (overrides the config)")
        sub.add_argument("--override", action="append", metavar="PATH=VALUE",
                         help="parameter override, repeatable")
    sub.add_argument("--out", help="artifact directory "
                     "(default: $DCCHAIN_OUT or ./runs)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dcchain",
        description="Dynamic analysis of a data-center power-delivery chain")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("run", help="run every analysis listed in the config")
    _add_common(s)
    s.set_defaults(fn=_cmd_run)

    s = subs.add_parser("equilibrium", help="solve and print the "
                        "operating point")
    _add_common(s)
    s.add_argument("--load", type=float, help="served load level (p.u.)")
    s.set_defaults(fn=_cmd_equilibrium)

    s = subs.add_parser("modes", help="eigenvalues with participation table")
    _add_common(s)
    s.add_argument("--top-n", type=int, help="limit the table to n modes")
    s.set_defaults(fn=_cmd_modes)

    s = subs.add_parser("poa", help="load-to-grid amplification over "
                        "frequency")
    _add_common(s)
    s.add_argument("--channel", help="restrict to one output channel")
    s.add_argument("--fmin", type=float, help="lowest frequency (Hz)")
    s.add_argument("--fmax", type=float, help="highest frequency (Hz)")
    s.add_argument("--points", type=int, help="frequency grid size")
    s.set_defaults(fn=_cmd_poa)

    s = subs.add_parser("simulate", help="time-domain run under a load input")
    _add_common(s)
    s.add_argument("--input", metavar="SPEC",
                   help="const:V | step:T0:FROM:TO | "
                        "sine:BASE:AMP:F_HZ[:T_ON] | trace:PATH")
    s.add_argument("--tend", type=float, help="end time (s)")
    s.add_argument("--dt", type=float, help="fixed step (s)")
    s.set_defaults(fn=_cmd_simulate)

    s = subs.add_parser("spectrum", help="amplitude spectrum of a simulated "
                        "signal")
    _add_common(s)
    s.add_argument("--signal", help="output/state/algebraic name")
    s.add_argument("--ta", type=float, help="window start (s)")
    s.add_argument("--tb", type=float, help="window end (s)")
    s.set_defaults(fn=_cmd_spectrum)

    s = subs.add_parser("sweep", help="eigenvalues and response peaks over a "
                        "parameter range")
    _add_common(s)
    s.add_argument("--param", help="dotted parameter path")
    s.add_argument("--values", help="comma-separated explicit values")
    s.add_argument("--start", type=float)
    s.add_argument("--stop", type=float)
    s.add_argument("--num", type=int)
    s.add_argument("--spacing", choices=("linear", "log"))
    s.add_argument("--top-k", type=int, help="tracked mode count")
    s.set_defaults(fn=_cmd_sweep)

    s = subs.add_parser("validate-fullorder", help="switching-model check of "
                        "the reduced chain")
    _add_common(s)
    s.add_argument("--p-from", type=float)
    s.add_argument("--p-to", type=float)
    s.add_argument("--t-step", type=float, help="step time (s)")
    s.add_argument("--tend", type=float, help="end time (s)")
    s.add_argument("--dt", type=float, help="fixed step (s)")
    s.set_defaults(fn=_cmd_validate)

    s = subs.add_parser("tune", help="PI gains from a loop spec, or the "
                        "gain table of a scenario")
    _add_common(s)
    s.add_argument("--kind", choices=("voltage", "current", "pll"))
    s.add_argument("--fbw", type=float, help="bandwidth target (Hz)")
    s.add_argument("--zeta", type=float, help="damping target")
    s.add_argument("--l", type=float, default=0.0, help="plant inductance")
    s.add_argument("--r", type=float, default=0.0, help="plant resistance")
    s.add_argument("--c", type=float, default=0.0, help="plant capacitance")
    s.set_defaults(fn=_cmd_tune)

    s = subs.add_parser("fig-repro", help="write the data series behind one "
                        "figure recipe")
    s.add_argument("figure", help="fig4 | fig5 | fig6 | fig7 | fig9 | "
                   "fig10 | fig11")
    s.add_argument("--config", help="YAML scenario file for the base "
                   "parameters")
    s.add_argument("--topology", choices=_config.TOPOLOGIES)
    s.add_argument("--override", action="append", metavar="PATH=VALUE")
    s.add_argument("--out", help="artifact directory")
    s.set_defaults(fn=_cmd_fig_repro)

    s = subs.add_parser("bench", help="compare compiled and plain "
                        "residual/simulation throughput")
    s.add_argument("--n", type=int, default=2000, help="evaluations per case")
    s.add_argument("--quick", action="store_true",
                   help="skip the simulation benchmark")
    s.set_defaults(fn=_cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    return 0


def cli():
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
