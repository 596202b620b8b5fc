"""Scenario runner: executes configured analyses and writes CSV artifacts.

Artifacts are plain CSV or structured text with every number at nine
significant digits and atomic file replacement, and the manifest records the
complete effective parameter set with no timestamps, so rerunning a scenario
reproduces its artifacts byte for byte. Figure recipes (fig4 .. fig11)
bundle the multi-step analyses behind one call each.
"""

import os
import tempfile

import numpy as np

from . import config as _config
from .assembly import build_sdcib
from .equilibrium import solve_equilibrium
from .fullorder import validate_reduction
from .gridmodels import build_ninebus
from .params import ChainParams, set_param
from .smallsignal import linearize, modal_analysis, multiport_poa, poa, sweep
from .timedomain import InputSignal, simulate, spectrum
from .workload import ingest_csv, synthetic_gpu_trace

FMT = "%.8e"

_BUILDERS = {"sdcib": build_sdcib, "ninebus": build_ninebus}


class RunError(RuntimeError):
    """One analysis failed; the message names the analysis and the cause."""


def _fmt(v):
    return FMT % float(v)


def _atomic_write(path, text):
    """Write text to a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".part_")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header, rows):
    """CSV with a mandatory header row; floats at FMT, strings verbatim."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            cell if isinstance(cell, str) else _fmt(cell) for cell in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def build_scenario(cfg):
    """(params, model) for a validated scenario config."""
    params = _config.build_params(cfg)
    return params, _BUILDERS[cfg.topology](params)


def parse_input_spec(spec, p_load):
    """InputSignal from a compact string form.

    Forms: ``const:V``, ``step:T0:FROM:TO``, ``sine:BASE:AMP:F_HZ[:T_ON]``,
    ``trace:PATH`` (two-column CSV of time and level). The default input,
    used when no spec is given, steps the load up by 0.05 at t = 1 s.
    """
    if spec is None:
        return InputSignal.step(1.0, p_load, p_load + 0.05)
    parts = str(spec).split(":")
    kind = parts[0]
    try:
        if kind == "const" and len(parts) == 2:
            return InputSignal.constant(float(parts[1]))
        if kind == "step" and len(parts) == 4:
            return InputSignal.step(float(parts[1]), float(parts[2]),
                                    float(parts[3]))
        if kind == "sine" and len(parts) in (4, 5):
            t_on = float(parts[4]) if len(parts) == 5 else 0.0
            return InputSignal.sine(float(parts[1]), float(parts[2]),
                                    float(parts[3]), t_on=t_on)
        if kind == "trace" and len(parts) >= 2:
            trace = ingest_csv(":".join(parts[1:]))
            return InputSignal.trace(trace.t, trace.p)
    except ValueError as exc:
        raise ValueError("bad input spec %r: %s" % (spec, exc))
    raise ValueError(
        "bad input spec %r (forms: const:V, step:T0:FROM:TO, "
        "sine:BASE:AMP:F_HZ[:T_ON], trace:PATH)" % (spec,))


class _RunContext:
    """Shared state for one run: lazy linearization, cached simulation."""

    def __init__(self, cfg, out_dir):
        self.cfg = cfg
        self.out = out_dir
        self.params = None
        self.model = None
        self.op = None
        self._red = None
        self._modal = None
        self.sim = None
        self.artifacts = {}
        self.results = {}
        self.tolerances = {}

    def path(self, name):
        return os.path.join(self.out, name)

    def add(self, key, filename):
        self.artifacts[key] = filename

    def reduced(self):
        if self._red is None:
            self._red = linearize(self.model, self.op)
        return self._red

    def modal(self):
        if self._modal is None:
            self._modal = modal_analysis(self.reduced())
        return self._modal


def _resolve_signal(ctx, name, sim):
    """Time series for an output channel, state, or algebraic variable."""
    m = ctx.model
    if name in m.output_names:
        return sim.outputs[:, m.output_names.index(name)]
    if name in m.x_index:
        return sim.x[:, m.x_index.index(name)]
    if name in m.y_index:
        return sim.y[:, m.y_index.index(name)]
    raise ValueError("unknown signal %r (outputs: %s)"
                     % (name, ", ".join(m.output_names)))


def _run_equilibrium(ctx):
    tol = float(ctx.cfg.option("equilibrium", "tol", 1e-10))
    ctx.tolerances["equilibrium_tol"] = tol
    ctx.op = solve_equilibrium(ctx.model, [ctx.params.p_load], tol=tol)
    m, op = ctx.model, ctx.op
    lines = [
        "model %s" % m.name,
        "converged %s" % ("yes" if op.converged else "no"),
        "iterations %d" % op.iterations,
        "residual_inf %s" % _fmt(op.residual_inf),
        "p_load %s" % _fmt(op.w[0]),
        "",
        "[states]",
    ]
    lines += ["%s %s" % (n, _fmt(v)) for n, v in zip(m.x_index.names, op.x)]
    lines += ["", "[algebraics]"]
    lines += ["%s %s" % (n, _fmt(v)) for n, v in zip(m.y_index.names, op.y)]
    lines += ["", "[outputs]"]
    lines += ["%s %s" % (n, _fmt(v))
              for n, v in zip(m.output_names, m.output(op.x, op.y, op.w))]
    _atomic_write(ctx.path("operating_point.txt"), "\n".join(lines) + "\n")
    ctx.add("operating_point", "operating_point.txt")
    ctx.results["equilibrium_residual_inf"] = op.residual_inf


def _mode_rows(modal, n=None, lead=()):
    """CSV rows (mode, re, im, f_hz, damping, top-3 states) for a mode set."""
    n = modal.n_modes if n is None else min(n, modal.n_modes)
    rows = []
    for k in range(n):
        lam = modal.eigenvalues[k]
        row = list(lead) + [
            "%d" % (k + 1), _fmt(lam.real), _fmt(lam.imag),
            _fmt(abs(lam.imag) / (2.0 * np.pi)),
            _fmt(modal.damping_ratio(k)),
        ]
        for name, share in modal.top_states(k, 3):
            row += [name, _fmt(share)]
        rows.append(row)
    return rows


_MODE_HEADER = ["mode", "re", "im", "f_hz", "damping",
                "state1", "part1", "state2", "part2", "state3", "part3"]


def _run_modes(ctx):
    modal = ctx.modal()
    top_n = ctx.cfg.option("modes", "top_n")
    rows = _mode_rows(modal, None if top_n is None else int(top_n))
    write_csv(ctx.path("modes.csv"), _MODE_HEADER, rows)
    ctx.add("modes", "modes.csv")
    ctx.results["spectral_abscissa"] = float(modal.eigenvalues.real.max())


def _run_poa(ctx):
    cfg = ctx.cfg
    kw = dict(f_min_hz=float(cfg.option("poa", "f_min_hz", 0.01)),
              f_max_hz=float(cfg.option("poa", "f_max_hz", 1000.0)),
              n_points=int(cfg.option("poa", "n_points", 400)))
    red = ctx.reduced()
    names = ctx.model.output_names
    channel = cfg.option("poa", "channel")
    if channel is None:
        curves = multiport_poa(red, **kw)
    else:
        idx = (names.index(channel) if isinstance(channel, str)
               else int(channel))
        curves = [poa(red, channel=idx, **kw)]
        names = [names[idx]]
    rows = np.column_stack([curves[0].freq_hz] + [c.mag for c in curves])
    write_csv(ctx.path("poa.csv"), ["f_hz"] + list(names), rows)
    ctx.add("poa", "poa.csv")
    for c, name in zip(curves, names):
        ctx.results["poa_peak_hz_%s" % name] = c.f_peak_hz
        ctx.results["poa_peak_mag_%s" % name] = c.m_peak


def _run_simulate(ctx):
    cfg = ctx.cfg
    t_end = float(cfg.option("simulate", "t_end", 3.0))
    dt = float(cfg.option("simulate", "dt", 1e-3))
    sig = parse_input_spec(cfg.option("simulate", "input"),
                           ctx.params.p_load)
    ctx.tolerances["simulate_newton_tol"] = 1e-9
    sim = simulate(ctx.model, t_end, dt, sig, op0=ctx.op)
    ctx.sim = sim
    m = ctx.model
    cols = [("t", sim.t), ("p_load", sim.w[:, 0])]
    cols += [(n, sim.outputs[:, j]) for j, n in enumerate(m.output_names)]
    for name in list(cfg.option("simulate", "signals") or []):
        cols.append((name, _resolve_signal(ctx, name, sim)))
    write_csv(ctx.path("trace.csv"), [n for n, _ in cols],
              np.column_stack([v for _, v in cols]))
    ctx.add("trace", "trace.csv")
    for j, name in enumerate(m.output_names):
        ctx.results["sim_final_%s" % name] = float(sim.outputs[-1, j])


def _run_spectrum(ctx):
    cfg = ctx.cfg
    if ctx.sim is None:
        _run_simulate(ctx)
    sim = ctx.sim
    name = cfg.option("spectrum", "signal", ctx.model.output_names[0])
    v = _resolve_signal(ctx, name, sim)
    t_a = float(cfg.option("spectrum", "t_a", sim.t[-1] / 2.0))
    t_b = float(cfg.option("spectrum", "t_b", sim.t[-1]))
    mask = (sim.t >= t_a - 1e-12) & (sim.t <= t_b + 1e-12)
    sp = spectrum(sim.t[mask], v[mask])
    write_csv(ctx.path("spectrum.csv"), ["f_hz", "magnitude"],
              np.column_stack([sp.freq_hz, sp.amplitude]))
    ctx.add("spectrum", "spectrum.csv")
    reliable = sp.freq_hz >= sp.min_reliable_hz
    if reliable.any():
        k = int(np.argmax(np.where(reliable, sp.amplitude, 0.0)))
        ctx.results["spectrum_peak_hz"] = float(sp.freq_hz[k])
        ctx.results["spectrum_peak_magnitude"] = float(sp.amplitude[k])


def _sweep_values(cfg):
    vals = cfg.option("sweep", "values")
    if vals is not None:
        return np.asarray([float(v) for v in vals], dtype=float)
    start, stop = cfg.option("sweep", "start"), cfg.option("sweep", "stop")
    if start is None or stop is None:
        raise ValueError("sweep needs either values or start and stop")
    num = int(cfg.option("sweep", "num", 9))
    spacing = cfg.option("sweep", "spacing", "linear")
    if spacing == "log":
        return np.geomspace(float(start), float(stop), num)
    if spacing == "linear":
        return np.linspace(float(start), float(stop), num)
    raise ValueError("sweep spacing must be linear or log, got %r" % spacing)


def _run_sweep(ctx):
    cfg = ctx.cfg
    path = cfg.option("sweep", "param")
    if not path:
        raise ValueError("sweep needs options.sweep.param (dotted path)")
    values = _sweep_values(cfg)
    top_k = int(cfg.option("sweep", "top_k", 6))
    build = _BUILDERS[cfg.topology]
    tag = path.replace(".", "_")

    # one full mode table per swept value
    import copy as _copy
    for i, v in enumerate(values):
        p = _copy.deepcopy(ctx.params)
        set_param(p, path, float(v))
        model = build(p)
        op = solve_equilibrium(model, [p.p_load])
        modal = modal_analysis(linearize(model, op))
        fname = "sweep_%s_%03d.csv" % (tag, i)
        write_csv(ctx.path(fname), ["value"] + _MODE_HEADER,
                  _mode_rows(modal, lead=(_fmt(v),)))
        ctx.add("sweep_value_%03d" % i, fname)

    res = sweep(path, values, base_params=ctx.params, build=build,
                top_k=top_k)
    traj_rows = []
    for i, v in enumerate(values):
        for k in range(top_k):
            lam = res.modes[i, k]
            mag = abs(lam)
            traj_rows.append([
                _fmt(v), "%d" % (k + 1), _fmt(lam.real), _fmt(lam.imag),
                _fmt(abs(lam.imag) / (2.0 * np.pi)),
                _fmt(1.0 if mag == 0.0 else -lam.real / mag),
                res.mode_labels[k],
            ])
    f_traj = "sweep_%s_trajectory.csv" % tag
    write_csv(ctx.path(f_traj),
              ["value", "mode", "re", "im", "f_hz", "damping", "label"],
              traj_rows)
    ctx.add("sweep_trajectory", f_traj)
    peak_rows = [[_fmt(v), _fmt(res.f_peak_hz[i]), _fmt(res.m_peak[i]),
                  "%d" % int(res.crossed_rhp[i])]
                 for i, v in enumerate(values)]
    f_peaks = "sweep_%s_peaks.csv" % tag
    write_csv(ctx.path(f_peaks),
              ["value", "f_peak_hz", "m_peak", "crossed_rhp"], peak_rows)
    ctx.add("sweep_peaks", f_peaks)
    ctx.results["sweep_crossed_rhp"] = int(res.crossed_rhp.any())


def _run_validate(ctx):
    cfg = ctx.cfg
    if cfg.topology != "sdcib":
        raise ValueError("validate-fullorder applies to the sdcib topology")
    p_from = float(cfg.option("validate-fullorder", "p_from", 0.5))
    p_to = float(cfg.option("validate-fullorder", "p_to", 0.6))
    t_step = float(cfg.option("validate-fullorder", "t_step", 0.5))
    t_end = float(cfg.option("validate-fullorder", "t_end", 1.5))
    dt = float(cfg.option("validate-fullorder", "dt", 5e-5))
    if t_end <= t_step:
        raise ValueError("t_end %g must exceed t_step %g" % (t_end, t_step))
    report = validate_reduction(params=ctx.params, p_from=p_from, p_to=p_to,
                                t_burn=t_step, t_run=t_end - t_step, dt=dt)
    det = report.details
    write_csv(ctx.path("validate_trace.csv"),
              ["t", "p_pcc_full", "p_pcc_reduced", "p_vsi_full",
               "p_vsi_reduced", "v_psu_full", "v_psu_reduced"],
              np.column_stack([det["t_full"], det["p_pcc_full"],
                               det["p_pcc_reduced"], det["p_vsi_full"],
                               det["p_vsi_reduced"], det["v_psu_a_full"],
                               det["v_psu_reduced"]]))
    ctx.add("validate_trace", "validate_trace.csv")
    window = det["t_full"] >= t_end - 0.4
    sp_f = spectrum(det["t_full"][window], det["v_psu_a_full"][window])
    sp_r = spectrum(det["t_reduced"][window], det["v_psu_reduced"][window])
    write_csv(ctx.path("validate_spectrum.csv"),
              ["f_hz", "v_psu_full", "v_psu_reduced"],
              np.column_stack([sp_f.freq_hz, sp_f.amplitude, sp_r.amplitude]))
    ctx.add("validate_spectrum", "validate_spectrum.csv")
    lines = [
        "switching-model validation of the reduced chain",
        "p_from %s  p_to %s  t_step %s  t_end %s  dt %s"
        % (_fmt(p_from), _fmt(p_to), _fmt(t_step), _fmt(t_end), _fmt(dt)),
        "",
        report.summary(),
        "",
        "max_dp_pcc %s" % _fmt(report.max_dp_pcc),
        "ripple_120_full %s" % _fmt(report.ripple_120_full),
        "ripple_120_reduced %s" % _fmt(report.ripple_120_reduced),
        "ripple_360_full %s" % _fmt(report.ripple_360_full),
        "ripple_360_reduced %s" % _fmt(report.ripple_360_reduced),
        "ratio_120 %s" % _fmt(report.ratio_120),
        "ratio_360 %s" % _fmt(report.ratio_360),
        "clamp_events %d" % report.clamp_events,
    ]
    _atomic_write(ctx.path("validate_report.txt"), "\n".join(lines) + "\n")
    ctx.add("validate_report", "validate_report.txt")
    ctx.tolerances["validate_threshold_dp"] = report.threshold_dp
    ctx.results["validate_max_dp_pcc"] = report.max_dp_pcc
    ctx.results["validate_ratio_120"] = report.ratio_120
    ctx.results["validate_ratio_360"] = report.ratio_360
    ctx.results["validate_clamp_events"] = report.clamp_events


def loop_table(params):
    """Per-loop (loop, kind, f_bw_hz, zeta, kp, ki) rows for a parameter set.

    Bandwidth and damping are recovered from the stored gains by inverting
    the loop tuning rules, so the table reflects whatever the parameters
    actually are, overridden or not.
    """
    p = getattr(params, "chain", params)
    w_b, fo = p.w_b, p.fullorder

    def volt(kp, ki, c):
        wn = np.sqrt(ki * w_b / c)
        return wn / (2.0 * np.pi), kp * w_b / (2.0 * wn * c)

    def curr(kp, ki, l, r):
        wn = np.sqrt(ki * w_b / l)
        return wn / (2.0 * np.pi), (kp + r) * w_b / (2.0 * wn * l)

    def pll(kp, ki):
        wn = np.sqrt(ki * w_b)
        return wn / (2.0 * np.pi), kp * w_b / (2.0 * wn)

    table = [
        ("pll", "pll", pll(p.afe.kp_pll, p.afe.ki_pll),
         p.afe.kp_pll, p.afe.ki_pll),
        ("afe_dc", "voltage", volt(p.afe.kp_dc, p.afe.ki_dc, p.afe.c_dc),
         p.afe.kp_dc, p.afe.ki_dc),
        ("afe_current", "current",
         curr(p.afe.kp_c, p.afe.ki_c, p.afe.l, p.afe.r),
         p.afe.kp_c, p.afe.ki_c),
        ("vsi_voltage", "voltage", volt(p.vsi.kp_v, p.vsi.ki_v, p.vsi.c),
         p.vsi.kp_v, p.vsi.ki_v),
        ("vsi_current", "current",
         curr(p.vsi.kp_c, p.vsi.ki_c, p.vsi.l, p.vsi.r),
         p.vsi.kp_c, p.vsi.ki_c),
        ("psu_voltage", "voltage", volt(p.psu.kp_v, p.psu.ki_v, p.psu.c),
         p.psu.kp_v, p.psu.ki_v),
        ("dcdc_voltage", "voltage", volt(p.dcdc.kp_v, p.dcdc.ki_v, p.dcdc.c),
         p.dcdc.kp_v, p.dcdc.ki_v),
        ("psu_current", "current",
         curr(fo.kp_c_psu, fo.ki_c_psu, fo.l_psu, p.psu.r),
         fo.kp_c_psu, fo.ki_c_psu),
        ("dcdc_current", "current",
         curr(fo.kp_c_eq, fo.ki_c_eq, fo.l_eq, fo.r_eq),
         fo.kp_c_eq, fo.ki_c_eq),
    ]
    return [(loop, kind, f_bw, zeta, kp, ki)
            for loop, kind, (f_bw, zeta), kp, ki in table]


def _run_tune(ctx):
    rows = [[loop, kind, _fmt(f_bw), _fmt(zeta), _fmt(kp), _fmt(ki)]
            for loop, kind, f_bw, zeta, kp, ki in loop_table(ctx.params)]
    write_csv(ctx.path("gains.csv"),
              ["loop", "kind", "f_bw_hz", "zeta", "kp", "ki"], rows)
    ctx.add("gains", "gains.csv")


_ANALYSIS_FNS = {
    "modes": _run_modes,
    "poa": _run_poa,
    "simulate": _run_simulate,
    "spectrum": _run_spectrum,
    "sweep": _run_sweep,
    "validate-fullorder": _run_validate,
    "tune": _run_tune,
}


def _package_versions():
    import platform
    import scipy
    try:
        from . import __version__ as pkg_version
    except ImportError:
        pkg_version = "unknown"
    return [("dcchain", pkg_version),
            ("python", platform.python_version()),
            ("numpy", np.__version__),
            ("scipy", scipy.__version__)]


def _write_manifest(ctx):
    cfg = ctx.cfg
    lines = ["[run]", "topology %s" % cfg.topology,
             "analyses %s" % ",".join(cfg.analyses)]
    for path, val in sorted(cfg.overrides.items()):
        lines.append("override %s %s" % (path, _fmt(val)))
    lines += ["", "[versions]"]
    lines += ["%s %s" % (n, v) for n, v in _package_versions()]
    lines += ["", "[tolerances]"]
    lines += ["%s %s" % (n, _fmt(ctx.tolerances[n]))
              for n in sorted(ctx.tolerances)]
    lines += ["", "[parameters]"]
    lines += ["%s %s" % (dotted, _fmt(val))
              for dotted, val in _config.effective_params(ctx.params)]
    lines += ["", "[results]"]
    for name, val in ctx.results.items():
        text = "%d" % val if isinstance(val, (int, np.integer)) else _fmt(val)
        lines.append("%s %s" % (name, text))
    lines += ["", "[artifacts]"]
    lines += sorted(ctx.artifacts.values())
    _atomic_write(ctx.path("run_manifest.txt"), "\n".join(lines) + "\n")


def _wrapped(name, fn, ctx):
    try:
        fn(ctx)
    except RunError:
        raise
    except Exception as exc:
        raise RunError("analysis %r failed (%s: %s)"
                       % (name, type(exc).__name__, exc)) from exc


def run(cfg, out_dir=None):
    """Execute the configured analyses; returns {artifact key: path}.

    The equilibrium is always solved first whatever the analysis list says;
    remaining analyses run in their configured order. A spectrum without a
    prior simulation triggers the simulation. Every run ends with
    run_manifest.txt listing parameters, tolerances, versions, headline
    results, and the artifact inventory.
    """
    out = out_dir if out_dir else cfg.out_dir
    os.makedirs(out, exist_ok=True)
    ctx = _RunContext(cfg, out)
    try:
        ctx.params, ctx.model = build_scenario(cfg)
    except Exception as exc:
        raise RunError("scenario construction failed (%s: %s)"
                       % (type(exc).__name__, exc)) from exc
    _wrapped("equilibrium", _run_equilibrium, ctx)
    for analysis in cfg.analyses:
        if analysis == "equilibrium":
            continue
        if analysis == "simulate" and ctx.sim is not None:
            continue
        _wrapped(analysis, _ANALYSIS_FNS[analysis], ctx)
    _write_manifest(ctx)
    ctx.add("manifest", "run_manifest.txt")
    return {k: os.path.join(out, v) for k, v in ctx.artifacts.items()}


# ---------------------------------------------------------------------------
# figure recipes


def _figure_chain_params():
    """Chain defaults with the inverter voltage loop retuned to 80 Hz.

    The bundled reference mode table and amplification-peak values
    correspond to this setting rather than to the 100 Hz default, so the
    figure recipes use it as their base.
    """
    p = ChainParams()
    set_param(p, "vsi.v_bw_hz", 80.0)
    return p


def _solve_reduced(params, build=build_sdcib):
    model = build(params)
    op = solve_equilibrium(model, [params.p_load])
    return model, op, linearize(model, op)


def _fig4(out, params):
    if params is None:
        params = _figure_chain_params()
    report = validate_reduction(params=params, p_from=0.5, p_to=0.6,
                                t_burn=0.5, t_run=1.0, dt=5e-5)
    det = report.details
    write_csv(os.path.join(out, "fig4_trace.csv"),
              ["t", "p_pcc_full", "p_pcc_reduced", "p_vsi_full",
               "p_vsi_reduced", "v_psu_full", "v_psu_reduced"],
              np.column_stack([det["t_full"], det["p_pcc_full"],
                               det["p_pcc_reduced"], det["p_vsi_full"],
                               det["p_vsi_reduced"], det["v_psu_a_full"],
                               det["v_psu_reduced"]]))
    window = det["t_full"] >= det["t_full"][-1] - 0.4
    sp_f = spectrum(det["t_full"][window], det["v_psu_a_full"][window])
    sp_r = spectrum(det["t_reduced"][window], det["v_psu_reduced"][window])
    write_csv(os.path.join(out, "fig4_spectrum.csv"),
              ["f_hz", "v_psu_full", "v_psu_reduced"],
              np.column_stack([sp_f.freq_hz, sp_f.amplitude, sp_r.amplitude]))
    _atomic_write(os.path.join(out, "fig4_report.txt"),
                  report.summary() + "\n")
    return {"fig4_trace": "fig4_trace.csv",
            "fig4_spectrum": "fig4_spectrum.csv",
            "fig4_report": "fig4_report.txt"}


_FIG5_SWEEPS = (
    ("bw", "vsi.v_bw_hz",
     (100.0, 90.0, 80.0, 70.0, 60.0, 50.0, 40.0, 30.0), ChainParams),
    ("load", "p_load",
     (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0), _figure_chain_params),
    ("scr", "grid.scr",
     (5.234, 4.5, 4.0, 3.5, 3.0, 2.5, 2.0), _figure_chain_params),
)


def _fig5(out, params):
    import copy as _copy
    artifacts = {}
    for tag, path, values, make_base in _FIG5_SWEEPS:
        base = params if params is not None else make_base()
        res = sweep(path, np.asarray(values), base_params=base, top_k=6)
        rows = []
        for i, v in enumerate(values):
            for k in range(6):
                lam = res.modes[i, k]
                mag = abs(lam)
                rows.append([
                    _fmt(v), "%d" % (k + 1), _fmt(lam.real), _fmt(lam.imag),
                    _fmt(abs(lam.imag) / (2.0 * np.pi)),
                    _fmt(1.0 if mag == 0.0 else -lam.real / mag),
                    res.mode_labels[k],
                ])
        f_traj = "fig5_%s_trajectory.csv" % tag
        write_csv(os.path.join(out, f_traj),
                  ["value", "mode", "re", "im", "f_hz", "damping", "label"],
                  rows)
        artifacts["fig5_%s_trajectory" % tag] = f_traj

        mags, freqs = [], None
        for v in values:
            p = _copy.deepcopy(base)
            set_param(p, path, float(v))
            _, _, red = _solve_reduced(p)
            pk = poa(red, n_points=200, refine=False)
            freqs = pk.freq_hz
            mags.append(pk.mag)
        f_poa = "fig5_%s_poa.csv" % tag
        write_csv(os.path.join(out, f_poa),
                  ["f_hz"] + ["m_%g" % v for v in values],
                  np.column_stack([freqs] + mags))
        artifacts["fig5_%s_poa" % tag] = f_poa
    return artifacts


def _fig6(out, params):
    if params is None:
        params = _figure_chain_params()
    model, op, red = _solve_reduced(params)
    pk = poa(red)
    write_csv(os.path.join(out, "fig6_poa.csv"),
              ["f_hz", "p_pcc"], np.column_stack([pk.freq_hz, pk.mag]))
    f_pk = pk.f_peak_hz
    sig = InputSignal.sine(params.p_load, 0.05, 0.5 * f_pk, t_on=5.0,
                           segments=[(15.0, f_pk), (25.0, 2.0 * f_pk)])
    sim = simulate(model, 35.0, 1e-3, sig, op0=op)
    write_csv(os.path.join(out, "fig6_sine.csv"),
              ["t", "p_load", "p_pcc"],
              np.column_stack([sim.t, sim.w[:, 0], sim.channel("p_pcc")]))
    return {"fig6_poa": "fig6_poa.csv", "fig6_sine": "fig6_sine.csv"}


def _fig7(out, params):
    if params is None:
        params = _figure_chain_params()
    trace = synthetic_gpu_trace(duration=100.0, dt=0.1, mean=0.5, peak=0.85,
                                seed=0)
    model = build_sdcib(params)
    sig = InputSignal.trace(trace.t, trace.p)
    sim = simulate(model, 100.0, 1e-3, sig, store_every=5)
    write_csv(os.path.join(out, "fig7_trace.csv"),
              ["t", "p_load", "p_pcc"],
              np.column_stack([sim.t, sim.w[:, 0], sim.channel("p_pcc")]))
    mask = sim.t >= 50.0
    sp_load = spectrum(sim.t[mask], sim.w[mask, 0])
    sp_pcc = spectrum(sim.t[mask], sim.channel("p_pcc")[mask])
    write_csv(os.path.join(out, "fig7_spectrum.csv"),
              ["f_hz", "p_load", "p_pcc"],
              np.column_stack([sp_load.freq_hz, sp_load.amplitude,
                               sp_pcc.amplitude]))
    return {"fig7_trace": "fig7_trace.csv",
            "fig7_spectrum": "fig7_spectrum.csv"}


def _device_groups(model):
    """Masks over the state vector for each nine-bus device group."""
    groups = {}
    taken = np.zeros(model.n_x, dtype=bool)
    for name in ("sm", "gfm", "gfl"):
        xs, _ = model.block_slice(name)
        mask = np.zeros(model.n_x, dtype=bool)
        mask[xs] = True
        groups[name] = mask
        taken |= mask
    groups["dc"] = ~taken
    return groups


def _fig9(out, params):
    from .params import NineBusParams
    if params is None:
        params = NineBusParams()
    model, op, red = _solve_reduced(params, build=build_ninebus)
    modal = modal_analysis(red)
    groups = _device_groups(model)
    rows = []
    for k in range(modal.n_modes):
        lam = modal.eigenvalues[k]
        disp = modal.participation_display(k)
        rows.append([
            "%d" % (k + 1), _fmt(lam.real), _fmt(lam.imag),
            _fmt(abs(lam.imag) / (2.0 * np.pi)),
            _fmt(modal.damping_ratio(k)),
            _fmt(disp[groups["sm"]].sum()), _fmt(disp[groups["gfm"]].sum()),
            _fmt(disp[groups["gfl"]].sum()), _fmt(disp[groups["dc"]].sum()),
        ])
    write_csv(os.path.join(out, "fig9_modes.csv"),
              ["mode", "re", "im", "f_hz", "damping",
               "part_sm", "part_gfm", "part_gfl", "part_dc"], rows)
    return {"fig9_modes": "fig9_modes.csv"}


def _fig10(out, params):
    from .params import NineBusParams
    if params is None:
        params = NineBusParams()
    model, op, red = _solve_reduced(params, build=build_ninebus)
    curves = multiport_poa(red, n_points=400)
    write_csv(os.path.join(out, "fig10_poa.csv"),
              ["f_hz"] + list(model.output_names),
              np.column_stack([curves[0].freq_hz] + [c.mag for c in curves]))
    return {"fig10_poa": "fig10_poa.csv"}


def _fig11(out, params):
    from .params import NineBusParams
    if params is None:
        params = NineBusParams()
    trace = synthetic_gpu_trace(duration=100.0, dt=0.1, mean=0.5, peak=0.85,
                                seed=0)
    model = build_ninebus(params)
    t0 = 90.0
    sig = InputSignal.trace(trace.t - t0, trace.p)
    sim = simulate(model, 10.0, 1e-3, sig)
    cols = [sim.t + t0, sim.w[:, 0]]
    cols += [sim.channel(n) for n in model.output_names]
    write_csv(os.path.join(out, "fig11_trace.csv"),
              ["t", "p_load"] + list(model.output_names),
              np.column_stack(cols))
    return {"fig11_trace": "fig11_trace.csv"}


_FIGURES = {"fig4": _fig4, "fig5": _fig5, "fig6": _fig6, "fig7": _fig7,
            "fig9": _fig9, "fig10": _fig10, "fig11": _fig11}


def fig_repro(figure, out_dir, params=None):
    """Produce the data series behind one named figure recipe.

    figure is one of fig4, fig5, fig6, fig7, fig9, fig10, fig11. Writes the
    recipe's CSV bundle into out_dir and returns {artifact key: path}.
    Passing params overrides the recipe's base parameter set.
    """
    key = figure if str(figure).startswith("fig") else "fig%s" % figure
    if key not in _FIGURES:
        raise ValueError("unknown figure %r (choose from %s)"
                         % (figure, ", ".join(sorted(_FIGURES))))
    os.makedirs(out_dir, exist_ok=True)
    try:
        artifacts = _FIGURES[key](out_dir, params)
    except Exception as exc:
        raise RunError("figure recipe %r failed (%s: %s)"
                       % (key, type(exc).__name__, exc)) from exc
    return {k: os.path.join(out_dir, v) for k, v in artifacts.items()}
