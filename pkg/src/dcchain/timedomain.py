"""Fixed-step implicit time integration and spectral post-processing.

The integrator is trapezoidal in the differential states with the algebraic
constraints enforced at every accepted step. Newton corrections reuse a
factored iteration matrix; the matrix is rebuilt when convergence degrades
and the step is split in half (recursively) when Newton still fails.
"""

from dataclasses import dataclass, field
import warnings as _warnings

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from . import equilibrium as _eq
from . import smallsignal as _ss


class InputSignal:
    """Scalar exogenous input as a function of time.

    Factories: constant, step, sine (piecewise frequency schedule with
    continuous phase), trace (linear interpolation, endpoints held).
    """

    def __init__(self, fn, description=""):
        self._fn = fn
        self.description = description

    def __call__(self, t):
        return float(self._fn(t))

    @classmethod
    def constant(cls, value):
        return cls(lambda t: value, "constant %g" % value)

    @classmethod
    def step(cls, t0, v_from, v_to):
        return cls(lambda t: v_to if t >= t0 else v_from,
                   "step %g->%g at t=%gs" % (v_from, v_to, t0))

    @classmethod
    def sine(cls, base, amp, freq_hz, t_on=0.0, segments=None):
        """Sine about a base value, off before t_on.

        segments: optional [(t_switch, freq_hz), ...] sorted by time; at each
        switch the frequency changes with the accumulated phase carried over,
        so the waveform stays continuous.
        """
        starts = [t_on]
        freqs = [freq_hz]
        phases = [0.0]
        for (t_sw, f_new) in (segments or []):
            phases.append(phases[-1]
                          + 2.0 * np.pi * freqs[-1] * (t_sw - starts[-1]))
            starts.append(t_sw)
            freqs.append(f_new)
        starts_a = np.asarray(starts)

        def fn(t):
            if t < t_on:
                return base
            k = int(np.searchsorted(starts_a, t, side="right") - 1)
            ph = phases[k] + 2.0 * np.pi * freqs[k] * (t - starts[k])
            return base + amp * np.sin(ph)

        return cls(fn, "sine base %g amp %g f %g Hz" % (base, amp, freq_hz))

    @classmethod
    def trace(cls, t, v):
        t = np.asarray(t, dtype=float)
        v = np.asarray(v, dtype=float)
        if t.size != v.size or t.size < 2:
            raise ValueError("trace needs matching t, v arrays of length >= 2")
        if np.any(np.diff(t) <= 0):
            raise ValueError("trace times must be strictly increasing")
        return cls(lambda tt: np.interp(tt, t, v),
                   "trace of %d samples" % t.size)


@dataclass
class SimResult:
    """Stored trajectory plus integrator diagnostics."""
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    outputs: np.ndarray
    output_names: list
    diagnostics: dict = field(default_factory=dict)

    def channel(self, name):
        return self.outputs[:, self.output_names.index(name)]


def _input_vector(inputs, t, n_w):
    return np.array([inputs[j](t) for j in range(n_w)])


def _step_matrix(model, x, y, w, dt):
    op = _eq.OperatingPoint(x=x, y=y, w=w)
    jac = _ss.jacobians(model, op)
    n_x, n_y = x.size, y.size
    m = np.zeros((n_x + n_y, n_x + n_y))
    m[:n_x, :n_x] = np.eye(n_x) - 0.5 * dt * jac.fx
    m[:n_x, n_x:] = -0.5 * dt * jac.fy
    m[n_x:, :n_x] = jac.gx
    m[n_x:, n_x:] = jac.gy
    return m


class _Stepper:
    """One trapezoidal step with frozen-Jacobian Newton and refactoring."""

    def __init__(self, model, newton_tol, max_newton):
        self.model = model
        self.newton_tol = newton_tol
        self.max_newton = max_newton
        self.lu = None
        self.lu_dt = None
        self.newton_total = 0
        self.newton_max = 0
        self.refactors = 0
        self.substeps = 0
        self.max_g_inf = 0.0

    def factor(self, x, y, w, dt):
        self.lu = lu_factor(_step_matrix(self.model, x, y, w, dt))
        self.lu_dt = dt
        self.refactors += 1

    def _newton(self, x_n, y_n, w_n, w_np, dt):
        n_x = x_n.size
        f_n, _ = self.model.residual(x_n, y_n, w_n)
        x, y = x_n.copy(), y_n.copy()
        for it in range(1, self.max_newton + 1):
            f_c, g_c = self.model.residual(x, y, w_np)
            res = np.concatenate([x - x_n - 0.5 * dt * (f_n + f_c), g_c])
            nrm = np.abs(res).max()
            if nrm <= self.newton_tol:
                self.newton_total += it
                self.newton_max = max(self.newton_max, it)
                return x, y, True
            dz = lu_solve(self.lu, -res)
            x = x + dz[:n_x]
            y = y + dz[n_x:]
        return x, y, False

    def advance(self, x_n, y_n, t_n, dt, inputs, n_w, depth=0):
        w_n = _input_vector(inputs, t_n, n_w)
        w_np = _input_vector(inputs, t_n + dt, n_w)
        if self.lu is None or self.lu_dt != dt:
            self.factor(x_n, y_n, w_n, dt)
        x, y, ok = self._newton(x_n, y_n, w_n, w_np, dt)
        if not ok:
            self.factor(x_n, y_n, w_n, dt)
            x, y, ok = self._newton(x_n, y_n, w_n, w_np, dt)
        if not ok:
            if depth >= 12:
                raise RuntimeError(
                    "Newton failed at t=%.6f even at dt=%.3e" % (t_n, dt))
            self.substeps += 1
            x_h, y_h = self.advance(x_n, y_n, t_n, 0.5 * dt, inputs, n_w,
                                    depth + 1)
            x, y = self.advance(x_h, y_h, t_n + 0.5 * dt, 0.5 * dt, inputs,
                                n_w, depth + 1)
            self.factor(x, y, w_np, dt)
        return x, y


def simulate(model, t_end, dt, inputs, op0=None, store_every=1,
             newton_tol=1e-9, max_newton=16):
    """Integrate the model from an operating point under time-varying inputs.

    inputs is one InputSignal per input channel (a single signal is accepted
    for single-input models). If op0 is omitted the equilibrium at the t=0
    input value is solved first. Samples every store_every steps are kept.
    The algebraic residual of every stored sample is checked against 1e-8.
    """
    if isinstance(inputs, InputSignal):
        inputs = [inputs]
    if len(inputs) != model.n_w:
        raise ValueError("expected %d input signals, got %d"
                         % (model.n_w, len(inputs)))
    if op0 is None:
        op0 = _eq.solve_equilibrium(model, _input_vector(inputs, 0.0, model.n_w))

    n_steps = int(round(t_end / dt))
    stepper = _Stepper(model, newton_tol, max_newton)
    x, y = op0.x.copy(), op0.y.copy()

    keep = list(range(0, n_steps + 1, store_every))
    if keep[-1] != n_steps:
        keep.append(n_steps)
    t_out = np.empty(len(keep))
    x_out = np.empty((len(keep), model.n_x))
    y_out = np.empty((len(keep), model.n_y))
    w_out = np.empty((len(keep), model.n_w))
    h_out = np.empty((len(keep), model.n_h))

    def store(slot, step, xx, yy):
        tt = step * dt
        ww = _input_vector(inputs, tt, model.n_w)
        t_out[slot] = tt
        x_out[slot] = xx
        y_out[slot] = yy
        w_out[slot] = ww
        h_out[slot] = model.output(xx, yy, ww)
        g_inf = np.abs(model.residual(xx, yy, ww)[1]).max() if model.n_y else 0.0
        stepper.max_g_inf = max(stepper.max_g_inf, g_inf)

    slot = 0
    store(slot, 0, x, y)
    slot += 1
    for n in range(n_steps):
        x, y = stepper.advance(x, y, n * dt, dt, inputs, model.n_w)
        if slot < len(keep) and keep[slot] == n + 1:
            store(slot, n + 1, x, y)
            slot += 1

    if stepper.max_g_inf > 1e-8:
        _warnings.warn("algebraic residual reached %.3e (> 1e-8)"
                       % stepper.max_g_inf)

    diag = {
        "newton_total": stepper.newton_total,
        "newton_max": stepper.newton_max,
        "refactors": stepper.refactors,
        "substeps": stepper.substeps,
        "max_g_inf": stepper.max_g_inf,
        "dt": dt,
        "steps": n_steps,
    }
    return SimResult(t=t_out, x=x_out, y=y_out, w=w_out, outputs=h_out,
                     output_names=list(model.output_names), diagnostics=diag)


@dataclass
class Spectrum:
    """Single-sided amplitude spectrum of a uniformly sampled record."""
    freq_hz: np.ndarray
    amplitude: np.ndarray
    min_reliable_hz: float

    def amplitude_at(self, f0):
        """Amplitude of the bin nearest f0 (bin spacing limits resolution)."""
        return float(self.amplitude[int(np.argmin(np.abs(self.freq_hz - f0)))])


def spectrum(t, v, detrend=True):
    """Hann-windowed single-sided amplitude spectrum.

    Normalized so a pure tone of amplitude a reports a at its bin.
    Frequencies below min_reliable_hz (four periods in the record) are kept
    but should not be trusted.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    if t.size != v.size or t.size < 8:
        raise ValueError("need matching t, v with at least 8 samples")
    dts = np.diff(t)
    if np.abs(dts - dts[0]).max() > 1e-9 * max(dts[0], 1e-12):
        raise ValueError("samples must be uniform in time")
    dt = dts[0]
    x = v - v.mean() if detrend else v.copy()
    win = np.hanning(x.size)
    amp = 2.0 * np.abs(np.fft.rfft(win * x)) / win.sum()
    amp[0] *= 0.5
    freq = np.fft.rfftfreq(x.size, dt)
    span = t[-1] - t[0]
    return Spectrum(freq_hz=freq, amplitude=amp,
                    min_reliable_hz=4.0 / span if span > 0 else np.inf)


def tone_amplitude(t, v, f0, periods=None):
    """Amplitude of the f0 component by complex demodulation.

    Uses an integer number of periods from the end of the record (all that
    fit unless periods is given). Warns when fewer than 4 periods fit.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    span = t[-1] - t[0]
    n_fit = int(np.floor(span * f0))
    if periods is not None:
        n_fit = min(n_fit, int(periods))
    if n_fit < 1:
        raise ValueError("record holds less than one period of %g Hz" % f0)
    if n_fit < 4:
        _warnings.warn("only %d periods of %g Hz in record; estimate is rough"
                       % (n_fit, f0))
    t_start = t[-1] - n_fit / f0
    sel = t >= t_start - 1e-12
    ts, vs = t[sel], v[sel]
    vs = vs - vs.mean()
    demod = vs * np.exp(-2j * np.pi * f0 * ts)
    return float(2.0 * np.abs(np.trapezoid(demod, ts) / (ts[-1] - ts[0])))


def energy_balance(sim, model):
    """Pointwise power audit for the chain topology.

    Returns a dict of time series: input power at the grid interface, total
    consumed load power, resistive losses, and the time derivative of stored
    energy. In a consistent run p_in - p_load - p_loss tracks d(storage)/dt.
    """
    p = model.params
    xi = model.x_index
    t = sim.t
    x = sim.x

    def s(name):
        return x[:, xi.index(name)]

    i_dq2 = s("i_d_afe") ** 2 + s("i_q_afe") ** 2
    i_cv2 = s("i_u_cv") ** 2 + s("i_v_cv") ** 2
    v_uv2 = s("v_u_vsi") ** 2 + s("v_v_vsi") ** 2
    g_eq = sim.y[:, model.y_index.index("g_eq_psu")]

    w_b = p.w_b
    storage = (p.afe.l / (2 * w_b) * i_dq2
               + p.vsi.l / (2 * w_b) * i_cv2
               + p.vsi.c / (2 * w_b) * v_uv2
               + p.afe.c_dc / (2 * w_b) * s("v_dc_ups") ** 2
               + 3.0 * p.psu.c / (2 * w_b) * s("v_psu") ** 2
               + 3.0 * p.dcdc.c / (2 * w_b) * s("v_eq") ** 2)
    p_loss = (p.afe.r * i_dq2 + p.vsi.r * i_cv2
              + p.psu.r * g_eq ** 2 * v_uv2)
    g_load = sim.w[:, 0] / (3.0 * p.dcdc.v_ref ** 2)
    p_load = 3.0 * g_load * s("v_eq") ** 2
    p_in = sim.outputs[:, sim.output_names.index("p_pcc")]
    # also the grid-side series loss between the stiff source and the PCC
    i_ri2 = (sim.y[:, model.y_index.index("i_r_afe")] ** 2
             + sim.y[:, model.y_index.index("i_i_afe")] ** 2)
    d_storage = np.gradient(storage, t)
    return {
        "t": t,
        "p_in": p_in,
        "p_load": p_load,
        "p_loss": p_loss,
        "storage": storage,
        "d_storage_dt": d_storage,
        "grid_loss": p.grid.r * i_ri2,
        "imbalance": p_in - p_load - p_loss - d_storage,
    }
