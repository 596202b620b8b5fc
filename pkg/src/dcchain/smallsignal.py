"""Small-signal machinery: linearization, modal analysis, output-admittance curves.

The DAE is linearized about an operating point and reduced to an explicit
state-space (A, b, c, d) by eliminating the algebraic variables. Everything
downstream (eigenvalues, participation factors, residues, frequency-response
peaks, parameter sweeps) works on that reduced form.
"""

from dataclasses import dataclass, field
import copy

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import numdiff
from .params import set_param


@dataclass
class Jacobians:
    """First-order partials of (f, g, h) with respect to (x, y, w)."""
    fx: np.ndarray
    fy: np.ndarray
    gx: np.ndarray
    gy: np.ndarray
    fw: np.ndarray
    gw: np.ndarray
    hx: np.ndarray
    hy: np.ndarray
    hw: np.ndarray


@dataclass
class ReducedSystem:
    """Explicit small-signal model dx = A x + b w, h = c x + d w."""
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    state_names: list
    input_names: list
    output_names: list

    @property
    def n_x(self):
        return self.a.shape[0]

    def transfer(self, s, i_out=0, i_in=0):
        """Transfer function value c (sI - A)^-1 b + d at complex frequency s."""
        rhs = np.linalg.solve(s * np.eye(self.n_x) - self.a, self.b[:, i_in])
        return self.c[i_out] @ rhs + self.d[i_out, i_in]


@dataclass
class ModalResult:
    """Eigenstructure of a reduced model, sorted by |Re| ascending."""
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    participation: np.ndarray
    state_names: list
    residues: np.ndarray = None
    d_term: np.ndarray = None
    warnings: list = field(default_factory=list)

    @property
    def n_modes(self):
        return self.eigenvalues.size

    def freq_hz(self, k):
        return abs(self.eigenvalues[k].imag) / (2.0 * np.pi)

    def damping_ratio(self, k):
        lam = self.eigenvalues[k]
        mag = abs(lam)
        return 1.0 if mag == 0.0 else -lam.real / mag

    def participation_display(self, k):
        """|rho| normalized to sum to one over states, for reporting."""
        col = np.abs(self.participation[:, k])
        tot = col.sum()
        return col / tot if tot > 0.0 else col

    def top_states(self, k, count=3):
        disp = self.participation_display(k)
        order = np.argsort(-disp)[:count]
        return [(self.state_names[i], float(disp[i])) for i in order]


def jacobians(model, op):
    """Central-difference partials of the model residual and outputs at op."""
    x0, y0, w0 = op.x, op.y, op.w
    n_x, n_y, n_w = x0.size, y0.size, w0.size

    def f_of_x(x):
        return model.residual(x, y0, w0)[0]

    def g_of_x(x):
        return model.residual(x, y0, w0)[1]

    def f_of_y(y):
        return model.residual(x0, y, w0)[0]

    def g_of_y(y):
        return model.residual(x0, y, w0)[1]

    def f_of_w(w):
        return model.residual(x0, y0, w)[0]

    def g_of_w(w):
        return model.residual(x0, y0, w)[1]

    fx = numdiff.jacobian(f_of_x, x0)
    gx = numdiff.jacobian(g_of_x, x0)
    fy = numdiff.jacobian(f_of_y, y0)
    gy = numdiff.jacobian(g_of_y, y0)
    fw = numdiff.jacobian(f_of_w, w0).reshape(n_x, n_w)
    gw = numdiff.jacobian(g_of_w, w0).reshape(n_y, n_w)
    hx = numdiff.jacobian(lambda x: model.output(x, y0, w0), x0)
    hy = numdiff.jacobian(lambda y: model.output(x0, y, w0), y0)
    hw = numdiff.jacobian(lambda w: model.output(x0, y0, w), w0)
    return Jacobians(fx, fy, gx, gy, fw, gw, hx, hy, hw)


def reduce(model, jac):
    """Eliminate the algebraic variables to get the explicit (A, b, c, d)."""
    try:
        gy_gx = np.linalg.solve(jac.gy, jac.gx)
        gy_gw = np.linalg.solve(jac.gy, jac.gw)
    except np.linalg.LinAlgError:
        raise np.linalg.LinAlgError(
            "algebraic Jacobian g_y is singular; the model is not index-1 "
            "at this operating point")
    a = jac.fx - jac.fy @ gy_gx
    b = jac.fw - jac.fy @ gy_gw
    c = jac.hx - jac.hy @ gy_gx
    d = jac.hw - jac.hy @ gy_gw
    return ReducedSystem(a, b, c, d,
                         state_names=model.x_index.names,
                         input_names=list(model.w_names),
                         output_names=list(model.output_names))


def linearize(model, op):
    """jacobians + reduce in one call."""
    return reduce(model, jacobians(model, op))


def _sort_modes(lam):
    return np.lexsort((-lam.imag, np.abs(lam.real)))


def modal_analysis(red, cond_warn=1e8):
    """Eigenvalues, biorthonormal left/right vectors, participation, residues.

    Participation rho[i, k] = l_k[i] * r_k[i] with l_k^T r_k = 1, so each
    column sums to one exactly; reporting uses |rho| renormalized over states.
    Residues are per output channel for input channel 0.
    A right-vector matrix with condition number above cond_warn flags the
    eigenbasis as close to defective.
    """
    a = red.a if isinstance(red, ReducedSystem) else np.asarray(red)
    lam, right = np.linalg.eig(a)
    order = _sort_modes(lam)
    lam = lam[order]
    right = right[:, order]
    left = np.linalg.inv(right)

    warnings_ = []
    cond = np.linalg.cond(right)
    if cond > cond_warn:
        warnings_.append(
            "eigenbasis condition number %.3e exceeds %.1e; "
            "modes may be near-defective and participation unreliable"
            % (cond, cond_warn))

    participation = left.T * right

    residues = None
    d_term = None
    names = None
    if isinstance(red, ReducedSystem):
        names = red.state_names
        residues = np.empty((red.c.shape[0], lam.size), dtype=complex)
        for k in range(lam.size):
            residues[:, k] = (red.c @ right[:, k]) * (left[k] @ red.b[:, 0])
        d_term = red.d[:, 0].astype(complex)
    if names is None:
        names = ["x%d" % i for i in range(a.shape[0])]

    return ModalResult(eigenvalues=lam, right=right, left=left,
                       participation=participation, state_names=names,
                       residues=residues, d_term=d_term, warnings=warnings_)


@dataclass
class PoaResult:
    """Magnitude of one output channel over frequency, with the resolved peak."""
    freq_hz: np.ndarray
    mag: np.ndarray
    f_peak_hz: float
    m_peak: float
    unbounded: bool = False
    channel: int = 0


def poa(red, channel=0, f_min_hz=0.01, f_max_hz=1000.0, n_points=400,
        refine=True):
    """Output-sensitivity magnitude |c (jw I - A)^-1 b + d| over a log grid.

    The grid peak is refined by golden-section search in log frequency. If an
    eigenvalue sits on the imaginary axis (real part within 1e-9) and
    actually couples into this channel (residue above 1e-10 relative), the
    response magnitude diverges at that mode's frequency and the result is
    flagged unbounded. Poles strictly off the axis, on either side, leave
    the frequency response finite and are reported as-is.
    """
    modal = modal_analysis(red)
    res_row = np.abs(modal.residues[channel])
    scale = max(res_row.max(), 1.0)
    undamped = [k for k in range(modal.n_modes)
                if abs(modal.eigenvalues[k].real) <= 1e-9
                and res_row[k] > 1e-10 * scale]
    freqs = np.logspace(np.log10(f_min_hz), np.log10(f_max_hz), n_points)
    mags = np.array([abs(red.transfer(2j * np.pi * fh, i_out=channel))
                     for fh in freqs])
    if undamped:
        k = undamped[int(np.argmax(res_row[undamped]))]
        f_star = abs(modal.eigenvalues[k].imag) / (2.0 * np.pi)
        return PoaResult(freq_hz=freqs, mag=mags, f_peak_hz=f_star,
                         m_peak=np.inf, unbounded=True, channel=channel)

    ipk = int(np.argmax(mags))
    f_peak, m_peak = freqs[ipk], mags[ipk]
    if refine:
        lo = np.log10(freqs[max(ipk - 1, 0)])
        hi = np.log10(freqs[min(ipk + 1, n_points - 1)])
        gr = (np.sqrt(5.0) - 1.0) / 2.0
        a_, b_ = lo, hi
        c_ = b_ - gr * (b_ - a_)
        d_ = a_ + gr * (b_ - a_)
        fc = abs(red.transfer(2j * np.pi * 10.0 ** c_, i_out=channel))
        fd = abs(red.transfer(2j * np.pi * 10.0 ** d_, i_out=channel))
        for _ in range(200):
            if b_ - a_ < 1e-13:
                break
            if fc > fd:
                b_, d_, fd = d_, c_, fc
                c_ = b_ - gr * (b_ - a_)
                fc = abs(red.transfer(2j * np.pi * 10.0 ** c_, i_out=channel))
            else:
                a_, c_, fc = c_, d_, fd
                d_ = a_ + gr * (b_ - a_)
                fd = abs(red.transfer(2j * np.pi * 10.0 ** d_, i_out=channel))
        f_ref = 10.0 ** ((a_ + b_) / 2.0)
        m_ref = abs(red.transfer(2j * np.pi * f_ref, i_out=channel))
        if m_ref >= m_peak:
            f_peak, m_peak = f_ref, m_ref
    return PoaResult(freq_hz=freqs, mag=mags, f_peak_hz=float(f_peak),
                     m_peak=float(m_peak), channel=channel)


def multiport_poa(red, **kw):
    """One PoaResult per output channel."""
    return [poa(red, channel=k, **kw) for k in range(red.c.shape[0])]


def modal_poa_decomposition(red, modal=None, channel=0, f_min_hz=0.01,
                            f_max_hz=1000.0, n_points=400):
    """Per-mode partial-fraction contributions R_k / (jw - lam_k) to one channel.

    Returns (freqs, contributions[n_modes, n_f], total_modal, total_direct,
    max_error) where max_error is the worst absolute mismatch between the
    modal reconstruction and the directly evaluated transfer, normalized by
    the peak direct magnitude.
    """
    if modal is None:
        modal = modal_analysis(red)
    freqs = np.logspace(np.log10(f_min_hz), np.log10(f_max_hz), n_points)
    s = 2j * np.pi * freqs
    contrib = modal.residues[channel][:, None] / (s[None, :]
                                                 - modal.eigenvalues[:, None])
    total_modal = contrib.sum(axis=0) + modal.d_term[channel]
    total_direct = np.array([red.transfer(sv, i_out=channel) for sv in s])
    denom = np.abs(total_direct).max()
    max_error = float(np.abs(total_modal - total_direct).max()
                      / (denom if denom > 0 else 1.0))
    return freqs, contrib, total_modal, total_direct, max_error


@dataclass
class SweepResult:
    """Tracked modes and response peaks over one parameter range."""
    param_path: str
    values: np.ndarray
    modes: np.ndarray
    mode_labels: list
    f_peak_hz: np.ndarray
    m_peak: np.ndarray
    crossed_rhp: np.ndarray
    warnings: list = field(default_factory=list)


def _track(prev_vecs, new_lam, new_vecs):
    """Match new modes to tracked ones by right-eigenvector overlap."""
    n_tr = prev_vecs.shape[1]
    overlap = np.abs(prev_vecs.conj().T @ new_vecs)
    norm = (np.linalg.norm(prev_vecs, axis=0)[:, None]
            * np.linalg.norm(new_vecs, axis=0)[None, :])
    overlap = overlap / norm
    rows, cols = linear_sum_assignment(-overlap)
    pick = np.empty(n_tr, dtype=int)
    ambiguous = []
    for r, cch in zip(rows, cols):
        pick[r] = cch
        row = overlap[r].copy()
        best = row[cch]
        row[cch] = -np.inf
        second = row.max()
        if best > 0 and second / best > 0.98:
            ambiguous.append(r)
    return pick, ambiguous


def sweep(param_path, values, base_params=None, build=None, top_k=6,
          poa_kw=None):
    """Re-solve equilibrium and modes over a parameter range, tracking modes.

    param_path is a dotted path into the parameter set (bandwidth shortcuts
    from params.set_param are accepted). Tracked modes are the top_k by
    residue magnitude at the first value; continuation matches them step to
    step by eigenvector overlap and records peak frequency/magnitude of the
    first output channel alongside.
    """
    from .params import ChainParams
    from . import equilibrium as _eq
    from .assembly import build_sdcib

    if build is None:
        build = build_sdcib
    if base_params is None:
        base_params = ChainParams()
    poa_kw = dict(poa_kw or {})

    values = np.asarray(values, dtype=float)
    modes = np.full((values.size, top_k), np.nan + 0j, dtype=complex)
    f_pk = np.full(values.size, np.nan)
    m_pk = np.full(values.size, np.nan)
    crossed = np.zeros(values.size, dtype=bool)
    warnings_ = []
    prev_vecs = None
    labels = None

    for iv, val in enumerate(values):
        p = copy.deepcopy(base_params)
        set_param(p, param_path, float(val))
        model = build(p)
        op = _eq.solve_equilibrium(model, [p.p_load])
        red = linearize(model, op)
        modal = modal_analysis(red)
        if prev_vecs is None:
            order = np.argsort(-np.abs(modal.residues[0]))[:top_k]
            labels = [" / ".join(n for n, _ in modal.top_states(k, 2))
                      for k in order]
        else:
            order, amb = _track(prev_vecs, modal.eigenvalues, modal.right)
            for r in amb:
                warnings_.append(
                    "tracking ambiguous for mode %d (%s) at %s=%g"
                    % (r, labels[r], param_path, val))
        modes[iv] = modal.eigenvalues[order]
        prev_vecs = modal.right[:, order]
        pk = poa(red, **poa_kw)
        f_pk[iv], m_pk[iv] = pk.f_peak_hz, pk.m_peak
        crossed[iv] = bool(np.max(modal.eigenvalues.real) > 0.0)

    return SweepResult(param_path=param_path, values=values, modes=modes,
                       mode_labels=labels, f_peak_hz=f_pk, m_peak=m_pk,
                       crossed_rhp=crossed, warnings=warnings_)
