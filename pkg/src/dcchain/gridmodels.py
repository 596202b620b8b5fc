"""Transmission-level device models and the meshed nine-bus scenario.

A synchronous machine, a grid-forming converter, and a grid-following
converter sit on the generator buses of the classic nine-bus test network;
the delivery chain hangs off bus 8 next to the static load there. All
devices exchange stationary-frame currents and voltages with an algebraic
network block; static loads are folded into the network admittance matrix
as constant impedances at their dispatch voltages.

The composite model has one continuous symmetry (a common rotation of all
frames), so its Jacobian has one neutral direction; the equilibrium solver
and the modal analysis both account for it.
"""

import numpy as np

from .frames import J, E2, rotate, derotate
from .blocks import (Block, AfeBlock, VsiBlock, DcLinkBlock, PsuBlock,
                     DcdcBlock)
from .assembly import SystemModel
from .params import NineBusParams, W_BASE, W_SYNC
from .powerflow import PfBus, PfLine, build_ybus, solve_pf
from .equilibrium import chain_guess_at_pcc

N_BUS = 9
BUS_SM = 0
BUS_GFM = 1
BUS_GFL = 2
BUS_CHAIN = 7

# Series branches of the nine-bus network (0-based endpoints, r, x, total
# charging susceptance), 100 MVA system base.
NINEBUS_LINES = (
    (0, 3, 0.0, 0.0576, 0.0),
    (1, 6, 0.0, 0.0625, 0.0),
    (2, 8, 0.0, 0.0586, 0.0),
    (3, 4, 0.010, 0.085, 0.176),
    (3, 5, 0.017, 0.092, 0.158),
    (4, 6, 0.032, 0.161, 0.306),
    (5, 8, 0.039, 0.170, 0.358),
    (6, 7, 0.0085, 0.072, 0.149),
    (7, 8, 0.0119, 0.1008, 0.209),
)

# Static loads (bus, p, q) at nominal voltage.
NINEBUS_LOADS = ((4, 1.25, 0.50), (5, 0.90, 0.30), (7, 1.00, 0.35))


def nine_bus_lines():
    """Series branches as PfLine records."""
    return [PfLine(*ln) for ln in NINEBUS_LINES]


class SmBlock(Block):
    """Two-axis synchronous machine with type-1 excitation and steam governor.

    The rotor frame puts the transient EMF on the second axis. References
    v_ref (voltage regulator setpoint) and p_ref (governor dispatch) are
    plain attributes assigned by the scenario initializer so the machine
    holds its dispatch at synchronous speed.
    """

    def __init__(self, p, w_b, w_s, name="sm"):
        Block.__init__(self, name)
        self.p = p
        self.w_b = w_b
        self.w_s = w_s
        self.v_ref = 1.0
        self.p_ref = 0.0
        self.state_names = ["delta_sm", "omega_sm", "e_qp_sm", "e_dp_sm",
                            "e_fd_sm", "v_f_sm", "v_r_sm", "p_sv_sm",
                            "tau_m_sm"]
        self.alg_names = ["i_r_sm", "i_i_sm"]
        self.ports = ["v_bus_sm"]
        self.exports = {
            "i_ri_sm": lambda x, y, u, w: y[0:2],
        }

    def residual(self, x, y, u, w):
        p = self.p
        delta, om, e_qp, e_dp, e_fd, v_f, v_r, p_sv, tau_m = x
        i_ri = y[0:2]
        v_dq = rotate(u["v_bus_sm"], delta)
        i_d = (e_qp - v_dq[1]) / p.x_dp
        i_q = (v_dq[0] - e_dp) / p.x_qp
        tau_e = v_dq[0] * i_d + v_dq[1] * i_q
        v_t = np.hypot(v_dq[0], v_dq[1])
        s_e = p.a_e * np.exp(p.b_e * e_fd)

        f = np.empty(9)
        f[0] = self.w_b * (om - self.w_s)
        f[1] = (tau_m - tau_e - p.d * (om - self.w_s)) / (2.0 * p.h)
        f[2] = (-e_qp - (p.x_d - p.x_dp) * i_d + e_fd) / p.t_d0p
        f[3] = (-e_dp + (p.x_q - p.x_qp) * i_q) / p.t_q0p
        f[4] = (-(p.k_e + s_e) * e_fd + v_r) / p.t_e
        f[5] = (-v_f + (p.k_f / p.t_e) * v_r
                - (p.k_f / p.t_e) * (p.k_e + s_e) * e_fd) / p.t_f
        f[6] = (-v_r + p.k_a * (self.v_ref - v_f - v_t)) / p.t_a
        f[7] = (-p_sv + self.p_ref - (om - self.w_s) / p.r_droop) / p.t_sv
        f[8] = (-tau_m + p_sv) / p.t_ch

        g = i_ri - derotate(np.array([i_d, i_q]), delta)
        return f, g


class GfmBlock(Block):
    """Grid-forming converter: droop frame, virtual impedance, LCL filter.

    The droop frame aligns the regulated voltage with the second axis. The
    virtual-impedance voltage reference feeds cascaded voltage and current
    loops around the LC stage; the coupling inductor ties the filter bus to
    the network. References p_ref, q_ref, v_ref are assigned by the scenario
    initializer; w_ref stays at synchronous speed.
    """

    def __init__(self, p, w_b, w_s, name="gfm"):
        Block.__init__(self, name)
        self.p = p
        self.w_b = w_b
        self.w_s = w_s
        self.w_ref = w_s
        self.v_ref = 1.0
        self.p_ref = 0.0
        self.q_ref = 0.0
        self.state_names = ["theta_gfm", "p_gfm", "q_gfm",
                            "xi_u_gfm", "xi_v_gfm", "gamma_u_gfm",
                            "gamma_v_gfm", "i_u_cv_gfm", "i_v_cv_gfm",
                            "v_u_f_gfm", "v_v_f_gfm", "i_u_g_gfm",
                            "i_v_g_gfm"]
        self.alg_names = ["i_r_gfm", "i_i_gfm"]
        self.ports = ["v_bus_gfm"]
        self.exports = {
            "i_ri_gfm": lambda x, y, u, w: y[0:2],
        }

    def residual(self, x, y, u, w):
        p = self.p
        th, p_oc, q_oc = x[0], x[1], x[2]
        xi = x[3:5]
        gam = x[5:7]
        i_cv = x[7:9]
        v_f = x[9:11]
        i_g = x[11:13]
        i_ri = y[0:2]
        v_loc = rotate(u["v_bus_gfm"], th)

        w_oc = self.w_ref + p.k_p * (self.p_ref - p_oc)
        v_oc = self.v_ref + p.k_q * (self.q_ref - q_oc)
        p_f = v_f @ i_g
        q_f = v_f @ (J @ i_g)
        v_vi = v_oc * E2 - p.r_v * i_g - w_oc * p.l_v * (J @ i_g)
        i_ref = p.kp_v * (v_vi - v_f) + p.ki_v * xi + w_oc * p.c_f * (J @ v_f)
        v_cv = (p.kp_c * (i_ref - i_cv) + p.ki_c * gam
                - w_oc * p.l_f * (J @ i_cv))

        f = np.empty(13)
        f[0] = self.w_b * (w_oc - self.w_s)
        f[1] = p.w_z * (p_f - p_oc)
        f[2] = p.w_f * (q_f - q_oc)
        f[3:5] = v_vi - v_f
        f[5:7] = i_ref - i_cv
        f[7:9] = (self.w_b / p.l_f) * (v_cv - v_f - p.r_f * i_cv
                                       - w_oc * p.l_f * (J @ i_cv))
        f[9:11] = (self.w_b / p.c_f) * (i_cv - i_g - w_oc * p.c_f * (J @ v_f))
        f[11:13] = (self.w_b / p.l_g) * (v_f - v_loc - p.r_g * i_g
                                         - w_oc * p.l_g * (J @ i_g))

        g = i_ri - derotate(i_g, th)
        return f, g


class GflBlock(Block):
    """Grid-following converter: PLL frame with power-regulated current.

    The PLL nulls the second component of the filter-bus voltage, the same
    loop structure as the chain front end, so the voltage settles on the
    first axis. The outer PI pair on filtered power sets the current
    reference with the reactive-loop output stacked first. References
    p_ref, q_ref are assigned by the scenario initializer.
    """

    def __init__(self, p, w_b, w_s, name="gfl"):
        Block.__init__(self, name)
        self.p = p
        self.w_b = w_b
        self.w_s = w_s
        self.p_ref = 0.0
        self.q_ref = 0.0
        self.state_names = ["theta_pll_gfl", "v_q_pll_gfl", "epsilon_pll_gfl",
                            "sigma_p_gfl", "p_m_gfl", "sigma_q_gfl",
                            "q_m_gfl", "gamma_u_gfl", "gamma_v_gfl",
                            "i_u_cv_gfl", "i_v_cv_gfl", "v_u_f_gfl",
                            "v_v_f_gfl", "i_u_g_gfl", "i_v_g_gfl"]
        self.alg_names = ["i_r_gfl", "i_i_gfl"]
        self.ports = ["v_bus_gfl"]
        self.exports = {
            "i_ri_gfl": lambda x, y, u, w: y[0:2],
        }

    def residual(self, x, y, u, w):
        p = self.p
        th, v_q, eps = x[0], x[1], x[2]
        sig_p, p_m = x[3], x[4]
        sig_q, q_m = x[5], x[6]
        gam = x[7:9]
        i_cv = x[9:11]
        v_f = x[11:13]
        i_g = x[13:15]
        i_ri = y[0:2]
        v_loc = rotate(u["v_bus_gfl"], th)

        w_pll = self.w_s + p.kp_pll * v_q + p.ki_pll * eps
        p_f = v_f @ i_g
        q_f = v_f @ (J @ i_g)
        i_ref = np.array([
            p.kp_q * (self.q_ref - q_m) + p.ki_q * sig_q,
            p.kp_p * (self.p_ref - p_m) + p.ki_p * sig_p,
        ])
        v_cv = (p.kp_c * (i_ref - i_cv) + p.ki_c * gam
                - w_pll * p.l_f * (J @ i_cv))

        f = np.empty(15)
        f[0] = self.w_b * (w_pll - self.w_s)
        f[1] = p.w_lp * (v_f[1] - v_q)
        f[2] = v_q
        f[3] = self.p_ref - p_m
        f[4] = p.w_z * (p_f - p_m)
        f[5] = self.q_ref - q_m
        f[6] = p.w_f * (q_f - q_m)
        f[7:9] = i_ref - i_cv
        f[9:11] = (self.w_b / p.l_f) * (v_cv - v_f - p.r_f * i_cv
                                        - w_pll * p.l_f * (J @ i_cv))
        f[11:13] = (self.w_b / p.c_f) * (i_cv - i_g - w_pll * p.c_f * (J @ v_f))
        f[13:15] = (self.w_b / p.l_g) * (v_f - v_loc - p.r_g * i_g
                                         - w_pll * p.l_g * (J @ i_g))

        g = i_ri - derotate(i_g, th)
        return f, g


class NetworkBlock(Block):
    """Stationary-frame algebraic network: nodal current balance I(V) = Y V.

    Bus voltages are the block's algebraic unknowns (real/imaginary pairs).
    The admittance matrix includes line charging and the static loads as
    constant impedances; generator buses receive device current injections
    and the chain draws current at its bus.
    """

    def __init__(self, y_bus, chain_scale=1.0, name="network"):
        Block.__init__(self, name)
        self.y_bus = np.asarray(y_bus, dtype=complex)
        self.chain_scale = float(chain_scale)
        n = self.y_bus.shape[0]
        self.n_bus = n
        self.alg_names = []
        for k in range(n):
            self.alg_names += ["v_r_b%d" % (k + 1), "v_i_b%d" % (k + 1)]
        self.ports = ["i_ri_sm", "i_ri_gfm", "i_ri_gfl", "i_ri_afe"]
        self.exports = {
            "v_bus_sm": lambda x, y, u, w: y[2 * BUS_SM:2 * BUS_SM + 2],
            "v_bus_gfm": lambda x, y, u, w: y[2 * BUS_GFM:2 * BUS_GFM + 2],
            "v_bus_gfl": lambda x, y, u, w: y[2 * BUS_GFL:2 * BUS_GFL + 2],
            "v_ri_pcc": lambda x, y, u, w: y[2 * BUS_CHAIN:2 * BUS_CHAIN + 2],
        }

    def residual(self, x, y, u, w):
        v = y[0::2] + 1j * y[1::2]
        i_inj = np.zeros(self.n_bus, dtype=complex)
        i_inj[BUS_SM] = complex(u["i_ri_sm"][0], u["i_ri_sm"][1])
        i_inj[BUS_GFM] = complex(u["i_ri_gfm"][0], u["i_ri_gfm"][1])
        i_inj[BUS_GFL] = complex(u["i_ri_gfl"][0], u["i_ri_gfl"][1])
        i_inj[BUS_CHAIN] = -self.chain_scale * complex(u["i_ri_afe"][0],
                                                       u["i_ri_afe"][1])
        mis = i_inj - self.y_bus @ v
        g = np.empty(2 * self.n_bus)
        g[0::2] = mis.real
        g[1::2] = mis.imag
        return np.empty(0), g


def _base_pair(base):
    """(w_b, w_s) from a tuple, an object with those attributes, or None."""
    if base is None:
        return W_BASE, W_SYNC
    if hasattr(base, "w_b"):
        return float(base.w_b), float(base.w_s)
    w_b, w_s = base
    return float(w_b), float(w_s)


def _device_residual(blk, port, state, v_ri, refs):
    """Evaluate one device block standalone and back out its grid current.

    The interface constraint of every device block reads
    i_ri - R(theta)^T i_local, so evaluating it at i_ri = 0 yields the
    injected current with its sign flipped; the state derivatives do not
    involve i_ri at all.
    """
    for key, val in (refs or {}).items():
        if not hasattr(blk, key):
            raise AttributeError("%s has no reference %r" % (blk.name, key))
        setattr(blk, key, float(val))
    x = np.asarray(state, dtype=float)
    if x.shape != (blk.n_x,):
        raise ValueError("expected %d states, got %s" % (blk.n_x, x.shape))
    u = {port: np.asarray(v_ri, dtype=float)}
    f, g = blk.residual(x, np.zeros(2), u, None)
    return f, -g


def sm_residuals(state, v_ri_gen, params, base=None, refs=None):
    """State derivatives, grid current, and rotor-frame quantities of the
    synchronous machine at one operating point.

    state: 9-vector [delta, omega, e_q', e_d', e_fd, v_f, v_r, p_sv, tau_m];
    v_ri_gen: stationary-frame terminal voltage pair; base: (w_b, w_s) or
    an object carrying them, defaulting to the 60 Hz system base; refs:
    optional overrides for v_ref / p_ref (default 1.0 / 0.0).

    Returns (dx, i_ri_gen, aux) with aux holding the air-gap torque, the
    terminal voltage magnitude, the saturation value, and the rotor-frame
    voltage and current pairs.
    """
    w_b, w_s = _base_pair(base)
    blk = SmBlock(params, w_b, w_s)
    f, i_ri = _device_residual(blk, "v_bus_sm", state, v_ri_gen, refs)
    delta = float(state[0])
    v_dq = rotate(np.asarray(v_ri_gen, dtype=float), delta)
    i_d = (state[2] - v_dq[1]) / params.x_dp
    i_q = (v_dq[0] - state[3]) / params.x_qp
    aux = {
        "tau_e": float(v_dq[0] * i_d + v_dq[1] * i_q),
        "v_t": float(np.hypot(v_dq[0], v_dq[1])),
        "s_e": float(params.a_e * np.exp(params.b_e * state[4])),
        "v_dq": v_dq,
        "i_dq": np.array([i_d, i_q]),
    }
    return f, i_ri, aux


def gfm_residuals(state, v_ri_pcc, params, base=None, refs=None):
    """State derivatives and grid current of the grid-forming converter.

    state: 13-vector ordered as GfmBlock.state_names; refs: optional
    overrides for w_ref / v_ref / p_ref / q_ref. Returns (dx, i_ri_g).
    """
    w_b, w_s = _base_pair(base)
    blk = GfmBlock(params, w_b, w_s)
    return _device_residual(blk, "v_bus_gfm", state, v_ri_pcc, refs)


def gfl_residuals(state, v_ri_pcc, params, base=None, refs=None):
    """State derivatives and grid current of the grid-following converter.

    state: 15-vector ordered as GflBlock.state_names; refs: optional
    overrides for p_ref / q_ref. Returns (dx, i_ri_g).
    """
    w_b, w_s = _base_pair(base)
    blk = GflBlock(params, w_b, w_s)
    return _device_residual(blk, "v_bus_gfl", state, v_ri_pcc, refs)


def _gen_buses(params, p_dc):
    """Generator dispatch records for a network whose static loads are
    already folded into the admittance matrix."""
    buses = [PfBus("pq") for _ in range(N_BUS)]
    buses[BUS_SM] = PfBus("slack", v_set=params.v1)
    buses[BUS_GFM] = PfBus("pv", p=params.p2, v_set=params.v2)
    buses[BUS_GFL] = PfBus("pv", p=params.p3, v_set=params.v3)
    buses[BUS_CHAIN] = PfBus("pq", p=-p_dc)
    return buses


def _dispatch_buses(params, p_dc):
    """Dispatch records with the static loads still scheduled as PQ draws."""
    buses = _gen_buses(params, p_dc)
    for k, pl, ql in NINEBUS_LOADS:
        buses[k] = PfBus("pq", p=buses[k].p - pl, q=buses[k].q - ql)
    return buses


def _chain_power_flow(y_bus, make_buses, chain, p_load, scale=1.0,
                      v_guess=1.0):
    """Network solution with the chain as a voltage-consistent PQ draw.

    The chain is nearly constant-power, so alternating between the network
    solution and the chain's closed-form draw (rescaled to the network base
    by scale) converges in a few rounds.
    """
    _, _, p_dc = chain_guess_at_pcc(chain, p_load, v_guess)
    res = None
    for _ in range(12):
        res = solve_pf(y_bus, make_buses(scale * p_dc))
        _, _, p_new = chain_guess_at_pcc(chain, p_load, res.v[BUS_CHAIN])
        done = abs(p_new - p_dc) < 1e-13
        p_dc = p_new
        if done:
            break
    return solve_pf(y_bus, make_buses(scale * p_dc)), p_dc


def _sm_init(p, w_s, v_bus, s_inj):
    """Machine states, references, and network current for a bus phasor and
    complex power injection."""
    v = complex(v_bus)
    i = np.conj(s_inj / v)
    e_q = v + 1j * p.x_q * i
    delta = float(np.angle(e_q) - 0.5 * np.pi)
    rot = np.exp(-1j * delta)
    v_loc = rot * v
    i_loc = rot * i
    v_d, v_q = v_loc.real, v_loc.imag
    i_d, i_q = i_loc.real, i_loc.imag
    e_qp = v_q + p.x_dp * i_d
    e_dp = v_d - p.x_qp * i_q
    e_fd = e_qp + (p.x_d - p.x_dp) * i_d
    s_e = p.a_e * np.exp(p.b_e * e_fd)
    v_r = (p.k_e + s_e) * e_fd
    tau_e = v_d * i_d + v_q * i_q
    x = np.array([delta, w_s, e_qp, e_dp, e_fd, 0.0, v_r, tau_e, tau_e])
    refs = {"v_ref": v_r / p.k_a + abs(v), "p_ref": tau_e}
    return x, refs, np.array([i.real, i.imag])


def _gfm_init(p, w_s, v_bus, s_inj):
    """Grid-forming states, references, and network current at a bus phasor."""
    v = complex(v_bus)
    i = np.conj(s_inj / v)
    e_vi = v + complex(p.r_g + p.r_v, p.l_g + p.l_v) * i
    th = float(np.angle(e_vi) - 0.5 * np.pi)
    rot = np.exp(-1j * th)
    i_g = rot * i
    v_f = rot * v + complex(p.r_g, p.l_g) * i_g
    s_f = np.conj(v_f) * i_g
    p_f, q_f = s_f.real, -s_f.imag
    i_cv = i_g + 1j * p.c_f * v_f
    xi = i_g / p.ki_v
    gam = (v_f + complex(p.r_f, 2.0 * p.l_f) * i_cv) / p.ki_c
    x = np.array([th, p_f, q_f, xi.real, xi.imag, gam.real, gam.imag,
                  i_cv.real, i_cv.imag, v_f.real, v_f.imag,
                  i_g.real, i_g.imag])
    refs = {"p_ref": p_f, "q_ref": q_f, "v_ref": float(abs(e_vi))}
    return x, refs, np.array([i.real, i.imag])


def _gfl_init(p, w_s, v_bus, s_inj):
    """Grid-following states, references, and network current at a bus phasor."""
    v = complex(v_bus)
    i = np.conj(s_inj / v)
    v_f_net = v + complex(p.r_g, p.l_g) * i
    th = float(np.angle(v_f_net))
    rot = np.exp(-1j * th)
    i_g = rot * i
    v_f = rot * v_f_net
    s_f = np.conj(v_f) * i_g
    p_f, q_f = s_f.real, -s_f.imag
    i_cv = i_g + 1j * p.c_f * v_f
    gam = (v_f + complex(p.r_f, 2.0 * p.l_f) * i_cv) / p.ki_c
    x = np.array([th, 0.0, 0.0, i_cv.imag / p.ki_p, p_f,
                  i_cv.real / p.ki_q, q_f, gam.real, gam.imag,
                  i_cv.real, i_cv.imag, v_f.real, v_f.imag,
                  i_g.real, i_g.imag])
    refs = {"p_ref": p_f, "q_ref": q_f}
    return x, refs, np.array([i.real, i.imag])


def ninebus_initial_guess(model, w):
    """Seed for the composite scenario at load w = [p_load].

    Solves the constant-impedance network with the chain as a PQ draw, fills
    every device state in closed form at the resulting bus phasors, and
    assigns the device references that hold that dispatch at synchronous
    speed. The seed satisfies the residual to solver precision, so the
    Newton polish terminates immediately.
    """
    params = model.params
    p_load = float(np.atleast_1d(np.asarray(w, dtype=float))[0])
    blk = {b.name: b for b in model.blocks}
    net = blk["network"]
    chain = params.chain

    res, _ = _chain_power_flow(net.y_bus, lambda pd: _gen_buses(params, pd),
                               chain, p_load, scale=params.s_base)
    x_sm, refs_sm, i_sm = _sm_init(params.sm, params.w_s,
                                   res.v[BUS_SM], res.s_inj[BUS_SM])
    x_gfm, refs_gfm, i_gfm = _gfm_init(params.gfm, params.w_s,
                                       res.v[BUS_GFM], res.s_inj[BUS_GFM])
    x_gfl, refs_gfl, i_gfl = _gfl_init(params.gfl, params.w_s,
                                       res.v[BUS_GFL], res.s_inj[BUS_GFL])
    x_chain, y_chain, _ = chain_guess_at_pcc(chain, p_load, res.v[BUS_CHAIN])
    for name, val in refs_sm.items():
        setattr(blk["sm"], name, val)
    for name, val in refs_gfm.items():
        setattr(blk["gfm"], name, val)
    for name, val in refs_gfl.items():
        setattr(blk["gfl"], name, val)

    v_net = np.empty(2 * N_BUS)
    v_net[0::2] = res.v.real
    v_net[1::2] = res.v.imag
    x = np.concatenate([x_sm, x_gfm, x_gfl, x_chain])
    y = np.concatenate([i_sm, i_gfm, i_gfl, y_chain, v_net])
    return x, y


def build_ninebus(params=None):
    """Composite nine-bus model: 58 states, 34 algebraics, 1 input.

    Input vector w = [p_load] (the chain's served load). Output channels:
    active power injected by the machine and the two converter plants, and
    active power drawn by the chain at its bus.
    """
    if params is None:
        params = NineBusParams()
    chain = params.chain

    # Dispatch solution with loads as scheduled PQ draws; fixes the
    # constant-impedance conversion voltages.
    y_static = build_ybus(N_BUS, nine_bus_lines())
    res, _ = _chain_power_flow(y_static,
                               lambda pd: _dispatch_buses(params, pd),
                               chain, chain.p_load, scale=params.s_base)
    shunts = [(k, complex(pl, -ql) / abs(res.v[k]) ** 2)
              for k, pl, ql in NINEBUS_LOADS]
    y_dyn = build_ybus(N_BUS, nine_bus_lines(), shunts=shunts)

    blocks = [
        SmBlock(params.sm, params.w_b, params.w_s),
        GfmBlock(params.gfm, params.w_b, params.w_s),
        GflBlock(params.gfl, params.w_b, params.w_s),
        AfeBlock(chain.afe, chain.w_b, chain.w_s),
        VsiBlock(chain.vsi, chain.w_b),
        DcLinkBlock(chain.afe.c_dc, chain.w_b),
        PsuBlock(chain.psu, chain.w_b),
        DcdcBlock(chain.dcdc, chain.w_b),
        NetworkBlock(y_dyn, chain_scale=params.s_base),
    ]
    outputs = [
        ("p_sm", lambda s: float(s["v_bus_sm"] @ s["i_ri_sm"])),
        ("p_gfm", lambda s: float(s["v_bus_gfm"] @ s["i_ri_gfm"])),
        ("p_gfl", lambda s: float(s["v_bus_gfl"] @ s["i_ri_gfl"])),
        ("p_dc", lambda s, sc=params.s_base:
            sc * float(s["v_ri_pcc"] @ s["i_ri_afe"])),
    ]
    model = SystemModel(blocks, ["p_load"], outputs, name="ninebus",
                        params=params)
    model.rank_deficient = True
    model.initializer = ninebus_initial_guess
    model.dispatch_flow = res
    return model
