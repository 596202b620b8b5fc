"""Component models for the grid-to-load power-delivery chain.

Each block owns a slice of the differential states x and algebraic unknowns y,
reads named signals produced by other blocks (ports), and publishes named
signals of its own (exports). Blocks never index into the global vectors;
assembly resolves the wiring.

Sign conventions follow the rotating-frame form used across the chain models:
inductor and capacitor cross-coupling enters as ``+w*J`` in the plant
equations and the control feedforwards are chosen to cancel it.
"""

import numpy as np

from .frames import J, rotation


class Block:
    """Base class: a named component with states, algebraics, ports, exports.

    Subclasses fill ``state_names``, ``alg_names``, ``ports`` (list of signal
    names this block reads) and ``exports`` (dict name -> callable(x, y, u, w)
    evaluated on the block-local slices; u maps port name -> value).
    ``residual(x, y, u, w)`` returns the block-local (f, g).
    """

    def __init__(self, name):
        self.name = name
        self.state_names = []
        self.alg_names = []
        self.ports = []
        self.exports = {}

    @property
    def n_x(self):
        return len(self.state_names)

    @property
    def n_y(self):
        return len(self.alg_names)

    def residual(self, x, y, u, w):
        raise NotImplementedError

    def __repr__(self):
        return "%s(name=%r, n_x=%d, n_y=%d)" % (
            type(self).__name__, self.name, self.n_x, self.n_y)


class AfeBlock(Block):
    """Active front end: PLL-synchronized rectifier regulating the UPS DC bus.

    States: PLL angle/filter/integrator, filter current (local frame), DC-loop
    and current-loop integrators. Algebraics: modulation indices and the
    stationary-frame current fed back to the grid node.
    """

    def __init__(self, p, w_b, w_s, name="afe"):
        Block.__init__(self, name)
        self.p = p
        self.w_b = w_b
        self.w_s = w_s
        self.state_names = ["theta_pll", "epsilon_pll", "v_q_pll",
                            "i_d_afe", "i_q_afe", "xi_dc_afe",
                            "gamma_d_afe", "gamma_q_afe"]
        self.alg_names = ["m_d_afe", "m_q_afe", "i_r_afe", "i_i_afe"]
        self.ports = ["v_ri_pcc", "v_dc_ups"]
        self.exports = {
            "i_ri_afe": lambda x, y, u, w: y[2:4],
            "m_dq_afe": lambda x, y, u, w: y[0:2],
            "i_dq_afe": lambda x, y, u, w: x[3:5],
        }

    def residual(self, x, y, u, w):
        p = self.p
        th, eps, vq = x[0], x[1], x[2]
        i_dq = x[3:5]
        xi_dc = x[5]
        gam = x[6:8]
        m_dq = y[0:2]
        i_ri = y[2:4]
        v_ri = u["v_ri_pcc"]
        v_dc = u["v_dc_ups"][0]

        w_pll = self.w_s + p.kp_pll * vq + p.ki_pll * eps
        Rt = rotation(th)
        v_dq = Rt @ v_ri
        i_ref = np.array([p.kp_dc * (p.vdc_ref - v_dc) + p.ki_dc * xi_dc, 0.0])
        v_dq_ref = (p.kp_c * (i_dq - i_ref) + p.ki_c * gam
                    + w_pll * p.l * (J @ i_dq))

        f = np.empty(8)
        f[0] = self.w_b * (w_pll - self.w_s)
        f[1] = vq
        f[2] = p.w_lp * (v_dq[1] - vq)
        f[3:5] = (self.w_b / p.l) * (v_dq - v_dc * m_dq - p.r * i_dq
                                     + w_pll * p.l * (J @ i_dq))
        f[5] = p.vdc_ref - v_dc
        f[6:8] = i_dq - i_ref

        g = np.empty(4)
        g[0:2] = m_dq - v_dq_ref / v_dc
        g[2:4] = i_ri - Rt.T @ i_dq
        return f, g


class VsiBlock(Block):
    """UPS inverter holding the protected AC bus voltage from the DC link."""

    def __init__(self, p, w_b, name="vsi"):
        Block.__init__(self, name)
        self.p = p
        self.w_b = w_b
        self.state_names = ["i_u_cv", "i_v_cv", "v_u_vsi", "v_v_vsi",
                            "xi_u_vsi", "xi_v_vsi", "gamma_u_vsi",
                            "gamma_v_vsi"]
        self.alg_names = ["m_u_vsi", "m_v_vsi"]
        self.ports = ["v_dc_ups", "i_uv_vsi"]
        self.exports = {
            "v_uv_vsi": lambda x, y, u, w: x[2:4],
            "m_uv_vsi": lambda x, y, u, w: y[0:2],
            "i_uv_cv": lambda x, y, u, w: x[0:2],
        }

    def residual(self, x, y, u, w):
        p = self.p
        i_cv = x[0:2]
        v_uv = x[2:4]
        xi = x[4:6]
        gam = x[6:8]
        m_uv = y[0:2]
        v_dc = u["v_dc_ups"][0]
        i_out = u["i_uv_vsi"]

        v_ref = np.array([p.vu_ref, 0.0])
        i_cv_ref = (p.kp_v * (v_ref - v_uv) + p.ki_v * xi
                    - p.w_vsi * p.c * (J @ v_uv))
        v_cv_ref = (p.kp_c * (i_cv_ref - i_cv) + p.ki_c * gam
                    - p.w_vsi * p.l * (J @ i_cv))

        f = np.empty(8)
        f[0:2] = (self.w_b / p.l) * (v_dc * m_uv - v_uv - p.r * i_cv
                                     + p.w_vsi * p.l * (J @ i_cv))
        f[2:4] = (self.w_b / p.c) * (i_cv - i_out + p.w_vsi * p.c * (J @ v_uv))
        f[4:6] = v_ref - v_uv
        f[6:8] = i_cv_ref - i_cv

        g = m_uv - v_cv_ref / v_dc
        return f, g


class DcLinkBlock(Block):
    """UPS DC-link capacitor balancing rectifier input against inverter output."""

    def __init__(self, c_dc, w_b, name="dclink"):
        Block.__init__(self, name)
        self.c_dc = c_dc
        self.w_b = w_b
        self.state_names = ["v_dc_ups"]
        self.alg_names = []
        self.ports = ["m_dq_afe", "i_dq_afe", "m_uv_vsi", "i_uv_cv"]
        self.exports = {
            "v_dc_ups": lambda x, y, u, w: x[0:1],
        }

    def residual(self, x, y, u, w):
        p_in = u["m_dq_afe"] @ u["i_dq_afe"]
        p_out = u["m_uv_vsi"] @ u["i_uv_cv"]
        f = np.array([(self.w_b / self.c_dc) * (p_in - p_out)])
        return f, np.empty(0)


class PsuBlock(Block):
    """Rack rectifier stage: regulated DC capacitor fed from the UPS AC bus.

    The front-end conductance g_eq shapes the AC-side draw; the quadratic
    r*g^2 term accounts for the conduction loss of the rectifier bridge.
    """

    def __init__(self, p, w_b, name="psu"):
        Block.__init__(self, name)
        self.p = p
        self.w_b = w_b
        self.state_names = ["v_psu", "xi_psu"]
        self.alg_names = ["g_eq_psu", "i_u_vsi", "i_v_vsi", "i_psu"]
        self.ports = ["v_uv_vsi", "i_eq_dcdc", "v_eq_dcdc"]
        self.exports = {
            "i_uv_vsi": lambda x, y, u, w: y[1:3],
            "v_psu": lambda x, y, u, w: x[0:1],
        }

    def residual(self, x, y, u, w):
        p = self.p
        v_psu, xi = x[0], x[1]
        g_eq = y[0]
        i_uv = y[1:3]
        i_psu = y[3]
        v_uv = u["v_uv_vsi"]
        i_eq = u["i_eq_dcdc"][0]
        v_eq = u["v_eq_dcdc"][0]

        f = np.empty(2)
        f[0] = (self.w_b / p.c) * ((g_eq - p.r * g_eq ** 2) * (v_uv @ v_uv)
                                   / (3.0 * v_psu) - i_psu)
        f[1] = p.v_ref - v_psu

        g = np.empty(4)
        g[0] = g_eq - (p.kp_v * (p.v_ref - v_psu) + p.ki_v * xi)
        g[1:3] = i_uv - g_eq * v_uv
        g[3] = i_psu - (v_eq / v_psu) * i_eq
        return f, g


class DcdcBlock(Block):
    """Load-side DC-DC stage holding the point-of-load voltage under p_load."""

    def __init__(self, p, w_b, name="dcdc"):
        Block.__init__(self, name)
        self.p = p
        self.w_b = w_b
        self.state_names = ["v_eq", "xi_eq"]
        self.alg_names = []
        self.ports = []
        self.exports = {
            "i_eq_dcdc": self._i_eq,
            "v_eq_dcdc": lambda x, y, u, w: x[0:1],
        }

    def _i_eq(self, x, y, u, w):
        p = self.p
        return np.array([p.kp_v * (p.v_ref - x[0]) + p.ki_v * x[1]])

    def residual(self, x, y, u, w):
        p = self.p
        v_eq, xi = x[0], x[1]
        p_load = w[0]
        g_load = p_load / (3.0 * p.v_ref ** 2)
        i_eq = p.kp_v * (p.v_ref - v_eq) + p.ki_v * xi

        f = np.empty(2)
        f[0] = (self.w_b / p.c) * (i_eq - g_load * v_eq)
        f[1] = p.v_ref - v_eq
        return f, np.empty(0)


class TheveninGridBlock(Block):
    """Stiff grid behind a series impedance, closing the loop at the PCC node."""

    def __init__(self, p, name="grid"):
        Block.__init__(self, name)
        self.p = p
        self.state_names = []
        self.alg_names = ["v_r_pcc", "v_i_pcc"]
        self.ports = ["i_ri_afe"]
        self.exports = {
            "v_ri_pcc": lambda x, y, u, w: y[0:2],
        }

    def residual(self, x, y, u, w):
        p = self.p
        i_ri = u["i_ri_afe"]
        zdrop = np.array([p.r * i_ri[0] - p.x * i_ri[1],
                          p.x * i_ri[0] + p.r * i_ri[1]])
        g = y[0:2] - (np.array([p.v_inf, 0.0]) - zdrop)
        return np.empty(0), g
