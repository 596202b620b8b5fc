"""Default parameter sets for the power-delivery chain and grid-side devices.

All values are per unit on a common base unless noted. PI gains are derived
from loop bandwidth targets through the rules in ``tuning`` so that a change
of plant value propagates consistently.
"""

from dataclasses import dataclass, field
import numpy as np

from .tuning import tune_pair

W_BASE = 2.0 * np.pi * 60.0
W_SYNC = 1.0

# Loop bandwidth targets (Hz, damping) for the chain controllers.
_PLL_BW = (20.0, 1.0 / np.sqrt(2.0))
_AFE_DC_BW = (5.0, 1.0)
_AFE_I_BW = (200.0, 1.0 / np.sqrt(2.0))
_VSI_V_BW = (100.0, 1.0)
_VSI_I_BW = (400.0, 1.0)
_PSU_V_BW = (10.0, 1.0)
_DCDC_V_BW = (100.0, 1.0)
_PSU_I_BW = (1000.0, 1.0)
_DCDC_I_BW = (1000.0, 1.0)


def _pll_gains():
    return tune_pair("pll", _PLL_BW[0], _PLL_BW[1], W_BASE)


def _afe_dc_gains(c_dc):
    return tune_pair("voltage", _AFE_DC_BW[0], _AFE_DC_BW[1], W_BASE, c=c_dc)


def _afe_i_gains(l, r):
    return tune_pair("current", _AFE_I_BW[0], _AFE_I_BW[1], W_BASE, l=l, r=r)


@dataclass
class GridParams:
    """Thevenin grid seen from the point of common coupling.

    scr is a derived view: short-circuit ratio 1/|z|. Assigning it rescales
    r and x together, preserving their ratio, so grid strength can be swept
    as a single parameter.
    """
    v_inf: float = 1.0
    r: float = 0.02
    x: float = 0.19

    @property
    def scr(self):
        return 1.0 / float(np.hypot(self.r, self.x))

    @scr.setter
    def scr(self, value):
        value = float(value)
        if value <= 0.0:
            raise ValueError("short-circuit ratio must be positive")
        scale = 1.0 / (value * float(np.hypot(self.r, self.x)))
        self.r *= scale
        self.x *= scale


@dataclass
class AfeParams:
    """Grid-side active front end: RL filter, PLL, DC-voltage and current PIs."""
    r: float = 0.003
    l: float = 0.05
    c_dc: float = 2.0
    w_lp: float = 2.0 * np.pi * 100.0
    vdc_ref: float = 1.0
    kp_pll: float = 0.0
    ki_pll: float = 0.0
    kp_dc: float = 0.0
    ki_dc: float = 0.0
    kp_c: float = 0.0
    ki_c: float = 0.0

    def __post_init__(self):
        if self.kp_pll == 0.0 and self.ki_pll == 0.0:
            self.kp_pll, self.ki_pll = _pll_gains()
        if self.kp_dc == 0.0 and self.ki_dc == 0.0:
            self.kp_dc, self.ki_dc = _afe_dc_gains(self.c_dc)
        if self.kp_c == 0.0 and self.ki_c == 0.0:
            self.kp_c, self.ki_c = _afe_i_gains(self.l, self.r)


@dataclass
class VsiParams:
    """UPS inverter: RLC output filter, voltage and current PIs."""
    r: float = 0.003
    l: float = 0.05
    c: float = 0.2
    vu_ref: float = 1.0
    w_vsi: float = W_SYNC
    kp_v: float = 0.0
    ki_v: float = 0.0
    kp_c: float = 0.0
    ki_c: float = 0.0

    def __post_init__(self):
        if self.kp_v == 0.0 and self.ki_v == 0.0:
            self.kp_v, self.ki_v = tune_pair(
                "voltage", _VSI_V_BW[0], _VSI_V_BW[1], W_BASE, c=self.c)
        if self.kp_c == 0.0 and self.ki_c == 0.0:
            self.kp_c, self.ki_c = tune_pair(
                "current", _VSI_I_BW[0], _VSI_I_BW[1], W_BASE, l=self.l, r=self.r)


@dataclass
class PsuParams:
    """Rack power-supply stage reduced to its DC capacitor and voltage loop."""
    c: float = 2.0
    r: float = 0.005
    v_ref: float = 1.0
    kp_v: float = 0.0
    ki_v: float = 0.0

    def __post_init__(self):
        if self.kp_v == 0.0 and self.ki_v == 0.0:
            self.kp_v, self.ki_v = tune_pair(
                "voltage", _PSU_V_BW[0], _PSU_V_BW[1], W_BASE, c=self.c)


@dataclass
class DcdcParams:
    """Load-side DC-DC stage reduced to its output capacitor and voltage loop."""
    c: float = 0.2
    v_ref: float = 0.5
    kp_v: float = 0.0
    ki_v: float = 0.0

    def __post_init__(self):
        if self.kp_v == 0.0 and self.ki_v == 0.0:
            self.kp_v, self.ki_v = tune_pair(
                "voltage", _DCDC_V_BW[0], _DCDC_V_BW[1], W_BASE, c=self.c)


@dataclass
class FullOrderParams:
    """Extra parameters for the switching-detail rectifier and DC-DC stages."""
    l_psu: float = 0.05
    kp_c_psu: float = 0.0
    ki_c_psu: float = 0.0
    l_eq: float = 0.05
    r_eq: float = 0.005
    kp_c_eq: float = 0.0
    ki_c_eq: float = 0.0
    sign_eps: float = 1e-3

    def __post_init__(self):
        if self.kp_c_psu == 0.0 and self.ki_c_psu == 0.0:
            self.kp_c_psu, self.ki_c_psu = tune_pair(
                "current", _PSU_I_BW[0], _PSU_I_BW[1], W_BASE,
                l=self.l_psu, r=0.005)
        if self.kp_c_eq == 0.0 and self.ki_c_eq == 0.0:
            self.kp_c_eq, self.ki_c_eq = tune_pair(
                "current", _DCDC_I_BW[0], _DCDC_I_BW[1], W_BASE,
                l=self.l_eq, r=self.r_eq)


@dataclass
class ChainParams:
    """Complete parameter set for the grid-to-load delivery chain."""
    w_b: float = W_BASE
    w_s: float = W_SYNC
    p_load: float = 0.5
    grid: GridParams = field(default_factory=GridParams)
    afe: AfeParams = field(default_factory=AfeParams)
    vsi: VsiParams = field(default_factory=VsiParams)
    psu: PsuParams = field(default_factory=PsuParams)
    dcdc: DcdcParams = field(default_factory=DcdcParams)
    fullorder: FullOrderParams = field(default_factory=FullOrderParams)


@dataclass
class SmParams:
    """Two-axis synchronous machine with IEEE type-1 exciter and steam governor."""
    h: float = 3.0
    d: float = 0.0
    x_d: float = 0.1460
    x_q: float = 0.0969
    x_dp: float = 0.0608
    x_qp: float = 0.0969
    t_d0p: float = 8.96
    t_q0p: float = 0.31
    k_a: float = 5.0
    t_a: float = 0.2
    k_e: float = 1.0
    t_e: float = 0.314
    k_f: float = 0.063
    t_f: float = 0.35
    a_e: float = 0.0039
    b_e: float = 1.555
    r_droop: float = 0.15
    t_sv: float = 0.1
    t_ch: float = 0.5


@dataclass
class GfmParams:
    """Grid-forming converter: droop control, virtual impedance, LCL filter."""
    l_f: float = 0.08
    r_f: float = 0.003
    c_f: float = 0.074
    l_g: float = 0.2
    r_g: float = 0.01
    k_p: float = 0.02
    w_z: float = 20.0
    k_q: float = 0.05
    w_f: float = 50.0
    r_v: float = 0.0
    l_v: float = 0.2
    kp_v: float = 0.3947
    ki_v: float = 49.5953
    kp_c: float = 0.3771
    ki_c: float = 335.1032


@dataclass
class GflParams:
    """Grid-following converter: PLL plus power-regulated current injection."""
    l_f: float = 0.08
    r_f: float = 0.003
    c_f: float = 0.074
    l_g: float = 0.1
    r_g: float = 0.01
    kp_pll: float = 0.05
    ki_pll: float = 1.42
    w_lp: float = 376.99
    kp_p: float = 0.01
    ki_p: float = 0.12
    kp_q: float = 0.01
    ki_q: float = 0.12
    w_z: float = 41.47
    w_f: float = 41.47
    kp_c: float = 0.15
    ki_c: float = 0.267


@dataclass
class NineBusParams:
    """Meshed nine-bus scenario: machine, two converter plants, and the chain.

    Dispatch follows the classic three-machine test case: bus 1 carries the
    synchronous machine (slack), buses 2 and 3 the grid-forming and
    grid-following converters at fixed active power and voltage magnitude.
    The delivery chain hangs off bus 8 in parallel with the static load
    there; s_base is the chain's MVA base as a fraction of the network base
    and scales its current injection and drawn power accordingly.
    """
    w_b: float = W_BASE
    w_s: float = W_SYNC
    v1: float = 1.04
    v2: float = 1.025
    v3: float = 1.025
    p2: float = 1.63
    p3: float = 0.85
    s_base: float = 1.0
    sm: SmParams = field(default_factory=SmParams)
    gfm: GfmParams = field(default_factory=GfmParams)
    gfl: GflParams = field(default_factory=GflParams)
    chain: ChainParams = field(default_factory=ChainParams)

    @property
    def p_load(self):
        return self.chain.p_load

    @p_load.setter
    def p_load(self, value):
        self.chain.p_load = float(value)


# Bandwidth shortcut paths: setting one retunes the (kp, ki) pair through the
# matching loop rule, keeping the damping target of the default design.
_BW_PATHS = {
    "afe.pll_bw_hz": ("afe", "pll", _PLL_BW[1], ("kp_pll", "ki_pll"), None),
    "afe.dc_bw_hz": ("afe", "voltage", _AFE_DC_BW[1], ("kp_dc", "ki_dc"), "c_dc"),
    "afe.i_bw_hz": ("afe", "current", _AFE_I_BW[1], ("kp_c", "ki_c"), "lr"),
    "vsi.v_bw_hz": ("vsi", "voltage", _VSI_V_BW[1], ("kp_v", "ki_v"), "c"),
    "vsi.i_bw_hz": ("vsi", "current", _VSI_I_BW[1], ("kp_c", "ki_c"), "lr"),
    "psu.v_bw_hz": ("psu", "voltage", _PSU_V_BW[1], ("kp_v", "ki_v"), "c"),
    "dcdc.v_bw_hz": ("dcdc", "voltage", _DCDC_V_BW[1], ("kp_v", "ki_v"), "c"),
}


def _navigate(params, prefix_parts, path):
    obj = params
    for name in prefix_parts:
        if not hasattr(obj, name):
            raise AttributeError("unknown parameter group %r in path %r"
                                 % (name, path))
        obj = getattr(obj, name)
    return obj


def set_param(params, path, value):
    """Set a dotted parameter path, with bandwidth shortcuts.

    Plain paths ("vsi.kp_v", "grid.x", "p_load") assign the attribute and
    reject unknown names. Bandwidth paths ("vsi.v_bw_hz", "afe.pll_bw_hz",
    ...) retune the corresponding PI pair at the default damping; they also
    work behind a prefix ("chain.vsi.v_bw_hz" on a nine-bus parameter set).
    """
    bw_key = next((k for k in _BW_PATHS
                   if path == k or path.endswith("." + k)), None)
    if bw_key is not None:
        holder = _navigate(
            params, path[:-len(bw_key)].rstrip(".").split(".")
            if path != bw_key else [], path)
        blk_name, kind, zeta, gain_names, plant = _BW_PATHS[bw_key]
        blk = getattr(holder, blk_name)
        kw = {}
        if plant == "c":
            kw["c"] = blk.c
        elif plant == "c_dc":
            kw["c"] = blk.c_dc
        elif plant == "lr":
            kw["l"] = blk.l
            kw["r"] = blk.r
        kp, ki = tune_pair(kind, float(value), zeta, W_BASE, **kw)
        setattr(blk, gain_names[0], kp)
        setattr(blk, gain_names[1], ki)
        return
    parts = path.split(".")
    obj = _navigate(params, parts[:-1], path)
    leaf = parts[-1]
    if not hasattr(obj, leaf):
        raise AttributeError("unknown parameter %r in path %r" % (leaf, path))
    current = getattr(obj, leaf)
    if isinstance(current, (int, float)):
        value = type(current)(value) if not isinstance(current, float) else float(value)
    setattr(obj, leaf, value)


def get_param(params, path):
    """Read a dotted parameter path (no bandwidth shortcuts)."""
    obj = params
    for name in path.split("."):
        if not hasattr(obj, name):
            raise AttributeError("unknown parameter %r in path %r" % (name, path))
        obj = getattr(obj, name)
    return obj


def default_chain_params():
    """Chain parameter set used throughout the examples and tests."""
    return ChainParams()


def default_sm_params():
    return SmParams()


def default_gfm_params():
    return GfmParams()


def default_gfl_params():
    return GflParams()


def default_ninebus_params():
    return NineBusParams()
