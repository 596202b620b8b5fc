"""Hot-loop residual kernels with a compiled/pure-Python backend switch.

The compiled extension (built from _kernels.pyx) and the pure-Python twin
(_kernels_py) implement identical flat-vector signatures:

    sdcib_fg(x, y, w, p, f, g)      chain residual into preallocated f, g
    fullorder_rhs(x, w, p, dx) -> n_clamped

The parameter vectors are packed here (pack_chain / pack_fullorder) and the
layout below is the single source of truth for both backends. Block-based
evaluation in assembly/fullorder stays the reference implementation; tests
hold the kernels to it.

Chain layout (34): [w_b, w_s, v_inf, grid r, grid x,
  afe r, afe l, c_dc, w_lp, vdc_ref, kp_pll, ki_pll, kp_dc, ki_dc,
  afe kp_c, afe ki_c,
  vsi r, vsi l, vsi c, vu_ref, w_vsi, vsi kp_v, vsi ki_v, vsi kp_c, vsi ki_c,
  psu c, psu r, psu v_ref, psu kp_v, psu ki_v,
  dcdc c, dcdc v_ref, dcdc kp_v, dcdc ki_v]
Full-order layout (41): the 34 above plus
  [l_psu, psu kp_c, psu ki_c, sign_eps, l_eq, dcdc kp_c, dcdc ki_c]
"""

import numpy as np

try:
    from . import _kernels as _impl
    _BACKEND = "compiled"
except ImportError:
    from . import _kernels_py as _impl
    _BACKEND = "python"

from . import _kernels_py as _pyimpl

N_P_CHAIN = 34
N_P_FULL = 41


def backend():
    """Which implementation residual evaluation dispatches to."""
    return _BACKEND


def implementations():
    """(name, module) pairs of every available backend, compiled first."""
    out = []
    if _BACKEND == "compiled":
        out.append(("compiled", _impl))
    out.append(("python", _pyimpl))
    return out


def pack_chain(params):
    """Flatten ChainParams into the kernel layout."""
    a, v, s, e, gr = params.afe, params.vsi, params.psu, params.dcdc, params.grid
    return np.array([
        params.w_b, params.w_s, gr.v_inf, gr.r, gr.x,
        a.r, a.l, a.c_dc, a.w_lp, a.vdc_ref, a.kp_pll, a.ki_pll,
        a.kp_dc, a.ki_dc, a.kp_c, a.ki_c,
        v.r, v.l, v.c, v.vu_ref, v.w_vsi, v.kp_v, v.ki_v, v.kp_c, v.ki_c,
        s.c, s.r, s.v_ref, s.kp_v, s.ki_v,
        e.c, e.v_ref, e.kp_v, e.ki_v,
    ])


def pack_fullorder(params):
    """Flatten ChainParams plus the switching-stage extras."""
    fo = params.fullorder
    return np.concatenate([pack_chain(params), [
        fo.l_psu, fo.kp_c_psu, fo.ki_c_psu, fo.sign_eps,
        fo.l_eq, fo.kp_c_eq, fo.ki_c_eq,
    ]])


def chain_residual(x, y, w, pvec, module=None):
    """Evaluate the chain kernel, allocating fresh (f, g)."""
    mod = module or _impl
    f = np.empty(21)
    g = np.empty(12)
    mod.sdcib_fg(np.ascontiguousarray(x, float), np.ascontiguousarray(y, float),
                 np.ascontiguousarray(w, float), pvec, f, g)
    return f, g


def fullorder_residual(x, w, pvec, module=None):
    """Evaluate the full-order kernel; returns (dx, n_clamped)."""
    mod = module or _impl
    dx = np.empty(42)
    n_cl = mod.fullorder_rhs(np.ascontiguousarray(x, float),
                             np.ascontiguousarray(w, float), pvec, dx)
    return dx, n_cl


def attach(model):
    """Give a chain SystemModel the fast residual path."""
    if model.name != "sdcib" or model.params is None:
        return
    pvec = pack_chain(model.params)

    def fast(x, y, w):
        return chain_residual(x, y, w, pvec)

    model._fast_residual = fast
