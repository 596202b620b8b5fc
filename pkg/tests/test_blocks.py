"""Component blocks evaluated standalone at a solved operating point."""

import numpy as np
import pytest

from dcchain import ChainParams
from dcchain.blocks import (
    AfeBlock,
    DcLinkBlock,
    DcdcBlock,
    PsuBlock,
    TheveninGridBlock,
    VsiBlock,
)
from dcchain.frames import impedance_matrix


EXPECTED_DIMS = {
    "afe": (8, 4),
    "vsi": (8, 2),
    "dclink": (1, 0),
    "psu": (2, 4),
    "dcdc": (2, 0),
    "grid": (0, 2),
}


def test_block_dimensions():
    p = ChainParams()
    blocks = {
        "afe": AfeBlock(p.afe, p.w_b, p.w_s),
        "vsi": VsiBlock(p.vsi, p.w_b),
        "dclink": DcLinkBlock(p.afe.c_dc, p.w_b),
        "psu": PsuBlock(p.psu, p.w_b),
        "dcdc": DcdcBlock(p.dcdc, p.w_b),
        "grid": TheveninGridBlock(p.grid),
    }
    total_x = total_y = 0
    for name, blk in blocks.items():
        assert (blk.n_x, blk.n_y) == EXPECTED_DIMS[name]
        assert len(blk.state_names) == blk.n_x
        assert len(blk.alg_names) == blk.n_y
        total_x += blk.n_x
        total_y += blk.n_y
    assert total_x == 21
    assert total_y == 12


def test_blocks_vanish_at_equilibrium(chain_case):
    """Every block residual is zero on its slice of the solved point."""
    _, model, op = chain_case
    sig = model.signals(op.x, op.y, op.w)
    for blk in model.blocks:
        xs, ys = model.block_slice(blk.name)
        u = {port: sig[port] for port in blk.ports}
        f, g = blk.residual(op.x[xs], op.y[ys], u, op.w)
        assert np.abs(f).max(initial=0.0) < 1e-9, blk.name
        assert np.abs(g).max(initial=0.0) < 1e-9, blk.name


def test_grid_block_is_thevenin_law(chain_case):
    """PCC voltage equals the stiff source minus the series impedance drop."""
    params, model, op = chain_case
    sig = model.signals(op.x, op.y, op.w)
    v_pcc = sig["v_ri_pcc"]
    i_afe = sig["i_ri_afe"]
    g = params.grid
    expected = np.array([g.v_inf, 0.0]) - impedance_matrix(g.r, g.x) @ i_afe
    assert np.allclose(v_pcc, expected, atol=1e-10)


def test_dclink_power_balance(chain_case):
    """At equilibrium the rectifier and inverter converter powers match."""
    _, model, op = chain_case
    sig = model.signals(op.x, op.y, op.w)
    p_in = sig["m_dq_afe"] @ sig["i_dq_afe"]
    p_out = sig["m_uv_vsi"] @ sig["i_uv_cv"]
    assert np.isclose(p_in, p_out, atol=1e-10)
    assert p_in > 0.0


def test_dcdc_load_conductance():
    """The load draws p_load through a fixed conductance at the reference."""
    p = ChainParams()
    blk = DcdcBlock(p.dcdc, p.w_b)
    v_ref = p.dcdc.v_ref
    p_load = 0.63
    # pick the integrator state that balances the capacitor equation
    g_load = p_load / (3.0 * v_ref ** 2)
    xi = g_load * v_ref / p.dcdc.ki_v
    f, g = blk.residual(np.array([v_ref, xi]), np.empty(0), {}, [p_load])
    assert abs(f[0]) < 1e-9
    assert abs(f[1]) < 1e-12
    assert g.size == 0


def test_psu_draw_scales_with_conductance(chain_case):
    """AC-side current is the front-end conductance times the bus voltage."""
    _, model, op = chain_case
    sig = model.signals(op.x, op.y, op.w)
    xs, ys = model.block_slice("psu")
    g_eq = op.y[ys][0]
    assert g_eq > 0.0
    assert np.allclose(sig["i_uv_vsi"], g_eq * sig["v_uv_vsi"], atol=1e-10)


def test_afe_unity_power_factor(chain_case):
    """Reactive current reference is zero, so i_q settles at zero."""
    _, model, op = chain_case
    xs, _ = model.block_slice("afe")
    names = next(b for b in model.blocks if b.name == "afe").state_names
    x_afe = op.x[xs]
    assert abs(x_afe[names.index("i_q_afe")]) < 1e-9
    assert abs(x_afe[names.index("v_q_pll")]) < 1e-9
