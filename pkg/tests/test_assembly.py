"""Block wiring, index maps, and the assembled chain model."""

import numpy as np
import pytest

from dcchain import ChainParams, build_sdcib
from dcchain.assembly import IndexMap, SystemModel
from dcchain.blocks import Block


def test_index_map():
    m = IndexMap(["a", "b", "c"])
    assert len(m) == 3
    assert m.index("b") == 1
    assert m.name(2) == "c"
    assert "a" in m and "z" not in m
    assert list(m) == ["a", "b", "c"]
    with pytest.raises(KeyError):
        m.index("z")
    with pytest.raises(ValueError):
        IndexMap(["a", "a"])


def test_chain_dimensions():
    model = build_sdcib()
    assert model.n_x == 21
    assert model.n_y == 12
    assert model.n_w == 1
    assert model.w_names == ["p_load"]
    assert model.output_names == ["p_pcc", "p_vsi"]
    assert len(set(model.x_index.names)) == 21
    assert len(set(model.y_index.names)) == 12


def test_block_slices_tile_the_vectors():
    model = build_sdcib()
    covered_x = np.zeros(model.n_x, dtype=int)
    covered_y = np.zeros(model.n_y, dtype=int)
    for blk in model.blocks:
        xs, ys = model.block_slice(blk.name)
        covered_x[xs] += 1
        covered_y[ys] += 1
        assert model.x_index.names[xs] == blk.state_names
        assert model.y_index.names[ys] == blk.alg_names
    assert (covered_x == 1).all()
    assert (covered_y == 1).all()
    with pytest.raises(KeyError):
        model.block_slice("nosuch")


def test_residual_shapes_and_signal_lookup(chain_case):
    _, model, op = chain_case
    f, g = model.residual(op.x, op.y, op.w)
    assert f.shape == (21,)
    assert g.shape == (12,)
    sig = model.signals(op.x, op.y, op.w)
    for name in ("v_ri_pcc", "i_ri_afe", "v_uv_vsi", "v_dc_ups"):
        assert name in sig
    v = model.signal("v_dc_ups", op.x, op.y, op.w)
    assert np.allclose(v, sig["v_dc_ups"])


def test_output_is_pcc_power(chain_case):
    params, model, op = chain_case
    sig = model.signals(op.x, op.y, op.w)
    h = model.output(op.x, op.y, op.w)
    assert np.isclose(h[0], sig["v_ri_pcc"] @ sig["i_ri_afe"])
    assert np.isclose(h[1], sig["v_uv_vsi"] @ sig["i_uv_vsi"])
    # drawn power covers the load plus conversion losses
    assert h[0] > params.p_load
    assert h[0] < params.p_load * 1.1


def test_unresolved_port_rejected():
    class Orphan(Block):
        def __init__(self):
            Block.__init__(self, "orphan")
            self.ports = ["no_such_signal"]

        def residual(self, x, y, u, w):
            return np.empty(0), np.empty(0)

    with pytest.raises(ValueError, match="no_such_signal"):
        SystemModel([Orphan()], ["w"], [])


def test_duplicate_export_rejected():
    class Src(Block):
        def __init__(self, name):
            Block.__init__(self, name)
            self.exports = {"sig": lambda x, y, u, w: 0.0}

        def residual(self, x, y, u, w):
            return np.empty(0), np.empty(0)

    with pytest.raises(ValueError, match="sig"):
        SystemModel([Src("one"), Src("two")], ["w"], [])


def test_fast_residual_matches_blocks(chain_case):
    """The attached flat kernel agrees with block-by-block evaluation."""
    _, model, op = chain_case
    rng = np.random.default_rng(11)
    for _ in range(5):
        x = op.x + 0.01 * rng.normal(size=op.x.size)
        y = op.y + 0.01 * rng.normal(size=op.y.size)
        f1, g1 = model.residual(x, y, op.w)
        f2, g2 = model._residual_blocks(x, y, op.w)
        assert np.abs(f1 - f2).max() < 1e-10
        assert np.abs(g1 - g2).max() < 1e-10
