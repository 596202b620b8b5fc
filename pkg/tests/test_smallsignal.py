"""Linearization, modal analysis, amplification curves, and sweeps."""

import numpy as np
import pytest

from dcchain import (
    ChainParams,
    build_sdcib,
    linearize,
    modal_analysis,
    modal_poa_decomposition,
    multiport_poa,
    poa,
    set_param,
    solve_equilibrium,
    sweep,
)
from dcchain.smallsignal import jacobians, reduce


def test_jacobian_shapes(chain_case):
    _, model, op = chain_case
    jac = jacobians(model, op)
    assert jac.fx.shape == (21, 21)
    assert jac.fy.shape == (21, 12)
    assert jac.gx.shape == (12, 21)
    assert jac.gy.shape == (12, 12)
    assert jac.fw.shape == (21, 1)
    assert jac.hx.shape == (2, 21)
    # the algebraic sheet must be locally solvable for the reduction
    assert np.linalg.cond(jac.gy) < 1e8


def test_reduction_eliminates_algebraics(chain_case):
    _, model, op = chain_case
    jac = jacobians(model, op)
    red = reduce(model, jac)
    assert red.a.shape == (21, 21)
    assert red.b.shape == (21, 1)
    assert red.c.shape == (2, 21)
    assert red.d.shape == (2, 1)
    assert red.state_names == model.x_index.names
    assert red.input_names == ["p_load"]
    assert red.output_names == ["p_pcc", "p_vsi"]


def test_reduced_matches_implicit_derivative(chain_case):
    """A x + b w reproduces the DAE's constrained derivative numerically."""
    _, model, op = chain_case
    red = linearize(model, op)
    rng = np.random.default_rng(2)
    for _ in range(3):
        dx = 1e-6 * rng.normal(size=21)
        dw = 1e-6 * rng.normal()
        # re-solve the algebraic sheet at the perturbed state
        from scipy.optimize import fsolve
        y1 = fsolve(lambda y: model.residual(op.x + dx, y,
                                             op.w + dw)[1], op.y, xtol=1e-13)
        f1, _ = model.residual(op.x + dx, y1, op.w + dw)
        pred = red.a @ dx + red.b[:, 0] * dw
        # curvature leaves a second-order remainder well below the signal
        assert np.abs(f1 - pred).max() < 1e-6


def test_eigen_residuals_and_conjugacy(chain_modal):
    red, modal = chain_modal
    norm_a = np.linalg.norm(red.a, 2)
    for k in range(modal.n_modes):
        lam = modal.eigenvalues[k]
        r = modal.right[:, k]
        res = np.linalg.norm(red.a @ r - lam * r) / np.linalg.norm(r)
        assert res <= 1e-8 * norm_a
    lams = np.sort_complex(modal.eigenvalues)
    assert np.allclose(lams, np.sort_complex(lams.conj()), atol=1e-6)


def test_left_right_biorthonormal(chain_modal):
    _, modal = chain_modal
    prod = modal.left @ modal.right
    assert np.abs(prod - np.eye(modal.n_modes)).max() < 1e-8


def test_participation_columns_sum_to_one(chain_modal):
    _, modal = chain_modal
    sums = modal.participation.sum(axis=0)
    assert np.abs(sums - 1.0).max() < 1e-9
    for k in range(modal.n_modes):
        disp = modal.participation_display(k)
        assert np.isclose(disp.sum(), 1.0, atol=1e-12)
        assert (disp >= 0).all()


def test_mode_ordering_and_accessors(chain_modal):
    _, modal = chain_modal
    mags = np.abs(modal.eigenvalues.real)
    assert (np.diff(mags) >= -1e-9).all()
    k = next(i for i in range(modal.n_modes)
             if modal.eigenvalues[i].imag > 1.0)
    lam = modal.eigenvalues[k]
    assert np.isclose(modal.freq_hz(k), lam.imag / (2 * np.pi))
    assert np.isclose(modal.damping_ratio(k), -lam.real / abs(lam))
    top = modal.top_states(k, 3)
    assert len(top) == 3
    assert top[0][1] >= top[1][1] >= top[2][1]


def test_transfer_static_gain(chain_case):
    """DC transfer equals the slope of the equilibrium map."""
    params, model, op = chain_case
    red = linearize(model, op)
    g0 = red.transfer(0.0)
    dp = 1e-4
    op2 = solve_equilibrium(model, [params.p_load + dp])
    slope = (model.output(op2.x, op2.y, op2.w)[0]
             - model.output(op.x, op.y, op.w)[0]) / dp
    assert np.isclose(g0.real, slope, rtol=1e-4)
    assert abs(g0.imag) < 1e-12


def test_poa_peak_on_refined_grid(chain_case):
    _, model, op = chain_case
    red = linearize(model, op)
    pk = poa(red)
    assert pk.f_peak_hz > 0
    assert pk.m_peak > 1.0
    assert not pk.unbounded
    # the refined peak dominates a dense independent grid
    freqs = np.geomspace(0.01, 1000.0, 2000)
    mags = [abs(red.transfer(2j * np.pi * f)) for f in freqs]
    assert pk.m_peak >= max(mags) - 1e-6


def test_poa_channels(chain_case):
    _, model, op = chain_case
    red = linearize(model, op)
    pks = multiport_poa(red)
    assert len(pks) == 2
    assert pks[0].m_peak != pks[1].m_peak


def test_modal_decomposition_identity(chain_modal):
    red, modal = chain_modal
    freqs, contrib, total_modal, total_direct, max_err = \
        modal_poa_decomposition(red, modal, n_points=60)
    assert contrib.shape == (modal.n_modes, freqs.size)
    assert max_err < 1e-6
    assert np.allclose(np.abs(total_modal), np.abs(total_direct),
                       rtol=1e-6, atol=1e-12)


def test_sweep_tracks_modes():
    values = [100.0, 90.0, 80.0]
    res = sweep("vsi.v_bw_hz", values, top_k=4)
    assert res.values == pytest.approx(values)
    assert res.modes.shape == (3, 4)
    assert len(res.mode_labels) == 4
    assert len(res.f_peak_hz) == 3
    assert not res.crossed_rhp.any()
    # the dominant oscillatory pair loses damping as the bandwidth drops
    k = next(i for i, lab in enumerate(res.mode_labels) if "v_psu" in lab)
    dom = [(-z.real / abs(z)) for z in res.modes[:, k]]
    assert dom[0] > dom[1] > dom[2]


def test_sweep_flags_rhp_crossing():
    res = sweep("vsi.v_bw_hz", [60.0, 45.0, 40.0], top_k=4)
    assert res.crossed_rhp.any()


def test_sweep_rejects_unknown_path():
    with pytest.raises((KeyError, AttributeError, ValueError)):
        sweep("vsi.no_such_knob", [1.0, 2.0])
