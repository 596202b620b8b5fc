"""Newton solves of the chain operating point."""

import numpy as np
import pytest

from dcchain import (
    ChainParams,
    EquilibriumError,
    build_sdcib,
    initial_guess,
    solve_equilibrium,
)
from dcchain.equilibrium import chain_guess_at_pcc, sdcib_initial_guess


def test_solved_point_is_tight(chain_case):
    _, model, op = chain_case
    assert op.converged
    assert op.residual_inf <= 1e-10
    f, g = model.residual(op.x, op.y, op.w)
    assert max(np.abs(f).max(), np.abs(g).max()) <= 1e-10


def test_regulated_quantities_at_references(chain_case):
    params, model, op = chain_case
    assert abs(op.state(model, "v_dc_ups") - params.afe.vdc_ref) < 1e-9
    assert abs(op.state(model, "v_psu") - params.psu.v_ref) < 1e-9
    assert abs(op.state(model, "v_eq") - params.dcdc.v_ref) < 1e-9
    assert abs(op.state(model, "i_q_afe")) < 1e-9
    assert abs(op.state(model, "v_q_pll")) < 1e-9


def test_lookup_by_name(chain_case):
    _, model, op = chain_case
    i = model.x_index.index("v_dc_ups")
    assert op.state(model, "v_dc_ups") == op.x[i]
    assert op.alg(model, "v_r_pcc") == op.y[model.y_index.index("v_r_pcc")]
    with pytest.raises(KeyError):
        op.state(model, "no_such_state")


def test_analytic_guess_is_nearly_exact(chain_case):
    """The closed-form starting point already satisfies the chain."""
    params, model, _ = chain_case
    x0, y0 = sdcib_initial_guess(params, np.array([params.p_load]))
    f, g = model.residual(x0, y0, np.array([params.p_load]))
    assert max(np.abs(f).max(), np.abs(g).max()) < 1e-6


def test_initial_guess_dispatch(chain_case):
    _, model, _ = chain_case
    x0, y0 = initial_guess(model, np.array([0.5]))
    assert x0.shape == (21,)
    assert y0.shape == (12,)


def test_solve_across_load_range():
    model = build_sdcib()
    for w in (0.1, 0.35, 0.8, 1.0):
        op = solve_equilibrium(model, [w])
        assert op.converged
        assert op.residual_inf <= 1e-10
        p_pcc = model.output(op.x, op.y, op.w)[0]
        assert w < p_pcc < w * 1.15 + 1e-6


def test_custom_start_point(chain_case):
    """A perturbed start still converges to the same point."""
    params, model, op = chain_case
    rng = np.random.default_rng(7)
    x0 = op.x + 0.02 * rng.normal(size=op.x.size)
    y0 = op.y + 0.02 * rng.normal(size=op.y.size)
    op2 = solve_equilibrium(model, [params.p_load], x0=x0, y0=y0)
    assert np.abs(op2.x - op.x).max() < 1e-8


def test_infeasible_load_rejected_at_seed():
    model = build_sdcib()
    with pytest.raises(ValueError, match="exceeds"):
        solve_equilibrium(model, [200.0])


def test_nonconvergence_reported(chain_case):
    params, model, op = chain_case
    err = None
    with pytest.raises(EquilibriumError) as err:
        solve_equilibrium(model, [params.p_load],
                          x0=op.x + 10.0, y0=op.y + 10.0, max_iter=2)
    assert err.value.residual_inf is not None
    assert err.value.worst  # names the worst residual entries


def test_pcc_guess_reports_drawn_power():
    params = ChainParams()
    x, y_chain, p_pcc = chain_guess_at_pcc(params, 0.5, complex(1.0, 0.0))
    assert x.shape == (21,)
    assert y_chain.shape == (10,)
    assert 0.5 < p_pcc < 0.55
