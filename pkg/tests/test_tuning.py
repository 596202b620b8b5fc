"""PI gain selection rules against the reference gain set."""

import numpy as np
import pytest

from dcchain import ChainParams, FullOrderParams, TuningSpec, tune, tune_pair
from dcchain.params import W_BASE


def sig3(v):
    """Round to three significant figures."""
    return float("%.2e" % v)


# (kind, f_bw_hz, zeta, plant kwargs, kp, ki) for every loop in the chain.
REFERENCE_GAINS = [
    ("pll", 20.0, 0.707, {}, 0.471, 41.89),
    ("voltage", 5.0, 1.0, {"c": 2.0}, 0.333, 5.236),
    ("current", 200.0, 0.707, {"l": 0.05, "r": 0.003}, 0.233, 209.4),
    ("voltage", 100.0, 1.0, {"c": 0.2}, 0.667, 209.4),
    ("current", 400.0, 1.0, {"l": 0.05, "r": 0.003}, 0.664, 837.8),
    ("voltage", 10.0, 1.0, {"c": 2.0}, 0.667, 20.94),
    ("voltage", 100.0, 1.0, {"c": 0.2}, 0.667, 209.4),
    ("current", 1000.0, 1.0, {"l": 0.05, "r": 0.005}, 1.6617, 5236.0),
]


@pytest.mark.parametrize("kind,fbw,zeta,plant,kp_ref,ki_ref", REFERENCE_GAINS)
def test_reference_gains(kind, fbw, zeta, plant, kp_ref, ki_ref):
    kp, ki = tune_pair(kind, fbw, zeta, W_BASE, **plant)
    assert sig3(kp) == sig3(kp_ref)
    assert sig3(ki) == sig3(ki_ref)


def test_default_params_carry_tuned_gains():
    p = ChainParams()
    assert sig3(p.afe.kp_pll) == sig3(0.471)
    assert sig3(p.afe.ki_pll) == sig3(41.89)
    assert sig3(p.afe.kp_dc) == sig3(0.333)
    assert sig3(p.afe.kp_c) == sig3(0.233)
    assert sig3(p.vsi.kp_v) == sig3(0.667)
    assert sig3(p.vsi.ki_v) == sig3(209.4)
    assert sig3(p.vsi.kp_c) == sig3(0.664)
    assert sig3(p.psu.kp_v) == sig3(0.667)
    assert sig3(p.psu.ki_v) == sig3(20.94)
    assert sig3(p.dcdc.kp_v) == sig3(0.667)


def test_fullorder_current_loops():
    p = FullOrderParams()
    assert sig3(p.kp_c_psu) == sig3(1.6617)
    assert sig3(p.ki_c_psu) == sig3(5236.0)
    assert sig3(p.kp_c_eq) == sig3(1.6617)
    assert sig3(p.ki_c_eq) == sig3(5236.0)


def test_tune_round_trip():
    """Recover (f_bw, zeta) from the produced gains."""
    kp, ki = tune_pair("voltage", 37.0, 0.8, W_BASE, c=0.2)
    wn = np.sqrt(ki * W_BASE / 0.2)
    zeta = kp * W_BASE / (2 * wn * 0.2)
    assert np.isclose(wn / (2 * np.pi), 37.0, rtol=1e-12)
    assert np.isclose(zeta, 0.8, rtol=1e-12)

    kp, ki = tune_pair("current", 250.0, 0.9, W_BASE, l=0.05, r=0.01)
    wn = np.sqrt(ki * W_BASE / 0.05)
    zeta = (kp + 0.01) * W_BASE / (2 * wn * 0.05)
    assert np.isclose(wn / (2 * np.pi), 250.0, rtol=1e-12)
    assert np.isclose(zeta, 0.9, rtol=1e-12)


def test_invalid_specs_rejected():
    with pytest.raises(ValueError):
        TuningSpec("integral", 10.0, 1.0)
    with pytest.raises(ValueError):
        TuningSpec("pll", -5.0, 1.0)
    with pytest.raises(ValueError):
        TuningSpec("pll", 10.0, 0.0)
    with pytest.raises(ValueError):
        tune(TuningSpec("voltage", 10.0, 1.0), W_BASE)  # missing capacitance
    with pytest.raises(ValueError):
        tune(TuningSpec("current", 10.0, 1.0), W_BASE)  # missing inductance
    with pytest.raises(ValueError):
        # bandwidth so low the resistance term flips the sign of kp
        tune(TuningSpec("current", 0.05, 1.0, l=0.05, r=0.01), W_BASE)
