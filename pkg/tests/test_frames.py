"""Rotating-frame algebra."""

import numpy as np
import pytest

from dcchain.frames import (
    J,
    PerUnitBase,
    derotate,
    from_complex,
    impedance_matrix,
    jmul,
    rotate,
    rotation,
    to_complex,
    wrap_angle,
)


def test_rotate_identity():
    assert np.allclose(rotate(np.array([1.0, 0.0]), 0.0), [1.0, 0.0])


def test_rotate_quarter_turn():
    assert np.allclose(rotate(np.array([1.0, 0.0]), np.pi / 2), [0.0, -1.0])


def test_rotate_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(50):
        th = rng.uniform(-10, 10)
        v = rng.normal(size=2)
        assert np.allclose(derotate(rotate(v, th), th), v, atol=1e-12)


def test_rotation_orthogonal():
    rng = np.random.default_rng(4)
    for th in rng.uniform(-10, 10, size=100):
        r = rotation(th)
        assert np.allclose(r.T, rotation(-th), atol=1e-12)
        assert np.isclose(np.linalg.det(r), 1.0, atol=1e-12)


def test_jmul_columns():
    assert np.allclose(jmul(np.array([1.0, 0.0])), [0.0, 1.0])
    assert np.allclose(jmul(np.array([0.0, 1.0])), [-1.0, 0.0])


def test_jmul_square_is_negation():
    rng = np.random.default_rng(5)
    for _ in range(20):
        v = rng.normal(size=2)
        assert np.allclose(jmul(jmul(v)), -v, atol=1e-14)


def test_j_skew_symmetry():
    rng = np.random.default_rng(6)
    for _ in range(20):
        v = rng.normal(size=2)
        assert abs(v @ (J @ v)) < 1e-14


def test_wrap_angle():
    assert wrap_angle(0.0) == 0.0
    assert np.isclose(wrap_angle(3 * np.pi), np.pi)
    assert np.isclose(wrap_angle(-np.pi), np.pi)
    arr = wrap_angle(np.array([0.0, 2 * np.pi, -3 * np.pi]))
    assert np.allclose(arr, [0.0, 0.0, np.pi])


def test_impedance_matrix_matches_complex_product():
    z = complex(0.02, 0.19)
    i = complex(0.4, -0.3)
    drop = impedance_matrix(z.real, z.imag) @ from_complex(i)
    assert np.isclose(to_complex(drop), z * i)


def test_per_unit_base():
    base = PerUnitBase(s_base=10e6, v_base=480.0, f_base=60.0)
    assert np.isclose(base.omega_base, 2 * np.pi * 60)
    assert np.isclose(base.z_base, 480.0 ** 2 / 10e6)
    assert np.isclose(base.current_si(1.0), 10e6 / (np.sqrt(3) * 480.0))
    assert np.isclose(base.power_si(0.5), 5e6)
    assert np.isclose(base.voltage_si(1.05), 504.0)
    assert np.isclose(base.frequency_si(1.0), 60.0)


def test_per_unit_base_rejects_nonpositive():
    with pytest.raises(ValueError):
        PerUnitBase(s_base=0.0)
