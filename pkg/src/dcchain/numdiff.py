"""Shared central finite-difference facility.

One stepping rule for the whole package so Newton solves and linearization
agree: h_i = max(abs_floor, rel * |z_i|) with central differences.
"""

import numpy as np

REL_STEP = 1e-6
ABS_FLOOR = 1e-6


def step_size(value, rel=REL_STEP, floor=ABS_FLOOR):
    """Central-difference step for one coordinate."""
    return max(floor, rel * abs(value))


def jacobian(fun, z0, rel=REL_STEP, floor=ABS_FLOOR):
    """Dense Jacobian of fun: R^n -> R^m at z0 by central differences.

    fun must accept a 1-D array and return a 1-D array of fixed length.
    """
    z0 = np.asarray(z0, dtype=float)
    n = z0.size
    f0 = np.asarray(fun(z0), dtype=float)
    jac = np.empty((f0.size, n))
    for i in range(n):
        h = step_size(z0[i], rel, floor)
        zp = z0.copy()
        zm = z0.copy()
        zp[i] += h
        zm[i] -= h
        jac[:, i] = (np.asarray(fun(zp), float)
                     - np.asarray(fun(zm), float)) / (2.0 * h)
    return jac


def directional(fun, z0, dz, rel=REL_STEP, floor=ABS_FLOOR):
    """Central-difference directional derivative of fun at z0 along dz."""
    z0 = np.asarray(z0, dtype=float)
    dz = np.asarray(dz, dtype=float)
    scale = np.linalg.norm(dz)
    if scale == 0.0:
        return np.zeros_like(np.asarray(fun(z0), float))
    h = step_size(np.linalg.norm(z0) / scale if scale else 1.0, rel, floor)
    return (np.asarray(fun(z0 + h * dz), float)
            - np.asarray(fun(z0 - h * dz), float)) / (2.0 * h)
