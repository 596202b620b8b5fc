"""Rotating-frame algebra for two-axis (direct/quadrature) quantities.

All two-axis quantities are length-2 numpy arrays ``[first_axis, second_axis]``.
Angles are radians and are kept unwrapped; callers that need a principal value
can apply ``wrap_angle``.
"""

import numpy as np

# 90-degree rotation generator: J @ [a, b] = [-b, a].
J = np.array([[0.0, -1.0], [1.0, 0.0]])

E2 = np.array([0.0, 1.0])


def rotation(theta):
    """Rotation matrix mapping stationary-frame components into a frame at angle theta.

    R(theta) = [[cos, sin], [-sin, cos]]; R(theta) @ v rotates v by -theta.
    """
    c = np.cos(theta)
    s = np.sin(theta)
    return np.array([[c, s], [-s, c]])


def rotate(v, theta):
    """Rotate a two-axis vector into a frame at angle theta (R(theta) @ v)."""
    c = np.cos(theta)
    s = np.sin(theta)
    return np.array([c * v[0] + s * v[1], -s * v[0] + c * v[1]])


def derotate(v, theta):
    """Inverse of rotate: map local-frame components back to the stationary frame."""
    return rotate(v, -theta)


def jmul(v):
    """Multiply by the rotation generator: jmul(v) = [-v[1], v[0]]."""
    return np.array([-v[1], v[0]])


def wrap_angle(theta):
    """Wrap an angle (radians) to (-pi, pi]."""
    w = np.remainder(theta + np.pi, 2.0 * np.pi) - np.pi
    if np.isscalar(theta):
        if w == -np.pi:
            return np.pi
        return w
    return np.where(w == -np.pi, np.pi, w)


def impedance_matrix(r, x):
    """Series impedance as a 2x2 real matrix acting on [real, imag] current.

    Voltage drop = [[r, -x], [x, r]] @ i, the matrix form of (r + jx) * i.
    """
    return np.array([[r, -x], [x, r]])


def to_complex(v):
    """Pack a two-axis vector into a complex scalar v[0] + 1j*v[1]."""
    return complex(v[0], v[1])


def from_complex(z):
    """Unpack a complex scalar into a two-axis vector [re, im]."""
    return np.array([z.real, z.imag])


class PerUnitBase:
    """Per-unit base quantities for reporting physical units.

    All model equations are in per unit; this class only converts results.
    s_base is three-phase apparent power in VA, v_base a line-to-line RMS
    voltage in V, f_base the synchronous frequency in Hz.
    """

    def __init__(self, s_base=1.0, v_base=1.0, f_base=60.0):
        if s_base <= 0.0 or v_base <= 0.0 or f_base <= 0.0:
            raise ValueError("per-unit bases must be positive")
        self.s_base = float(s_base)
        self.v_base = float(v_base)
        self.f_base = float(f_base)

    @property
    def omega_base(self):
        """Angular frequency base in rad/s."""
        return 2.0 * np.pi * self.f_base

    @property
    def i_base(self):
        """Current base in A."""
        return self.s_base / (np.sqrt(3.0) * self.v_base)

    @property
    def z_base(self):
        """Impedance base in ohm."""
        return self.v_base ** 2 / self.s_base

    def power_si(self, p_pu):
        """Convert per-unit power to W (or var/VA)."""
        return p_pu * self.s_base

    def voltage_si(self, v_pu):
        """Convert per-unit voltage to V (line-to-line RMS)."""
        return v_pu * self.v_base

    def current_si(self, i_pu):
        """Convert per-unit current to A."""
        return i_pu * self.i_base

    def frequency_si(self, f_pu):
        """Convert per-unit frequency to Hz."""
        return f_pu * self.f_base

    def __repr__(self):
        return "PerUnitBase(s_base=%g, v_base=%g, f_base=%g)" % (
            self.s_base, self.v_base, self.f_base)
