"""PI gain selection from loop bandwidth and damping targets.

Each rule places the closed-loop poles of the idealized single-loop plant at
natural frequency ``wn = 2*pi*f_bw`` with damping ``zeta``:

* ``voltage``: integrator plant C/wb (capacitor charge balance),
  kp = 2*zeta*wn*C/wb, ki = wn^2*C/wb.
* ``current``: RL plant, kp = 2*zeta*wn*L/wb - R, ki = wn^2*L/wb.
* ``pll``: unity phase plant, kp = 2*zeta*wn/wb, ki = wn^2/wb.

All quantities per unit except f_bw (Hz); wb is the angular frequency base.
"""

import numpy as np

LOOP_KINDS = ("voltage", "current", "pll")


class TuningSpec:
    """Bandwidth/damping target for one PI loop.

    kind is one of 'voltage', 'current', 'pll'. l, r are the per-unit plant
    inductance and resistance (current loops), c the capacitance (voltage
    loops); unused entries may stay zero.
    """

    def __init__(self, kind, f_bw_hz, zeta, l=0.0, r=0.0, c=0.0):
        if kind not in LOOP_KINDS:
            raise ValueError("unknown loop kind %r; expected one of %s"
                             % (kind, (LOOP_KINDS,)))
        if f_bw_hz <= 0.0:
            raise ValueError("loop bandwidth must be positive, got %g" % f_bw_hz)
        if zeta <= 0.0:
            raise ValueError("damping ratio must be positive, got %g" % zeta)
        self.kind = kind
        self.f_bw_hz = float(f_bw_hz)
        self.zeta = float(zeta)
        self.l = float(l)
        self.r = float(r)
        self.c = float(c)

    def __repr__(self):
        return ("TuningSpec(kind=%r, f_bw_hz=%g, zeta=%g, l=%g, r=%g, c=%g)"
                % (self.kind, self.f_bw_hz, self.zeta, self.l, self.r, self.c))


def tune(spec, w_base):
    """Return (kp, ki) for a TuningSpec at angular frequency base w_base.

    Raises ValueError if a current-loop rule yields kp <= 0 (bandwidth too low
    relative to the plant resistance) so a silent sign error cannot propagate
    into a model.
    """
    wn = 2.0 * np.pi * spec.f_bw_hz
    if spec.kind == "voltage":
        if spec.c <= 0.0:
            raise ValueError("voltage loop requires a positive capacitance")
        kp = 2.0 * spec.zeta * wn * spec.c / w_base
        ki = wn ** 2 * spec.c / w_base
    elif spec.kind == "current":
        if spec.l <= 0.0:
            raise ValueError("current loop requires a positive inductance")
        kp = 2.0 * spec.zeta * wn * spec.l / w_base - spec.r
        ki = wn ** 2 * spec.l / w_base
        if kp <= 0.0:
            raise ValueError(
                "current loop bandwidth %g Hz gives non-positive kp=%g "
                "(plant r=%g too large for this bandwidth)"
                % (spec.f_bw_hz, kp, spec.r))
    else:
        kp = 2.0 * spec.zeta * wn / w_base
        ki = wn ** 2 / w_base
    return float(kp), float(ki)


def tune_pair(kind, f_bw_hz, zeta, w_base, l=0.0, r=0.0, c=0.0):
    """Convenience wrapper building the TuningSpec inline."""
    return tune(TuningSpec(kind, f_bw_hz, zeta, l=l, r=r, c=c), w_base)
