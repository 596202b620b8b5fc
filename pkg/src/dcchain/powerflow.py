"""Small Newton power-flow solver for meshed transmission networks.

Buses are 'slack' (fixed voltage phasor), 'pv' (fixed P injection and
voltage magnitude), or 'pq' (fixed P, Q injection). Everything is per unit
on the system base; injections are positive into the network.
"""

from dataclasses import dataclass
import numpy as np

from . import numdiff


@dataclass
class PfBus:
    kind: str
    p: float = 0.0
    q: float = 0.0
    v_set: float = 1.0


@dataclass
class PfLine:
    f: int
    t: int
    r: float
    x: float
    b: float = 0.0


@dataclass
class PfResult:
    v: np.ndarray
    s_inj: np.ndarray
    iterations: int
    mismatch: float

    def vm(self, k):
        return abs(self.v[k])

    def va(self, k):
        return np.angle(self.v[k])


def build_ybus(n_bus, lines, shunts=None):
    """Complex bus admittance matrix from series branches and shunt values.

    shunts: optional iterable of (bus, y_complex) added to the diagonal.
    Line charging b is total; half lands on each end.
    """
    y = np.zeros((n_bus, n_bus), dtype=complex)
    for ln in lines:
        ys = 1.0 / complex(ln.r, ln.x)
        ysh = 0.5j * ln.b
        y[ln.f, ln.f] += ys + ysh
        y[ln.t, ln.t] += ys + ysh
        y[ln.f, ln.t] -= ys
        y[ln.t, ln.f] -= ys
    for (k, ysh) in (shunts or []):
        y[k, k] += ysh
    return y


def injections(y_bus, v):
    """Complex power injected at each bus for voltage phasors v."""
    return v * np.conj(y_bus @ v)


def solve_pf(y_bus, buses, tol=1e-12, max_iter=40):
    """Newton power flow; returns the PfResult or raises on divergence."""
    n = len(buses)
    kinds = [b.kind for b in buses]
    if kinds.count("slack") != 1:
        raise ValueError("exactly one slack bus required")
    i_slack = kinds.index("slack")
    idx_ang = [k for k in range(n) if kinds[k] != "slack"]
    idx_mag = [k for k in range(n) if kinds[k] == "pq"]

    vm = np.array([b.v_set if b.kind != "pq" else 1.0 for b in buses])
    va = np.zeros(n)
    p_sched = np.array([b.p for b in buses])
    q_sched = np.array([b.q for b in buses])

    def unpack(z):
        ang = va.copy()
        mag = vm.copy()
        ang[idx_ang] = z[:len(idx_ang)]
        mag[idx_mag] = z[len(idx_ang):]
        return mag * np.exp(1j * ang)

    def mismatch(z):
        s = injections(y_bus, unpack(z))
        return np.concatenate([
            s.real[idx_ang] - p_sched[idx_ang],
            s.imag[idx_mag] - q_sched[idx_mag],
        ])

    z = np.concatenate([va[idx_ang], vm[idx_mag]])
    mis = mismatch(z)
    it = 0
    while np.abs(mis).max() > tol and it < max_iter:
        jac = numdiff.jacobian(mismatch, z, rel=1e-7, floor=1e-7)
        z = z + np.linalg.solve(jac, -mis)
        mis = mismatch(z)
        it += 1
    if np.abs(mis).max() > tol:
        raise RuntimeError("power flow did not converge: mismatch %.3e after "
                           "%d iterations" % (np.abs(mis).max(), it))
    v = unpack(z)
    return PfResult(v=v, s_inj=injections(y_bus, v), iterations=it,
                    mismatch=float(np.abs(mismatch(z)).max()))


def network_closure(injections_ri, loads, params, slack_bus=0,
                    v_slack=1.0 + 0.0j):
    """Bus voltages of an algebraic network under fixed current injections.

    injections_ri maps bus index to a stationary-frame current pair (a dict,
    or an (n, 2) array covering every bus); loads is an iterable of
    (bus, p, q) records folded in as constant impedances at nominal voltage;
    params is the complex bus admittance matrix, or any object carrying one
    as a y_bus attribute. The slack bus is dropped from the current balance
    and pinned to v_slack, so a network with no loads and no injections
    returns the slack phasor everywhere.

    Returns an (n, 2) array of bus voltages. Raises ValueError naming the
    offending bus when the pinned network matrix is singular.
    """
    y = np.array(getattr(params, "y_bus", params), dtype=complex)
    n = y.shape[0]
    i_inj = np.zeros(n, dtype=complex)
    if isinstance(injections_ri, dict):
        for k, i_ri in injections_ri.items():
            i_inj[k] = complex(i_ri[0], i_ri[1])
    elif injections_ri is not None:
        arr = np.asarray(injections_ri, dtype=float)
        i_inj[:] = arr[:, 0] + 1j * arr[:, 1]
    for k, pl, ql in (loads or ()):
        y[k, k] += complex(pl, -ql)

    a = y
    b = i_inj
    a[slack_bus, :] = 0.0
    a[slack_bus, slack_bus] = 1.0
    b[slack_bus] = complex(v_slack)

    row_max = np.max(np.abs(a), axis=1)
    if not row_max.all():
        bad = int(np.argmin(row_max))
        raise ValueError("singular network: bus %d is isolated" % bad)
    sing = np.linalg.svd(a, compute_uv=False)
    if sing[-1] <= 1e-12 * sing[0]:
        null = np.linalg.svd(a)[2][-1]
        bad = int(np.argmax(np.abs(null)))
        raise ValueError("singular network: bus %d sits in a floating "
                         "island" % bad)
    v = np.linalg.solve(a, b)
    return np.column_stack([v.real, v.imag])
