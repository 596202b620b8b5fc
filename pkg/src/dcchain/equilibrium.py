"""Operating-point computation: closed-form seeding plus damped Newton polish."""

from dataclasses import dataclass, field
import numpy as np

from . import numdiff
from .frames import J, rotation


@dataclass
class OperatingPoint:
    """A solved equilibrium of an assembled model."""
    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    model_name: str = ""
    residual_inf: float = np.inf
    iterations: int = 0
    converged: bool = False
    labels: dict = field(default_factory=dict)

    def state(self, model, name):
        return float(self.x[model.x_index.index(name)])

    def alg(self, model, name):
        return float(self.y[model.y_index.index(name)])


class EquilibriumError(RuntimeError):
    """Newton failure with enough context to see what went wrong."""

    def __init__(self, message, residual_inf=None, worst=None, null_vector=None):
        RuntimeError.__init__(self, message)
        self.residual_inf = residual_inf
        self.worst = worst or []
        self.null_vector = null_vector


def chain_guess_at_pcc(params, p_load, v_pcc):
    """Chain equilibrium seed for a prescribed grid-node voltage phasor.

    Works backwards from the load: point-of-load stage, rack supply, UPS
    inverter bus, DC link, then the front-end current that covers the DC-link
    draw at |v_pcc|. Returns (x, y_chain, p_pcc) where x holds the 21 chain
    states, y_chain the 10 chain-owned algebraics and p_pcc the active power
    drawn at the node. Exact when every loss term lands where the residual
    expects it.
    """
    afe, vsi, psu, dcdc = params.afe, params.vsi, params.psu, params.dcdc
    w_s = params.w_s
    v_pcc = complex(v_pcc)

    v_eq = dcdc.v_ref
    i_eq = p_load / (3.0 * dcdc.v_ref ** 2) * v_eq
    xi_eq = i_eq / dcdc.ki_v
    v_psu = psu.v_ref
    i_psu = (v_eq / v_psu) * i_eq
    rhs = 3.0 * v_psu * i_psu / vsi.vu_ref ** 2
    disc = 1.0 - 4.0 * psu.r * rhs
    if disc < 0.0:
        raise ValueError("load %g exceeds what the rack supply can pass" % p_load)
    g_eq = (1.0 - np.sqrt(disc)) / (2.0 * psu.r)
    xi_psu = g_eq / psu.ki_v

    v_uv = np.array([vsi.vu_ref, 0.0])
    i_vsi = g_eq * v_uv
    i_cv = i_vsi - w_s * vsi.c * (J @ v_uv)
    xi_uv = i_vsi / vsi.ki_v
    m_uv = (v_uv + vsi.r * i_cv - w_s * vsi.l * (J @ i_cv)) / afe.vdc_ref
    gam_uv = (v_uv + vsi.r * i_cv) / vsi.ki_c
    p_dc = (m_uv @ i_cv) * afe.vdc_ref

    v_mag = abs(v_pcc)
    disc = v_mag ** 2 - 4.0 * afe.r * p_dc
    if disc < 0.0:
        raise ValueError("load %g exceeds grid-side transfer capability"
                         % p_load)
    i_d = (v_mag - np.sqrt(disc)) / (2.0 * afe.r)
    theta = np.angle(v_pcc)
    xi_dc = i_d / afe.ki_dc
    m_dq = np.array([v_mag - afe.r * i_d, afe.l * i_d]) / afe.vdc_ref
    gam_dq = np.array([(v_mag - afe.r * i_d) / afe.ki_c, 0.0])
    i_ri = rotation(theta).T @ np.array([i_d, 0.0])

    x = np.array([
        theta, 0.0, 0.0, i_d, 0.0, xi_dc, gam_dq[0], gam_dq[1],
        i_cv[0], i_cv[1], v_uv[0], v_uv[1], xi_uv[0], xi_uv[1],
        gam_uv[0], gam_uv[1], afe.vdc_ref, v_psu, xi_psu, v_eq, xi_eq,
    ])
    y_chain = np.array([
        m_dq[0], m_dq[1], i_ri[0], i_ri[1], m_uv[0], m_uv[1],
        g_eq, i_vsi[0], i_vsi[1], i_psu,
    ])
    return x, y_chain, v_mag * i_d


def sdcib_initial_guess(params, w):
    """Closed-form equilibrium seed for the chain against the stiff grid.

    Runs the backward pass of chain_guess_at_pcc inside a fixed-point
    iteration for the grid-side phasor. The Newton polish then converges in
    one or two steps.
    """
    p_load = float(np.asarray(w, float).ravel()[0])
    grid = params.grid
    z_g = complex(grid.r, grid.x)
    v_pcc = complex(grid.v_inf, 0.0)
    for _ in range(100):
        _, y_chain, _ = chain_guess_at_pcc(params, p_load, v_pcc)
        i_ph = complex(y_chain[2], y_chain[3])
        v_new = grid.v_inf - z_g * i_ph
        done = abs(v_new - v_pcc) < 1e-15
        v_pcc = v_new
        if done:
            break
    x, y_chain, _ = chain_guess_at_pcc(params, p_load, v_pcc)
    y = np.concatenate([y_chain, [v_pcc.real, v_pcc.imag]])
    return x, y


def initial_guess(model, w):
    """Topology-appropriate closed-form seed (x0, y0) for solve_equilibrium."""
    init = getattr(model, "initializer", None)
    if init is not None:
        return init(model, w)
    if model.name == "sdcib":
        return sdcib_initial_guess(model.params, w)
    raise ValueError("no initial-guess rule for model %r" % model.name)


def _worst_entries(model, f, g, count=5):
    names = model.x_index.names + model.y_index.names
    r = np.concatenate([f, g])
    order = np.argsort(-np.abs(r))[:count]
    return [(names[i], float(r[i])) for i in order]


def _null_direction(jac, model):
    _, s, vt = np.linalg.svd(jac)
    v = vt[-1]
    names = model.x_index.names + model.y_index.names
    order = np.argsort(-np.abs(v))[:5]
    return {
        "smallest_singular_value": float(s[-1]),
        "top_components": [(names[i], float(v[i])) for i in order],
    }


def solve_equilibrium(model, w, x0=None, y0=None, tol=1e-10, max_iter=50):
    """Damped Newton on the stacked residual down to an inf-norm of tol.

    Models flagged rank_deficient (a continuous symmetry leaves one neutral
    direction) are solved with a minimum-norm least-squares step; that pins
    the free phase at the seed instead of letting Newton drift along it.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if x0 is None or y0 is None:
        x0, y0 = initial_guess(model, w)
    n_x = model.n_x
    z = np.concatenate([np.asarray(x0, float), np.asarray(y0, float)])
    rank_deficient = bool(getattr(model, "rank_deficient", False))

    def stacked(zz):
        f, g = model.residual(zz[:n_x], zz[n_x:], w)
        return np.concatenate([f, g])

    res = stacked(z)
    norm = np.abs(res).max()
    it = 0
    while norm > tol and it < max_iter:
        jac = numdiff.jacobian(stacked, z)
        try:
            if rank_deficient:
                dz = np.linalg.lstsq(jac, -res, rcond=1e-8)[0]
            else:
                dz = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError:
            raise EquilibriumError(
                "Jacobian singular at iteration %d (residual %.3e); the "
                "neutral direction is reported in null_vector" % (it, norm),
                residual_inf=float(norm),
                worst=_worst_entries(model, res[:n_x], res[n_x:]),
                null_vector=_null_direction(jac, model))
        lam = 1.0
        accepted = False
        while lam >= 2.0 ** -30:
            res_try = stacked(z + lam * dz)
            norm_try = np.abs(res_try).max()
            if norm_try < norm:
                z = z + lam * dz
                res, norm = res_try, norm_try
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            raise EquilibriumError(
                "line search stalled at iteration %d (residual %.3e)"
                % (it, norm),
                residual_inf=float(norm),
                worst=_worst_entries(model, res[:n_x], res[n_x:]),
                null_vector=_null_direction(jac, model))
        it += 1

    if norm > tol:
        raise EquilibriumError(
            "no convergence in %d iterations (residual %.3e > %.1e)"
            % (max_iter, norm, tol),
            residual_inf=float(norm),
            worst=_worst_entries(model, res[:n_x], res[n_x:]))

    return OperatingPoint(
        x=z[:n_x].copy(), y=z[n_x:].copy(), w=w.copy(),
        model_name=model.name, residual_inf=float(norm),
        iterations=it, converged=True)
