"""Wiring of component blocks into one differential-algebraic system.

The assembled model exposes the stacked residual

    f(x, y, w) = 0-order derivatives of the n_x differential states
    g(x, y, w) = 0 for the n_y algebraic unknowns

plus named output channels h(x, y, w). Blocks exchange values only through
named signals; a port without a matching export is a build-time error.
"""

import numpy as np

from . import blocks as _blocks
from .params import ChainParams


class IndexMap:
    """Bijection between variable names and positions in a flat vector."""

    def __init__(self, names):
        self._names = list(names)
        self._idx = {}
        for i, n in enumerate(self._names):
            if n in self._idx:
                raise ValueError("duplicate variable name %r" % n)
            self._idx[n] = i

    def index(self, name):
        try:
            return self._idx[name]
        except KeyError:
            raise KeyError("unknown variable %r; known: %s"
                           % (name, ", ".join(self._names)))

    def name(self, i):
        return self._names[i]

    @property
    def names(self):
        return list(self._names)

    def __len__(self):
        return len(self._names)

    def __contains__(self, name):
        return name in self._idx

    def __iter__(self):
        return iter(self._names)


class SystemModel:
    """A set of blocks wired by name into one DAE with named outputs.

    outputs is a list of (name, fn) where fn maps the signal dict to a float.
    w_names labels the exogenous input vector.
    """

    def __init__(self, blocks, w_names, outputs, name="system", params=None):
        self.name = name
        self.blocks = list(blocks)
        self.w_names = list(w_names)
        self.params = params
        self._outputs = list(outputs)
        self.output_names = [nm for nm, _ in outputs]
        self._fast_residual = None

        x_names, y_names = [], []
        self._x_slices, self._y_slices = [], []
        providers = {}
        for blk in self.blocks:
            self._x_slices.append(slice(len(x_names), len(x_names) + blk.n_x))
            self._y_slices.append(slice(len(y_names), len(y_names) + blk.n_y))
            x_names.extend(blk.state_names)
            y_names.extend(blk.alg_names)
            for sig in blk.exports:
                if sig in providers:
                    raise ValueError(
                        "signal %r exported by both %r and %r"
                        % (sig, providers[sig], blk.name))
                providers[sig] = blk.name
        self.x_index = IndexMap(x_names)
        self.y_index = IndexMap(y_names)
        for blk in self.blocks:
            for port in blk.ports:
                if port not in providers:
                    raise ValueError(
                        "block %r reads signal %r but no block exports it"
                        % (blk.name, port))
        self._providers = providers

    @property
    def n_x(self):
        return len(self.x_index)

    @property
    def n_y(self):
        return len(self.y_index)

    @property
    def n_w(self):
        return len(self.w_names)

    @property
    def n_h(self):
        return len(self._outputs)

    def signals(self, x, y, w):
        """Evaluate every exported signal. Inlined quantities are reachable here."""
        sig = {}
        for blk, xs, ys in zip(self.blocks, self._x_slices, self._y_slices):
            xb, yb = x[xs], y[ys]
            for nm, fn in blk.exports.items():
                sig[nm] = fn(xb, yb, None, w)
        return sig

    def signal(self, name, x, y, w):
        """Evaluate one exported signal by name."""
        for blk, xs, ys in zip(self.blocks, self._x_slices, self._y_slices):
            if name in blk.exports:
                return blk.exports[name](x[xs], y[ys], None, w)
        raise KeyError("no block exports signal %r" % name)

    def residual(self, x, y, w):
        """Stacked residual (f, g). Deterministic: a pure function of (x, y, w)."""
        if self._fast_residual is not None:
            return self._fast_residual(x, y, w)
        return self._residual_blocks(x, y, w)

    def _residual_blocks(self, x, y, w):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        w = np.asarray(w, dtype=float)
        sig = self.signals(x, y, w)
        f = np.empty(self.n_x)
        g = np.empty(self.n_y)
        for blk, xs, ys in zip(self.blocks, self._x_slices, self._y_slices):
            u = {port: sig[port] for port in blk.ports}
            fb, gb = blk.residual(x[xs], y[ys], u, w)
            f[xs] = fb
            g[ys] = gb
        return f, g

    def output(self, x, y, w):
        """Evaluate the named output channels as a vector."""
        sig = self.signals(np.asarray(x, float), np.asarray(y, float),
                           np.asarray(w, float))
        return np.array([fn(sig) for _, fn in self._outputs])

    def block_slice(self, name):
        """(x_slice, y_slice) of the named block in the global vectors."""
        for blk, xs, ys in zip(self.blocks, self._x_slices, self._y_slices):
            if blk.name == name:
                return xs, ys
        raise KeyError("no block named %r" % name)

    def __repr__(self):
        return "SystemModel(%r, n_x=%d, n_y=%d, n_w=%d, n_h=%d)" % (
            self.name, self.n_x, self.n_y, self.n_w, self.n_h)


def build_sdcib(params=None):
    """Delivery chain against a stiff grid: 21 states, 12 algebraics, 1 input.

    Input vector w = [p_load]. Output channel: active power drawn at the
    point of common coupling.
    """
    if params is None:
        params = ChainParams()
    blks = [
        _blocks.AfeBlock(params.afe, params.w_b, params.w_s),
        _blocks.VsiBlock(params.vsi, params.w_b),
        _blocks.DcLinkBlock(params.afe.c_dc, params.w_b),
        _blocks.PsuBlock(params.psu, params.w_b),
        _blocks.DcdcBlock(params.dcdc, params.w_b),
        _blocks.TheveninGridBlock(params.grid),
    ]
    outputs = [
        ("p_pcc", lambda s: float(s["v_ri_pcc"] @ s["i_ri_afe"])),
        ("p_vsi", lambda s: float(s["v_uv_vsi"] @ s["i_uv_vsi"])),
    ]
    model = SystemModel(blks, ["p_load"], outputs, name="sdcib", params=params)
    try:
        from . import kernels
        kernels.attach(model)
    except ImportError:
        pass
    return model
