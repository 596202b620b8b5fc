"""Scenario configuration: YAML schema, validation, parameter overrides.

A scenario names a topology, a set of dotted parameter overrides, the
analyses to run, per-analysis options, and an output directory. Validation
is strict: unknown top-level keys, unknown analyses, unknown option names,
and non-numeric overrides are all rejected up front so a typo cannot
silently run the wrong study.
"""

import os
from dataclasses import dataclass, field

import yaml

from .params import default_chain_params, default_ninebus_params, set_param

TOPOLOGIES = ("sdcib", "ninebus")

ANALYSES = ("equilibrium", "modes", "poa", "simulate", "spectrum", "sweep",
            "validate-fullorder", "tune")

# recognized option names per analysis
OPTION_KEYS = {
    "equilibrium": {"tol"},
    "modes": {"top_n"},
    "poa": {"channel", "f_min_hz", "f_max_hz", "n_points"},
    "simulate": {"input", "t_end", "dt", "signals"},
    "spectrum": {"signal", "t_a", "t_b"},
    "sweep": {"param", "start", "stop", "num", "spacing", "values", "top_k"},
    "validate-fullorder": {"t_end", "dt", "t_step", "p_from", "p_to"},
    "tune": set(),
}

TOP_KEYS = {"topology", "overrides", "analyses", "options", "out_dir"}

OUT_DIR_ENV = "DCCHAIN_OUT"


@dataclass
class ScenarioConfig:
    """Validated scenario description."""
    topology: str = "sdcib"
    overrides: dict = field(default_factory=dict)
    analyses: list = field(default_factory=lambda: ["equilibrium"])
    options: dict = field(default_factory=dict)
    out_dir: str = ""

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise ValueError("unknown topology %r (choose from %s)"
                             % (self.topology, "/".join(TOPOLOGIES)))
        for a in self.analyses:
            if a not in ANALYSES:
                raise ValueError("unknown analysis %r (choose from %s)"
                                 % (a, ", ".join(ANALYSES)))
        for a, opts in self.options.items():
            if a not in ANALYSES:
                raise ValueError("options given for unknown analysis %r" % a)
            unknown = set(opts) - OPTION_KEYS[a]
            if unknown:
                raise ValueError("unknown option %s for analysis %r"
                                 % (sorted(unknown), a))
        clean = {}
        for path, val in self.overrides.items():
            clean[str(path)] = _numeric(path, val)
        self.overrides = clean
        if not self.out_dir:
            self.out_dir = os.environ.get(OUT_DIR_ENV, "runs")

    def option(self, analysis, key, default=None):
        return self.options.get(analysis, {}).get(key, default)


def _numeric(path, val):
    if isinstance(val, bool) or not isinstance(val, (int, float, str)):
        raise ValueError("override %r must be numeric, got %r" % (path, val))
    try:
        return float(val)
    except (TypeError, ValueError):
        raise ValueError("override %r must be numeric, got %r" % (path, val))


def from_dict(d):
    """ScenarioConfig from a plain mapping, rejecting unknown keys."""
    if not isinstance(d, dict):
        raise ValueError("config root must be a mapping, got %s"
                         % type(d).__name__)
    unknown = set(d) - TOP_KEYS
    if unknown:
        raise ValueError("unknown config keys %s (allowed: %s)"
                         % (sorted(unknown), ", ".join(sorted(TOP_KEYS))))
    analyses = d.get("analyses", ["equilibrium"])
    if isinstance(analyses, str):
        analyses = [analyses]
    return ScenarioConfig(
        topology=d.get("topology", "sdcib"),
        overrides=dict(d.get("overrides") or {}),
        analyses=list(analyses),
        options={k: dict(v or {}) for k, v in (d.get("options") or {}).items()},
        out_dir=d.get("out_dir", ""),
    )


def load_config(path):
    """Parse a YAML scenario file into a validated ScenarioConfig."""
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if data is None:
        data = {}
    return from_dict(data)


def build_params(cfg):
    """Default parameter set for the topology with overrides applied."""
    if cfg.topology == "ninebus":
        params = default_ninebus_params()
    else:
        params = default_chain_params()
    for path, val in sorted(cfg.overrides.items()):
        set_param(params, path, val)
    return params


def effective_params(params, prefix=""):
    """Flatten a parameter tree into sorted (dotted_name, value) pairs."""
    items = []
    fields_ = getattr(params, "__dataclass_fields__", None)
    if fields_ is None:
        return [(prefix.rstrip("."), params)]
    for name in fields_:
        val = getattr(params, name)
        dotted = prefix + name
        if hasattr(val, "__dataclass_fields__"):
            items.extend(effective_params(val, dotted + "."))
        else:
            items.append((dotted, val))
    return sorted(items)
