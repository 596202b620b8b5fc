"""Shared fixtures and the acceptance summary hook."""

import re

import numpy as np
import pytest

from dcchain import (
    ChainParams,
    NineBusParams,
    build_ninebus,
    build_sdcib,
    linearize,
    modal_analysis,
    set_param,
    solve_equilibrium,
)


@pytest.fixture(scope="session")
def chain_case():
    """Default chain model solved at its nominal load."""
    params = ChainParams()
    model = build_sdcib(params)
    op = solve_equilibrium(model, [params.p_load])
    return params, model, op


@pytest.fixture(scope="session")
def chain_modal(chain_case):
    _, model, op = chain_case
    red = linearize(model, op)
    return red, modal_analysis(red)


@pytest.fixture(scope="session")
def table_case():
    """Chain with the VSI voltage loop at 80 Hz, the setting the bundled
    reference mode table and amplification-peak values correspond to."""
    params = ChainParams()
    set_param(params, "vsi.v_bw_hz", 80.0)
    model = build_sdcib(params)
    op = solve_equilibrium(model, [params.p_load])
    return params, model, op


@pytest.fixture(scope="session")
def table_modal(table_case):
    _, model, op = table_case
    red = linearize(model, op)
    return red, modal_analysis(red)


@pytest.fixture(scope="session")
def ninebus_case():
    params = NineBusParams()
    model = build_ninebus(params)
    op = solve_equilibrium(model, [params.p_load])
    return params, model, op


_CRITERION = re.compile(r"::test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One verdict line per acceptance criterion."""
    tr = terminalreporter
    verdicts = {}
    for status in ("passed", "xfailed", "failed", "error", "xpassed"):
        for rep in tr.stats.get(status, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if m:
                verdicts.setdefault(int(m.group(1)), []).append(status)
    if not verdicts:
        return
    tr.write_sep("-", "acceptance criteria")
    for k in sorted(verdicts):
        bad = [s for s in verdicts[k] if s in ("failed", "error", "xpassed")]
        tr.write_line("criterion %02d: %s" % (k, "FAIL" if bad else "PASS"))
