"""Throughput comparison of the residual backends and the integrator.

The chain residual exists three ways: block-by-block evaluation (the
reference), the pure-Python flat kernel, and the compiled kernel. This
module times all available ones on identical inputs, plus a short step
response through the integrator with and without the fast path.
"""

import time

from . import kernels
from .assembly import build_sdcib
from .equilibrium import solve_equilibrium
from .params import ChainParams
from .timedomain import InputSignal, simulate


def _mean_time(fn, n):
    t0 = time.perf_counter()
    for _ in range(n):
        fn()
    return (time.perf_counter() - t0) / n


def run_bench(n_eval=2000, with_simulate=True):
    """Benchmark report lines; cheap enough to run on every install."""
    params = ChainParams()
    model = build_sdcib(params)
    op = solve_equilibrium(model, [params.p_load])
    x, y, w = op.x, op.y, op.w
    pvec = kernels.pack_chain(params)

    lines = ["residual backends (mean over repeated evaluation at the "
             "operating point):"]
    base = _mean_time(lambda: model._residual_blocks(x, y, w),
                      max(n_eval // 10, 1))
    lines.append("  %-18s %9.2f us" % ("blocks", 1e6 * base))
    for name, module in kernels.implementations():
        per = _mean_time(
            lambda m=module: kernels.chain_residual(x, y, w, pvec, m), n_eval)
        lines.append("  %-18s %9.2f us   %6.1fx vs blocks"
                     % (name + " kernel", 1e6 * per, base / per))
    lines.append("active backend: %s" % kernels.backend())

    if with_simulate:
        sig = InputSignal.step(0.1, params.p_load, params.p_load + 0.05)
        plain = build_sdcib(params)
        plain._fast_residual = None
        lines.append("")
        lines.append("1 s step response at dt = 0.5 ms:")
        for name, m in (("%s kernel" % kernels.backend(), model),
                        ("blocks", plain)):
            t0 = time.perf_counter()
            simulate(m, 1.0, 5e-4, sig, op0=op)
            lines.append("  %-18s %9.3f s" % (name, time.perf_counter() - t0))
    return lines


if __name__ == "__main__":
    for line in run_bench():
        print(line)
