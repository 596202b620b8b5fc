"""Dynamic simulation and small-signal analysis of a data-center
power-delivery chain, from the grid connection down to the GPU load,
with a nine-bus grid-coupling variant and scenario tooling on top.
"""

__version__ = "0.1.0"

from .params import (
    W_BASE,
    W_SYNC,
    GridParams,
    AfeParams,
    VsiParams,
    PsuParams,
    DcdcParams,
    ChainParams,
    FullOrderParams,
    SmParams,
    GfmParams,
    GflParams,
    NineBusParams,
    get_param,
    set_param,
)
from .tuning import TuningSpec, tune, tune_pair
from .assembly import SystemModel, build_sdcib
from .gridmodels import build_ninebus
from .equilibrium import (
    EquilibriumError,
    OperatingPoint,
    initial_guess,
    solve_equilibrium,
)
from .smallsignal import (
    ModalResult,
    PoaResult,
    ReducedSystem,
    SweepResult,
    linearize,
    modal_analysis,
    modal_poa_decomposition,
    multiport_poa,
    poa,
    sweep,
)
from .timedomain import (
    InputSignal,
    SimResult,
    Spectrum,
    simulate,
    spectrum,
    tone_amplitude,
)
from .fullorder import (
    FullOrderModel,
    ValidationReport,
    build_fullorder,
    validate_reduction,
)
from .workload import (
    LoadTrace,
    export_csv,
    ingest_csv,
    resample,
    synthetic_gpu_trace,
)
from .config import ScenarioConfig, load_config
from .runner import RunError, fig_repro, run

__all__ = [
    "W_BASE",
    "W_SYNC",
    "GridParams",
    "AfeParams",
    "VsiParams",
    "PsuParams",
    "DcdcParams",
    "ChainParams",
    "FullOrderParams",
    "SmParams",
    "GfmParams",
    "GflParams",
    "NineBusParams",
    "get_param",
    "set_param",
    "TuningSpec",
    "tune",
    "tune_pair",
    "SystemModel",
    "build_sdcib",
    "build_ninebus",
    "EquilibriumError",
    "OperatingPoint",
    "initial_guess",
    "solve_equilibrium",
    "ModalResult",
    "PoaResult",
    "ReducedSystem",
    "SweepResult",
    "linearize",
    "modal_analysis",
    "modal_poa_decomposition",
    "multiport_poa",
    "poa",
    "sweep",
    "InputSignal",
    "SimResult",
    "Spectrum",
    "simulate",
    "spectrum",
    "tone_amplitude",
    "FullOrderModel",
    "ValidationReport",
    "build_fullorder",
    "validate_reduction",
    "LoadTrace",
    "export_csv",
    "ingest_csv",
    "resample",
    "synthetic_gpu_trace",
    "ScenarioConfig",
    "load_config",
    "RunError",
    "fig_repro",
    "run",
    "__version__",
]
