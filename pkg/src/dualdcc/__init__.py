"""Discrete-time simulation and analysis of the ETSI adaptive DCC loop and its Dual-alpha variant."""

from .analysis import (
    ConvergenceKind,
    ConvergenceResult,
    capacity_threshold,
    cbr_convergence_curve,
    classify_convergence,
    conv_value,
    overload_threshold,
)
from .core import (
    CbrPair,
    ConfigError,
    DccParams,
    DomainError,
    DualAlphaParams,
    StationState,
    compute_offset,
    select_alpha,
    smooth_cbr,
    step_station,
    update_delta,
)
from .engine import TimeSeries, measure_channel, run
from .metrics import jain_index, merge_metrics, time_below_target, time_to_band
from .scenarios import GroupSpec, ScenarioSpec, cold_start_scenario, merge_scenario, resolve

__version__ = "0.1.0"
