"""Per-station control law for the adaptive DCC loop and its Dual-alpha variant.

Everything here is a pure function of its arguments. The scalar functions
(`smooth_cbr`, `compute_offset`, `update_delta`, `select_alpha`,
`step_station`) define the behaviour; `step_stations` is the numpy
counterpart used by the engine and performs the same float operations in the
same order, so both paths agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import NamedTuple, Optional

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigError(ValueError):
    """A parameter set or scenario violates its invariants."""


@dataclass(frozen=True)
class DccParams:
    """Control constants of the ETSI adaptive DCC algorithm.

    Defaults are the standardised values.
    """

    alpha: float = 0.016
    beta: float = 0.0012
    cbr_target: float = 0.68
    delta_max: float = 0.03
    delta_min: float = 0.0006
    g_plus_max: float = 0.0005
    g_minus_min: float = -0.00025

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise ConfigError(f"{f.name} must be a finite number, got {v!r}")
        if not 0 < self.delta_min < self.delta_max <= 1:
            raise ConfigError("require 0 < delta_min < delta_max <= 1")
        if not self.g_minus_min < 0 < self.g_plus_max:
            raise ConfigError("require g_minus_min < 0 < g_plus_max")
        if not 0 < self.cbr_target <= 1:
            raise ConfigError("require 0 < cbr_target <= 1")
        if not 0 < self.alpha < 1:
            raise ConfigError("require 0 < alpha < 1")
        if not self.beta > 0:
            raise ConfigError("require beta > 0")

    def with_alpha(self, alpha: float) -> "DccParams":
        return replace(self, alpha=alpha)


@dataclass(frozen=True)
class DualAlphaParams:
    """Gains and threshold of the Dual-alpha selection rule."""

    alpha_low: float = 0.016
    alpha_high: float = 0.1
    th: float = 0.00001

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise ConfigError(f"{f.name} must be a finite number, got {v!r}")
        if not 0 < self.alpha_low < self.alpha_high < 1:
            raise ConfigError("require 0 < alpha_low < alpha_high < 1")
        if self.th < 0:
            raise ConfigError("require th >= 0")


# None selects the plain ETSI law (alpha = DccParams.alpha).
Variant = Optional[DualAlphaParams]


class CbrPair(NamedTuple):
    """The two most recent 100 ms busy-ratio measurements, newest first."""

    cbr_m: float
    cbr_m_p: float


@dataclass(frozen=True)
class StationState:
    delta: float
    cbr_smoothed: float = 0.0
    bootstrapped: bool = False


def _check_fraction(name: str, x: float) -> None:
    if not 0.0 <= x <= 1.0:  # also rejects NaN
        raise DomainError(f"{name} must lie in [0, 1], got {x!r}")


def smooth_cbr(prev: float, pair: CbrPair) -> float:
    """Exponential smoothing of the channel busy ratio.

    ``0.5 * prev + 0.5 * mean(pair)``. All inputs must be fractions in [0, 1].
    """
    _check_fraction("prev", prev)
    _check_fraction("cbr_m", pair.cbr_m)
    _check_fraction("cbr_m_p", pair.cbr_m_p)
    return 0.5 * prev + 0.5 * ((pair.cbr_m + pair.cbr_m_p) / 2)


def compute_offset(cbr_s: float, p: DccParams) -> float:
    """Signed duty-cycle correction for one step, capped by the gain limits."""
    _check_fraction("cbr_s", cbr_s)
    x = p.beta * (p.cbr_target - cbr_s)
    if p.cbr_target > cbr_s:
        return min(x, p.g_plus_max)
    return max(x, p.g_minus_min)


def clamp_delta(x: float, p: DccParams) -> float:
    if x >= p.delta_max:
        return p.delta_max
    if x <= p.delta_min:
        return p.delta_min
    return x


def update_delta(prev_delta: float, offset: float, alpha: float, p: DccParams) -> float:
    """``clamp((1 - alpha) * prev_delta + offset, delta_min, delta_max)``."""
    return clamp_delta((1 - alpha) * prev_delta + offset, p)


def select_alpha(prev_delta: float, offset: float, p: DccParams, d: DualAlphaParams) -> float:
    """Pick alpha_high when the low-gain update would still drop delta by more than th.

    The comparison uses the clamped low-gain candidate, so a station pinned at
    delta_min never switches to the high gain.
    """
    candidate = update_delta(prev_delta, offset, d.alpha_low, p)
    if prev_delta - candidate > d.th:
        return d.alpha_high
    return d.alpha_low


def step_station(
    state: StationState, pair: CbrPair, p: DccParams, variant: Variant = None
) -> StationState:
    """Run one 200 ms control step for a single station.

    The first step after a station starts seeds the smoothed CBR with the mean
    of the two measurements instead of blending with an undefined history.
    """
    if state.bootstrapped:
        cbr_s = smooth_cbr(state.cbr_smoothed, pair)
    else:
        _check_fraction("cbr_m", pair.cbr_m)
        _check_fraction("cbr_m_p", pair.cbr_m_p)
        cbr_s = (pair.cbr_m + pair.cbr_m_p) / 2
    offset = compute_offset(cbr_s, p)
    if variant is None:
        alpha = p.alpha
    else:
        alpha = select_alpha(state.delta, offset, p, variant)
    delta = update_delta(state.delta, offset, alpha, p)
    return StationState(delta=delta, cbr_smoothed=cbr_s, bootstrapped=True)


def step_stations(
    delta: np.ndarray,
    cbr_smoothed: np.ndarray,
    bootstrapped: np.ndarray,
    cbr_m: np.ndarray,
    cbr_m_p: np.ndarray,
    p: DccParams,
    variant: Variant = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised `step_station` over many stations.

    Returns the new ``(delta, cbr_smoothed)`` arrays; all stations are marked
    bootstrapped afterwards by the caller. Inputs are not modified.
    """
    mean_pair = (cbr_m + cbr_m_p) / 2
    cbr_s = np.where(bootstrapped, 0.5 * cbr_smoothed + 0.5 * mean_pair, mean_pair)
    x = p.beta * (p.cbr_target - cbr_s)
    offset = np.where(p.cbr_target > cbr_s, np.minimum(x, p.g_plus_max), np.maximum(x, p.g_minus_min))
    if variant is None:
        alpha = p.alpha
    else:
        low = _clamp_array((1 - variant.alpha_low) * delta + offset, p)
        alpha = np.where(delta - low > variant.th, variant.alpha_high, variant.alpha_low)
    new_delta = _clamp_array((1 - alpha) * delta + offset, p)
    return new_delta, cbr_s


def _clamp_array(x: np.ndarray, p: DccParams) -> np.ndarray:
    return np.where(x >= p.delta_max, p.delta_max, np.where(x <= p.delta_min, p.delta_min, x))
