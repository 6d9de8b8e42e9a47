"""Transient metrics: Jain fairness, time below the target CBR, time to a convergence band."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from . import analysis, scenarios
from .core import DomainError

if TYPE_CHECKING:
    from .engine import TimeSeries

_EPS = 1e-9


def jain_index(deltas: Sequence[float]) -> float:
    """Jain fairness index ``(sum d)^2 / (K * sum d^2)``; 1.0 when every share is equal."""
    d = np.asarray(deltas, dtype=float)
    if d.size == 0:
        raise DomainError("jain_index needs at least one value")
    if not np.all(d > 0):
        raise DomainError("jain_index needs strictly positive values")
    if d.min() == d.max():
        return 1.0
    return min(1.0, float(d.sum() ** 2 / (d.size * np.sum(d * d))))


def time_below_target(
    series: "TimeSeries",
    target: float | None = None,
    from_t: float = 0.0,
    *,
    signal: str = "smoothed",
) -> Optional[float]:
    """Seconds from `from_t` to the first tick whose CBR is below `target`.

    `signal` selects the smoothed CBR seen by the stations (``"smoothed"``) or
    the channel load itself (``"raw"``). Returns None if it never happens.
    """
    if target is None:
        target = series.params.cbr_target
    if signal not in ("smoothed", "raw"):
        raise DomainError(f"signal must be 'smoothed' or 'raw', got {signal!r}")
    for r in series.records:
        if r.t < from_t - _EPS:
            continue
        value = r.cbr_s if signal == "smoothed" else r.cbr_raw
        if value is not None and value < target:
            return round(r.t - from_t, 9)
    return None


def time_to_band(
    series: "TimeSeries",
    group: int,
    center: float,
    band: float = 0.1,
    *,
    from_t: float = 0.0,
    dwell: float = 1.0,
) -> Optional[float]:
    """Seconds until a group's mean delta enters ``center * (1 +- band)`` and stays.

    The entry counts only if the mean stays inside for `dwell` seconds, or
    until the end of the series if that comes first.
    """
    if not 0 <= group < len(series.scenario.groups):
        raise DomainError(f"unknown group {group}")
    if not band > 0:
        raise DomainError("band must be > 0")
    lo, hi = center * (1 - band), center * (1 + band)
    recs = [r for r in series.records if r.t >= from_t - _EPS]
    inside = [
        r.groups[group] is not None and lo - _EPS * center <= r.groups[group].mean <= hi + _EPS * center
        for r in recs
    ]
    span = int(round(dwell / 0.1))
    for i, ok in enumerate(inside):
        if ok and all(inside[i : i + span + 1]):
            return round(recs[i].t - from_t, 9)
    return None


def jain_at(series: "TimeSeries", t: float) -> Optional[float]:
    return series.at(t).jain


@dataclass(frozen=True)
class MergeMetrics:
    jain_at: Optional[float]
    t_conv: Optional[float]
    t_below_target: Optional[float]


def merge_metrics(
    series: "TimeSeries",
    *,
    jain_offset: float = 10.0,
    band: float = 0.1,
    signal: str = "smoothed",
) -> MergeMetrics:
    """Fairness and convergence metrics of a merge run, timed from the last join.

    The tracked group is the largest one; its band is centred on the
    convergence value of all stations together.
    """
    spec = series.scenario
    t0 = spec.merge_time
    total = sum(g.count for g in spec.groups)
    alpha = series.params.alpha if series.variant is None else series.variant.alpha_low
    conv = analysis.classify_convergence(total, series.params.with_alpha(alpha))
    group = scenarios.designated_group(spec)
    t_conv = None
    if conv.delta_conv is not None:
        t_conv = time_to_band(series, group, conv.delta_conv, band, from_t=t0)
    return MergeMetrics(
        jain_at=jain_at(series, t0 + jain_offset),
        t_conv=t_conv,
        t_below_target=time_below_target(series, None, t0, signal=signal),
    )
