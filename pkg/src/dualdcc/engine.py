"""Synchronous multi-station simulation over an ideal shared channel.

Timeline. Tick ``k`` sits at ``t = k / 10`` seconds and stands for the 100 ms
measurement window that starts there. The busy ratio of a window is the sum
of the duty cycles in force, capped at 1 (airtime adds up, nothing is lost to
collisions). At every even tick ``k >= 2`` the stations run one control step
on the two windows that just closed (ticks ``k-2`` and ``k-1``); the new duty
cycles are in force for window ``k``. A record at an update tick therefore
shows the freshly computed delta, its channel load and the smoothed CBR
that produced it.

A group joining at ``join_time`` occupies the channel from the tick at that
time and first updates once it has observed two full windows.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from typing import Any, Optional, Sequence

import numpy as np

from . import scenarios
from .core import ConfigError, DccParams, StationState, Variant, step_stations
from .metrics import jain_index
from .scenarios import ScenarioSpec

TICK = 0.1
UPDATE_EVERY = 2


@dataclass(frozen=True)
class Station:
    id: int
    group_id: int
    state: StationState


@dataclass(frozen=True)
class GroupStats:
    mean: float
    min: float
    max: float


@dataclass(frozen=True)
class TickRecord:
    t: float
    cbr_raw: float
    # smoothed CBR of the earliest-joined bootstrapped station; None before the first update
    cbr_s: Optional[float]
    jain: Optional[float]
    groups: tuple[Optional[GroupStats], ...]


@dataclass
class TimeSeries:
    params: DccParams
    variant: Variant
    scenario: ScenarioSpec
    records: list[TickRecord]

    def __len__(self) -> int:
        return len(self.records)

    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def at(self, t: float) -> TickRecord:
        """Record of the tick nearest to `t`."""
        k = int(round(t / TICK))
        return self.records[min(max(k, 0), len(self.records) - 1)]

    def header(self) -> list[str]:
        cols = ["t", "cbr_raw", "cbr_s", "jain"]
        for g in range(len(self.scenario.groups)):
            cols += [f"g{g}_mean", f"g{g}_min", f"g{g}_max"]
        return cols

    def rows(self) -> list[list[Optional[float]]]:
        out = []
        for r in self.records:
            row: list[Optional[float]] = [r.t, r.cbr_raw, r.cbr_s, r.jain]
            for g in r.groups:
                row += [None, None, None] if g is None else [g.mean, g.min, g.max]
            out.append(row)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        for row in self.rows():
            w.writerow(["" if v is None else repr(float(v)) for v in row])
        return buf.getvalue()

    def to_dict(self) -> dict[str, Any]:
        return {
            "params": asdict(self.params),
            "algorithm": "etsi" if self.variant is None else "dual",
            "dual": None if self.variant is None else asdict(self.variant),
            "scenario": scenarios.to_dict(self.scenario),
            "records": [
                {
                    "t": r.t,
                    "cbr_raw": r.cbr_raw,
                    "cbr_s": r.cbr_s,
                    "jain": r.jain,
                    "groups": [None if g is None else asdict(g) for g in r.groups],
                }
                for r in self.records
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"


def measure_channel(deltas: Sequence[float]) -> float:
    """Busy ratio of one window: total airtime, capped at 1."""
    return min(1.0, float(np.sum(deltas)))


class Simulation:
    """Stepwise simulation; `run` drives it to completion."""

    def __init__(
        self,
        spec: ScenarioSpec,
        params: DccParams | None = None,
        variant: Variant = None,
        *,
        noise: float = 0.0,
        seed: int | None = 0,
    ):
        if noise < 0:
            raise ConfigError("noise amplitude must be >= 0")
        self.params = params or spec.dcc_params()
        self.spec = scenarios.resolve(spec, self.params)
        self.variant = variant
        self.noise = noise
        self.rng = np.random.default_rng(seed)

        counts = [g.count for g in self.spec.groups]
        n = sum(counts)
        self.group_of = np.repeat(np.arange(len(counts)), counts)
        self.join_tick = np.repeat([_to_tick(g.join_time) for g in self.spec.groups], counts)
        self.delta = np.repeat([float(g.initial_delta) for g in self.spec.groups], counts)
        self.cbr_s = np.zeros(n)
        self.bootstrapped = np.zeros(n, dtype=bool)
        # per-station measurements of the current and previous window
        self.meas = np.zeros(n)
        self.meas_prev = np.zeros(n)
        self._group_idx = [np.flatnonzero(self.group_of == g) for g in range(len(counts))]
        # earliest join first, then lowest id
        self._ref_order = np.lexsort((np.arange(n), self.join_tick))
        self.k = -1
        self.records: list[TickRecord] = []

    def stations(self) -> list[Station]:
        return [
            Station(
                i,
                int(self.group_of[i]),
                StationState(float(self.delta[i]), float(self.cbr_s[i]), bool(self.bootstrapped[i])),
            )
            for i in range(len(self.delta))
        ]

    def tick(self) -> TickRecord:
        self.k += 1
        k = self.k
        if k >= UPDATE_EVERY and k % UPDATE_EVERY == 0:
            ready = self.join_tick <= k - 2
            if ready.any():
                d, s = step_stations(
                    self.delta[ready],
                    self.cbr_s[ready],
                    self.bootstrapped[ready],
                    self.meas[ready],
                    self.meas_prev[ready],
                    self.params,
                    self.variant,
                )
                self.delta[ready] = d
                self.cbr_s[ready] = s
                self.bootstrapped[ready] = True

        present = self.join_tick <= k
        cbr_raw = measure_channel(self.delta[present])
        self.meas_prev = self.meas
        if self.noise > 0:
            jitter = self.rng.uniform(-self.noise, self.noise, size=len(self.delta))
            self.meas = np.clip(cbr_raw + jitter, 0.0, 1.0)
        else:
            self.meas = np.full(len(self.delta), cbr_raw)

        rec = TickRecord(
            t=k / 10,
            cbr_raw=cbr_raw,
            cbr_s=self._reference_cbr_s(),
            jain=jain_index(self.delta[present]) if present.any() else None,
            groups=tuple(self._group_stats(idx, present) for idx in self._group_idx),
        )
        self.records.append(rec)
        return rec

    def _reference_cbr_s(self) -> Optional[float]:
        boot = self.bootstrapped[self._ref_order]
        if not boot.any():
            return None
        return float(self.cbr_s[self._ref_order[np.argmax(boot)]])

    def _group_stats(self, idx: np.ndarray, present: np.ndarray) -> Optional[GroupStats]:
        if not present[idx[0]]:
            return None
        d = self.delta[idx]
        lo, hi = float(d.min()), float(d.max())
        # summation rounding can push the mean of equal values an ulp outside them
        return GroupStats(min(max(float(d.mean()), lo), hi), lo, hi)

    def series(self) -> TimeSeries:
        return TimeSeries(self.params, self.variant, self.spec, list(self.records))


def _to_tick(t: float) -> int:
    return int(round(t / TICK))


def run(
    spec: ScenarioSpec,
    params: DccParams | None = None,
    variant: Variant | str | None = "scenario",
    duration: float | None = None,
    *,
    noise: float = 0.0,
    seed: int | None = 0,
) -> TimeSeries:
    """Simulate `spec` and return one record per 100 ms tick, ``t = 0 .. duration``.

    `params` defaults to the scenario's constants. `variant` is a
    DualAlphaParams, None for ETSI, ``"etsi"``/``"dual"``, or ``"scenario"``
    to follow the scenario's own algorithm. `noise` adds seeded uniform noise
    of that amplitude to each station's own measurement.
    """
    if isinstance(variant, str):
        if variant == "scenario":
            variant = spec.variant()
        elif variant == "dual":
            variant = spec.dual_params()
        elif variant == "etsi":
            variant = None
        else:
            raise ConfigError(f"unknown algorithm {variant!r}")
    duration = spec.duration if duration is None else duration
    if not duration > 0:
        raise ConfigError("duration must be > 0")
    sim = Simulation(spec, params, variant, noise=noise, seed=seed)
    for _ in range(_to_tick(duration) + 1):
        sim.tick()
    return sim.series()
