"""Scenario descriptions: station groups, their starting duty cycles and join times.

A scenario file is one JSON object::

    {
      "groups": [
        {"count": 25, "initial_delta": "converged", "join_time": 0.0},
        {"count": 100, "initial_delta": 0.005967, "join_time": 0.0}
      ],
      "duration": 40.0,
      "algorithm": "etsi",
      "params": {"alpha": 0.016}
    }

``initial_delta`` is a number or ``"converged"`` (the standalone convergence
value for that group's size). ``algorithm`` is ``"etsi"`` or ``"dual"``.
``params`` overrides any DCC or Dual-alpha constant. Unknown keys are errors.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping, Union

from . import analysis
from .core import ConfigError, DccParams, DualAlphaParams, Variant

CONVERGED = "converged"
ALGORITHMS = ("etsi", "dual")

DCC_FIELDS = tuple(f.name for f in fields(DccParams))
DUAL_FIELDS = tuple(f.name for f in fields(DualAlphaParams))

InitialDelta = Union[float, str]


@dataclass(frozen=True)
class GroupSpec:
    count: int
    initial_delta: InitialDelta
    join_time: float = 0.0


@dataclass(frozen=True)
class ScenarioSpec:
    groups: tuple[GroupSpec, ...]
    duration: float = 40.0
    algorithm: str = "etsi"
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "groups", tuple(self.groups))
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))
        validate(self)

    def __hash__(self) -> int:
        return hash((self.groups, self.duration, self.algorithm, tuple(sorted(self.params.items()))))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScenarioSpec):
            return NotImplemented
        return (
            self.groups == other.groups
            and self.duration == other.duration
            and self.algorithm == other.algorithm
            and dict(self.params) == dict(other.params)
        )

    @property
    def merge_time(self) -> float:
        """Time at which the last group joins the channel."""
        return max(g.join_time for g in self.groups)

    def dcc_params(self, base: DccParams | None = None) -> DccParams:
        base = base or DccParams()
        return replace(base, **{k: v for k, v in self.params.items() if k in DCC_FIELDS})

    def dual_params(self, base: DualAlphaParams | None = None) -> DualAlphaParams:
        base = base or DualAlphaParams()
        return replace(base, **{k: v for k, v in self.params.items() if k in DUAL_FIELDS})

    def variant(self) -> Variant:
        return self.dual_params() if self.algorithm == "dual" else None

    def with_algorithm(self, algorithm: str) -> "ScenarioSpec":
        return replace(self, algorithm=algorithm)


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def validate(spec: ScenarioSpec) -> None:
    if not spec.groups:
        raise ConfigError("scenario needs at least one group")
    for i, g in enumerate(spec.groups):
        if not isinstance(g.count, int) or isinstance(g.count, bool) or g.count < 1:
            raise ConfigError(f"group {i}: count must be an integer >= 1")
        if isinstance(g.initial_delta, str):
            if g.initial_delta != CONVERGED:
                raise ConfigError(f"group {i}: initial_delta must be a number or {CONVERGED!r}")
        elif not _is_number(g.initial_delta):
            raise ConfigError(f"group {i}: initial_delta must be a number or {CONVERGED!r}")
        if not _is_number(g.join_time) or not g.join_time >= 0:
            raise ConfigError(f"group {i}: join_time must be >= 0")
    if not _is_number(spec.duration) or not spec.duration > 0:
        raise ConfigError("duration must be > 0")
    if spec.algorithm not in ALGORITHMS:
        raise ConfigError(f"algorithm must be one of {ALGORITHMS}")
    for k, v in spec.params.items():
        if k not in DCC_FIELDS and k not in DUAL_FIELDS:
            raise ConfigError(f"unknown parameter {k!r}")
        if not _is_number(v):
            raise ConfigError(f"parameter {k!r} must be a number")
    # surfaces invariant violations of the overridden constants
    spec.dcc_params()
    spec.dual_params()


def resolve(spec: ScenarioSpec, p: DccParams | None = None) -> ScenarioSpec:
    """Replace ``"converged"`` placeholders by numbers and bounds-check every group.

    A standalone convergence value outside [delta_min, delta_max] is clamped
    with a warning. An explicit number outside the bounds is a ConfigError.
    """
    p = p or spec.dcc_params()
    groups = []
    for i, g in enumerate(spec.groups):
        if g.initial_delta == CONVERGED:
            d = analysis.conv_value(g.count, p)
            if d > p.delta_max or d < p.delta_min:
                clamped = min(max(d, p.delta_min), p.delta_max)
                warnings.warn(
                    f"group {i}: convergence value {d:.6g} for {g.count} stations "
                    f"clamped to {clamped:g}",
                    stacklevel=2,
                )
                d = clamped
        else:
            d = float(g.initial_delta)
            if not p.delta_min <= d <= p.delta_max:
                raise ConfigError(
                    f"group {i}: initial_delta {d!r} outside [{p.delta_min}, {p.delta_max}]"
                )
        groups.append(replace(g, initial_delta=d))
    return replace(spec, groups=tuple(groups))


def designated_group(spec: ScenarioSpec) -> int:
    """Index of the group tracked for convergence time: the largest, earliest on ties."""
    return max(range(len(spec.groups)), key=lambda i: (spec.groups[i].count, -i))


def cold_start_scenario(
    k: int, p: DccParams | None = None, *, duration: float = 40.0, algorithm: str = "etsi"
) -> ScenarioSpec:
    """K stations all starting at delta_max."""
    p = p or DccParams()
    return ScenarioSpec(
        groups=(GroupSpec(k, p.delta_max, 0.0),), duration=duration, algorithm=algorithm
    )


def merge_scenario(
    k_small: int,
    k_large: int,
    merge_time: float = 0.0,
    *,
    duration: float = 40.0,
    algorithm: str = "etsi",
) -> ScenarioSpec:
    """Two separately converged groups sharing one channel.

    With ``merge_time == 0`` both groups interact from the start. A positive
    ``merge_time`` lets the large group run alone first and brings the small
    group in at that time.
    """
    return ScenarioSpec(
        groups=(
            GroupSpec(k_small, CONVERGED, float(merge_time)),
            GroupSpec(k_large, CONVERGED, 0.0),
        ),
        duration=duration,
        algorithm=algorithm,
    )


_BUILTIN = re.compile(r"^(?:cold(?P<cold>\d+)|merge(?P<small>\d+)x(?P<large>\d+))$")


def builtin(name: str) -> ScenarioSpec:
    """Scenario from a built-in name: ``cold<K>`` or ``merge<Ksmall>x<Klarge>``."""
    m = _BUILTIN.match(name)
    if not m:
        raise ConfigError(f"unknown built-in scenario {name!r}")
    if m["cold"]:
        return cold_start_scenario(int(m["cold"]))
    return merge_scenario(int(m["small"]), int(m["large"]))


def is_builtin(name: str) -> bool:
    return bool(_BUILTIN.match(name))


_TOP_KEYS = {"groups", "duration", "algorithm", "params"}
_GROUP_KEYS = {"count", "initial_delta", "join_time"}


def from_dict(doc: Mapping[str, Any]) -> ScenarioSpec:
    if not isinstance(doc, Mapping):
        raise ConfigError("scenario must be a JSON object")
    extra = set(doc) - _TOP_KEYS
    if extra:
        raise ConfigError(f"unknown scenario keys: {sorted(extra)}")
    if "groups" not in doc or not isinstance(doc["groups"], list):
        raise ConfigError("scenario needs a 'groups' list")
    groups = []
    for i, g in enumerate(doc["groups"]):
        if not isinstance(g, Mapping):
            raise ConfigError(f"group {i} must be an object")
        extra = set(g) - _GROUP_KEYS
        if extra:
            raise ConfigError(f"group {i}: unknown keys {sorted(extra)}")
        if "count" not in g or "initial_delta" not in g:
            raise ConfigError(f"group {i}: 'count' and 'initial_delta' are required")
        groups.append(GroupSpec(g["count"], g["initial_delta"], g.get("join_time", 0.0)))
    params = doc.get("params", {})
    if not isinstance(params, Mapping):
        raise ConfigError("'params' must be an object")
    return ScenarioSpec(
        groups=tuple(groups),
        duration=doc.get("duration", 40.0),
        algorithm=doc.get("algorithm", "etsi"),
        params=dict(params),
    )


def to_dict(spec: ScenarioSpec) -> dict[str, Any]:
    return {
        "groups": [
            {"count": g.count, "initial_delta": g.initial_delta, "join_time": g.join_time}
            for g in spec.groups
        ],
        "duration": spec.duration,
        "algorithm": spec.algorithm,
        "params": dict(spec.params),
    }


def load(path: str | Path) -> ScenarioSpec:
    """Read a scenario file. Malformed JSON raises ConfigError; missing files raise OSError."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return from_dict(doc)


def dump(spec: ScenarioSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(to_dict(spec), indent=2) + "\n")
