"""Closed-form convergence predictions for K stations sharing one channel."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional

from .core import DccParams, DomainError


class ConvergenceKind(enum.Enum):
    INTERIOR = "Interior"
    GAIN_LIMITED = "GainLimited"
    CLAMPED_MAX = "ClampedMax"
    CLAMPED_MIN = "ClampedMin"
    NO_GUARANTEE = "NoGuarantee"


@dataclass(frozen=True)
class ConvergenceResult:
    kind: ConvergenceKind
    delta_conv: Optional[float]
    predicted_cbr: Optional[float]


def _check_k(k: float) -> None:
    if not k >= 1:
        raise DomainError(f"station count must be >= 1, got {k!r}")


def conv_value(k: float, p: DccParams = DccParams()) -> float:
    """Fixed point of the linear loop before the delta bounds are applied.

    ``min(g_plus_max / alpha, beta * cbr_target / (alpha + k * beta))``.
    `k` may be fractional.
    """
    _check_k(k)
    return min(p.g_plus_max / p.alpha, p.beta * p.cbr_target / (p.alpha + k * p.beta))


def classify_convergence(k: float, p: DccParams = DccParams()) -> ConvergenceResult:
    """Case analysis of where K stations settle.

    Cases are tried in a fixed order and the first whose conditions hold wins:
    interior point of a stable loop, gain-limited point, clamp at delta_max,
    clamp at delta_min, and finally no guarantee.
    """
    _check_k(k)
    gain_term = p.g_plus_max / p.alpha
    load_term = p.beta * p.cbr_target / (p.alpha + k * p.beta)
    conv = min(gain_term, load_term)
    in_bounds = lambda v: p.delta_min <= v <= p.delta_max  # noqa: E731

    if p.alpha + k * p.beta < 2 and in_bounds(conv):
        kind, delta = ConvergenceKind.INTERIOR, conv
    elif gain_term <= load_term and in_bounds(gain_term):
        kind, delta = ConvergenceKind.GAIN_LIMITED, gain_term
    elif conv > p.delta_max:
        kind, delta = ConvergenceKind.CLAMPED_MAX, p.delta_max
    elif conv < p.delta_min:
        kind, delta = ConvergenceKind.CLAMPED_MIN, p.delta_min
    else:
        return ConvergenceResult(ConvergenceKind.NO_GUARANTEE, None, None)
    return ConvergenceResult(kind, delta, min(1.0, k * delta))


def capacity_threshold(p: DccParams = DccParams()) -> float:
    """Smallest K whose convergence value has reached delta_min.

    Solved exactly from the load term, ``(beta*cbr_target/delta_min - alpha) / beta``.
    Dropping the alpha term gives `overload_threshold`, which is a different
    quantity. Never below 1.
    """
    if p.g_plus_max / p.alpha <= p.delta_min:
        return 1.0
    return max(1.0, (p.beta * p.cbr_target / p.delta_min - p.alpha) / p.beta)


def overload_threshold(p: DccParams = DccParams()) -> float:
    """Station count above which K stations pinned at delta_min exceed the target CBR."""
    return p.cbr_target / p.delta_min


def cbr_convergence_curve(
    ks: Iterable[float], p: DccParams = DccParams()
) -> list[tuple[float, Optional[float]]]:
    """``(K, predicted CBR)`` for each K; the CBR is None where convergence is not guaranteed."""
    return [(k, classify_convergence(k, p).predicted_cbr) for k in ks]
