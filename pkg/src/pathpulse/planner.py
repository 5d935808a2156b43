"""Closed-form selection of the probe period and miss threshold.

Given a loss-rate budget, the expected round trip, a mean-detection-delay
target and a minimum acceptable interval between false alarms, the probe
period is maximized subject to both targets.  The detection constraint
caps the period from above, falling with the threshold; the false-alarm
constraint bounds it from below, falling geometrically with the
threshold.  The chosen threshold is the smallest one whose admissible
range is nonempty, and the period is the detection-constraint boundary at
that threshold (larger thresholds only shrink it):

    fp_min * (2p - p^2)^K  <  (target - rtt/2) / (K + 1/2)
    period* = (target - rtt/2) / (K* + 1/2)

The reported period sits exactly on the detection boundary; operate one
timer tick below it if a strictly-inside operating point is required.
A worst-case mode uses the worst-case delay model instead (one extra full
period plus the maximum round trip).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .conncheck import false_positive_interval, false_positive_prob, responsiveness
from .errors import InputError

DEFAULT_THRESHOLD_CEILING = 64

SWEEP_VARIABLES = ("threshold", "loss_rate", "fp_interval_min_s", "detect_target_ms")


@dataclass(frozen=True)
class PlannerInput:
    loss_rate: float                  # assumed per-direction loss ceiling
    rtt_avg_ms: float                 # expected mean round trip
    detect_target_ms: float           # detection-delay target (mean by default)
    fp_interval_min_s: float          # minimum mean time between false alarms
    period_min_ms: float = 0.0        # smallest period the deployment allows
    threshold_ceiling: int = DEFAULT_THRESHOLD_CEILING
    rtt_max_ms: float | None = None   # defaults to rtt_avg_ms
    worst_case: bool = False          # target bounds the worst case, not the mean

    def __post_init__(self):
        if not 0.0 < self.loss_rate < 1.0:
            raise InputError(f"loss_rate must be in (0, 1), got {self.loss_rate}")
        if self.rtt_avg_ms < 0:
            raise InputError(f"rtt_avg_ms must be nonnegative, got {self.rtt_avg_ms}")
        if self.detect_target_ms <= self.rtt_avg_ms / 2.0:
            raise InputError("detect_target_ms must exceed half the average round trip")
        if self.fp_interval_min_s <= 0:
            raise InputError("fp_interval_min_s must be positive")
        if self.period_min_ms < 0:
            raise InputError("period_min_ms must be nonnegative")
        if self.threshold_ceiling < 1:
            raise InputError("threshold_ceiling must be >= 1")

    @property
    def effective_rtt_max_ms(self) -> float:
        return self.rtt_avg_ms if self.rtt_max_ms is None else self.rtt_max_ms


@dataclass(frozen=True)
class PlannerResult:
    feasible: bool
    threshold: int | None = None
    period_ms: float | None = None
    fp_prob: float | None = None
    fp_interval_s: float | None = None
    detect_avg_ms: float | None = None
    detect_max_ms: float | None = None


def _period_cap_ms(inp: PlannerInput, threshold: int) -> float:
    """Largest period meeting the detection target at this threshold."""
    if inp.worst_case:
        head = inp.detect_target_ms - inp.effective_rtt_max_ms
        return head / (threshold + 1.0)
    head = inp.detect_target_ms - inp.rtt_avg_ms / 2.0
    return head / (threshold + 0.5)


def solve(inp: PlannerInput) -> PlannerResult:
    """Pick the smallest workable threshold and the largest period for it."""
    fp_min_ms = inp.fp_interval_min_s * 1000.0
    q = 2.0 * inp.loss_rate - inp.loss_rate * inp.loss_rate
    for threshold in range(1, inp.threshold_ceiling + 1):
        cap = _period_cap_ms(inp, threshold)
        if cap <= 0:
            break  # detection head-room exhausted; larger thresholds only worsen it
        if fp_min_ms * q ** threshold < cap:
            period = cap
            if period < inp.period_min_ms:
                return PlannerResult(feasible=False)
            detect_max, detect_avg = responsiveness(
                threshold, period, inp.effective_rtt_max_ms, inp.rtt_avg_ms)
            return PlannerResult(
                feasible=True,
                threshold=threshold,
                period_ms=period,
                fp_prob=false_positive_prob(inp.loss_rate, threshold),
                fp_interval_s=false_positive_interval(inp.loss_rate, threshold, period),
                detect_avg_ms=detect_avg,
                detect_max_ms=detect_max,
            )
    return PlannerResult(feasible=False)


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable and the values to evaluate it at."""

    variable: str
    values: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise InputError(
                f"unknown sweep variable {self.variable!r}; choose from {SWEEP_VARIABLES}")
        if not self.values:
            raise InputError("sweep needs at least one value")


def sweep_values(start: float, stop: float, count: int, log: bool = False) -> tuple:
    """Inclusive range helper for sweep specs."""
    if count < 1:
        raise InputError("sweep count must be >= 1")
    if count == 1:
        return (start,)
    if log:
        if start <= 0 or stop <= 0:
            raise InputError("log sweeps need positive endpoints")
        ratio = (stop / start) ** (1.0 / (count - 1))
        return tuple(start * ratio ** i for i in range(count))
    step = (stop - start) / (count - 1)
    return tuple(start + step * i for i in range(count))


def tradeoff_curves(inp: PlannerInput, sweep: SweepSpec) -> list[dict]:
    """Rows for the tradeoff plots.

    Sweeping the threshold evaluates detection delay and false-alarm
    interval at the fixed minimum period; sweeping any input re-solves and
    reports the chosen threshold and period.
    """
    rows: list[dict] = []
    if sweep.variable == "threshold":
        if inp.period_min_ms <= 0:
            raise InputError("threshold sweep needs a positive period_min_ms to hold fixed")
        for v in sweep.values:
            threshold = int(v)
            _, detect_avg = responsiveness(threshold, inp.period_min_ms,
                                           inp.effective_rtt_max_ms, inp.rtt_avg_ms)
            rows.append({
                "threshold": threshold,
                "detect_avg_ms": detect_avg,
                "fp_interval_s": false_positive_interval(
                    inp.loss_rate, threshold, inp.period_min_ms),
            })
        return rows

    for v in sweep.values:
        kwargs = {
            "loss_rate": inp.loss_rate,
            "rtt_avg_ms": inp.rtt_avg_ms,
            "detect_target_ms": inp.detect_target_ms,
            "fp_interval_min_s": inp.fp_interval_min_s,
            "period_min_ms": inp.period_min_ms,
            "threshold_ceiling": inp.threshold_ceiling,
            "rtt_max_ms": inp.rtt_max_ms,
            "worst_case": inp.worst_case,
        }
        key = {"loss_rate": "loss_rate",
               "fp_interval_min_s": "fp_interval_min_s",
               "detect_target_ms": "detect_target_ms"}[sweep.variable]
        kwargs[key] = v
        result = solve(PlannerInput(**kwargs))
        rows.append({
            sweep.variable: v,
            "feasible": result.feasible,
            "threshold": result.threshold,
            "period_ms": result.period_ms,
        })
    return rows
