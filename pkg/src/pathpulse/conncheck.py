"""Path liveness: up/down declaration and its closed-form performance model.

A path is declared down when no probe response has arrived for
``miss_threshold`` probe periods (the timeout is their product).  The
check runs once per period, at probe-send time.  Recovery is immediate by
default: any valid response restores the path; a hysteresis of several
consecutive responses can be configured.

The model half predicts how the two tunables trade off:

* detection delay after a hard fault, worst case and mean;
* the probability that a live path is declared down because probes were
  lost, and the mean time between such false alarms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import DomainError


class Status(enum.Enum):
    UP = "up"
    DOWN = "down"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Transition:
    t_ms: float
    old: Status
    new: Status


@dataclass
class ConnCheckState:
    """Liveness state for one monitored path.

    ``last_response_ms`` starts at the session start time, so a path that
    never answers goes from UNKNOWN to DOWN one timeout after start.
    """

    miss_threshold: int
    period_ms: float
    start_ms: float
    recover_threshold: int = 1
    status: Status = Status.UNKNOWN
    last_response_ms: float = field(default=None)  # type: ignore[assignment]
    transitions: list[Transition] = field(default_factory=list)
    _recover_streak: int = 0

    def __post_init__(self):
        if self.miss_threshold < 1:
            raise DomainError(f"miss_threshold must be >= 1, got {self.miss_threshold}")
        if self.period_ms <= 0:
            raise DomainError(f"period_ms must be positive, got {self.period_ms}")
        if self.recover_threshold < 1:
            raise DomainError(f"recover_threshold must be >= 1, got {self.recover_threshold}")
        if self.last_response_ms is None:
            self.last_response_ms = self.start_ms

    @property
    def timeout_ms(self) -> float:
        return self.miss_threshold * self.period_ms

    def _move(self, now_ms: float, new: Status) -> Transition:
        tr = Transition(now_ms, self.status, new)
        self.status = new
        self.transitions.append(tr)
        return tr

    def tick(self, now_ms: float) -> Transition | None:
        """Periodic check, run at each probe send."""
        if self.status is not Status.DOWN and now_ms - self.last_response_ms >= self.timeout_ms:
            self._recover_streak = 0
            return self._move(now_ms, Status.DOWN)
        return None

    def on_response(self, now_ms: float) -> Transition | None:
        """A valid probe response arrived; stale responses count too,
        since any response proves the path currently forwards traffic."""
        self.last_response_ms = now_ms
        if self.status is Status.UP:
            return None
        self._recover_streak += 1
        if self._recover_streak >= self.recover_threshold:
            self._recover_streak = 0
            return self._move(now_ms, Status.UP)
        return None


def responsiveness(miss_threshold: int, period_ms: float,
                   rtt_max_ms: float, rtt_avg_ms: float) -> tuple[float, float]:
    """Detection delay after a hard fault: (worst case, mean), in ms.

    Worst case: the fault hits just after a probe passed and its response
    returns just after the next probe goes out, so ``threshold + 1`` full
    periods elapse plus the maximum round trip.  The mean assumes the
    fault lands uniformly along the path and the last response lands
    uniformly within a check interval.
    """
    if miss_threshold < 1:
        raise DomainError(f"miss_threshold must be >= 1, got {miss_threshold}")
    if period_ms <= 0:
        raise DomainError(f"period_ms must be positive, got {period_ms}")
    if rtt_max_ms < 0 or rtt_avg_ms < 0:
        raise DomainError("round-trip times must be nonnegative")
    worst = (miss_threshold + 1) * period_ms + rtt_max_ms
    mean = (miss_threshold + 0.5) * period_ms + rtt_avg_ms / 2.0
    return worst, mean


def false_positive_prob(loss_rate: float, miss_threshold: int) -> float:
    """Probability, per probe epoch, that the last ``miss_threshold``
    probes all went unanswered on a live path with the given per-direction
    loss rate (a probe fails if its request or its response is lost)."""
    if not 0.0 <= loss_rate <= 1.0:
        raise DomainError(f"loss_rate must be in [0, 1], got {loss_rate}")
    if miss_threshold < 1:
        raise DomainError(f"miss_threshold must be >= 1, got {miss_threshold}")
    return (2.0 * loss_rate - loss_rate * loss_rate) ** miss_threshold


def false_positive_interval(loss_rate: float, miss_threshold: int, period_ms: float) -> float:
    """Mean time between false down declarations, in seconds.

    Returns ``math.inf`` when the false-positive probability is zero.
    """
    if period_ms <= 0:
        raise DomainError(f"period_ms must be positive, got {period_ms}")
    p_fp = false_positive_prob(loss_rate, miss_threshold)
    if p_fp == 0.0:
        return math.inf
    return (period_ms / 1000.0) / p_fp
