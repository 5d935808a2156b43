"""Exponentially weighted averaging for irregularly spaced samples.

The classic EWMA ``S = alpha*x + (1-alpha)*S`` assumes samples arrive on a
fixed period T.  Here the smoothing weight is derived from the elapsed
time instead, so the estimator behaves identically whatever the sampling
cadence:

    S_new = (1 - exp(-dt/tau)) * sample + exp(-dt/tau) * S_old

``tau`` is the time constant: with all-zero input the estimate decays to
1/e of its value after exactly ``tau``.  A pair (alpha, T) collapses onto
this single degree of freedom via ``tau = -T / ln(1 - alpha)``.

Time units are the caller's choice; ``tau`` and the ``at`` timestamps just
have to agree (the engine feeds milliseconds, the documented defaults are
seconds).  An optional asymmetric mode applies a shorter time constant to
samples that move the estimate in the "worsening" direction, so e.g. a
latency estimator reacts quickly to degradation and forgets improvements
slowly.
"""

from __future__ import annotations

import enum
import math

from .errors import DomainError


class Direction(enum.Enum):
    """Which way a sample must move to count as a worsening."""

    INCREASE = "increase"
    DECREASE = "decrease"


def tau_from_alpha(alpha: float, reference_interval: float) -> float:
    """Time constant equivalent to smoothing factor ``alpha`` at period T.

    Returns ``-T / ln(1 - alpha)`` in the same unit as the interval.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    if reference_interval <= 0.0:
        raise DomainError(f"reference interval must be positive, got {reference_interval}")
    return -reference_interval / math.log(1.0 - alpha)


def timeliness(tau: float) -> float:
    """Time for a step response to settle within 10%: ``tau * ln(10)``."""
    if tau <= 0.0:
        raise DomainError(f"tau must be positive, got {tau}")
    return tau * math.log(10.0)


class EwmaEstimator:
    """Elapsed-time-weighted moving average, optionally asymmetric.

    The first sample initializes the estimate directly.  Samples at or
    before the last accepted timestamp are dropped and counted in
    ``dropped`` (a zero or negative gap carries no information).
    """

    __slots__ = ("tau_up", "tau_down", "worse_direction", "value",
                 "last_sample_time", "initialized", "dropped")

    def __init__(self, tau_up: float, tau_down: float | None = None,
                 worse_direction: Direction = Direction.INCREASE):
        if tau_up <= 0.0:
            raise DomainError(f"tau_up must be positive, got {tau_up}")
        if tau_down is None:
            tau_down = tau_up
        if tau_down <= 0.0:
            raise DomainError(f"tau_down must be positive, got {tau_down}")
        self.tau_up = tau_up
        self.tau_down = tau_down
        self.worse_direction = worse_direction
        self.value = 0.0
        self.last_sample_time = 0.0
        self.initialized = False
        self.dropped = 0

    @property
    def symmetric(self) -> bool:
        return self.tau_up == self.tau_down

    def _tau_for(self, sample: float) -> float:
        if self.worse_direction is Direction.INCREASE:
            worsening = sample > self.value
        else:
            worsening = sample < self.value
        return self.tau_up if worsening else self.tau_down

    def update(self, sample: float, at: float) -> float:
        """Fold one sample taken at time ``at`` into the estimate."""
        if not self.initialized:
            self.value = float(sample)
            self.last_sample_time = at
            self.initialized = True
            return self.value
        dt = at - self.last_sample_time
        if dt <= 0.0:
            self.dropped += 1
            return self.value
        keep = math.exp(-dt / self._tau_for(sample))
        self.value = (1.0 - keep) * sample + keep * self.value
        self.last_sample_time = at
        return self.value
