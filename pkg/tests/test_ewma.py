"""Tests for the elapsed-time-weighted moving average."""

import math
import random

import pytest

from pathpulse.errors import DomainError
from pathpulse.ewma import Direction, EwmaEstimator, tau_from_alpha, timeliness


def closed_form(history, tau):
    # Independent oracle: direct evaluation of the recurrence
    # S = (1 - e^{-dt/tau}) x + e^{-dt/tau} S from raw (t, x) pairs.
    value = None
    last_t = None
    for t, x in history:
        if value is None:
            value = x
        else:
            keep = math.exp(-(t - last_t) / tau)
            value = (1 - keep) * x + keep * value
        last_t = t
    return value


# --- time constant ----------------------------------------------------------

def test_tau_table_at_200ms_reference():
    # Smoothing factors 0.8/0.6/0.4/0.2 at a 200 ms reference interval.
    expect = {0.8: 0.124, 0.6: 0.218, 0.4: 0.392, 0.2: 0.896}
    for alpha, tau_s in expect.items():
        assert tau_from_alpha(alpha, 0.200) == pytest.approx(tau_s, abs=0.0005)


def test_tau_at_one_over_e():
    # 1 - alpha = 1/e makes tau equal the reference interval by definition.
    assert tau_from_alpha(1 - math.exp(-1), 1.0) == pytest.approx(1.0, abs=1e-12)
    assert tau_from_alpha(0.632121, 1.0) == pytest.approx(1.0, abs=1e-5)


def test_tau_at_2s_reference():
    assert tau_from_alpha(0.8, 2.0) == pytest.approx(1.243, abs=0.0005)


def test_tau_is_unit_preserving():
    assert tau_from_alpha(0.8, 200.0) == pytest.approx(1000 * tau_from_alpha(0.8, 0.2))


@pytest.mark.parametrize("alpha,interval", [(0.0, 1.0), (1.0, 1.0), (-0.1, 1.0),
                                            (1.5, 1.0), (0.5, 0.0), (0.5, -2.0)])
def test_tau_domain_errors(alpha, interval):
    with pytest.raises(DomainError):
        tau_from_alpha(alpha, interval)


# --- update -----------------------------------------------------------------

def test_first_sample_initializes():
    est = EwmaEstimator(tau_up=1.0)
    assert est.update(100.0, at=5.0) == 100.0
    assert est.initialized
    assert est.value == 100.0


def test_update_matches_alpha_construction():
    # tau built from alpha=0.2 at 0.2 s makes the decay weight exactly 0.8
    # for a 0.2 s gap, so 100 -> 0.2*200 + 0.8*100 = 120.
    tau = tau_from_alpha(0.2, 0.2)
    est = EwmaEstimator(tau_up=tau)
    est.update(100.0, at=0.0)
    assert est.update(200.0, at=0.2) == pytest.approx(120.0, rel=1e-9)


def test_decay_reaches_one_over_e_at_tau():
    tau = 0.7
    est = EwmaEstimator(tau_up=tau)
    est.update(100.0, at=0.0)
    steps = 20
    for i in range(1, steps + 1):
        est.update(0.0, at=i * tau / steps)
    assert est.value == pytest.approx(100.0 / math.e, rel=1e-9)


def test_two_degrees_of_freedom_collapse():
    # Any (alpha, T) pair with the same tau drives identical estimates.
    rng = random.Random(3)
    for _ in range(50):
        a1 = rng.uniform(0.05, 0.95)
        t1 = rng.uniform(0.05, 5.0)
        tau = tau_from_alpha(a1, t1)
        a2 = rng.uniform(0.05, 0.95)
        t2 = -tau * math.log(1 - a2)  # second pair mapped onto the same tau
        assert tau_from_alpha(a2, t2) == pytest.approx(tau, rel=1e-12)
        e1 = EwmaEstimator(tau_up=tau_from_alpha(a1, t1))
        e2 = EwmaEstimator(tau_up=tau_from_alpha(a2, t2))
        t = 0.0
        for _ in range(40):
            t += rng.uniform(0.01, 2.0)
            x = rng.uniform(0.0, 500.0)
            v1 = e1.update(x, at=t)
            v2 = e2.update(x, at=t)
            assert v1 == pytest.approx(v2, rel=1e-9)


def test_regular_interval_equals_classic_ewma():
    # With a constant gap T the generalized update is the textbook
    # recurrence with alpha = 1 - e^{-T/tau}.
    rng = random.Random(4)
    for _ in range(20):
        tau = rng.uniform(0.1, 3.0)
        period = rng.uniform(0.05, 1.0)
        alpha = 1 - math.exp(-period / tau)
        est = EwmaEstimator(tau_up=tau)
        classic = None
        for k in range(60):
            x = rng.uniform(0, 100)
            got = est.update(x, at=k * period)
            classic = x if classic is None else alpha * x + (1 - alpha) * classic
            assert got == pytest.approx(classic, rel=1e-9)


def test_matches_closed_form_oracle_on_irregular_stream():
    rng = random.Random(5)
    tau = 0.9
    history = []
    t = 0.0
    est = EwmaEstimator(tau_up=tau)
    for _ in range(200):
        t += rng.uniform(0.001, 1.5)
        x = rng.uniform(-50, 150)
        history.append((t, x))
        est.update(x, at=t)
    assert est.value == pytest.approx(closed_form(history, tau), rel=1e-9)


def test_step_response_settles_by_timeliness_bound():
    # After a step, the estimate is within 10% of the new level for all
    # times >= tau*ln(10), at several sampling rates.
    for steps_per_tau in (2, 5, 20, 100):
        tau = 1.0
        est = EwmaEstimator(tau_up=tau)
        est.update(100.0, at=0.0)
        t_step = 1.0
        dt = tau / steps_per_tau
        t = t_step
        bound = timeliness(tau)
        while t < t_step + 4 * bound:
            est.update(200.0, at=t)
            if t - t_step >= bound:
                assert abs(est.value - 200.0) <= 0.1 * 100.0
            t += dt


def test_convexity_value_between_previous_and_sample():
    rng = random.Random(6)
    est = EwmaEstimator(tau_up=0.5)
    t = 0.0
    est.update(rng.uniform(0, 100), at=t)
    for _ in range(500):
        t += rng.uniform(0.001, 2.0)
        prev = est.value
        x = rng.uniform(-100, 200)
        v = est.update(x, at=t)
        lo, hi = min(prev, x), max(prev, x)
        assert lo - 1e-12 <= v <= hi + 1e-12


def test_value_stays_within_sample_range():
    rng = random.Random(7)
    est = EwmaEstimator(tau_up=0.3)
    t = 0.0
    lo = hi = None
    for _ in range(300):
        t += rng.uniform(0.01, 1.0)
        x = rng.uniform(-5, 5)
        lo = x if lo is None else min(lo, x)
        hi = x if hi is None else max(hi, x)
        est.update(x, at=t)
        assert lo - 1e-12 <= est.value <= hi + 1e-12


def test_out_of_order_and_equal_timestamps_dropped():
    est = EwmaEstimator(tau_up=1.0)
    est.update(10.0, at=1.0)
    v = est.update(20.0, at=2.0)
    assert est.update(99.0, at=2.0) == v      # equal timestamp: no-op
    assert est.update(99.0, at=1.5) == v      # regression: no-op
    assert est.dropped == 2
    assert est.last_sample_time == 2.0


def test_symmetric_mode_ignores_worse_direction():
    for direction in (Direction.INCREASE, Direction.DECREASE):
        est = EwmaEstimator(tau_up=0.4, tau_down=0.4, worse_direction=direction)
        est.update(50.0, at=0.0)
        est.update(150.0, at=0.3)
        est.update(20.0, at=0.9)
        ref = closed_form([(0.0, 50.0), (0.3, 150.0), (0.9, 20.0)], 0.4)
        assert est.value == pytest.approx(ref, rel=1e-12)


def test_asymmetric_tracks_rises_fast_and_falls_slow():
    # Three-level input: the asymmetric estimator must reach 90% of an
    # upward change no later than a symmetric fast estimator, and fall no
    # sooner than a symmetric slow one.
    tau_fast, tau_slow = 1.24, 8.96
    levels = [(0.0, 200.0), (5.0, 300.0), (10.0, 200.0), (15.0, 100.0)]

    def run(estimator):
        trace = []
        t = 0.0
        while t < 20.0:
            level = [v for s, v in levels if s <= t][-1]
            trace.append((t, estimator.update(level, at=t)))
            t += 0.5
        return trace

    asym = run(EwmaEstimator(tau_up=tau_fast, tau_down=tau_slow))
    fast = run(EwmaEstimator(tau_up=tau_fast))
    slow = run(EwmaEstimator(tau_up=tau_slow))

    def reach_time(trace, t0, target, rising):
        for t, v in trace:
            if t >= t0 and ((v >= target) if rising else (v <= target)):
                return t
        return math.inf

    # Upward 200 -> 300 at t=5: 90% point is 290.
    assert reach_time(asym, 5.0, 290.0, True) <= reach_time(fast, 5.0, 290.0, True)
    # Downward 300 -> 200 at t=10: asym must not be below the slow
    # estimator's value anywhere on the way down.
    slow_by_t = dict(slow)
    for t, v in asym:
        if 10.0 <= t < 15.0:
            assert v >= slow_by_t[t] - 1e-9


# --- timeliness --------------------------------------------------------------

def test_timeliness_values():
    assert timeliness(1.0) == pytest.approx(math.log(10), rel=1e-12)
    assert timeliness(0.87) == pytest.approx(2.0, abs=0.005)


def test_timeliness_domain():
    with pytest.raises(DomainError):
        timeliness(0.0)
    with pytest.raises(DomainError):
        timeliness(-1.0)


def test_step_crossing_time_matches_timeliness():
    # Driving updates at tau/10 per sample, the estimate first comes
    # within 10% of a step at a time within one sample period of
    # tau*ln(10).  Oracle: residual after elapsed time e is exactly
    # e^{-e/tau}, so the crossing lands at the first sample past the bound.
    for tau in (0.124, 0.218, 0.392, 0.896, 2.0):
        est = EwmaEstimator(tau_up=tau)
        est.update(100.0, at=0.0)
        dt = tau / 10.0
        t = 0.0
        crossed = None
        for _ in range(200):
            t += dt
            v = est.update(200.0, at=t)
            if v >= 190.0:
                crossed = t
                break
        assert crossed is not None
        assert abs(crossed - timeliness(tau)) <= dt + 1e-9


def test_estimator_rejects_bad_tau():
    with pytest.raises(DomainError):
        EwmaEstimator(tau_up=0.0)
    with pytest.raises(DomainError):
        EwmaEstimator(tau_up=1.0, tau_down=-0.5)
