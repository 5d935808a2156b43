"""pathpulse: user-space keep-alive probing over UDP paths.

One probe exchange per period carries everything needed for three
measurements at once: round-trip time (echoed timestamps plus turnaround
deltas, no clock sync), one-way loss in both directions (exchanged
send/receive counters), and a liveness verdict (consecutive unanswered
probes).  The package also ships the closed-form planner that picks the
probe period and miss threshold from responsiveness / false-positive
targets, a piggybacking datapath that rides measurements on existing
traffic, and a deterministic link-impairment emulator for repeatable
experiments.
"""

__version__ = "0.1.0"

from .wire import ProbeBody, encode_probe, decode_probe, attach_piggyback, extract_piggyback
from .ewma import EwmaEstimator, tau_from_alpha, timeliness
from .planner import PlannerInput, PlannerResult, solve

__all__ = [
    "ProbeBody",
    "encode_probe",
    "decode_probe",
    "attach_piggyback",
    "extract_piggyback",
    "EwmaEstimator",
    "tau_from_alpha",
    "timeliness",
    "PlannerInput",
    "PlannerResult",
    "solve",
]
