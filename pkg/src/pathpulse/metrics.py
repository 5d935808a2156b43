"""Per-session RTT and loss estimation state machines.

One probe exchange feeds three estimators at once:

* Round-trip time.  Requests carry the sender's timestamp and echo the
  peer's last timestamp together with how long ago it was received (the
  turnaround word).  Each side computes ``now - own_echo - turnaround``,
  so neither end needs a table of outstanding probes; the server in
  immediate-response mode keeps no per-request timestamps at all.

* One-way loss, both directions.  Each frame (data or probe) bumps a
  sent/received counter; probes exchange matched counter snapshots.  The
  snapshot pair carried together in one probe is consistent under
  in-order delivery, so interval loss counts are exact: dropping d of n
  frames yields a sample of exactly d/n.

* Round-trip loss at the client, from probe requests sent versus probe
  responses received.  Replies that slip past an interval boundary would
  read as a loss followed by a surplus; the surplus is clamped out of the
  current sample and credited to the next interval so cumulative counts
  stay exact.

Counters and timestamp words are 32-bit and all differences wrap modulo
2**32.  Loss samples are evaluated on the first probe processed after the
loss window (a configurable multiple of the probe period) has elapsed.
Raw samples feed elapsed-time-weighted moving averages held in the same
state objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ewma import EwmaEstimator
from .errors import DomainError
from .records import Metric
from .wire import ProbeBody, u32, u32_sub

DEFAULT_RTT_CEILING_MS = 60_000


@dataclass
class Sample:
    """One raw measurement plus the smoothed value after folding it in."""

    metric: Metric
    raw: float
    ewma: float


def rtl_combine(loss_up: float, loss_down: float) -> float:
    """Round-trip loss implied by independent per-direction loss rates."""
    for name, v in (("loss_up", loss_up), ("loss_down", loss_down)):
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"{name} must be in [0, 1], got {v}")
    return loss_up + loss_down - loss_up * loss_down


def _interval_loss(sent_now: int, sent_mark: int, recv_now: int, recv_mark: int) -> float | None:
    """Exact loss fraction over a counter interval, or None if nothing was sent.

    Differences are taken in integers before the single division so small
    rationals like 1/10 come out exactly.
    """
    sent = u32_sub(sent_now, sent_mark)
    if sent == 0:
        return None
    recv = u32_sub(recv_now, recv_mark)
    lost = sent - recv
    if lost < 0:
        lost = 0
    return lost / sent


@dataclass
class ClientSessionState:
    """Client-end counters, echo variables, and estimators for one path."""

    loss_window_ms: float
    rtt_ewma: EwmaEstimator
    owl_ewma: EwmaEstimator
    rtl_ewma: EwmaEstimator
    rtt_ceiling_ms: int = DEFAULT_RTT_CEILING_MS

    seq: int = 0
    sent_total: int = 0          # every frame sent on the session
    recv_total: int = 0          # every frame received
    peer_ts_ms: int = 0          # last responder timestamp seen, echoed back
    resp_recv_ts_ms: int = 0     # wire clock when that response arrived
    peer_sent_snapshot: int = 0  # peer's sent counter from the last response
    recv_snapshot: int = 0       # own recv counter at that same moment
    have_response: bool = False

    loss_sent_mark: int = 0      # one-way loss marks (echoed-pair domain)
    loss_recv_mark: int = 0
    req_sent: int = 0            # probe-only counters for round-trip loss
    resp_recv: int = 0
    rtl_sent_mark: int = 0
    rtl_recv_mark: int = 0

    next_loss_eval_ms: float | None = None
    last_response_ms: float | None = None
    implausible_rtt: int = 0

    def note_sent(self) -> None:
        """Count one outgoing frame (data or probe)."""
        self.sent_total = u32(self.sent_total + 1)

    def note_received(self) -> None:
        """Count one incoming frame (data or probe)."""
        self.recv_total = u32(self.recv_total + 1)


def build_request(st: ClientSessionState, now_ms: float, counts_packet: bool = True) -> ProbeBody:
    """Assemble the next probe request at time ``now_ms``.

    With ``counts_packet`` the request is counted as a sent frame itself
    (explicit probe); piggybacked requests ride a frame the caller has
    already counted via :meth:`ClientSessionState.note_sent`.
    """
    if counts_packet:
        st.note_sent()
    st.seq = u32(st.seq + 1)
    st.req_sent = u32(st.req_sent + 1)
    if st.next_loss_eval_ms is None:
        st.next_loss_eval_ms = now_ms + st.loss_window_ms
    wire_now = u32(int(now_ms))
    turnaround = u32_sub(wire_now, st.resp_recv_ts_ms) if st.have_response else 0
    return ProbeBody(
        seq=st.seq,
        t_client_ms=wire_now,
        t_server_ms=st.peer_ts_ms,
        turnaround_ms=turnaround,
        sent_count=st.sent_total,
        sent_echo=st.peer_sent_snapshot,
        recv_count=st.recv_snapshot,
    )


def client_on_response(st: ClientSessionState, resp: ProbeBody, now_ms: float) -> list[Sample]:
    """Process a probe response; the frame must already be counted received.

    Always yields an RTT sample (the response echoes this side's own
    timestamp) unless it exceeds the plausibility ceiling.  When the loss
    window has elapsed, also yields one-way loss (client to server) and
    round-trip loss samples.
    """
    samples: list[Sample] = []
    wire_now = u32(int(now_ms))

    rtt_raw = u32_sub(u32_sub(wire_now, resp.t_client_ms), resp.turnaround_ms)
    if rtt_raw <= st.rtt_ceiling_ms:
        samples.append(Sample(Metric.RTT, float(rtt_raw), st.rtt_ewma.update(rtt_raw, now_ms)))
    else:
        st.implausible_rtt += 1

    st.peer_ts_ms = resp.t_server_ms
    st.resp_recv_ts_ms = wire_now
    st.peer_sent_snapshot = resp.sent_count
    st.recv_snapshot = st.recv_total
    st.have_response = True
    st.last_response_ms = now_ms
    st.resp_recv = u32(st.resp_recv + 1)

    if st.next_loss_eval_ms is not None and now_ms >= st.next_loss_eval_ms:
        owl = _interval_loss(resp.sent_echo, st.loss_sent_mark,
                             resp.recv_count, st.loss_recv_mark)
        if owl is not None:
            st.loss_sent_mark = resp.sent_echo
            st.loss_recv_mark = resp.recv_count
            samples.append(Sample(Metric.OWL_C, owl, st.owl_ewma.update(owl, now_ms)))

        req_delta = u32_sub(st.req_sent, st.rtl_sent_mark)
        if req_delta > 0:
            resp_delta = u32_sub(st.resp_recv, st.rtl_recv_mark)
            deficit = req_delta - resp_delta
            rtl = max(deficit, 0) / req_delta
            excess = max(-deficit, 0)
            st.rtl_sent_mark = st.req_sent
            # Surplus replies belong to earlier intervals; credit them forward
            # so the next interval's received count absorbs them.
            st.rtl_recv_mark = u32(st.resp_recv - excess)
            samples.append(Sample(Metric.RTL, rtl, st.rtl_ewma.update(rtl, now_ms)))

        if owl is not None or req_delta > 0:
            _advance_loss_deadline(st, now_ms)

    return samples


def _advance_loss_deadline(st, now_ms: float) -> None:
    """Move to the next loss-window boundary, skipping any the session
    slept through (a blackout merges the missed intervals into one)."""
    st.next_loss_eval_ms += st.loss_window_ms
    while st.next_loss_eval_ms <= now_ms:
        st.next_loss_eval_ms += st.loss_window_ms


@dataclass
class PendingResponse:
    """Response material held while the server waits to piggyback it."""

    t_client_echo: int
    sent_echo: int
    recv_ts_ms: int        # wire clock when the request arrived
    recv_time_ms: float    # engine clock, for the hold deadline


@dataclass
class ServerSessionState:
    """Server-end counters and estimators for one monitored path.

    In immediate-response mode nothing per-request is retained; delayed
    (piggyback) mode stores at most one :class:`PendingResponse`.
    """

    loss_window_ms: float
    rtt_ewma: EwmaEstimator
    owl_ewma: EwmaEstimator
    rtt_ceiling_ms: int = DEFAULT_RTT_CEILING_MS

    seq: int = 0
    sent_total: int = 0
    recv_total: int = 0
    loss_sent_mark: int = 0
    loss_recv_mark: int = 0
    next_loss_eval_ms: float | None = None
    implausible_rtt: int = 0
    pending: PendingResponse | None = field(default=None)

    def note_sent(self) -> None:
        self.sent_total = u32(self.sent_total + 1)

    def note_received(self) -> None:
        self.recv_total = u32(self.recv_total + 1)


def server_ingest_request(st: ServerSessionState, req: ProbeBody, now_ms: float) -> list[Sample]:
    """Extract measurements from a request; the frame must be counted already.

    The RTT sample is suppressed for a request whose responder-timestamp
    word is the 0 sentinel (first exchange, nothing echoed yet).  One-way
    loss (server to client) is evaluated from the echoed counter pair when
    the loss window has elapsed.
    """
    samples: list[Sample] = []
    if st.next_loss_eval_ms is None:
        st.next_loss_eval_ms = now_ms + st.loss_window_ms

    if req.t_server_ms != 0:
        wire_now = u32(int(now_ms))
        rtt_raw = u32_sub(u32_sub(wire_now, req.t_server_ms), req.turnaround_ms)
        if rtt_raw <= st.rtt_ceiling_ms:
            samples.append(Sample(Metric.RTT, float(rtt_raw), st.rtt_ewma.update(rtt_raw, now_ms)))
        else:
            st.implausible_rtt += 1

    if now_ms >= st.next_loss_eval_ms:
        owl = _interval_loss(req.sent_echo, st.loss_sent_mark,
                             req.recv_count, st.loss_recv_mark)
        if owl is not None:
            st.loss_sent_mark = req.sent_echo
            st.loss_recv_mark = req.recv_count
            _advance_loss_deadline(st, now_ms)
            samples.append(Sample(Metric.OWL_S, owl, st.owl_ewma.update(owl, now_ms)))

    return samples


def server_build_response(st: ServerSessionState, t_client_echo: int, sent_echo: int,
                          recv_ts_ms: int, now_ms: float,
                          counts_packet: bool = True) -> ProbeBody:
    """Assemble a response at send time ``now_ms``.

    ``recv_ts_ms`` is the wire clock when the matching request arrived;
    the turnaround word covers any hold the server introduced, so delayed
    responses do not distort the client's RTT.
    """
    if counts_packet:
        st.note_sent()
    st.seq = u32(st.seq + 1)
    wire_now = u32(int(now_ms))
    return ProbeBody(
        seq=st.seq,
        t_client_ms=t_client_echo,
        t_server_ms=wire_now,
        turnaround_ms=u32_sub(wire_now, recv_ts_ms),
        sent_count=st.sent_total,
        sent_echo=sent_echo,
        recv_count=st.recv_total,
    )


def server_on_request(st: ServerSessionState, req: ProbeBody,
                      now_ms: float) -> tuple[ProbeBody, list[Sample]]:
    """Immediate-response handling: ingest measurements and reply at once."""
    samples = server_ingest_request(st, req, now_ms)
    resp = server_build_response(st, req.t_client_ms, req.sent_count,
                                 u32(int(now_ms)), now_ms)
    return resp, samples
