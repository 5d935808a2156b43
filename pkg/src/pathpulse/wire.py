"""Wire formats: probe bodies, data frames, and piggyback trailers.

Every probe request or response carries the same 28-byte body (all words
big-endian, 32-bit):

    offset  0   seq            sender's probe sequence number
    offset  4   t_client_ms    requester-clock timestamp word
    offset  8   t_server_ms    responder-clock timestamp word
    offset 12   turnaround_ms  delay between receiving the packet whose
                               timestamp is echoed and sending this one
    offset 16   sent_count     sender's total-sent counter (counts this frame)
    offset 20   sent_echo      echoed total-sent counter of the peer
    offset 24   recv_count     receive-counter snapshot paired with the echo

A request fills t_client_ms with its own send time and echoes the last
t_server_ms it saw; a response echoes t_client_ms and fills t_server_ms.
Both sides recover the round trip as ``now - own_echoed_timestamp -
peer_turnaround`` without storing per-probe state.

Data frames are synthetic datagrams: one header byte whose high nibble is
the version (4 = plain) followed by opaque payload.  A piggybacked frame
sets the version nibble to 15 and appends a probe body as the last 28
bytes; extraction restores the nibble to 4.  Timestamps are milliseconds
from an arbitrary monotonic epoch truncated to 32 bits; all differences
are taken modulo 2**32, which stays correct for intervals below ~49 days.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

from .errors import LengthError, MalformedError, VersionError

U32_MASK = 0xFFFFFFFF
U32_MOD = 1 << 32

PROBE_BODY_LEN = 28
VERSION_PLAIN = 4
VERSION_PIGGYBACK = 15

_BODY = struct.Struct("!7I")


def u32(value: int) -> int:
    """Truncate to an unsigned 32-bit word."""
    return value & U32_MASK


def u32_sub(a: int, b: int) -> int:
    """a - b modulo 2**32 (wrap-safe counter/timestamp difference)."""
    return (a - b) & U32_MASK


@dataclass(frozen=True)
class ProbeBody:
    """The six measurement words plus sequence number of one probe."""

    seq: int
    t_client_ms: int
    t_server_ms: int
    turnaround_ms: int
    sent_count: int
    sent_echo: int
    recv_count: int

    def __post_init__(self):
        for name in ("seq", "t_client_ms", "t_server_ms", "turnaround_ms",
                     "sent_count", "sent_echo", "recv_count"):
            v = getattr(self, name)
            if not 0 <= v <= U32_MASK:
                raise ValueError(f"{name}={v} does not fit in an unsigned 32-bit word")


class FrameKind(enum.Enum):
    PROBE_REQUEST = "probe_request"
    PROBE_RESPONSE = "probe_response"
    DATA = "data"
    DATA_PB_REQUEST = "data_pb_request"
    DATA_PB_RESPONSE = "data_pb_response"


class Lane(enum.Enum):
    """Which reserved destination a frame was addressed to."""

    PROBE = "probe"
    DATA = "data"


def encode_probe(body: ProbeBody) -> bytes:
    """Serialize a probe body to its 28-byte wire form."""
    return _BODY.pack(body.seq, body.t_client_ms, body.t_server_ms,
                      body.turnaround_ms, body.sent_count, body.sent_echo,
                      body.recv_count)


def decode_probe(data: bytes) -> ProbeBody:
    """Inverse of :func:`encode_probe`; raises LengthError on bad size."""
    if len(data) != PROBE_BODY_LEN:
        raise LengthError(f"probe body must be {PROBE_BODY_LEN} bytes, got {len(data)}")
    return ProbeBody(*_BODY.unpack(data))


def version_of(datagram: bytes) -> int:
    """High nibble of the first byte of a synthetic datagram."""
    if not datagram:
        raise LengthError("empty datagram has no version nibble")
    return datagram[0] >> 4


def make_datagram(payload: bytes, version: int = VERSION_PLAIN, low_nibble: int = 0) -> bytes:
    """Build a synthetic datagram: 1-byte version header plus payload."""
    if not 0 <= version <= 15 or not 0 <= low_nibble <= 15:
        raise VersionError("version and low nibble must fit in 4 bits")
    return bytes([(version << 4) | low_nibble]) + payload


def _with_version(datagram: bytes, version: int) -> bytes:
    return bytes([(version << 4) | (datagram[0] & 0x0F)]) + datagram[1:]


def attach_piggyback(inner: bytes, body: ProbeBody, mtu_budget: int) -> bytes | None:
    """Append a probe trailer to a plain datagram if it fits the MTU budget.

    Returns the marked datagram (version nibble 15, 28-byte trailer), or
    None when attaching would push the frame past ``mtu_budget`` and the
    caller must fall back to an explicit probe.
    """
    if version_of(inner) != VERSION_PLAIN:
        raise VersionError(f"can only piggyback on version-{VERSION_PLAIN} datagrams")
    if len(inner) + PROBE_BODY_LEN > mtu_budget:
        return None
    return _with_version(inner, VERSION_PIGGYBACK) + encode_probe(body)


def extract_piggyback(datagram: bytes) -> tuple[bytes, ProbeBody] | None:
    """Strip a piggyback trailer, restoring the version nibble to 4.

    Returns (restored datagram, probe body) for marked frames and None for
    plain ones.  Raises MalformedError when the mark is present but the
    frame is too short to hold a trailer.
    """
    if version_of(datagram) != VERSION_PIGGYBACK:
        return None
    if len(datagram) < 1 + PROBE_BODY_LEN:
        raise MalformedError(f"marked datagram of {len(datagram)} bytes cannot hold a trailer")
    body = decode_probe(datagram[-PROBE_BODY_LEN:])
    restored = _with_version(datagram[:-PROBE_BODY_LEN], VERSION_PLAIN)
    return restored, body


def classify_frame(lane: Lane, at_server: bool, payload: bytes) -> FrameKind:
    """Decide a frame's kind from the reserved lane it arrived on.

    Frames on the probe lane are requests at the server end and responses
    at the client end.  Frames on the data lane split on the version
    nibble: 15 means a piggybacked body rides along.
    """
    if lane is Lane.PROBE:
        return FrameKind.PROBE_REQUEST if at_server else FrameKind.PROBE_RESPONSE
    if payload and version_of(payload) == VERSION_PIGGYBACK:
        return FrameKind.DATA_PB_REQUEST if at_server else FrameKind.DATA_PB_RESPONSE
    return FrameKind.DATA
