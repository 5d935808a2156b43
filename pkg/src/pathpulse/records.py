"""Measurement and status event records plus CSV / JSON-lines rendering.

Both renderings carry the same fields in the same order so downstream
tooling can switch formats freely.  Timestamps are engine milliseconds
(virtual or monotonic); every writer output is a pure function of the
records, which keeps reruns byte-identical.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import IO, Union


class Metric(enum.Enum):
    RTT = "rtt"
    OWL_C = "owl_c"
    OWL_S = "owl_s"
    RTL = "rtl"


@dataclass(frozen=True)
class MeasurementRecord:
    session: str
    t_ms: float
    metric: Metric
    raw: float
    ewma: float


@dataclass(frozen=True)
class StatusRecord:
    session: str
    t_ms: float
    old_status: str
    new_status: str


Record = Union[MeasurementRecord, StatusRecord]

CSV_HEADER = "kind,session,t_ms,metric,raw,ewma,old_status,new_status"
_FIELDS = ("kind", "session", "t_ms", "metric", "raw", "ewma", "old_status", "new_status")


def _fields_of(record: Record) -> dict:
    if isinstance(record, MeasurementRecord):
        return {
            "kind": "measurement",
            "session": record.session,
            "t_ms": round(record.t_ms, 3),
            "metric": record.metric.value,
            "raw": round(record.raw, 6),
            "ewma": round(record.ewma, 6),
            "old_status": None,
            "new_status": None,
        }
    return {
        "kind": "status",
        "session": record.session,
        "t_ms": round(record.t_ms, 3),
        "metric": None,
        "raw": None,
        "ewma": None,
        "old_status": record.old_status,
        "new_status": record.new_status,
    }


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}".rstrip("0").rstrip(".")
    return str(value)


def to_csv_row(record: Record) -> str:
    f = _fields_of(record)
    return ",".join(_csv_cell(f[name]) for name in _FIELDS)


def to_jsonl(record: Record) -> str:
    f = _fields_of(record)
    return json.dumps({name: f[name] for name in _FIELDS}, separators=(",", ":"))


class LogWriter:
    """Streams records to a file object as CSV or JSON lines."""

    def __init__(self, stream: IO[str], fmt: str = "csv"):
        if fmt not in ("csv", "jsonl"):
            raise ValueError(f"unknown log format {fmt!r}")
        self.stream = stream
        self.fmt = fmt
        self._wrote_header = False

    def write(self, record: Record) -> None:
        if self.fmt == "csv":
            if not self._wrote_header:
                self.stream.write(CSV_HEADER + "\n")
                self._wrote_header = True
            self.stream.write(to_csv_row(record) + "\n")
        else:
            self.stream.write(to_jsonl(record) + "\n")

    def flush(self) -> None:
        self.stream.flush()
