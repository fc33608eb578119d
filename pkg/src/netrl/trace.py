"""Per-message latency measurement, distribution summaries, and trace files.

Latency is (recv_ts - send_ts) / 1000 in milliseconds, straight from the
message timestamps. Trace files are line-oriented text so they diff cleanly:

    trace v1 delivered=<n> dropped=<m>
    <seq>,<send_us>,<recv_us>      one line per delivered message
    <seq>,<send_us>,DROPPED        one line per dropped message

Records appear in submission order; a loaded trace replays delivered
latencies through a TraceModel whose p_loss is the observed drop rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .shim import TraceModel

TRACE_HEADER_PREFIX = "trace v1"


class EmptyTraceError(Exception):
    pass


class TraceFormatError(Exception):
    pass


class ExportError(Exception):
    pass


@dataclass(frozen=True)
class LatencySample:
    seq: int
    send_us: int
    recv_us: int
    latency_ms: float


@dataclass(frozen=True)
class TraceSummary:
    count: int
    mean_ms: float
    std_ms: float
    p50_ms: float
    p95_ms: float
    loss_rate: float


def percentile(samples: list[float], q: float) -> float:
    """Nearest-rank percentile: element at index ceil(q/100 * n) - 1 after sorting.

    q=0 maps to the first element. No interpolation.
    """
    if not samples:
        raise EmptyTraceError("percentile of empty sample list")
    if not 0.0 <= q <= 100.0:
        raise ValueError(f"q must be in [0, 100], got {q}")
    ordered = sorted(samples)
    idx = max(0, math.ceil(q / 100.0 * len(ordered)) - 1)
    return ordered[idx]


class LatencyTracer:
    """Appends one record per message, then summarizes or exports."""

    def __init__(self):
        # (seq, send_us, recv_us | None); None marks a drop
        self._events: list[tuple[int, int, int | None]] = []

    def record(self, send_us: int, recv_us: int, seq: int) -> LatencySample:
        self._events.append((seq, send_us, recv_us))
        return LatencySample(seq, send_us, recv_us, (recv_us - send_us) / 1000.0)

    def record_drop(self, seq: int, send_us: int) -> None:
        self._events.append((seq, send_us, None))

    @property
    def delivered_latencies_ms(self) -> list[float]:
        return [(r - s) / 1000.0 for _, s, r in self._events if r is not None]

    @property
    def delivered_count(self) -> int:
        return sum(1 for _, _, r in self._events if r is not None)

    @property
    def dropped_count(self) -> int:
        return sum(1 for _, _, r in self._events if r is None)

    def __len__(self) -> int:
        return len(self._events)

    def summarize(self) -> TraceSummary:
        lats = self.delivered_latencies_ms
        if not lats:
            raise EmptyTraceError("no delivered samples to summarize")
        n = len(lats)
        mean = sum(lats) / n
        var = sum((x - mean) ** 2 for x in lats) / n
        total = len(self._events)
        return TraceSummary(
            count=n,
            mean_ms=mean,
            std_ms=math.sqrt(var),
            p50_ms=percentile(lats, 50),
            p95_ms=percentile(lats, 95),
            loss_rate=self.dropped_count / total,
        )

    def export(self, path) -> None:
        if not self._events:
            raise ExportError("refusing to export an empty trace")
        lines = [
            f"{TRACE_HEADER_PREFIX} delivered={self.delivered_count} dropped={self.dropped_count}"
        ]
        for seq, send_us, recv_us in self._events:
            tail = "DROPPED" if recv_us is None else str(recv_us)
            lines.append(f"{seq},{send_us},{tail}")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


def read_trace(path) -> LatencyTracer:
    """Parse a trace file back into a tracer, validating the header counts."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or not lines[0].startswith(TRACE_HEADER_PREFIX):
        raise TraceFormatError(f"missing trace header in {path}")
    try:
        fields = dict(part.split("=") for part in lines[0].split()[2:])
        want_delivered = int(fields["delivered"])
        want_dropped = int(fields["dropped"])
    except (ValueError, KeyError) as exc:
        raise TraceFormatError(f"malformed header: {lines[0]!r}") from exc

    tracer = LatencyTracer()
    for ln in lines[1:]:
        if not ln:
            continue
        parts = ln.split(",")
        if len(parts) != 3:
            raise TraceFormatError(f"malformed record: {ln!r}")
        try:
            seq, send_us = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise TraceFormatError(f"malformed record: {ln!r}") from exc
        if parts[2] == "DROPPED":
            tracer.record_drop(seq, send_us)
        else:
            try:
                tracer.record(send_us, int(parts[2]), seq)
            except ValueError as exc:
                raise TraceFormatError(f"malformed record: {ln!r}") from exc
    if tracer.delivered_count != want_delivered or tracer.dropped_count != want_dropped:
        raise TraceFormatError(
            f"header says delivered={want_delivered} dropped={want_dropped}, "
            f"file has {tracer.delivered_count}/{tracer.dropped_count}"
        )
    return tracer


def load_trace(path, seed: int = 0) -> TraceModel:
    """Build a replayable TraceModel from a recorded trace file."""
    tracer = read_trace(path)
    lats = tracer.delivered_latencies_ms
    if not lats:
        raise TraceFormatError(f"trace {path} has no delivered samples to replay")
    total = len(tracer)
    return TraceModel(
        delays_ms=tuple(lats),
        p_loss=tracer.dropped_count / total,
        seed=seed,
    )
