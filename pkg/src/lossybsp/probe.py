"""Datagram link probe: loss rate, round-trip delay, and bandwidth estimation.

A probe run sends sequenced datagrams to an echo responder and derives the
model's network parameters from what comes back:

* loss_rate: fraction of probes unechoed after a drain timeout,
* rtt: per-echo round-trip times (the responder returns the sender's
  timestamp, so only the sender's clock is involved),
* bandwidth: a back-to-back burst timed at the responder between its first
  and last arrival; the responder reports the tally in a summary datagram
  sent five times so it survives loss.

Wire format (little-endian, 24-byte header, zero-filled payload):

    offset  size  field
    0       4     magic  b"PRB1"
    4       2     version (1)
    6       2     type    (1 probe, 2 echo, 3 burst, 4 summary request,
                           5 summary)
    8       4     sequence number
    12      8     sender's timestamp, ns
    20      4     payload length

A summary's payload is ``<IQQ``: datagrams received in the burst, bytes in
all but the first, and the ns span between first and last arrival (so
bytes/span is the receiver-side throughput).

Transports implement the ``PacketConn`` protocol. ``UdpConn`` wraps a UDP
socket; ``LossyChannel`` is an in-process pair of endpoints with seeded
per-direction Bernoulli loss and fixed one-way delays, used for deterministic
tests. The responder serves one client at a time.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
import socket
import statistics
import struct
import threading
import time
from dataclasses import dataclass
from typing import Any, Iterable, Protocol

import numpy as np

from .model import NetworkParams

__all__ = [
    "HEADER",
    "MAGIC",
    "VERSION",
    "PacketType",
    "Header",
    "pack_packet",
    "unpack_packet",
    "PacketConn",
    "UdpConn",
    "LossyChannel",
    "EchoResponder",
    "ProbeSample",
    "run_probe",
    "to_network_params",
    "samples_to_csv",
    "samples_from_csv",
]

log = logging.getLogger(__name__)

MAGIC = b"PRB1"
VERSION = 1
HEADER = struct.Struct("<4sHHIQI")
SUMMARY_PAYLOAD = struct.Struct("<IQQ")


class PacketType:
    PROBE = 1
    ECHO = 2
    BURST = 3
    SUMMARY_REQUEST = 4
    SUMMARY = 5


@dataclass(frozen=True)
class Header:
    ptype: int
    seq: int
    timestamp_ns: int
    payload: bytes


def pack_packet(ptype: int, seq: int, timestamp_ns: int, payload: bytes = b"") -> bytes:
    return HEADER.pack(MAGIC, VERSION, ptype, seq, timestamp_ns, len(payload)) + payload


def unpack_packet(data: bytes) -> Header:
    """Parse a datagram; raises ValueError on anything malformed."""
    if len(data) < HEADER.size:
        raise ValueError(f"datagram too short: {len(data)} bytes")
    magic, version, ptype, seq, ts, payload_len = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported version {version}")
    payload = data[HEADER.size :]
    if len(payload) != payload_len:
        raise ValueError(f"payload length {len(payload)} != declared {payload_len}")
    return Header(ptype=ptype, seq=seq, timestamp_ns=ts, payload=payload)


class PacketConn(Protocol):
    """Minimal unreliable-datagram transport."""

    def send(self, data: bytes, addr: Any | None = None) -> None: ...

    def recv(self, timeout: float | None) -> tuple[bytes, Any] | None:
        """Next datagram as (data, source address), or None on timeout."""
        ...

    def close(self) -> None: ...


class UdpConn:
    """UDP socket transport. ``peer`` fixes the default destination."""

    def __init__(
        self,
        bind: tuple[str, int] | None = None,
        peer: tuple[str, int] | None = None,
    ) -> None:
        self.sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self.sock.bind(bind if bind is not None else ("0.0.0.0", 0))
        self.peer = peer

    @property
    def address(self) -> tuple[str, int]:
        return self.sock.getsockname()

    def send(self, data: bytes, addr: Any | None = None) -> None:
        target = addr if addr is not None else self.peer
        if target is None:
            raise ValueError("no destination: pass addr or construct with peer")
        self.sock.sendto(data, target)

    def recv(self, timeout: float | None) -> tuple[bytes, Any] | None:
        self.sock.settimeout(timeout)
        try:
            data, addr = self.sock.recvfrom(65536)
            return data, addr
        except socket.timeout:
            return None
        except ConnectionError:
            # ICMP port-unreachable surfaces here on some platforms
            return None

    def close(self) -> None:
        self.sock.close()


class _DueQueue:
    """Datagrams ordered by delivery time; recv blocks until one is due."""

    def __init__(self) -> None:
        self._heap: list[tuple[float, int, bytes]] = []
        self._cond = threading.Condition()
        self._counter = itertools.count()

    def push(self, data: bytes, due: float) -> None:
        with self._cond:
            heapq.heappush(self._heap, (due, next(self._counter), data))
            self._cond.notify()

    def pop(self, timeout: float | None) -> bytes | None:
        deadline = None if timeout is None else time.monotonic() + timeout
        with self._cond:
            while True:
                now = time.monotonic()
                if self._heap:
                    due = self._heap[0][0]
                    if due <= now:
                        return heapq.heappop(self._heap)[2]
                    wait = due - now
                    if deadline is not None:
                        if now >= deadline:
                            return None
                        wait = min(wait, deadline - now)
                    self._cond.wait(wait)
                else:
                    if deadline is not None and now >= deadline:
                        return None
                    self._cond.wait(None if deadline is None else deadline - now)


class _ChannelEndpoint:
    def __init__(self, channel: "LossyChannel", side: int) -> None:
        self._channel = channel
        self._side = side
        self.label = "ab"[side]

    def send(self, data: bytes, addr: Any | None = None) -> None:
        self._channel._transmit(self._side, bytes(data))

    def recv(self, timeout: float | None) -> tuple[bytes, Any] | None:
        data = self._channel._queues[self._side].pop(timeout)
        if data is None:
            return None
        return data, "ba"[self._side]

    def close(self) -> None:
        pass


class LossyChannel:
    """In-process datagram channel with per-direction loss and delay.

    ``loss`` and ``delay`` are (a->b, b->a) pairs. Drop decisions come from
    one seeded generator per direction, so they depend only on that
    direction's send sequence and are reproducible under threading.
    """

    def __init__(
        self,
        loss: tuple[float, float] = (0.0, 0.0),
        delay: tuple[float, float] = (0.0, 0.0),
        seed: int = 0,
    ) -> None:
        for value in loss:
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"loss must be in [0, 1], got {value}")
        for value in delay:
            if value < 0.0:
                raise ValueError(f"delay must be >= 0, got {value}")
        self.loss = loss
        self.delay = delay
        # queues[i] holds datagrams awaiting endpoint i's recv
        self._queues = (_DueQueue(), _DueQueue())
        self._rngs = (
            np.random.default_rng([seed, 0]),
            np.random.default_rng([seed, 1]),
        )
        self._locks = (threading.Lock(), threading.Lock())
        self.a = _ChannelEndpoint(self, 0)
        self.b = _ChannelEndpoint(self, 1)
        self.sent = [0, 0]
        self.dropped = [0, 0]

    def _transmit(self, side: int, data: bytes) -> None:
        with self._locks[side]:
            self.sent[side] += 1
            drop = self._rngs[side].random() < self.loss[side]
            if drop:
                self.dropped[side] += 1
                return
        self._queues[1 - side].push(data, time.monotonic() + self.delay[side])


class EchoResponder:
    """Serves one probing client at a time over any PacketConn.

    Echoes probe headers back to their source, tallies burst datagrams
    (sequence 0 restarts the tally), and answers a summary request with five
    copies of the summary datagram. Malformed datagrams are counted and
    ignored.
    """

    def __init__(self, conn: PacketConn) -> None:
        self.conn = conn
        self.malformed = 0
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self._burst_first_ns = 0
        self._burst_last_ns = 0
        self._burst_count = 0
        self._burst_bytes_after_first = 0
        self._burst_last_seq = 2**62  # forces the first burst datagram to reset

    def start(self) -> "EchoResponder":
        self._thread = threading.Thread(target=self.serve, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join()
            self._thread = None

    def serve(self) -> None:
        while not self._stop.is_set():
            item = self.conn.recv(timeout=0.05)
            if item is None:
                continue
            data, addr = item
            try:
                header = unpack_packet(data)
            except ValueError:
                self.malformed += 1
                continue
            self._handle(header, len(data), addr)

    def _handle(self, header: Header, wire_bytes: int, addr: Any) -> None:
        if header.ptype == PacketType.PROBE:
            reply = pack_packet(PacketType.ECHO, header.seq, header.timestamp_ns)
            self.conn.send(reply, addr)
        elif header.ptype == PacketType.BURST:
            now = time.perf_counter_ns()
            # a sequence regression means a new burst began (survives a lost seq 0)
            if header.seq <= self._burst_last_seq:
                self._burst_first_ns = now
                self._burst_last_ns = now
                self._burst_count = 1
                self._burst_bytes_after_first = 0
            else:
                self._burst_count += 1
                self._burst_bytes_after_first += wire_bytes
                self._burst_last_ns = now
            self._burst_last_seq = header.seq
        elif header.ptype == PacketType.SUMMARY_REQUEST:
            payload = SUMMARY_PAYLOAD.pack(
                self._burst_count,
                self._burst_bytes_after_first,
                max(0, self._burst_last_ns - self._burst_first_ns),
            )
            reply = pack_packet(PacketType.SUMMARY, header.seq, header.timestamp_ns, payload)
            for _ in range(5):
                self.conn.send(reply, addr)


@dataclass(frozen=True)
class ProbeSample:
    """Measurements for one packet size.

    Times are seconds; bandwidth is wire bytes per second as observed by the
    responder during the burst (nan when no summary came back or the burst
    was too short to time).
    """

    packet_size: int
    sent: int
    echoed: int
    loss_rate: float
    rtt_mean: float
    rtt_p50: float
    rtt_p95: float
    bandwidth: float


def _collect_echoes(
    conn: PacketConn, rtts_ns: list[int], stop: threading.Event
) -> None:
    while not stop.is_set():
        item = conn.recv(timeout=0.05)
        if item is None:
            continue
        data, _addr = item
        try:
            header = unpack_packet(data)
        except ValueError:
            continue
        if header.ptype == PacketType.ECHO:
            rtts_ns.append(time.perf_counter_ns() - header.timestamp_ns)


def _measure_bandwidth(
    conn: PacketConn, packet_size: int, burst_count: int, summary_retries: int
) -> float:
    payload = bytes(max(0, packet_size - HEADER.size))
    for seq in range(burst_count):
        conn.send(pack_packet(PacketType.BURST, seq, time.perf_counter_ns(), payload))
    for attempt in range(summary_retries):
        conn.send(pack_packet(PacketType.SUMMARY_REQUEST, attempt, time.perf_counter_ns()))
        deadline = time.monotonic() + 0.5
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                break
            item = conn.recv(timeout=remaining)
            if item is None:
                break
            data, _addr = item
            try:
                header = unpack_packet(data)
            except ValueError:
                continue
            if header.ptype != PacketType.SUMMARY:
                continue  # stray echoes from the drain are expected
            count, nbytes, span_ns = SUMMARY_PAYLOAD.unpack(header.payload)
            if count < 2 or span_ns <= 0:
                return math.nan
            return nbytes / (span_ns / 1e9)
    return math.nan


def run_probe(
    conn: PacketConn,
    packet_sizes: Iterable[int] = (256, 1024, 8192),
    count: int = 200,
    interval: float = 0.0,
    drain_timeout: float = 2.0,
    burst_count: int = 100,
    summary_retries: int = 5,
) -> list[ProbeSample]:
    """Probe the link behind ``conn`` once per packet size.

    ``packet_size`` is the full wire size; each probe datagram is padded to
    it. For every size: ``count`` sequenced probes are paced ``interval``
    seconds apart while a receiver thread collects echoes concurrently;
    after the last send, ``drain_timeout`` seconds of grace are given before
    the unechoed fraction becomes the loss rate. A back-to-back burst of
    ``burst_count`` datagrams then measures bandwidth at the responder.
    Sizes with zero echoes get nan timings and a warning (unreachable peer
    or total loss).
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    samples = []
    for size in packet_sizes:
        if size < HEADER.size:
            raise ValueError(f"packet size must be >= {HEADER.size} bytes, got {size}")
        payload = bytes(size - HEADER.size)
        rtts_ns: list[int] = []
        stop = threading.Event()
        collector = threading.Thread(
            target=_collect_echoes, args=(conn, rtts_ns, stop), daemon=True
        )
        collector.start()
        for seq in range(count):
            conn.send(pack_packet(PacketType.PROBE, seq, time.perf_counter_ns(), payload))
            if interval > 0:
                time.sleep(interval)
        time.sleep(drain_timeout)
        stop.set()
        collector.join()

        echoed = len(rtts_ns)
        if echoed == 0:
            log.warning(
                "no echoes for %d-byte probes: peer unreachable or loss rate 1", size
            )
            samples.append(
                ProbeSample(size, count, 0, 1.0, math.nan, math.nan, math.nan, math.nan)
            )
            continue
        rtts = [ns / 1e9 for ns in rtts_ns]
        if len(rtts) >= 2:
            cuts = statistics.quantiles(rtts, n=20)
            p50, p95 = cuts[9], cuts[18]
        else:
            p50 = p95 = rtts[0]
        bandwidth = _measure_bandwidth(conn, size, burst_count, summary_retries)
        samples.append(
            ProbeSample(
                packet_size=size,
                sent=count,
                echoed=echoed,
                loss_rate=1.0 - echoed / count,
                rtt_mean=statistics.fmean(rtts),
                rtt_p50=p50,
                rtt_p95=p95,
                bandwidth=bandwidth,
            )
        )
    return samples


def to_network_params(sample: ProbeSample) -> NetworkParams:
    """Convert one probe sample to model link parameters.

    The echoed fraction measures round-trip delivery; assuming two symmetric
    legs, per-packet loss is 1 - sqrt(echoed/sent). beta is the mean RTT and
    alpha is packet_size over the measured bandwidth. Raises ValueError when
    nothing was echoed or bandwidth could not be measured.
    """
    if sample.echoed == 0:
        raise ValueError("no echoes: loss and delay are unmeasurable")
    if not math.isfinite(sample.bandwidth) or sample.bandwidth <= 0:
        raise ValueError("bandwidth estimate missing; alpha cannot be derived")
    round_trip = sample.echoed / sample.sent
    loss = 1.0 - math.sqrt(round_trip)
    return NetworkParams(
        loss=loss,
        alpha=sample.packet_size / sample.bandwidth,
        beta=sample.rtt_mean,
        packet_size=sample.packet_size,
        bandwidth=sample.bandwidth,
    )


_CSV_FIELDS = (
    "packet_size",
    "sent",
    "echoed",
    "loss_rate",
    "rtt_mean",
    "rtt_p50",
    "rtt_p95",
    "bandwidth",
)


def samples_to_csv(samples: Iterable[ProbeSample]) -> str:
    """One row per packet size, '.' decimal separator, header always present."""
    lines = [",".join(_CSV_FIELDS)]
    for s in samples:
        lines.append(
            ",".join(repr(getattr(s, f)) for f in _CSV_FIELDS)
        )
    return "\n".join(lines) + "\n"


def samples_from_csv(text: str) -> list[ProbeSample]:
    lines = [line for line in text.strip().splitlines() if line.strip()]
    if not lines or lines[0].split(",") != list(_CSV_FIELDS):
        raise ValueError(f"expected header {','.join(_CSV_FIELDS)!r}")
    samples = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != len(_CSV_FIELDS):
            raise ValueError(f"bad row: {line!r}")
        samples.append(
            ProbeSample(
                packet_size=int(parts[0]),
                sent=int(parts[1]),
                echoed=int(parts[2]),
                loss_rate=float(parts[3]),
                rtt_mean=float(parts[4]),
                rtt_p50=float(parts[5]),
                rtt_p95=float(parts[6]),
                bandwidth=float(parts[7]),
            )
        )
    return samples
