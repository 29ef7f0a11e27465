"""Cost models for four parallel kernels and two collectives on lossy links.

Each kernel gets a serial work time, a parallel compute time, and a
communication time built from the same ingredients as the core model: packet
transmit time ``alpha``, round-trip delay ``beta``, ``copies`` redundant
datagrams per packet, and the lost-only retransmission expectation over the
kernel's per-phase packet count c(P). Message sizes larger than one packet
multiply the transmit term by ``gamma = ceil(message/packet)``.

Kernels (P nodes, sustained ``flops_rate`` operations per second):

* matrix multiply, block-decomposed on a sqrt(P) x sqrt(P) grid
* bitonic sort, log2(P)(log2(P)+1)/2 exchange steps
* 2-D FFT via transpose (both 1-D passes local, one full transpose)
* Laplace solver, Jacobi relaxation on a strip-decomposed grid

Collectives (cost only): binomial-tree broadcast and ring all-gather. The
broadcast formula's transmit term ``1 - 2**(ceil(log2 P)-1)`` goes negative
for P > 2; the cost is reported as modelled with ``transmit_term_negative``
set rather than silently corrected.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any

from .model import NetworkParams, expected_rounds_lost_only, single_packet_success

__all__ = [
    "Algorithm",
    "AlgoInstance",
    "AlgoReport",
    "CollectiveCost",
    "matmul_speedup",
    "bitonic_speedup",
    "fft2d_speedup",
    "laplace_speedup",
    "broadcast_cost",
    "allgather_cost",
    "ReferenceRow",
    "reference_rows",
    "evaluate_reference_row",
]


class Algorithm(enum.Enum):
    MATMUL = "matmul"
    BITONIC = "bitonic-sort"
    FFT2D = "fft-2d"
    LAPLACE = "laplace-jacobi"
    BROADCAST = "broadcast"
    ALLGATHER = "all-gather"


@dataclass(frozen=True)
class AlgoInstance:
    """One kernel instance.

    size           N: matrix side, keys, or samples; grid side m for laplace
    nodes          P
    item_bytes     bytes per element
    packet_bytes   network MTU used for the transfer
    flops_rate     sustained operations per second per node
    message_bytes  bytes per logical message; None picks the kernel's natural
                   size (submatrix, key block, transpose block, or halo strip)
    stencil_diagonals  laplace relaxation stencil depth
    """

    algorithm: Algorithm
    size: int
    nodes: int
    item_bytes: int
    packet_bytes: int
    flops_rate: float
    message_bytes: int | None = None
    stencil_diagonals: int = 5

    def __post_init__(self) -> None:
        if self.size < 1 or self.nodes < 1:
            raise ValueError("size and nodes must be >= 1")
        if self.item_bytes < 1 or self.packet_bytes < 1:
            raise ValueError("item_bytes and packet_bytes must be >= 1")
        if self.flops_rate <= 0:
            raise ValueError("flops_rate must be positive")
        if self.message_bytes is not None and self.message_bytes < 1:
            raise ValueError("message_bytes must be >= 1 when given")

    def natural_message_bytes(self) -> float:
        """Kernel-defined bytes per logical message."""
        n, p, b = self.size, self.nodes, self.item_bytes
        alg = self.algorithm
        if alg is Algorithm.MATMUL:
            return (n * n / p) * b
        if alg is Algorithm.BITONIC:
            return (n / p) * b
        if alg is Algorithm.FFT2D:
            return n * b / (p * p)
        if alg is Algorithm.LAPLACE:
            return 3 * b
        return float(self.packet_bytes)

    @property
    def gamma(self) -> int:
        """Packets per logical message."""
        message = self.message_bytes if self.message_bytes is not None else self.natural_message_bytes()
        return max(1, math.ceil(message / self.packet_bytes))


@dataclass(frozen=True)
class AlgoReport:
    """Kernel timing breakdown.

    serial_seconds / parallel_compute_seconds / comm_seconds / total_seconds,
    the speedup serial/total and efficiency speedup/P, plus the per-phase
    packet count and the lost-only expected transmission rounds used for the
    communication term.
    """

    serial_seconds: float
    parallel_compute_seconds: float
    comm_seconds: float
    total_seconds: float
    speedup: float
    efficiency: float
    packets_per_phase: float
    expected_rounds: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "serial_seconds": self.serial_seconds,
            "parallel_compute_seconds": self.parallel_compute_seconds,
            "comm_seconds": self.comm_seconds,
            "total_seconds": self.total_seconds,
            "speedup": self.speedup,
            "efficiency": self.efficiency,
            "packets_per_phase": self.packets_per_phase,
            "expected_rounds": self.expected_rounds,
        }


@dataclass(frozen=True)
class CollectiveCost:
    """Collective completion time and its retransmission factor."""

    seconds: float
    expected_rounds: float
    transmit_term_negative: bool = False


def _rho(network: NetworkParams, copies: int, packets: float) -> float:
    if packets <= 0:
        return 1.0
    return expected_rounds_lost_only(single_packet_success(network.loss, copies), packets)


def _report(ws: float, wp: float, comm: float, nodes: int, c: float, rho: float) -> AlgoReport:
    total = wp + comm
    speedup = ws / total if total > 0 else math.inf
    return AlgoReport(
        serial_seconds=ws,
        parallel_compute_seconds=wp,
        comm_seconds=comm,
        total_seconds=total,
        speedup=speedup,
        efficiency=speedup / nodes,
        packets_per_phase=c,
        expected_rounds=rho,
    )


def matmul_speedup(
    instance: AlgoInstance,
    network: NetworkParams,
    copies: int,
    exact_grid: bool = True,
) -> AlgoReport:
    """Block matrix multiply on a sqrt(P) x sqrt(P) grid.

    serial   (2 N**3 - N**2) / rate
    parallel (2 N**3 - N**2) / (P rate)
    packets  c(P) = 2 (P**1.5 - P): each node receives sqrt(P)-1 blocks of
             A and of B over sqrt(P)-1 phases
    comm     2 gamma rho (2 (sqrt(P) - 1) copies alpha + beta)

    ``exact_grid=False`` skips the square-grid divisibility checks; useful
    for sensitivity sweeps over node counts that do not form a square grid.
    P = 1 is the trivial single-node case (no communication, speedup 1).
    """
    n, p = instance.size, instance.nodes
    if p == 1:
        ws = (2.0 * n**3 - n**2) / instance.flops_rate
        return _report(ws, ws, 0.0, 1, 0.0, 1.0)
    root = math.isqrt(p)
    if exact_grid:
        if root * root != p:
            raise ValueError(f"matmul grid needs a square node count, got {p}")
        if n % root != 0:
            raise ValueError(f"matrix side {n} not divisible by grid side {root}")
    sqrt_p = math.sqrt(p)
    ws = (2.0 * n**3 - float(n) ** 2) / instance.flops_rate
    wp = ws / p
    c = 2.0 * (p**1.5 - p)
    rho = _rho(network, copies, c)
    comm = 2.0 * instance.gamma * rho * (2.0 * (sqrt_p - 1.0) * copies * network.alpha + network.beta)
    return _report(ws, wp, comm, p, c, rho)


def bitonic_speedup(instance: AlgoInstance, network: NetworkParams, copies: int) -> AlgoReport:
    """Bitonic sort of N keys on P nodes, log2(P)(log2(P)+1)/2 exchange steps.

    serial   N log2 N / rate
    parallel [(N/P) log2(N/P) + steps (2 N/P - 1)] / rate
    packets  c(P) = P per step (every node ships its block)
    comm     gamma log2(P)(log2(P)+1)(copies alpha + beta) rho
    """
    n, p = instance.size, instance.nodes
    if p == 1:
        ws = n * math.log2(n) / instance.flops_rate if n > 1 else 1.0 / instance.flops_rate
        return _report(ws, ws, 0.0, 1, 0.0, 1.0)
    if p & (p - 1) != 0:
        raise ValueError(f"bitonic sort needs a power-of-two node count, got {p}")
    if n % p != 0:
        raise ValueError(f"key count {n} not divisible by node count {p}")
    lg = math.log2(p)
    steps = lg * (lg + 1.0) / 2.0
    ws = n * math.log2(n) / instance.flops_rate
    wp = ((n / p) * math.log2(n / p) + steps * (2.0 * n / p - 1.0)) / instance.flops_rate
    rho = _rho(network, copies, float(p))
    comm = instance.gamma * lg * (lg + 1.0) * (copies * network.alpha + network.beta) * rho
    return _report(ws, wp, comm, p, float(p), rho)


def fft2d_speedup(
    instance: AlgoInstance,
    network: NetworkParams,
    copies: int,
    log_base: float = 2.0,
) -> AlgoReport:
    """2-D FFT of N samples via transpose: both 1-D passes local, one transpose.

    serial   5 N log2 N / rate
    parallel 10 (N/P) log2(N/P) / rate
    packets  c(P) = P (P - 1): every node sends one block to every other
    comm     4 gamma rho (copies alpha (P - 1) + beta)

    Work terms use base-2 logarithms; ``log_base`` exists for sensitivity
    checks against other conventions. Note the decomposition performs both
    FFT passes over the local rows/columns, so at P = 1 it does twice the
    serial work and the modelled speedup is 0.5 (communication is zero).
    """
    n, p = instance.size, instance.nodes
    log = lambda x: math.log(x, log_base)  # noqa: E731
    ws = 5.0 * n * log(n) / instance.flops_rate
    if p == 1:
        wp = 10.0 * n * log(n) / instance.flops_rate
        return _report(ws, wp, 0.0, 1, 0.0, 1.0)
    if n % p != 0:
        raise ValueError(f"sample count {n} not divisible by node count {p}")
    wp = 10.0 * (n / p) * log(n / p) / instance.flops_rate
    c = float(p) * (p - 1.0)
    rho = _rho(network, copies, c)
    comm = 4.0 * instance.gamma * rho * (copies * network.alpha * (p - 1.0) + network.beta)
    return _report(ws, wp, comm, p, c, rho)


def laplace_speedup(instance: AlgoInstance, network: NetworkParams, copies: int) -> AlgoReport:
    """Jacobi relaxation for the Laplace equation on an (m-1)**2 interior grid.

    serial   2 d log2(P) (m-1)**2 / rate   (d stencil diagonals per sweep)
    parallel serial / P
    packets  c(P) = 2 (P - 1) halo packets of 3*item_bytes each
    comm     2 log2(P) rho (copies alpha 2 (P-1)/P + beta)

    The work model carries a log2(P) sweep factor, so P = 1 is degenerate
    (zero modelled work); it returns the trivial speedup-1 report.
    """
    m, p = instance.size, instance.nodes
    d = instance.stencil_diagonals
    if p == 1:
        t = 2.0 * d * (m - 1.0) ** 2 / instance.flops_rate
        return _report(t, t, 0.0, 1, 0.0, 1.0)
    interior = (m - 1.0) ** 2
    if interior / p <= d:
        raise ValueError(
            f"grid too small: (m-1)^2/P = {interior / p:.3g} must exceed the "
            f"stencil depth {d}"
        )
    lg = math.log2(p)
    ws = 2.0 * d * lg * interior / instance.flops_rate
    wp = ws / p
    c = 2.0 * (p - 1.0)
    rho = _rho(network, copies, c)
    comm = 2.0 * lg * rho * (network.alpha * copies * 2.0 * (p - 1.0) / p + network.beta)
    return _report(ws, wp, comm, p, c, rho)


def broadcast_cost(nodes: int, network: NetworkParams, copies: int) -> CollectiveCost:
    """Binomial-tree broadcast of one packet to P nodes.

    cost = [copies alpha / P (1 - 2**(ceil(log2 P) - 1))
            + beta ceil(log2 P)] * rho,  c(P) = ceil(log2 P)

    The transmit factor 1 - 2**(ceil(log2 P)-1) is negative for P > 2; the
    cost is reported as modelled with ``transmit_term_negative=True`` in that
    case instead of being silently corrected. P = 1 needs no communication.
    """
    if nodes < 1:
        raise ValueError(f"nodes must be >= 1, got {nodes}")
    if nodes == 1:
        return CollectiveCost(seconds=0.0, expected_rounds=1.0)
    steps = math.ceil(math.log2(nodes))
    rho = _rho(network, copies, float(steps))
    transmit = copies * network.alpha / nodes * (1.0 - 2.0 ** (steps - 1))
    seconds = (transmit + network.beta * steps) * rho
    return CollectiveCost(
        seconds=seconds,
        expected_rounds=rho,
        transmit_term_negative=transmit < 0.0,
    )


def allgather_cost(nodes: int, network: NetworkParams, copies: int) -> CollectiveCost:
    """Ring all-gather of one packet per node: (copies alpha + beta)(P-1) rho."""
    if nodes < 1:
        raise ValueError(f"nodes must be >= 1, got {nodes}")
    if nodes == 1:
        return CollectiveCost(seconds=0.0, expected_rounds=1.0)
    rho = _rho(network, copies, float(nodes))
    seconds = (copies * network.alpha + network.beta) * (nodes - 1.0) * rho
    return CollectiveCost(seconds=seconds, expected_rounds=rho)


@dataclass(frozen=True)
class PublishedValues:
    """Reference outputs for one catalog row, as published."""

    expected_rounds: float
    serial_seconds: float
    comm_seconds: float
    total_seconds: float
    speedup: float
    efficiency: float


@dataclass(frozen=True)
class ReferenceRow:
    """One kernel configuration with its published reference outputs."""

    label: str
    instance: AlgoInstance
    network: NetworkParams
    copies: int
    published: PublishedValues


def reference_rows() -> tuple[ReferenceRow, ...]:
    """The four reference configurations used as regression anchors.

    The published serial time for the matmul row (140765.34 s) disagrees in
    one digit with its own inputs ((2 N^3 - N^2)/rate = 140735.34 s); work
    times are always recomputed from N and the rate, so the reproduction
    shows a 2e-4 relative error on that column. The FFT row's listed
    bandwidth (17.07 MB/s) is likewise slightly inconsistent with its own
    printed outputs (which match 17.5 MB/s); the row keeps the listed value,
    leaving a ~2.3% speedup residual. Both are inside the 5% regression gate.
    """
    matmul = ReferenceRow(
        label="matmul",
        instance=AlgoInstance(
            algorithm=Algorithm.MATMUL,
            size=2**15,
            nodes=2**16,
            item_bytes=4,
            packet_bytes=2**16,
            flops_rate=0.5e9,
        ),
        network=NetworkParams.from_link(
            packet_size=2**16, bandwidth=17.5e6, loss=0.045, beta=0.069
        ),
        copies=7,
        published=PublishedValues(
            expected_rounds=1.025,
            serial_seconds=140765.34,
            comm_seconds=27.54,
            total_seconds=29.69,
            speedup=4740.89,
            efficiency=0.072,
        ),
    )
    bitonic = ReferenceRow(
        label="bitonic-sort",
        instance=AlgoInstance(
            algorithm=Algorithm.BITONIC,
            size=2**31,
            nodes=2**17,
            item_bytes=4,
            packet_bytes=2**16,
            flops_rate=0.5e9,
        ),
        network=NetworkParams.from_link(
            packet_size=2**16, bandwidth=17.5e6, loss=0.045, beta=0.069
        ),
        copies=6,
        published=PublishedValues(
            expected_rounds=1.002,
            serial_seconds=133.14,
            comm_seconds=28.18,
            total_seconds=28.194,
            speedup=4.72,
            efficiency=0.000036,
        ),
    )
    fft = ReferenceRow(
        label="fft-2d",
        instance=AlgoInstance(
            algorithm=Algorithm.FFT2D,
            size=2**34,
            nodes=2**15,
            item_bytes=16,
            packet_bytes=2**8,
            flops_rate=0.5e9,
        ),
        network=NetworkParams.from_link(
            packet_size=2**8, bandwidth=17.07e6, loss=0.0005, beta=0.05
        ),
        copies=3,
        published=PublishedValues(
            expected_rounds=1.24,
            serial_seconds=5841.15,
            comm_seconds=7.35,
            total_seconds=7.55,
            speedup=773.4,
            efficiency=0.02,
        ),
    )
    laplace = ReferenceRow(
        label="laplace-jacobi",
        instance=AlgoInstance(
            algorithm=Algorithm.LAPLACE,
            size=2**18,
            nodes=2**17,
            item_bytes=8,
            packet_bytes=24,
            flops_rate=0.5e9,
        ),
        network=NetworkParams.from_link(
            packet_size=24, bandwidth=24e6, loss=0.0005, beta=0.05
        ),
        copies=5,
        published=PublishedValues(
            expected_rounds=1.0,
            serial_seconds=23364.44,
            comm_seconds=1.7,
            total_seconds=1.8783,
            speedup=12439.43,
            efficiency=0.095,
        ),
    )
    return (matmul, bitonic, fft, laplace)


_SPEEDUP_FNS = {
    Algorithm.MATMUL: matmul_speedup,
    Algorithm.BITONIC: bitonic_speedup,
    Algorithm.FFT2D: fft2d_speedup,
    Algorithm.LAPLACE: laplace_speedup,
}


def evaluate_reference_row(row: ReferenceRow) -> tuple[AlgoReport, dict[str, float]]:
    """Recompute a catalog row; returns the report plus per-column relative errors."""
    fn = _SPEEDUP_FNS[row.instance.algorithm]
    report = fn(row.instance, row.network, row.copies)
    errors = {}
    for name in (
        "expected_rounds",
        "serial_seconds",
        "comm_seconds",
        "total_seconds",
        "speedup",
        "efficiency",
    ):
        published = getattr(row.published, name)
        computed = getattr(report, name)
        errors[name] = abs(computed - published) / abs(published)
    return report, errors
