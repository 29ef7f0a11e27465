"""Expected-speedup model for bulk-synchronous parallel programs on lossy links.

A program runs as a sequence of supersteps. Each superstep performs ``w/n``
seconds of computation on each of ``n`` nodes and then exchanges ``c(n)``
packets over a network that drops any packet independently with probability
``loss``. Every packet is sent as ``k`` redundant copies and must be
acknowledged, the acknowledgement also being sent as ``k`` copies; a packet
exchange succeeds only if at least one data copy and at least one ack copy
arrive. Senders wait a full timeout of twice the nominal exchange time before
retransmitting, so each transmission round costs ``2*tau`` where

    tau = k * (c(n) / n) * alpha + beta

with ``alpha`` the time to put one packet on the wire and ``beta`` the
round-trip delay. Two retransmission policies are modelled:

* ``ALL_ON_ANY_LOSS``: any loss restarts the whole exchange. The number of
  rounds is geometric with success probability ``(1 - loss**k)**(2 c(n))``.
* ``LOST_ONLY``: only unfinished packets are retried. The number of rounds
  is the maximum of ``c(n)`` i.i.d. geometric variables with per-round
  success ``(1 - loss**k)**2``, evaluated as a survival-form series.

The expected speedup over a single node follows from charging each superstep
its compute slice plus ``2 * rho * tau``, where ``rho`` is the expected
number of transmission rounds:

    speedup = G * n / (G + rho)        (lost-only)
    speedup = n * G * p_s / (1 + G * p_s)   (all-on-any-loss)

with granularity ``G = w / (2 n tau)`` and round success ``p_s``. A
communication-free "conceptual" variant (``speedup = n * p_s``) and its
exponential approximation are included because their optima have closed
forms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "PatternKind",
    "CommPattern",
    "NetworkParams",
    "Workload",
    "RetransmitPolicy",
    "Scenario",
    "DominatingTerm",
    "SpeedupReport",
    "NodeOptimum",
    "CopyOptimum",
    "single_packet_success",
    "packet_outcome_probabilities",
    "round_success_probability",
    "expected_rounds_all",
    "expected_rounds_lost_only",
    "exchange_time",
    "expected_speedup",
    "conceptual_speedup",
    "conceptual_speedup_approx",
    "optimal_nodes_conceptual",
    "optimal_copies",
    "dominating_term",
    "delay_limited_speedup",
]

# Tail budget for truncating the survival-form series: iteration stops once
# c * q**i < _SERIES_TAIL_TOL * packet_success, which bounds the discarded tail
# sum_{j>=i} [1 - (1-q^j)^c] <= sum_{j>=i} c q^j = c q^i / (1 - q)
# by _SERIES_TAIL_TOL in absolute terms.
_SERIES_TAIL_TOL = 1e-13
_SERIES_CHUNK = 65536
_SERIES_MAX_TERMS = 200_000_000


class PatternKind(enum.Enum):
    """Growth class of the per-superstep packet count c(n)."""

    CONSTANT = "1"
    LOG2 = "log2n"
    LOG2_SQUARED = "log2^2n"
    LINEAR = "n"
    N_LOG2 = "nlog2n"
    SQUARED = "n^2"
    CUSTOM = "custom"


_PARSE_ALIASES = {
    "1": PatternKind.CONSTANT,
    "const": PatternKind.CONSTANT,
    "constant": PatternKind.CONSTANT,
    "log2n": PatternKind.LOG2,
    "logn": PatternKind.LOG2,
    "log2": PatternKind.LOG2,
    "log2^2n": PatternKind.LOG2_SQUARED,
    "log2sq": PatternKind.LOG2_SQUARED,
    "log2^2": PatternKind.LOG2_SQUARED,
    "n": PatternKind.LINEAR,
    "linear": PatternKind.LINEAR,
    "nlog2n": PatternKind.N_LOG2,
    "nlogn": PatternKind.N_LOG2,
    "n^2": PatternKind.SQUARED,
    "n2": PatternKind.SQUARED,
    "squared": PatternKind.SQUARED,
}


@dataclass(frozen=True)
class CommPattern:
    """Packets exchanged per superstep as a function of the node count.

    Use the factory classmethods; ``custom`` wraps an arbitrary callable,
    which should accept a float and return a nonnegative float.
    """

    kind: PatternKind
    fn: Callable[[float], float] | None = None
    label: str | None = None

    @classmethod
    def constant(cls) -> "CommPattern":
        return cls(PatternKind.CONSTANT)

    @classmethod
    def log2(cls) -> "CommPattern":
        return cls(PatternKind.LOG2)

    @classmethod
    def log2_squared(cls) -> "CommPattern":
        return cls(PatternKind.LOG2_SQUARED)

    @classmethod
    def linear(cls) -> "CommPattern":
        return cls(PatternKind.LINEAR)

    @classmethod
    def n_log2(cls) -> "CommPattern":
        return cls(PatternKind.N_LOG2)

    @classmethod
    def squared(cls) -> "CommPattern":
        return cls(PatternKind.SQUARED)

    @classmethod
    def custom(cls, fn: Callable[[float], float], label: str = "custom") -> "CommPattern":
        return cls(PatternKind.CUSTOM, fn=fn, label=label)

    @classmethod
    def parse(cls, text: str) -> "CommPattern":
        """Build a pattern from a config/CLI token such as ``n`` or ``log2^2n``."""
        key = text.strip().lower()
        if key not in _PARSE_ALIASES:
            raise ValueError(
                f"unknown communication pattern {text!r}; "
                f"expected one of {sorted(set(_PARSE_ALIASES))}"
            )
        return cls(_PARSE_ALIASES[key])

    def packets(self, nodes: float) -> float:
        """Evaluate c(nodes). nodes must be >= 1."""
        if nodes < 1:
            raise ValueError(f"node count must be >= 1, got {nodes}")
        n = float(nodes)
        kind = self.kind
        if kind is PatternKind.CONSTANT:
            return 1.0
        if kind is PatternKind.LOG2:
            return math.log2(n)
        if kind is PatternKind.LOG2_SQUARED:
            return math.log2(n) ** 2
        if kind is PatternKind.LINEAR:
            return n
        if kind is PatternKind.N_LOG2:
            return n * math.log2(n)
        if kind is PatternKind.SQUARED:
            return n * n
        value = float(self.fn(n))  # type: ignore[misc]
        if value < 0:
            raise ValueError(f"custom pattern returned negative packet count {value}")
        return value

    def __str__(self) -> str:
        if self.kind is PatternKind.CUSTOM:
            return self.label or "custom"
        return self.kind.value


@dataclass(frozen=True)
class NetworkParams:
    """Link parameters.

    loss         per-packet drop probability, each copy independent
    alpha        seconds to transmit one packet (packet size over bandwidth)
    beta         round-trip delay in seconds
    packet_size  bytes, optional record of where alpha came from
    bandwidth    bytes per second, optional record of where alpha came from
    """

    loss: float
    alpha: float
    beta: float
    packet_size: int | None = None
    bandwidth: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.loss <= 1.0:
            raise ValueError(f"loss must be in [0, 1], got {self.loss}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.packet_size is not None and self.packet_size <= 0:
            raise ValueError(f"packet_size must be positive, got {self.packet_size}")
        if self.bandwidth is not None and self.bandwidth <= 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")
        if self.packet_size is not None and self.bandwidth is not None:
            implied = self.packet_size / self.bandwidth
            if not math.isclose(self.alpha, implied, rel_tol=1e-9, abs_tol=0.0):
                raise ValueError(
                    f"alpha={self.alpha} inconsistent with "
                    f"packet_size/bandwidth={implied}"
                )

    @classmethod
    def from_link(
        cls, packet_size: int, bandwidth: float, loss: float, beta: float
    ) -> "NetworkParams":
        """Derive alpha from the packet size and link bandwidth."""
        if packet_size <= 0 or bandwidth <= 0:
            raise ValueError("packet_size and bandwidth must be positive")
        return cls(
            loss=loss,
            alpha=packet_size / bandwidth,
            beta=beta,
            packet_size=packet_size,
            bandwidth=bandwidth,
        )


@dataclass(frozen=True)
class Workload:
    """seconds of single-node compute per superstep, and the superstep count."""

    seconds: float
    rounds: int = 1

    def __post_init__(self) -> None:
        if self.seconds <= 0:
            raise ValueError(f"workload seconds must be positive, got {self.seconds}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")


class RetransmitPolicy(enum.Enum):
    ALL_ON_ANY_LOSS = "all"
    LOST_ONLY = "lost-only"


class DominatingTerm(enum.Enum):
    """Which overhead term caps scaling as n grows."""

    TRANSMIT = "transmit"
    DELAY = "delay"
    BOTH = "both"


@dataclass(frozen=True)
class Scenario:
    """One fully specified model evaluation point."""

    network: NetworkParams
    comm: CommPattern
    work: Workload
    copies: int
    policy: RetransmitPolicy
    nodes: int

    def __post_init__(self) -> None:
        if self.copies < 1:
            raise ValueError(f"copies must be >= 1, got {self.copies}")
        if self.nodes < 1:
            raise ValueError(f"nodes must be >= 1, got {self.nodes}")

    def with_(self, **changes: Any) -> "Scenario":
        """Copy with replacements; convenience for sweeps."""
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class SpeedupReport:
    """Model outputs for one scenario.

    exchange_time    tau: nominal seconds for one exchange attempt
    granularity      per-node compute over the per-round budget, w / (2 n tau)
    expected_rounds  mean transmission rounds per superstep (>= 1)
    round_success    probability the whole exchange lands in one round
    speedup          expected speedup over one lossless node
    efficiency       speedup / nodes
    dominating_term  overhead class that caps scaling for this pattern
    no_progress      True when loss = 1 makes any exchange impossible
    """

    exchange_time: float
    granularity: float
    expected_rounds: float
    round_success: float
    speedup: float
    efficiency: float
    dominating_term: DominatingTerm
    no_progress: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "exchange_time": self.exchange_time,
            "granularity": self.granularity,
            "expected_rounds": self.expected_rounds,
            "round_success": self.round_success,
            "speedup": self.speedup,
            "efficiency": self.efficiency,
            "dominating_term": self.dominating_term.value,
            "no_progress": self.no_progress,
        }


def single_packet_success(loss: float, copies: int = 1) -> float:
    """Probability one logical packet completes in one round.

    The packet is delivered as ``copies`` redundant datagrams and must be
    acknowledged, the ack also sent as ``copies`` datagrams; both directions
    need at least one survivor: (1 - loss**copies)**2.
    """
    if not 0.0 <= loss <= 1.0:
        raise ValueError(f"loss must be in [0, 1], got {loss}")
    if copies < 1:
        raise ValueError(f"copies must be >= 1, got {copies}")
    return (1.0 - loss**copies) ** 2


def packet_outcome_probabilities(loss: float) -> tuple[float, float, float]:
    """Single-copy outcome split: (success, data lost, data ok but ack lost)."""
    if not 0.0 <= loss <= 1.0:
        raise ValueError(f"loss must be in [0, 1], got {loss}")
    return ((1.0 - loss) ** 2, loss, (1.0 - loss) * loss)


def round_success_probability(loss: float, copies: int, packets: float) -> float:
    """Probability that all ``packets`` exchanges finish in a single round.

    Evaluated in log space as exp(2 * packets * log1p(-loss**copies)) so that
    large packet counts do not underflow prematurely.
    """
    if not 0.0 <= loss <= 1.0:
        raise ValueError(f"loss must be in [0, 1], got {loss}")
    if copies < 1:
        raise ValueError(f"copies must be >= 1, got {copies}")
    if packets < 0:
        raise ValueError(f"packet count must be >= 0, got {packets}")
    if packets == 0:
        return 1.0
    if loss >= 1.0:
        return 0.0
    return math.exp(2.0 * packets * math.log1p(-(loss**copies)))


def expected_rounds_all(round_success: float) -> float:
    """Expected rounds when any loss restarts the whole exchange: 1 / p_s."""
    if round_success <= 0.0:
        raise ValueError("round success probability is 0; the expectation diverges")
    if round_success > 1.0:
        raise ValueError(f"round success must be in (0, 1], got {round_success}")
    return 1.0 / round_success


def expected_rounds_lost_only(packet_success: float, packets: float) -> float:
    """Expected rounds when only unfinished packets are retried.

    This is the mean of the maximum of ``packets`` i.i.d. geometric variables
    with success ``packet_success``, evaluated as the survival-form series

        sum_{i>=0} [1 - (1 - q**i)**c],   q = 1 - packet_success,

    with each term computed as -expm1(c * log1p(-q**i)). The sum is truncated
    once c * q**i < 1e-13 * packet_success; the discarded tail is bounded by
    c * q**i / (1 - q) <= 1e-13 (see the module constant). Noninteger packet
    counts are allowed. packets = 0 returns 1.0: a superstep that sends
    nothing still completes in its one round.
    """
    if not 0.0 <= packet_success <= 1.0:
        raise ValueError(f"packet success must be in [0, 1], got {packet_success}")
    if packets < 0:
        raise ValueError(f"packet count must be >= 0, got {packets}")
    if packets == 0:
        return 1.0
    if packet_success == 0.0:
        raise ValueError("packet success probability is 0; the expectation diverges")
    if packet_success == 1.0:
        return 1.0

    c = float(packets)
    log_q = math.log1p(-packet_success)  # log of the per-round failure prob
    # smallest i with c * q**i < tol * packet_success
    i_max = int(math.ceil((math.log(_SERIES_TAIL_TOL * packet_success) - math.log(c)) / log_q))
    if i_max > _SERIES_MAX_TERMS:
        raise ValueError(
            f"series needs ~{i_max:.2e} terms (packet success {packet_success}); "
            "the expectation is astronomically large"
        )
    total = 1.0  # i = 0 term is exactly 1
    partials: list[float] = []
    for start in range(1, i_max + 1, _SERIES_CHUNK):
        stop = min(start + _SERIES_CHUNK, i_max + 1)
        i = np.arange(start, stop, dtype=np.float64)
        # 1 - (1 - q**i)**c, all in log space
        terms = -np.expm1(c * np.log1p(-np.exp(i * log_q)))
        partials.append(float(np.sum(terms)))
    return total + math.fsum(partials)


def exchange_time(comm: CommPattern, nodes: int, copies: int, network: NetworkParams) -> float:
    """Nominal seconds for one exchange attempt: copies*(c(n)/n)*alpha + beta.

    Per node, c(n)/n packets are injected, each as ``copies`` datagrams; the
    attempt completes after the round-trip delay.
    """
    if copies < 1:
        raise ValueError(f"copies must be >= 1, got {copies}")
    c = comm.packets(nodes)
    return copies * (c / nodes) * network.alpha + network.beta


def dominating_term(comm: CommPattern) -> DominatingTerm:
    """Which overhead bounds scaling: transmit work grows with c(n)/1, delay with n.

    The transmit term scales like c(n) and the delay term like n, so patterns
    growing faster than n are transmit-bound, slower are delay-bound, and the
    linear pattern keeps both in lockstep. Custom patterns are classified by
    the measured growth of c(n)/n between n = 2**10 and n = 2**20 (threshold
    1.5x either way).
    """
    kind = comm.kind
    if kind in (PatternKind.SQUARED, PatternKind.N_LOG2):
        return DominatingTerm.TRANSMIT
    if kind is PatternKind.LINEAR:
        return DominatingTerm.BOTH
    if kind in (PatternKind.LOG2_SQUARED, PatternKind.LOG2, PatternKind.CONSTANT):
        return DominatingTerm.DELAY
    lo = comm.packets(2**10) / 2**10
    hi = comm.packets(2**20) / 2**20
    if lo == 0.0 and hi == 0.0:
        return DominatingTerm.DELAY
    if lo == 0.0:
        return DominatingTerm.TRANSMIT
    ratio = hi / lo
    if ratio >= 1.5:
        return DominatingTerm.TRANSMIT
    if ratio <= 1.0 / 1.5:
        return DominatingTerm.DELAY
    return DominatingTerm.BOTH


def _no_progress_report(scenario: Scenario, tau: float, granularity: float) -> SpeedupReport:
    return SpeedupReport(
        exchange_time=tau,
        granularity=granularity,
        expected_rounds=math.inf,
        round_success=0.0,
        speedup=0.0,
        efficiency=0.0,
        dominating_term=dominating_term(scenario.comm),
        no_progress=True,
    )


def expected_speedup(scenario: Scenario) -> SpeedupReport:
    """Expected speedup of the full model for one scenario.

    Lost-only:      speedup = G * n / (G + rho)
    All-on-any:     speedup = n * G * p_s / (1 + G * p_s)

    where G = w / (2 n tau) and rho is the policy's expected round count.
    loss = 1 yields a flagged zero-speedup report rather than an exception.
    A zero exchange time (alpha = beta = 0) yields infinite granularity and
    the lossless bound speedup = n.
    """
    net = scenario.network
    n = scenario.nodes
    w = scenario.work.seconds
    c = scenario.comm.packets(n)
    tau = exchange_time(scenario.comm, n, scenario.copies, net)
    granularity = math.inf if tau == 0.0 else w / (2.0 * n * tau)

    if net.loss >= 1.0:
        return _no_progress_report(scenario, tau, granularity)

    p_s = round_success_probability(net.loss, scenario.copies, c)
    if scenario.policy is RetransmitPolicy.ALL_ON_ANY_LOSS:
        rho = expected_rounds_all(p_s) if p_s > 0.0 else math.inf
        if math.isinf(granularity):
            speedup = float(n) if p_s > 0.0 else 0.0
        elif p_s == 0.0:
            return _no_progress_report(scenario, tau, granularity)
        else:
            g_ps = granularity * p_s
            speedup = n * g_ps / (1.0 + g_ps)
    else:
        s1 = single_packet_success(net.loss, scenario.copies)
        rho = expected_rounds_lost_only(s1, c)
        if math.isinf(granularity):
            speedup = float(n)
        else:
            speedup = granularity * n / (granularity + rho)

    return SpeedupReport(
        exchange_time=tau,
        granularity=granularity,
        expected_rounds=rho,
        round_success=p_s,
        speedup=speedup,
        efficiency=speedup / n,
        dominating_term=dominating_term(scenario.comm),
    )


def conceptual_speedup(scenario: Scenario) -> SpeedupReport:
    """Communication-free model: speedup = n * p_s (work repeats on any loss).

    Only defined for the all-on-any-loss policy; the exchange itself is free
    (exchange_time 0, granularity infinite) but a failed round repeats the
    superstep's work. loss = 1 yields the flagged zero report.
    """
    if scenario.policy is not RetransmitPolicy.ALL_ON_ANY_LOSS:
        raise ValueError("the conceptual model is defined for the all-on-any-loss policy")
    n = scenario.nodes
    c = scenario.comm.packets(n)
    p_s = round_success_probability(scenario.network.loss, scenario.copies, c)
    if p_s == 0.0:
        return _no_progress_report(scenario, tau=0.0, granularity=math.inf)
    return SpeedupReport(
        exchange_time=0.0,
        granularity=math.inf,
        expected_rounds=1.0 / p_s,
        round_success=p_s,
        speedup=n * p_s,
        efficiency=p_s,
        dominating_term=dominating_term(scenario.comm),
    )


def conceptual_speedup_approx(scenario: Scenario) -> float:
    """Exponential approximation of the conceptual model: n * exp(-2 p**k c(n))."""
    if scenario.policy is not RetransmitPolicy.ALL_ON_ANY_LOSS:
        raise ValueError("the conceptual model is defined for the all-on-any-loss policy")
    n = scenario.nodes
    c = scenario.comm.packets(n)
    return n * math.exp(-2.0 * scenario.network.loss**scenario.copies * c)


@dataclass(frozen=True)
class NodeOptimum:
    """Node count maximizing the approximate conceptual speedup.

    monotonic    True when the speedup keeps growing with n (no finite optimum)
    nodes        best integer node count (None when monotonic)
    nodes_real   stationary point of the smooth objective (None when monotonic)
    """

    pattern: PatternKind
    monotonic: bool
    nodes: int | None
    nodes_real: float | None


def _approx_speedup_value(loss_pow: float, kind: PatternKind, n: float) -> float:
    """log of n*exp(-2 p^k c(n)) would overflow for huge n; evaluate in logs."""
    if n < 1:
        return -math.inf
    if kind is PatternKind.LOG2_SQUARED:
        c = math.log2(n) ** 2
    elif kind is PatternKind.LINEAR:
        c = n
    elif kind is PatternKind.N_LOG2:
        c = n * math.log2(n)
    elif kind is PatternKind.SQUARED:
        c = n * n
    else:
        raise ValueError(f"no closed-form optimum for pattern {kind}")
    return math.log(n) - 2.0 * loss_pow * c


def optimal_nodes_conceptual(loss: float, copies: int, comm: CommPattern) -> NodeOptimum:
    """Closed-form (or 1-D rootfound) optimum of n * exp(-2 loss**copies c(n)).

    Per pattern, the stationary point of the smooth objective:

        constant, log2n   none: speedup grows monotonically
        log2^2(n)         exp(ln(2)**2 / (4 p**k))
        n                 1 / (2 p**k)
        n*log2(n)         root of 2 p**k n (log2 n + 1/ln 2) = 1
        n**2              1 / (2 sqrt(p**k))

    The returned integer is whichever of floor/ceil of the stationary point
    gives the larger approximate speedup (ties toward the smaller), clamped to
    >= 1. loss = 0 is monotonic for every pattern. Custom patterns have no
    closed form and raise ValueError.
    """
    if not 0.0 <= loss <= 1.0:
        raise ValueError(f"loss must be in [0, 1], got {loss}")
    if copies < 1:
        raise ValueError(f"copies must be >= 1, got {copies}")
    kind = comm.kind
    if kind is PatternKind.CUSTOM:
        raise ValueError("no closed-form optimum for custom patterns")
    if kind in (PatternKind.CONSTANT, PatternKind.LOG2):
        return NodeOptimum(kind, monotonic=True, nodes=None, nodes_real=None)
    pk = loss**copies
    if pk == 0.0:
        return NodeOptimum(kind, monotonic=True, nodes=None, nodes_real=None)

    if kind is PatternKind.LOG2_SQUARED:
        try:
            root = math.exp(math.log(2.0) ** 2 / (4.0 * pk))
        except OverflowError:
            root = math.inf
    elif kind is PatternKind.LINEAR:
        root = 1.0 / (2.0 * pk)
    elif kind is PatternKind.SQUARED:
        root = 1.0 / (2.0 * math.sqrt(pk))
    else:  # N_LOG2

        def slope(n: float) -> float:
            return 2.0 * pk * n * (math.log2(n) + 1.0 / math.log(2.0)) - 1.0

        if slope(1.0) >= 0.0:
            root = 1.0
        else:
            hi = 2.0
            while slope(hi) < 0.0:
                hi *= 2.0
            root = brentq(slope, 1.0, hi, xtol=1e-12, rtol=8.9e-16)

    if math.isinf(root):
        # stationary point beyond float range: effectively unbounded growth
        return NodeOptimum(kind, monotonic=True, nodes=None, nodes_real=math.inf)

    lo = max(1, math.floor(root))
    hi = max(1, math.ceil(root))
    if _approx_speedup_value(pk, kind, lo) >= _approx_speedup_value(pk, kind, hi):
        best = lo
    else:
        best = hi
    return NodeOptimum(kind, monotonic=False, nodes=best, nodes_real=root)


@dataclass(frozen=True)
class CopyOptimum:
    """Redundancy level maximizing the expected speedup.

    copies                argmax of the exact speedup over 1..max_copies
    report                the model report at that copy count
    rounds_cost_product   copies * expected_rounds there, the transmit-side
                          cost factor, reported as a diagnostic
    """

    copies: int
    report: SpeedupReport
    rounds_cost_product: float


def optimal_copies(scenario: Scenario, max_copies: int = 64) -> CopyOptimum:
    """Pick the copy count in [1, max_copies] maximizing the exact speedup.

    Redundancy trades transmit time (each copy costs alpha) against fewer
    retransmission rounds. The selection criterion is the exact expected
    speedup; ties break toward fewer copies. The copies * expected_rounds
    product at the winner is returned as a diagnostic (it tracks the
    transmit-side overhead but is not the selection criterion).
    """
    if max_copies < 1:
        raise ValueError(f"max_copies must be >= 1, got {max_copies}")
    best_k = 1
    best_report = expected_speedup(scenario.with_(copies=1))
    for k in range(2, max_copies + 1):
        report = expected_speedup(scenario.with_(copies=k))
        if report.speedup > best_report.speedup:
            best_k, best_report = k, report
    return CopyOptimum(
        copies=best_k,
        report=best_report,
        rounds_cost_product=best_k * best_report.expected_rounds,
    )


def delay_limited_speedup(nodes: int, work_seconds: float, beta: float) -> float:
    """Speedup ceiling when transmit time vanishes: w n / (2 n beta + w).

    With alpha = 0 and enough redundancy the retransmission factor tends to 1
    and only the round-trip delay bounds the speedup.
    """
    if nodes < 1:
        raise ValueError(f"nodes must be >= 1, got {nodes}")
    if work_seconds <= 0:
        raise ValueError(f"work_seconds must be positive, got {work_seconds}")
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    return work_seconds * nodes / (2.0 * nodes * beta + work_seconds)
