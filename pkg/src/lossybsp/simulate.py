"""Packet-level Monte-Carlo check of the retransmission model.

The simulator draws individual Bernoulli losses rather than sampling the
closed-form geometric round counts, so it exercises the same mechanism the
analytic series describes: per round each unfinished packet sends ``copies``
data datagrams; if at least one survives, ``copies`` ack datagrams are sent
and the packet completes only if at least one ack survives. Under
``ALL_ON_ANY_LOSS`` a single incomplete packet restarts the whole exchange;
under ``LOST_ONLY`` completed packets stay done.

Determinism: trial ``t`` draws from ``numpy.random.default_rng([master_seed, t])``,
so results are bit-identical however trials are batched or parallelized.

``compare_copies_paired`` is a separate coupled comparator for redundancy
levels: it shares one uniform per (trial, packet) across both copy counts and
maps it through the inverse geometric CDF, so "more copies is never slower"
holds per trial by construction while each marginal stays exact. The general
simulator keeps its raw Bernoulli draws; the two routes are intentionally
independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .model import (
    RetransmitPolicy,
    Scenario,
    exchange_time,
    single_packet_success,
)

__all__ = [
    "SimConfig",
    "SimResult",
    "simulate_round_transmissions",
    "simulate_speedup",
    "compare_copies_paired",
]


@dataclass(frozen=True)
class SimConfig:
    """Simulation inputs.

    scenario     model evaluation point (packet count is rounded to an integer)
    trials       independent supersteps to simulate
    master_seed  root of the per-trial substreams
    max_rounds   per-trial cap; a trial that hits it is recorded at the cap
    drop_capped  exclude capped trials from the mean (they are counted either way)
    """

    scenario: Scenario
    trials: int
    master_seed: int
    max_rounds: int = 10**6
    drop_capped: bool = False

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be >= 1, got {self.max_rounds}")


@dataclass(frozen=True)
class SimResult:
    """Simulation outputs.

    mean_rounds        mean transmission rounds per superstep
    std_error          sample standard deviation over sqrt(trials used)
    empirical_speedup  w / (w/n + 2 * mean_rounds * tau)
    capped_trials      trials that hit max_rounds (flagged, see drop_capped)
    """

    trials: int
    mean_rounds: float
    std_error: float
    empirical_speedup: float
    capped_trials: int
    master_seed: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "trials": self.trials,
            "mean_rounds": self.mean_rounds,
            "std_error": self.std_error,
            "empirical_speedup": self.empirical_speedup,
            "capped_trials": self.capped_trials,
            "master_seed": self.master_seed,
        }


def _trial_rounds_lost_only(
    rng: np.random.Generator, loss: float, copies: int, packets: int, cap: int
) -> tuple[int, bool]:
    remaining = packets
    rounds = 0
    while remaining > 0:
        if rounds >= cap:
            return cap, True
        rounds += 1
        data_ok = ~(rng.random((remaining, copies)) < loss).all(axis=1)
        n_ok = int(data_ok.sum())
        if n_ok:
            ack_ok = ~(rng.random((n_ok, copies)) < loss).all(axis=1)
            remaining -= int(ack_ok.sum())
    return max(rounds, 1), False


def _trial_rounds_all(
    rng: np.random.Generator, loss: float, copies: int, packets: int, cap: int
) -> tuple[int, bool]:
    rounds = 0
    while True:
        if rounds >= cap:
            return cap, True
        rounds += 1
        data_ok = ~(rng.random((packets, copies)) < loss).all(axis=1)
        if data_ok.all():
            ack_ok = ~(rng.random((packets, copies)) < loss).all(axis=1)
            if ack_ok.all():
                return rounds, False


def simulate_round_transmissions(config: SimConfig) -> SimResult:
    """Simulate per-superstep transmission rounds for the configured scenario.

    The scenario's packet count c(n) is rounded to the nearest integer for
    the packet-level draws (the speedup estimate keeps the exact c(n) inside
    tau). loss = 1 short-circuits: every trial is recorded at the cap without
    looping. Raises ValueError if drop_capped discards every trial.
    """
    scenario = config.scenario
    loss = scenario.network.loss
    copies = scenario.copies
    packets = int(round(scenario.comm.packets(scenario.nodes)))
    cap = config.max_rounds

    rounds = np.empty(config.trials, dtype=np.float64)
    capped = np.zeros(config.trials, dtype=bool)
    if packets == 0 or loss == 0.0:
        rounds.fill(1.0)
    elif single_packet_success(loss, copies) == 0.0:
        # no datagram can ever survive; every trial would spin to the cap
        rounds.fill(float(cap))
        capped.fill(True)
    else:
        trial_fn = (
            _trial_rounds_all
            if scenario.policy is RetransmitPolicy.ALL_ON_ANY_LOSS
            else _trial_rounds_lost_only
        )
        for t in range(config.trials):
            rng = np.random.default_rng([config.master_seed, t])
            r, hit = trial_fn(rng, loss, copies, packets, cap)
            rounds[t] = r
            capped[t] = hit

    n_capped = int(capped.sum())
    used = rounds[~capped] if config.drop_capped else rounds
    if used.size == 0:
        raise ValueError("every trial hit max_rounds and drop_capped discarded them all")
    mean = float(used.mean())
    std_error = float(used.std(ddof=1) / math.sqrt(used.size)) if used.size > 1 else 0.0

    w = scenario.work.seconds
    n = scenario.nodes
    tau = exchange_time(scenario.comm, n, copies, scenario.network)
    empirical = w / (w / n + 2.0 * mean * tau)
    return SimResult(
        trials=config.trials,
        mean_rounds=mean,
        std_error=std_error,
        empirical_speedup=empirical,
        capped_trials=n_capped,
        master_seed=config.master_seed,
    )


def simulate_speedup(config: SimConfig) -> SimResult:
    """Simulate and report the empirical speedup estimate.

    Same draws as ``simulate_round_transmissions``; the estimate charges each
    superstep its compute slice plus 2 * mean_rounds * tau.
    """
    return simulate_round_transmissions(config)


def compare_copies_paired(
    loss: float,
    packets: int,
    copies_a: int,
    copies_b: int,
    trials: int,
    master_seed: int,
) -> tuple[float, float]:
    """Coupled estimate of mean lost-only rounds at two redundancy levels.

    One uniform is drawn per (trial, packet) and mapped through the inverse
    geometric CDF at each level's per-round packet success (1 - loss**k)**2;
    a trial's round count is the max over its packets. Because the inverse
    CDF is monotone in the success probability, the level with more copies
    never takes more rounds on any trial, so the comparison is free of
    sampling noise in its sign while each marginal mean remains an exact
    estimate of the lost-only expectation.

    Returns (mean_rounds_a, mean_rounds_b).
    """
    if not 0.0 < loss < 1.0:
        raise ValueError(f"loss must be in (0, 1) for a paired comparison, got {loss}")
    if packets < 1:
        raise ValueError(f"packets must be >= 1, got {packets}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng([master_seed, 0])
    u = rng.random((trials, packets))

    def mean_rounds(copies: int) -> float:
        success = single_packet_success(loss, copies)
        # inverse CDF of the geometric distribution on {1, 2, ...}
        g = np.floor(np.log1p(-u) / math.log1p(-success)) + 1.0
        return float(np.max(g, axis=1).mean())

    return mean_rounds(copies_a), mean_rounds(copies_b)
