"""End-to-end acceptance checks.

One test per criterion, so that ``pytest -v`` prints exactly one pass/fail
line for each. Every expected value here comes from an independent route:
a closed form, a second series form computed locally in this file, a
brute-force search, or a published reference number. Each criterion also
carries a wall-clock budget asserted at the end of its body.

The maximum-of-geometrics expectation is deliberately evaluated through two
different series in this suite: the package sums survival probabilities,
while ``telescoping_rounds`` below sums i times the probability mass at
exactly i rounds. They share no code.
"""

import dataclasses
import math
import time

import numpy as np
import pytest

from lossybsp.algorithms import (
    evaluate_reference_row,
    fft2d_speedup,
    matmul_speedup,
    reference_rows,
)
from lossybsp.model import (
    CommPattern,
    NetworkParams,
    RetransmitPolicy,
    Scenario,
    Workload,
    expected_rounds_all,
    expected_rounds_lost_only,
    optimal_copies,
    optimal_nodes_conceptual,
    round_success_probability,
    single_packet_success,
)
from lossybsp.probe import EchoResponder, LossyChannel, run_probe, to_network_params
from lossybsp.simulate import SimConfig, compare_copies_paired, simulate_round_transmissions


def telescoping_rounds(packet_success, packets, tol=1e-16):
    """E[max of `packets` geometrics] as sum of i * P(max == i)."""
    q = 1.0 - packet_success
    total = 0.0
    prev = 0.0  # P(max <= i-1)
    i = 1
    while True:
        cur = (1.0 - q**i) ** packets
        total += i * (cur - prev)
        if cur >= 1.0 or (1.0 - cur) * (i + 1) < tol * total:
            return total
        prev = cur
        i += 1
        if i > 10**8:
            raise RuntimeError("telescoping oracle did not converge")


def _scenario(loss, packets, policy, copies=1):
    return Scenario(
        network=NetworkParams(loss=loss, alpha=0.002, beta=0.05),
        comm=CommPattern.custom(lambda n, c=packets: float(c), f"{packets} packets"),
        work=Workload(seconds=100.0),
        copies=copies,
        policy=policy,
        nodes=16,
    )


def test_criterion_1_lost_only_series_collapses_to_geometric_for_single_packet():
    start = time.perf_counter()
    for i in range(1, 100):
        p_s = i / 100.0
        series = expected_rounds_lost_only(p_s, 1)
        assert abs(series - 1.0 / p_s) <= 1e-12, f"p_s={p_s}"
    assert time.perf_counter() - start < 1.0


def test_criterion_2_survival_and_telescoping_series_forms_agree():
    start = time.perf_counter()
    # cover p read as loss (success 1-p), as a round-trip success factor
    # ((1-p)^2), and as the success probability itself
    rates = (0.01, 0.1, 0.3)
    successes = sorted(
        {1.0 - p for p in rates} | {(1.0 - p) ** 2 for p in rates} | set(rates)
    )
    for c in (1, 10, 100, 1000):
        for s in successes:
            survival = expected_rounds_lost_only(s, c)
            telescoped = telescoping_rounds(s, c)
            assert abs(survival - telescoped) <= 1e-9 * telescoped, (c, s)
    assert time.perf_counter() - start < 5.0


def test_criterion_3_monte_carlo_means_match_series_within_three_standard_errors():
    start = time.perf_counter()

    lost = simulate_round_transmissions(
        SimConfig(
            scenario=_scenario(0.1, 10, RetransmitPolicy.LOST_ONLY),
            trials=10**5,
            master_seed=42,
        )
    )
    lost_expect = expected_rounds_lost_only(single_packet_success(0.1, 1), 10)
    assert lost.std_error > 0
    assert abs(lost.mean_rounds - lost_expect) <= 3 * lost.std_error

    full = simulate_round_transmissions(
        SimConfig(
            scenario=_scenario(0.05, 5, RetransmitPolicy.ALL_ON_ANY_LOSS),
            trials=10**5,
            master_seed=42,
        )
    )
    full_expect = expected_rounds_all(round_success_probability(0.05, 1, 5))
    assert full_expect == 1.0 / round_success_probability(0.05, 1, 5)
    assert abs(full.mean_rounds - full_expect) <= 3 * full.std_error

    assert time.perf_counter() - start < 30.0


def test_criterion_4_reference_kernel_table_reproduced_within_five_percent():
    start = time.perf_counter()
    published_speedups = {
        "matmul": 4740.89,
        "bitonic-sort": 4.72,
        "fft-2d": 773.4,
        "laplace-jacobi": 12439.43,
    }
    rows = {row.label: row for row in reference_rows()}
    assert set(rows) == set(published_speedups)
    for label, expect in published_speedups.items():
        row = rows[label]
        assert row.published.speedup == expect
        report, errors = evaluate_reference_row(row)
        assert errors["speedup"] <= 0.05, (label, report.speedup, expect)

    # the grid-size reading matters: a 2^17-node mesh misses the published
    # number by ~29%, so 2^16 is the one the table used
    matmul = rows["matmul"]
    off_grid = dataclasses.replace(matmul.instance, nodes=2**17)
    variant = matmul_speedup(off_grid, matmul.network, matmul.copies, exact_grid=False)
    assert variant.speedup == pytest.approx(3377.86, rel=1e-3)
    assert abs(variant.speedup - 4740.89) / 4740.89 > 0.05

    # likewise base-2 logs, not natural logs, in the transform costs
    fft = rows["fft-2d"]
    ln_variant = fft2d_speedup(fft.instance, fft.network, fft.copies, log_base=math.e)
    assert ln_variant.speedup == pytest.approx(527.85, rel=1e-3)
    assert abs(ln_variant.speedup - 773.4) / 773.4 > 0.05

    assert time.perf_counter() - start < 10.0


def test_criterion_5_closed_form_node_optima_match_brute_force():
    start = time.perf_counter()
    top = 10**4
    n = np.arange(1, top + 1, dtype=float)
    log2n = np.log2(n)
    curves = {
        "log2^2n": log2n**2,
        "n": n,
        "nlog2n": n * log2n,
        "n^2": n * n,
    }
    for pattern_text, c_of_n in curves.items():
        pattern = CommPattern.parse(pattern_text)
        for p in (0.05, 0.1, 0.2):
            for k in (1, 2):
                # communication-free speedup n * exp(-2 p^k c(n)), compared
                # in log space so n^2 at small p cannot overflow
                objective = np.log(n) - 2.0 * p**k * c_of_n
                brute = int(n[int(np.argmax(objective))])
                optimum = optimal_nodes_conceptual(p, k, pattern)
                assert not optimum.monotonic, (pattern_text, p, k)
                if optimum.nodes_real > top:
                    # stationary point beyond the window; the window edge
                    # must then be the brute-force argmax
                    assert brute == top, (pattern_text, p, k)
                else:
                    assert optimum.nodes == brute, (pattern_text, p, k, brute)
    assert time.perf_counter() - start < 10.0


def test_criterion_6_extra_copies_never_hurt_analytically_or_in_paired_runs():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    for i in range(10**4):
        p = float(rng.uniform(0.005, 0.995))
        c = int(rng.integers(1, 51))
        k = int(rng.integers(2, 7))

        single = round_success_probability(p, 1, c)
        redundant = round_success_probability(p, k, c)
        assert single <= redundant
        assert single < redundant  # strict: p in (0,1), k >= 2, c > 0

        mean_one, mean_k = compare_copies_paired(p, c, 1, k, trials=4, master_seed=i)
        assert mean_k <= mean_one, (p, c, k)
    assert time.perf_counter() - start < 60.0


def test_criterion_7_best_redundancy_attains_the_delay_limit_as_transmit_cost_vanishes():
    start = time.perf_counter()
    nodes, work, beta = 131072, 36000.0, 0.05
    scenario = Scenario(
        network=NetworkParams(loss=0.1, alpha=0.0, beta=beta),
        comm=CommPattern.linear(),
        work=Workload(seconds=work),
        copies=1,
        policy=RetransmitPolicy.LOST_ONLY,
        nodes=nodes,
    )
    best = optimal_copies(scenario, max_copies=64)
    limit = nodes / (2.0 * nodes * beta / work + 1.0)
    assert abs(best.report.speedup - limit) <= 1e-3 * limit
    assert best.report.speedup <= limit * (1.0 + 1e-12)
    assert time.perf_counter() - start < 1.0


def test_criterion_8_probe_recovers_injected_loss_on_loopback_channel():
    start = time.perf_counter()

    def probe_once(channel):
        responder = EchoResponder(channel.b).start()
        try:
            (sample,) = run_probe(
                channel.a, packet_sizes=(256,), count=10**4, drain_timeout=0.3
            )
        finally:
            responder.stop()
        return sample

    # loss injected on the outbound leg only: the echo failure rate is the
    # injected rate, and the per-direction estimate is its square root
    # complement, 1 - sqrt(0.9)
    sample = probe_once(LossyChannel(loss=(0.1, 0.0), seed=17))
    assert 0.08 <= sample.loss_rate <= 0.12
    recovered = to_network_params(sample).loss
    assert abs(recovered - (1.0 - math.sqrt(0.9))) <= 0.02

    # the same injected rate on both legs recovers 0.1 per direction
    symmetric = probe_once(LossyChannel(loss=(0.1, 0.1), seed=23))
    assert abs(to_network_params(symmetric).loss - 0.1) <= 0.02

    clean = probe_once(LossyChannel())
    assert clean.loss_rate == 0.0
    assert to_network_params(clean).loss == 0.0

    assert time.perf_counter() - start < 30.0
